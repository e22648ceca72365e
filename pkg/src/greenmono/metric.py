"""Conformal factors, Gauss curvature, and curvature-defect summaries.

A conformal factor u rescales the flat metric to e^(2u) |dz|^2. Each
shipped family evaluates u and its flat Laplacian in closed form, so
curvature quantities carry no discretisation error beyond quadrature:

    Flat          u = 0
    LogDeriv(g)   u = ln|g'(v)| at the disk preimage v (harmonic, K = 0)
    Spherical(l)  u = ln(2l / (1 + l^2 |z|^2)),  K = +1
    Hyperbolic(l) u = ln(2l / (1 - l^2 |z|^2)),  K = -1
    StantonWeight e^(2u) equals a supplied positive weight (wraps a base
                  family so that the weight's admissibility is exactly the
                  curvature-defect condition kappa > 0)

The defect kappa(domain) = 1 - (2 pi)^-1 * integral of max(-lap u, 0) over
the domain measures how much of the flat isoperimetric constant survives
positive curvature; kappa = 1 for flat and nonpositively curved factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conformal import AnalyticMap, TWO_PI
from .quadrature import adaptive_gauss, periodic_integral


class FactorEvaluationError(ValueError):
    """Factor evaluated outside its admissible region."""


class ConformalFactor:
    """Base class; subclasses provide u(z, pre) and lap_u(z, pre)."""

    family = "abstract"

    def u(self, z, pre=None):
        raise NotImplementedError

    def lap_u(self, z, pre=None):
        raise NotImplementedError

    def e2u(self, z, pre=None):
        return np.exp(2.0 * self.u(z, pre))

    def describe(self) -> dict:
        return {"family": self.family}


class Flat(ConformalFactor):
    family = "flat"

    def u(self, z, pre=None):
        return np.zeros(np.shape(z))

    def lap_u(self, z, pre=None):
        return np.zeros(np.shape(z))


class LogDeriv(ConformalFactor):
    """u = ln|g'| of an analytic map g on the parameter disk; harmonic."""

    family = "logderiv"

    def __init__(self, g: AnalyticMap):
        g.require_certified()
        self.g = g

    def u(self, z, pre=None):
        if pre is None:
            raise FactorEvaluationError(
                "logderiv factor needs the disk preimage of the evaluation point")
        return np.log(np.abs(self.g.deriv(pre)))

    def lap_u(self, z, pre=None):
        return np.zeros(np.shape(z))

    def describe(self) -> dict:
        return {"family": self.family,
                "coeffs": [[c.real, c.imag] for c in self.g.coeffs]}


class Spherical(ConformalFactor):
    """Round-sphere factor of curvature +1 (radius 1/lambda chart scale)."""

    family = "spherical"

    def __init__(self, lam: float):
        if not lam > 0:
            raise ValueError("spherical factor needs lambda > 0")
        self.lam = float(lam)

    def u(self, z, pre=None):
        q = 1.0 + (self.lam * np.abs(z)) ** 2
        return math.log(2.0 * self.lam) - np.log(q)

    def lap_u(self, z, pre=None):
        q = 1.0 + (self.lam * np.abs(z)) ** 2
        return -4.0 * self.lam ** 2 / q ** 2

    def describe(self) -> dict:
        return {"family": self.family, "lambda": self.lam}


class Hyperbolic(ConformalFactor):
    """Poincare-type factor of curvature -1 on |z| < 1/lambda."""

    family = "hyperbolic"

    def __init__(self, lam: float):
        if not 0 < lam < 1:
            raise ValueError("hyperbolic factor needs lambda in (0, 1)")
        self.lam = float(lam)

    def _q(self, z):
        q = 1.0 - (self.lam * np.abs(z)) ** 2
        if np.any(q <= 0.0):
            raise FactorEvaluationError(
                f"hyperbolic factor undefined for |z| >= 1/{self.lam}")
        return q

    def u(self, z, pre=None):
        return math.log(2.0 * self.lam) - np.log(self._q(z))

    def lap_u(self, z, pre=None):
        return 4.0 * self.lam ** 2 / self._q(z) ** 2

    def describe(self) -> dict:
        return {"family": self.family, "lambda": self.lam}


class StantonWeight(ConformalFactor):
    """Weight factor e^(2u) = w for a positive C^2 weight w.

    Realised by wrapping the base family whose squared density equals the
    weight; admissibility of the weight is then the kappa > 0 condition of
    the wrapped factor.
    """

    family = "stanton"

    def __init__(self, base: ConformalFactor):
        if isinstance(base, StantonWeight):
            raise ValueError("stanton weight cannot wrap another stanton weight")
        self.base = base

    def u(self, z, pre=None):
        return self.base.u(z, pre)

    def lap_u(self, z, pre=None):
        return self.base.lap_u(z, pre)

    def weight(self, z, pre=None):
        return self.base.e2u(z, pre)

    def describe(self) -> dict:
        return {"family": self.family, "base": self.base.describe()}


@dataclass(frozen=True)
class CurvatureSummary:
    kappa: float
    total_k_plus: float
    area_sigma: float
    length_sigma: float
    error_estimate: float = 0.0

    @property
    def admissible(self) -> bool:
        return self.kappa > 0.0


def gauss_curvature(factor: ConformalFactor, z, pre=None):
    """K = -e^(-2u) * lap(u) at z (pre = disk preimage, for logderiv)."""
    lap = factor.lap_u(z, pre)
    if not np.any(lap):
        return np.zeros(np.shape(z)) if np.ndim(z) else 0.0
    out = -np.exp(-2.0 * factor.u(z, pre)) * lap
    return out if np.ndim(z) else float(out)


def curvature_plus(factor: ConformalFactor, z, pre=None):
    return np.maximum(gauss_curvature(factor, z, pre), 0.0)


def curvature_minus(factor: ConformalFactor, z, pre=None):
    return np.maximum(-np.asarray(gauss_curvature(factor, z, pre)), 0.0)


def _radial_disk_integral(f: AnalyticMap, density, quad_tol: float):
    """Integral over f(disk) of `density(z, pre)` dA, pulled back through f.

    density receives image points and their disk preimages and must return
    the flat-area integrand before the |f'|^2 Jacobian.
    """
    theta_tol = min(1e-12, 0.01 * quad_tol)
    theta_errs = []

    def ring_mass(r: np.ndarray) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))

        def build(n: int) -> np.ndarray:
            ring = np.exp(1j * np.arange(n) * (TWO_PI / n))
            w = r[:, None] * ring[None, :]
            z = f.eval(w)
            return density(z, w) * np.abs(f.deriv(w)) ** 2

        vals, err, _ = periodic_integral(build, tol=theta_tol)
        theta_errs.append(err)
        return r * vals

    q = adaptive_gauss(ring_mass, 0.0, 1.0, atol=0.0, rtol=max(quad_tol, 1e-13))
    theta_err = max(theta_errs) if theta_errs else 0.0
    return q.value, q.error + theta_err


def curvature_summary(f: AnalyticMap, factor: ConformalFactor,
                      quad_tol: float = 1e-10) -> CurvatureSummary:
    """Total positive curvature, defect kappa, and sigma-area/length of f(disk).

    kappa <= 0 is reported, not raised: such factors stay loadable for
    negative testing but are refused by the monotone machinery downstream.
    """
    if not quad_tol > 0:
        raise ValueError("quad_tol must be positive")
    f.require_certified()

    k_plus, err_k = _radial_disk_integral(
        f, lambda z, pre: np.maximum(-factor.lap_u(z, pre), 0.0), quad_tol)
    area, err_a = _radial_disk_integral(
        f, lambda z, pre: factor.e2u(z, pre), quad_tol)

    def boundary(n: int) -> np.ndarray:
        ring = np.exp(1j * np.arange(n) * (TWO_PI / n))
        z = f.eval(ring)
        return np.exp(factor.u(z, ring)) * np.abs(f.deriv(ring))

    length_arr, err_l, _ = periodic_integral(boundary, tol=min(1e-12, 0.01 * quad_tol))
    return CurvatureSummary(
        kappa=1.0 - k_plus / TWO_PI,
        total_k_plus=k_plus,
        area_sigma=area,
        length_sigma=float(length_arr),
        error_estimate=err_k + err_a + err_l,
    )
