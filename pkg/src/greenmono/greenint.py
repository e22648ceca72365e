"""Level-set machinery for L^p Green integrals on conformal domains.

For a pole a in the domain f(disk), every area integral against the
conformal weight pulls back through h = f o phi_b (b = f^-1(a)) to the
unit disk, where the Green level sets {g > t} become the concentric disks
|w| < e^(-2 pi t). The sublevel area

    X(t) = integral over |w| < e^(-2 pi t) of E(w) dA,
    E(w) = e^(2 u(h(w))) |h'(w)|^2

is therefore a smooth radial integral: this module fits the angular mass
m(r) = int E(r e^{i theta}) dtheta once per scenario as a Chebyshev
polynomial in r^2, after which X, the ring density X0 = -dX/dt, power
moments, the gamma-normalised functional F(p), and the p -> infinity /
t -> infinity limit probes are all cheap 1D operations. The decay budget
is c = 4 pi kappa with kappa the curvature defect, which makes X a valid
monotone profile for the moment engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial.chebyshev import Chebyshev

from . import stieltjes
from .conformal import (AnalyticMap, ConformalRadiusResult, TWO_PI,
                        conformal_radius, map_invert, mobius, mobius_deriv)
from .metric import ConformalFactor, CurvatureSummary, LogDeriv, curvature_summary
from .quadrature import QuadratureError, gauss_nodes
from .stieltjes import MonotoneProfile, PowerMoment

DEFAULT_P_GRID = (0.0, 0.25, 0.5, 1.0, 2.0, 5.0)
FOUR_PI = 4.0 * math.pi
MAX_POLE_PREIMAGE = 0.95
_CHEB_DEGREES = (8, 16, 32, 64, 128, 256, 512, 1024, 2048)
_TAYLOR_TERMS = 15
_TAYLOR_CUT = 0.05


class InadmissibleScenario(ValueError):
    """Scenario has kappa <= 0 (or violates a hypothesis) for monotone checks."""


@dataclass(frozen=True)
class FunctionalPoint:
    p: float
    value: float
    error: float


@dataclass(frozen=True)
class LimitProbes:
    """Large-p functional probe paired with the weighted tail area.

    Both converge to pi * (e^(u(a)) R(a))^2 when kappa = 1 and to 0 when
    kappa < 1; `expected` carries that target value.
    """

    p_probe: float
    t_probe: float
    functional: float
    functional_error: float
    weighted_area: float
    weighted_area_error: float
    expected: float
    kappa: float


class LevelProfile:
    """Radial Chebyshev model of the pulled-back sublevel areas."""

    def __init__(self, density, c: float, t_max: float, quad_tol: float):
        self.c = c
        self.t_max = t_max
        self._fit(density, quad_tol)

    def _fit(self, density, quad_tol: float) -> None:
        probe_r = np.sqrt(np.linspace(0.0, 1.0, 33))
        theta_tol = min(1e-12, 0.01 * quad_tol)

        def masses(radii: np.ndarray, n: int) -> np.ndarray:
            ring = np.exp(1j * np.arange(n) * (TWO_PI / n))
            w = radii[:, None] * ring[None, :]
            return density(w).mean(axis=1) * TWO_PI

        n = 64
        prev = masses(probe_r, n)
        theta_err = math.inf
        while n < 16384:
            n *= 2
            cur = masses(probe_r, n)
            scale = max(1.0, float(np.max(np.abs(cur))))
            theta_err = float(np.max(np.abs(cur - prev)))
            if theta_err <= theta_tol * scale:
                break
            prev = cur
        else:
            raise QuadratureError("angular mass did not resolve at 16384 nodes")
        self.n_theta = n

        def mass_of_x(x: np.ndarray) -> np.ndarray:
            return masses(np.sqrt(np.asarray(x, dtype=float)), self.n_theta)

        probes = np.linspace(0.0, 1.0, 513)
        fit_tol = max(1e-13, 0.001 * quad_tol)
        prev_poly = Chebyshev.interpolate(mass_of_x, _CHEB_DEGREES[0], domain=[0.0, 1.0])
        poly = prev_poly
        fit_err = math.inf
        for deg in _CHEB_DEGREES[1:]:
            poly = Chebyshev.interpolate(mass_of_x, deg, domain=[0.0, 1.0])
            scale = max(1.0, float(np.max(np.abs(poly(probes)))))
            fit_err = float(np.max(np.abs(poly(probes) - prev_poly(probes))))
            if fit_err <= fit_tol * scale:
                break
            prev_poly = poly
        else:
            raise QuadratureError("radial mass did not resolve at degree 2048")
        self.mass_poly = poly
        self.mass_int = poly.integ(lbnd=0.0)
        # Taylor coefficients of the mass at x = 0 give relative accuracy for
        # X(t) at small radii, where direct evaluation of the antiderivative
        # would cancel
        fact = 1.0
        taylor = []
        dp = poly
        for j in range(_TAYLOR_TERMS):
            taylor.append(float(dp(0.0)) / fact)
            dp = dp.deriv()
            fact *= (j + 1)
        self.taylor = np.array(taylor)
        self.theta_error = theta_err
        self.fit_error = fit_err
        self.degree = len(poly.coef) - 1

    def mass(self, r):
        """Angular mass m(r) = int_0^{2 pi} E(r e^{i theta}) dtheta."""
        r = np.asarray(r, dtype=float)
        return self.mass_poly(r * r)

    def _area_of_x(self, x: np.ndarray) -> np.ndarray:
        """X as a function of x = rho^2: one half the mass antiderivative."""
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        small = x <= _TAYLOR_CUT
        if np.any(small):
            xs = x[small]
            acc = np.zeros_like(xs)
            for j in range(_TAYLOR_TERMS - 1, -1, -1):
                acc = acc * xs + self.taylor[j] / (j + 1)
            out[small] = 0.5 * acc * xs
        if np.any(~small):
            out[~small] = 0.5 * self.mass_int(x[~small])
        return out

    def sublevel_area(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise ValueError("levels t must be nonnegative")
        x = np.exp(-2.0 * TWO_PI * t_arr)
        out = self._area_of_x(x)
        return out if np.ndim(t) else float(out)

    def ring_density(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise ValueError("levels t must be nonnegative")
        x = np.exp(-2.0 * TWO_PI * t_arr)
        out = TWO_PI * x * self.mass_poly(x)
        return out if np.ndim(t) else float(out)

    def t_grid(self) -> np.ndarray:
        fine = np.geomspace(self.t_max * 1e-5, self.t_max, 160)
        coarse = np.linspace(0.0, self.t_max, 129)
        return np.unique(np.concatenate([[0.0], coarse, fine]))

    def as_monotone_profile(self) -> MonotoneProfile:
        return MonotoneProfile(x=self.sublevel_area, c=self.c,
                               t_grid=self.t_grid(), x0=self.ring_density)


class Scenario:
    """One verification unit: a mapped domain, a factor, a pole, tolerances.

    The pole may be given either as a domain point (inverted through the
    map) or directly as its exact disk preimage; it must stay strictly
    interior (|preimage| <= 0.95).
    """

    def __init__(self, amap: AnalyticMap, factor: ConformalFactor,
                 pole: Optional[complex] = None,
                 pole_preimage: Optional[complex] = None,
                 p_grid: Sequence[float] = DEFAULT_P_GRID,
                 t_max: float = 1.5, quad_tol: float = 1e-10,
                 tol: float = 1e-9, label: str = ""):
        if (pole is None) == (pole_preimage is None):
            raise ValueError("give exactly one of pole / pole_preimage")
        if not quad_tol > 0:
            raise ValueError("quad_tol must be positive")
        if not t_max > 0:
            raise ValueError("t_max must be positive")
        ps = [float(p) for p in p_grid]
        if any(p <= -1.0 for p in ps):
            raise ValueError("p_grid entries must exceed -1")
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ValueError("p_grid must be strictly increasing")
        amap.require_certified()
        self.map = amap
        self.factor = factor
        self.p_grid = tuple(ps)
        self.t_max = float(t_max)
        self.quad_tol = float(quad_tol)
        self.tol = float(tol)
        self.label = label
        if pole_preimage is not None:
            b = complex(pole_preimage)
        else:
            b = map_invert(amap, complex(pole), tol=1e-13)
        if abs(b) > MAX_POLE_PREIMAGE:
            raise ValueError(
                f"pole preimage |b| = {abs(b):.4f} exceeds {MAX_POLE_PREIMAGE}; "
                "pole must be strictly interior")
        self.pole_preimage = b
        self.pole = complex(amap.eval(np.array([b]))[0])

    @cached_property
    def curvature(self) -> CurvatureSummary:
        return curvature_summary(self.map, self.factor, self.quad_tol)

    @property
    def kappa(self) -> float:
        return self.curvature.kappa

    @property
    def c(self) -> float:
        return FOUR_PI * self.kappa

    @property
    def admissible(self) -> bool:
        return self.kappa > 0.0

    def require_admissible(self) -> None:
        if not self.admissible:
            raise InadmissibleScenario(
                f"kappa(domain) = {self.kappa:.6g} <= 0: "
                "kappa(Omega) > 0 required for the monotone machinery")

    @cached_property
    def profile(self) -> LevelProfile:
        self.require_admissible()
        if self.t_max < 3.0 / self.c:
            raise ValueError(
                f"t_max = {self.t_max:g} is below 3/(4 pi kappa) = {3.0 / self.c:.4g}; "
                "raise t_max so the tail envelope is small")
        b = self.pole_preimage
        f = self.map
        factor = self.factor

        def density(w: np.ndarray) -> np.ndarray:
            v = mobius(b, w)
            z = f.eval(v)
            dh = f.deriv(v) * mobius_deriv(b, w)
            return factor.e2u(z, v) * np.abs(dh) ** 2

        return LevelProfile(density, self.c, self.t_max, self.quad_tol)

    @cached_property
    def monotone_profile(self) -> MonotoneProfile:
        return self.profile.as_monotone_profile()

    @cached_property
    def radius(self) -> ConformalRadiusResult:
        b = self.pole_preimage
        r = (1.0 - abs(b) ** 2) * abs(complex(self.map.deriv(np.array([b]))[0]))
        return ConformalRadiusResult(radius=r, robin_mass=-math.log(r))

    def pole_weight(self) -> float:
        """e^(u(a)) at the pole."""
        return float(np.exp(self.factor.u(np.array([self.pole]),
                                          np.array([self.pole_preimage])))[0])

    def describe(self) -> dict:
        return {
            "label": self.label,
            "map": {"coeffs": [[c.real, c.imag] for c in self.map.coeffs],
                    "offset": [self.map.offset.real, self.map.offset.imag]},
            "factor": self.factor.describe(),
            "pole": [self.pole.real, self.pole.imag],
            "pole_preimage": [self.pole_preimage.real, self.pole_preimage.imag],
            "p_grid": list(self.p_grid),
            "t_max": self.t_max,
            "quad_tol": self.quad_tol,
            "tol": self.tol,
        }


def sublevel_area(s: Scenario, t) -> float:
    """Weighted area of the Green super-level set {g > t}."""
    return s.profile.sublevel_area(t)


def ring_derivative(s: Scenario, t) -> float:
    """Ring density X0(t) = -dX/dt, evaluated analytically on the pullback."""
    return s.profile.ring_density(t)


def _moment_tol(s: Scenario, p: float) -> float:
    """Absolute tolerance for Y_p scaled from quad_tol by Gamma(p+1)/c^p."""
    x0 = s.profile.sublevel_area(0.0)
    ln_scale = math.lgamma(p + 1.0) - p * math.log(s.c)
    scale = math.exp(min(ln_scale, 690.0)) * max(x0, 1e-6)
    return max(s.quad_tol * scale, 1e-300)


def green_moment(s: Scenario, p: float) -> PowerMoment:
    """Y_p(0) = -int t^p dX(t), the L^p Green integral of the scenario."""
    s.require_admissible()
    return stieltjes.moment(s.monotone_profile, p, _moment_tol(s, p))


def green_functional(s: Scenario, p: float) -> FunctionalPoint:
    """Gamma-normalised functional F(p) = (4 pi kappa)^p Y_p(0) / Gamma(p+1).

    Nonincreasing on p >= 0, with equality across exponents exactly for a
    flat disk with centered pole; computed in log space for large p.
    """
    s.require_admissible()
    if p < 0.0:
        value, error = stieltjes._normalized(s.monotone_profile, p, s.quad_tol)
    else:
        value, error = stieltjes._normalized(s.monotone_profile, p,
                                             s.quad_tol * max(1.0, s.curvature.area_sigma))
    return FunctionalPoint(p, value, error)


def functional_curve(s: Scenario, p_grid: Optional[Sequence[float]] = None) -> list:
    grid = s.p_grid if p_grid is None else tuple(float(p) for p in p_grid)
    return [green_functional(s, p) for p in grid]


def boundary_functional(s: Scenario) -> float:
    """int over the boundary of e^(2u) / (dg/dn) dL, via the pullback
    identity with the ring density at level zero."""
    return s.profile.ring_density(0.0)


def boundary_functional_direct(s: Scenario, tol: float = 1e-12) -> float:
    """Same boundary integral by direct quadrature in the map's own boundary
    parametrisation; cross-checks the pullback identity.

    With z = f(w) on |w| = 1 the integrand e^(2u) / (dg/dn) dL reduces to
    2 pi e^(2u) |f'(w)|^2 / |phi_b'(w)| dtheta.
    """
    from .quadrature import periodic_integral
    b = s.pole_preimage
    f = s.map
    factor = s.factor

    def build(n: int) -> np.ndarray:
        ring = np.exp(1j * np.arange(n) * (TWO_PI / n))
        z = f.eval(ring)
        return TWO_PI * factor.e2u(z, ring) * np.abs(f.deriv(ring)) ** 2 / \
            np.abs(mobius_deriv(b, ring))

    vals, _, _ = periodic_integral(build, tol=tol)
    return float(vals)


def limit_p_infinity(s: Scenario, p_probe: float = 40.0,
                     t_probe: Optional[float] = None) -> LimitProbes:
    """Probe the p -> infinity limit of F against the weighted tail area.

    Returns F(p_probe) and e^(c t) X(t) at t = t_probe alongside the target
    value pi (e^(u(a)) R(a))^2 for kappa = 1 (0 for kappa < 1).
    """
    s.require_admissible()
    if p_probe < 20.0:
        raise ValueError("p_probe must be at least 20")
    t = s.t_max if t_probe is None else float(t_probe)
    if t < 2.0 / s.c:
        raise ValueError(f"t_probe must be at least 2/(4 pi kappa) = {2.0 / s.c:.4g}")
    fp = green_functional(s, p_probe)
    xt = s.profile.sublevel_area(t)
    weighted = math.exp(s.c * t + math.log(xt)) if xt > 0 else 0.0
    tl = stieltjes.tail_limit(s.monotone_profile)
    if s.kappa >= 1.0 - 1e-12:
        expected = math.pi * (s.pole_weight() * s.radius.radius) ** 2
    else:
        expected = 0.0
    return LimitProbes(p_probe, t, fp.value, fp.error, weighted,
                       tl.error_estimate, expected, s.kappa)


def radius_transfer(s: Scenario) -> tuple[float, float]:
    """For a logderiv factor on the identity map: e^(u(a)) R(a) against the
    conformal radius of the image domain at the image of the pole."""
    if not isinstance(s.factor, LogDeriv):
        raise ValueError("radius transfer needs a logderiv factor")
    if s.map.degree != 1 or s.map.coeffs[0] != 1.0 or s.map.offset != 0.0:
        raise ValueError("radius transfer is implemented for the identity map")
    g = s.factor.g
    lhs = s.pole_weight() * s.radius.radius
    ga = complex(g.eval(np.array([s.pole_preimage]))[0])
    rhs = conformal_radius(g, ga).radius
    return lhs, rhs


_DIRECT_EDGES = (0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.6, 1.0)


def _direct_quadrature(s: Scenario, p: float, excise: float, n_alpha: int,
                       n_gauss: int) -> float:
    b = s.pole_preimage
    f = s.map
    factor = s.factor
    delta = excise / abs(complex(f.deriv(np.array([b]))[0]))
    alpha = np.arange(n_alpha) * (TWO_PI / n_alpha)
    e_alpha = np.exp(1j * alpha)
    bb = np.real(np.conjugate(b) * e_alpha)
    s_max = -bb + np.sqrt(bb * bb + 1.0 - abs(b) ** 2)
    span = s_max - delta
    total = 0.0
    nodes, weights = gauss_nodes(n_gauss)
    for lo, hi in zip(_DIRECT_EDGES[:-1], _DIRECT_EDGES[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        sigma = mid + half * nodes                      # (n_gauss,)
        sv = delta + span[:, None] * sigma[None, :]     # (n_alpha, n_gauss)
        v = b + sv * e_alpha[:, None]
        g = -np.log(np.abs(mobius(b, v))) / TWO_PI
        wgt = factor.e2u(f.eval(v), v) * np.abs(f.deriv(v)) ** 2
        vals = np.where(g > 0, g, 0.0) ** p * wgt * sv
        inner = half * (vals @ weights) * span          # (n_alpha,)
        total += float(inner.mean()) * TWO_PI
    return total


def green_moment_direct(s: Scenario, p: float, excise_radius: float = 1e-6) -> float:
    """Y_p by direct 2D quadrature in the map's own parameter coordinates,
    excising a small disk around the pole.

    Independent of the level-set route: the integrand g^p e^(2u) |f'|^2 is
    assembled pointwise from the Green function and integrated on a polar
    grid centered at the pole preimage. Serves as the singular-quadrature
    cross-check for the 1D path (agreement expected to ~1e-6 relative).
    """
    if p < 1.0:
        raise ValueError("direct route implemented for p >= 1")
    coarse = _direct_quadrature(s, p, excise_radius, 384, 32)
    fine = _direct_quadrature(s, p, excise_radius, 768, 64)
    if abs(fine - coarse) > 1e-4 * max(abs(fine), 1e-300):
        raise QuadratureError(
            f"direct 2D quadrature unstable: {coarse!r} vs {fine!r}")
    return fine
