"""Deterministic 1D quadrature primitives.

Panels use fixed Gauss-Legendre node pairs; adaptivity is worst-panel
bisection with leftmost tie-break and left-to-right summation, so a given
input always produces bit-identical output (no randomness, no reordering).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaincc

_NODE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}

# Low/high order pair per panel; the difference drives the error estimate.
_N_LO = 20
_N_HI = 41


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be resolved within budget."""


def gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    try:
        return _NODE_CACHE[n]
    except KeyError:
        pair = leggauss(n)
        _NODE_CACHE[n] = pair
        return pair


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    converged: bool
    n_panels: int

    def __float__(self) -> float:
        return self.value


def _panel_estimates(f, a: float, b: float) -> tuple[float, float]:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x_lo, w_lo = gauss_nodes(_N_LO)
    x_hi, w_hi = gauss_nodes(_N_HI)
    i_lo = half * float(np.dot(w_lo, np.asarray(f(mid + half * x_lo), dtype=float)))
    i_hi = half * float(np.dot(w_hi, np.asarray(f(mid + half * x_hi), dtype=float)))
    return i_hi, abs(i_hi - i_lo)


def adaptive_gauss(f, a: float, b: float, atol: float = 0.0, rtol: float = 1e-12,
                   max_panels: int = 512, strict: bool = False) -> QuadResult:
    """Integrate a vectorized callable over [a, b].

    `f` must accept a float ndarray and return values of the same shape.
    Refinement bisects the panel with the largest error estimate until the
    summed estimate meets max(atol, rtol*|integral|) or the panel budget is
    exhausted (then converged=False; QuadratureError if strict).
    """
    if not b > a:
        if b == a:
            return QuadResult(0.0, 0.0, True, 0)
        raise ValueError(f"bad interval [{a}, {b}]")
    val, err = _panel_estimates(f, a, b)
    panels = [(a, b, val, err)]  # kept sorted by left endpoint
    while True:
        total = math.fsum(p[2] for p in panels)
        tot_err = math.fsum(p[3] for p in panels)
        if tot_err <= max(atol, rtol * abs(total)):
            return QuadResult(total, tot_err, True, len(panels))
        if len(panels) >= max_panels:
            if strict:
                raise QuadratureError(
                    f"quadrature stalled at {len(panels)} panels, error {tot_err:.3e}")
            return QuadResult(total, tot_err, False, len(panels))
        worst = 0
        for i in range(1, len(panels)):
            if panels[i][3] > panels[worst][3]:
                worst = i
        pa, pb, _, _ = panels.pop(worst)
        pm = 0.5 * (pa + pb)
        v1, e1 = _panel_estimates(f, pa, pm)
        v2, e2 = _panel_estimates(f, pm, pb)
        panels.insert(worst, (pm, pb, v2, e2))
        panels.insert(worst, (pa, pm, v1, e1))


def periodic_integral(build, tol: float = 1e-12, n0: int = 64, n_max: int = 16384):
    """Integrate smooth 2*pi-periodic data by trapezoid doubling.

    `build(n)` must return samples at theta_k = 2*pi*k/n along the last axis
    (any leading batch shape). Doubles n until the sup-norm change is within
    tol relative to the data scale. Returns (values, error, n_used).
    """
    prev = np.asarray(build(n0)).mean(axis=-1) * (2.0 * math.pi)
    n = 2 * n0
    while n <= n_max:
        cur = np.asarray(build(n)).mean(axis=-1) * (2.0 * math.pi)
        scale = max(1.0, float(np.max(np.abs(cur))))
        err = float(np.max(np.abs(cur - prev)))
        if err <= tol * scale:
            return cur, err, n
        prev = cur
        n *= 2
    raise QuadratureError(f"periodic integral not resolved at n={n_max}")


def log_upper_gamma(a: float, x: float) -> float:
    """log of the upper incomplete gamma integral from x to infinity of
    t^(a-1) e^(-t) dt, for a in (-1, 0) or (0, 171), x > 0. Returns -inf
    when the value underflows."""
    if x <= 0.0:
        raise ValueError("x must be positive")
    if 0.0 < a < 171.0:
        q = float(gammaincc(a, x))
        if q <= 0.0:
            return -math.inf
        return math.lgamma(a) + math.log(q)
    if -1.0 < a < 0.0:
        # one-step recurrence from the (a+1) integral; both terms are modest
        g1 = math.exp(log_upper_gamma(a + 1.0, x))
        val = (g1 - x ** a * math.exp(-x)) / a
        if val <= 0.0:
            return -math.inf
        return math.log(val)
    raise ValueError(f"exponent {a} outside supported range (-1, 171)")


def upper_gamma(a: float, x: float) -> float:
    """Upper incomplete gamma integral; see log_upper_gamma for the range."""
    lg = log_upper_gamma(a, x)
    return 0.0 if lg == -math.inf else math.exp(lg)
