"""Monotone-profile moment engine.

A profile is a nonnegative nonincreasing function X on [0, inf) together
with a decay budget c > 0 such that e^(c t) X(t) is also nonincreasing.
For such profiles the gamma-normalised power moments

    N(p) = c^p Y_p(0) / Gamma(p+1),   Y_p(0) = -int t^p dX(t)

are nonincreasing on p >= 0, constant exactly when X(t) = X(0) e^(-c t),
and converge to lim e^(c t) X(t) as p -> infinity. This module validates
profiles against the two monotonicity conditions, computes the moments
with analytic tail control beyond the sampled range, scans N over a grid
of exponents, and evaluates the negative-exponent bounds (monotonicity
itself is only conjectural for -1 < p < 0 and is flagged as such).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .quadrature import adaptive_gauss, log_upper_gamma, upper_gamma
from .results import CheckResult, make_check

GAMMA_MAX_ARG = 170.0


class InvalidProfileError(ValueError):
    """Profile failed the monotonicity validation."""


def gamma_real(x: float) -> float:
    """Gamma function on (0, 170]; raises on the overflow regime."""
    if not x > 0.0:
        raise ValueError(f"gamma_real requires x > 0, got {x}")
    if x > GAMMA_MAX_ARG:
        raise ValueError(f"gamma_real overflows for x > {GAMMA_MAX_ARG}, got {x}")
    return math.gamma(x)


def _vector_eval(f: Callable, t: np.ndarray) -> np.ndarray:
    """Evaluate f on an ndarray, falling back to a python loop."""
    t = np.asarray(t, dtype=float)
    try:
        out = np.asarray(f(t), dtype=float)
        if out.shape == t.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(ti))) for ti in np.atleast_1d(t)], dtype=float)


@dataclass(frozen=True, eq=False)
class MonotoneProfile:
    """Evaluable decreasing profile with decay budget and validation grid.

    x: vectorized evaluation of X(t), t >= 0
    c: decay budget (> 0); e^(c t) X(t) must be nonincreasing
    t_grid: strictly increasing sample points; max(t_grid) is the tail
        cutoff T beyond which X is bounded by X(T) e^(-c (t - T))
    x0: optional analytic -dX/dt; used for exponents in (-1, 0)
    """

    x: Callable
    c: float
    t_grid: np.ndarray
    x0: Optional[Callable] = None

    def __post_init__(self):
        grid = np.asarray(self.t_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 64:
            raise ValueError("t_grid must be a 1-d array with at least 64 points")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("t_grid must be strictly increasing")
        if grid[0] < 0:
            raise ValueError("t_grid must start at t >= 0")
        if not self.c > 0:
            raise ValueError("decay budget c must be positive")
        object.__setattr__(self, "t_grid", grid)

    @property
    def tail_cutoff(self) -> float:
        return float(self.t_grid[-1])

    def eval(self, t) -> np.ndarray:
        return _vector_eval(self.x, np.asarray(t, dtype=float))

    def eval_x0(self, t) -> np.ndarray:
        """Ring density -dX/dt, analytic if supplied, else centered differences."""
        t = np.asarray(t, dtype=float)
        if self.x0 is not None:
            return _vector_eval(self.x0, t)
        h = np.maximum(1e-6, 1e-6 * np.abs(t))
        lo = np.maximum(t - h, 0.0)
        hi = t + h
        return (self.eval(lo) - self.eval(hi)) / (hi - lo)


@dataclass(frozen=True)
class ProfileViolation:
    kind: str          # "negative" | "decreasing" | "budget"
    t_lo: float
    t_hi: float
    amount: float


@dataclass(frozen=True)
class PowerMoment:
    p: float
    value: float
    converged: bool
    tail_bound: float


@dataclass(frozen=True)
class ScanPoint:
    p: float
    value: float
    error: float


@dataclass(frozen=True)
class ScanPair:
    p_lo: float
    p_hi: float
    n_lo: float
    n_hi: float
    ok: bool
    conjectural: bool


@dataclass(frozen=True)
class ScanResult:
    points: tuple
    pairs: tuple
    passed: bool


@dataclass(frozen=True)
class TailLimit:
    """e^(c T) X(T) at the cutoff: an upper bound for the t -> infinity limit.

    `decrement` is the drop of e^(c t) X(t) over the last grid interval;
    `error_estimate` widens that by the drop over the trailing half of the
    grid, since the sequence is nonincreasing but its future decrease is
    only hinted at by the recent trend.
    """

    value: float
    decrement: float
    error_estimate: float


def profile_validate(profile: MonotoneProfile) -> list[ProfileViolation]:
    """Check X >= 0 and both monotonicity conditions on the grid.

    Returns an empty list iff the profile passes with slack 1e-12 * X(0).
    """
    grid = profile.t_grid
    xv = profile.eval(grid)
    x_at_0 = float(profile.eval(np.array([0.0]))[0])
    slack = 1e-12 * max(abs(x_at_0), 1e-300)
    out: list[ProfileViolation] = []
    neg = np.nonzero(xv < -slack)[0]
    for i in neg:
        out.append(ProfileViolation("negative", float(grid[i]), float(grid[i]), float(-xv[i])))
    dx = np.diff(xv)
    bad = np.nonzero(dx > slack)[0]
    for i in bad:
        out.append(ProfileViolation("decreasing", float(grid[i]), float(grid[i + 1]), float(dx[i])))
    # weighted condition compared pairwise to keep the slack meaningful at
    # large c*t: e^(c t1) X(t1) <= e^(c t0) X(t0)  <=>  X(t1) e^(c (t1-t0)) <= X(t0)
    growth = np.exp(profile.c * np.diff(grid))
    dxw = xv[1:] * growth - xv[:-1]
    badw = np.nonzero(dxw > slack)[0]
    for i in badw:
        out.append(ProfileViolation("budget", float(grid[i]), float(grid[i + 1]), float(dxw[i])))
    return out


def _require_valid(profile: MonotoneProfile) -> None:
    violations = profile_validate(profile)
    if violations:
        v = violations[0]
        raise InvalidProfileError(
            f"profile violates '{v.kind}' on [{v.t_lo:.6g}, {v.t_hi:.6g}] "
            f"by {v.amount:.3e} ({len(violations)} violations total)")


def _tail_state(profile: MonotoneProfile):
    """(T, X(T), ln U, U, drop) where U = e^(c T) X(T) and drop is the
    decrease of e^(c t) X(t) over the trailing half of the grid."""
    T = profile.tail_cutoff
    c = profile.c
    xT = float(profile.eval(np.array([T]))[0])
    if xT <= 0.0:
        return T, 0.0, -math.inf, 0.0, 0.0
    ln_u = c * T + math.log(xT)
    u = math.exp(ln_u)
    t2 = max(T / 2.0, T - 5.0 / c)
    x2 = float(profile.eval(np.array([t2]))[0])
    u2 = math.exp(c * t2 + math.log(x2)) if x2 > 0 else 0.0
    drop = max(0.0, u2 - u)
    return T, xT, ln_u, u, drop


def moment(profile: MonotoneProfile, p: float, tol: float) -> PowerMoment:
    """Riemann-Stieltjes power moment Y_p(0) = -int_0^inf t^p dX(t).

    For p > 0 this is p * int t^(p-1) X dt on [0, T] (with the endpoint
    singularity for p < 1 removed by the substitution t = s^(1/p)) plus
    the analytic tail obtained by extending X with its decay envelope
    X(T) e^(-c (t-T)). For p = 0 the moment is X(0). For -1 < p < 0 it is
    int t^p X0 dt with the ring density X0 = -dX/dt.

    tail_bound is the estimated total numerical error (quadrature estimate
    plus envelope uncertainty); converged means tail_bound <= tol.
    """
    if not p > -1.0:
        raise ValueError(f"moment requires p > -1, got {p}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    _require_valid(profile)
    if p == 0.0:
        return PowerMoment(0.0, float(profile.eval(np.array([0.0]))[0]), True, 0.0)

    T, xT, ln_u, u, drop = _tail_state(profile)
    c = profile.c
    x = profile.eval

    if p > 0.0:
        if xT > 0.0:
            ln_tail = ln_u + math.log(p) + log_upper_gamma(p, c * T) - p * math.log(c)
            tail_value = 0.0 if ln_tail == -math.inf else math.exp(ln_tail)
        else:
            tail_value = 0.0
        tail_unc = 0.0 if u <= 0.0 else tail_value * min(1.0, 3.0 * drop / u)
        atol = max(0.25 * tol, 1e-6 * tail_value)
        if p < 1.0:
            q = adaptive_gauss(lambda s: x(s ** (1.0 / p)), 0.0, T ** p,
                               atol=atol, rtol=1e-12)
        else:
            q = adaptive_gauss(lambda t: p * t ** (p - 1.0) * x(t), 0.0, T,
                               atol=atol, rtol=1e-12)
        value = q.value + tail_value
        err = q.error + tail_unc
        return PowerMoment(p, value, err <= tol, err)

    # -1 < p < 0: integrate the ring density against t^p
    x0 = profile.eval_x0
    a = 1.0 / (1.0 + p)
    t1 = min(1.0, T)
    q1 = adaptive_gauss(lambda s: x0(s ** a), 0.0, t1 ** (1.0 + p),
                        atol=0.25 * tol, rtol=1e-12)
    near = a * q1.value
    far_err = 0.0
    far = 0.0
    if T > t1:
        q2 = adaptive_gauss(lambda t: t ** p * x0(t), t1, T,
                            atol=0.25 * tol, rtol=1e-12)
        far, far_err = q2.value, q2.error
    # tail beyond T by parts: int_T^inf t^p X0 dt = T^p X(T) + p int_T^inf t^(p-1) X dt,
    # with X replaced by its envelope in the (negative) second term
    if xT > 0.0:
        env = upper_gamma(p, c * T) * math.exp(ln_u - p * math.log(c))
        tail_value = T ** p * xT + p * env
        tail_unc = abs(p) * env * min(1.0, 3.0 * drop / u)
    else:
        tail_value, tail_unc = 0.0, 0.0
    value = near + far + tail_value
    err = a * q1.error + far_err + tail_unc
    return PowerMoment(p, value, err <= tol, err)


def _normalized(profile: MonotoneProfile, p: float, tol: float) -> tuple[float, float]:
    """N(p) = c^p Y_p(0) / Gamma(p+1) with its error estimate."""
    if p + 1.0 > GAMMA_MAX_ARG:
        raise ValueError(f"p = {p} exceeds the gamma overflow cap")
    c = profile.c
    ln_scale = p * math.log(c) - math.lgamma(p + 1.0)
    # moment tolerance expressed in un-normalised units
    tol_y = tol * math.exp(-ln_scale) if abs(ln_scale) < 690 else tol
    m = moment(profile, p, max(tol_y, 1e-300))
    if m.value > 0.0 and abs(ln_scale) > 30.0:
        value = math.exp(math.log(m.value) + ln_scale)
    else:
        value = m.value * math.exp(ln_scale)
    error = m.tail_bound * math.exp(ln_scale)
    return value, error


def normalized_moment(profile: MonotoneProfile, p: float, tol: float = 1e-10) -> float:
    """Gamma-normalised moment N(p) = c^p Y_p(0) / Gamma(p+1)."""
    return _normalized(profile, p, tol)[0]


def monotone_scan(profile: MonotoneProfile, p_grid: Sequence[float],
                  tol: float = 1e-9) -> ScanResult:
    """Evaluate N over an increasing exponent grid and check monotonicity.

    Consecutive pairs with p_lo >= 0 must satisfy N(p_hi) <= N(p_lo) + tol;
    pairs starting below 0 are reported but flagged conjectural and never
    fail the scan.
    """
    ps = [float(p) for p in p_grid]
    if len(ps) < 2:
        raise ValueError("p_grid needs at least 2 points")
    if any(b <= a for a, b in zip(ps, ps[1:])):
        raise ValueError("p_grid must be strictly increasing")
    pts = []
    for p in ps:
        v, e = _normalized(profile, p, tol)
        pts.append(ScanPoint(p, v, e))
    pairs = []
    passed = True
    for lo, hi in zip(pts, pts[1:]):
        conj = lo.p < 0.0
        ok = hi.value <= lo.value + max(tol, 10.0 * (lo.error + hi.error))
        if conj:
            pairs.append(ScanPair(lo.p, hi.p, lo.value, hi.value, ok, True))
        else:
            pairs.append(ScanPair(lo.p, hi.p, lo.value, hi.value, ok, False))
            passed = passed and ok
    return ScanResult(tuple(pts), tuple(pairs), passed)


def equality_test(profile: MonotoneProfile, tol: float = 1e-8) -> bool:
    """True iff X matches the pure-decay profile X(0) e^(-c t) on the grid.

    A profile with X(0) = 0 is identically zero under the hypotheses and
    counts as equal by convention.
    """
    _require_valid(profile)
    x0 = float(profile.eval(np.array([0.0]))[0])
    if x0 == 0.0:
        return True
    xv = profile.eval(profile.t_grid)
    model = x0 * np.exp(-profile.c * profile.t_grid)
    return float(np.max(np.abs(xv - model))) / x0 <= tol


def tail_limit(profile: MonotoneProfile) -> TailLimit:
    """Monotone upper estimate of lim e^(c t) X(t) from the grid tail."""
    _require_valid(profile)
    grid = profile.t_grid
    c = profile.c

    def weighted(t: float) -> float:
        xv = float(profile.eval(np.array([t]))[0])
        return math.exp(c * t + math.log(xv)) if xv > 0 else 0.0

    value = weighted(float(grid[-1]))
    prev = weighted(float(grid[-2]))
    decrement = max(0.0, prev - value)
    half = weighted(float(grid[np.searchsorted(grid, grid[-1] / 2.0)]))
    return TailLimit(value, decrement, max(decrement, half - value, 0.0))


def negative_p_bounds(profile: MonotoneProfile, p: float, tol: float = 1e-9,
                      p2: float | None = None) -> tuple[CheckResult, CheckResult | None]:
    """Bounds tying Y_0 and negative-exponent moments together.

    First check: Y_0(0) <= (pi p / sin(pi p)) * (c^p / Gamma(1+p)) * Y_p(0)
    for -1 < p < 0. Second (when a larger negative exponent p2 is given):
    the min-form bound on Y_{p2} in terms of Y_p. Both are proven
    consequences of the p >= 0 monotonicity, so they gate.
    """
    if not (-1.0 < p < 0.0):
        raise ValueError(f"p must lie in (-1, 0), got {p}")
    _require_valid(profile)
    c = profile.c
    y0 = float(profile.eval(np.array([0.0]))[0])
    mp_ = moment(profile, p, tol)
    factor = (math.pi * p / math.sin(math.pi * p)) * c ** p / gamma_real(1.0 + p)
    first = make_check(
        f"negative-p-lower-bound[p={p:g}]", lhs=y0, rhs=factor * mp_.value,
        tol=tol, error_estimate=abs(factor) * mp_.tail_bound)
    second = None
    if p2 is not None:
        if not (p < p2 < 0.0):
            raise ValueError(f"p2 must lie in ({p}, 0), got {p2}")
        m2 = moment(profile, p2, tol)

        def base(q: float) -> float:
            return math.pi * q * c ** q / (math.sin(math.pi * q) * gamma_real(1.0 + q))

        bound = min(base(p) ** (1.0 - p2 / p), base(p2) ** (p2 / p - 1.0))
        second = make_check(
            f"negative-p-min-form[p1={p:g},p2={p2:g}]",
            lhs=m2.value, rhs=bound * mp_.value, tol=tol,
            error_estimate=m2.tail_bound + bound * mp_.tail_bound)
    return first, second
