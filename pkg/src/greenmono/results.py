"""Shared result record for named inequality checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    """A single inequality check: lhs <= rhs with margin rhs - lhs.

    `passed` is margin >= -tol where tol already folds in the numerical
    error allowance. `conjectural` checks are reported but never fail a
    suite. `equality` marks margins that vanish to within the equality
    detection tolerance.
    """

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tol: float
    error_estimate: float = 0.0
    conjectural: bool = False
    equality: bool = False
    detail: str = ""

    @property
    def gating(self) -> bool:
        return not self.conjectural


def make_check(name: str, lhs: float, rhs: float, tol: float,
               error_estimate: float = 0.0, conjectural: bool = False,
               equality_tol: float | None = None, detail: str = "") -> CheckResult:
    """Build a CheckResult, widening tol by the error estimate.

    The effective tolerance is max(tol, 10 * error_estimate) so that a
    check can only fail by more than its own numerical noise.
    """
    margin = rhs - lhs
    eff_tol = max(tol, 10.0 * error_estimate)
    equality = False
    if equality_tol is not None:
        scale = max(abs(lhs), abs(rhs))
        equality = abs(margin) <= equality_tol * max(scale, 1e-300)
    return CheckResult(name=name, lhs=lhs, rhs=rhs, margin=margin,
                       passed=margin >= -eff_tol, tol=eff_tol,
                       error_estimate=error_estimate,
                       conjectural=conjectural, equality=equality,
                       detail=detail)
