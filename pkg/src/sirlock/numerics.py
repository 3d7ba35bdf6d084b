"""Scalar minimization and root finding used by the analytic modules.

Both routines are deliberately simple and deterministic: a coarse scan
followed by golden-section refinement for minima, and a bisection-safeguarded
Newton (secant when no derivative is given) for roots. Every fixed point in
the model is strictly monotone inside its bracket, so nothing fancier is
warranted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import BracketError

# 1/phi and 1/phi^2, the golden-section step ratios
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class Bracket:
    """Closed scalar interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


def minimize_scalar(
    f: Callable[[float], float],
    b: Bracket,
    tol: float = 1e-6,
    n_scan: int = 64,
) -> tuple[float, float]:
    """Minimize f on [b.lo, b.hi]: n_scan-point scan, then golden section.

    The scan localizes the basin; golden section shrinks the bracket around
    the best scan point until its width is below tol. Returns (x_min, f_min),
    the best point ever evaluated, so boundary minima are returned exactly.
    """
    xs = [b.lo + (b.hi - b.lo) * k / (n_scan - 1) for k in range(n_scan)]
    fs = [f(x) for x in xs]
    k_best = min(range(n_scan), key=lambda k: fs[k])

    x_best, f_best = xs[k_best], fs[k_best]
    lo = xs[max(k_best - 1, 0)]
    hi = xs[min(k_best + 1, n_scan - 1)]
    if hi - lo <= tol:
        return x_best, f_best

    # golden section on [lo, hi]
    a, c = lo, hi
    x1 = a + _INVPHI2 * (c - a)
    x2 = a + _INVPHI * (c - a)
    f1, f2 = f(x1), f(x2)
    while c - a > tol:
        if f1 <= f2:
            c, x2, f2 = x2, x1, f1
            x1 = a + _INVPHI2 * (c - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (c - a)
            f2 = f(x2)
    for x, fx in ((x1, f1), (x2, f2)):
        if fx < f_best:
            x_best, f_best = x, fx
    return x_best, f_best


def solve_scalar_root(
    f: Callable[[float], float],
    b: Bracket,
    tol: float = 1e-12,
    df: Optional[Callable[[float], float]] = None,
    max_iter: int = 200,
) -> float:
    """Find x in [b.lo, b.hi] with |f(x)| <= tol, given f(lo)*f(hi) <= 0.

    Newton steps (secant if df is None) are taken while they stay inside the
    current sign-change bracket; otherwise the step falls back to bisection.
    The bracket shrinks monotonically, so the loop cannot stall.
    """
    lo, hi = b.lo, b.hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(
            f"no sign change on [{lo:.6g}, {hi:.6g}]: f(lo)={flo:.3g}, f(hi)={fhi:.3g}"
        )

    x, fx = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    x_prev, f_prev = (hi, fhi) if x == lo else (lo, flo)
    for _ in range(max_iter):
        if abs(fx) <= tol:
            return x
        if df is not None:
            slope = df(x)
        else:
            slope = (fx - f_prev) / (x - x_prev) if x != x_prev else 0.0
        if slope != 0.0 and math.isfinite(slope):
            x_new = x - fx / slope
        else:
            x_new = math.nan
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)  # safeguard: bisect
        f_new = f(x_new)
        x_prev, f_prev = x, fx
        x, fx = x_new, f_new
        if flo * fx <= 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
        if hi - lo <= 1e-17 * max(1.0, abs(lo)):
            break
    if abs(fx) <= tol:
        return x
    # return the bracket midpoint if the residual tolerance was not met
    # (can only happen for pathological f; all call sites are smooth)
    raise BracketError(f"root residual {abs(fx):.3g} above tol {tol:.3g}")
