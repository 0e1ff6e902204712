"""Recursive adaptive Simpson baseline with full point reuse.

Kept deliberately classic so the hp engine has a fair, well-understood
yardstick: same tolerance semantics, same magnitude-guard acceptance.
"""

import math
from dataclasses import dataclass

from .adaptive import EPS, IntegrationError


@dataclass
class SimpsonStats:
    """Counters for one run; forced_accepts flags depth-cap terminations."""

    scalar_evals: int = 0
    max_depth: int = 0
    forced_accepts: int = 0


def simpson_adaptive(f, a, b, tol=0.3e-15, max_depth=60):
    """Adaptive Simpson quadrature of f over [a, b].

    Parameters
    ----------
    f : callable
        Scalar function of a scalar argument (ndarray-valued functions of
        scalars work too; results are coerced to float).
    a, b : float
        Bounds, a < b, finite.
    tol : float
        Target relative accuracy, interpreted through the same magnitude
        guard as the hp engine: an interval is accepted once splitting it
        moves the value by less than rounding at |estimate| * tol / eps.
    max_depth : int
        Recursion cap; intervals still unconverged there are accepted and
        counted in forced_accepts.

    Returns
    -------
    (value, SimpsonStats)

    Notes
    -----
    Endpoint and midpoint values are passed down, so each subdivision costs
    exactly two fresh evaluations: scalar_evals is 5 plus twice the number
    of subdivisions performed.  The first five points (endpoints, midpoint,
    quarter points) also furnish the initial composite estimate that sets
    the guard.
    """
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError(f"need finite bounds with a < b, got ({a}, {b})")
    if not (math.isfinite(tol) and tol > 0.0):
        raise ValueError(f"tol must be positive and finite, got {tol}")
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")

    stats = SimpsonStats()

    def ev(x):
        stats.scalar_evals += 1
        v = float(f(x))
        if not math.isfinite(v):
            raise IntegrationError(f"integrand returned {v} at x={x!r}")
        return v

    m = 0.5 * (a + b)
    lq = 0.5 * (a + m)
    rq = 0.5 * (m + b)
    fa, fm, fb = ev(a), ev(m), ev(b)
    flq, frq = ev(lq), ev(rq)

    estimate = (b - a) / 12.0 * (fa + 4.0 * flq + 2.0 * fm + 4.0 * frq + fb)
    guard = max(1.0, abs(estimate)) * tol / EPS
    if not math.isfinite(guard):
        raise ValueError(f"magnitude guard overflowed ({guard}); lower tol")

    def half(x0, f0, x1, f1, x2, f2, s, depth):
        # x1 is the midpoint of (x0, x2); s the single-panel value there.
        q0 = 0.5 * (x0 + x1)
        q1 = 0.5 * (x1 + x2)
        g0, g1 = ev(q0), ev(q1)
        s_left = (x1 - x0) / 6.0 * (f0 + 4.0 * g0 + f1)
        s_right = (x2 - x1) / 6.0 * (f1 + 4.0 * g1 + f2)
        s2 = s_left + s_right
        stats.max_depth = max(stats.max_depth, depth)
        if guard + abs(s2 - s) == guard:
            return s2
        if depth >= max_depth:
            stats.forced_accepts += 1
            return s2
        return half(x0, f0, q0, g0, x1, f1, s_left, depth + 1) + half(
            x1, f1, q1, g1, x2, f2, s_right, depth + 1
        )

    s_whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    s_left = (m - a) / 6.0 * (fa + 4.0 * flq + fm)
    s_right = (b - m) / 6.0 * (fm + 4.0 * frq + fb)
    s2 = s_left + s_right
    stats.max_depth = 1
    if guard + abs(s2 - s_whole) == guard:
        value = s2
    elif max_depth == 1:
        stats.forced_accepts += 1
        value = s2
    else:
        value = half(a, fa, lq, flq, m, fm, s_left, 2) + half(m, fm, rq, frq, b, fb, s_right, 2)
    return value, stats
