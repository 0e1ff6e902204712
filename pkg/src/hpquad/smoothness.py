"""Legendre-coefficient smoothness scoring for quadrature segments."""

import math
from dataclasses import dataclass

import numpy as np

from .rules import P_MIN

# Lower end of the indicator's range: the limit of the closed form as the
# coefficient ratio grows without bound, written exactly as 1/(1/sqrt(3)+sqrt(2)).
INDICATOR_FLOOR = 1.0 / (1.0 / math.sqrt(3.0) + math.sqrt(2.0))

_CBRT_EPS = float(np.finfo(float).eps) ** (1.0 / 3.0)
_ORACLE_SAMPLES = 20001


def coefficient_ratio(fvals, p, tables):
    """Scaled ratio of the top two Legendre coefficients of the interpolant.

    Given the integrand values at the p Gauss nodes of a segment, the
    degree-(p-1) interpolant has Legendre coefficients recoverable from the
    quadrature sums S1 (against degree p-1) and S2 (against degree p-2).
    Returns (2p - 1) * |S1 / S2|, which is the coefficient ratio scaled by
    2(p - 1) - 1.  Affine rescaling of the segment and scaling of the
    integrand leave it unchanged.

    A vanishing S2 with nonvanishing S1 maps to +inf (pure top mode, the
    roughest possible signal); both vanishing map to 0 (no signal, treat as
    smooth).
    """
    fvals = np.asarray(fvals, dtype=float)
    if p < P_MIN or p > tables.p_max:
        raise ValueError(f"order {p} outside [{P_MIN}, {tables.p_max}]")
    if fvals.shape != (p,):
        raise ValueError(f"expected {p} node values, got shape {fvals.shape}")
    if not np.all(np.isfinite(fvals)):
        raise ValueError("node values must be finite")
    t = tables.weights(p) * fvals
    # Exact accumulation; these sums cancel to near the noise floor on
    # well-resolved segments and the classifier keys off their ratio.
    s1 = math.fsum(t * tables.leading_legendre(p))
    s2 = math.fsum(t * tables.subleading_legendre(p))
    if s2 == 0.0:
        return 0.0 if s1 == 0.0 else math.inf
    return (2 * p - 1) * abs(s1 / s2)


def smoothness_indicator(ratio):
    """Map a nonnegative coefficient ratio r to (1 + r)/(sqrt(1 + r^2/3) + sqrt(2) r).

    Monotonically decreasing from 1 at r = 0 to INDICATOR_FLOOR as r grows;
    the output is clamped to [INDICATOR_FLOOR, 1] so rounding can never
    leak outside the analytic range.
    """
    if math.isnan(ratio) or ratio < 0.0:
        raise ValueError(f"ratio must be nonnegative, got {ratio}")
    if math.isinf(ratio):
        return INDICATOR_FLOOR
    if ratio > 1e100:
        # Divide through by r so r*r cannot overflow.
        u = 1.0 / ratio
        val = (u + 1.0) / (math.sqrt(u * u + 1.0 / 3.0) + math.sqrt(2.0))
    else:
        val = (1.0 + ratio) / (math.sqrt(1.0 + ratio * ratio / 3.0) + math.sqrt(2.0) * ratio)
    return min(1.0, max(INDICATOR_FLOOR, val))


@dataclass(frozen=True)
class SmoothnessScore:
    """Coefficient ratio plus the indicator value derived from it."""

    ratio: float
    value: float


def score_values(fvals, p, tables):
    """Score a segment's node values; the glue used by the refinement loop."""
    ratio = coefficient_ratio(fvals, p, tables)
    return SmoothnessScore(ratio, smoothness_indicator(ratio))


def _composite_simpson(y, dx):
    # y sampled on a uniform grid with an odd number of points.
    return (dx / 3.0) * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-2:2]))


def _difference_stencil(f, xs, order, step):
    """Order-th derivative of f at the points xs by one central stencil.

    order 0 samples f directly.  The stencil uses binomial coefficients at
    offsets (order/2 - k) * step, so for odd orders the sample points sit at
    half-integer multiples of the step.  Exact (up to roundoff) whenever f
    is a polynomial of degree <= order + 1.
    """
    if order == 0:
        return np.asarray(f(xs), dtype=float)
    offsets = (order / 2.0 - np.arange(order + 1)) * step
    signs = np.array([(-1.0) ** k * math.comb(order, k) for k in range(order + 1)])
    pts = xs[None, :] + offsets[:, None]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(order + 1, xs.size)
    return (signs[:, None] * vals).sum(axis=0) / step**order


def _fd_step(order, a, b):
    # The cube-root-of-eps step is truncation-optimal for first differences
    # and still fine at order 2; beyond that roundoff amplification eps/h^n
    # forces an interval-scaled step (exact for the polynomial inputs the
    # equivalence checks use, since their truncation term vanishes).
    if order <= 2:
        return _CBRT_EPS * max(1.0, abs(a), abs(b))
    return 0.3 * (b - a) / order


def smoothness_from_norms(f, interval, derivative_order=0):
    """Direct-norm smoothness functional, for cross-checking only.

    Applies the defining ratio sup|g| / (h^{-1/2} ||g||_2 + (h/2)^{1/2} ||g'||_2)
    to g, the ``derivative_order``-th derivative of ``f`` on the interval of
    width h.  Norms come from dense uniform sampling (20001 points) with
    composite Simpson; derivatives from central finite differences, which
    for higher orders sample slightly beyond the interval.  Returns 1 when
    g vanishes identically.  Never used by the refinement loop -- it costs
    thousands of evaluations per call.

    Parameters
    ----------
    f : callable
        Vectorisable scalar function, smooth enough for the requested order.
    interval : tuple of float
        (a, b) with a < b.
    derivative_order : int
        How many times to differentiate before scoring; 0 scores f itself.
    """
    a, b = interval
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError(f"invalid interval ({a}, {b})")
    if derivative_order < 0:
        raise ValueError("derivative_order must be >= 0")
    xs = np.linspace(a, b, _ORACLE_SAMPLES)
    dx = (b - a) / (_ORACLE_SAMPLES - 1)
    g = _difference_stencil(f, xs, derivative_order, _fd_step(derivative_order, a, b))
    gp = _difference_stencil(f, xs, derivative_order + 1, _fd_step(derivative_order + 1, a, b))
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(gp))):
        raise ValueError("non-finite samples while scoring")
    if not np.any(g):
        return 1.0
    h = b - a
    sup = float(np.max(np.abs(g)))
    l2 = math.sqrt(_composite_simpson(g * g, dx))
    l2p = math.sqrt(_composite_simpson(gp * gp, dx))
    return sup / (l2 / math.sqrt(h) + math.sqrt(0.5 * h) * l2p)
