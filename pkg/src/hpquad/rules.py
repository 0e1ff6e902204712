"""Gauss-Legendre quadrature rules and Legendre-polynomial value tables."""

import math
from dataclasses import dataclass

import numpy as np

P_MIN = 2

_NEWTON_TOL = 1e-15
_NEWTON_MAX_ITER = 100


def legendre_eval(degree, x):
    """Evaluate the Legendre polynomial of the given degree at ``x``.

    Three-term recurrence, normalised so the value at 1 is 1.  Accepts a
    scalar or an ndarray; returns a float for scalar input.  On [-1, 1] the
    result is bounded by 1 in magnitude.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("x must be finite")
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    prev = np.ones_like(xa)
    if degree == 0:
        return float(prev[0]) if scalar else prev
    cur = xa.copy()
    for k in range(1, degree):
        prev, cur = cur, ((2 * k + 1) * xa * cur - k * prev) / (k + 1)
    return float(cur[0]) if scalar else cur


def _legendre_pair(degree, x):
    # Returns (L_degree, L_{degree-1}) at x; degree >= 1.
    prev = np.ones_like(x)
    cur = x.copy()
    for k in range(1, degree):
        prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
    return cur, prev


def gauss_legendre_rule(p):
    """Nodes and weights of the p-point Gauss-Legendre rule on [-1, 1].

    Parameters
    ----------
    p : int
        Number of points, at least 2.  The rule integrates polynomials up
        to degree 2p - 1 exactly.

    Returns
    -------
    nodes, weights : ndarray
        Nodes in ascending order (exactly antisymmetric about 0) and the
        matching positive weights, which sum to 2.

    Notes
    -----
    Nodes are the roots of the degree-p Legendre polynomial, found by
    Newton iteration seeded at Chebyshev-point estimates; the derivative
    comes from the recurrence relation.  Converges to 1e-15 in well under
    ten iterations for every order used here.
    """
    if p < P_MIN:
        raise ValueError(f"rule needs at least {P_MIN} points, got {p}")
    k = np.arange(1, p + 1)
    x = np.cos(math.pi * (4 * k - 1) / (4 * p + 2))
    for _ in range(_NEWTON_MAX_ITER):
        lp, lpm1 = _legendre_pair(p, x)
        dlp = p * (x * lp - lpm1) / (x * x - 1.0)
        dx = lp / dlp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    lp, lpm1 = _legendre_pair(p, x)
    dlp = p * (x * lp - lpm1) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dlp * dlp)
    # Seeds run from +1 toward -1; flip ascending, then force the exact
    # symmetries the rule has analytically.
    x = x[::-1].copy()
    w = w[::-1].copy()
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


@dataclass(frozen=True)
class RuleTables:
    """Dense per-order tables for rules of 2 .. p_max points.

    Column p - 2 of each array belongs to the p-point rule; rows beyond the
    first p are zero padding.  X holds nodes, W weights, L1 and L2 the
    values of the Legendre polynomials of degree p - 1 and p - 2 at the
    nodes.  Arrays are read-only.
    """

    p_min: int
    p_max: int
    X: np.ndarray
    W: np.ndarray
    L1: np.ndarray
    L2: np.ndarray

    def _col(self, p):
        if not self.p_min <= p <= self.p_max:
            raise ValueError(f"order {p} outside [{self.p_min}, {self.p_max}]")
        return p - 2

    def nodes(self, p):
        """Ascending nodes of the p-point rule."""
        return self.X[:p, self._col(p)]

    def weights(self, p):
        """Weights of the p-point rule."""
        return self.W[:p, self._col(p)]

    def leading_legendre(self, p):
        """Values of the degree-(p-1) Legendre polynomial at the nodes."""
        return self.L1[:p, self._col(p)]

    def subleading_legendre(self, p):
        """Values of the degree-(p-2) Legendre polynomial at the nodes."""
        return self.L2[:p, self._col(p)]


def build_tables(p_max=15):
    """Precompute rule tables for all orders 2 .. p_max.

    The tables are immutable and meant to be built once and shared; node
    generation is cheap but the hot loop should never recompute rules.
    """
    if p_max < P_MIN:
        raise ValueError(f"p_max must be >= {P_MIN}, got {p_max}")
    shape = (p_max, p_max - 1)
    X = np.zeros(shape)
    W = np.zeros(shape)
    L1 = np.zeros(shape)
    L2 = np.zeros(shape)
    for p in range(P_MIN, p_max + 1):
        x, w = gauss_legendre_rule(p)
        c = p - 2
        X[:p, c] = x
        W[:p, c] = w
        L1[:p, c] = legendre_eval(p - 1, x)
        L2[:p, c] = legendre_eval(p - 2, x)
    for arr in (X, W, L1, L2):
        arr.setflags(write=False)
    return RuleTables(P_MIN, p_max, X, W, L1, L2)


_CACHE: dict[int, RuleTables] = {}


def get_tables(p_max=15):
    """Memoised ``build_tables``; safe to share, the arrays are frozen."""
    if p_max not in _CACHE:
        _CACHE[p_max] = build_tables(p_max)
    return _CACHE[p_max]
