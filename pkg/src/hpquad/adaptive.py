"""The hp-adaptive integration engine: bisect rough segments, raise the
order on smooth ones, retire segments whose refinement no longer moves the
total at working precision."""

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .rules import P_MIN, get_tables
from .smoothness import INDICATOR_FLOOR, score_values

EPS = float(np.finfo(float).eps)


class IntegrationError(RuntimeError):
    """Raised when the integrand misbehaves (non-finite output)."""


@dataclass
class AdaptiveConfig:
    """Knobs for :func:`integrate`.

    tol is the target relative accuracy; tau the smoothness threshold
    separating bisection (below) from order increase (at or above), valid
    strictly between the indicator floor and 1.  magnitude_hint, when given,
    replaces the internal coarse estimate of the integral's magnitude that
    anchors the negligibility test.  h_min_factor sets the narrowest segment
    ever bisected, as a multiple of eps times the original interval width.

    max_passes bounds the refinement sweeps.  A discontinuity drives a
    chain of bisections down to the width floor at roughly one pass per
    halving (about 46 for the default floor), with the order ladder
    interleaved along the way, so the cap sits well above that.
    """

    tol: float = 0.3e-15
    tau: float = 0.6
    p_max: int = 15
    p_init: int = 5
    magnitude_hint: float | None = None
    max_passes: int = 200
    h_min_factor: float = 64.0

    def __post_init__(self):
        if not (math.isfinite(self.tol) and self.tol > 0.0):
            raise ValueError(f"tol must be positive and finite, got {self.tol}")
        if not INDICATOR_FLOOR < self.tau < 1.0:
            raise ValueError(
                f"tau must lie strictly between {INDICATOR_FLOOR:.6f} and 1, got {self.tau}"
            )
        if self.p_max < P_MIN:
            raise ValueError(f"p_max must be >= {P_MIN}, got {self.p_max}")
        if not P_MIN <= self.p_init <= self.p_max:
            raise ValueError(f"p_init must lie in [{P_MIN}, {self.p_max}], got {self.p_init}")
        if self.magnitude_hint is not None:
            if not math.isfinite(self.magnitude_hint) or self.magnitude_hint == 0.0:
                raise ValueError(f"magnitude_hint must be finite and nonzero, got {self.magnitude_hint}")
        if self.max_passes < 1:
            raise ValueError(f"max_passes must be >= 1, got {self.max_passes}")
        if not (math.isfinite(self.h_min_factor) and self.h_min_factor > 0.0):
            raise ValueError(f"h_min_factor must be positive, got {self.h_min_factor}")


@dataclass
class RunStats:
    """Evaluation and refinement counters for one integrate run.

    scalar_evals counts every point the integrand ever saw; vector_calls
    counts batched invocations.  Saturated splits (bisection forced by the
    order cap) count as h_refinements.
    """

    vector_calls: int = 0
    scalar_evals: int = 0
    passes: int = 0
    h_refinements: int = 0
    p_refinements: int = 0
    forced_accepts: int = 0


@dataclass(eq=False)
class Segment:
    """One active subinterval: geometry, order, node values, rule value."""

    a: float
    b: float
    p: int
    fvals: np.ndarray
    q: float


class Refinement(enum.Enum):
    H_REFINE = "h"
    P_REFINE = "p"
    P_SATURATED_SPLIT = "split"


@dataclass(frozen=True)
class HpMesh:
    """Accepted segments (a, b, p) in ascending interval order."""

    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def widths(self):
        return np.array([b - a for a, b, _ in self.entries])

    @property
    def orders(self):
        return np.array([p for _, _, p in self.entries], dtype=int)


@dataclass
class PassReport:
    """What one refinement pass did."""

    entries: list = field(default_factory=list)
    n_accepted: int = 0
    n_h: int = 0
    n_p: int = 0
    n_split: int = 0
    n_forced: int = 0


@dataclass
class IntegrationResult:
    value: float
    stats: RunStats
    mesh: HpMesh


def mapped_points(a, b, nodes):
    """Map reference nodes on [-1, 1] to the interval [a, b]."""
    return 0.5 * (b - a) * nodes + 0.5 * (a + b)


def batch_eval(f, points, stats=None):
    """Evaluate the integrand on a batch of points with one invocation.

    Every evaluation the engine performs funnels through here, so the
    counters in ``stats`` are authoritative.  An empty batch costs nothing
    and is not counted.  Non-finite output raises IntegrationError naming
    the offending point.
    """
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return np.empty(0)
    vals = np.asarray(f(points), dtype=float)
    if vals.shape != points.shape:
        vals = np.broadcast_to(vals, points.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals.ravel()))[0])
        raise IntegrationError(
            f"integrand returned {vals.ravel()[bad]} at x={points.ravel()[bad]!r}"
        )
    if stats is not None:
        stats.vector_calls += 1
        stats.scalar_evals += points.size
    return vals


# Veltkamp splitter for 53-bit doubles: multiplying by 2**27 + 1 and
# subtracting splits a float into high/low halves whose product terms
# are exact, Dekker's classic trick for error-free transformation.
_SPLITTER = 134217729.0


def _exact_dot(u, v):
    """Correctly rounded dot product of two float64 vectors.

    Each product is expanded into value + error with Dekker two-product,
    then everything is fed to math.fsum.  The result is the true dot
    product rounded once.
    """
    prod = u * v
    uh = u * _SPLITTER
    uh = uh - (uh - u)
    ul = u - uh
    vh = v * _SPLITTER
    vh = vh - (vh - v)
    vl = v - vh
    err = ((uh * vh - prod) + uh * vl + ul * vh) + ul * vl
    return math.fsum(np.concatenate((prod, err)))


def segment_quadrature(a, b, p, fvals, tables):
    """Gauss rule value on [a, b]: half-width times the weighted sum.

    The weighted sum is computed correctly rounded (Dekker two-products
    fed through math.fsum), so the acceptance test compares quadrature
    error rather than accumulation roundoff.  With a plain dot product
    the noise floor sits at a few ulp of the segment value, exactly where
    the guard threshold lives, and accept decisions near convergence
    degenerate into coin flips that stall refinement at O(1) magnitudes.
    """
    return 0.5 * (b - a) * _exact_dot(tables.weights(p), fvals)


def make_segment(a, b, p, fvals, tables):
    return Segment(a, b, p, fvals, segment_quadrature(a, b, p, fvals, tables))


def decide_refinement(seg, tables, cfg):
    """Classify a segment from its stored node values alone.

    Smooth segments (indicator >= tau) get one more point unless already at
    p_max, in which case they split keeping their order; rough segments are
    bisected.  Costs no integrand evaluations.
    """
    score = score_values(seg.fvals, seg.p, tables)
    if score.value < cfg.tau:
        return Refinement.H_REFINE
    if seg.p + 1 <= cfg.p_max:
        return Refinement.P_REFINE
    return Refinement.P_SATURATED_SPLIT


def _plan_children(seg, decision, cfg, span):
    """Child geometries (a, b, p) for a decision, or None when the segment
    is too narrow to bisect and must be force-accepted."""
    if decision is Refinement.P_REFINE:
        return [(seg.a, seg.b, seg.p + 1)]
    if 0.5 * (seg.b - seg.a) < cfg.h_min_factor * EPS * span:
        return None
    mid = 0.5 * (seg.a + seg.b)
    p = max(P_MIN, seg.p - 1) if decision is Refinement.H_REFINE else seg.p
    return [(seg.a, mid, p), (mid, seg.b, p)]


def _build_children(geoms, vals, offset, tables):
    children = []
    for ca, cb, cp in geoms:
        fv = vals[offset:offset + cp]
        offset += cp
        children.append(make_segment(ca, cb, cp, fv, tables))
    return children, offset


def apply_refinement(seg, decision, f, tables, cfg, stats=None, span=None):
    """Carry out one segment's refinement, evaluating its new points in a
    single batch.  Returns (q_refined, children); children is empty when
    the bisection was refused at the width floor (q_refined is then the
    segment's own value and the forced acceptance is recorded)."""
    if span is None:
        span = seg.b - seg.a
    geoms = _plan_children(seg, decision, cfg, span)
    if geoms is None:
        if stats is not None:
            stats.forced_accepts += 1
        return seg.q, []
    pts = np.concatenate([mapped_points(ca, cb, tables.nodes(cp)) for ca, cb, cp in geoms])
    vals = batch_eval(f, pts, stats)
    children, _ = _build_children(geoms, vals, 0, tables)
    q_refined = children[0].q if len(children) == 1 else children[0].q + children[1].q
    return q_refined, children


def accept_test(q_old, q_refined, guard):
    """True when the refinement moved the value by an amount that vanishes
    against the scaled magnitude guard in double precision."""
    return guard + abs(q_refined - q_old) == guard


def refinement_pass(active, f, tables, cfg, guard, stats=None, span=None):
    """One sweep: decide every active segment, evaluate all new points in
    one batch, then accept or keep each refinement.

    Returns (q_accepted, next_active, report).  Accepted contributions use
    the refined value, but the mesh entry records the segment as it stood
    when its refinement test passed (its final geometry and order);
    unconverged refinements replace their parent in next_active, ascending
    order preserved.
    """
    if span is None and active:
        span = active[-1].b - active[0].a
    report = PassReport()
    plans = []
    chunks = []
    for seg in active:
        decision = decide_refinement(seg, tables, cfg)
        geoms = _plan_children(seg, decision, cfg, span)
        plans.append((seg, decision, geoms))
        if geoms is not None:
            chunks.extend(mapped_points(ca, cb, tables.nodes(cp)) for ca, cb, cp in geoms)
    vals = batch_eval(f, np.concatenate(chunks), stats) if chunks else np.empty(0)

    accepted = 0.0
    next_active = []
    offset = 0
    for seg, decision, geoms in plans:
        if geoms is None:
            report.n_forced += 1
            report.n_accepted += 1
            report.entries.append((seg.a, seg.b, seg.p))
            accepted += seg.q
            if stats is not None:
                stats.forced_accepts += 1
            continue
        if stats is not None:
            if decision is Refinement.P_REFINE:
                stats.p_refinements += 1
            else:
                stats.h_refinements += 1
        if decision is Refinement.P_REFINE:
            report.n_p += 1
        elif decision is Refinement.H_REFINE:
            report.n_h += 1
        else:
            report.n_split += 1
        children, offset = _build_children(geoms, vals, offset, tables)
        q_refined = children[0].q if len(children) == 1 else children[0].q + children[1].q
        if accept_test(seg.q, q_refined, guard):
            report.n_accepted += 1
            report.entries.append((seg.a, seg.b, seg.p))
            accepted += q_refined
        else:
            next_active.extend(children)
    return accepted, next_active, report


def _coarse_estimate(f, a, b, p, tables, stats):
    # Composite p-point rule on 8 uniform subintervals, one batched call.
    edges = np.linspace(a, b, 9)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    pts = (mids[:, None] + halves[:, None] * tables.nodes(p)[None, :]).ravel()
    vals = batch_eval(f, pts, stats).reshape(8, p)
    return float(np.sum(halves * (vals @ tables.weights(p))))


def integrate(f, a, b, cfg=None, tables=None):
    """Integrate a vectorisable scalar function over [a, b] hp-adaptively.

    Parameters
    ----------
    f : callable
        Maps an ndarray of points to an ndarray of values.
    a, b : float
        Integration bounds, a < b, both finite.
    cfg : AdaptiveConfig, optional
        Tolerance and refinement knobs; defaults target near machine
        precision relative to the integral's magnitude.
    tables : RuleTables, optional
        Precomputed rule tables covering at least cfg.p_max; built (and
        memoised) on demand when omitted.

    Returns
    -------
    IntegrationResult
        value, evaluation/refinement counters, and the accepted hp mesh.

    Notes
    -----
    Each pass scores every active segment from stored node values (no new
    evaluations), refines it -- bisection with one point fewer when rough,
    one point more on the same interval when smooth, bisection at constant
    order when smooth but saturated -- and retires it once refinement no
    longer changes the running total at working precision, measured against
    a guard of magnitude |estimate| * tol / eps.  Segments narrower than
    h_min_factor * eps * (b - a) and segments still active after max_passes
    are force-accepted and flagged in stats.forced_accepts.  Identical
    inputs give bitwise-identical results: iteration and summation order
    are fixed.
    """
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError(f"need finite bounds with a < b, got ({a}, {b})")
    if cfg is None:
        cfg = AdaptiveConfig()
    if tables is None:
        tables = get_tables(cfg.p_max)
    if tables.p_max < cfg.p_max:
        raise ValueError(f"tables cover p <= {tables.p_max} but cfg.p_max is {cfg.p_max}")

    stats = RunStats()
    span = b - a
    if cfg.magnitude_hint is not None:
        hint = cfg.magnitude_hint
    else:
        hint = _coarse_estimate(f, a, b, cfg.p_init, tables, stats)
    guard = max(1.0, abs(hint)) * cfg.tol / EPS
    if not math.isfinite(guard):
        raise ValueError(f"magnitude guard overflowed ({guard}); lower tol or the hint")

    nodes = mapped_points(a, b, tables.nodes(cfg.p_init))
    seg = make_segment(a, b, cfg.p_init, batch_eval(f, nodes, stats), tables)
    active = [seg]
    total = 0.0
    entries = []
    while active and stats.passes < cfg.max_passes:
        q_acc, active, report = refinement_pass(active, f, tables, cfg, guard, stats, span)
        total += q_acc
        entries.extend(report.entries)
        stats.passes += 1
    for seg in active:
        # Out of passes: keep the current values rather than discard work.
        total += seg.q
        entries.append((seg.a, seg.b, seg.p))
        stats.forced_accepts += 1
    if stats.forced_accepts:
        warnings.warn(
            f"{stats.forced_accepts} segment(s) accepted without convergence "
            "(width floor or pass limit reached)",
            RuntimeWarning,
            stacklevel=2,
        )
    entries.sort()
    return IntegrationResult(total, stats, HpMesh(tuple(entries)))
