"""Testing the Bowditch conditions on a Markoff map.

The test descends along the edge directions induced by the map (each edge
points toward the smaller of its two end values) until it reaches a sink,
then explores outward from the sink until every frontier edge carries an
escape certificate.  A certified branch contains no trace of modulus at most
the threshold, so a finished exploration with no witness in ``[-2, 2]``
proves both conditions for the explored data.

Certificates
------------
*Standard*: flanks ``|x|, |y| > t >= 2`` and head ``|w| > max(|x|, |y|)``.
Every later edge in the branch then satisfies the same inequalities.

*Fan*: one flank is small, ``|x| <= t < |y|``.  The neighbours of ``x`` past
the edge form the sequence ``y_0 = y, y_1 = w, y_{k+1} = x y_k - y_{k-1}``,
which is ``A lam^k + B lam^-k`` (or ``+-(a + k d)`` when ``x = +-2``).  If
every ``|y_k| > t`` for ``k >= 1`` (checked explicitly up to the index where
the closed-form lower bound takes over) then each side branch between
consecutive ``y_k`` passes the standard certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .farey import (DirectedEdge, IntegerMatrix2, Slope, TreeVertex, anosov_apply,
                    regions_within, require_anosov, sorted_slopes)
from .markoff import ESCAPE_MAGNITUDE, MarkoffMap, TraceOverflow
from ._branch import sqrt_principal

log = logging.getLogger(__name__)

SATISFIED, VIOLATED, INCONCLUSIVE = "satisfied", "violated", "inconclusive"


@dataclass
class BQConfig:
    max_depth: int = 64
    escape_threshold: float = 2 + 1e-9
    relaxed: bool = False
    interval_tolerance: float = 1e-12
    max_vertices: int = 100_000

    def __post_init__(self):
        if not self.escape_threshold > 2:
            raise ValueError("escape_threshold must exceed 2")
        if self.max_depth < 0:
            raise ValueError("max_depth must be nonnegative")


@dataclass
class BQReport:
    status: str
    violating_regions: list = field(default_factory=list)
    sink_vertices: list = field(default_factory=list)
    max_depth_explored: int = 0
    small_trace_regions: list = field(default_factory=list)
    frontier: list = field(default_factory=list, repr=False)
    vertices_explored: int = 0
    relaxed: bool = False

    @property
    def satisfied(self) -> bool:
        return self.status == SATISFIED

    def to_json(self) -> dict:
        def fmt(pairs):
            return [f"{x}: {v.real:.17g}{v.imag:+.17g}i" for x, v in pairs]

        return {
            "status": self.status,
            "relaxed": self.relaxed,
            "violating_regions": fmt(self.violating_regions),
            "small_trace_regions": fmt(self.small_trace_regions),
            "sink_vertices": [[str(x) for x in v.regions] for v in self.sink_vertices],
            "max_depth_explored": self.max_depth_explored,
            "vertices_explored": self.vertices_explored,
        }


def segment_distance(x: complex) -> float:
    """Distance from ``x`` to the real segment ``[-2, 2]``."""
    re = min(max(x.real, -2.0), 2.0)
    return abs(complex(x.real - re, x.imag))


def violates_condition_i(x: complex, relaxed: bool = False, tol: float = 1e-12) -> bool:
    if segment_distance(x) > tol:
        return False
    if relaxed and min(abs(x - 2), abs(x + 2)) <= tol:
        return False
    return True


def escaping_values(x: complex, y: complex, w: complex, threshold: float = 2 + 1e-9) -> bool:
    ax, ay = abs(x), abs(y)
    return ax > threshold and ay > threshold and abs(w) > max(ax, ay)


def _fan_lower_bound(x: complex, y0: complex, y1: complex, tol: float):
    """``k -> lower bound of |y_k|``, nondecreasing in k, or None if the fan does not grow."""
    if min(abs(x - 2), abs(x + 2)) <= max(tol, 1e-12):
        s = 1 if abs(x - 2) <= abs(x + 2) else -1
        a, d = y0, s * y1 - y0
        if abs(d) == 0:
            return None
        return lambda k: k * abs(d) - abs(a)
    if x.imag == 0 and -2 < x.real < 2:
        return None
    lam = x / 2 * (1 + sqrt_principal(1 - 4 / (x * x)))
    if abs(lam) < 1:
        lam = 1 / lam
    if abs(lam) <= 1 + 1e-12:
        return None
    A = (y1 - y0 / lam) / (lam - 1 / lam)
    B = y0 - A
    ml, mA, mB = abs(lam), abs(A), abs(B)
    if mA == 0:
        return None
    return lambda k: mA * ml ** k - mB * ml ** (-k)


def fan_escaping(x: complex, y: complex, w: complex, threshold: float = 2 + 1e-9,
                 tol: float = 1e-12, max_steps: int = 4096) -> bool:
    """Certificate for an edge with small flank ``x`` and large flank ``y``, head ``w``."""
    if not (abs(x) <= threshold < abs(y)) or abs(w) <= threshold:
        return False
    bound = _fan_lower_bound(x, y, w, tol)
    if bound is None:
        return False
    prev, cur = y, w
    for k in range(1, max_steps):
        try:
            if bound(k) > threshold:
                return True
        except OverflowError:
            return True
        if abs(cur) <= threshold:
            return False
        prev, cur = cur, x * cur - prev
    return False


def edge_certified(x: complex, y: complex, w: complex, threshold: float = 2 + 1e-9,
                   tol: float = 1e-12) -> bool:
    """Either certificate, for the edge flanked by values x, y heading to value w."""
    ax, ay, aw = abs(x), abs(y), abs(w)
    if aw > ESCAPE_MAGNITUDE and max(ax, ay) > ESCAPE_MAGNITUDE:
        return True
    if ax > threshold and ay > threshold:
        return aw > max(ax, ay)
    if ax <= threshold < ay:
        return fan_escaping(x, y, w, threshold, tol)
    if ay <= threshold < ax:
        return fan_escaping(y, x, w, threshold, tol)
    return False


def _points_toward(far: Slope, far_value: complex, near: Slope, near_value: complex) -> bool:
    """Whether the edge between these end regions is directed toward ``far``."""
    af, an = abs(far_value), abs(near_value)
    if af != an:
        return af < an
    return far < near


def induced_direction(m: MarkoffMap, e: DirectedEdge) -> DirectedEdge:
    """Direct the edge underlying ``e`` toward its smaller-modulus end region."""
    z, w = e.tail_region, e.head_region
    try:
        zv = m.trace(z)
    except TraceOverflow:
        zv = None
    try:
        wv = m.trace(w)
    except TraceOverflow:
        wv = None
    if zv is None and wv is None:
        head, tail = (z, w) if z < w else (w, z)
        return DirectedEdge(e.flank, tail, head, escaping=True)
    if zv is None:
        return DirectedEdge(e.flank, z, w)
    if wv is None:
        return DirectedEdge(e.flank, w, z)
    if _points_toward(w, wv, z, zv):
        return DirectedEdge(e.flank, z, w)
    return DirectedEdge(e.flank, w, z)


def is_escaping(m: MarkoffMap, e: DirectedEdge, threshold: float = 2 + 1e-9) -> bool:
    """Standard certificate for ``e`` pointing away from the sink (head = new region)."""
    if not threshold > 2:
        raise ValueError("threshold must exceed 2")
    x, y = e.flank
    return escaping_values(m.trace(x), m.trace(y), m.trace(e.head_region), threshold)


class _Search:
    def __init__(self, m: MarkoffMap, cfg: BQConfig):
        self.m, self.cfg = m, cfg
        self.violating: dict = {}
        self.small: dict = {}
        self.vertices = 0

    def inspect(self, x: Slope, value: complex) -> bool:
        cfg = self.cfg
        if violates_condition_i(value, cfg.relaxed, cfg.interval_tolerance):
            self.violating[x] = value
            return True
        if abs(value) <= 2 or segment_distance(value) <= cfg.interval_tolerance:
            self.small[x] = value
        return False

    def report(self, status, sinks=(), depth=0, frontier=()) -> BQReport:
        return BQReport(
            status=status,
            violating_regions=[(x, self.violating[x]) for x in sorted_slopes(self.violating)],
            sink_vertices=list(sinks),
            max_depth_explored=depth,
            small_trace_regions=[(x, self.small[x]) for x in sorted_slopes(self.small)],
            frontier=sorted(frontier, key=lambda e: e.key),
            vertices_explored=self.vertices,
            relaxed=self.cfg.relaxed,
        )

    def descend(self):
        """Follow outgoing induced edges from the root; returns (sink or None, steps)."""
        m, cfg = self.m, self.cfg
        v = m.root
        for x in v.regions:
            self.inspect(x, m.trace(x))
        if self.violating:
            return None, 0
        steps = 0
        while True:
            self.vertices += 1
            out = []
            for z in v.regions:
                x, y = [r for r in v.regions if r != z]
                try:
                    w, wv = m.across(x, y, z)
                except TraceOverflow:
                    continue
                self.inspect(w, wv)
                if _points_toward(w, wv, z, m.trace(z)):
                    out.append((abs(wv), w.sort_key, x, y, w))
            if self.violating:
                return None, steps
            if not out:
                return v, steps
            if steps >= cfg.max_depth:
                return None, steps
            _, _, x, y, w = min(out)
            v = TreeVertex((x, y, w))
            steps += 1

    def explore(self, sink: TreeVertex):
        """Certify every branch leaving the sink; returns (finished, depth, frontier)."""
        m, cfg = self.m, self.cfg
        thr, tol = cfg.escape_threshold, cfg.interval_tolerance
        stack = []
        for z in reversed(sink.regions):
            x, y = [r for r in sink.regions if r != z]
            stack.append((x, y, z, 1))
        frontier, depth = [], 0
        while stack:
            x, y, z, d = stack.pop()
            try:
                w, wv = m.across(x, y, z)
            except TraceOverflow as exc:
                frontier.append(DirectedEdge((x, y), exc.slope, z, escaping=True))
                continue
            if self.inspect(w, wv):
                return False, max(depth, d), frontier
            if edge_certified(m.trace(x), m.trace(y), wv, thr, tol):
                frontier.append(DirectedEdge((x, y), w, z))
                continue
            if d > cfg.max_depth or self.vertices >= cfg.max_vertices:
                log.debug("budget exhausted at depth %d after %d vertices", d, self.vertices)
                return False, max(depth, d), frontier
            self.vertices += 1
            depth = max(depth, d)
            stack.append((y, w, x, d + 1))
            stack.append((x, w, y, d + 1))
        return True, depth, frontier


def find_sink(m: MarkoffMap, cfg: BQConfig | None = None) -> BQReport:
    """Locate a sink of the induced directions and certify everything beyond it."""
    cfg = cfg or BQConfig()
    search = _Search(m, cfg)
    sink, steps = search.descend()
    if search.violating:
        return search.report(VIOLATED, depth=steps)
    if sink is None:
        return search.report(INCONCLUSIVE, depth=steps)
    finished, depth, frontier = search.explore(sink)
    if search.violating:
        return search.report(VIOLATED, [sink], steps + depth)
    if not finished:
        return search.report(INCONCLUSIVE, [sink], steps + depth)
    return search.report(SATISFIED, [sink], steps + depth, frontier)


def check_bq(m: MarkoffMap, cfg: BQConfig | None = None) -> BQReport:
    """Bowditch conditions; with ``cfg.relaxed`` traces equal to +-2 are tolerated."""
    report = find_sink(m, cfg)
    log.info("BQ %s (depth %d, %d vertices)", report.status, report.max_depth_explored,
             report.vertices_explored)
    return report


def check_theta_invariance(m: MarkoffMap, theta: IntegerMatrix2, depth: int = 6,
                           tol: float = 1e-8) -> bool:
    """``phi(theta X) == phi(X)`` (relative tolerance) on every region within ``depth``."""
    require_anosov(theta)
    try:
        for x in regions_within(depth, m.root):
            a, b = m.trace(anosov_apply(theta, x)), m.trace(x)
            if abs(a - b) > tol * max(1.0, abs(b)):
                return False
    except TraceOverflow:
        return False
    return True
