"""McShane-type identities for mu-Markoff maps, evaluated numerically.

The series engines sum ``h`` over regions of a finite subtree grown outward
from a centre vertex.  An edge leaving the subtree is crossed unless it
carries an escape certificate *and* the region beyond it has trace modulus
above the current cutoff; certified branches only contain larger traces, so
raising the cutoff sweeps in every region in increasing order of size.

Truncation error
----------------
For an edge ``e = {X, Y; -> Z}`` on the boundary of the subtree, pointing
inward, put ``delta(e) = phi(e) - h(x) - h(y)``.  Summing the circular-set
relation against the partial sum shows that the part of the series lying
beyond ``e`` is ``delta(e) / 2``, and ``|delta(e)| <= K |y|^-2`` with ``y``
the larger flank.  ``k_hat`` is the largest observed ``|delta| |y|^2`` on the
boundary and the reported residual is ``4 * k_hat * sum |y|^-2`` scaled by
the multiplicity with which the outer regions enter the sum.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._branch import sqrt_principal
from .bowditch import (BQConfig, BQReport, VIOLATED, check_bq, check_theta_invariance,
                       edge_certified, segment_distance, violates_condition_i)
from .farey import (DirectedEdge, IntegerMatrix2, Slope, TreeVertex, anosov_apply, anosov_axis,
                    apply_to_vertex, parity_class, require_anosov)
from .markoff import MarkoffMap, MarkoffTriple, TraceOverflow, from_seed, markoff_mu

log = logging.getLogger(__name__)

__all__ = [
    "BQRefused", "DomainError", "NotInvariant", "SeriesResult", "Weights",
    "anosov_fixed_seed", "edge_value", "h_mu", "h_mu_p", "psi", "psi_edge_value",
    "sqrt_principal", "sum_branch", "sum_main", "sum_relative", "sum_tricolor",
    "weighted_edge_values", "z_branch",
]

THIRD = 1 / 3


class DomainError(ValueError):
    """A trace hit an excluded value of h or of an edge value."""


class BQRefused(RuntimeError):
    """The Bowditch conditions were not established, so the series was not summed."""

    def __init__(self, report: BQReport):
        super().__init__(f"Bowditch conditions not established: {report.status}")
        self.report = report


class NotInvariant(RuntimeError):
    """The map is not fixed by the mapping class."""


def _check_domain(x: complex, mu: complex, strict: bool = True) -> None:
    if x == 0:
        raise DomainError("trace 0 is excluded")
    if strict and x.imag == 0 and -2 < x.real < 2:
        raise DomainError(f"trace {x} lies in (-2, 2)")
    if x * x == mu:
        raise DomainError(f"trace {x} squares to mu")


def h_mu_p(x: complex, mu: complex, p: complex, *, strict: bool = True) -> complex:
    """``(1 - (x^2 - (1-p) mu) / (x^2 - mu) * sqrt(1 - 4/x^2)) / 2``.

    Defined off the open segment ``(-2, 2)`` and away from ``x^2 = mu``; at
    ``x = +-2`` the square root vanishes and the value is 1/2.  With
    ``strict=False`` points of the segment are evaluated anyway (the square
    root of a negative real taken as ``+i``), for forced diagnostic sums.
    """
    x, mu = complex(x), complex(mu)
    _check_domain(x, mu, strict)
    x2 = x * x
    return 0.5 * (1 - (x2 - (1 - p) * mu) / (x2 - mu) * sqrt_principal(1 - 4 / x2))


def h_mu(x: complex, mu: complex, *, strict: bool = True) -> complex:
    """Summand of the main identity; ``h_mu_p`` at ``p = 1/3``."""
    return h_mu_p(x, mu, THIRD, strict=strict)


def edge_value(x: complex, y: complex, z: complex, mu: complex,
               px: complex = THIRD, py: complex = THIRD) -> complex:
    """Weighted edge value of ``{X, Y; -> Z}`` with weights ``px, py`` on the flanks."""
    if x == 0 or y == 0:
        raise DomainError("flank trace 0 is excluded")
    if x * x == mu or y * y == mu:
        raise DomainError("flank trace squares to mu")
    q = z / (x * y)
    return q - (0.5 - q) * (px * mu / (x * x - mu) + py * mu / (y * y - mu))


def psi(x: complex, y: complex, z: complex, mu: complex) -> complex:
    return edge_value(x, y, z, mu)


def psi_edge_value(e: DirectedEdge, m: MarkoffMap) -> complex:
    x, y = e.flank
    return psi(m.trace(x), m.trace(y), m.trace(e.head_region), m.mu)


@dataclass(frozen=True)
class Weights:
    p1: complex
    p2: complex
    p3: complex

    def __post_init__(self):
        if abs(self.p1 + self.p2 + self.p3 - 1) > 1e-12:
            raise ValueError("weights must sum to 1")

    def of(self, x: Slope) -> complex:
        return (self.p1, self.p2, self.p3)[parity_class(x) - 1]


EQUAL_WEIGHTS = Weights(THIRD, THIRD, THIRD)


def weighted_edge_values(v: TreeVertex, m: MarkoffMap, w: Weights) -> tuple[complex, complex, complex]:
    """Weighted values of the three edges heading into ``v``, ordered by the colour of the head."""
    by_class = {parity_class(x): x for x in v.regions}
    mu = m.mu
    out = []
    for k in (1, 2, 3):
        head = by_class[k]
        a, b = [by_class[j] for j in (1, 2, 3) if j != k]
        out.append(edge_value(m.trace(a), m.trace(b), m.trace(head), mu, w.of(a), w.of(b)))
    return tuple(out)


def z_branch(x: complex, y: complex, mu: complex) -> complex:
    """Root ``z`` of ``x^2 + y^2 + z^2 - x y z = mu`` picked by the principal square root."""
    x, y = complex(x), complex(y)
    if x == 0 or y == 0:
        raise DomainError("x and y must be nonzero")
    x2, y2 = x * x, y * y
    return x * y / 2 * (1 - sqrt_principal(1 - 4 * (1 / x2 + 1 / y2 - mu / (x2 * y2))))


@dataclass
class SeriesResult:
    value: complex
    terms_used: int
    depth: int
    residual_estimate: float
    k_hat: float
    reliable: bool = True
    expected: complex | None = None
    components: tuple = ()
    cutoff: float = 0.0

    @property
    def abs_error(self) -> float | None:
        return None if self.expected is None else abs(self.value - self.expected)

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "terms": self.terms_used,
            "depth": self.depth,
            "residual": self.residual_estimate,
            "reliable": self.reliable,
        }


def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


@dataclass
class _Walk:
    regions: dict = field(default_factory=dict)
    frontier: list = field(default_factory=list)
    depth: int = 0
    certified: bool = True


def _walk(m: MarkoffMap, starts, cutoff: float, max_depth: int,
          threshold: float, tol: float, max_vertices: int = 100_000) -> _Walk:
    """Grow outward across each start edge ``(x, y, z, depth)`` (leaving away from ``z``)."""
    out = _Walk()
    stack = list(reversed(starts))
    while stack:
        if len(out.regions) >= max_vertices:
            log.debug("walk stopped at the vertex budget %d", max_vertices)
            out.certified = False
            out.frontier.extend(e[:3] for e in stack)
            break
        x, y, z, d = stack.pop()
        xv, yv = m.trace(x), m.trace(y)
        try:
            w, wv = m.across(x, y, z)
        except TraceOverflow:
            continue
        cert = edge_certified(xv, yv, wv, threshold, tol)
        if (cert and abs(wv) > cutoff) or d > max_depth:
            out.certified &= cert
            out.frontier.append((x, y, z))
            continue
        out.regions[w] = wv
        out.depth = max(out.depth, d)
        stack.append((y, w, x, d + 1))
        stack.append((x, w, y, d + 1))
    return out


_ROUNDING = 4 * sys.float_info.epsilon
_NOISE = 1024 * sys.float_info.epsilon


def _tail(m: MarkoffMap, walk: _Walk, term: Callable, weight: Callable):
    """``(k_hat, sum |y|^-2, rounding floor)`` over the boundary of the walk."""
    mu = m.mu
    k_hat, inv_sq, floor = 0.0, [], 0.0
    for x, y, z in walk.frontier:
        xv, yv, zv = m.trace(x), m.trace(y), m.trace(z)
        phi, hx, hy = edge_value(xv, yv, zv, mu, weight(x), weight(y)), term(x, xv), term(y, yv)
        delta = phi - hx - hy
        big = max(abs(xv), abs(yv))
        inv_sq.append(1 / (big * big))
        # h and phi come from differences of O(1) quantities, so their absolute error is ~eps
        scale = 1 + abs(phi) + abs(hx) + abs(hy)
        # a delta at rounding level carries no information about the tail constant
        if abs(delta) > _NOISE * scale:
            k_hat = max(k_hat, abs(delta) * big * big)
        floor += _ROUNDING * scale
    return k_hat, math.fsum(inv_sq), floor


def _series(m, build, term, weight, multiplicity, tol, max_depth, threshold, itol, reliable,
            expected=None, components=None, max_vertices=100_000):
    """Raise the cutoff until the residual drops below ``tol`` or the walk stops improving."""
    cutoff, k_hat = 16.0, 0.0
    while True:
        seeds, starts = build()
        walk = _walk(m, starts, cutoff, max_depth, threshold, itol, max_vertices)
        k_now, inv_sq, floor = _tail(m, walk, term, weight)
        # deep frontiers only see rounding noise, so keep the constant measured at shallower cutoffs
        k_hat = max(k_hat, k_now)
        # each boundary edge hides delta / 2 of the series, counted `multiplicity` times
        truncation = 4 * (multiplicity / 2) * k_hat * inv_sq
        residual = truncation + floor
        if residual < tol or not walk.certified or cutoff > 1e13 or truncation < floor:
            break
        cutoff *= max(4.0, 2 * math.sqrt(truncation / tol))
    weighted = dict(seeds)
    for x, v in walk.regions.items():
        weighted[x] = (v, multiplicity)
    ordered = sorted(weighted, key=lambda s: s.sort_key)
    value = _csum(k * term(x, weighted[x][0]) for x in ordered for k in [weighted[x][1]])
    parts = ()
    if components is not None:
        parts = tuple(_csum(weighted[x][1] * term(x, weighted[x][0]) for x in ordered
                            if components(x) == c) for c in (1, 2, 3))
    log.debug("series: %d terms, depth %d, cutoff %.3g, residual %.3g",
              len(ordered), walk.depth, cutoff, residual)
    return SeriesResult(value, len(ordered), walk.depth, residual, k_hat,
                        reliable and walk.certified, expected, parts, cutoff)


def _bq_centre(m: MarkoffMap, cfg: BQConfig | None, force: bool):
    report = check_bq(m, cfg or BQConfig())
    if report.satisfied:
        return report.sink_vertices[0], True, report
    if not force:
        raise BQRefused(report)
    log.warning("summing without a BQ certificate (%s); result marked unreliable", report.status)
    return m.root, False, report


def _centre_starts(m: MarkoffMap, v: TreeVertex):
    seeds = {x: (m.trace(x), 1) for x in v.regions}
    starts = []
    for z in v.regions:
        x, y = [r for r in v.regions if r != z]
        starts.append((x, y, z, 1))
    return seeds, starts


def sum_main(m: MarkoffMap, tol: float = 1e-10, max_depth: int = 64, *, force: bool = False,
             bq: BQConfig | None = None) -> SeriesResult:
    """``sum_X h_mu(phi(X))``, expected 1/2."""
    bq = bq or BQConfig(max_depth=max_depth)
    centre, reliable, _ = _bq_centre(m, bq, force)
    mu = m.mu
    return _series(m, lambda: _centre_starts(m, centre),
                   lambda x, v: h_mu(v, mu, strict=reliable),
                   lambda x: THIRD, 1, tol, max_depth, bq.escape_threshold,
                   bq.interval_tolerance, reliable, expected=0.5, max_vertices=bq.max_vertices)


def sum_tricolor(m: MarkoffMap, w: Weights, tol: float = 1e-10, max_depth: int = 64, *,
                 force: bool = False, bq: BQConfig | None = None) -> SeriesResult:
    """``sum_i sum_{X in class i} h_{mu, p_i}(phi(X))``, expected 1/2; per-class parts in ``components``."""
    bq = bq or BQConfig(max_depth=max_depth)
    centre, reliable, _ = _bq_centre(m, bq, force)
    mu = m.mu
    return _series(m, lambda: _centre_starts(m, centre),
                   lambda x, v: h_mu_p(v, mu, w.of(x), strict=reliable),
                   w.of, 1, tol, max_depth, bq.escape_threshold, bq.interval_tolerance,
                   reliable, expected=0.5, components=parity_class,
                   max_vertices=bq.max_vertices)


def sum_branch(m: MarkoffMap, e: DirectedEdge, tol: float = 1e-10, max_depth: int = 64, *,
               force: bool = False, bq: BQConfig | None = None) -> SeriesResult:
    """Flank terms once plus tail-side terms twice; expected ``psi_edge_value(e)``."""
    bq = bq or BQConfig(max_depth=max_depth)
    _, reliable, _ = _bq_centre(m, bq, force)
    mu = m.mu
    x, y = e.flank
    z = e.tail_region

    def build():
        seeds = {x: (m.trace(x), 1), y: (m.trace(y), 1), z: (m.trace(z), 2)}
        return seeds, [(x, z, y, 1), (y, z, x, 1)]

    return _series(m, build, lambda s, v: h_mu(v, mu, strict=reliable), lambda s: THIRD, 2,
                   tol, max_depth, bq.escape_threshold, bq.interval_tolerance, reliable,
                   expected=psi_edge_value(e, m), max_vertices=bq.max_vertices)


def axis_cells(theta: IntegerMatrix2, root: TreeVertex):
    """For one period of the axis: ``(new_region, hanging_start)`` per axis vertex.

    ``new_region`` is the region entering the axis at that vertex; the
    hanging start leaves the axis through its third edge.
    """
    axis = anosov_axis(theta, root)
    length = len(axis) - 1
    before = apply_to_vertex(theta.inverse(), axis[length - 1])
    cells = []
    for i in range(length):
        u = set(axis[i].regions)
        prev = set((axis[i - 1] if i else before).regions)
        nxt = set(axis[i + 1].regions)
        (new,) = u - prev
        (leaving,) = u - nxt
        (z,) = u - {new, leaving}
        cells.append((new, (new, leaving, z, 1)))
    return axis, cells


def sum_relative(m: MarkoffMap, theta: IntegerMatrix2, tol: float = 1e-10, max_depth: int = 64, *,
                 force: bool = False, bq: BQConfig | None = None,
                 invariance_depth: int = 4) -> SeriesResult:
    """Sum of h over one representative per theta-orbit; expected 0.

    Representatives come from one period of the translation axis of theta:
    the region joining the axis at each axis vertex, and every region in the
    branch hanging off that vertex.
    """
    require_anosov(theta)
    bq = bq or BQConfig(max_depth=max_depth)
    reliable = True
    if not check_theta_invariance(m, theta, invariance_depth):
        if not force:
            raise NotInvariant("map is not fixed by theta")
        reliable = False
    mu = m.mu
    _, cells = axis_cells(theta, m.root)

    def build():
        seeds = {x: (m.trace(x), 1) for x, _ in cells}
        return seeds, [start for _, start in cells]

    bad = [(x, m.trace(x)) for x, _ in cells
           if violates_condition_i(m.trace(x), bq.relaxed, bq.interval_tolerance)]
    if bad:
        report = BQReport(VIOLATED, violating_regions=bad, relaxed=bq.relaxed)
        if not force:
            raise BQRefused(report)
        reliable = False
    result = _series(m, build, lambda s, v: h_mu(v, mu, strict=reliable), lambda s: THIRD, 1,
                     tol, max_depth, bq.escape_threshold, bq.interval_tolerance, reliable,
                     expected=0.0, max_vertices=bq.max_vertices)
    if not result.reliable and reliable and not force:
        raise BQRefused(BQReport("inconclusive", relaxed=bq.relaxed))
    return result


def _theta_residual(theta: IntegerMatrix2, mu: complex, t: np.ndarray) -> np.ndarray:
    m = from_seed(*t)
    base = (Slope(0, 1), Slope(1, 0), Slope(1, 1))
    res = [m.trace(anosov_apply(theta, x)) - v for x, v in zip(base, t)]
    res.append(markoff_mu(*t) - mu)
    return np.array(res, dtype=complex)


DEFAULT_STARTS = tuple(
    tuple(complex(a, b) for a, b in row)
    for row in np.random.default_rng(20240917).uniform(-3, 3, size=(24, 3, 2))
)


def anosov_fixed_seed(theta: IntegerMatrix2, mu: complex,
                      starts: Sequence[Sequence[complex]] | None = None,
                      max_iter: int = 80, verify_depth: int = 4) -> list[MarkoffTriple]:
    """Triples fixed by theta with the given mu, by damped Gauss-Newton from each start.

    Triples with a coordinate on ``[-2, 2]`` or with ``mu`` near 4 are dropped;
    the rest must pass ``check_theta_invariance`` at ``verify_depth``.
    """
    require_anosov(theta)
    mu = complex(mu)
    found: list[np.ndarray] = []
    for start in (DEFAULT_STARTS if starts is None else starts):
        t = np.array(start, dtype=complex)
        try:
            f = _theta_residual(theta, mu, t)
            for _ in range(max_iter):
                norm = np.linalg.norm(f)
                if norm < 1e-13 * max(1.0, np.abs(t).max() ** 3):
                    break
                jac = np.empty((4, 3), dtype=complex)
                for j in range(3):
                    h = 1e-7 * max(1.0, abs(t[j]))
                    tp, tm = t.copy(), t.copy()
                    tp[j] += h
                    tm[j] -= h
                    jac[:, j] = (_theta_residual(theta, mu, tp) - _theta_residual(theta, mu, tm)) / (2 * h)
                step = np.linalg.lstsq(jac, -f, rcond=None)[0]
                damp = 1.0
                while damp > 1e-4:
                    cand = t + damp * step
                    fc = _theta_residual(theta, mu, cand)
                    if np.linalg.norm(fc) < norm:
                        t, f = cand, fc
                        break
                    damp /= 2
                else:
                    break
            else:
                continue
        except (TraceOverflow, OverflowError, ZeroDivisionError, np.linalg.LinAlgError):
            continue
        if np.linalg.norm(f) > 1e-10 * max(1.0, np.abs(t).max() ** 3):
            continue
        if abs(markoff_mu(*t) - 4) < 1e-8 or any(segment_distance(complex(v)) < 1e-6 for v in t):
            continue
        if any(np.abs(t - s).max() < 1e-8 for s in found):
            continue
        if not check_theta_invariance(from_seed(*t), theta, verify_depth):
            continue
        found.append(t)
    found.sort(key=lambda s: tuple((round(v.real, 9), round(v.imag, 9)) for v in s))
    return [MarkoffTriple(*(complex(v) for v in s)) for s in found]
