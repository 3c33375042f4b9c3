"""Combinatorics of the trivalent tree dual to the Farey triangulation.

Complementary regions of the tree are slopes ``s/r`` (reduced, ``r > 0`` or
the infinite slope ``1/0``).  A tree vertex is the unordered triple of
pairwise Farey-neighbouring slopes around it, and an edge is determined by
its two flanking slopes together with the regions at its two endpoints.

Everything here is exact integer arithmetic on Python ints, so there is no
overflow to guard against.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Slope:
    """A reduced slope ``s/r``; build with :func:`normalize`."""

    s: int
    r: int

    def __post_init__(self):
        if (self.s, self.r) == (0, 0):
            raise ValueError("0/0 is not a slope")
        if gcd(self.s, self.r) != 1 or self.r < 0 or (self.r == 0 and self.s != 1):
            raise ValueError(f"{self.s}/{self.r} is not in canonical form; use normalize()")

    def __str__(self):
        return f"{self.s}/{self.r}"

    @property
    def sort_key(self) -> tuple:
        # (|s|, r, sign) ordering used for every deterministic tie-break
        return (abs(self.s), self.r, self.s < 0)

    def __lt__(self, other: "Slope") -> bool:
        return self.sort_key < other.sort_key

    @classmethod
    def parse(cls, text: str) -> "Slope":
        num, _, den = text.strip().partition("/")
        return normalize(int(num), int(den) if den else 1)


def normalize(s: int, r: int) -> Slope:
    """Reduce ``s/r`` to canonical form (``r > 0``, or ``1/0``).

    >>> str(normalize(2, 4)), str(normalize(-1, -1)), str(normalize(3, 0))
    ('1/2', '1/1', '1/0')
    """
    if s == 0 and r == 0:
        raise ValueError("(0, 0) does not define a slope")
    g = gcd(s, r)
    s, r = s // g, r // g
    if r < 0 or (r == 0 and s < 0):
        s, r = -s, -r
    return Slope(s, r)


def det(a: Slope, b: Slope) -> int:
    return a.s * b.r - b.s * a.r


def are_neighbors(a: Slope, b: Slope) -> bool:
    """True iff the curves meet once, i.e. ``|s_a r_b - s_b r_a| = 1``."""
    return abs(det(a, b)) == 1


def parity_class(x: Slope) -> int:
    """Tri-colouring by Z/2 homology: 1 if only r is odd, 2 if only s is odd, 3 if both."""
    s_odd, r_odd = x.s % 2 == 1, x.r % 2 == 1
    if r_odd and not s_odd:
        return 1
    if s_odd and not r_odd:
        return 2
    return 3


def _common_neighbors(x: Slope, y: Slope) -> tuple[Slope, Slope]:
    return normalize(x.s + y.s, x.r + y.r), normalize(x.s - y.s, x.r - y.r)


@dataclass(frozen=True)
class TreeVertex:
    """A vertex of the tree, stored as its three regions in sorted order."""

    regions: tuple[Slope, Slope, Slope]

    def __post_init__(self):
        regs = tuple(sorted(self.regions))
        if len(set(regs)) != 3:
            raise ValueError("a tree vertex needs three distinct regions")
        a, b, c = regs
        if not (are_neighbors(a, b) and are_neighbors(b, c) and are_neighbors(a, c)):
            raise ValueError(f"regions {a}, {b}, {c} are not pairwise Farey neighbours")
        object.__setattr__(self, "regions", regs)

    @classmethod
    def of(cls, *regions: Slope) -> "TreeVertex":
        return cls(tuple(regions))

    def __contains__(self, x: Slope) -> bool:
        return x in self.regions

    def __str__(self):
        return "{" + ", ".join(map(str, self.regions)) + "}"

    def other(self, x: Slope, y: Slope) -> Slope:
        """The region of this vertex that is neither ``x`` nor ``y``."""
        (z,) = [w for w in self.regions if w != x and w != y]
        return z

    def edges(self) -> list["DirectedEdge"]:
        """The three edges at this vertex, directed inward (head region in the vertex)."""
        out = []
        for z in self.regions:
            x, y = [w for w in self.regions if w != z]
            out.append(DirectedEdge((x, y), fourth_region_of(x, y, z), z))
        return out

    def neighbor(self, x: Slope, y: Slope) -> "TreeVertex":
        """The adjacent vertex across the edge flanked by ``x`` and ``y``."""
        return TreeVertex.of(x, y, fourth_region_of(x, y, self.other(x, y)))


ROOT = TreeVertex.of(Slope(0, 1), Slope(1, 0), Slope(1, 1))


@dataclass(frozen=True)
class DirectedEdge:
    """Edge ``{X, Y; Z -> W}`` flanked by X, Y with tail region Z and head region W.

    ``escaping`` is a diagnostic flag set by the Bowditch tester when both end
    values overflowed; it plays no part in equality.
    """

    flank: tuple[Slope, Slope]
    tail_region: Slope
    head_region: Slope
    escaping: bool = field(default=False, compare=False)

    def __post_init__(self):
        x, y = self.flank
        if not are_neighbors(x, y):
            raise ValueError(f"flank {x}, {y} are not Farey neighbours")
        if self.tail_region == self.head_region:
            raise ValueError("tail and head regions must differ")
        pair = set(_common_neighbors(x, y))
        if {self.tail_region, self.head_region} != pair:
            raise ValueError(f"{self.tail_region}, {self.head_region} do not both border edge {x}, {y}")

    def __str__(self):
        x, y = self.flank
        return f"{{{x},{y}; {self.tail_region}->{self.head_region}}}"

    def reverse(self) -> "DirectedEdge":
        return DirectedEdge(self.flank, self.head_region, self.tail_region, self.escaping)

    @property
    def head_vertex(self) -> TreeVertex:
        return TreeVertex.of(*self.flank, self.head_region)

    @property
    def tail_vertex(self) -> TreeVertex:
        return TreeVertex.of(*self.flank, self.tail_region)

    @property
    def key(self) -> tuple:
        x, y = sorted(self.flank)
        return (x.sort_key, y.sort_key, self.tail_region.sort_key, self.head_region.sort_key)


def fourth_region_of(x: Slope, y: Slope, z: Slope) -> Slope:
    """Given an edge flanked by ``x, y`` with one end region ``z``, return the other end."""
    if not are_neighbors(x, y):
        raise ValueError(f"{x} and {y} are not Farey neighbours")
    p, q = _common_neighbors(x, y)
    if z == p:
        return q
    if z == q:
        return p
    raise ValueError(f"{z} is not a neighbour of both {x} and {y}")


def fourth_region(e: DirectedEdge) -> Slope:
    """The end region opposite ``e.tail_region`` (i.e. its head), recomputed from the flank."""
    return fourth_region_of(*e.flank, e.tail_region)


def crossing_flank(v: TreeVertex, t: Slope) -> tuple[Slope, Slope] | None:
    """The flank of ``v`` whose far side contains region ``t`` (None if ``t`` is in ``v``).

    Writing ``t = a X + b Y`` and the third region ``Z = c X + d Y``, ``t``
    lies beyond the edge X∩Y exactly when ``a b`` and ``c d`` have opposite
    signs; sign choices of the representing vectors cancel out.
    """
    if t in v:
        return None
    for z in v.regions:
        x, y = [w for w in v.regions if w != z]
        dxy = det(x, y)
        a, b = det(t, y) * dxy, det(x, t) * dxy
        c, d = det(z, y) * dxy, det(x, z) * dxy
        if a * b * c * d < 0:
            return x, y
    raise AssertionError(f"no branch of {v} contains {t}")  # pragma: no cover


def path_to_region(t: Slope, root: TreeVertex = ROOT) -> list[TreeVertex]:
    """Vertices from ``root`` to the first vertex containing ``t`` (inclusive)."""
    path = [root]
    v = root
    while (flank := crossing_flank(v, t)) is not None:
        v = v.neighbor(*flank)
        path.append(v)
    return path


def path_between(u: TreeVertex, v: TreeVertex) -> list[TreeVertex]:
    """The tree geodesic from ``u`` to ``v`` as a list of vertices."""
    path = [u]
    cur = u
    while cur != v:
        t = next(w for w in v.regions if w not in cur)
        cur = cur.neighbor(*crossing_flank(cur, t))
        path.append(cur)
    return path


def vertex_distance(u: TreeVertex, v: TreeVertex) -> int:
    return len(path_between(u, v)) - 1


def _ball(n: int, root: TreeVertex) -> Iterator[tuple[TreeVertex, int, TreeVertex | None]]:
    """Breadth-first vertices within distance ``n`` of root, with parent."""
    queue = deque([(root, 0, None)])
    while queue:
        v, d, parent = queue.popleft()
        yield v, d, parent
        if d == n:
            continue
        for e in v.edges():
            w = e.tail_vertex
            if w != parent:
                queue.append((w, d + 1, v))


def circular_set(n: int, root: TreeVertex = ROOT) -> set[DirectedEdge]:
    """Directed edges meeting the radius-``n`` ball only at their head endpoint."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = set()
    for v, d, parent in _ball(n, root):
        if d != n:
            continue
        for e in v.edges():
            if e.tail_vertex != parent:
                out.add(e)
    return out


def regions_within(n: int, root: TreeVertex = ROOT) -> set[Slope]:
    """All regions touching the radius-``n`` ball around ``root``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return {x for v, _, _ in _ball(n, root) for x in v.regions}


def half_tree_regions(e: DirectedEdge, depth: int) -> set[Slope]:
    """Regions of the tail side of ``e`` first met within ``depth`` steps of its tail vertex.

    Depth 0 is just the tail region; each further level doubles, so the
    result has ``2**(depth + 1) - 1`` elements.
    """
    out = set()
    for k in range(depth + 1):
        out |= half_tree_level(e, k)
    return out


def half_tree_level(e: DirectedEdge, depth: int) -> set[Slope]:
    """Regions of the tail side of ``e`` first met exactly ``depth`` steps out (``2**depth`` of them)."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    # from vertex {x, y, w} leave through the two edges other than (x, y)
    frontier = [(e.flank, e.tail_region)]
    for _ in range(depth):
        nxt = []
        for (x, y), w in frontier:
            for a, b in ((x, w), (y, w)):
                nxt.append(((a, b), fourth_region_of(a, b, y if a == x else x)))
        frontier = nxt
    return {w for _, w in frontier}


@dataclass(frozen=True)
class IntegerMatrix2:
    """Integer 2x2 matrix acting on slopes by ``(s, r) -> (a s + b r, c s + d r)``."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if abs(self.det) != 1:
            raise ValueError(f"determinant {self.det} is not ±1")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def is_anosov(self) -> bool:
        return abs(self.trace) > 2

    def inverse(self) -> "IntegerMatrix2":
        k = self.det
        return IntegerMatrix2(self.d * k, -self.b * k, -self.c * k, self.a * k)

    def __matmul__(self, o: "IntegerMatrix2") -> "IntegerMatrix2":
        return IntegerMatrix2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                              self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __pow__(self, k: int) -> "IntegerMatrix2":
        base = self if k >= 0 else self.inverse()
        out = IntegerMatrix2(1, 0, 0, 1)
        for _ in range(abs(k)):
            out = out @ base
        return out

    @classmethod
    def parse(cls, text: str) -> "IntegerMatrix2":
        return cls(*(int(t) for t in text.split(",")))


def require_anosov(theta: IntegerMatrix2) -> None:
    if not theta.is_anosov:
        raise ValueError(f"matrix with trace {theta.trace} is not Anosov (need |trace| > 2)")


def anosov_apply(theta: IntegerMatrix2, x: Slope, *, require: bool = True) -> Slope:
    if require:
        require_anosov(theta)
    return normalize(theta.a * x.s + theta.b * x.r, theta.c * x.s + theta.d * x.r)


def apply_to_vertex(theta: IntegerMatrix2, v: TreeVertex) -> TreeVertex:
    return TreeVertex.of(*(anosov_apply(theta, x, require=False) for x in v.regions))


def anosov_axis(theta: IntegerMatrix2, start: TreeVertex = ROOT) -> list[TreeVertex]:
    """One period ``u_0, ..., u_l`` of the translation axis of ``theta``, with ``u_l = theta u_0``.

    Uses ``d(v, theta v) = 2 d(v, axis) + l`` and ``d(v, theta^2 v) = 2 d(v, axis) + 2 l``.
    """
    require_anosov(theta)
    to_image = path_between(start, apply_to_vertex(theta, start))
    d1 = len(to_image) - 1
    d2 = vertex_distance(start, apply_to_vertex(theta @ theta, start))
    length = d2 - d1
    p = to_image[(d1 - length) // 2]
    axis = path_between(p, apply_to_vertex(theta, p))
    assert len(axis) - 1 == length
    return axis


def orbit_representatives(theta: IntegerMatrix2, depth: int, root: TreeVertex = ROOT) -> set[Slope]:
    """One representative per theta-orbit among ``regions_within(depth, root)``.

    Orbits are truncated to powers ``|k| <= 3 * max(depth, 1)``; within the
    truncated orbit the smallest slope under ``Slope.sort_key`` is kept.
    """
    require_anosov(theta)
    window = regions_within(depth, root)
    k_max = 3 * max(depth, 1)
    powers = [theta ** k for k in range(-k_max, k_max + 1) if k != 0]
    reps = set()
    for x in window:
        orbit = [x] + [anosov_apply(p, x, require=False) for p in powers]
        reps.add(min(y for y in orbit if y in window))
    return reps


def sorted_slopes(xs: Iterable[Slope]) -> list[Slope]:
    return sorted(xs, key=lambda x: x.sort_key)
