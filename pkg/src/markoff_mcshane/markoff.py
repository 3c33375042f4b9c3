"""mu-Markoff maps: traces of an SL(2,C) character on every slope.

A map is seeded by the traces ``(x, y, z)`` at the root regions
``0/1, 1/0, 1/1`` (the curves ``a, b, ab``) and extended over the whole tree
with the edge relation ``w = x y - z``.  Values are cached by slope and
always computed along the unique tree path from the root, so the value at a
slope does not depend on the order in which slopes were requested.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field

import numpy as np

from .farey import (ROOT, Slope, TreeVertex, crossing_flank, fourth_region_of,
                    normalize)

# Magnitudes above this are treated as escaped by the Bowditch tester.
ESCAPE_MAGNITUDE = 1e150


class TraceOverflow(ArithmeticError):
    """A trace left the floating-point range."""

    def __init__(self, slope):
        super().__init__(f"trace at {slope} overflowed")
        self.slope = slope


class ReducibleCharacter(ValueError):
    """The character is reducible (mu = 4) and has no irreducible lift."""


def markoff_mu(x: complex, y: complex, z: complex) -> complex:
    return x * x + y * y + z * z - x * y * z


@dataclass(frozen=True)
class MarkoffTriple:
    x: complex
    y: complex
    z: complex

    @property
    def mu(self) -> complex:
        return markoff_mu(self.x, self.y, self.z)

    def __iter__(self):
        return iter((self.x, self.y, self.z))


def vieta_flip(t: MarkoffTriple, index: int | str) -> MarkoffTriple:
    """Replace one coordinate ``c`` by ``(product of the other two) - c``."""
    if isinstance(index, str):
        index = "xyz".index(index)
    x, y, z = t
    if index == 0:
        return MarkoffTriple(y * z - x, y, z)
    if index == 1:
        return MarkoffTriple(x, x * z - y, z)
    if index == 2:
        return MarkoffTriple(x, y, x * y - z)
    raise ValueError(f"bad flip index {index!r}")


@dataclass
class MarkoffMap:
    root: TreeVertex
    seed: MarkoffTriple
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for slope, value in zip(self.root.regions, self.seed):
            self.cache.setdefault(slope, complex(value))

    @property
    def mu(self) -> complex:
        return self.seed.mu

    def copy(self) -> "MarkoffMap":
        return MarkoffMap(self.root, self.seed, dict(self.cache))

    def _combine(self, x: Slope, y: Slope, z: Slope, w: Slope) -> complex:
        c = self.cache
        value = c[x] * c[y] - c[z]
        if not (cmath.isfinite(value)):
            raise TraceOverflow(w)
        c[w] = value
        return value

    def trace(self, t: Slope) -> complex:
        """phi(t), walking from the root with ``w = x y - z`` at each step."""
        try:
            return self.cache[t]
        except KeyError:
            pass
        v = self.root
        while (flank := crossing_flank(v, t)) is not None:
            x, y = flank
            z = v.other(x, y)
            w = fourth_region_of(x, y, z)
            if w not in self.cache:
                self._combine(x, y, z, w)
            v = TreeVertex((x, y, w))
        return self.cache[t]

    def across(self, x: Slope, y: Slope, z: Slope) -> tuple[Slope, complex]:
        """Region and value beyond the edge flanked by ``x, y`` from end region ``z``.

        Shortcut for tree walks: when the far vertex lies farther from the root
        the value is exactly ``x y - z``, as the root walk would compute it.
        """
        w = fourth_region_of(x, y, z)
        if w in self.cache:
            return w, self.cache[w]
        v = TreeVertex((x, y, z))
        away = v == self.root or all(r in v for r in self.root.regions)
        if not away:
            r = next(r for r in self.root.regions if r not in v)
            away = set(crossing_flank(v, r)) != {x, y}
        if away and x in self.cache and y in self.cache and z in self.cache:
            return w, self._combine(x, y, z, w)
        return w, self.trace(w)

    def vertex_values(self, v: TreeVertex) -> tuple[complex, complex, complex]:
        return tuple(self.trace(x) for x in v.regions)

    def to_json(self) -> dict:
        return {
            "seed": [[v.real, v.imag] for v in self.seed],
            "mu": [self.mu.real, self.mu.imag],
            "root": [str(x) for x in self.root.regions],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MarkoffMap":
        regions = [Slope.parse(s) for s in data["root"]]
        values = [complex(*v) for v in data["seed"]]
        root = TreeVertex(tuple(regions))
        by_slope = dict(zip(regions, values))
        return cls(root, MarkoffTriple(*(by_slope[x] for x in root.regions)))


def from_seed(x: complex, y: complex, z: complex) -> MarkoffMap:
    """Map with ``phi(0/1), phi(1/0), phi(1/1) = x, y, z``."""
    # ROOT.regions sorts as (0/1, 1/0, 1/1)
    return MarkoffMap(ROOT, MarkoffTriple(complex(x), complex(y), complex(z)))


def seed_of(m: MarkoffMap) -> MarkoffTriple:
    """Values at (0/1, 1/0, 1/1)."""
    return MarkoffTriple(m.trace(Slope(0, 1)), m.trace(Slope(1, 0)), m.trace(Slope(1, 1)))


def peripheral_trace(m: MarkoffMap) -> complex:
    return m.mu - 2


def from_matrices(A, B) -> MarkoffMap:
    """Character of the representation ``a -> A, b -> B``."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    for name, M in (("A", A), ("B", B)):
        if abs(np.linalg.det(M) - 1) > 1e-12 * max(1.0, np.abs(M).max() ** 2):
            raise ValueError(f"{name} does not have determinant 1")
    return from_seed(np.trace(A), np.trace(B), np.trace(A @ B))


def commutator_trace(A, B) -> complex:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    return complex(np.trace(A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)))


def lift_to_matrices(x: complex, y: complex, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """A pair ``(A, B)`` in SL(2,C) with ``tr A = x``, ``tr B = y``, ``tr AB = z``.

    ``A = [[x, -1], [1, 0]]`` and ``B = [[p, 0], [r, y - p]]`` where ``p`` is
    the root of ``p^2 - y p + 1`` of larger modulus (ties: larger real part)
    and ``r = x p - z``.
    """
    x, y, z = complex(x), complex(y), complex(z)
    mu = markoff_mu(x, y, z)
    scale = max(1.0, abs(x), abs(y), abs(z)) ** 3
    if abs(mu - 4) <= 1e-12 * scale:
        raise ReducibleCharacter(f"mu = {mu} is the reducible locus")
    disc = cmath.sqrt(y * y - 4)
    roots = sorted([(y + disc) / 2, (y - disc) / 2], key=lambda p: (abs(p), p.real), reverse=True)
    p = roots[0]
    A = np.array([[x, -1], [1, 0]], dtype=complex)
    B = np.array([[p, 0], [x * p - z, y - p]], dtype=complex)
    return A, B


def parse_complex(text: str) -> complex:
    """Parse ``re``, ``re+imi`` or ``imi`` (``i`` or ``j``)."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if not t:
        raise ValueError("empty complex literal")
    return complex(t)


def parse_seed(text: str) -> MarkoffTriple:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"seed needs three comma-separated values, got {text!r}")
    return MarkoffTriple(*(parse_complex(p) for p in parts))


def dumps(m: MarkoffMap) -> str:
    return json.dumps(m.to_json(), sort_keys=True)


__all__ = [
    "ESCAPE_MAGNITUDE", "MarkoffMap", "MarkoffTriple", "ReducibleCharacter", "TraceOverflow",
    "commutator_trace", "from_matrices", "from_seed", "lift_to_matrices", "markoff_mu",
    "normalize", "parse_complex", "parse_seed", "peripheral_trace", "seed_of", "vieta_flip",
]
