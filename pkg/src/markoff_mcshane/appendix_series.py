"""Sums of ``1/(y_n y_{n+1})`` over ``y_n = A lam^n + B lam^-n`` and the vertex fan.

Each closed form has a direct partial-sum counterpart so the two can be
compared independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._branch import sqrt_principal


@dataclass(frozen=True)
class GeometricPair:
    lam: complex
    A: complex
    B: complex

    def __post_init__(self):
        if abs(self.lam) <= 1:
            raise ValueError(f"|lambda| = {abs(self.lam)} must exceed 1")
        if self.A == 0 or self.B == 0:
            raise ValueError("A and B must be nonzero")

    def y(self, n: int) -> complex:
        return self.A * self.lam ** n + self.B * self.lam ** (-n)


def _gap(lam: complex) -> complex:
    return lam - 1 / lam


def one_sided_closed(g: GeometricPair) -> complex:
    """Closed form of ``sum_{n >= 0} 1/(y_n y_{n+1})``."""
    if g.A + g.B == 0:
        raise ZeroDivisionError("A + B = 0 makes y_0 vanish")
    return 1 / (g.A * (g.A + g.B) * _gap(g.lam))


def two_sided_closed(g: GeometricPair) -> complex:
    """Closed form of ``sum_{n in Z} 1/(y_n y_{n+1})``."""
    return 1 / (g.A * g.B * _gap(g.lam))


def reflected(g: GeometricPair) -> GeometricPair:
    """Swap A and B: the sequence read backwards, ``y_{-n}``."""
    return GeometricPair(g.lam, g.B, g.A)


def partial_sum_oracle(g: GeometricPair, n_min: int, n_max: int) -> complex:
    """Direct sum of ``1/(y_n y_{n+1})`` for ``n_min <= n <= n_max``."""
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    n = np.arange(n_min, n_max + 2)
    with np.errstate(over="ignore"):
        y = g.A * g.lam ** n.astype(float) + g.B * g.lam ** (-n.astype(float))
    zero = np.flatnonzero(y == 0)
    if zero.size:
        raise ZeroDivisionError(f"y_{int(n[zero[0]])} vanishes")
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        inv = 1 / y
        inv[~np.isfinite(y)] = 0
        terms = inv[:-1] * inv[1:]
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def telescoped_partial(g: GeometricPair, n_max: int) -> complex:
    """Partial sums through the telescoping rewrite of the one-sided series."""
    A, B, lam = g.A, g.B, g.lam
    head = 1 / (A * _gap(lam))
    total = sum(1 / (A * lam ** (2 * n) + B) - 1 / (A * lam ** (2 * n + 2) + B) for n in range(n_max + 1))
    return head * total


def neighbor_parameters(x: complex, y0: complex, y1: complex, mu: complex | None = None) -> GeometricPair:
    """Fit ``y_n = A lam^n + B lam^-n`` to consecutive fan traces around a region of trace ``x``.

    ``lam + 1/lam = x`` with ``|lam| > 1``; ``mu`` is accepted for symmetry with
    the fan sum and is not needed for the fit.
    """
    x = complex(x)
    if x.imag == 0 and -2 <= x.real <= 2:
        raise ValueError(f"trace {x} lies on [-2, 2]; the fan is not geometric")
    lam = x / 2 * (1 + sqrt_principal(1 - 4 / (x * x)))
    if abs(lam) < 1:
        lam = 1 / lam
    A = (y1 - y0 / lam) / _gap(lam)
    B = y0 - A
    return GeometricPair(lam, A, B)


def fan_product(g: GeometricPair, x: complex, mu: complex) -> complex:
    """``A B`` predicted by the vertex relation."""
    return (x * x - mu) / (x * x - 4)


def vertex_fan_sum(x: complex, g: GeometricPair, mu: complex) -> complex:
    """Closed form of ``sum mu / (x y z)`` over the vertices around a region of trace ``x``."""
    x = complex(x)
    if x * x == mu:
        raise ZeroDivisionError("x^2 = mu is a pole of the fan sum")
    return mu / (x * x - mu) * sqrt_principal(1 - 4 / (x * x))


def vertex_fan_sum_via_pairs(x: complex, g: GeometricPair, mu: complex) -> complex:
    """Same sum as ``(mu / x)`` times the two-sided series of the fan."""
    return mu / x * two_sided_closed(g)


ORACLE_TERMS = 200
ZERO_GUARD = 1e-6


def random_pair(rng: np.random.Generator) -> GeometricPair:
    """|lam| in [1.1, 10], |A|, |B| in [0.1, 10] (log-uniform), uniform phases."""
    mod = [rng.uniform(1.1, 10), 10 ** rng.uniform(-1, 1), 10 ** rng.uniform(-1, 1)]
    lam, A, B = (r * complex(math.cos(t), math.sin(t))
                 for r, t in zip(mod, rng.uniform(0, 2 * math.pi, size=3)))
    return GeometricPair(lam, A, B)


def _deviation(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


def property_suite(trials: int = 1000, rng_seed: int = 0, tol: float = 1e-12) -> dict:
    """Closed forms against direct sums on seeded random pairs, plus the lam=2, A=B=1 case.

    Draws with some ``|y_n| < ZERO_GUARD`` inside the oracle window are redrawn.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(rng_seed)
    n = ORACLE_TERMS
    worst = {"one_sided": 0.0, "two_sided": 0.0, "reflection": 0.0}
    redrawn, rows = 0, []
    for _ in range(trials):
        while True:
            g = random_pair(rng)
            k = np.arange(-n, n + 1, dtype=float)
            with np.errstate(over="ignore"):
                ys = np.abs(g.A * g.lam ** k + g.B * g.lam ** (-k))
            if ys.min() >= ZERO_GUARD:
                break
            redrawn += 1
        one = one_sided_closed(g)
        two = two_sided_closed(g)
        dev = {"one_sided": _deviation(partial_sum_oracle(g, 0, n - 1), one),
               "two_sided": _deviation(partial_sum_oracle(g, -n, n - 1), two),
               "reflection": _deviation(one + one_sided_closed(reflected(g)), two)}
        for k, v in dev.items():
            worst[k] = max(worst[k], v)
        rows.append({"lam": [g.lam.real, g.lam.imag], "A": [g.A.real, g.A.imag],
                     "B": [g.B.real, g.B.imag], **dev, "pass": all(v < tol for v in dev.values())})
    hand = GeometricPair(2, 1, 1)
    hand_one, hand_two = one_sided_closed(hand), two_sided_closed(hand)
    hand_ok = abs(hand_one - 1 / 3) < 1e-14 and abs(hand_two - 2 / 3) < 1e-14
    return {
        "trials": trials,
        "rng_seed": rng_seed,
        "oracle_terms": n,
        "tolerance": tol,
        "redrawn": redrawn,
        "max_deviation": worst,
        "rows": rows,
        "hand_case": {"one_sided": [hand_one.real, hand_one.imag],
                      "two_sided": [hand_two.real, hand_two.imag], "pass": hand_ok},
        "pass": hand_ok and all(v < tol for v in worst.values()),
    }
