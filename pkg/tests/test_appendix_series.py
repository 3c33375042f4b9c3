import cmath
from fractions import Fraction

import numpy as np
import pytest

from markoff_mcshane.appendix_series import (GeometricPair, fan_product, neighbor_parameters,
                                             one_sided_closed, partial_sum_oracle, property_suite,
                                             random_pair, reflected, telescoped_partial,
                                             two_sided_closed, vertex_fan_sum,
                                             vertex_fan_sum_via_pairs)
from markoff_mcshane.farey import normalize
from markoff_mcshane.identities import z_branch
from markoff_mcshane.markoff import from_seed

HAND = GeometricPair(2, 1, 1)


def test_pair_validation():
    with pytest.raises(ValueError):
        GeometricPair(1, 1, 1)
    with pytest.raises(ValueError):
        GeometricPair(0.5j, 1, 1)
    with pytest.raises(ValueError):
        GeometricPair(2, 1, 0)


def test_hand_case_exact():
    # exact rational partial sums: y_n = 2^n + 2^-n
    def y(n):
        return Fraction(2) ** n + Fraction(2) ** -n

    one = sum(1 / (y(n) * y(n + 1)) for n in range(60))
    assert abs(float(one) - 1 / 3) < 1e-15
    assert abs(one_sided_closed(HAND) - 1 / 3) < 1e-14
    assert abs(two_sided_closed(HAND) - 2 / 3) < 1e-14
    assert partial_sum_oracle(HAND, 0, 0) == pytest.approx(0.2, abs=1e-16)


def test_one_sided_pole():
    with pytest.raises(ZeroDivisionError):
        one_sided_closed(GeometricPair(2, 1, -1))


def test_oracle_range_and_zero():
    with pytest.raises(ValueError):
        partial_sum_oracle(HAND, 3, 2)
    with pytest.raises(ZeroDivisionError, match="y_0"):
        partial_sum_oracle(GeometricPair(2, 1, -1), -2, 2)


def test_random_pairs_match_oracle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        g = random_pair(rng)
        if abs(g.A + g.B) < 1e-6:
            continue
        assert abs(one_sided_closed(g) - partial_sum_oracle(g, 0, 199)) < 1e-12 * max(1, abs(one_sided_closed(g)))
        assert abs(two_sided_closed(g) - partial_sum_oracle(g, -200, 199)) < 1e-12 * max(1, abs(two_sided_closed(g)))


def test_reflection_identity():
    rng = np.random.default_rng(6)
    for _ in range(50):
        g = random_pair(rng)
        lhs = two_sided_closed(g) - one_sided_closed(g) - one_sided_closed(reflected(g))
        assert abs(lhs) < 1e-14 * max(1, abs(two_sided_closed(g)))


def test_equal_coefficients():
    g = GeometricPair(3 + 1j, 0.5 - 2j, 0.5 - 2j)
    assert abs(two_sided_closed(g) - 1 / (g.A ** 2 * (g.lam - 1 / g.lam))) < 1e-15


def test_tail_decay():
    g = GeometricPair(1.7 * cmath.exp(0.4j), 0.8 + 0.3j, -1.1j)
    full = partial_sum_oracle(g, 0, 400)
    for N in (10, 20):
        tail = abs(full - partial_sum_oracle(g, 0, N - 1))
        assert tail <= 10 * abs(g.lam) ** (-2 * N)


def test_telescoped_form():
    g = GeometricPair(2.5 - 0.5j, 1.2 + 0.1j, 0.3 - 0.7j)
    for n in (0, 1, 5, 30):
        assert abs(telescoped_partial(g, n) - partial_sum_oracle(g, 0, n)) < 1e-13


def test_neighbor_parameters_modular_torus():
    g = neighbor_parameters(3, 3, 6)
    assert abs(g.lam - (3 + 5 ** 0.5) / 2) < 1e-15
    assert abs(g.A * g.B - 9 / 5) < 1e-12
    assert abs(g.A * g.B - fan_product(g, 3, 0)) < 1e-12
    assert abs(g.y(0) - 3) < 1e-12 and abs(g.y(1) - 6) < 1e-12
    for n in range(1, 8):
        assert abs(g.y(n + 1) - (3 * g.y(n) - g.y(n - 1))) < 1e-9


def test_neighbor_parameters_rejects_segment():
    with pytest.raises(ValueError):
        neighbor_parameters(1.5, 3, 4)


def test_fan_round_trip_against_traces():
    # the fan around 0/1 is the slopes 1/n (the curves a^n b); y_n = phi(1/n)
    mu = 0.2 + 0.1j
    x, y = 3.1, 2.9 + 0.05j
    m = from_seed(x, y, z_branch(x, y, mu))
    g = neighbor_parameters(m.trace(normalize(0, 1)), m.trace(normalize(1, 0)), m.trace(normalize(1, 1)), mu)
    assert abs(g.A * g.B - fan_product(g, x, mu)) < 1e-10
    lam = g.lam
    assert abs((lam - 1 / lam) - x * cmath.sqrt(1 - 4 / x ** 2)) < 1e-12
    for n in range(-10, 11):
        assert abs(g.y(n) - m.trace(normalize(1, n))) < 1e-10 * max(1, abs(g.y(n)))


def test_vertex_fan_sum():
    assert vertex_fan_sum(3, neighbor_parameters(3, 3, 6), 0) == 0
    mu = 0.2 + 0.1j
    x, y = 3.1, 2.9 + 0.05j
    m = from_seed(x, y, z_branch(x, y, mu))
    g = neighbor_parameters(x, m.trace(normalize(1, 0)), m.trace(normalize(1, 1)))
    closed = vertex_fan_sum(x, g, mu)
    assert abs(closed - vertex_fan_sum_via_pairs(x, g, mu)) < 1e-12
    # direct sum of mu / (x y_n y_{n+1}) over the vertices around the region 0/1
    direct = sum(mu / (x * m.trace(normalize(1, n)) * m.trace(normalize(1, n + 1))) for n in range(-30, 30))
    assert abs(direct - closed) < 1e-10


def test_property_suite_report():
    r = property_suite(trials=20, rng_seed=3)
    assert r["pass"] and r["trials"] == 20 and len(r["rows"]) == 20
    assert property_suite(trials=20, rng_seed=3) == r
    assert len(property_suite(trials=1)["rows"]) == 1
    with pytest.raises(ValueError):
        property_suite(trials=0)
