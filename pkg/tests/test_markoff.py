import random
from collections import Counter

import numpy as np
import pytest

from markoff_mcshane.farey import ROOT, Slope, TreeVertex, circular_set, regions_within
from markoff_mcshane.markoff import (MarkoffMap, MarkoffTriple, ReducibleCharacter, TraceOverflow,
                                     commutator_trace, from_matrices, from_seed, lift_to_matrices,
                                     markoff_mu, parse_complex, parse_seed, peripheral_trace,
                                     seed_of, vieta_flip)

S = Slope.parse


def rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


@pytest.mark.parametrize("seed,mu", [((3, 3, 3), 0), ((2, 2, 2), 4), ((0, 0, 0), 0), ((1, 1, 1), 2)])
def test_mu(seed, mu):
    assert from_seed(*seed).mu == mu


def test_trace_examples():
    m = from_seed(3, 3, 3)
    assert m.trace(S("0/1")) == 3 and m.trace(S("1/0")) == 3 and m.trace(S("1/1")) == 3
    assert m.trace(S("-1/1")) == 6
    assert m.trace(S("2/1")) == 6
    assert m.trace(S("-2/1")) == 15


def test_root_values_exact():
    seed = (1.5 + 0.25j, -2 + 1j, 0.125j)
    m = from_seed(*seed)
    assert seed_of(m) == MarkoffTriple(*seed)


def _markoff_numbers_by_generation(n):
    """Independent oracle: Vieta moves on integer triples a^2+b^2+c^2 = 3abc from (1,1,1)."""
    def flip(t, i):
        t = list(t)
        a, b = [t[j] for j in range(3) if j != i]
        t[i] = 3 * a * b - t[i]
        return tuple(t)

    gens = [Counter([1, 1, 1])]
    frontier = [((1, 1, 1), i) for i in range(3)]  # (triple, index to flip)
    for _ in range(n):
        new, nxt = Counter(), []
        for t, i in frontier:
            u = flip(t, i)
            new[u[i]] += 1
            nxt += [(u, j) for j in range(3) if j != i]
        gens.append(new)
        frontier = nxt
    return gens


def test_modular_torus_traces_match_markoff_numbers():
    m = from_seed(3, 3, 3)
    gens = _markoff_numbers_by_generation(6)
    for n in range(1, 7):
        shell = regions_within(n) - regions_within(n - 1)
        got = Counter(int(round(m.trace(x).real / 3)) for x in shell)
        assert got == gens[n]
        assert all(m.trace(x).imag == 0 for x in shell)


def test_vieta_flip():
    t = MarkoffTriple(3, 3, 3)
    assert vieta_flip(t, "z") == MarkoffTriple(3, 3, 6)
    for i in range(3):
        assert vieta_flip(vieta_flip(t, i), i) == t
    u = MarkoffTriple(1, 1 + 2j, 0.5 - 0.25j)
    for i in "xyz":
        assert abs(vieta_flip(u, i).mu - u.mu) < 1e-12
    with pytest.raises(ValueError):
        vieta_flip(t, 3)


def test_random_flip_sequence_preserves_mu():
    # real traces in [-2, 2] with mu in [0, 4]: flips permute a compact level set, so values stay
    # bounded; generic seeds overflow within 100 flips (growth is doubly exponential on zigzags)
    rng = random.Random(7)
    t = MarkoffTriple(0.3, -1.1, 1.4)
    mu0 = t.mu
    assert 0 <= mu0.real <= 4
    for _ in range(100):
        t = vieta_flip(t, rng.randrange(3))
        assert all(abs(v) <= 2 + 1e-9 for v in t)
    assert rel(t.mu, mu0) < 1e-10


def vertex_residual(x, y, z, mu):
    """Vertex relation error relative to the size of its terms."""
    scale = max(1.0, abs(x * x), abs(y * y), abs(z * z), abs(x * y * z))
    return abs(x * x + y * y + z * z - x * y * z - mu) / scale


def test_peripheral_trace():
    assert peripheral_trace(from_seed(3, 3, 3)) == -2
    assert peripheral_trace(from_seed(2, 2, 2)) == 2
    m = from_seed(1, 1, 1)
    assert peripheral_trace(m) == m.mu - 2
    # a seed with mu = 1 + i
    x, y = 1.0, 2.0
    z = x * y / 2 + np.sqrt(complex((x * y / 2) ** 2 - x * x - y * y + 1 + 1j))
    assert abs(peripheral_trace(from_seed(x, y, z)) - (-1 + 1j)) < 1e-12


def test_local_relations_on_explored_cells():
    m = from_seed(2.5 + 0.3j, 2.2 - 0.1j, 1.7 + 0.6j)
    mu = m.mu
    for e in circular_set(6):
        x, y = e.flank
        xv, yv = m.trace(x), m.trace(y)
        zv, wv = m.trace(e.tail_region), m.trace(e.head_region)
        assert rel(xv * yv, zv + wv) < 1e-12
        for t in (e.tail_region, e.head_region):
            assert vertex_residual(xv, yv, m.trace(t), mu) < 1e-12


def test_path_independence():
    seed = (2.1 + 0.5j, 3 - 0.2j, 1 + 1j)
    a, b = from_seed(*seed), from_seed(*seed)
    targets = sorted(regions_within(7), key=lambda x: x.sort_key)
    for x in targets:
        a.trace(x)
    for x in reversed(targets):
        b.trace(x)
    assert all(a.trace(x) == b.trace(x) for x in targets)


def test_across_matches_trace():
    m = from_seed(2.1 + 0.5j, 3 - 0.2j, 1 + 1j)
    fresh = from_seed(*m.seed)
    for e in circular_set(5):
        w, v = m.across(*e.flank, e.head_region)
        assert w == e.tail_region
        assert v == fresh.trace(w)


def test_overflow_is_reported():
    m = from_seed(1e200, 1e200, 1)
    with pytest.raises(TraceOverflow) as info:
        m.trace(S("-1/1"))
    assert info.value.slope == S("-1/1")


def test_from_matrices():
    I = np.eye(2)
    m = from_matrices(I, I)
    assert seed_of(m) == MarkoffTriple(2, 2, 2) and m.mu == 4
    A = np.array([[1, 1], [0, 1]])
    B = np.array([[1, 0], [-1, 1]])
    m = from_matrices(A, B)
    assert seed_of(m) == MarkoffTriple(2, 2, 1)
    assert abs(commutator_trace(A, B) - peripheral_trace(m)) < 1e-12
    with pytest.raises(ValueError):
        from_matrices(np.diag([2, 1]), B)


def test_from_matrices_conjugation_invariant():
    rng = np.random.default_rng(3)
    A = np.array([[1.5 + 0.5j, 2], [0.25, 0]])
    A[1, 1] = (1 + A[0, 1] * A[1, 0]) / A[0, 0]  # det 1
    B = np.array([[2, 1j], [1j, 1]], dtype=complex)
    B /= np.sqrt(np.linalg.det(B))
    base = seed_of(from_matrices(A, B))
    for _ in range(5):
        P = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        Pi = np.linalg.inv(P)
        got = seed_of(from_matrices(P @ A @ Pi, P @ B @ Pi))
        assert all(abs(u - v) < 1e-10 for u, v in zip(got, base))


def test_trace_identity_inverse():
    A = np.array([[2, 1], [1, 1]], dtype=complex)
    B = np.array([[1, 1j], [0, 1]], dtype=complex)
    lhs = np.trace(A @ np.linalg.inv(B))
    assert abs(lhs - (np.trace(A) * np.trace(B) - np.trace(A @ B))) < 1e-12
    # the same relation is the edge relation at the root: phi(-1/1) = x y - z
    m = from_matrices(A, B)
    assert abs(m.trace(S("-1/1")) - lhs) < 1e-12


@pytest.mark.parametrize("seed", [(3, 3, 3), (1 + 1j, 2, 2 - 1j), (3.1, 2.9 + 0.05j, 0.2 + 0.1j), (0.5, -2, 7j)])
def test_lift_round_trip(seed):
    A, B = lift_to_matrices(*seed)
    assert abs(np.linalg.det(A) - 1) < 1e-12 and abs(np.linalg.det(B) - 1) < 1e-10
    got = seed_of(from_matrices(A, B))
    assert all(abs(u - v) < 1e-10 for u, v in zip(got, seed))


def test_lift_rejects_reducible():
    with pytest.raises(ReducibleCharacter):
        lift_to_matrices(2, 2, 2)


def test_json_round_trip():
    m = from_seed(1 + 2j, -0.5, 3j)
    back = MarkoffMap.from_json(m.to_json())
    assert back.seed == m.seed and back.root == ROOT


def test_parse():
    assert parse_complex("3") == 3
    assert parse_complex("2.9+0.05i") == 2.9 + 0.05j
    assert parse_complex("-1j") == -1j
    assert parse_seed("3, 3, 3") == MarkoffTriple(3, 3, 3)
    with pytest.raises(ValueError):
        parse_seed("1,2")
    with pytest.raises(ValueError):
        parse_complex("")


def test_markoff_mu_formula():
    assert markoff_mu(1, 2, 3) == 1 + 4 + 9 - 6
    v = TreeVertex.of(S("0/1"), S("1/0"), S("1/1"))
    assert v == ROOT
