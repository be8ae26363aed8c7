from fractions import Fraction

import numpy as np
import pytest

from bianchi_heights import local
from bianchi_heights.errors import UnsaturatedBallError
from bianchi_heights.group import (bianchi_spec, enumerate_ball, parabolic_spec, solve_top_row,
                                   unimodular_rows_mod)
from bianchi_heights.ring import RingElt


def test_w_p_examples():
    assert local.w_p_count(1, 3, 1, 0, 0) == 24
    assert local.w_p_count(1, 3, 0, 2, 1) == 33
    for n in range(5):
        for x in range(5):
            for y in range(5):
                assert local.w_p_count(2, 5, n, x, y) == local.w_p_closed_form(5, n)


def test_v_p_examples():
    assert local.v_p_count(1, 3) == 80
    assert local.v_p_count(2, 3) == 64
    assert local.v_p_count(1, 7) == 2400
    with pytest.raises(ValueError):
        local.v_p_count(3, 3)


def test_tau_examples():
    assert local.tau_p(1, 3, 1) == Fraction(3, 10)
    # split prime dividing n: the enumeration gives 1/(p+1)
    assert local.tau_p(1, 5, 5) == Fraction(1, 6)
    assert local.tau_p_printed(1, 5, 5) == Fraction(2, 17)
    for n in range(7):
        assert local.tau_p(2, 7, n) == local.tau_p_closed_form(2, 7, n)


def test_tau_independent_of_xy():
    for x in range(5):
        for y in range(5):
            assert local.tau_p(1, 5, 2, x, y) == local.tau_p(1, 5, 2)


def test_local_density_record():
    d = local.local_density(1, 5, 7)
    assert d.up == 5 * d.tau - 1 and d.n == 2
    with pytest.raises(ValueError):
        local.LocalDensity(5, 0, Fraction(1, 2), Fraction(0))


def test_u_q_examples():
    assert local.u_q(1, 3, 1).value == Fraction(-1, 10)
    assert local.u_q(1, 1, 123).value == 1
    assert local.u_q(1, 5, 5).value > 0 or local.u_q(2, 5, 5).value > 0


@pytest.mark.parametrize("D,p", [(1, 3), (1, 5), (1, 13), (2, 5), (2, 11), (7, 13)])
def test_u_p_size(D, p):
    for n in range(p):
        u = abs(local.u_q(D, p, n).value)
        assert u <= (Fraction(3, p) if n % p == 0 else Fraction(3, p * p))


def test_u_q_multiplicative_for_full_group():
    # direct enumeration mod 15 against the product of the prime factors
    from bianchi_heights.local import _u_q_measure, residue_measure
    direct = _u_q_measure(residue_measure(1, 15), 1, 7, 1, 2)
    assert direct == local.u_q(1, 15, 7, 1, 2).value


def test_u_q_on_ball(ball_d1):
    r = local.u_q(ball_d1, 3, 1)
    assert r.surjective and r.value == Fraction(-1, 10)
    r9 = local.u_q(ball_d1, 9, 1)
    assert not r9.surjective and r9.image is not None and r9.index == len(r9.image)


def test_singular_series_q0_one():
    assert local.singular_series(1, 1000, 0, 0, 1) == 1.0


def test_singular_series_non_admissible_is_small():
    # n = 0 mod 4 is not a height of SL2(Z[i])
    assert abs(local.singular_series(1, 1004, 1, 2, 12)) < 0.01
    assert local.singular_series(1, 1003, 1, 2, 12) > 0


@pytest.mark.parametrize("D,p", [(1, 3), (1, 5), (2, 3), (2, 5)])
def test_lifting_probability(D, p):
    for n in range(p):
        assert local.lifting_probabilities(D, p, 2, n) == {Fraction(1, p)}


def test_lifting_probability_on_group_elements():
    # explicit SL2(Z[i]/9): each residue mod 3 has 3^6 lifts, a third of which keep Q = n mod 9
    D, p, n, x, y = 1, 3, 2, 1, 1
    rows = unimodular_rows_mod(D, 9)
    tops = np.array([sum(solve_top_row(RingElt(*r[:2]), RingElt(*r[2:]), D, 9), ()) for r in rows.tolist()])
    t = np.indices((9, 9)).reshape(2, -1).T
    # a = a0 + t c, b = b0 + t d (mod 9) for t in Z[i]/9
    c1, c2, d1, d2 = (rows[:, k][:, None] for k in range(4))
    t1, t2 = t[:, 0][None, :], t[:, 1][None, :]
    a1 = (tops[:, 0][:, None] + t1 * c1 - D * t2 * c2) % 9
    a2 = (tops[:, 1][:, None] + t1 * c2 + t2 * c1) % 9
    b1 = (tops[:, 2][:, None] + t1 * d1 - D * t2 * d2) % 9
    b2 = (tops[:, 3][:, None] + t1 * d2 + t2 * d1) % 9
    shape = a1.shape
    G = np.stack([a1, a2, b1, b2] + [np.broadcast_to(v % 9, shape) for v in (c1, c2, d1, d2)], -1).reshape(-1, 8)
    assert len(G) == 524880
    Q = local._form_value(G[:, 4:], D, x, y)
    keep3 = (Q - n) % 3 == 0
    base = G[keep3] % 3
    hit = ((Q[keep3] - n) % 9 == 0)
    keys = base @ (3 ** np.arange(8))
    tot = np.bincount(keys, minlength=3**8)
    good = np.bincount(keys, weights=hit, minlength=3**8)
    nz = tot > 0
    assert set(tot[nz].tolist()) == {729}
    assert set((good[nz] / tot[nz]).tolist()) == {1 / 3}


@pytest.fixture(scope="module")
def lattice_structure():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return local.admissible_structure(enumerate_ball(bianchi_spec(1), T=20))


def test_admissible_lattice(lattice_structure):
    st = lattice_structure
    assert st.L == 4 and st.admissible_classes == {1, 2, 3}
    assert st.per_prime_stabilization[2] == 2
    assert all(st.per_prime_stabilization[p] == 0 for p in (3, 5, 7, 11, 13))
    assert st.is_admissible(7) and not st.is_admissible(8) and not st.is_admissible(0)
    doc = st.to_json()
    assert doc["schema"] == 1 and doc["L"] == 4


def test_admissible_parabolic_never_stabilises():
    ball = enumerate_ball(parabolic_spec(1), T=20)
    with pytest.warns(UserWarning):
        st = local.admissible_structure(ball, prime_bound=7)
    assert all(s.k_p is None for s in st.per_prime.values())
    assert all(s.images[k] == 1 for s in st.per_prime.values() for k in range(1, 6))


def test_admissible_errors():
    with pytest.raises(ValueError):
        local.admissible_structure(enumerate_ball(bianchi_spec(1), T=1))
    with pytest.raises(UnsaturatedBallError):
        local.admissible_structure(enumerate_ball(bianchi_spec(1), T=8, word_len_cap=2))


def test_congruence_bound():
    rng = np.random.default_rng(3)
    for _ in range(100):
        A, B = (int(v) for v in rng.integers(2, 50, 2))
        ell = int(rng.integers(1, min(A, B) + 1))
        F, J, K = (int(v) for v in rng.integers(-50, 50, 3))
        assert local.congruence_solutions(F, J, K, ell, A, B) <= local.congruence_bound(F, J, ell, A, B)
    assert local.congruence_solutions(2, 2, 1, 2, 10, 10) == 0
    assert local.congruence_solutions(1, 0, 0, 5, 10, 3) == 6
