import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bianchi_heights.errors import CostGuardError, SpecError, UnsaturatedBallError
from bianchi_heights.group import (
    IDENTITY, GroupMat, bianchi_spec, ball_count, ball_image_mod, bottom_row_multiplicity,
    brute_force_sl2_mod, check_closure, delta_from_counts, det, enumerate_ball, estimate_delta,
    fixture_path, format_spec, frob_norm_sq, full_residue_group, is_surjective_mod, load_spec, mat_inv,
    mat_mul, parabolic_spec, parse_spec, solve_top_row, unimodular_rows_mod)
from bianchi_heights.ring import ONE, RingElt


def test_identity_and_generators():
    spec = bianchi_spec(1)
    assert len(spec.generators) == 6  # three generators and their inverses (S^-1 = -S)
    for g in spec.generators:
        assert det(g, 1) == ONE
        assert mat_mul(g, mat_inv(g), 1) == IDENTITY


def test_parse_roundtrip_and_errors():
    spec = load_spec(fixture_path("bianchi_d1.txt"))
    assert spec.D == 1
    assert parse_spec(format_spec(spec)).generators == spec.generators
    with pytest.raises(SpecError):
        parse_spec("D 1\n1 2 3\n")
    with pytest.raises(SpecError):
        parse_spec("D 4\n1 0 1 0 0 0 1 0\n")  # not squarefree
    with pytest.raises(SpecError):
        parse_spec("D 1\n2 0 0 0 0 0 1 0\n")  # det 2
    with pytest.raises(SpecError):
        parse_spec("1 0 1 0 0 0 1 0\n")


def test_ball_examples():
    spec = bianchi_spec(1)
    assert len(enumerate_ball(spec, T=1)) == 0
    b = enumerate_ball(spec, T=2)
    assert IDENTITY in b.elements  # ||I||^2 = 2 < 4
    assert all(frob_norm_sq(g, 1) < 4 for g in b)
    assert b.saturated


def test_ball_counts_regression():
    assert ball_count(bianchi_spec(1), 4)[0] == 2536
    assert ball_count(bianchi_spec(1), 8)[0] == 42248


def test_parabolic_ball_is_a_segment():
    # [[1, n], [0, 1]] has norm^2 2 + n^2
    b = enumerate_ball(parabolic_spec(1), T=5)
    assert len(b) == 9  # |n| <= 4


def test_ball_is_closed_and_canonical(ball_d1):
    assert check_closure(ball_d1, sample=200, seed=1) == []
    assert len(ball_d1.key_set()) == len(ball_d1)
    again = enumerate_ball(bianchi_spec(1), T=6)
    assert np.array_equal(again.entries, ball_d1.entries)


def test_filter_keeps_large_A(ball_d1):
    f = ball_d1.filter(10)
    A = f.entries[:, 4] ** 2 + f.entries[:, 5] ** 2
    assert len(f) < len(ball_d1)
    assert (A * 10 >= 36).all()
    assert bottom_row_multiplicity(f) >= 1


def test_word_cap_marks_unsaturated():
    b = enumerate_ball(bianchi_spec(1), T=8, word_len_cap=2)
    assert not b.saturated
    with pytest.raises(UnsaturatedBallError):
        estimate_delta(bianchi_spec(1), [2, 4, 8], word_len_cap=2)


def test_delta_from_counts():
    est = delta_from_counts([1, 2, 4, 8], [3, 48, 768, 12288])
    assert est.delta == pytest.approx(2.0)
    with pytest.raises(ValueError):
        delta_from_counts([1, 2, 4], [1, 0, 3])


def test_huge_radius_is_guarded():
    with pytest.raises(CostGuardError):
        enumerate_ball(bianchi_spec(1), T=10**6)


@pytest.mark.parametrize("D,q,order", [(1, 2, 48), (1, 3, 720), (2, 3, 576)])
def test_residue_group_orders(D, q, order):
    assert full_residue_group(D, q).order == order


def test_residue_group_against_brute_force():
    brute = brute_force_sl2_mod(1, 2)
    G = full_residue_group(1, 2)
    listed = {g.entries for g in G}
    assert len(listed) == G.order == len(brute)
    assert listed == {tuple(r) for r in brute.tolist()}


def test_residue_group_elements_have_det_one():
    for g in full_residue_group(2, 3):
        d = det(g, 2)
        assert (d.re % 3, d.im % 3) == (1, 0)


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
@settings(max_examples=200)
def test_solve_top_row_exact(c1, c2, d1, d2):
    c, d = RingElt(c1, c2), RingElt(d1, d2)
    from bianchi_heights.group import unimodular_gcd
    if int(unimodular_gcd(c1, c2, d1, d2, 1)) != 1:
        with pytest.raises(ValueError):
            solve_top_row(c, d, 1)
        return
    a, b = solve_top_row(c, d, 1)
    assert det(GroupMat(a, b, c, d), 1) == ONE


def test_unimodular_rows_counts():
    # p^4 - 1 rows for an inert prime, (p^2 - 1)^2 for a split one
    assert len(unimodular_rows_mod(1, 3)) == 80
    assert len(unimodular_rows_mod(1, 5)) == 576
    with pytest.raises(CostGuardError):
        unimodular_rows_mod(1, 13**3 + 1)


def test_ball_surjects_mod_small_primes(ball_d1):
    assert is_surjective_mod(ball_d1, 2)
    assert is_surjective_mod(ball_d1, 3)
    assert len(ball_image_mod(ball_d1, 3)) == 720
