import numpy as np
import pytest
from hypothesis import given, strategies as st

from bianchi_heights.group import IDENTITY, GroupMat, bianchi_spec, enumerate_ball, mat_mul, unipotent
from bianchi_heights.params import CircleParams
from bianchi_heights.qform import (
    QuadForm, form_invariants_hold, height, is_unimodular_row, psi, qform_array, qform_of,
    rep_count, rep_histogram, represented_set, window)
from bianchi_heights.ring import RingElt


def test_height_examples():
    assert height(IDENTITY, 1) == 1
    S = GroupMat.from_entries((0, 0, -1, 0, 1, 0, 0, 0))
    assert height(S, 1) == 1
    assert height(GroupMat.from_entries((2, 0, 1, 0, 1, 0, 1, 0)), 1) == 2


def test_identity_form():
    assert qform_of(IDENTITY, 1) == QuadForm(0, 0, 0, 0, 1)


def test_form_invariants_on_ball(ball_d1, ball_d2):
    for ball in (ball_d1, ball_d2):
        for g in ball.elements[::37]:
            f = qform_of(g, ball.D)
            assert form_invariants_hold(f, ball.D)
            assert f.B == ball.D * f.A


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_form_is_height_of_translate(x, y):
    # Q_g(x, y) = H(g * u(x + y w))
    g = GroupMat.from_entries((2, 1, 1, 1, 1, 1, 1, 0))  # det (2+i)(1) - (1+i)(1+i) = 1
    for D in (1,):
        assert qform_of(g, D)(x, y) == height(mat_mul(g, unipotent(x, y), D), D)


def test_qform_array_matches(ball_d2):
    arr = qform_array(ball_d2.entries, 2)
    for row, g in list(zip(arr, ball_d2.elements))[::101]:
        assert tuple(int(v) for v in row) == tuple(qform_of(g, 2))


def test_psi_shape():
    assert psi(1.5) == 1.0
    assert psi(0.5) == 0.0 and psi(2.5) == 0.0
    assert psi(0.75) == pytest.approx(0.5)
    xs = np.linspace(0, 3, 301)
    v = psi(xs)
    assert (v >= 0).all() and (v <= 1).all()


def test_sharp_window_is_exact():
    p = CircleParams(500, 125, 4)
    xs, w = window(p, "sharp")
    assert xs.tolist() == [2, 3, 4]
    p = CircleParams(500, 20, 25)
    assert window(p, "sharp")[0].tolist() == [5, 6, 7, 8, 9, 10]


def test_rep_count_matches_brute_force():
    p = CircleParams(64, 4, 16)
    ball = enumerate_ball(bianchi_spec(1), T2=p.T2, filtered=True)
    hist = rep_histogram(ball, p, "sharp")
    xs = range(4, 9)
    for n in (65, 80, 97, 100, 128):
        brute = sum(qform_of(g, 1)(x, y) == n for g in ball for x in xs for y in xs)
        assert hist(n) == brute == rep_count(ball, n, p)


def test_unimodular_row():
    assert is_unimodular_row(RingElt(1, 0), RingElt(0, 0), 1)
    assert not is_unimodular_row(RingElt(1, 1), RingElt(2, 0), 1)  # both in (1 + i)
    assert is_unimodular_row(RingElt(2, 1), RingElt(3, 0), 1)


def test_represented_set_d1_misses_multiples_of_four():
    rep = represented_set(1, 2000)
    assert len(rep) == 1500
    assert set(range(1, 2001)) - rep == set(range(4, 2001, 4))


def test_represented_set_small_cases():
    assert represented_set(1, 0) == set()
    assert represented_set(2, 30) >= {1, 2, 3}
    # ball heights always lie in the represented set
    ball = enumerate_ball(bianchi_spec(2), T=5)
    rep = represented_set(2, 25)
    assert {height(g, 2) for g in ball} <= rep
