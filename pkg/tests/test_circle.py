from fractions import Fraction

import numpy as np
import pytest

from bianchi_heights.circle import (CircleDecomposition, circle_table, exceptional_set, l2_minor_experiment,
                                    major_exact, minor_residual, r_hat, tee, wedge, wedge_hat, write_csv)
from bianchi_heights.group import bianchi_spec, enumerate_ball, parabolic_spec
from bianchi_heights.local import LocalStructure
from bianchi_heights.params import CircleParams


def test_params():
    p = CircleParams(500, 20, 25)
    assert p.K0 == 1 and p.T == pytest.approx(20**0.5)
    with pytest.raises(ValueError):
        CircleParams(500, 20, 24)
    q = CircleParams.from_sigma(2**10)
    assert q.T2 * q.X2 == 2**10 and q.sigma == Fraction(1, 8)
    assert CircleParams(64, 4, 16, Q0=2).K0 == 8


def test_wedge():
    assert wedge(0) == 1 and wedge(1) == 0 and wedge(-1) == 0
    assert wedge(0.25) == 0.75
    assert wedge_hat(0) == 1 and wedge_hat(1) == pytest.approx(0, abs=1e-15)
    assert wedge_hat(0.5) == pytest.approx(4 / np.pi**2)


def test_tee():
    p = CircleParams(1024, 16, 64, Q0=3, K0=8)
    assert tee(0.0, p) == 1.0
    th = np.linspace(0, 1, 997)
    t = tee(th, p)
    assert (t >= 0).all() and (t <= p.Q0**2).all()
    assert np.allclose(tee(th + 1, p), t)
    assert tee(0.25, p) == 0.0  # far from 0, 1/3, 1/2, 2/3
    w = Fraction(p.K0, p.N)
    assert tee(float(Fraction(1, 2) + w / 2), p) == pytest.approx(0.5)


@pytest.fixture(scope="module")
def tiny():
    p = CircleParams(64, 4, 16, Q0=2)
    ball = enumerate_ball(bianchi_spec(1), T2=p.T2, filtered=True).subset(3)
    return CircleDecomposition(ball, p)


def test_r_hat(tiny):
    th = np.linspace(-1, 1, 401)
    v = tiny.r_hat(th)
    zero = tiny.r_hat([0.0])[0]
    assert zero.real == pytest.approx(tiny.weights.sum()) and abs(zero.imag) < 1e-9
    assert (np.abs(v) <= zero.real + 1e-9).all()
    assert np.allclose(tiny.r_hat(th + 1), v)


def test_major_q0_one_is_positive():
    p = CircleParams(64, 4, 16, Q0=1)
    ball = enumerate_ball(bianchi_spec(1), T2=p.T2, filtered=True)
    assert (major_exact(np.arange(50, 200), ball, p) > 0).all()


def test_quadrature_oracle(tiny):
    ns = np.arange(0, int(tiny.values.max()) + 5)
    q64 = tiny.quadrature(ns, 64)
    assert np.abs(q64 - tiny.quadrature(ns, 128)).max() < 1e-9
    assert np.abs(tiny.major(ns) - q64).max() < 1e-6
    assert np.abs(tiny.minor(ns) - tiny.quadrature(ns, 64, "minor")).max() < 1e-6
    assert np.abs(tiny.minor(ns)).max() > 1  # the minor arcs carry real mass here


def test_major_real(tiny):
    ns = np.arange(0, 300)
    c = tiny.major_complex(ns)
    assert np.abs(c.imag).max() < 1e-9
    assert np.allclose(c.real, tiny.major(ns))


def test_decomposition_identity(tiny):
    ns = np.arange(-20, 400)
    assert np.allclose(tiny.major(ns) + tiny.minor(ns), tiny.r_smooth(ns), atol=1e-12)


def test_empty_ball():
    p = CircleParams(64, 1, 64)
    ball = enumerate_ball(bianchi_spec(1), T2=p.T2, filtered=True)
    assert len(ball) == 0
    assert minor_residual(100, ball, p) == 0.0
    assert r_hat(0.3, ball, p)[0] == 0


def _all_admissible(D=1):
    return LocalStructure(D, set(), 1, {0}, {})


def test_exceptional_parabolic():
    p = CircleParams(100, 4, 25)
    ball = enumerate_ball(parabolic_spec(1), T2=p.T2)
    r = exceptional_set(ball, p, _all_admissible())
    assert r.exceptional == list(range(100, 201))
    assert r.ratio == 1.0


def test_exceptional_empty_admissible():
    p = CircleParams(100, 4, 25)
    ball = enumerate_ball(bianchi_spec(1), T2=p.T2)
    st = LocalStructure(1, set(), 1000, {999}, {})
    r = exceptional_set(ball, p, st)
    assert r.admissible_count == 0 and r.ratio is None
    assert r.to_json()["ratio"] is None


def test_l2_experiment_shape():
    rep = l2_minor_experiment(bianchi_spec(1), [2**8], delta=2.0)
    assert len(rep.rows) == 1 and rep.ratio_of_ratios == []
    rep = l2_minor_experiment(bianchi_spec(1), [2**8, 2**9], delta=2.0)
    assert len(rep.ratios) == 2 and len(rep.ratio_of_ratios) == 1
    assert all(np.isfinite(rep.ratios))


def test_circle_table_csv(tmp_path):
    p = CircleParams.from_sigma(256, Q0=2)
    ball = enumerate_ball(bianchi_spec(1), T2=p.T2, filtered=True)
    rows = circle_table(ball, p, None, np.arange(256, 300))
    write_csv(rows, tmp_path / "a.csv")
    write_csv(circle_table(ball, p, None, np.arange(256, 300)), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == "n,admissible,R_sharp,R_smooth,major,minor"
