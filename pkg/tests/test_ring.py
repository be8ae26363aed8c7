import pytest
from hypothesis import given, strategies as st

from bianchi_heights import ring
from bianchi_heights.ring import RingElt

small = st.integers(-10**6, 10**6)
elts = st.builds(RingElt, small, small)
Ds = st.sampled_from([1, 2, 3, 5, 7, 11])


@given(elts, elts, Ds)
def test_norm_is_multiplicative(x, y, D):
    assert ring.norm(ring.mul(x, y, D), D) == ring.norm(x, D) * ring.norm(y, D)


@given(elts, elts, elts, Ds)
def test_ring_axioms(x, y, z, D):
    assert ring.mul(x, ring.add(y, z), D) == ring.add(ring.mul(x, y, D), ring.mul(x, z, D))
    assert ring.mul(x, y, D) == ring.mul(y, x, D)
    assert ring.sub(x, x) == ring.ZERO


@given(elts, Ds)
def test_conj_gives_norm(x, D):
    assert ring.mul(x, ring.conj(x), D) == RingElt(ring.norm(x, D), 0)


def test_mul_examples():
    assert ring.mul(RingElt(0, 1), RingElt(0, 1), 1) == RingElt(-1, 0)
    assert ring.mul(RingElt(1, 1), RingElt(1, -1), 2) == RingElt(3, 0)
    assert ring.norm(RingElt(2, 1), 1) == 5


def test_overflow_is_checked():
    big = RingElt(2**100, 0)
    with pytest.raises(ring.ArithmeticOverflowError):
        ring.mul(big, big, 1)


def test_ring_mod_and_divides():
    assert ring.ring_mod(RingElt(-1, 7), 3) == RingElt(2, 1)
    assert ring.divides(3, RingElt(6, -9))
    assert not ring.divides(3, RingElt(6, 1))
    with pytest.raises(ValueError):
        ring.ring_mod(RingElt(1, 1), 0)


def test_squarefree():
    assert [d for d in range(1, 13) if ring.is_squarefree(d)] == [1, 2, 3, 5, 6, 7, 10, 11]
