from math import gcd

import pytest
from hypothesis import given, strategies as st

from quotsing.dihedral import cover_chain, double_cover_params, inverse_params
from quotsing.hjcf import hj_expand


def test_cover_example():
    # [3] = 3/1: q' = 1, n' = 0
    p = double_cover_params(3, 1)
    assert (p.N, p.Q, p.n_prime, p.q_prime) == (4, 1, 0, 1)
    assert cover_chain(3, 1) == (4,) == hj_expand(4, 1)


def test_cover_with_tail():
    # [3, 4] = 11/4, cover chain is 4 - 4 - 4
    p = double_cover_params(11, 4)
    assert (p.N, p.Q) == (56, 15)
    assert cover_chain(11, 4) == (4, 4, 4) == hj_expand(56, 15)
    assert p.q * p.q_prime == p.n * p.n_prime + 1


def test_round_trip_exhaustive():
    for n in range(2, 51):
        for q in range(1, n):
            if gcd(n, q) != 1:
                continue
            p = double_cover_params(n, q)
            assert p.N % 2 == 0 and (p.Q * p.Q - 1) % p.N == 0
            assert inverse_params(p.N, p.Q) == (n, q)
            assert cover_chain(n, q) == hj_expand(p.N, p.Q)


@given(st.integers(2, 10**6).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))))
def test_round_trip_large(nq):
    n, q = nq
    if gcd(n, q) != 1:
        return
    p = double_cover_params(n, q)
    assert inverse_params(p.N, p.Q) == (n, q)


@pytest.mark.parametrize("n,q", [(4, 2), (3, 3), (1, 1), (5, 0)])
def test_bad_parameters(n, q):
    with pytest.raises(ValueError):
        double_cover_params(n, q)
    with pytest.raises(ValueError):
        cover_chain(n, q)


@pytest.mark.parametrize("N,Q", [(5, 1), (8, 3), (16, 7), (24, 11), (4, 0), (10, 7)])
def test_inverse_rejects(N, Q):
    with pytest.raises(ValueError):
        inverse_params(N, Q)


def test_inverse_partition():
    valid = bad = 0
    for N in range(2, 201, 2):
        for Q in range(1, N):
            if (Q * Q - 1) % N:
                continue
            try:
                n, q = inverse_params(N, Q)
            except ValueError:
                bad += 1
                continue
            valid += 1
            assert (double_cover_params(n, q).N, double_cover_params(n, q).Q) == (N, Q)
    assert valid > 0 and bad > 0


def test_json():
    assert double_cover_params(11, 4).to_json() == {"n": 11, "q": 4, "N": 56, "Q": 15, "n_prime": 1, "q_prime": 3}
