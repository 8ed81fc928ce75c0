from fractions import Fraction
from math import comb, gcd

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from quotsing.hjcf import (NQ, catalan_bound, check_chain, hj_evaluate, hj_expand, mod_inverse, multiplicity,
                           normalize, reverse_chain, sn1_facts)


def _eval_fraction(chain):
    x = Fraction(chain[-1])
    for c in reversed(chain[:-1]):
        x = c - 1 / x
    return x


@pytest.mark.parametrize("n,q,chain", [(19, 7, (3, 4, 2)), (18, 5, (4, 3, 2)), (12, 7, (2, 4, 2)),
                                       (4, 1, (4,)), (3, 2, (2, 2)), (25, 14, (2, 5, 3))])
def test_known_expansions(n, q, chain):
    assert hj_expand(n, q) == chain
    assert hj_evaluate(chain) == NQ(n, q)


@given(st.lists(st.integers(2, 9), min_size=1, max_size=8))
def test_evaluate_matches_rational_recursion(chain):
    n, q = hj_evaluate(chain)
    assert Fraction(n, q) == _eval_fraction(chain)
    assert gcd(n, q) == 1 and 1 <= q < n


@given(st.integers(2, 3000), st.integers(1, 2999))
def test_round_trip_and_reversal(n, q):
    assume(q < n and gcd(n, q) == 1)
    chain = hj_expand(n, q)
    assert all(c >= 2 for c in chain)
    assert hj_evaluate(chain) == (n, q)
    q_inv, _ = mod_inverse(q, n) if n > 1 else (1, 0)
    assert hj_expand(n, q_inv) == reverse_chain(chain)


def test_mod_inverse_identity():
    for n in range(2, 60):
        for q in range(1, n):
            if gcd(n, q) == 1:
                qp, np_ = mod_inverse(q, n)
                assert q * qp == n * np_ + 1 and 1 <= qp < n


@pytest.mark.parametrize("n,q", [(0, 1), (3, 3), (4, 2), (3, 5)])
def test_expand_rejects_bad_input(n, q):
    with pytest.raises(ValueError):
        hj_expand(n, q)


def test_normalize_divides_gcd():
    assert normalize(8, 2) == NQ(4, 1)
    with pytest.raises(ValueError):
        normalize(2, 2)


@pytest.mark.parametrize("chain", [(), (1,), (3, 0), (2, -2)])
def test_check_chain_rejects(chain):
    with pytest.raises(ValueError):
        check_chain(chain)


def test_multiplicity_and_catalan():
    assert multiplicity((4,)) == 4
    assert multiplicity((2, 2, 2)) == 2
    assert [catalan_bound(m) for m in range(2, 8)] == [1, 1, 2, 5, 14, 42]
    for m in range(2, 12):
        assert catalan_bound(m) * (m - 1) == comb(2 * (m - 2), m - 2)


@pytest.mark.parametrize("n", range(3, 11))
def test_sn1_facts(n):
    assert tuple(sn1_facts(n)) == (2 * n - 4, n - 1, n - 3, 2)


def test_sn1_facts_range():
    with pytest.raises(ValueError):
        sn1_facts(2)
