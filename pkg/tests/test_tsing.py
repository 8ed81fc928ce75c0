from math import gcd

import pytest

from helpers import chains_up_to, t_params_by_divisors
from quotsing.hjcf import hj_evaluate
from quotsing.notation import Cyclic, DuValA, DuValD, T
from quotsing.tsing import (NotKSBSmoothable, arithmetic_params, blow_down_chain, is_t_or_du_val, ksb_local_dim,
                            m_chain, peel, refine, t_chain, t_generate, t_recognize)


@pytest.mark.parametrize("chain,params", [((4,), (1, 2, 1)), ((3, 3), (2, 2, 1)), ((2, 5, 3), (1, 5, 3)),
                                          ((2, 5), (1, 3, 2)), ((5, 2), (1, 3, 1)), ((3, 2, 3), (3, 2, 1)),
                                          ((4, 3, 2), (2, 3, 1))])
def test_known_t_chains(chain, params):
    assert t_recognize(chain) == params


@pytest.mark.parametrize("chain", [(2,), (2, 2, 2), (3,), (5,), (3, 4), (2, 4, 2)])
def test_non_t_chains(chain):
    assert t_recognize(chain) is None


def test_closed_form_matches_divisor_search():
    for chain in chains_up_to(16):
        assert arithmetic_params(chain) == t_params_by_divisors(chain)


def test_generate_small_budgets():
    assert t_generate(4) == [((4,), (1, 2, 1))]
    assert dict(t_generate(6)) == {(4,): (1, 2, 1), (3, 3): (2, 2, 1)}
    seven = dict(t_generate(7))
    assert seven == {(4,): (1, 2, 1), (3, 3): (2, 2, 1), (2, 5): (1, 3, 2), (5, 2): (1, 3, 1)}
    assert dict(t_generate(8))[(3, 2, 3)] == (3, 2, 1)


def test_generate_is_everything_recognised():
    budget = 16
    generated = {c for c, _ in t_generate(budget)}
    recognised = {c for c in chains_up_to(budget) if t_recognize(c) is not None}
    assert generated == recognised


def test_t_chain_evaluates_to_parameters():
    for r in range(1, 5):
        for n in range(2, 7):
            for a in range(1, n):
                if gcd(a, n) == 1:
                    assert hj_evaluate(t_chain(r, n, a)) == (r * n * n, a * r * n - 1)


def test_m_chain_shape():
    assert m_chain(1, 2, 1).self_ints == (-4,)
    assert m_chain(2, 2, 1).self_ints == (-4, -1, -4)
    assert m_chain(3, 2, 1).self_ints == (-4, -1, -4, -1, -4)


def test_m_chain_blows_down_to_t_chain():
    for r in range(1, 5):
        for n in range(2, 6):
            for a in range(1, n):
                if gcd(a, n) == 1:
                    entries = [-x for x in m_chain(r, n, a).self_ints]
                    assert blow_down_chain(entries) == t_chain(r, n, a)
                    box = t_chain(1, n, a)
                    assert entries[:len(box)] == list(box) and entries[-len(box):] == list(box)


def test_peel_and_du_val_are_disjoint():
    for chain in chains_up_to(14):
        if all(c == 2 for c in chain):
            assert peel(chain) is None


def test_refine_and_local_dim():
    assert refine(Cyclic(4, 1)) == T(1, 2, 1)
    assert refine(Cyclic(5, 2)) == Cyclic(5, 2)
    assert ksb_local_dim(T(1, 2, 1)) == 1
    assert ksb_local_dim(DuValA(5)) == 5
    assert ksb_local_dim(DuValD(4)) == 4
    with pytest.raises(NotKSBSmoothable):
        ksb_local_dim(Cyclic(5, 2))
    assert is_t_or_du_val(Cyclic(18, 5)) and not is_t_or_du_val(Cyclic(5, 2))
