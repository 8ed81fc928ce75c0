from fractions import Fraction as Q

import pytest

from helpers import chains_of_weight, chains_up_to, zero_cf_count
from quotsing.lattice import CurveConfig
from quotsing.modgen import (Modification, SearchCapExceeded, ample_q_modifications, base_discrepancies,
                             blow_up_node, dihedral_case, dihedral_from_chain_pmods, dihedral_p_modifications,
                             dihedral_p_modifications_direct, enumerate_blowup_trees, enumerate_q_modifications,
                             filter_p_modifications, is_m_modification, modifications_by_blowup_trees,
                             p_modifications, p_to_m, restricted_q_modifications)
from quotsing.notation import DuValA, DuValD, GraphKind, T, cyclic, dihedral


def _ints(cfg):
    return [-cfg.self_ints[c] for c in cfg.path_order()]


def _targets(mods):
    return sorted(m.describe() for m in mods)


# ---------------------------------------------------------------- blow-ups

def test_blow_up_node_examples():
    assert _ints(blow_up_node(CurveConfig.chain([3, 3]), (0, 1))) == [4, 1, 4]
    assert _ints(blow_up_node(CurveConfig.chain([2, 2]), (0, 1))) == [3, 1, 3]
    cfg = blow_up_node(CurveConfig.chain([3, 3]), (0, 1))
    left = next(e for e in cfg.edges if 0 in e)
    assert _ints(blow_up_node(cfg, left)) == [5, 1, 2, 4]


def test_blow_up_needs_an_edge():
    with pytest.raises(ValueError):
        blow_up_node(CurveConfig.chain([3, 3, 3]), (0, 2))


def test_blowup_tree_examples():
    assert [len(s.config) for s in enumerate_blowup_trees(cyclic((2, 2, 2)))] == [3]
    assert [len(s.config) for s in enumerate_blowup_trees(cyclic((4,)))] == [1]
    assert sorted(_ints(s.config) for s in enumerate_blowup_trees(cyclic((3, 3)))) == [[3, 3], [4, 1, 4]]


def test_blowup_trees_respect_the_discrepancy_bound():
    for chain in chains_up_to(8):
        for st in enumerate_blowup_trees(cyclic(chain)):
            assert all(a <= 0 for a in base_discrepancies(st.config))


def test_safety_cap():
    with pytest.raises(SearchCapExceeded):
        enumerate_blowup_trees(cyclic((3, 3, 3, 3)), safety_cap=3)
    with pytest.raises(SearchCapExceeded):
        enumerate_q_modifications(cyclic((3, 3, 3, 3)), safety_cap=3)


# ---------------------------------------------------------------- Q and P

def test_q_modification_examples():
    assert len(enumerate_q_modifications(cyclic((2,)))) == 2
    assert _targets(enumerate_q_modifications(cyclic((4,)))) == ["4", "[4/1]"]
    assert "[4/1] - 1 - [4/1]" in _targets(enumerate_q_modifications(cyclic((3, 3))))


def test_p_modification_examples():
    assert _targets(p_modifications(cyclic((4,)))) == ["4", "[4/1]"]
    assert _targets(p_modifications(cyclic((2, 2, 2)))) == ["[A_3]"]
    assert _targets(p_modifications(cyclic((3, 3)))) == ["3 - 3", "[8/3]"]
    assert _targets(p_modifications(cyclic((2, 5, 2)))) == ["2 - [9/2]", "[9/5] - 2", "[A_1] - 5 - [A_1]"]


def test_every_q_modification_is_valid():
    for chain in chains_up_to(9):
        for m in enumerate_q_modifications(cyclic(chain)):
            contracted = set(m.contracted)
            assert contracted.isdisjoint(m.kept)
            assert contracted | m.kept == set(range(len(m.config)))
            assert m.is_k_nef()
            # -K is an effective combination of curves over the base
            assert all(a <= 0 for a in base_discrepancies(m.config))


@pytest.mark.parametrize("mode", ["Q", "P"])
def test_search_matches_reference_on_chains(mode):
    for chain in chains_up_to(8):
        for bullets in (0, 2):
            g = cyclic(chain, bullets)
            fast = enumerate_q_modifications(g) if mode == "Q" else list(p_modifications(g))
            assert set(fast) == set(modifications_by_blowup_trees(g, mode)), chain


@pytest.mark.parametrize("mode", ["Q", "P"])
def test_search_matches_reference_on_forks(mode):
    for chain in chains_up_to(5):
        g = dihedral(chain)
        fast = enumerate_q_modifications(g) if mode == "Q" else list(p_modifications(g))
        assert set(fast) == set(modifications_by_blowup_trees(g, mode)), chain


def test_order_independence():
    for chain in [(3, 3), (4, 3, 2), (2, 5, 3), (3, 3, 3)]:
        g = cyclic(chain)
        assert set(modifications_by_blowup_trees(g, "Q")) == \
            set(modifications_by_blowup_trees(g, "Q", reverse_order=True))


def test_p_filter_of_q_is_p():
    for chain in chains_up_to(10):
        g = cyclic(chain)
        assert set(filter_p_modifications(enumerate_q_modifications(g))) == set(p_modifications(g))


def test_ample_search_matches_filter():
    for chain in chains_up_to(9):
        g = cyclic(chain, 1)
        assert set(ample_q_modifications(g)) == {m for m in enumerate_q_modifications(g) if m.is_k_ample()}


def test_component_count_matches_zero_continued_fractions():
    for chain in chains_up_to(13):
        assert len(p_modifications(cyclic(chain))) == zero_cf_count(chain), chain


def test_du_val_bases_only_have_the_identity():
    for r in range(1, 7):
        (m,) = p_modifications(cyclic((2,) * r))
        assert m.is_identity and m.singularities == [DuValA(r)]
    (m,) = p_modifications(dihedral((2, 2), bullet=False))
    assert m.is_identity and m.singularities == [DuValD(4)]


def test_restricted_search_matches_filter():
    def pads_ok(m, s):
        cfg = m.config
        pads = [c for c in range(len(cfg)) if cfg.origins[c].index in (0, s + 1)]
        return all(p in m.kept and all(cfg.origins[nb].is_original for nb in cfg.neighbors(p)) for p in pads)

    for chain in chains_up_to(6):
        s = len(chain)
        g = cyclic((3,) + chain + (3,))
        restricted = restricted_q_modifications(g, keep=(0, s + 1), frozen=(0, s))
        assert set(restricted) == {m for m in enumerate_q_modifications(g) if pads_ok(m, s)}


def test_modification_json():
    m = next(m for m in p_modifications(cyclic((4, 3, 2, 2), 1)) if m.describe() == "* - [4/1] - 3 - [A_2]")
    js = m.to_json()
    assert js["target"] == "* - [4/1] - 3 - [A_2]"
    assert [k["self_int"] for k in js["kept"]] == [-3]
    assert sorted(g["type"]["label"] for g in js["groups"]) == ["A_2", "T(1,2,1)"]


def test_equality_is_by_target():
    a = p_modifications(cyclic((3, 3)))
    b = p_modifications(cyclic((3, 3)))
    assert set(a) == set(b) and all(isinstance(m, Modification) for m in a)


# ---------------------------------------------------------------- M-modifications

def test_p_to_m_examples():
    (ident,) = [m for m in p_modifications(cyclic((4,))) if m.is_identity]
    assert p_to_m(ident).describe() == "[4/1]"
    (ident,) = [m for m in p_modifications(cyclic((3, 3))) if m.is_identity]
    assert p_to_m(ident).describe() == "[4/1] - 1 - [4/1]"
    (a2,) = p_modifications(cyclic((2, 2)))
    assert p_to_m(a2).describe() == "2 - 2"


def test_m_modifications_are_nef_with_elementary_t_points():
    for chain in chains_up_to(11):
        for p in p_modifications(cyclic(chain)):
            m = p_to_m(p)
            assert is_m_modification(m)
            assert m.is_k_nef()
            assert all(isinstance(s, T) and s.r == 1 for s in m.singularities)
            # each T point of index r splits into r Wahl points; Du Val points resolve
            assert len(m.singularities) == sum(s.r for s in p.singularities if isinstance(s, T))


# ---------------------------------------------------------------- dihedral

def test_dihedral_examples():
    mods = dihedral_p_modifications(dihedral((3, 4)))
    assert len(mods) == 2
    assert len(dihedral_p_modifications(dihedral((5,)))) == 1
    (d4,) = dihedral_p_modifications(dihedral((2, 2)))
    assert d4.singularities == [DuValD(4)] and d4.is_identity


def test_dihedral_cases():
    def cases(chain):
        return sorted(dihedral_case(m) for m in p_modifications(dihedral(chain)))

    assert cases((3, 4)) == [1, 1, 4, 4]
    assert cases((2, 2)) == [2]
    assert cases((3,)) == [1]
    assert cases((4, 2)) == [1, 3]


def test_dihedral_three_routes():
    for c1 in (2, 3):
        for w in range(2, 8):
            for tail in chains_of_weight(w):
                if sum(c - 2 for c in tail) > 2:
                    continue
                g = dihedral((c1,) + tail)
                via_tail = set(dihedral_p_modifications(g))
                assert via_tail == set(dihedral_p_modifications_direct(g)), g
                via_chain = dihedral_from_chain_pmods(g)
                assert set(via_chain) == set(p_modifications(g)), g
                assert via_tail == {m for m in via_chain if dihedral_case(m) in (1, 2)}, g
                assert len(via_tail) == len(p_modifications(cyclic(tail)))


def test_graph_kinds_are_searched():
    for kind in GraphKind:
        g = cyclic((3, 4), {GraphKind.CYCLIC_PLAIN: 0, GraphKind.CYCLIC_B: 1, GraphKind.CYCLIC_D: 2}[kind]) \
            if not kind.is_dihedral else dihedral((3, 4), kind is GraphKind.DIHEDRAL_D)
        assert p_modifications(g)
        assert all(m.base == g for m in p_modifications(g))
        assert all(Q(0) < v for m in p_modifications(g) for v in m.k_degrees().values())
