"""Deformations of cyclic and dihedral quotient surface singularities."""

from .deform import (ComponentReport, Junction, JunctionKind, def_components, def_ksb_pair_components_cyclic,
                     def_ksb_pair_components_dihedral, ksba_search, plt_rigidity, triviality_lemmas_check,
                     verify_theorem_1)
from .dihedral import CoverParams, cover_chain, double_cover_params, inverse_params
from .hjcf import NQ, hj_evaluate, hj_expand
from .modgen import (Modification, dihedral_p_modifications, enumerate_q_modifications, filter_p_modifications,
                     p_modifications, p_to_m)
from .notation import PairGraph, cyclic, dihedral, parse_graph, render_graph
from .tsing import t_recognize

__version__ = "0.1.0"

__all__ = [
    "ComponentReport", "CoverParams", "Junction", "JunctionKind", "Modification", "NQ", "PairGraph",
    "cover_chain", "cyclic", "def_components", "def_ksb_pair_components_cyclic",
    "def_ksb_pair_components_dihedral", "dihedral", "dihedral_p_modifications", "double_cover_params",
    "enumerate_q_modifications", "filter_p_modifications", "hj_evaluate", "hj_expand", "inverse_params",
    "ksba_search", "p_modifications", "p_to_m", "parse_graph", "plt_rigidity", "render_graph",
    "t_recognize", "triviality_lemmas_check", "verify_theorem_1",
]
