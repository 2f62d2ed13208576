"""Scattering of continuous-time quantum walks on finite graphs with semi-infinite paths."""

from .graphcore import (
    Gadget, GadgetError, Momentum, attach_truncated_paths, chain, disjoint_union,
    is_isomorphic, load_gadget, merge_terminals, momentum_grid, save_gadget, series_merge,
    union_grid,
)
from .scatter import (
    SMatrix, ScatteringError, classify_rt, downgrade_terminal, is_momentum_switch,
    s_matrix, scattering_solve, series_transmission,
)
from .constructions import (
    Type1Spec, build_type1, cycle_gadget, lemma1_predict, lemma2_predict, named_gadget,
    path_gadget, reversal, switch_from_type2,
)

__all__ = [
    "Gadget", "GadgetError", "Momentum", "attach_truncated_paths", "chain", "disjoint_union",
    "is_isomorphic", "load_gadget", "merge_terminals", "momentum_grid", "save_gadget",
    "series_merge", "union_grid", "SMatrix", "ScatteringError", "classify_rt",
    "downgrade_terminal", "is_momentum_switch", "s_matrix", "scattering_solve",
    "series_transmission", "Type1Spec", "build_type1", "cycle_gadget", "lemma1_predict",
    "lemma2_predict", "named_gadget", "path_gadget", "reversal", "switch_from_type2",
]
