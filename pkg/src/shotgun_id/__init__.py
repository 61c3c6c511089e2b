"""Identifiability of patterns on groups from shotgun reads."""
from .groups import (
    CyclicGroup, FreeGroup, Group, GroupError, Heisenberg, Shape, ZLattice, ball, cube, diameter_inf,
    axis_interior, generator_interior, make_group, set_inverse, set_product, stabilizer, translate_set,
)
from .overlap import (
    Certificate, OverlapFamily, OverlapGraph, build_overlap_graph, check_recovery_conditions,
    identifiability_lower_bound, is_connected, subfamily_connectivity_check,
    unique_labeling_certificate,
)
from .patterns import ProbVector, Pattern, critical_ratio, collision_prob, renyi2, restrict, sample, translate, trial_rng
from .probability import (
    OrbitDecomposition, disjoint_repeat_prob, exact_repeat_prob, exceptional_upper_bound,
    orbit_decomposition, repeat_prob_bounds,
)
from .reads import (
    BudgetExceeded, Instance, OracleVerdict, ReadMultiset, identifiability_class, multiset_equal,
    oracle_identifiable, reads,
)
from .shells import (
    BlockingPair, ShellInfo, certify_nonidentifiable, check_blocking_conditions, dsc_greedy,
    find_repeated_shells, swap_labels, repeated_shell_lower_bound, shell_info, shell_type_index,
)
from .simulate import ScenarioConfig, build_instance, emit, run_trials, sweep

__all__ = [
    "CyclicGroup", "FreeGroup", "Group", "GroupError", "Heisenberg", "Shape", "ZLattice", "ball",
    "cube", "diameter_inf", "axis_interior", "generator_interior", "make_group", "set_inverse", "set_product", "stabilizer",
    "translate_set", "Certificate", "OverlapFamily", "OverlapGraph", "build_overlap_graph",
    "check_recovery_conditions", "identifiability_lower_bound", "is_connected",
    "subfamily_connectivity_check", "unique_labeling_certificate", "ProbVector", "Pattern",
    "critical_ratio", "collision_prob", "renyi2", "restrict", "sample", "translate", "trial_rng",
    "OrbitDecomposition", "disjoint_repeat_prob", "exact_repeat_prob", "exceptional_upper_bound",
    "orbit_decomposition", "repeat_prob_bounds", "BudgetExceeded", "Instance", "OracleVerdict",
    "ReadMultiset", "identifiability_class", "multiset_equal", "oracle_identifiable", "reads",
    "BlockingPair", "ShellInfo", "certify_nonidentifiable", "check_blocking_conditions", "dsc_greedy",
    "find_repeated_shells", "swap_labels", "repeated_shell_lower_bound", "shell_info", "shell_type_index",
    "ScenarioConfig", "build_instance", "emit", "run_trials", "sweep"
]
