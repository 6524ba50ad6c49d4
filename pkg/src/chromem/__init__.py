"""Chromatic memory requirements of regular reachability and safety objectives."""
from .automaton import Dfa, ObjectiveKind, normalize_dfa, parse_dfa, path_witness, random_dfa
from .errors import ChromemError
from .games import (
    Arena,
    check_memory_sufficient_on_arena,
    gen_incomparability_arena,
    gen_progress_arena,
    parse_arena,
    random_arena,
    solve_game,
)
from .hardness import DirectedGraph, graph_to_dfa, hamiltonian_bruteforce, parse_graph
from .memory import (
    MemoryStructure,
    MonotoneDecomposition,
    Ok,
    PcWitness,
    SmWitness,
    check_progress_consistency,
    check_strong_monotony,
    coreachable_sets,
    memory_from_decomposition,
    memory_from_dfa,
    parse_memory,
    trivial_memory,
)
from .preorder import PrefixPreorder, SeparationWitness, compute_preorder, max_antichain, min_chain_cover
from .synth import (
    encode_decomposition,
    encode_memory_sm,
    enumerate_memories_bruteforce,
    synth_reach_min,
    synth_safe_min,
)

__version__ = "0.1.0"

__all__ = [
    "Dfa", "ObjectiveKind", "normalize_dfa", "parse_dfa", "path_witness", "random_dfa",
    "ChromemError", "Arena", "check_memory_sufficient_on_arena", "gen_incomparability_arena",
    "gen_progress_arena", "parse_arena", "random_arena", "solve_game", "DirectedGraph",
    "graph_to_dfa", "hamiltonian_bruteforce", "parse_graph", "MemoryStructure",
    "MonotoneDecomposition", "Ok", "PcWitness", "SmWitness", "check_progress_consistency",
    "check_strong_monotony", "coreachable_sets", "memory_from_decomposition",
    "memory_from_dfa", "parse_memory", "trivial_memory", "PrefixPreorder", "SeparationWitness",
    "compute_preorder", "max_antichain", "min_chain_cover", "encode_decomposition",
    "encode_memory_sm", "enumerate_memories_bruteforce", "synth_reach_min", "synth_safe_min",
]
