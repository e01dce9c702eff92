"""Sigma-colouring of embedded graphs: structure detection, reduction and randomized list edge-colouring."""

from __future__ import annotations

__version__ = "0.1.0"

from .graph_core import (EmbeddedGraph, Multigraph, PreconditionError, SimpleGraph, StructuralError,
                         complete_to_edge_maximal, degeneracy_ordering, trace_faces)
from .sigma import (SigmaSystem, conflict_graph, cyclic_clique_number, cyclic_instance, gen_family,
                    max_clique, sigma_clique_number, sigma_degree, square)
from .discharge import StructureWitness, compute_charges, detect_structure, validate_witness
from .reduction import build_matching_instance, build_reduced_instance, extend_colouring
from .polytope import edmonds_membership, fractional_chromatic_index, hull_membership_oracle, lem_mp_certificate
from .hardcore import HardcoreModel, activities_from_marginals
from .kahn import KahnParams, run as kahn_run
from .colouring import (PipelineParams, exact_sigma_chromatic, greedy_sigma_colouring,
                        pipeline_sigma_colour)

__all__ = [
    "EmbeddedGraph", "Multigraph", "PreconditionError", "SimpleGraph", "StructuralError",
    "complete_to_edge_maximal", "degeneracy_ordering", "trace_faces",
    "SigmaSystem", "conflict_graph", "cyclic_clique_number", "cyclic_instance", "gen_family",
    "max_clique", "sigma_clique_number", "sigma_degree", "square",
    "StructureWitness", "compute_charges", "detect_structure", "validate_witness",
    "build_matching_instance", "build_reduced_instance", "extend_colouring",
    "edmonds_membership", "fractional_chromatic_index", "hull_membership_oracle", "lem_mp_certificate",
    "HardcoreModel", "activities_from_marginals", "KahnParams", "kahn_run",
    "PipelineParams", "exact_sigma_chromatic", "greedy_sigma_colouring", "pipeline_sigma_colour",
]
