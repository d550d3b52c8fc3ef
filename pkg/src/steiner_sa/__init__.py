"""Simulated annealing over laminar tree structures for directed Steiner trees."""

from .annealing import (
    AnnealingConfig,
    RunResult,
    acceptance_probability,
    replicate,
    replicate_all,
    run_sa,
    run_sa_rect,
    run_sa_test,
    temperature,
)
from .baselines import BaselineResult, best_benchmark, shp1, shp2
from .dp import (
    DpCache,
    SteinerTree,
    StructuredSolution,
    improve_solution,
    is_r_arborescence,
    min_cost_arborescence,
    prune_steiner_leaves,
    solve_structure,
)
from .graph import ApspTable, Instance, bidirect, build_instance, compute_apsp
from .laminar import (
    LaminarFamily,
    family_from_tree,
    from_sets,
    initial_single_linkage,
    part_kmeans,
    pick_central_root,
    random_binarize,
    spr_neighbor,
    spr_neighborhood,
)
from .steinlib import (
    RawStpInstance,
    ResultRow,
    parse_stp,
    read_results,
    terminal_coords,
    to_instance,
    write_results,
    write_solution,
)

__version__ = "0.1.0"

__all__ = [
    "AnnealingConfig",
    "ApspTable",
    "BaselineResult",
    "DpCache",
    "Instance",
    "LaminarFamily",
    "RawStpInstance",
    "ResultRow",
    "RunResult",
    "SteinerTree",
    "StructuredSolution",
    "acceptance_probability",
    "best_benchmark",
    "bidirect",
    "build_instance",
    "compute_apsp",
    "family_from_tree",
    "from_sets",
    "improve_solution",
    "initial_single_linkage",
    "is_r_arborescence",
    "min_cost_arborescence",
    "parse_stp",
    "part_kmeans",
    "pick_central_root",
    "prune_steiner_leaves",
    "random_binarize",
    "read_results",
    "replicate",
    "replicate_all",
    "run_sa",
    "run_sa_rect",
    "run_sa_test",
    "shp1",
    "shp2",
    "solve_structure",
    "spr_neighbor",
    "spr_neighborhood",
    "temperature",
    "terminal_coords",
    "to_instance",
    "write_results",
    "write_solution",
]
