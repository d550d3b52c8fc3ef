"""Simulated annealing drivers over laminar-family structures.

Three variants share one loop: plain annealing, annealing with the
solution-improvement step applied to every candidate, and the rectilinear
variant that seeds the improved loop with the best of several k-means
clusterizations.  A master seed derives three independent generator
streams (neighbor sampling, acceptance draws, binarization/k-means) so the
variants stay trace-comparable.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .dp import (
    DpCache,
    SteinerTree,
    StructuredSolution,
    _leaves_are_terminals,
    improve_solution,
    is_r_arborescence,
    solve_structure,
)
from .graph import ApspTable, Instance
from .laminar import (
    LaminarFamily,
    _family_from_masks,
    initial_single_linkage,
    part_kmeans,
    random_binarize,
    spr_neighbor,
)

VARIANTS = ("sa", "sa-test", "sa-rect")


@dataclass(frozen=True)
class AnnealingConfig:
    n_iter: int = 1000
    cooling_rate: float = 0.95
    seed: int = 0
    variant: str = "sa"
    clusterizations: int = 50
    replications: int = 10
    random_init: bool = False

    def __post_init__(self):
        if self.n_iter < 1:
            raise ValueError("n_iter must be >= 1")
        if not 0.0 < self.cooling_rate < 1.0:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.clusterizations < 1 or self.replications < 1:
            raise ValueError("clusterizations and replications must be >= 1")


@dataclass(frozen=True)
class IterationRecord:
    j: int
    temperature: float
    candidate_cost: float
    accepted: bool
    improved_by_tester: bool
    best_cost: float


@dataclass(eq=False)
class RunResult:
    variant: str
    seed: int
    initial_cost: float
    best_cost: float
    best_family: LaminarFamily
    best_solution: StructuredSolution = field(repr=False)
    best_tree: SteinerTree
    trace: tuple[IterationRecord, ...] = field(repr=False)
    iterations_run: int
    iter_ms: tuple[float, ...] = field(repr=False)

    @property
    def avg_iter_ms(self) -> float | None:
        if not self.iter_ms:
            return None
        return sum(self.iter_ms) / len(self.iter_ms)


def temperature(t0: float, j: int, rate: float = 0.95) -> float:
    """Geometric cooling schedule."""
    return t0 * rate**j


def acceptance_probability(delta: float, t: float) -> float:
    """Probability 1/(1 + exp(delta/t)) of moving to a worse neighbor.

    For delta >= 0 the value lies in (0, 1/2]; the exponent is clamped so
    extreme ratios return exactly 0 or 1 instead of overflowing.
    """
    ratio = delta / t
    if ratio > 700.0:
        return 0.0
    if ratio < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(ratio))


def _streams(seed: int):
    move, accept, init = np.random.SeedSequence(seed).spawn(3)
    return (
        np.random.default_rng(move),
        np.random.default_rng(accept),
        np.random.default_rng(init),
    )


def _star_family(b: int) -> LaminarFamily:
    masks = [1 << k for k in range(b)]
    masks.append((1 << b) - 1)
    return _family_from_masks(masks)


def _anneal(
    instance: Instance,
    apsp: ApspTable,
    config: AnnealingConfig,
    initial: LaminarFamily,
    streams,
    improve: bool,
    cache: DpCache,
    initial_solution: StructuredSolution | None = None,
) -> RunResult:
    rng_move, rng_accept, rng_init = streams
    current_sol = initial_solution or solve_structure(instance, apsp, initial, cache)
    current_fam = initial
    current_cost = current_sol.structured_cost
    t0 = current_cost

    best_fam, best_sol, best_cost = current_fam, current_sol, current_cost
    trace: list[IterationRecord] = []
    iter_ms: list[float] = []

    iterations = config.n_iter if instance.commodity_count >= 3 else 0
    for j in range(1, iterations + 1):
        started = time.perf_counter()
        t_j = temperature(t0, j, config.cooling_rate)
        new_fam = spr_neighbor(current_fam, rng_move)
        new_sol = solve_structure(instance, apsp, new_fam, cache)
        improved = False
        if improve:
            support = new_sol.support
            if not (is_r_arborescence(support, instance) and _leaves_are_terminals(support, instance)):
                improved = True
                _, new_fam, new_sol = improve_solution(new_sol, instance, apsp, rng_init, cache)
        new_cost = new_sol.structured_cost

        if new_cost < current_cost:
            accepted = True
            current_fam, current_sol, current_cost = new_fam, new_sol, new_cost
            if new_cost < best_cost:
                best_fam, best_sol, best_cost = new_fam, new_sol, new_cost
        else:
            delta = new_cost - current_cost
            accepted = rng_accept.random() <= acceptance_probability(delta, t_j)
            if accepted:
                current_fam, current_sol, current_cost = new_fam, new_sol, new_cost

        trace.append(
            IterationRecord(
                j=j,
                temperature=t_j,
                candidate_cost=new_cost,
                accepted=accepted,
                improved_by_tester=improved,
                best_cost=best_cost,
            )
        )
        iter_ms.append((time.perf_counter() - started) * 1000.0)

    best_tree, _, _ = improve_solution(best_sol, instance, apsp, rng_init, cache)
    return RunResult(
        variant=config.variant,
        seed=config.seed,
        initial_cost=t0,
        best_cost=best_cost,
        best_family=best_fam,
        best_solution=best_sol,
        best_tree=best_tree,
        trace=tuple(trace),
        iterations_run=iterations,
        iter_ms=tuple(iter_ms),
    )


def _initial_family(instance, apsp, config, rng_init) -> LaminarFamily:
    if config.random_init:
        return random_binarize(_star_family(instance.commodity_count), rng_init)
    return initial_single_linkage(instance, apsp)


def run_sa(instance: Instance, apsp: ApspTable, config: AnnealingConfig) -> RunResult:
    """Plain simulated annealing; deterministic given the config seed."""
    streams = _streams(config.seed)
    cache = DpCache()
    initial = _initial_family(instance, apsp, config, streams[2])
    return _anneal(instance, apsp, config, initial, streams, improve=False, cache=cache)


def run_sa_test(instance: Instance, apsp: ApspTable, config: AnnealingConfig) -> RunResult:
    """Annealing with the improvement step applied to every candidate."""
    streams = _streams(config.seed)
    cache = DpCache()
    initial = _initial_family(instance, apsp, config, streams[2])
    return _anneal(instance, apsp, config, initial, streams, improve=True, cache=cache)


def run_sa_rect(
    instance: Instance,
    apsp: ApspTable,
    coords,
    config: AnnealingConfig,
) -> RunResult:
    """Rectilinear variant: k-means clusterizations seed the improved loop.

    ``coords`` maps each commodity to the plane position of its terminal.
    The configured number of clusterizations is generated; the one whose
    subproblem solves cheapest becomes the initial family.
    """
    streams = _streams(config.seed)
    cache = DpCache()
    rng_init = streams[2]
    commodities = range(instance.commodity_count)
    best_fam = None
    best_sol = None
    for _ in range(config.clusterizations):
        fam = part_kmeans(coords, commodities, rng_init)
        sol = solve_structure(instance, apsp, fam, cache)
        if best_sol is None or sol.structured_cost < best_sol.structured_cost:
            best_fam, best_sol = fam, sol
    return _anneal(
        instance,
        apsp,
        config,
        best_fam,
        streams,
        improve=True,
        cache=cache,
        initial_solution=best_sol,
    )


def replicate_all(
    instance: Instance,
    apsp: ApspTable,
    config: AnnealingConfig,
    coords=None,
) -> list[RunResult]:
    """One run per replication with seeds seed..seed+replications-1.

    Replications are independent, each with its own cache and generator
    streams, so they may also be executed concurrently by the caller.
    """
    results = []
    for i in range(config.replications):
        cfg = replace(config, seed=config.seed + i)
        if config.variant == "sa":
            results.append(run_sa(instance, apsp, cfg))
        elif config.variant == "sa-test":
            results.append(run_sa_test(instance, apsp, cfg))
        else:
            results.append(run_sa_rect(instance, apsp, coords, cfg))
    return results


def replicate(
    instance: Instance,
    apsp: ApspTable,
    config: AnnealingConfig,
    coords=None,
) -> RunResult:
    """Minimum-cost result over the replications (final tree cost; the
    earliest replication wins ties)."""
    results = replicate_all(instance, apsp, config, coords)
    return min(results, key=lambda r: r.best_tree.cost)
