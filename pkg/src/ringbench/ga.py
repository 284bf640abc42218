"""Genetic-algorithm baseline over K-ring topologies.

Individuals are K node permutations; fitness is the diameter of their union
(ties broken by total tour weight, lower preferred).  Standard permutation
operators: tournament selection, order crossover (OX) per ring, swap
mutation.  The search consumes exactly a fixed budget of diameter
evaluations, with single-individual elitism, and returns the best-ever
topology plus a per-generation log.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import DegreeBound, LatencyMatrix, Ring, Topology
from .paths import diameter
from .rng import make_rng

__all__ = ["GaConfig", "Individual", "ga_search", "GaResult", "random_k_ring_search"]


@dataclass
class GaConfig:
    population: int = 100
    budget: int = 100_000
    crossover_rate: float = 0.9
    mutation_rate: float = 0.2
    tournament: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.population < 4:
            raise ValueError(f"population must be >= 4, got {self.population}")
        if self.budget < self.population:
            raise ValueError(
                f"budget {self.budget} below population {self.population}"
            )
        if self.tournament < 1:
            raise ValueError(f"tournament must be >= 1, got {self.tournament}")


@dataclass(eq=False)
class Individual:
    rings: list[np.ndarray]
    fitness: tuple[float, float] | None = None  # (diameter, tour weight)

    def topology(self, n: int) -> Topology:
        topo = Topology(n)
        for order in self.rings:
            topo.add_ring(Ring(order))
        return topo


@dataclass(eq=False)
class GaResult:
    topology: Topology
    best: Individual
    best_per_generation: list[float] = field(default_factory=list)
    evaluations: int = 0


def _evaluate(ind: Individual, w: LatencyMatrix, backend) -> tuple[float, float]:
    topo = ind.topology(w.n)
    diam = diameter(topo, w, backend)
    weight = sum(Ring(order).tour_weight(w) for order in ind.rings)
    ind.fitness = (diam, weight)
    return ind.fitness


def _order_crossover(p1: np.ndarray, p2: np.ndarray, rng) -> np.ndarray:
    n = p1.shape[0]
    a, b = sorted(rng.integers(n, size=2))
    child = np.full(n, -1, dtype=np.int64)
    child[a : b + 1] = p1[a : b + 1]
    taken = np.zeros(n, dtype=bool)
    taken[p1[a : b + 1]] = True
    fill = [v for v in p2 if not taken[v]]
    pos = (b + 1) % n
    for v in fill:
        child[pos] = v
        pos = (pos + 1) % n
    return child


def _swap_mutation(order: np.ndarray, rng) -> np.ndarray:
    out = order.copy()
    i, j = rng.integers(out.shape[0], size=2)
    out[i], out[j] = out[j], out[i]
    return out


def _random_individual(n: int, k: int, rng) -> Individual:
    return Individual(rings=[rng.permutation(n) for _ in range(k)])


def _tournament(pop: list[Individual], rng, size: int) -> Individual:
    picks = rng.integers(len(pop), size=size)
    return min((pop[i] for i in picks), key=lambda ind: ind.fitness)


def ga_search(
    w: LatencyMatrix, k: DegreeBound | int, cfg: GaConfig, backend: str | None = None
) -> GaResult:
    """Evolve K-ring individuals until the evaluation budget is spent."""
    k = k.k if isinstance(k, DegreeBound) else int(k)
    rng = make_rng(cfg.seed)
    n = w.n

    pop = [_random_individual(n, k, rng) for _ in range(cfg.population)]
    evals = 0
    for ind in pop:
        _evaluate(ind, w, backend)
        evals += 1
    best = min(pop, key=lambda ind: ind.fitness)
    log = [best.fitness[0]]

    while evals < cfg.budget:
        children = []
        for _ in range(cfg.population - 1):  # elitism reserves one slot
            if evals + len(children) >= cfg.budget:
                break
            parent1 = _tournament(pop, rng, cfg.tournament)
            parent2 = _tournament(pop, rng, cfg.tournament)
            rings = []
            for r1, r2 in zip(parent1.rings, parent2.rings):
                child = (
                    _order_crossover(r1, r2, rng)
                    if rng.random() < cfg.crossover_rate
                    else r1.copy()
                )
                if rng.random() < cfg.mutation_rate:
                    child = _swap_mutation(child, rng)
                rings.append(child)
            children.append(Individual(rings=rings))
        for child in children:
            _evaluate(child, w, backend)
            evals += 1
        pop = [best] + children
        gen_best = min(pop, key=lambda ind: ind.fitness)
        if gen_best.fitness < best.fitness:
            best = gen_best
        log.append(best.fitness[0])
        if not children:
            break

    return GaResult(
        topology=best.topology(n),
        best=best,
        best_per_generation=log,
        evaluations=evals,
    )


def random_k_ring_search(
    w: LatencyMatrix, k: DegreeBound | int, budget: int, seed: int,
    backend: str | None = None,
) -> tuple[float, Topology]:
    """Equal-budget random-search baseline: best of ``budget`` random K-rings."""
    k = k.k if isinstance(k, DegreeBound) else int(k)
    rng = make_rng(seed)
    best_diam = np.inf
    best_topo = None
    for _ in range(budget):
        ind = _random_individual(w.n, k, rng)
        topo = ind.topology(w.n)
        d = diameter(topo, w, backend)
        if d < best_diam:
            best_diam = d
            best_topo = topo
    return float(best_diam), best_topo
