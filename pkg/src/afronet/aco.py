"""Ant colony optimisation with stench pheromones.

Two modes share one engine:

* ``to_gateway``: every ant starts at the query source and stops at the first
  gateway it reaches.
* ``traverse_all``: ants start at random nodes and must visit every node of
  the set exactly once (an open path).

Per hop an ant draws ``f ~ U[0, 1]``; if ``f <= threshold`` it moves to the
unvisited neighbour with the largest pheromone-to-cost ratio, otherwise it
samples a neighbour with probability proportional to that ratio. Each
completed ant lays pheromone on its edges with a destination-dependent rate:
reduced for gateway destinations (boost), increased for desert destinations
(stench). Ants that run out of unvisited neighbours are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import _kernel
from .dataset import AdjacencyGraph
from .errors import RoutingError, ValidationError
from .gateways import ClusterRoutingSpec
from .metrics import FeatureWeights, NormalizedFeatures, cost_matrix

EPS = 1e-9
DEPOSIT_MODES = ("online", "batch")


@dataclass(frozen=True)
class AcoParams:
    threshold: float = 0.8
    ants: int = 1000
    iterations: int = 100
    initial_pheromone: float = 0.2
    rho: float = 0.2
    weights: FeatureWeights = field(default_factory=FeatureWeights)
    boost_factor: float = 0.25
    stench_factor: float = 0.75
    seed: int = 0
    deposit: str = "online"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValidationError("threshold must lie in [0, 1]")
        if int(self.ants) < 1 or int(self.iterations) < 1:
            raise ValidationError("ants and iterations must be positive")
        if not self.initial_pheromone > 0:
            raise ValidationError("initial pheromone must be positive")
        if not 0.0 < self.rho < 1.0:
            raise ValidationError("rho must lie in (0, 1)")
        if not 0.0 < self.boost_factor < self.stench_factor:
            raise ValidationError("need 0 < boost_factor < stench_factor")
        if self.rho * self.stench_factor >= 1.0:
            raise ValidationError("rho * stench_factor must stay below 1")
        if self.deposit not in DEPOSIT_MODES:
            raise ValidationError(f"deposit must be one of {DEPOSIT_MODES}")

    def with_(self, **kw) -> "AcoParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class RouteResult:
    path: tuple[str, ...]
    hop_costs: tuple[float, ...]
    trc: float
    mode: str
    iterations_run: int
    best_iteration: int  # 1-based; 0 when the trivial path needed no search
    complete: bool = True
    history: tuple[float, ...] = ()  # best-so-far TRC after each iteration (inf until found)
    deposit: str = "online"
    pheromone: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def source(self) -> str | None:
        return self.path[0] if self.path else None

    @property
    def hops(self) -> list[tuple[str, str]]:
        return list(zip(self.path[:-1], self.path[1:]))


def evaporation_rate(s, d, spec: ClusterRoutingSpec, rho: float, boost_factor: float = 0.25, stench_factor: float = 0.75) -> float:
    """Pheromone update rate for hop s -> d, decided by the destination alone."""
    if d in spec.gateways and d not in spec.neutral:
        return rho * boost_factor
    if d in spec.ldts:
        return rho * stench_factor
    return rho


def deposit_update(phi: float, rho_sd: float, delta: float) -> float:
    """New pheromone on one edge: evaporate, then add rate / cost (cost clamped to EPS)."""
    return (1.0 - rho_sd) * phi + rho_sd / max(delta, EPS)


def _ratio(s, d, phi, delta):
    return phi[s, d] / max(delta[s, d], EPS)


def next_node_greedy(s, candidates: Iterable, phi, delta):
    """Candidate with the highest pheromone/cost ratio; ties go to the lowest id. None on a dead end."""
    best, best_r = None, -math.inf
    for d in sorted(candidates):
        r = _ratio(s, d, phi, delta)
        if r > best_r:
            best, best_r = d, r
    return best


def next_node_probabilistic(s, candidates: Iterable, phi, delta, rng):
    """Roulette choice proportional to pheromone/cost. None on a dead end."""
    cands = sorted(candidates)
    if not cands:
        return None
    ratios = [_ratio(s, d, phi, delta) for d in cands]
    u = rng.random() * sum(ratios)
    acc = 0.0
    for d, r in zip(cands, ratios):
        acc += r
        if u < acc:
            return d
    return cands[-1]


class _Problem:
    """Dense arrays for one search over a fixed node list."""

    def __init__(self, graph: AdjacencyGraph, nodes: Sequence[str], spec, params: AcoParams, nf: NormalizedFeatures):
        self.nodes = tuple(sorted(nodes))
        missing = [c for c in self.nodes if c not in nf.index]
        if missing:
            raise ValidationError(f"normalised features missing {missing}")
        self.idx = {c: i for i, c in enumerate(self.nodes)}
        n = len(self.nodes)
        self.delta = np.ascontiguousarray(cost_matrix(nf.sub(self.nodes), params.weights))
        adj = graph.adjacency()
        nbrs = [sorted(self.idx[v] for v in adj[u] if v in self.idx) for u in self.nodes]
        self.ptr = np.zeros(n + 1, dtype=np.int64)
        self.ptr[1:] = np.cumsum([len(x) for x in nbrs])
        self.nbr = np.array([v for x in nbrs for v in x], dtype=np.int64)
        self.rho_dest = np.array(
            [evaporation_rate(None, c, spec, params.rho, params.boost_factor, params.stench_factor) for c in self.nodes]
        )
        self.is_target = np.array([c in spec.gateways for c in self.nodes], dtype=np.bool_)

    def result(self, path_idx, mode, iterations_run, best_iteration, complete, history, params, phi):
        path = tuple(self.nodes[i] for i in path_idx)
        hops = tuple(float(self.delta[a, b]) for a, b in zip(path_idx[:-1], path_idx[1:]))
        return RouteResult(
            path, hops, float(sum(hops)), mode, iterations_run, best_iteration, complete, tuple(history),
            params.deposit, phi,
        )


def _search(problem: _Problem, params: AcoParams, traverse: bool, source_idx: int | None):
    n = len(problem.nodes)
    rng = np.random.default_rng(params.seed)
    phi = np.full((n, n), float(params.initial_pheromone))
    ants = int(params.ants)
    paths = np.zeros((ants, n), dtype=np.int64)
    lengths = np.zeros(ants, dtype=np.int64)
    costs = np.zeros(ants)
    done = np.zeros(ants, dtype=np.bool_)
    run = _kernel.iteration_online if params.deposit == "online" else _kernel.iteration_batch

    best = None  # (cost, path)
    partial = None  # (-length, cost, path): longest dead-end walk, for best-effort reporting
    best_iteration = 0
    history = []
    for it in range(1, int(params.iterations) + 1):
        if traverse:
            starts = rng.integers(0, n, size=ants).astype(np.int64)
        else:
            starts = np.full(ants, source_idx, dtype=np.int64)
        draws = rng.random((ants, n, 2))
        run(problem.ptr, problem.nbr, problem.delta, phi, problem.rho_dest, problem.is_target, traverse, n,
            starts, draws, float(params.threshold), EPS, paths, lengths, costs, done)
        if done.any():
            ok = np.flatnonzero(done)
            a = ok[np.argmin(costs[ok])]
            if best is None or costs[a] < best[0]:
                best = (float(costs[a]), paths[a, : lengths[a]].copy())
                best_iteration = it
        elif best is None:
            a = int(np.lexsort((costs, -lengths))[0])
            cand = (-int(lengths[a]), float(costs[a]))
            if partial is None or cand < partial[:2]:
                partial = (*cand, paths[a, : lengths[a]].copy())
        history.append(best[0] if best is not None else math.inf)
    if best is not None:
        return best[1], best_iteration, True, history, phi
    return partial[2], 0, False, history, phi


def _reachable(graph: AdjacencyGraph, source: str) -> set:
    for comp in graph.components():
        if source in comp:
            return set(comp)
    return {source}


def find_route(graph: AdjacencyGraph, source: str, spec: ClusterRoutingSpec, params: AcoParams, nf: NormalizedFeatures) -> RouteResult:
    """Cheapest gateway-terminated simple path from ``source`` found by the colony."""
    if source not in graph.nodes:
        raise ValidationError(f"source {source!r} not in graph")
    if source in spec.gateways:
        return RouteResult((source,), (), 0.0, "to_gateway", 0, 0, True, (), params.deposit)
    reach = _reachable(graph, source)
    if not reach & set(spec.gateways):
        raise RoutingError(f"no gateway reachable from {source!r}")
    problem = _Problem(graph, sorted(reach), spec, params, nf)
    path, best_it, ok, hist, phi = _search(problem, params, False, problem.idx[source])
    if not ok:
        raise RoutingError(f"no ant reached a gateway from {source!r} within the iteration budget")
    return problem.result(path, "to_gateway", int(params.iterations), best_it, True, hist, params, phi)


def traverse_all(graph: AdjacencyGraph, node_set: Iterable[str], spec: ClusterRoutingSpec, params: AcoParams, nf: NormalizedFeatures) -> RouteResult:
    """Cheapest open path found that visits every node of ``node_set`` once.

    When no ant completes, the longest partial walk is returned with ``complete=False``.
    """
    nodes = sorted(set(node_set))
    if not nodes:
        raise ValidationError("empty node set")
    if not set(nodes) <= graph.nodes:
        raise ValidationError(f"nodes {sorted(set(nodes) - graph.nodes)} not in graph")
    if len(nodes) == 1:
        return RouteResult((nodes[0],), (), 0.0, "traverse_all", 0, 0, True, (), params.deposit)
    sub = graph.subgraph(nodes)
    problem = _Problem(sub, nodes, spec, params, nf)
    path, best_it, ok, hist, phi = _search(problem, params, True, None)
    return problem.result(path, "traverse_all", int(params.iterations), best_it, ok, hist, params, phi)


def run_inter_cluster(pcg_graph: AdjacencyGraph, spec: ClusterRoutingSpec, params: AcoParams, nf: NormalizedFeatures,
                      ants: int | None = 100, iterations: int | None = 50) -> RouteResult:
    """Traversal across the gateway graph with the smaller colony used for the upper level."""
    if not pcg_graph.nodes:
        raise ValidationError("empty gateway set")
    override = {k: v for k, v in (("ants", ants), ("iterations", iterations)) if v is not None}
    return traverse_all(pcg_graph, pcg_graph.nodes, spec, params.with_(**override), nf)
