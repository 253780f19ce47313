"""Compiled ant walk. Nodes are dense indices in sorted-id order; adjacency is CSR.

All randomness arrives pre-drawn so the compiled and reference walkers see the
same numbers: ``draws[a, step, 0]`` picks greedy vs roulette, ``draws[a, step, 1]``
is the roulette position.
"""

import numpy as np
from numba import config, njit, prange

# skip the system TBB probe (too old on common distros) and go to OpenMP first
config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


@njit(cache=True)
def walk_ant(ptr, nbr, delta, phi, is_target, traverse, n_required, start, draws, threshold, eps, path):
    """Walk one ant; fills ``path`` and returns (length, cost, completed)."""
    n = ptr.shape[0] - 1
    visited = np.zeros(n, np.bool_)
    cand = np.empty(n, np.int64)
    ratio = np.empty(n, np.float64)
    s = start
    visited[s] = True
    path[0] = s
    length = 1
    cost = 0.0
    step = 0
    while True:
        if traverse:
            if length == n_required:
                return length, cost, True
        elif is_target[s]:
            return length, cost, True
        m = 0
        for j in range(ptr[s], ptr[s + 1]):
            d = nbr[j]
            if not visited[d]:
                cand[m] = d
                ratio[m] = phi[s, d] / max(delta[s, d], eps)
                m += 1
        if m == 0:
            return length, cost, False
        if draws[step, 0] <= threshold:
            best = 0
            for i in range(1, m):
                if ratio[i] > ratio[best]:
                    best = i
        else:
            total = 0.0
            for i in range(m):
                total += ratio[i]
            u = draws[step, 1] * total
            best = m - 1
            acc = 0.0
            for i in range(m):
                acc += ratio[i]
                if u < acc:
                    best = i
                    break
        d = cand[best]
        cost += delta[s, d]
        visited[d] = True
        path[length] = d
        length += 1
        s = d
        step += 1


@njit(cache=True)
def deposit(phi, path, length, cost, rho_dest, eps):
    c = max(cost, eps)
    for i in range(length - 1):
        u = path[i]
        v = path[i + 1]
        r = rho_dest[v]
        phi[u, v] = (1.0 - r) * phi[u, v] + r / c


@njit(cache=True)
def iteration_online(ptr, nbr, delta, phi, rho_dest, is_target, traverse, n_required, starts, draws,
                     threshold, eps, paths, lengths, costs, done):
    """Ants walk in index order; each completed ant deposits before the next one starts."""
    for a in range(starts.shape[0]):
        length, cost, ok = walk_ant(ptr, nbr, delta, phi, is_target, traverse, n_required, starts[a],
                                    draws[a], threshold, eps, paths[a])
        lengths[a] = length
        costs[a] = cost
        done[a] = ok
        if ok:
            deposit(phi, paths[a], length, cost, rho_dest, eps)


@njit(cache=True, parallel=True)
def iteration_batch(ptr, nbr, delta, phi, rho_dest, is_target, traverse, n_required, starts, draws,
                    threshold, eps, paths, lengths, costs, done):
    """Ants walk concurrently on a frozen pheromone snapshot; deposits follow in ant-index order."""
    for a in prange(starts.shape[0]):
        length, cost, ok = walk_ant(ptr, nbr, delta, phi, is_target, traverse, n_required, starts[a],
                                    draws[a], threshold, eps, paths[a])
        lengths[a] = length
        costs[a] = cost
        done[a] = ok
    for a in range(starts.shape[0]):
        if done[a]:
            deposit(phi, paths[a], lengths[a], costs[a], rho_dest, eps)
