"""
Ant colony routing
==================

Routes a few countries to their regional gateway, checks one against Dijkstra
and shows what the stench pheromone does to a traversal.
"""

# %%
import networkx as nx

from afronet.aco import AcoParams, find_route, traverse_all
from afronet.clustering import au_reference
from afronet.dataset import build_adjacency, reference_dataset, reference_graph
from afronet.gateways import ClusterRoutingSpec
from afronet.metrics import FeatureWeights, cost_matrix, normalize_features

ds = reference_dataset()
graph = reference_graph("borders", ds)
au = au_reference(ds)
west = au.members(au.label_of("Western"))
nf = normalize_features(ds, ids=sorted(west), scope=west)
spec = ClusterRoutingSpec("Western", {"nigeria"}, {"mali", "niger"})
params = AcoParams(ants=300, iterations=60, seed=1)

# %%
for src in ("benin", "ghana", "senegal"):
    r = find_route(graph.subgraph(west), src, spec, params, nf)
    print(f"{src:>8}: {' > '.join(r.path)}  cost {r.trc:.4f}  (best at iteration {r.best_iteration})")

# %%
# Same query solved exactly. With only 300 ants x 60 iterations the colony
# can settle a little above the optimum.
M = cost_matrix(nf, FeatureWeights())
D = nx.DiGraph()
for a, b in graph.subgraph(west).edges:
    D.add_edge(a, b, weight=M[nf.index[a], nf.index[b]])
    D.add_edge(b, a, weight=M[nf.index[b], nf.index[a]])
print("dijkstra senegal -> nigeria:", round(nx.dijkstra_path_length(D, "senegal", "nigeria"), 4))

# %%
# Traversal of the whole region on a complete graph, with and without the
# desert trails marked. The trail rate only changes evaporation on edges into
# mali and niger, so on a small region the two runs can agree exactly.
full = build_adjacency(ds.subset(west), "complete")
for label, s in (("with stench", spec), ("plain", ClusterRoutingSpec("Western", {"nigeria"}))):
    t = traverse_all(full, west, s, params, nf)
    print(f"{label:>11}: cost {t.trc:.4f}  mali at {t.path.index('mali')}, niger at {t.path.index('niger')}")

# %%
# Online deposits (each ant updates before the next walks) against batch
# deposits (ants walk in parallel, deposits applied afterwards in ant order)
for mode in ("online", "batch"):
    t = traverse_all(full, west, spec, params.with_(deposit=mode), nf)
    print(f"{mode:>6}: {t.trc:.4f}")
