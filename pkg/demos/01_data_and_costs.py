"""
Country data, gateways and hop costs
====================================

Loads the bundled country table, picks the cable-rich gateway countries and
looks at how the weighted hop cost is put together.
"""

# %%
import numpy as np

from afronet.dataset import reference_cables, reference_dataset, reference_graph, landings_per_country
from afronet.gateways import select_pcgs
from afronet.metrics import FeatureWeights, cost_matrix, haversine, normalize_features

ds = reference_dataset()
print(len(ds), "countries,", sum(c.dc_count for c in ds), "data centres")
print(ds["nigeria"])

# %%
# Landing counts straight from the cable table, and the published totals
# carried on each country record. Only the latter give eight gateways at 5.
from_cables = landings_per_country(reference_cables())
print(sorted(from_cables.items(), key=lambda kv: -kv[1])[:6])
pcgs = select_pcgs({c.id: c.landings for c in ds}, 5)
print("gateways:", sorted(pcgs))

# %%
# Great-circle distance between centroids (km)
for a, b in [("morocco", "algeria"), ("tunisia", "algeria"), ("senegal", "somalia")]:
    print(f"{a:>8} -> {b:<8} {haversine(ds[a], ds[b]):8.1f}")

# %%
# Cost of a hop = a*distance + b*population(dest) + g*data centres(dest),
# every term min-max scaled. Here the scaling is over the Northern region only.
north = [c.id for c in ds if c.sub_region == "Northern"]
nf = normalize_features(ds, ids=north, scope=north)
M = cost_matrix(nf, FeatureWeights())
np.set_printoptions(precision=3, suppress=True)
print(nf.ids)
print(M)
i = nf.index
print("tunisia->algeria", M[i["tunisia"], i["algeria"]], " morocco->algeria", M[i["morocco"], i["algeria"]])

# %%
# The routing graph: land borders plus a few sea links for the islands
g = reference_graph("borders", ds)
print(len(g.edges), "links, connected:", g.is_connected())
print("kenya borders", sorted(g.neighbors("kenya")))
