"""
Clustering the continent
========================

Elbow scans, the four clustering methods and a comparison with the AU regions.
"""

# %%
from afronet.clustering import (
    au_reference, compare_assignments, elbow_calinski, elbow_distortion, geo_features,
    hac_complete, kmeans, kmedoids, multi_features, name_clusters, optics_xi,
)
from afronet.dataset import reference_dataset

ds = reference_dataset()
geo = geo_features(ds)
au = au_reference(ds)
print(au.sizes())

# %%
# How many clusters? Both knees over k = 2..10. The distortion knee moves
# with the end of the range, so the wider scan is shown as well.
for ks in (range(2, 11), range(2, 12)):
    d, c = elbow_distortion(geo, ks), elbow_calinski(geo, ks)
    print(f"k={ks.start}..{ks.stop - 1}: distortion -> {d.chosen_k}, calinski-harabasz -> {c.chosen_k}")
print([round(s, 2) for s in d.scores])

# %%
# Four partitions on lat/lon, each named after the AU region it overlaps most
runs = {
    "kmeans k=6": kmeans(geo, 6, seed=0),
    "kmedoids k=5": kmedoids(geo, 5, "haversine"),
    "hac cut=35": hac_complete(geo, 35),
}
multi = multi_features(ds)
runs["optics multi"] = optics_xi(multi, 3, 0.05, "weighted")
for name, a in runs.items():
    a = name_clusters(a, au)
    rep = compare_assignments(a, au)
    print(f"{name:<14} k={a.k:<2} rand={rep.agreement:.3f} ari={rep.adjusted_rand:.3f} sizes={a.sizes()}")

# %%
# K-Medoids with great-circle distance keeps Mauritania in the west and the
# Indian Ocean islands with the south.
a = name_clusters(kmedoids(geo, 5, "haversine"), au)
for cid in ("mauritania", "madagascar", "comoros", "mauritius", "nigeria"):
    print(cid, "->", a.name(a.labels[cid]))

# %%
# OPTICS keeps a hierarchy of nested clusters; many small states end up as noise
o = runs["optics multi"]
print(len(o.hierarchy), "clusters in the hierarchy,", o.k, "leaves,", len(o.noise), "noise")
