"""Country clustering: K-Means, K-Medoids (PAM), complete-linkage HAC and OPTICS-Xi,
plus elbow selection, the AU reference partition and cluster naming."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linear_sum_assignment
from scipy.signal import argrelextrema
from scipy.spatial.distance import squareform
from sklearn.cluster import OPTICS, KMeans
from sklearn.metrics import adjusted_rand_score, calinski_harabasz_score

from .errors import ValidationError
from .metrics import FeatureWeights, clustering_distance_matrix, haversine_matrix, normalize_features

log = logging.getLogger(__name__)

NOISE = -1
METRICS = ("euclidean", "haversine", "weighted")


@dataclass(frozen=True)
class Features:
    """Feature matrix aligned with country ids.

    ``kind='geo'`` holds raw (lat, lon) degrees; ``kind='multi'`` holds
    (lat, lon, population_norm, dc_norm). ``distance`` is an optional
    precomputed dissimilarity used by the distance-based methods.
    """

    ids: tuple[str, ...]
    values: np.ndarray
    kind: str = "geo"
    distance: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.values.shape[0] != len(self.ids):
            raise ValidationError("feature rows do not match ids")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("features contain NaN or infinite values")


def geo_features(dataset) -> Features:
    vals = np.array([[c.centroid.lat, c.centroid.lon] for c in dataset], dtype=float).reshape(-1, 2)
    return Features(tuple(dataset.ids), vals, "geo")


def multi_features(dataset, weights: FeatureWeights | None = None) -> Features:
    """Combined features. The attached distance is the weighted dissimilarity on
    normalised hop distance, population and data-centre count."""
    weights = weights or FeatureWeights()
    nf = normalize_features(dataset)
    vals = np.column_stack(
        [
            [c.centroid.lat for c in dataset],
            [c.centroid.lon for c in dataset],
            nf.population,
            nf.dc,
        ]
    ).reshape(-1, 4)
    return Features(tuple(dataset.ids), vals, "multi", clustering_distance_matrix(nf, weights))


def distance_matrix(features: Features, metric: str = "euclidean") -> np.ndarray:
    if metric == "weighted":
        if features.distance is None:
            raise ValidationError("weighted metric needs features built by multi_features")
        return features.distance
    if metric == "haversine":
        return haversine_matrix(features.values[:, 0], features.values[:, 1])
    if metric == "euclidean":
        diff = features.values[:, None, :] - features.values[None, :, :]
        return np.sqrt((diff**2).sum(-1))
    raise ValidationError(f"unknown metric {metric!r}; expected one of {METRICS}")


@dataclass(frozen=True)
class ClusterAssignment:
    """Labels per country id. Noise (OPTICS only) is labelled -1."""

    labels: Mapping[str, int]
    method: str
    params: Mapping = field(default_factory=dict)
    names: Mapping[int, str] = field(default_factory=dict)
    hierarchy: tuple = ()  # OPTICS-Xi nested clusters, as frozensets of ids

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.labels)

    @property
    def cluster_labels(self) -> list[int]:
        return sorted({v for v in self.labels.values() if v != NOISE})

    @property
    def k(self) -> int:
        return len(self.cluster_labels)

    @property
    def noise(self) -> tuple[str, ...]:
        return tuple(c for c, v in self.labels.items() if v == NOISE)

    def members(self, label: int) -> tuple[str, ...]:
        return tuple(c for c, v in self.labels.items() if v == label)

    def clusters(self) -> dict[int, tuple[str, ...]]:
        return {lab: self.members(lab) for lab in self.cluster_labels}

    def name(self, label: int) -> str:
        return self.names.get(label, f"C{label}")

    def label_of(self, name: str) -> int:
        for lab in self.cluster_labels:
            if self.name(lab) == name:
                return lab
        raise KeyError(f"no cluster named {name!r}")

    def sizes(self) -> dict[str, int]:
        return {self.name(lab): len(self.members(lab)) for lab in self.cluster_labels}

    def with_names(self, names: Mapping[int, str]) -> "ClusterAssignment":
        return ClusterAssignment(dict(self.labels), self.method, dict(self.params), dict(names), self.hierarchy)


def _canonical(labels: Sequence[int]) -> np.ndarray:
    """Relabel 0..k-1 in order of first appearance, keeping noise at -1."""
    mapping = {}
    out = np.empty(len(labels), dtype=int)
    for i, v in enumerate(labels):
        v = int(v)
        if v == NOISE:
            out[i] = NOISE
            continue
        out[i] = mapping.setdefault(v, len(mapping))
    return out


def _assignment(features, labels, method, params, hierarchy=()):
    return ClusterAssignment(
        dict(zip(features.ids, (int(v) for v in _canonical(labels)))), method, params, {}, tuple(hierarchy)
    )


def _check_k(k, n):
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    if k > n:
        raise ValidationError(f"k={k} exceeds the number of points ({n})")


def _kmeans_fit(X, k, seed, max_iter, restarts):
    return KMeans(n_clusters=k, n_init=restarts, max_iter=max_iter, random_state=seed).fit(X)


def kmeans(features: Features, k: int, seed: int = 0, max_iter: int = 300, restarts: int = 20) -> ClusterAssignment:
    """Lloyd K-Means with k-means++ seeding on the raw feature columns, best of ``restarts``."""
    _check_k(k, len(features.ids))
    fit = _kmeans_fit(features.values, k, seed, max_iter, restarts)
    return _assignment(features, fit.labels_, "kmeans", {"k": k, "seed": seed, "inertia": float(fit.inertia_)})


def pam(D: np.ndarray, k: int) -> tuple[list[int], np.ndarray, float]:
    """Partitioning Around Medoids: greedy BUILD then best-improvement SWAP.

    Deterministic for a given matrix; ties go to the lowest index.
    Returns (medoid indices, labels, total cost).
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    _check_k(k, n)
    medoids = [int(np.argmin(D.sum(axis=1)))]
    while len(medoids) < k:
        nearest = D[:, medoids].min(axis=1)
        gain = np.maximum(nearest[:, None] - D, 0.0).sum(axis=0)
        gain[medoids] = -1.0
        medoids.append(int(np.argmax(gain)))
    cost = D[:, medoids].min(axis=1).sum()
    while True:
        best_cost, best = cost, None
        for i in range(k):
            for h in range(n):
                if h in medoids:
                    continue
                trial = medoids.copy()
                trial[i] = h
                c = D[:, trial].min(axis=1).sum()
                if c < best_cost - 1e-12:
                    best_cost, best = c, trial
        if best is None:
            break
        cost, medoids = best_cost, best
    labels = np.argmin(D[:, medoids], axis=1)
    return medoids, labels, float(cost)


def kmedoids(features: Features, k: int, metric: str = "haversine", seed: int | None = None) -> ClusterAssignment:
    """K-Medoids (PAM). ``seed`` is accepted for interface symmetry; PAM is deterministic."""
    D = distance_matrix(features, metric)
    medoids, labels, cost = pam(D, k)
    return _assignment(
        features,
        labels,
        "kmedoids",
        {"k": k, "metric": metric, "cost": cost, "medoids": [features.ids[m] for m in medoids]},
    )


def hac_complete(features: Features, cut_distance: float, metric: str = "euclidean") -> ClusterAssignment:
    """Complete-linkage agglomeration, keeping every merge whose height is strictly below ``cut_distance``."""
    if not cut_distance > 0:
        raise ValidationError("cut_distance must be positive")
    n = len(features.ids)
    if n == 1:
        return _assignment(features, [0], "hac", {"cut": cut_distance, "metric": metric})
    D = distance_matrix(features, metric)
    Z = linkage(squareform(D, checks=False), method="complete")
    # fcluster keeps merges with height <= t; step t just below the cut for a strict comparison
    labels = fcluster(Z, t=np.nextafter(cut_distance, -np.inf), criterion="distance")
    return _assignment(features, labels, "hac", {"cut": cut_distance, "metric": metric})


def optics_xi(features: Features, min_pts: int = 3, xi: float = 0.05, metric: str = "weighted") -> ClusterAssignment:
    """OPTICS with Xi cluster extraction.

    Flat labels are the leaf clusters (noise = -1). ``hierarchy`` keeps every
    Xi cluster including enclosing ones, which is the count hierarchical
    OPTICS-Xi implementations report.
    """
    n = len(features.ids)
    if min_pts < 2:
        raise ValidationError("min_pts must be at least 2")
    if not 0 < xi < 1:
        raise ValidationError("xi must lie in (0, 1)")
    params = {"min_pts": min_pts, "xi": xi, "metric": metric}
    D = distance_matrix(features, metric)
    if n < min_pts or np.allclose(D, 0.0):
        # degenerate input: one dense blob
        return _assignment(features, np.zeros(n, dtype=int), "optics", params, [frozenset(features.ids)])
    fit = OPTICS(min_samples=min_pts, metric="precomputed", xi=xi).fit(D)
    hierarchy = [frozenset(features.ids[i] for i in fit.ordering_[a : b + 1]) for a, b in fit.cluster_hierarchy_]
    return _assignment(features, fit.labels_, "optics", params, hierarchy)


def locate_knee(x, y, curve: str, direction: str, sensitivity: float = 1.0):
    """Kneedle knee detection. Returns the x value of the last detected knee, or None."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    xs = (x - x.min()) / np.ptp(x)
    ys = (y - y.min()) / np.ptp(y)
    if curve == "convex" and direction == "decreasing":
        yd = 1 - (ys + xs)
    elif curve == "concave" and direction == "decreasing":
        yd = ys + xs
    elif curve == "concave" and direction == "increasing":
        yd = ys - xs
    elif curve == "convex" and direction == "increasing":
        yd = np.abs(ys - xs)
    else:
        raise ValidationError(f"unsupported curve/direction {curve}/{direction}")
    maxima = argrelextrema(yd, np.greater)[0]
    minima = set(argrelextrema(yd, np.less)[0].tolist())
    if maxima.size == 0:
        return None
    step = abs(np.diff(xs).mean())
    stops = list(maxima) + [len(yd)]
    knee = None
    for i, m in enumerate(maxima):
        threshold = yd[m] - sensitivity * step
        for j in range(m + 1, stops[i + 1]):
            if j in minima and j + 1 < len(yd) and yd[j + 1] > yd[j]:
                threshold = 0.0
            if yd[j] < threshold or threshold < 0:
                knee = x[m]
    return None if knee is None else int(knee) if float(knee).is_integer() else float(knee)


@dataclass(frozen=True)
class ElbowReport:
    ks: tuple[int, ...]
    scores: tuple[float, ...]
    chosen_k: int
    criterion: str
    knee_found: bool = True


def _k_range(features, k_range):
    ks = sorted({int(k) for k in k_range})
    if not ks:
        raise ValidationError("empty k range")
    if len(ks) == 1 and ks[0] >= 1:
        return ks
    if ks[0] < 2:
        raise ValidationError("elbow scan needs k >= 2")
    if ks[-1] > len(features.ids) - 1:
        raise ValidationError("k range exceeds n - 1")
    return ks


def elbow_distortion(features: Features, k_range: Iterable[int] = range(2, 11), seed: int = 0, restarts: int = 200) -> ElbowReport:
    """Knee of the distortion curve (mean squared distance to the assigned centroid; convex, decreasing).

    The elbow scan uses more restarts than :func:`kmeans` because a knee on a
    55-point curve is sensitive to K-Means landing in a poor local optimum.
    """
    ks = _k_range(features, k_range)
    n = len(features.ids)
    scores = [float(_kmeans_fit(features.values, k, seed, 300, restarts).inertia_) / n for k in ks]
    knee = locate_knee(ks, scores, "convex", "decreasing")
    if knee is None:
        return ElbowReport(tuple(ks), tuple(scores), ks[0], "distortion", False)
    return ElbowReport(tuple(ks), tuple(scores), int(knee), "distortion")


def elbow_calinski(features: Features, k_range: Iterable[int] = range(2, 11), seed: int = 0, restarts: int = 200) -> ElbowReport:
    """Knee of the Calinski-Harabasz curve (concave, increasing); falls back to its maximum."""
    ks = _k_range(features, k_range)
    scores = []
    for k in ks:
        fit = _kmeans_fit(features.values, k, seed, 300, restarts)
        scores.append(float(calinski_harabasz_score(features.values, fit.labels_)))
    knee = locate_knee(ks, scores, "concave", "increasing")
    if knee is None:
        return ElbowReport(tuple(ks), tuple(scores), ks[int(np.argmax(scores))], "calinski_harabasz", False)
    return ElbowReport(tuple(ks), tuple(scores), int(knee), "calinski_harabasz")


def au_reference(dataset) -> ClusterAssignment:
    """The five AU sub-regions as a clustering, labelled in alphabetical region order."""
    regions = sorted({c.sub_region for c in dataset})
    lab = {r: i for i, r in enumerate(regions)}
    return ClusterAssignment(
        {c.id: lab[c.sub_region] for c in dataset}, "au", {}, {i: r for r, i in lab.items()}
    )


def name_clusters(assignment: ClusterAssignment, reference: ClusterAssignment) -> ClusterAssignment:
    """Name clusters after the reference clusters they overlap most (one-to-one Hungarian matching).

    Clusters left unmatched keep the generic name ``C<label>``.
    """
    mine, theirs = assignment.cluster_labels, reference.cluster_labels
    overlap = np.zeros((len(mine), len(theirs)))
    for i, a in enumerate(mine):
        for c in assignment.members(a):
            if c in reference.labels and reference.labels[c] != NOISE:
                overlap[i, theirs.index(reference.labels[c])] += 1
    rows, cols = linear_sum_assignment(-overlap)
    names = {}
    for r, c in zip(rows, cols):
        if overlap[r, c] > 0:
            names[mine[r]] = reference.name(theirs[c])
    return assignment.with_names(names)


def merge_singletons(assignment: ClusterAssignment, dataset) -> ClusterAssignment:
    """Fold every single-country cluster into the cluster of its nearest (great-circle) neighbour."""
    labels = dict(assignment.labels)
    ids = list(labels)
    H = haversine_matrix([dataset[c].centroid.lat for c in ids], [dataset[c].centroid.lon for c in ids])
    sizes = Counter(v for v in labels.values() if v != NOISE)
    for lab, size in sorted(sizes.items()):
        if size != 1 or assignment.k <= 1:
            continue
        (lone,) = [c for c in ids if labels[c] == lab]
        i = ids.index(lone)
        order = np.argsort(H[i], kind="stable")
        for j in order:
            if ids[j] != lone and labels[ids[j]] not in (NOISE, lab):
                labels[lone] = labels[ids[j]]
                break
    kept = sorted({v for v in labels.values() if v != NOISE})
    remap = {old: new for new, old in enumerate(kept)}
    names = {remap[o]: n for o, n in assignment.names.items() if o in remap}
    return ClusterAssignment(
        {c: (remap[v] if v != NOISE else NOISE) for c, v in labels.items()},
        assignment.method,
        {**assignment.params, "merged_singletons": True},
        names,
        assignment.hierarchy,
    )


@dataclass(frozen=True)
class ComparisonReport:
    sizes_a: dict
    sizes_b: dict
    agreement: float  # fraction of country pairs both partitions treat alike
    adjusted_rand: float
    contingency: dict


def pair_agreement(la: Sequence[int], lb: Sequence[int]) -> float:
    """Rand index: share of unordered pairs that are together in both or apart in both."""
    la, lb = np.asarray(la), np.asarray(lb)
    n = la.size
    if n < 2:
        return 1.0
    same_a = la[:, None] == la[None, :]
    same_b = lb[:, None] == lb[None, :]
    iu = np.triu_indices(n, 1)
    return float((same_a == same_b)[iu].mean())


def compare_assignments(a: ClusterAssignment, b: ClusterAssignment) -> ComparisonReport:
    """Cluster sizes side by side plus pairwise agreement. Both must label the same countries."""
    if set(a.labels) != set(b.labels):
        raise ValidationError("assignments cover different country sets")
    ids = list(a.labels)
    la = [a.labels[c] for c in ids]
    lb = [b.labels[c] for c in ids]
    table = Counter((a.name(x) if x != NOISE else "noise", b.name(y) if y != NOISE else "noise") for x, y in zip(la, lb))
    return ComparisonReport(
        a.sizes(), b.sizes(), pair_agreement(la, lb), float(adjusted_rand_score(la, lb)), dict(table)
    )


def cluster(features: Features, method: str, k: int | None = None, seed: int = 0, **kw) -> ClusterAssignment:
    """Dispatch by method name: kmeans, kmedoids, hac, optics."""
    if method == "kmeans":
        return kmeans(features, k, seed=seed, **kw)
    if method == "kmedoids":
        return kmedoids(features, k, **kw)
    if method == "hac":
        return hac_complete(features, **kw)
    if method == "optics":
        return optics_xi(features, **kw)
    raise ValidationError(f"unknown clustering method {method!r}")
