"""Distances, min-max normalisation and the weighted routing cost."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

EARTH_RADIUS_KM = 6371.0


def _latlon(p):
    if hasattr(p, "centroid"):
        p = p.centroid
    if hasattr(p, "lat"):
        return float(p.lat), float(p.lon)
    lat, lon = p
    return float(lat), float(lon)


def haversine(a, b) -> float:
    """Great-circle distance in km between two points (GeoPoint, Country or (lat, lon))."""
    lat1, lon1 = _latlon(a)
    lat2, lon2 = _latlon(b)
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def haversine_matrix(lat, lon) -> np.ndarray:
    """Pairwise great-circle distances (km) for coordinate arrays in degrees."""
    phi = np.radians(np.asarray(lat, dtype=float))
    lam = np.radians(np.asarray(lon, dtype=float))
    dphi = phi[:, None] - phi[None, :]
    dlam = lam[:, None] - lam[None, :]
    h = np.sin(dphi / 2) ** 2 + np.cos(phi)[:, None] * np.cos(phi)[None, :] * np.sin(dlam / 2) ** 2
    d = 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    np.fill_diagonal(d, 0.0)
    return d


def euclidean_deg(a, b) -> float:
    """Planar distance in raw degrees; used only by the geographic K-Means variant."""
    lat1, lon1 = _latlon(a)
    lat2, lon2 = _latlon(b)
    return math.hypot(lat1 - lat2, lon1 - lon2)


def min_max_normalize(values) -> np.ndarray:
    """Scale to [0, 1]. A constant (or single) input maps to all zeros."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return x.copy()
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def _scale(x, lo, hi):
    x = np.asarray(x, dtype=float)
    if hi == lo:
        return np.zeros_like(x)
    return np.clip((x - lo) / (hi - lo), 0.0, 1.0)


@dataclass(frozen=True)
class FeatureWeights:
    alpha: float = 1 / 3  # hop distance
    beta: float = 1 / 3  # population
    gamma: float = 1 / 3  # data centres

    def __post_init__(self):
        w = (self.alpha, self.beta, self.gamma)
        if any(v < 0 or not math.isfinite(v) for v in w):
            raise ValidationError(f"weights must be finite and non-negative, got {w}")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ValidationError(f"weights must sum to 1 (got {sum(w)!r})")


@dataclass(frozen=True)
class NormalizedFeatures:
    """Per-country features scaled to [0, 1] against a chosen scope.

    ``ids`` are the countries covered; ``scope`` the countries whose min/max
    set the bounds (cluster members, or the whole dataset).
    """

    ids: tuple[str, ...]
    population: np.ndarray
    dc: np.ndarray
    hop: np.ndarray
    bounds: dict
    dc_sign: int = 1
    scope: tuple[str, ...] = ()
    index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {c: i for i, c in enumerate(self.ids)})

    def sub(self, ids: Sequence[str]) -> "NormalizedFeatures":
        """Restrict to ``ids`` without renormalising."""
        idx = np.array([self.index[c] for c in ids], dtype=int)
        return NormalizedFeatures(
            tuple(ids), self.population[idx], self.dc[idx], self.hop[np.ix_(idx, idx)],
            self.bounds, self.dc_sign, self.scope,
        )


def normalize_features(dataset, ids: Iterable[str] | None = None, scope: Iterable[str] | None = None, dc_sign: int = 1):
    """Build :class:`NormalizedFeatures` for ``ids`` using bounds taken over ``scope``.

    Both default to every country in ``dataset``. Hop-distance bounds are the
    min and max haversine distance over distinct pairs inside the scope.
    """
    if dc_sign not in (1, -1):
        raise ValidationError("dc_sign must be +1 or -1")
    ids = tuple(dataset.ids if ids is None else ids)
    scope = tuple(dataset.ids if scope is None else scope)
    if not set(ids) <= set(scope):
        raise ValidationError("normalisation scope must contain every routed country")
    sc = [dataset[c] for c in scope]
    pop_s = np.array([c.population for c in sc], dtype=float)
    dc_s = np.array([c.dc_count for c in sc], dtype=float)
    hs = haversine_matrix([c.centroid.lat for c in sc], [c.centroid.lon for c in sc])
    off = hs[~np.eye(len(sc), dtype=bool)]
    h_lo, h_hi = (float(off.min()), float(off.max())) if off.size else (0.0, 0.0)

    cs = [dataset[c] for c in ids]
    hop = _scale(haversine_matrix([c.centroid.lat for c in cs], [c.centroid.lon for c in cs]), h_lo, h_hi)
    np.fill_diagonal(hop, 0.0)
    bounds = {
        "population": (float(pop_s.min()), float(pop_s.max())),
        "dc_count": (float(dc_s.min()), float(dc_s.max())),
        "haversine_km": (h_lo, h_hi),
    }
    return NormalizedFeatures(
        ids=ids,
        population=_scale([c.population for c in cs], *bounds["population"]),
        dc=_scale([c.dc_count for c in cs], *bounds["dc_count"]),
        hop=hop,
        bounds=bounds,
        dc_sign=dc_sign,
        scope=scope,
    )


def _dc_term(dc, sign):
    # a "reward" sign flips the term as 1 - C so the cost stays in [0, 1]
    return dc if sign == 1 else 1.0 - dc


def weighted_distance(s: str, d: str, weights: FeatureWeights, nf: NormalizedFeatures) -> float:
    """Routing cost of hop s -> d: hop distance plus destination population and data-centre terms."""
    i, j = nf.index[s], nf.index[d]
    return float(
        weights.alpha * nf.hop[i, j]
        + weights.beta * nf.population[j]
        + weights.gamma * _dc_term(nf.dc[j], nf.dc_sign)
    )


def cost_matrix(nf: NormalizedFeatures, weights: FeatureWeights) -> np.ndarray:
    """All-pairs routing costs; entry [i, j] is the cost of moving from ids[i] to ids[j]."""
    dest = weights.beta * nf.population + weights.gamma * _dc_term(nf.dc, nf.dc_sign)
    m = weights.alpha * nf.hop + dest[None, :]
    np.fill_diagonal(m, 0.0)
    return m


def clustering_distance_matrix(nf: NormalizedFeatures, weights: FeatureWeights) -> np.ndarray:
    """Symmetric dissimilarity for the combined-feature clusterers."""
    d = (
        weights.alpha * nf.hop
        + weights.beta * np.abs(nf.population[:, None] - nf.population[None, :])
        + weights.gamma * np.abs(nf.dc[:, None] - nf.dc[None, :])
    )
    np.fill_diagonal(d, 0.0)
    return d
