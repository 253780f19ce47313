"""Prime continental gateways, per-cluster gateway choice and less-desirable trail sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import ValidationError

DEFAULT_DESERT = frozenset({"chad", "mali", "mauritania", "niger", "sudan", "tunisia", "western_sahara"})
DEFAULT_NEUTRAL = frozenset({"algeria", "egypt", "libya"})


@dataclass(frozen=True)
class GatewayConfig:
    """Gateway and stench settings for one run.

    ``neutral_set`` holds Sahara countries that receive neither boost nor
    stench even when they act as gateways.
    """

    pcg_threshold: int = 5
    desert_set: frozenset = DEFAULT_DESERT
    neutral_set: frozenset = DEFAULT_NEUTRAL

    def __post_init__(self):
        object.__setattr__(self, "desert_set", frozenset(self.desert_set))
        object.__setattr__(self, "neutral_set", frozenset(self.neutral_set))
        if int(self.pcg_threshold) < 1:
            raise ValidationError("pcg_threshold must be at least 1")


@dataclass(frozen=True)
class ClusterRoutingSpec:
    """Target set G and stench set U for one routing run.

    Destinations in ``gateways`` get the boost rate unless they are also
    listed in ``neutral``.
    """

    label: object
    gateways: frozenset
    ldts: frozenset = frozenset()
    neutral: frozenset = field(default=frozenset())
    members: frozenset | None = None

    def __post_init__(self):
        for name in ("gateways", "ldts", "neutral"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.members is not None:
            object.__setattr__(self, "members", frozenset(self.members))
        if not self.gateways:
            raise ValidationError(f"cluster {self.label}: empty gateway set")
        if self.gateways & self.ldts:
            raise ValidationError(f"cluster {self.label}: {sorted(self.gateways & self.ldts)} both gateway and LDT")
        if self.members is not None and not self.gateways <= self.members:
            raise ValidationError(f"cluster {self.label}: gateways {sorted(self.gateways - self.members)} not members")

    @property
    def boosted(self) -> frozenset:
        return self.gateways - self.neutral


def select_pcgs(landings: Mapping[str, int], threshold: int = 5) -> frozenset:
    """Countries with at least ``threshold`` independent landings."""
    return frozenset(c for c, n in landings.items() if n >= threshold)


def fallback_gateway(members: Iterable[str], dataset) -> str:
    """Gateway for a cluster with no PCG.

    Prefers members with at least one landing, then the most data centres,
    then the most landings, then the lowest id.
    """
    members = sorted(members)
    if not members:
        raise ValidationError("cluster has no members")

    def key(c):
        rec = dataset[c]
        return (rec.landings > 0, rec.dc_count, rec.landings)

    best = max(key(c) for c in members)
    return next(c for c in members if key(c) == best)


def cluster_gateways(members: Iterable[str], pcgs: Iterable[str], dataset) -> frozenset:
    members = frozenset(members)
    if not members:
        raise ValidationError("cluster has no members")
    hit = members & frozenset(pcgs)
    return hit if hit else frozenset({fallback_gateway(members, dataset)})


def cluster_ldts(members: Iterable[str], config: GatewayConfig, gateways: Iterable[str] = ()) -> frozenset:
    return (frozenset(members) & config.desert_set) - frozenset(gateways) - config.neutral_set


def build_spec(label, members, pcgs, dataset, config: GatewayConfig, gateways=None, ldts=None) -> ClusterRoutingSpec:
    """Routing spec for a cluster, using explicit ``gateways``/``ldts`` when given."""
    members = frozenset(members)
    g = frozenset(gateways) if gateways else cluster_gateways(members, pcgs, dataset)
    u = frozenset(ldts) if ldts is not None else cluster_ldts(members, config, g)
    return ClusterRoutingSpec(label, g, u - g, config.neutral_set & g, members)
