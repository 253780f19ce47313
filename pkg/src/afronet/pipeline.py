"""End-to-end runs: cluster, pick gateways, route inside clusters, route across
clusters, optionally route the whole continent without clusters; then report
and export.

Run configuration is a flat ``key = value`` text file. Lists are comma
separated; per-cluster overrides use dotted keys such as
``gateways.Western = ghana``. See the bundled files under ``afronet/configs``.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import zlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np

from . import __version__
from .aco import AcoParams, RouteResult, find_route, run_inter_cluster, traverse_all
from .clustering import (
    ClusterAssignment,
    au_reference,
    geo_features,
    hac_complete,
    kmeans,
    kmedoids,
    merge_singletons,
    multi_features,
    name_clusters,
    optics_xi,
)
from .dataset import (
    AdjacencyGraph,
    CountryDataset,
    build_adjacency,
    landings_per_country,
    load_cables,
    load_countries,
    load_edges,
    load_landings,
    reference_borders,
    reference_dataset,
    reference_maritime,
)
from .errors import AfronetError, PlanIOError, ValidationError
from .gateways import DEFAULT_DESERT, DEFAULT_NEUTRAL, ClusterRoutingSpec, GatewayConfig, build_spec, select_pcgs
from .metrics import FeatureWeights, haversine_matrix, normalize_features

log = logging.getLogger(__name__)

METHODS = ("au", "kmeans", "kmedoids", "hac", "optics")


def _split(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class RunConfig:
    name: str = "run"
    mode: str = "clustered"  # or "unclustered"
    seed: int = 0
    # inputs (None -> bundled reference data)
    countries: str | None = None
    cables: str | None = None
    landings: str | None = None
    borders: str | None = None
    maritime: str | None = None
    # clustering
    method: str = "au"
    features: str = "geo"  # geo | multi
    metric: str = "haversine"
    k: int = 5
    cut_distance: float = 35.0
    min_pts: int = 3
    xi: float = 0.05
    merge_singletons: bool = False
    # graphs and costs
    adjacency: str = "borders"
    traversal_adjacency: str = "complete"
    norm_scope: str = "cluster"
    dc_sign: int = 1
    alpha: float = 1 / 3
    beta: float = 1 / 3
    gamma: float = 1 / 3
    # gateways
    pcg_threshold: int = 5
    desert_set: tuple = tuple(sorted(DEFAULT_DESERT))
    neutral_set: tuple = tuple(sorted(DEFAULT_NEUTRAL))
    gateways: Mapping[str, tuple] = field(default_factory=dict)
    ldts: Mapping[str, tuple] = field(default_factory=dict)
    inter_nodes: tuple = ()
    inter_ldts: tuple | None = None
    # colony
    ants: int = 1000
    iterations: int = 100
    threshold: float = 0.8
    rho: float = 0.2
    initial_pheromone: float = 0.2
    deposit: str = "online"
    inter_ants: int = 100
    inter_iterations: int = 50
    unclustered_ants: int = 100
    unclustered_iterations: int = 100
    # stages
    routes: bool = True
    traversals: bool = True
    inter: bool = True
    unclustered: bool = False
    output_dir: str | None = None

    def __post_init__(self):
        checks = [
            (self.mode in ("clustered", "unclustered"), f"unknown mode {self.mode!r}"),
            (self.method in METHODS, f"unknown clustering method {self.method!r}"),
            (self.features in ("geo", "multi"), f"unknown feature set {self.features!r}"),
            (self.metric in ("euclidean", "haversine", "weighted"), f"unknown metric {self.metric!r}"),
            (self.adjacency in ("borders", "complete"), f"unknown adjacency {self.adjacency!r}"),
            (self.traversal_adjacency in ("borders", "complete"), f"unknown adjacency {self.traversal_adjacency!r}"),
            (self.norm_scope in ("cluster", "global"), f"unknown norm scope {self.norm_scope!r}"),
            (self.dc_sign in (1, -1), "dc_sign must be 1 or -1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValidationError(msg)
        self.weights  # validates the weight triple
        self.aco  # validates colony settings

    @property
    def weights(self) -> FeatureWeights:
        return FeatureWeights(self.alpha, self.beta, self.gamma)

    @property
    def aco(self) -> AcoParams:
        return AcoParams(
            threshold=self.threshold, ants=self.ants, iterations=self.iterations,
            initial_pheromone=self.initial_pheromone, rho=self.rho, weights=self.weights,
            seed=self.seed, deposit=self.deposit,
        )

    @property
    def gateway_config(self) -> GatewayConfig:
        return GatewayConfig(self.pcg_threshold, frozenset(self.desert_set), frozenset(self.neutral_set))

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Mapping):
                v = {k: list(x) for k, x in sorted(v.items())}
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "RunConfig":
        kw = {}
        names = {f.name: f for f in dataclasses.fields(cls)}
        for key, v in data.items():
            if key not in names:
                raise ValidationError(f"unknown config key {key!r}")
            if key in ("gateways", "ldts"):
                v = {k: tuple(x) for k, x in v.items()}
            elif isinstance(v, list):
                v = tuple(v)
            kw[key] = v
        return cls(**kw)

    @classmethod
    def parse(cls, text: str, base_dir: Path | None = None) -> "RunConfig":
        kw: dict = {"gateways": {}, "ldts": {}}
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"config line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key.startswith(("gateways.", "ldts.")):
                group, cname = key.split(".", 1)
                kw[group][cname] = _split(value)
                continue
            if key not in types:
                raise ValidationError(f"config line {lineno}: unknown key {key!r}")
            kw[key] = _coerce(key, value, types[key], lineno)
            if key in ("countries", "cables", "landings", "borders", "maritime") and base_dir is not None:
                p = Path(kw[key])
                kw[key] = str(p if p.is_absolute() else (base_dir / p))
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise PlanIOError(f"{path}: {exc.strerror or exc}") from exc
        return cls.parse(text, path.parent)


def _coerce(key, value, typ, lineno):
    typ = str(typ)
    try:
        if key == "inter_ldts":
            return _split(value)
        if typ.startswith("tuple"):
            return _split(value)
        if typ.startswith("bool"):
            return _bool(value)
        if typ.startswith("int"):
            return int(value)
        if typ.startswith("float"):
            return float(value)
        return value
    except ValueError as exc:
        raise ValidationError(f"config line {lineno}: {key}: {exc}") from None


def bundled_config(name: str) -> RunConfig:
    """Load one of the bundled experiment configs by stem (e.g. ``au``)."""
    res = resources.files("afronet.configs").joinpath(f"{name}.conf")
    if not res.is_file():
        raise PlanIOError(f"no bundled config named {name!r}")
    return RunConfig.parse(res.read_text(encoding="utf-8"))


def bundled_config_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("afronet.configs").iterdir() if p.name.endswith(".conf"))


def stage_seed(seed: int, stage: str) -> int:
    """Independent 32-bit seed for a named stage, derived from the run seed."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, zlib.crc32(stage.encode("utf-8"))])
    return int(ss.generate_state(1)[0])


# ---------------------------------------------------------------- data loading

def _open(path):
    try:
        return open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise PlanIOError(f"{path}: {exc.strerror or exc}") from exc


def load_inputs(config: RunConfig) -> tuple[CountryDataset, list, list]:
    """Dataset (with landings), border edges and maritime edges for a config."""
    if config.countries is None:
        ds = reference_dataset()
    else:
        with _open(config.countries) as fh:
            ds = load_countries(fh)
        counts = {}
        if config.cables:
            with _open(config.cables) as fh:
                counts = landings_per_country(load_cables(fh, ds.ids))
        if config.landings:
            with _open(config.landings) as fh:
                counts.update(load_landings(fh))
        ds = ds.with_landings(counts)
    if config.borders is None:
        borders = reference_borders()
    else:
        with _open(config.borders) as fh:
            borders = load_edges(fh)
    if config.maritime is None:
        maritime = reference_maritime() if config.countries is None else []
    else:
        with _open(config.maritime) as fh:
            maritime = load_edges(fh)
    if len(ds) == 0:
        raise ValidationError("dataset is empty")
    return ds, borders, maritime


# ---------------------------------------------------------------- plan


@dataclass
class CostRow:
    cluster: str
    countries: int
    cost: float


@dataclass
class ContinentalPlan:
    config: RunConfig
    assignment: ClusterAssignment | None = None
    specs: dict = field(default_factory=dict)  # cluster name -> ClusterRoutingSpec
    routes: dict = field(default_factory=dict)  # country id -> RouteResult (to its cluster gateway)
    traversals: dict = field(default_factory=dict)  # cluster name -> RouteResult
    inter: RouteResult | None = None
    inter_spec: ClusterRoutingSpec | None = None
    unclustered: RouteResult | None = None
    unclustered_spec: ClusterRoutingSpec | None = None
    dataset: CountryDataset | None = None
    seeds: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    bridges: dict = field(default_factory=dict)  # cluster name -> added (a, b) links

    def all_results(self) -> list[tuple[str, RouteResult]]:
        """Every route in export order, tagged with its kind."""
        out = []
        for cid in sorted(self.routes):
            out.append(("route", self.routes[cid]))
        for name in sorted(self.traversals):
            out.append(("traversal", self.traversals[name]))
        if self.inter is not None:
            out.append(("inter", self.inter))
        if self.unclustered is not None:
            out.append(("unclustered", self.unclustered))
        return out

    def cluster_of(self, country: str) -> str | None:
        if self.assignment is None or country not in self.assignment.labels:
            return None
        lab = self.assignment.labels[country]
        return None if lab < 0 else self.assignment.name(lab)


def cluster_dataset(config: RunConfig, ds: CountryDataset) -> ClusterAssignment:
    """Run the configured clustering and name clusters after the AU regions they overlap most."""
    ref = au_reference(ds)
    if config.method == "au":
        return ref
    feats = multi_features(ds, config.weights) if config.features == "multi" else geo_features(ds)
    metric = config.metric
    if config.features == "geo" and metric == "weighted":
        raise ValidationError("weighted metric needs features = multi")
    if config.method == "kmeans":
        a = kmeans(feats, config.k, seed=stage_seed(config.seed, "cluster"))
    elif config.method == "kmedoids":
        a = kmedoids(feats, config.k, metric)
    elif config.method == "hac":
        a = hac_complete(feats, config.cut_distance, metric)
    else:
        a = optics_xi(feats, config.min_pts, config.xi, metric)
    a = name_clusters(a, ref)
    if config.merge_singletons:
        a = merge_singletons(a, ds)
    return a


def bridge_components(graph: AdjacencyGraph, ds: CountryDataset) -> tuple[AdjacencyGraph, list]:
    """Connect a disconnected graph by adding the shortest great-circle link between
    components, Kruskal style, until one component remains."""
    comps = graph.components()
    if len(comps) <= 1:
        return graph, []
    ids = sorted(graph.nodes)
    H = haversine_matrix([ds[c].centroid.lat for c in ids], [ds[c].centroid.lon for c in ids])
    comp_of = {c: i for i, comp in enumerate(comps) for c in comp}
    parent = list(range(len(comps)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pairs = sorted(
        (H[i, j], ids[i], ids[j])
        for i in range(len(ids))
        for j in range(i + 1, len(ids))
        if comp_of[ids[i]] != comp_of[ids[j]]
    )
    added = []
    for _, a, b in pairs:
        ra, rb = find(comp_of[a]), find(comp_of[b])
        if ra != rb:
            parent[ra] = rb
            added.append((a, b))
            if len(added) == len(comps) - 1:
                break
    return graph.with_edges(added), added


def _scoped_features(config: RunConfig, ds: CountryDataset, members, scope_override=None):
    scope = scope_override
    if scope is None:
        scope = members if config.norm_scope == "cluster" else ds.ids
    return normalize_features(ds, ids=sorted(members), scope=sorted(scope), dc_sign=config.dc_sign)


def _member_list(members, config, name, group):
    chosen = getattr(config, group).get(name)
    if chosen is None:
        return None
    stray = set(chosen) - set(members)
    if group == "gateways" and stray:
        raise ValidationError(f"{group}.{name}: {sorted(stray)} are not members of cluster {name}")
    return frozenset(c for c in chosen if c in members)


def run_plan(config: RunConfig, write: bool = True) -> ContinentalPlan:
    """Execute every enabled stage. Errors are re-raised tagged with the failing stage."""
    stage = "validation"
    try:
        ds, borders, maritime = load_inputs(config)
        plan = ContinentalPlan(config, dataset=ds)
        gcfg = config.gateway_config
        pcgs = select_pcgs({c.id: c.landings for c in ds}, gcfg.pcg_threshold)
        if pcgs & gcfg.desert_set:
            raise ValidationError(f"desert set overlaps gateways {sorted(pcgs & gcfg.desert_set)}")
        full_graph = build_adjacency(ds, "borders", [(a, b) for a, b in maritime if a in ds and b in ds], borders)
        if config.adjacency == "complete":
            full_graph = build_adjacency(ds, "complete")

        if config.mode == "unclustered" or config.unclustered:
            stage = "unclustered"
            members = frozenset(ds.ids)
            spec = build_spec("continent", members, pcgs, ds, gcfg)
            nf = normalize_features(ds, dc_sign=config.dc_sign)
            seed = stage_seed(config.seed, "unclustered")
            plan.seeds["unclustered"] = seed
            plan.bounds["unclustered"] = nf.bounds
            params = config.aco.with_(seed=seed, ants=config.unclustered_ants, iterations=config.unclustered_iterations)
            plan.unclustered_spec = spec
            plan.unclustered = traverse_all(build_adjacency(ds, "complete"), members, spec, params, nf)
            if config.mode == "unclustered":
                if write and config.output_dir:
                    write_outputs(plan, config.output_dir)
                return plan

        stage = "clustering"
        assignment = cluster_dataset(config, ds)
        plan.assignment = assignment
        unknown = (set(config.gateways) | set(config.ldts)) - {assignment.name(l) for l in assignment.cluster_labels}
        if unknown:
            raise ValidationError(f"overrides name unknown clusters {sorted(unknown)}")

        stage = "gateways"
        for lab in assignment.cluster_labels:
            name = assignment.name(lab)
            members = frozenset(assignment.members(lab))
            plan.specs[name] = build_spec(
                name, members, pcgs, ds, gcfg,
                _member_list(members, config, name, "gateways"),
                _member_list(members, config, name, "ldts"),
            )

        for name, spec in sorted(plan.specs.items()):
            members = spec.members
            nf = _scoped_features(config, ds, members)
            plan.bounds[name] = nf.bounds
            if config.routes:
                stage = f"routing:{name}"
                graph, added = bridge_components(full_graph.subgraph(members), ds)
                if added:
                    plan.bridges[name] = added
                for src in sorted(members):
                    seed = stage_seed(config.seed, f"route:{name}:{src}")
                    plan.seeds[f"route:{src}"] = seed
                    plan.routes[src] = find_route(graph, src, spec, config.aco.with_(seed=seed), nf)
            if config.traversals:
                stage = f"traversal:{name}"
                tgraph = (
                    build_adjacency(ds.subset(members), "complete")
                    if config.traversal_adjacency == "complete"
                    else full_graph.subgraph(members)
                )
                seed = stage_seed(config.seed, f"traverse:{name}")
                plan.seeds[f"traverse:{name}"] = seed
                plan.traversals[name] = traverse_all(tgraph, members, spec, config.aco.with_(seed=seed), nf)

        if config.inter:
            stage = "inter"
            nodes = frozenset(config.inter_nodes) or frozenset().union(*(s.gateways for s in plan.specs.values()))
            missing = nodes - set(ds.ids)
            if missing:
                raise ValidationError(f"inter_nodes not in dataset: {sorted(missing)}")
            if config.inter_ldts is not None:
                ldts = frozenset(config.inter_ldts) & nodes
            else:
                ldts = (nodes & gcfg.desert_set) - gcfg.neutral_set
            spec = ClusterRoutingSpec("inter", nodes - ldts, ldts, gcfg.neutral_set & nodes)
            nf = normalize_features(ds, ids=sorted(nodes), dc_sign=config.dc_sign)
            seed = stage_seed(config.seed, "inter")
            plan.seeds["inter"] = seed
            plan.bounds["inter"] = nf.bounds
            plan.inter_spec = spec
            params = config.aco.with_(seed=seed)
            plan.inter = run_inter_cluster(
                build_adjacency(ds.subset(nodes), "complete"), spec, params, nf,
                ants=config.inter_ants, iterations=config.inter_iterations,
            )
    except AfronetError as exc:
        if not str(exc).startswith("["):
            exc.args = (f"[{stage}] {exc}",) + exc.args[1:]
        raise
    if write and config.output_dir:
        write_outputs(plan, config.output_dir)
    return plan


# ---------------------------------------------------------------- reporting


def report_costs(plan: ContinentalPlan) -> list[CostRow]:
    """Per-cluster traversal cost rows followed by intra, inter and continental totals."""
    rows = []
    for name in sorted(plan.traversals):
        r = plan.traversals[name]
        rows.append(CostRow(name, len(r.path), r.trc))
    intra = math.fsum(r.cost for r in rows)
    rows.append(CostRow("intra_total", sum(r.countries for r in rows), intra))
    inter = plan.inter.trc if plan.inter is not None else 0.0
    rows.append(CostRow("inter_total", len(plan.inter.path) if plan.inter else 0, inter))
    rows.append(CostRow("continental_total", rows[-2].countries, intra + inter))
    if plan.unclustered is not None:
        rows.append(CostRow("unclustered", len(plan.unclustered.path), plan.unclustered.trc))
    return rows


def format_costs(rows: list[CostRow]) -> str:
    width = max([len(r.cluster) for r in rows] + [7])
    lines = [f"{'cluster':<{width}}  countries        cost"]
    lines += [f"{r.cluster:<{width}}  {r.countries:>9d}  {r.cost:>10.4f}" for r in rows]
    return "\n".join(lines)


# ---------------------------------------------------------------- exports

COST_FMT = "{:.9f}"


def _dest_set(kind: str, r: RouteResult, plan: ContinentalPlan) -> str:
    if kind == "route":
        return ";".join(sorted(plan.specs[plan.cluster_of(r.path[0])].gateways))
    return ";".join(sorted(r.path))


def _write_text(path, text: str):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise PlanIOError(f"{path}: {exc.strerror or exc}") from exc


def routes_csv_text(plan: ContinentalPlan) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["source", "destination_set", "path", "cost"])
    for kind, r in plan.all_results():
        w.writerow([r.path[0], _dest_set(kind, r, plan), ";".join(r.path), COST_FMT.format(r.trc)])
    return buf.getvalue()


def export_csv(plan: ContinentalPlan, path) -> Path:
    _write_text(path, routes_csv_text(plan))
    return Path(path)


def read_routes_csv(path) -> list[dict]:
    with _open(path) as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["path"] = tuple(row["path"].split(";")) if row["path"] else ()
        row["destination_set"] = tuple(row["destination_set"].split(";")) if row["destination_set"] else ()
        row["cost"] = float(row["cost"])
    return rows


def assignments_csv_text(assignment: ClusterAssignment) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["country_id", "method", "label"])
    for cid, lab in assignment.labels.items():
        w.writerow([cid, assignment.method, lab])
    return buf.getvalue()


def elbow_csv_text(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "score", "chosen"])
    for k, s in zip(report.ks, report.scores):
        w.writerow([k, f"{s:.9g}", int(k == report.chosen_k)])
    return buf.getvalue()


def geojson_dict(plan: ContinentalPlan) -> dict:
    """RFC 7946 FeatureCollection: one Point per country, one LineString per route hop."""
    feats = []
    ds = plan.dataset
    if ds is None:
        return {"type": "FeatureCollection", "features": []}

    def coord(c):
        p = ds[c].centroid
        return [round(p.lon, 6), round(p.lat, 6)]

    for c in ds:
        feats.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": coord(c.id)},
            "properties": {"id": c.id, "name": c.name, "cluster": plan.cluster_of(c.id)},
        })
    for kind, r in plan.all_results():
        for (a, b), cost in zip(r.hops, r.hop_costs):
            feats.append({
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [coord(a), coord(b)]},
                "properties": {"kind": kind, "source": r.path[0], "from": a, "to": b, "cost": round(cost, 9)},
            })
    return {"type": "FeatureCollection", "features": feats}


def export_geojson(plan: ContinentalPlan, path) -> Path:
    _write_text(path, json.dumps(geojson_dict(plan), indent=1) + "\n")
    return Path(path)


def dot_text(plan: ContinentalPlan) -> str:
    lines = ["digraph plan {", "  rankdir=LR;"]
    seen = set()
    for kind, r in plan.all_results():
        for (a, b), cost in zip(r.hops, r.hop_costs):
            key = (kind, a, b)
            if key in seen:
                continue
            seen.add(key)
            lines.append(f'  "{a}" -> "{b}" [label="{cost:.4f}", kind="{kind}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(plan: ContinentalPlan, path) -> Path:
    _write_text(path, dot_text(plan))
    return Path(path)


def _spec_dict(spec: ClusterRoutingSpec) -> dict:
    return {
        "gateways": sorted(spec.gateways),
        "ldts": sorted(spec.ldts),
        "neutral": sorted(spec.neutral),
        "members": sorted(spec.members) if spec.members is not None else None,
    }


def manifest_dict(plan: ContinentalPlan, artefacts: Mapping[str, str] = ()) -> dict:
    specs = {name: _spec_dict(s) for name, s in sorted(plan.specs.items())}
    if plan.inter_spec is not None:
        specs["inter"] = _spec_dict(plan.inter_spec)
    if plan.unclustered_spec is not None:
        specs["unclustered"] = _spec_dict(plan.unclustered_spec)
    return {
        "tool": "afronet",
        "version": __version__,
        "config": plan.config.to_dict(),
        "deposit_mode": plan.config.deposit,
        "deposit_cost": "full route cost of the depositing ant",
        "seeds": dict(sorted(plan.seeds.items())),
        "normalization_bounds": {k: {f: list(v) for f, v in b.items()} for k, b in sorted(plan.bounds.items())},
        "routing_specs": specs,
        "bridges": {k: [list(e) for e in v] for k, v in sorted(plan.bridges.items())},
        "assignment": dict(plan.assignment.labels) if plan.assignment else None,
        "cluster_names": {str(k): v for k, v in plan.assignment.names.items()} if plan.assignment else None,
        "costs": [dataclasses.asdict(r) for r in report_costs(plan)],
        "digests": dict(artefacts),
    }


def write_outputs(plan: ContinentalPlan, out_dir) -> dict:
    """Write routes.csv, plan.geojson, plan.dot, costs.csv, assignments.csv and manifest.json."""
    out = Path(out_dir)
    texts = {
        "routes.csv": routes_csv_text(plan),
        "plan.geojson": json.dumps(geojson_dict(plan), indent=1) + "\n",
        "plan.dot": dot_text(plan),
    }
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cluster", "countries", "cost"])
    for r in report_costs(plan):
        w.writerow([r.cluster, r.countries, COST_FMT.format(r.cost)])
    texts["costs.csv"] = buf.getvalue()
    if plan.assignment is not None:
        texts["assignments.csv"] = assignments_csv_text(plan.assignment)
    digests = {}
    for name, text in texts.items():
        _write_text(out / name, text)
        digests[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()
    _write_text(out / "manifest.json", json.dumps(manifest_dict(plan, digests), indent=2, sort_keys=True) + "\n")
    return digests


def replay(manifest: Mapping) -> ContinentalPlan:
    """Re-run a plan from a manifest's recorded configuration (nothing is written)."""
    return run_plan(RunConfig.from_dict(manifest["config"]), write=False)
