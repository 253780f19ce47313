import hashlib
import json
import math

import pytest

from afronet.dataset import AdjacencyGraph, CountryDataset, dump_countries
from afronet.errors import PlanIOError, ValidationError
from afronet.pipeline import (
    ContinentalPlan,
    RunConfig,
    bridge_components,
    bundled_config,
    bundled_config_names,
    dot_text,
    export_csv,
    export_geojson,
    geojson_dict,
    read_routes_csv,
    replay,
    report_costs,
    routes_csv_text,
    run_plan,
    stage_seed,
)

FAST = dict(ants=150, iterations=30)


@pytest.fixture(scope="module")
def au_plan():
    return run_plan(bundled_config("au"), write=False)


def rows_by_name(plan):
    return {r.cluster: r for r in report_costs(plan)}


# ---------------------------------------------------------------- config


def test_bundled_configs_parse():
    names = bundled_config_names()
    assert {"au", "multi_k5", "multi_k6", "unclustered", "kmeans_geo", "kmedoids_haversine"} <= set(names)
    for n in names:
        assert isinstance(bundled_config(n), RunConfig)


def test_parse_flat_format():
    cfg = RunConfig.parse("# comment\nseed = 9\nmethod = kmedoids\nk = 4\ngateways.Western = ghana, nigeria\n")
    assert cfg.seed == 9 and cfg.k == 4 and cfg.gateways == {"Western": ("ghana", "nigeria")}


@pytest.mark.parametrize("text", ["seed 9\n", "colour = red\n", "k = five\n", "method = spectral\n", "merge_singletons = maybe\n"])
def test_parse_errors(text):
    with pytest.raises(ValidationError):
        RunConfig.parse(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(PlanIOError):
        RunConfig.load(tmp_path / "nope.conf")
    with pytest.raises(PlanIOError):
        bundled_config("nope")


def test_dict_round_trip():
    cfg = bundled_config("au")
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_stage_seeds_independent():
    assert stage_seed(1, "inter") != stage_seed(1, "unclustered")
    assert stage_seed(1, "inter") == stage_seed(1, "inter")
    assert stage_seed(1, "inter") != stage_seed(2, "inter")


# ---------------------------------------------------------------- AU plan


def test_au_plan_shape(au_plan):
    assert au_plan.assignment.k == 5
    assert set(au_plan.traversals) == {"Western", "Northern", "Central", "Southern", "Eastern"}
    assert len(au_plan.inter.path) == 8 and au_plan.inter.complete
    assert len(au_plan.routes) == 55


def test_au_routes_end_at_gateways(au_plan, ref_graph):
    for src, r in au_plan.routes.items():
        spec = au_plan.specs[au_plan.cluster_of(src)]
        assert r.path[0] == src and r.path[-1] in spec.gateways
        assert len(set(r.path)) == len(r.path)
        assert set(r.path) <= spec.members


def test_au_cost_rows(au_plan):
    rows = rows_by_name(au_plan)
    assert rows["Central"].countries == 9
    assert rows["Southern"].countries == 10
    per = [rows[n].cost for n in ("Western", "Northern", "Central", "Southern", "Eastern")]
    assert rows["intra_total"].cost == pytest.approx(math.fsum(per), abs=1e-12)
    assert rows["continental_total"].cost == pytest.approx(rows["intra_total"].cost + rows["inter_total"].cost, abs=1e-12)
    assert rows["inter_total"].cost == au_plan.inter.trc


def test_single_cluster_report():
    cfg = RunConfig(method="kmeans", k=1, routes=False, inter=False, **FAST)
    rows = report_costs(run_plan(cfg, write=False))
    assert [r.cluster for r in rows][1:] == ["intra_total", "inter_total", "continental_total"]
    assert rows[0].countries == 55


def test_au_traversals_cover_members(au_plan):
    for name, r in au_plan.traversals.items():
        assert sorted(r.path) == sorted(au_plan.specs[name].members)


# ---------------------------------------------------------------- other modes


def test_unclustered_covers_everything():
    plan = run_plan(bundled_config("unclustered"), write=False)
    r = plan.unclustered
    assert r.complete and len(r.path) == 55 == len(set(r.path))
    assert math.isfinite(r.trc) and plan.assignment is None
    assert rows_by_name(plan)["unclustered"].countries == 55


def test_empty_dataset_fails_validation(tmp_path):
    p = tmp_path / "empty.csv"
    dump_countries(CountryDataset(), p.open("w"))
    with pytest.raises(ValidationError, match=r"^\[validation\]"):
        run_plan(RunConfig(countries=str(p)), write=False)


def test_unknown_override_cluster():
    with pytest.raises(ValidationError, match=r"^\[clustering\]"):
        run_plan(RunConfig(gateways={"Atlantis": ("kenya",)}, **FAST), write=False)


def test_bridge_components(ref_graph, ref):
    sub = ref_graph.subgraph(["madagascar", "mauritius", "kenya", "uganda"])
    g, added = bridge_components(sub, ref)
    assert g.is_connected() and len(added) == len(sub.components()) - 1
    bare = AdjacencyGraph(sub.nodes, frozenset())
    g2, added2 = bridge_components(bare, ref)
    assert g2.is_connected() and len(added2) == 3
    assert ("madagascar", "mauritius") in added2  # the shortest hop is always taken


# ---------------------------------------------------------------- exports


def test_empty_plan_geojson():
    d = geojson_dict(ContinentalPlan(RunConfig()))
    assert d == {"type": "FeatureCollection", "features": []}


def test_linestrings_match_hops(au_plan):
    d = geojson_dict(au_plan)
    lines = [f for f in d["features"] if f["geometry"]["type"] == "LineString"]
    points = [f for f in d["features"] if f["geometry"]["type"] == "Point"]
    assert len(lines) == sum(len(r.hops) for _, r in au_plan.all_results())
    assert len(points) == 55 and all(p["properties"]["cluster"] for p in points)


def test_geojson_round_trip(au_plan, tmp_path, ref):
    path = export_geojson(au_plan, tmp_path / "p.geojson")
    d = json.loads(path.read_text())
    for f in d["features"]:
        if f["geometry"]["type"] == "Point":
            c = ref[f["properties"]["id"]].centroid
            lon, lat = f["geometry"]["coordinates"]  # RFC 7946 order
            assert round(c.lon, 6) == lon and round(c.lat, 6) == lat


def test_routes_csv_round_trip(au_plan, tmp_path):
    path = export_csv(au_plan, tmp_path / "routes.csv")
    rows = read_routes_csv(path)
    results = au_plan.all_results()
    assert len(rows) == len(results)
    for row, (_, r) in zip(rows, results):
        assert row["path"] == r.path
        assert row["cost"] == pytest.approx(r.trc, abs=5e-10)
    assert routes_csv_text(au_plan).splitlines()[0] == "source,destination_set,path,cost"


def test_dot_is_digraph(au_plan):
    text = dot_text(au_plan)
    assert text.startswith("digraph plan {") and '"uganda" -> "kenya"' in text


def test_unwritable_output(au_plan, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(PlanIOError):
        export_csv(au_plan, blocker / "routes.csv")


def test_manifest_replay(tmp_path):
    cfg = bundled_config("au").replace(output_dir=str(tmp_path), **FAST)
    plan = run_plan(cfg)
    names = {p.name for p in tmp_path.iterdir()}
    assert {"routes.csv", "plan.geojson", "plan.dot", "costs.csv", "assignments.csv", "manifest.json"} <= names
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seeds"]["inter"] == plan.seeds["inter"]
    assert set(manifest["routing_specs"]) >= {"Western", "inter"}
    again = replay(manifest)
    assert again.all_results() == plan.all_results()
    assert routes_csv_text(again) == (tmp_path / "routes.csv").read_text()
    assert hashlib.sha256(routes_csv_text(again).encode()).hexdigest() == manifest["digests"]["routes.csv"]
