"""
A full continental plan
=======================

Runs the bundled layouts end to end, prints the cost tables and writes the
exports for one of them.
"""

# %%
import tempfile
from pathlib import Path

from afronet.pipeline import bundled_config, format_costs, replay, report_costs, run_plan

plan = run_plan(bundled_config("au"), write=False)
print(format_costs(report_costs(plan)))
print("inter route:", " > ".join(plan.inter.path))

# %%
# Upper-level cost for the three layouts that declare their gateway sets
for name in ("au", "multi_k5", "multi_k6"):
    cfg = bundled_config(name).replace(routes=False, traversals=False)
    p = run_plan(cfg, write=False)
    print(f"{name:>9}: {len(p.inter.path)} gateways, inter TRC {p.inter.trc:.4f}")

# %%
# One route over all 55 countries, no clusters
flat = run_plan(bundled_config("unclustered"), write=False)
print(len(flat.unclustered.path), "countries, TRC", round(flat.unclustered.trc, 4))

# %%
# Exports: routes.csv, plan.geojson, plan.dot, costs.csv, assignments.csv and
# manifest.json. The manifest alone is enough to re-run the plan.
out = Path(tempfile.mkdtemp())
cfg = bundled_config("au").replace(output_dir=str(out), ants=200, iterations=40)
first = run_plan(cfg)
print(sorted(p.name for p in out.iterdir()))
import json

again = replay(json.loads((out / "manifest.json").read_text()))
print("replay identical:", again.all_results() == first.all_results())
