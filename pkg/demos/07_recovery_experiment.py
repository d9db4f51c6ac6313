"""A miniature of the benchmark: three learners, one seeded grid.

Random sparse models are drawn per cell, data sampled, and all three
methods score the same trials. Everything downstream of the master
seed is deterministic, including across worker counts, so the CSV
outputs are safe to diff between machines and runs.

The full-size version of this grid runs from the command line:

    sp simulate --config grid.cfg --out-dir results --threads 8
"""

import tempfile
from pathlib import Path

from spdag import ExperimentConfig, run_grid, write_outputs

cfg = ExperimentConfig(
    p_list=(5, 6),
    n_list=(2000,),
    alpha_list=(0.001,),
    nbhd_list=(1.0, 2.0),
    trials=30,
    master_seed=314,
)
print("cells:", len(cfg.p_list) * len(cfg.n_list) * len(cfg.alpha_list) * len(cfg.nbhd_list))
print("methods:", cfg.methods)

result = run_grid(cfg, workers=2)
print("records:", len(result.records), " skips:", len(result.skips))

# Per-cell exact-skeleton recovery, the headline metric.
print(f"\n{'p':>3} {'nbhd':>5} | {'sp':>5} {'sgs':>5} {'pc':>5}")
cells = {}
for r in result.records:
    cells.setdefault((r.p, r.nbhd), {}).setdefault(r.method, []).append(r)
for (p, nbhd), by_method in sorted(cells.items()):
    rates = {
        m: sum(x.extra_edges == 0 and x.missing_edges == 0 for x in g) / len(g)
        for m, g in by_method.items()
    }
    print(f"{p:>3} {nbhd:>5} | {rates['sp']:>5.2f} {rates['sgs']:>5.2f} {rates['pc']:>5.2f}")

# The error anatomy differs by method: the search converts test noise
# into extra edges, the baselines into missing ones.
print("\ntotal extra / missing edges across all trials:")
for m in cfg.methods:
    g = [r for r in result.records if r.method == m]
    print(f"  {m:<4} {sum(r.extra_edges for r in g):>3} / {sum(r.missing_edges for r in g):>3}")

# Deterministic artifacts: trials, aggregate, per-panel figure data.
with tempfile.TemporaryDirectory() as tmp:
    paths = write_outputs(result, tmp)
    for name, path in paths.items():
        if name == "figures":
            print(f"\nfigure panels: {[Path(f).name for f in path]}")
        else:
            print(f"{name}: {Path(path).name} ({Path(path).stat().st_size} bytes)")
