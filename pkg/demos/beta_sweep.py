"""Grow networks and write the exploratory CSV tables.

Run with ``python3 demos/beta_sweep.py [iterations]`` (default 1000).
Writes to ``demos/output/``:

* ``beta_sweep.csv``: centrality against degree for beta = 0, 0.1, .., 1
  on a unit-weight network grown by degree preference.
* ``centrality_pref_beta1.csv`` and ``centrality_pref_beta8.5433.csv``:
  per-node degree, centrality and cluster coefficient for networks grown
  by centrality preference with edge weight 0.1.
* matching ``*_histogram.csv`` files with the degree histogram.

These are tables for plotting, nothing here is asserted.
"""

import csv
import sys
import warnings
from pathlib import Path

from hypercen import GenConfig, analyze, grow
from hypercen.centrality import NonCommunicativeWarning
from hypercen.netgen import beta_sweep

iterations = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
warnings.simplefilter("ignore", NonCommunicativeWarning)

unit = grow(GenConfig(iterations=iterations, edge_weight=1.0, rng_seed=1)).network
with open(out / "beta_sweep.csv", "w", newline="") as fh:
    wr = csv.writer(fh)
    wr.writerow(["beta", "node", "degree", "centrality", "note"])
    for beta, deg, cen, note in beta_sweep(unit):
        for i, d in enumerate(deg):
            wr.writerow([beta, i, int(d), "" if cen is None else repr(float(cen[i])), note])
print("wrote", out / "beta_sweep.csv")

for beta in (1.0, 8.5433):
    res = grow(GenConfig(iterations=iterations, preference_mode="centrality",
                         edge_weight=0.1, beta=beta, rng_seed=2))
    rep = analyze(res.network, beta=beta)
    stem = out / f"centrality_pref_beta{beta:g}"
    with open(f"{stem}.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["node", "degree", "centrality", "cluster_coeff"])
        wr.writerows(rep.rows())
    with open(f"{stem}_histogram.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["degree", "count"])
        wr.writerows(sorted(rep.histogram.items()))
    slope = "n/a" if rep.fit is None else f"{rep.fit.slope:.3f} (R2 {rep.fit.r2:.3f})"
    negative = 0 if rep.centrality is None else int((rep.centrality < 0).sum())
    clustered = int((rep.cluster > 0).sum())
    print(f"beta {beta:g}: degree slope {slope}, {negative} negative centralities, "
          f"{clustered} nodes with positive clustering")
