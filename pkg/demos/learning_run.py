"""Run the random-challenge learning loop and summarise how weights moved.

Run with ``python3 demos/learning_run.py``. Writes the per-step log to
``demos/output/learning_log.csv``.
"""

from pathlib import Path

import numpy as np

from hypercen import Hypergraph
from hypercen.adapt import LearningConfig, contraction, learn_demo, propose_hyperedge

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

h = Hypergraph(np.array([
    [0.6, 0.0, 0.3],
    [0.6, 0.4, 0.0],
    [0.0, 0.4, 0.8],
    [0.2, 0.0, 0.8],
]))
final, rows = learn_demo(h, 500, LearningConfig(rate=0.05, punishment=0.02), seed=5,
                         f_a=contraction(0.5), log_path=out / "learning_log.csv")
print("start weights:\n", h.weights)
print("after 500 steps:\n", np.round(final.weights, 4))
clamped = sum(1 for r in rows if r[6])
print(f"{len(rows)} updates logged, {clamped} hit a bound")

p = propose_hyperedge(final, 0, 2, beta1=1.0, beta2=0.2)
print("suggested partners for node 0:", p.members)
