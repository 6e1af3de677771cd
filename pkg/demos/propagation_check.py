"""Compare simulated message counts with the closed-form centrality.

Run with ``python3 demos/propagation_check.py``.
"""

import numpy as np

from hypercen import PropagationConfig, general_centrality_graph, simulate_graph
from hypercen.propagation import enumerate_graph, truncated_series_graph
from hypercen.spectral import lambda_max

rng = np.random.default_rng(3)
a = np.triu(rng.random((6, 6)) * (rng.random((6, 6)) < 0.6))
a = a + np.triu(a, 1).T
beta = 0.6 / lambda_max(a)

truth = general_centrality_graph(a, 1.0, beta).node_scores
stats = simulate_graph(a, PropagationConfig(beta, walks_per_node=200_000, rng_seed=11))
print(f"beta = {beta:.4f}")
print(f"{'node':>4} {'analytic':>10} {'simulated':>10} {'stderr':>8} {'z':>6} {'hops':>6}")
for i in range(a.shape[0]):
    z = (stats.estimate[i] - truth[i]) / stats.stderr[i] if stats.stderr[i] else 0.0
    print(f"{i:>4} {truth[i]:>10.4f} {stats.estimate[i]:>10.4f} {stats.stderr[i]:>8.4f} "
          f"{z:>6.2f} {stats.mean_chain_length[i]:>6.3f}")

# Counting every walk of up to 5 hops by brute force gives the
# truncated series.
exact = enumerate_graph(a, beta, 5)
print("enumerated vs truncated series, max gap:",
      float(np.abs(exact - truncated_series_graph(a, beta, 5)).max()))
