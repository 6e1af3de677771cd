"""A short walk through centrality on a small weighted hypergraph.

Run with ``python3 demos/centrality_tour.py``. Prints to stdout only.
"""

import warnings

import numpy as np

from hypercen import Hypergraph, PoleError, general_centrality_hyper, project
from hypercen.centrality import (
    NonCommunicativeWarning,
    balance_report,
    eigencentrality_hyper,
    general_centrality_graph,
)
from hypercen.spectral import lambda_max

# Four people, three groups. Row i, column j is how strongly person i
# belongs to group j.
w = np.array([
    [1.0, 0.5, 0.0],
    [0.5, 0.0, 0.0],
    [0.0, 1.0, 0.25],
    [0.0, 0.0, 1.0],
])
h = Hypergraph(w)
a = project(h).adjacency
lam = lambda_max(a)
print("projected adjacency W W^T:\n", a)
print(f"largest eigenvalue {lam:.6f}, so beta below {1 / lam:.6f} keeps counts meaningful")

res = general_centrality_hyper(h, alpha1=1.0, alpha2=1.0, beta1=1.0, beta2=0.5 / lam)
print("node centrality x:", np.round(res.node_scores, 4))
print("edge centrality y:", np.round(res.edge_scores, 4))
print("x splits into an edge part and a node part:",
      np.round(res.meta["edge_term"], 4), "+", np.round(res.meta["node_term"], 4))

eig = eigencentrality_hyper(h)
print("eigenvector centrality of nodes:", np.round(eig.node_scores, 4))

# At beta = 1/lambda the resolvent does not exist.
try:
    general_centrality_graph(a, 1.0, 1 / lam)
except PoleError as exc:
    print("pole reported:", exc)

# Past the pole scores stop being counts and can turn negative.
with warnings.catch_warnings():
    warnings.simplefilter("ignore", NonCommunicativeWarning)
    wild = general_centrality_graph(a, 1.0, 2.0 / lam)
bal = balance_report(a, 2.0 / lam, wild)
print("beyond the pole:", np.round(wild.node_scores, 4), wild.meta["regime"])
print("positive-neighbour part:", np.round(bal.pos_sum, 4))
print("negative-neighbour part:", np.round(bal.neg_sum, 4))
