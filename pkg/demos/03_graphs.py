"""
Clique number and a hypergraph threshold
========================================

For a graph with adjacency matrix G, the matrix lam (E - G) - E is
copositive exactly when lam is at least the clique number. Scanning lam
therefore reads off the clique number. The same idea with a cubic tensor
locates the threshold of a hypergraph family in rho.
"""
import numpy as np

from coposdp import build_tight, builtin_example, detect_copositivity, solve
from coposdp.instances import CLIQUE_ADJACENCY, clique_matrix

print(CLIQUE_ADJACENCY.astype(int))
for lam in (2.0, 2.5, 2.9, 3.0, 3.5):
    rep = detect_copositivity(clique_matrix(lam))
    print(f"lambda={lam:.1f}  {rep.verdict.value:13s} bounds={[(k, round(v, 5)) for k, v in rep.bounds]}")

print("\n rho     v_2")
for rho in np.round(np.linspace(4.348, 4.356, 9), 3):
    prog = build_tight(builtin_example("hypergraph-ex48", rho=rho).tensor, 2)
    print(f" {rho:.3f}  {prog.value(solve(prog).y):+.3e}")
