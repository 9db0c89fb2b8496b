# %% [markdown]
# # Consensus: three agents agree on a point
#
# Each agent owns a quadratic and a local polyhedron; the shared variable is
# the y block and every copy must equal it.

# %%
import numpy as np

from admmcert import PolyhedralSet, QuadraticFunction, SolverConfig, build_consensus, solve

targets = [np.array([0.0, 0.0]), np.array([2.0, 0.0]), np.array([1.0, 3.0])]
fs = [QuadraticFunction(2 * np.eye(2), -2 * t, t @ t) for t in targets]
box = PolyhedralSet(2, G=[[0.0, 1.0]], h=[0.5])
prob = build_consensus(fs, [PolyhedralSet.free(2), PolyhedralSet.free(2), box])

# %%
rep = solve(prob, SolverConfig(rho=1.0, certificate_mode="off"))
print(rep.status, rep.iterations)
print("agreed point:", rep.final.y)
print("unconstrained average:", np.mean(targets, axis=0))
