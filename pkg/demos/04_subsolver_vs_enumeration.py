# %% [markdown]
# # The active-set subsolver against exhaustive enumeration

# %%
import numpy as np

from admmcert import solve_qp, solve_qp_bruteforce
from admmcert.generate import random_qp

rng = np.random.default_rng(0)
diffs, steps = [], []
for _ in range(200):
    sub = random_qp(rng)
    sol = solve_qp(sub)
    diffs.append(np.abs(sol.z - solve_qp_bruteforce(sub).z).max())
    steps.append(sol.iterations)

print("largest coordinate difference:", max(diffs))
print("active-set steps: mean", np.mean(steps), "max", max(steps))
