# %% [markdown]
# # A scalar ADMM run by hand and by machine
#
# f(x) = (x - 1)^2 and g(y) = (y - 2)^2 must agree, x = y. The optimum is
# x = y = 1.5 with multiplier -1 and optimal value 0.5.

# %%
import numpy as np

from admmcert import QuadraticFunction, SolverConfig, SplitProblem, solve, solve_split_bruteforce
from admmcert.certificates import lyapunov

prob = SplitProblem(
    f=QuadraticFunction([[2.0]], [-2.0], 1.0),
    g=QuadraticFunction([[2.0]], [-4.0], 4.0),
    A=[[1.0]],
    B=[[-1.0]],
    c=[0.0],
)
ref = solve_split_bruteforce(prob)
print("reference:", ref.x_star, ref.y_star, ref.lambda_star, ref.p_star)

# %% [markdown]
# With rho = 1 and y = lambda = 0 the x-update minimizes
# (x - 1)^2 + x^2 / 2, so x = 2/3. The y-update then gives 14/9, and the
# multiplier moves to 2/3 - 14/9 = -8/9.

# %%
rep = solve(prob, SolverConfig(rho=1.0), reference=ref)
s1 = rep.history[1]
print("first iterate:", s1.x[0], s1.y[0], s1.lam[0])
print("expected     :", 2 / 3, 14 / 9, -8 / 9)

# %% [markdown]
# The Lyapunov value drops from 3.25 to 5/324 in one step.

# %%
print([lyapunov(prob, 1.0, s, ref) for s in rep.history[:3]])
print("5/324 =", 5 / 324)

# %%
print(rep.status, "after", rep.iterations, "iterations")
print("final objective", rep.final.p, "residual", np.linalg.norm(rep.final.r))
