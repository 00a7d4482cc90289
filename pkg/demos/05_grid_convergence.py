"""Frequency grid as an independent oracle.

E multiplies by hbar*w, D and C are symmetrised finite-difference operators.
The (E, D) bracket converges at second order; the other two are exact.
"""
# %%
import numpy as np

from confalg.fockrep import alpha2_expr, build_discrete_series, build_grid_rep, convergence_check, evaluate, grid_alpha2

for which in ("E.D", "E.C", "D.C", "alpha2"):
    res = convergence_check((128, 256, 512, 1024), which=which)
    orders = ", ".join(f"{o:.3f}" for o in res["order"])
    print(f"{which:<7} residuals", np.array2string(np.array(res["residual"]), precision=2), "orders", orders)

# %% [markdown]
# alpha2 on a smooth one-photon state against the ladder value.

# %%
ladder = build_discrete_series(32)
exact = np.real(evaluate(alpha2_expr(), ladder, ladder.window(2))[0, 0])
for M in (256, 512, 1024):
    print(M, grid_alpha2(build_grid_rep(M)), "ladder", exact)
