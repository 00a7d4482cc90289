"""Matrix checks on the discrete series and its bosonic Fock space."""
# %%
import numpy as np

from confalg import make_algebra
from confalg.fockrep import (
    alpha2_expr,
    build_discrete_series,
    casimir_samples,
    commutator_residual,
    evaluate,
    fock_block_sizes,
    second_quantize,
)
from confalg.parser import parse_expr

alg = make_algebra("conf2d")
P = lambda s: parse_expr(s, alg)

# %% [markdown]
# One-photon space: a truncated lowest-weight ladder.  Products of degree d
# are exact on the window that drops the top d states.

# %%
one = build_discrete_series(32, k=1)
for a, b, x in [("E", "D", "E"), ("E", "C", "2*D"), ("D", "C", "C")]:
    print(f"({a},{b}) - {x}:", commutator_residual(one, P(a), P(b), P(x), one.window(2)))

A = evaluate(alpha2_expr(), one, one.window(2))
print("alpha2 on the window: min", np.real(np.diag(A)).min(), "max", np.real(np.diag(A)).max())

for k in (1, 1.5, 3):
    r = build_discrete_series(24, k=k)
    val = np.real(evaluate(alpha2_expr(), r, r.window(2))[0, 0])
    print(f"k={k}: alpha2 = {val:.12f}, (k - 1/2)^2 = {(k - 0.5) ** 2}")

# %% [markdown]
# Second quantization.  Each photon-number block is invariant.

# %%
print("block sizes for dim 16, N <= 3:", fock_block_sizes(16, 3))
fock = second_quantize(build_discrete_series(16), 3)
for g in "EDC":
    L = fock.lifts[g]
    print(g, "commutes with N:", abs(L @ fock.N - fock.N @ L).max() == 0)

# %% [markdown]
# alpha2 is bounded below by hbar^2/4 on multi-photon states too.

# %%
s = casimir_samples(fock, 200, seed=1)
print("random states: min alpha2 =", s.min(), " mean =", s.mean())
