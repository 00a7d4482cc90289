"""Localisation in two dimensions from two chiral Fock sectors.

Positions need the inverse of P^2 = 4 Ep Em, so only states with photons
in both sectors are kept.
"""
# %%
from confalg import make_algebra
from confalg.fockrep import build_discrete_series, build_two_sector, commutator_residual, second_quantize
from confalg.parser import parse_expr

pair = make_algebra("conf2d-pair")
P = lambda s: parse_expr(s, pair)

plus = second_quantize(build_discrete_series(8), 2)
minus = second_quantize(build_discrete_series(8), 2)
two = build_two_sector(plus, minus)
w = two.window(2)
print("product space", two.size, "states; massive window", len(two.window(0)), "; inner window", len(w))

# %%
print("(X0, X1):", commutator_residual(two, P("X0"), P("X1"), P("0"), w))
for m in range(2):
    for n in range(2):
        want = "-1" if m == n == 0 else "1" if m == n else "0"
        r = commutator_residual(two, P(f"P{m}"), P(f"X{n}"), P(want), w)
        print(f"(P{m}, X{n}) = {want}: residual {r:.1e}")

# %% [markdown]
# A sector with no photons has no inverse energy, and is refused.

# %%
try:
    build_two_sector(second_quantize(build_discrete_series(8), 0), minus)
except Exception as exc:
    print(type(exc).__name__, exc)
