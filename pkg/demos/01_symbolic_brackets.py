"""Exact brackets and normal ordering in the enveloping algebra.

Run with ``python demos/01_symbolic_brackets.py``.
"""
# %% [markdown]
# Every algebra ships as a structure table for the scaled bracket
# (A, B) = [A, B] / (i hbar).  Expressions are parsed over an algebra and
# straightened into a fixed letter order, with hbar kept as a symbol.

# %%
from confalg import commutator, make_algebra, normalize
from confalg.parser import format_expr, parse_expr

conf2d = make_algebra("conf2d")
print("letter order:", conf2d.order)

for a, b in [("E", "D"), ("E", "C"), ("D", "C")]:
    val = commutator(parse_expr(a, conf2d), parse_expr(b, conf2d), conf2d)
    print(f"({a}, {b}) =", format_expr(val))

# %% [markdown]
# ``U`` is a derived symbol built from the formal inverse of E.  Its
# brackets with E and D come out as plain numbers and U itself.

# %%
U = parse_expr("U", conf2d)
print("U expands to", format_expr(normalize(conf2d.expand(U), conf2d)))
print("(E, U) =", format_expr(commutator(parse_expr("E", conf2d), U, conf2d)))
print("(D, U) =", format_expr(commutator(parse_expr("D", conf2d), U, conf2d)))

# %% [markdown]
# The Casimir alpha2 commutes with every generator.

# %%
alpha2 = parse_expr("alpha2", conf2d)
for g in "EDC":
    print(f"(alpha2, {g}) =", format_expr(commutator(alpha2, parse_expr(g, conf2d), conf2d)))

# %% [markdown]
# The four-dimensional algebra carries Q, the inverse of P^2, as a letter.
# Position components commute up to spin terms.

# %%
conf4d = make_algebra("conf4d")
x01 = commutator(parse_expr("X0", conf4d), parse_expr("X1", conf4d), conf4d)
print("(X0, X1) has", len(x01), "terms in normal form")
print("Q*Psq =", format_expr(normalize(parse_expr("Q*Psq", conf4d), conf4d)))
