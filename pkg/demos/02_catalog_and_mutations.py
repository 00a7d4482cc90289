"""Running the identity catalog and checking that it notices broken tables."""
# %%
from collections import Counter

from confalg.catalog import mutation_check, report_text, sample_mutations, shipped_catalog, verify_all

records = shipped_catalog()
print(len(records), "records")
print(Counter(r.algebra for r in records))

# %% [markdown]
# A short run over the conf2d records.  Numerical-only records are skipped
# here; ``confalg verify`` runs them against the matrix representations.

# %%
rep = verify_all(algebra="conf2d")
print(report_text(rep))

# %% [markdown]
# Records with inverse letters carry a clearing recipe: both sides get
# multiplied by invertible elements until nothing inverse is left.

# %%
for r in records:
    if r.kind == "clear" and r.algebra == "conf2d":
        print(f"{r.id:<12} {r.lhs} = {r.rhs}    [{r.recipe}]")

# %% [markdown]
# Change one structure constant and rerun.  Jacobi records go first, so most
# mutations are caught after a handful of checks.

# %%
for item in sample_mutations(10, seed=0):
    res = mutation_check(*item, records=records)
    first = res.failures[0] if res.failures else None
    print(item, "->", first)
