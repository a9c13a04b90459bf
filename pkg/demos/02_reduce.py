# coding: utf-8

# # How few visible observables are needed?
#
# Different liftings of the same system can read a different number of
# observables. The reduction pipeline strips affine terms, packs the
# visible part into rank(G) combinations, and drops dependent ones. The
# rank of G at the end is the least visible count over all liftings.

# %%

from superlin import fixtures
from superlin.embedding import classify, same_system
from superlin.transform import realize_minimal_visible, to_reduced_visible_form

L = fixtures.ex2a()          # reads y^2 and y^3 separately
red, report = to_reduced_visible_form(L)
for s in report.steps:
    print(f"{s.name:24s} m {s.dims_in[1]} -> {s.dims_out[1]}  "
          f"rank G {s.rank_in} -> {s.rank_out}  (m_v, m_h) {s.mv_mh_in} -> {s.mv_mh_out}")
print("least visible count:", report.m_v_star)

# %%
# A lifting that reaches that count. Its single visible observable is
# y^2 + y^3, as in the hand-built second fixture.

best = realize_minimal_visible(L)
c = classify(best)
print([best.p[j].to_str(["x", "y"]) for j in c.visible_idx])
print(same_system(L, best))

# %%
# Affine terms in the observables do not change the answer: the shifted
# fixture uses y^2 + y + 1.

print(to_reduced_visible_form(fixtures.ex1_prime())[1].m_v_star)
