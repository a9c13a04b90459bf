# coding: utf-8

# # Dropping observables nothing depends on
#
# Adding y^3 to the first example gives a valid but wasteful lifting: no
# visible observable ever feeds from y^3. The observable staircase of
# (M, G) finds such coordinates and prune_unobservable removes them.

# %%

from superlin import fixtures
from superlin.embedding import same_system, validate
from superlin.linalg import observability_matrix, observable_staircase
from superlin.transform import prune_unobservable

L = fixtures.ex1_plus()
st = observable_staircase(L.M, L.G)
print("observable dimension:", st.r, "of", L.m)

small = prune_unobservable(L)
print(small.m, [q.to_str(["x", "y"]) for q in small.p])
print(validate(small).passed, same_system(L, small))

# %%
# Hidden observables are not automatically removable. In the second
# fixture both hidden entries feed the visible sum through M, so all three
# stay.

L2 = fixtures.ex2b()
print(observability_matrix(L2.M, L2.G))
print(prune_unobservable(L2).m)
