# coding: utf-8

# # Checking a lifting by hand
#
# The system x' = -x + y^2 + u, y' = -y becomes linear once y^2 is added as
# an extra state z: z' = 2 y y' = -2 z. Here we build that lifting, check it
# symbolically, and break it on purpose.

# %%

from superlin import fixtures
from superlin.embedding import classify, validate

L = fixtures.ex1()
print(L.A_lifted)
print(L.B_lifted)

# %%
# validate() compares both sides of the lifted dynamics coefficient by
# coefficient. A correct lifting has zero residual.

rep = validate(L)
for c in rep.checks:
    print(c.name, c.passed, c.residual)

# %%
# With the wrong decay rate (-3 in place of -2) the residual is exactly the
# missing y^2 term.

bad = validate(fixtures.ex1_broken())
print(bad.passed)
print(bad["PDE-1"].residual_poly[0].to_str(["x", "y"]))

# %%
# An observable is visible when the original state equation reads it. The
# second system lifts x' = -x + y + y^2 + y^3 with the sum y^2 + y^3 as the
# only visible observable; y^2 and y^3 are hidden helpers.

for name in ("ex1", "ex2a", "ex2b"):
    c = classify(fixtures.FIXTURES[name]())
    print(f"{name:5s} visible={list(c.visible_idx)} hidden={list(c.hidden_idx)}")
