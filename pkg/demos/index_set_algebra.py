"""Polyhomogeneous index sets: exact algebra and the composition cascade.

Run with: python demos/index_set_algebra.py
"""

from fractions import Fraction

from diracproj.index_sets import (
    IndexSet,
    NDegree,
    compose_boundary,
    compose_interior,
    ext_union,
    halfdensity_shift,
    member,
    refine,
    sum_sets,
)

half = Fraction(1, 2)

# Index sets are generator antichains with implied closure: (beta, k)
# stands for all (beta + m, j <= k).
E = IndexSet.from_gens([(NDegree(0, -half), 0), (NDegree(1, 0), 1)])
print("E =", E.pretty())
print("(1 - n/2, 0) in E at n=3:", member(E, NDegree(1, -half), 0, 3))

# Minkowski sum and extended union (the union acquires log bumps wherever
# the two closures share an exponent).
print("\n0 + 0 =", sum_sets(IndexSet.smooth(0), IndexSet.smooth(0)).pretty())
print("0 unionbar 0 =", ext_union(IndexSet.smooth(0), IndexSet.smooth(0)).pretty())
print("-3/2 unionbar 1/2 =",
      ext_union(IndexSet.smooth(Fraction(-3, 2)), IndexSet.smooth(half)).pretty())

# The composition cascade for the interior orthogonal projector, symbolic
# in the boundary dimension n.
e_ff = IndexSet.from_gens([(NDegree(1, -half), 0), (NDegree(0, half), 1)], n=None)
f_ff = IndexSet.smooth(NDegree(Fraction(-3, 2), -half))
f_rb = IndexSet.smooth(half)
h_ff, h_rb = compose_boundary(e_ff, f_ff, f_rb, n=None, ambiguous="upper")
print("\nboundary composition:")
print("  H_ff =", h_ff.pretty())
print("  H_rb =", h_rb.pretty(), " -> refined to", refine(h_rb, IndexSet.smooth(half)).pretty())

g_ff = IndexSet.smooth(NDegree(half, -half))
g_lb = IndexSet.smooth(half)
j_ff, j_lb, j_rb = compose_interior(
    h_ff, refine(h_rb, IndexSet.smooth(half)), g_ff, g_lb, n=None, ambiguous="upper")
print("interior composition:")
print("  J_ff =", j_ff.pretty())
print("  J_lb refined =", refine(j_lb, IndexSet.smooth(half)).pretty())

# Converting from the b-half-density convention to the kernel convention
# shifts the front face by n/2+1 and the side faces by 1/2.
print("\nkernel-convention front face:",
      halfdensity_shift(j_ff, "ff", "from").pretty())
print("generators as JSON:", j_ff.to_json())
