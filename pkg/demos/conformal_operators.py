"""Conformally covariant cube of the Dirac operator on a 3-torus.

Run with: python demos/conformal_operators.py   (about half a minute)
"""

import numpy as np

from diracproj.clifford import build_rep
from diracproj.conformal import (
    ConformalFactor,
    L1CorollaryAmbient,
    TorusGrid,
    assemble_L1,
    assemble_L1_ambient,
    compare_routes,
    covariance_residual,
    curvature_conformally_flat,
    dirac_flat,
    formal_p1,
    IndicialPoleError,
    random_spinor,
    selfadjointness_residual,
)

n, m = 3, 32
grid = TorusGrid(n, m)
rep = build_rep(n)
omega = ConformalFactor.random(n, band=2, amplitude=0.2, seed=7)
phi = random_spinor(grid, rep.rank, band=4, seed=1)

# Curvature of e^{2 omega} * flat, with the trace identity of the
# Fefferman-Graham coefficient as a quick sanity check.
curv = curvature_conformally_flat(omega, grid)
print("scal range:", float(curv.scal.min()), "..", float(curv.scal.max()))
print("trace identity residual:", curv.trace_identity_residual())

# The third-order operator: at omega = 0 it is exactly D^3.
flat = assemble_L1(rep, ConformalFactor.zero(n), grid)
d3 = dirac_flat(rep, dirac_flat(rep, dirac_flat(rep, phi)))
print("\nflat operator vs D^3:",
      np.abs(flat.apply(phi).values - d3.values).max())

# Conformal covariance: conjugation by e^{(n -/+ 3)/2 omega} intertwines the
# flat and curved assemblies.
op = assemble_L1(rep, omega, grid)
print("covariance residual:", covariance_residual(rep, omega, grid, phi, op=op, flat_op=flat))
print("self-adjointness residual:",
      selfadjointness_residual(op, omega, phi, random_spinor(grid, rep.rank, band=4, seed=2)))

# Two independent assemblies in the ambient representation agree.
rep_amb = build_rep(n + 1)
phi_amb = random_spinor(grid, rep_amb.rank, band=4, seed=3)
opA = assemble_L1_ambient(rep_amb, omega, grid)
opB = L1CorollaryAmbient(rep_amb, omega, grid, context=opA)
print("\nroute agreement:", compare_routes(rep_amb, omega, grid, phi_amb, ops=(opA, opB)))

# The indicial solver of the product model: the order-1 coefficient is
# -cl(nu) D /(2 lam - 1), with a pole at lam = 1/2 whose residue recovers
# the boundary Dirac operator.
p1 = formal_p1(rep_amb, 2.0, phi_amb)
closed = -(dirac_flat(rep_amb, phi_amb).values @ rep_amb.cl_nu.T) / 3.0
print("\nindicial coefficient vs closed form:", np.abs(p1.values - closed).max())
try:
    formal_p1(rep_amb, 0.5, phi_amb)
except IndicialPoleError as exc:
    print("pole detected:", exc)
