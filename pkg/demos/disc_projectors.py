"""Walk through the unit-disc model: extension operator, spectra, projectors.

Run with: python demos/disc_projectors.py
"""

import numpy as np

from diracproj.clifford import build_rep
from diracproj.disc import (
    DiscHarmonicBasis,
    FourierSpinor,
    bergman_bruteforce,
    bergman_closed,
    bergman_kernel,
    calderon_bruteforce,
    calderon_symbol_limit,
    kkstar_closed,
    kkstar_kernel,
    kstark_eigenvalue,
    lagrangian_check,
    poisson_extend,
)

# The extension operator sends the boundary mode e^{ikt} to z^k for k >= 0
# and kills negative modes.
psi = FourierSpinor.from_mode(2, [1.0], band=4)
print("extension of e^{2it}:", poisson_extend(psi))
print("extension of e^{-it}:", poisson_extend(FourierSpinor.from_mode(-1, [1.0], 4)))

# The boundary composition is diagonal on modes with eigenvalue 1/(2(k+1)).
print("\nmode eigenvalues:", [str(kstark_eigenvalue(k)) for k in (-2, 0, 1, 3)])

# Truncated interior kernels converge geometrically to their closed forms.
z, w = 0.5 + 0.2j, -0.3 + 0.4j
print("\nkernel truncation error at band 60:")
print("  smoothing composition:", abs(kkstar_kernel(z, w, 60) - kkstar_closed(z, w)))
print("  interior projector   :", abs(bergman_kernel(z, w, 60) - bergman_closed(z, w)))

# Brute-force boundary projector from harmonic traces.  The scalar model
# gives exactly the non-negative-frequency indicator.
C = calderon_bruteforce("scalar", 6)
print("\nscalar projector diagonal:", np.real(np.diag(C)).astype(int))

# The rank-2 model: harmonic spinors found by an exact nullspace solve.
rep = build_rep(2)
basis = DiscHarmonicBasis.build("spin", 8, rep)
print(f"\nspin model: {len(basis.elements)} harmonic basis elements at band 8")
C = calderon_bruteforce("spin", 16, rep)
print("projector defects: idem", np.abs(C @ C - C).max(),
      " herm", np.abs(C - C.conj().T).max())
print("Lagrangian identity residual:", lagrangian_check(C, rep))

res = calderon_symbol_limit(C, rep)
print("high-frequency block (k -> +inf):\n", np.round(res["limit_plus"].real, 12))

# Two constructions of the interior projector agree on the truncated space.
cmp_ = bergman_bruteforce(12)
print("\ninterior projector, two routes, operator-norm gap:", cmp_.distance())
print("P applied to zbar z^2 equals (2/3) z:",
      np.abs(cmp_.apply_direct({(2, 1): 1.0}) - cmp_.to_on({(1, 0): 2 / 3})).max() < 1e-10)
