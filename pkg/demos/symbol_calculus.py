"""Principal-symbol calculus: composition integral, scattering family, moments.

Run with: python demos/symbol_calculus.py
"""

import numpy as np

from diracproj.clifford import build_rep
from diracproj.symbols import (
    calderon_symbol,
    compose_LK,
    gamma_ft_coeff,
    log_free_moments,
    scattering_normalization,
    scattering_symbol,
    symbol_K,
    symbol_Kstar,
)

rep = build_rep(3)  # one normal + two tangential directions
mu = np.array([0.8, -0.6])

# The half-line composition integral applied to the extension-operator
# symbol pair lands exactly on (1/4)|mu|^-1 (Id + i cl(nu) cl(mu-hat)).
got = compose_LK(symbol_Kstar(rep), symbol_K(rep), mu)
target = 0.25 * (np.eye(2) + 1j * rep.cl_nu @ rep.cl(mu))
print("composition vs closed form:", np.abs(got - target).max())
print("quadrature fallback:", np.abs(
    compose_LK(symbol_Kstar(rep), symbol_K(rep), mu, method="quadrature") - target).max())

# The Gamma-function coefficient of the radial Fourier transform.
print("\ngamma coefficient at lam=1, n=1 (expect 2 pi):", gamma_ft_coeff(1.0, 1))

# The scattering symbol family: unitary inverse relation and the
# normalization that removes the Gamma poles.
xi = np.array([0.4, 0.8])
s0 = scattering_symbol(rep, 0.0, xi)
print("\nsymbol of S(0)^2 == Id:", np.abs(s0 @ s0 - np.eye(2)).max())
print("C(0):", scattering_normalization(0.0))
print("normalized symbol at 1/2 equals i cl(nu) cl(xi):",
      np.abs(scattering_symbol(rep, 0.5, xi, normalized=True)
             - 1j * rep.cl_nu @ rep.cl(xi)).max())

# Half of Id plus that involution is the boundary-projector symbol.
c = calderon_symbol(rep, xi)
print("\nprojector symbol eigenvalues:", np.round(np.linalg.eigvalsh(c), 12))

# Spherical moments decide whether log terms appear in kernel expansions:
# the odd leading profile of the disc model passes, a constant does not.
rep2 = build_rep(2)


def leading(pts):
    return (pts[..., 0, None, None] * np.eye(2)
            + pts[..., 1, None, None] * (rep2.cl_nu @ rep2.gens[0]))


moments, err = log_free_moments(leading, 0, dim=2)
print("\ndisc leading-profile moment:", max(np.abs(m).max() for _, m in moments))
const_m, _ = log_free_moments(lambda p: np.ones(p.shape[:-1] + (1, 1)), 0, dim=2)
print("constant-symbol moment (the obstruction):", const_m[0][1][0, 0].real)
