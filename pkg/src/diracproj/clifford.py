"""Complex Clifford algebra representations and the boundary splitting.

Conventions used throughout the package:

* generators square to minus the identity, ``cl(v)^2 = -|v|^2 Id``,
* the *last* generator of a representation is reserved for the normal
  direction ``nu`` of a boundary; tangential directions use generators
  ``1 .. d-1``,
* boundary Clifford multiplication is realized inside the ambient
  representation as ``cl_M(v) = cl(nu) cl(v)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CliffordRep",
    "BoundarySplitting",
    "build_rep",
    "boundary_clifford",
    "volume_element",
]

_SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _kron_chain(factors):
    out = np.array([[1.0]], dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


@dataclass(frozen=True)
class CliffordRep:
    """A complex representation of the Clifford algebra Cl(d).

    Attributes
    ----------
    dim : int
        Ambient dimension d (number of generators).
    rank : int
        Size of the generator matrices, ``2**(d//2)``.
    gens : tuple of ndarray
        Generators ``gamma_1 .. gamma_d``; each is unitary,
        skew-Hermitian and they pairwise anticommute with
        ``gamma_i^2 = -Id``.
    """

    dim: int
    rank: int
    gens: tuple

    def cl(self, v):
        """Clifford action of a covector with components on generators 1..len(v)."""
        v = np.asarray(v, dtype=complex)
        if v.ndim != 1 or len(v) > self.dim:
            raise ValueError(f"covector must have at most {self.dim} components")
        out = np.zeros((self.rank, self.rank), dtype=complex)
        for vj, g in zip(v, self.gens):
            out += vj * g
        return out

    @property
    def cl_nu(self):
        """Clifford action of the normal direction (last generator)."""
        return self.gens[-1]

    def splitting(self) -> "BoundarySplitting":
        return BoundarySplitting.from_rep(self)


@dataclass(frozen=True)
class BoundarySplitting:
    """Eigenprojections of cl(nu) onto the +i / -i eigenspaces Sigma_pm."""

    nu: int
    proj_plus: np.ndarray
    proj_minus: np.ndarray

    @classmethod
    def from_rep(cls, rep: CliffordRep) -> "BoundarySplitting":
        ident = np.eye(rep.rank, dtype=complex)
        cnu = rep.cl_nu
        # Pi_pm = (Id -/+ i cl(nu))/2 projects onto ker(cl(nu) -/+ i)
        return cls(
            nu=rep.dim,
            proj_plus=0.5 * (ident - 1j * cnu),
            proj_minus=0.5 * (ident + 1j * cnu),
        )


def build_rep(d: int) -> CliffordRep:
    """Construct the standard iterated tensor representation of Cl(d).

    Deterministic: the same matrices are returned for the same ``d``.
    For d = 2m the generators are ``i * sigma_3^(k-1) x sigma_{1,2} x Id^(m-k)``;
    for odd d the extra generator is ``i * sigma_3^m``.
    """
    if d < 1:
        raise ValueError(f"ambient dimension must be >= 1, got {d}")
    if d == 1:
        return CliffordRep(dim=1, rank=1, gens=(np.array([[1.0j]]),))
    m = d // 2
    gens = []
    for k in range(1, m + 1):
        head = [_SIGMA3] * (k - 1)
        tail = [np.eye(2, dtype=complex)] * (m - k)
        gens.append(1j * _kron_chain(head + [_SIGMA1] + tail))
        gens.append(1j * _kron_chain(head + [_SIGMA2] + tail))
    if d % 2 == 1:
        gens.append(1j * _kron_chain([_SIGMA3] * m))
    return CliffordRep(dim=d, rank=2 ** m, gens=tuple(gens))


def boundary_clifford(rep: CliffordRep, v):
    """Intrinsic boundary Clifford action cl_M(v) = cl(nu) cl(v).

    ``v`` is a tangent covector with d-1 components.  The result
    satisfies ``cl_M(v)^2 = -|v|^2 Id`` and anticommutes with cl(nu).
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (rep.dim - 1,):
        raise ValueError(f"tangent covector must have {rep.dim - 1} components, got {v.shape}")
    return rep.cl_nu @ rep.cl(v)


def volume_element(rep: CliffordRep):
    """Product of all generators, normalized so its square is the identity."""
    omega = np.eye(rep.rank, dtype=complex)
    for g in rep.gens:
        omega = omega @ g
    d = rep.dim
    # (g_1...g_d)^2 = (-1)^(d(d+1)/2); the phase i^(d(d+1)/2) fixes omega^2 = Id
    phase = 1j ** ((d * (d + 1) // 2) % 4)
    return phase * omega
