"""Exact and brute-force realizations of the unit-disc boundary projectors.

Two models on the closed unit disc:

* ``scalar``: the d-bar operator; harmonic = holomorphic, basis ``z^k``.
* ``spin``: the rank-2 flat Dirac operator; its polynomial kernel is found
  by an exact linear solve over the Gaussian rationals (an oracle that is
  independent of any closed-form description of the harmonic spinors).

Boundary measure is ``dt`` on the circle, interior measure is Lebesgue
area; every 2*pi factor follows from these two choices.  Boundary data is
held as finite Fourier series (:class:`FourierSpinor`); the extension
operator, the mode-space spectrum of the boundary composition, the
truncated kernels of the interior compositions, and the brute-force
Calderon and Bergman projectors are all realized on the truncation band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .clifford import CliffordRep, build_rep

__all__ = [
    "FourierSpinor",
    "DiscHarmonicBasis",
    "KernelGrid",
    "poisson_extend",
    "kstark_eigenvalue",
    "kkstar_kernel",
    "kkstar_closed",
    "kkstar_tail_bound",
    "bergman_kernel",
    "bergman_closed",
    "bergman_tail_bound",
    "make_kernel_grid",
    "calderon_bruteforce",
    "normal_clifford_matrix",
    "lagrangian_check",
    "calderon_symbol_limit",
    "BergmanComparison",
    "bergman_bruteforce",
    "projector_to_json",
]


# ---------------------------------------------------------------------------
# boundary Fourier data
# ---------------------------------------------------------------------------


@dataclass
class FourierSpinor:
    """Band-limited boundary data: coefficients of e^{ikt}, |k| <= band.

    ``coeffs`` has shape (2*band+1, rank); row j holds the coefficient
    vector of mode k = j - band.  The squared circle norm is
    2*pi*sum |c_k|^2 (measure dt).
    """

    band: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if self.coeffs.shape[0] != 2 * self.band + 1:
            raise ValueError(
                f"need {2 * self.band + 1} mode rows, got {self.coeffs.shape[0]}"
            )

    @property
    def rank(self) -> int:
        return self.coeffs.shape[1]

    @property
    def modes(self):
        return np.arange(-self.band, self.band + 1)

    @classmethod
    def from_mode(cls, k: int, vec, band: int) -> "FourierSpinor":
        vec = np.atleast_1d(np.asarray(vec, dtype=complex))
        coeffs = np.zeros((2 * band + 1, len(vec)), dtype=complex)
        coeffs[k + band] = vec
        return cls(band, coeffs)

    def coeff(self, k: int):
        if abs(k) > self.band:
            return np.zeros(self.rank, dtype=complex)
        return self.coeffs[k + self.band]

    def norm_sq(self) -> float:
        return 2 * math.pi * float(np.sum(np.abs(self.coeffs) ** 2))

    def flat(self):
        return self.coeffs.reshape(-1)


# ---------------------------------------------------------------------------
# exact Gaussian-rational sparse nullspace (oracle for the spin model)
# ---------------------------------------------------------------------------

_ZERO = (Fraction(0), Fraction(0))


def _cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cdiv(a, b):
    d = b[0] * b[0] + b[1] * b[1]
    return ((a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d)


def _cneg(a):
    return (-a[0], -a[1])


def exact_nullspace(rows, ncols):
    """Nullspace basis of a sparse matrix over the Gaussian rationals.

    ``rows`` is a list of dicts {column index: (Fraction re, Fraction im)}.
    Returns a list of basis vectors in the same sparse format.  Plain
    fraction-free elimination; exact, and fast for the almost-diagonal
    matrices arising from monomial differentiation.
    """
    rows = [dict(r) for r in rows if r]
    pivots = {}
    for row in rows:
        while row:
            col = min(row)
            if col not in pivots:
                piv = row[col]
                pivots[col] = {c: _cdiv(v, piv) for c, v in row.items()}
                break
            factor = row[col]
            for c, v in pivots[col].items():
                acc = _cadd(row.get(c, _ZERO), _cneg(_cmul(factor, v)))
                if acc == _ZERO:
                    row.pop(c, None)
                else:
                    row[c] = acc
    basis = []
    one = (Fraction(1), Fraction(0))
    for free in range(ncols):
        if free in pivots:
            continue
        vec = {free: one}
        # back-substitute pivot rows that touch the free column
        for pcol in sorted(pivots, reverse=True):
            prow = pivots[pcol]
            acc = _ZERO
            for c, v in prow.items():
                if c != pcol and c in vec:
                    acc = _cadd(acc, _cmul(v, vec[c]))
            if acc != _ZERO:
                vec[pcol] = _cneg(acc)
        basis.append(vec)
    return basis


def _monomials(band: int):
    return [(a, b) for a in range(band + 1) for b in range(band + 1 - a)]


def _dirac_monomial_rows(rep: CliffordRep, band: int):
    """Sparse matrix of D = gamma_1 d/dx + gamma_2 d/dy on spinor monomials.

    Columns are (monomial index, component); d/dx = d/dz + d/dzbar and
    d/dy = i(d/dz - d/dzbar) act exactly on z^a zbar^b.
    """
    monos = _monomials(band)
    index = {m: i for i, m in enumerate(monos)}
    r = rep.rank
    rows = {}

    def add(target_mono, i_comp, src_col, coeff):
        if coeff == _ZERO or coeff == (0, 0):
            return
        row = rows.setdefault((index[target_mono], i_comp), {})
        row[src_col] = _cadd(row.get(src_col, _ZERO), coeff)
        if row[src_col] == _ZERO:
            del row[src_col]

    g1, g2 = rep.gens[0], rep.gens[1]
    for mi, (a, b) in enumerate(monos):
        for j in range(r):
            col = mi * r + j
            for i in range(r):
                c1 = complex(g1[i, j])
                c2 = complex(g2[i, j])
                # d/dz part: coeff a, target (a-1, b); enters dx with 1, dy with i
                if a > 0:
                    w = c1 * a + c2 * 1j * a
                    add((a - 1, b), i, col,
                        (Fraction(w.real).limit_denominator(10**6),
                         Fraction(w.imag).limit_denominator(10**6)))
                if b > 0:
                    w = c1 * b - c2 * 1j * b
                    add((a, b - 1), i, col,
                        (Fraction(w.real).limit_denominator(10**6),
                         Fraction(w.imag).limit_denominator(10**6)))
    return list(rows.values()), len(monos) * r, monos


@dataclass
class _HarmonicElement:
    coeffs: dict  # (mono index, component) -> complex
    trace: FourierSpinor
    interior_norm_sq: Fraction


@dataclass
class DiscHarmonicBasis:
    """Harmonic basis elements with boundary traces and interior norms."""

    model: str
    band: int
    elements: list = field(default_factory=list)

    @classmethod
    def build(cls, model: str, band: int, rep: CliffordRep | None = None) -> "DiscHarmonicBasis":
        if band < 1:
            raise ValueError("band must be >= 1")
        if model == "scalar":
            elements = []
            for k in range(band + 1):
                elements.append(
                    _HarmonicElement(
                        coeffs={(k, 0): 1.0 + 0j},
                        trace=FourierSpinor.from_mode(k, [1.0], band),
                        interior_norm_sq=Fraction(1, k + 1),  # times pi
                    )
                )
            return cls(model, band, elements)
        if model != "spin":
            raise ValueError(f"unknown model {model!r}")
        rep = rep or build_rep(2)
        rows, ncols, monos = _dirac_monomial_rows(rep, band)
        basis = exact_nullspace(rows, ncols)
        r = rep.rank
        elements = []
        for vec in basis:
            coeffs = {}
            trace = np.zeros((2 * band + 1, r), dtype=complex)
            norm = Fraction(0)
            for col, (re, im) in vec.items():
                mi, comp = divmod(col, r)
                a, b = monos[mi]
                val = complex(re) + 1j * complex(im)
                coeffs[(mi, comp)] = val
                k = a - b
                trace[k + band, comp] += val
                # <z^a zb^b, z^c zb^d> = 2 pi/(a+b+c+d+2) when a-b = c-d
                for col2, (re2, im2) in vec.items():
                    mi2, comp2 = divmod(col2, r)
                    a2, b2 = monos[mi2]
                    if comp2 == comp and a - b == a2 - b2:
                        w = (re * re2 + im * im2, Fraction(2, a + b + a2 + b2 + 2))
                        norm += w[0] * w[1]  # times pi
            elements.append(
                _HarmonicElement(coeffs, FourierSpinor(band, trace), norm)
            )
        return cls(model, band, elements)

    def trace_matrix(self) -> np.ndarray:
        """Columns: flattened boundary traces of the basis elements."""
        return np.stack([e.trace.flat() for e in self.elements], axis=1)


# ---------------------------------------------------------------------------
# mode-space and kernel oracles
# ---------------------------------------------------------------------------


def poisson_extend(psi: FourierSpinor):
    """Scalar-model extension: mode k >= 0 goes to z^k, negative modes to 0.

    Returns {k: coefficient} for the harmonic interior function
    sum_k c_k z^k.
    """
    if psi.rank != 1:
        raise ValueError("scalar model expects rank-1 boundary data")
    out = {}
    for k in range(0, psi.band + 1):
        c = psi.coeff(k)[0]
        if c != 0:
            out[k] = c
    return out


def kstark_eigenvalue(k: int) -> Fraction:
    """Mode-k eigenvalue of the boundary composition: 1/(2(k+1)), or 0 for k < 0."""
    if k < 0:
        return Fraction(0)
    return Fraction(1, 2 * (k + 1))


def _pi_like(u):
    """pi at the working precision of u (full precision for mpmath types)."""
    if isinstance(u, (mpmath.mpf, mpmath.mpc)):
        return +mpmath.pi
    return math.pi


def _check_interior(z, w):
    if abs(z) >= 1 or abs(w) >= 1:
        raise ValueError(f"points must lie in the open disc, got |z|={abs(z)}, |w|={abs(w)}")


def kkstar_kernel(z, w, band: int):
    """Truncated series sum_{k<=band} (z wbar)^k / (2 pi).

    Generic-scalar Horner evaluation, so exact types (mpmath) pass through.
    """
    _check_interior(z, w)
    u = z * w.conjugate()
    acc = 0 * u
    for _ in range(band + 1):
        acc = acc * u + 1
    return acc / (2 * _pi_like(u))


def kkstar_closed(z, w):
    _check_interior(z, w)
    u = z * w.conjugate()
    return 1 / (2 * _pi_like(u) * (1 - u))


def kkstar_tail_bound(z, w, band: int) -> float:
    """|closed - truncated| <= x^(band+1) / (2 pi (1-x)), x = |z w|."""
    x = abs(z) * abs(w)
    return float(x ** (band + 1) / (2 * math.pi * (1 - x)))


def bergman_kernel(z, w, band: int):
    """Truncated series sum_{k<=band} (k+1) (z wbar)^k / pi."""
    _check_interior(z, w)
    u = z * w.conjugate()
    acc = 0 * u
    for k in range(band, -1, -1):
        acc = acc * u + (k + 1)
    return acc / _pi_like(u)


def bergman_closed(z, w):
    _check_interior(z, w)
    u = z * w.conjugate()
    return 1 / (_pi_like(u) * (1 - u) ** 2)


def bergman_tail_bound(z, w, band: int) -> float:
    """Exact tail sum_{k>band} (k+1) x^k / pi at x = |z w|."""
    x = abs(z) * abs(w)
    n1 = band + 1
    tail = x ** n1 * ((n1 + 1) / (1 - x) + x / (1 - x) ** 2)
    return float(tail / math.pi)


@dataclass
class KernelGrid:
    """Sampled kernel values with closed-form references and error bounds."""

    kind: str
    band: int
    z: np.ndarray
    w: np.ndarray
    values: np.ndarray
    closed: np.ndarray
    abs_err: np.ndarray
    tail_bound: np.ndarray


def make_kernel_grid(kind: str, points, band: int) -> KernelGrid:
    """Evaluate a truncated kernel against its closed form on (z, w) pairs."""
    series = {"kkstar": (kkstar_kernel, kkstar_closed, kkstar_tail_bound),
              "bergman": (bergman_kernel, bergman_closed, bergman_tail_bound)}
    if kind not in series:
        raise ValueError(f"unknown kernel kind {kind!r}")
    fn, closed_fn, bound_fn = series[kind]
    zs = np.asarray([p[0] for p in points], dtype=complex)
    ws = np.asarray([p[1] for p in points], dtype=complex)
    vals = np.array([fn(z, w, band) for z, w in zip(zs, ws)], dtype=complex)
    closed = np.array([closed_fn(z, w) for z, w in zip(zs, ws)], dtype=complex)
    bounds = np.array([bound_fn(z, w, band) for z, w in zip(zs, ws)])
    return KernelGrid(kind, band, zs, ws, vals, closed, np.abs(vals - closed), bounds)


# ---------------------------------------------------------------------------
# Calderon projector, brute force
# ---------------------------------------------------------------------------


def calderon_bruteforce(model: str, band: int, rep: CliffordRep | None = None) -> np.ndarray:
    """Orthogonal projection onto the truncated Cauchy data space.

    Assembles the boundary traces of the harmonic basis and projects in the
    circle L^2 inner product.  The result acts on flattened FourierSpinor
    coefficients (mode-major, component-minor).  In the scalar model this is
    exactly the non-negative-mode indicator.
    """
    basis = DiscHarmonicBasis.build(model, band, rep)
    B = basis.trace_matrix()
    gram = B.conj().T @ B  # uniform measure factor drops out of the projector
    if np.linalg.matrix_rank(gram) < gram.shape[0]:
        raise RuntimeError("singular Gram matrix: redundant harmonic traces")
    return B @ np.linalg.solve(gram, B.conj().T)


def normal_clifford_matrix(band: int, rep: CliffordRep, orientation: str = "outer") -> np.ndarray:
    """Mode-space matrix of pointwise Clifford action by the unit normal.

    At the boundary point e^{it} the outer normal is (cos t, sin t), so the
    action is cos(t) gamma_1 + sin(t) gamma_2: a mode shift by +/-1 tensored
    with (gamma_1 -/+ i gamma_2)/2.  ``orientation="inner"`` flips the sign.
    Mode-edge columns map outside the band and are truncated; identities
    should be tested compressed to interior modes.
    """
    if orientation not in ("outer", "inner"):
        raise ValueError(f"orientation must be 'outer' or 'inner', got {orientation!r}")
    sign = 1.0 if orientation == "outer" else -1.0
    g1, g2 = rep.gens[0], rep.gens[1]
    up = sign * (g1 - 1j * g2) / 2    # multiplies e^{it}: mode k -> k+1
    down = sign * (g1 + 1j * g2) / 2  # mode k -> k-1
    r = rep.rank
    dim = (2 * band + 1) * r
    out = np.zeros((dim, dim), dtype=complex)
    for k in range(-band, band + 1):
        j = k + band
        if k + 1 <= band:
            out[(j + 1) * r:(j + 2) * r, j * r:(j + 1) * r] = up
        if k - 1 >= -band:
            out[(j - 1) * r:j * r, j * r:(j + 1) * r] = down
    return out


def _interior_compression(mat: np.ndarray, band: int, rank: int, margin: int) -> np.ndarray:
    j0, j1 = margin * rank, (2 * band + 1 - margin) * rank
    return mat[j0:j1, j0:j1]


def lagrangian_check(C: np.ndarray, rep: CliffordRep, band: int | None = None) -> float:
    """Operator norm of -cl(nu) C cl(nu) - (Id - C), compressed to interior modes.

    The mode band is inferred from the matrix size.  The identity is
    invariant under the inner/outer normal convention since cl(nu) enters
    quadratically.
    """
    r = rep.rank
    if C.shape[0] % r:
        raise ValueError("projector size is not a multiple of the Clifford rank")
    nmodes = C.shape[0] // r
    if band is None:
        band = (nmodes - 1) // 2
    if 2 * band + 1 != nmodes:
        raise ValueError("projector size does not match the stated band")
    clnu = normal_clifford_matrix(band, rep)
    resid = -clnu @ C @ clnu - (np.eye(C.shape[0]) - C)
    return float(np.linalg.norm(_interior_compression(resid, band, r, 2), ord=2))


def calderon_symbol_limit(C: np.ndarray, rep: CliffordRep, band: int | None = None):
    """Mode-k diagonal blocks of C against the projector-symbol limits.

    The k -> +/-inf limits are (1/2)(Id +/- i gamma_1 gamma_2): the
    spectral projections of the involution built from cl(nu) cl(xi-hat)
    (independent of the boundary point; with the outer-normal convention
    the + sign goes with positive modes).  Returns the limit blocks, the
    per-mode errors and a fitted convergence order; the fit degenerates to
    +inf when the blocks are exact, as happens for the flat disc.
    """
    r = rep.rank
    nmodes = C.shape[0] // r
    if band is None:
        band = (nmodes - 1) // 2
    if band < 8:
        raise ValueError("insufficient band: need band >= 8 for a limit fit")
    invol = 1j * rep.gens[0] @ rep.gens[1]
    limit_plus = 0.5 * (np.eye(r) + invol)
    limit_minus = 0.5 * (np.eye(r) - invol)
    ks = np.arange(1, band + 1)
    err_plus = np.empty(len(ks))
    err_minus = np.empty(len(ks))
    for i, k in enumerate(ks):
        jp, jm = (k + band) * r, (-k + band) * r
        err_plus[i] = np.abs(C[jp:jp + r, jp:jp + r] - limit_plus).max()
        err_minus[i] = np.abs(C[jm:jm + r, jm:jm + r] - limit_minus).max()
    errs = np.maximum(err_plus, err_minus)
    tail = errs[len(ks) // 2:]
    if tail.max() < 1e-12:
        rate = math.inf
    else:
        k_fit = ks[len(ks) // 2:]
        mask = tail > 0
        rate = -np.polyfit(np.log(k_fit[mask]), np.log(tail[mask]), 1)[0]
    return {
        "limit_plus": limit_plus,
        "limit_minus": limit_minus,
        "errors_plus": err_plus,
        "errors_minus": err_minus,
        "rate": rate,
    }


# ---------------------------------------------------------------------------
# Bergman projector, brute force vs K (K*K)^-1 K*
# ---------------------------------------------------------------------------


@dataclass
class BergmanComparison:
    """Both Bergman constructions on the truncated monomial space.

    Matrices act on coordinates in an orthonormalized monomial basis of
    polynomials of total degree <= band (scalar model).  ``onb`` maps
    monomial coefficients to orthonormal coordinates.
    """

    band: int
    monos: list
    onb: np.ndarray
    direct: np.ndarray
    via_poisson: np.ndarray
    kmat: np.ndarray
    kstar_k: np.ndarray

    def distance(self) -> float:
        return float(np.linalg.norm(self.direct - self.via_poisson, ord=2))

    def to_on(self, coeffs: dict) -> np.ndarray:
        vec = np.zeros(len(self.monos), dtype=complex)
        for (a, b), c in coeffs.items():
            vec[self.monos.index((a, b))] = c
        return self.onb @ vec

    def apply_direct(self, coeffs: dict) -> np.ndarray:
        return self.direct @ self.to_on(coeffs)


def _scalar_gram(monos) -> np.ndarray:
    g = np.zeros((len(monos), len(monos)))
    for i, (a, b) in enumerate(monos):
        for j, (c, d) in enumerate(monos):
            if a - b == c - d:
                g[i, j] = 2 * math.pi / (a + b + c + d + 2)
    return g


def _scalar_onb(monos) -> np.ndarray:
    """Map from monomial coefficients to orthonormal disc-L^2 coordinates.

    The Gram matrix is Hilbert-like within each a-b block and numerically
    singular in floats well before band 20, so the LDL factorization is done
    exactly over the rationals (2 pi factored out); square roots are taken
    only of the positive rational pivots.
    """
    blocks = {}
    for idx, (a, b) in enumerate(monos):
        blocks.setdefault(a - b, []).append(idx)
    onb = np.zeros((len(monos), len(monos)))
    for idxs in blocks.values():
        k = len(idxs)
        h = [[Fraction(1, sum(monos[idxs[i]]) + sum(monos[idxs[j]]) + 2)
              for j in range(k)] for i in range(k)]
        low = [[Fraction(0)] * k for _ in range(k)]
        diag = [Fraction(0)] * k
        for j in range(k):
            diag[j] = h[j][j] - sum(low[j][t] ** 2 * diag[t] for t in range(j))
            low[j][j] = Fraction(1)
            for i in range(j + 1, k):
                s = h[i][j] - sum(low[i][t] * low[j][t] * diag[t] for t in range(j))
                low[i][j] = s / diag[j]
        scale = [math.sqrt(2 * math.pi * float(d)) for d in diag]
        for r in range(k):
            for c in range(r, k):
                onb[idxs[r], idxs[c]] = scale[r] * float(low[c][r])
    return onb


def bergman_bruteforce(band: int) -> BergmanComparison:
    """Bergman projector two ways on polynomials of total degree <= band.

    Direct: orthogonal projection onto span{z^k} in disc L^2.  Via the
    boundary: K pinv(K*K) K* with K the extension operator from circle
    modes; the pseudo-inverse restricted to the range realizes the
    regularized inverse construction on the truncated space.
    """
    if band < 1:
        raise ValueError("band must be >= 1")
    monos = _monomials(band)
    onb = _scalar_onb(monos)  # monomial coeffs -> orthonormal coordinates

    # harmonic columns z^k in orthonormal coordinates
    S = np.stack([onb[:, monos.index((k, 0))] for k in range(band + 1)], axis=1)
    direct = S @ np.linalg.solve(S.conj().T @ S, S.conj().T)

    # K from boundary modes -band..band (orthonormal circle basis e^{ikt}/sqrt(2 pi))
    nmodes = 2 * band + 1
    kmat = np.zeros((len(monos), nmodes), dtype=complex)
    for k in range(0, band + 1):
        kmat[:, k + band] = onb[:, monos.index((k, 0))] / math.sqrt(2 * math.pi)
    kstar_k = kmat.conj().T @ kmat
    via = kmat @ np.linalg.pinv(kstar_k, rcond=1e-12) @ kmat.conj().T
    return BergmanComparison(band, monos, onb, direct, via, kmat, kstar_k)


def projector_to_json(P: np.ndarray, digits: int = 12) -> dict:
    """JSON-friendly dense matrix dump (small bands only)."""
    return {
        "shape": list(P.shape),
        "re": np.round(P.real, digits).tolist(),
        "im": np.round(P.imag, digits).tolist(),
    }
