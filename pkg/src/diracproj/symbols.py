"""Principal-symbol calculus for boundary projectors of Dirac operators.

Homogeneous matrix symbols in the covector ``zeta = (xi, mu)`` (one normal
frequency ``xi``, ``n`` tangential frequencies ``mu``), the Gamma-function
coefficient of the Fourier transform of ``rho^(-n-1+lambda)``, the half-line
composition integral for boundary/interior operator products,

    sigma(L o K)(mu) = (2 pi)^-2 * int_0^inf  sigma_L^(-x, mu) sigma_K^(x, mu) dx,

the scattering symbol family and its Gamma normalization, the Calderon
symbol, and the spherical moment integrals whose vanishing makes a kernel
expansion log-free.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from .clifford import CliffordRep

__all__ = [
    "HomSymbol",
    "ClassicalSymbol",
    "GammaPoleError",
    "gamma_ft_coeff",
    "principal_symbol_K",
    "principal_symbol_Kstar",
    "symbol_K",
    "symbol_Kstar",
    "compose_LK",
    "scattering_normalization",
    "scattering_symbol",
    "calderon_symbol",
    "sphere_quadrature",
    "log_free_moments",
    "log_free",
]


class GammaPoleError(ValueError):
    """Evaluation requested at (or too close to) a Gamma-function pole."""


@dataclass
class HomSymbol:
    """A matrix-valued function homogeneous of degree ``degree`` in zeta.

    Parameters
    ----------
    degree : float
        Homogeneity degree s: value(t*zeta) = t^s value(zeta) for t > 0.
    n : int
        Number of tangential covector components mu.
    zeta_dim : int
        Total covector dimension; n+1 for one normal frequency (operators
        between the manifold and its boundary), n+2 for two.
    size : int
        Matrix size (Clifford representation rank).
    value : callable
        value(zeta) with zeta of shape (..., zeta_dim), returning
        (..., size, size).
    ft : callable, optional
        Closed-form Fourier transform in the normal frequency:
        ft(x, mu) = int exp(-i x xi) value((xi, mu)) dxi.
    """

    degree: float
    n: int
    zeta_dim: int
    size: int
    value: Callable
    ft: Optional[Callable] = None

    def __call__(self, zeta):
        return self.value(np.asarray(zeta, dtype=float))

    def check_homogeneity(self, rng=None, samples=100, tol=1e-9) -> float:
        """Sampled check of value(t*zeta) = t^degree value(zeta); returns worst error."""
        rng = rng or np.random.default_rng(0)
        worst = 0.0
        for _ in range(samples):
            zeta = rng.normal(size=self.zeta_dim)
            if np.linalg.norm(zeta) < 0.1:
                continue
            t = float(rng.uniform(0.2, 5.0))
            a = self.value(t * zeta)
            b = t ** self.degree * self.value(zeta)
            scale = max(np.abs(b).max(), 1e-300)
            worst = max(worst, np.abs(a - b).max() / scale)
        if worst > tol:
            raise ValueError(f"homogeneity violated: rel error {worst:.3e}")
        return worst


@dataclass
class ClassicalSymbol:
    """Finite expansion in homogeneous terms of strictly decreasing degree."""

    terms: list

    def __post_init__(self):
        degs = [t.degree for t in self.terms]
        if any(b >= a for a, b in zip(degs, degs[1:])):
            raise ValueError(f"degrees must strictly decrease, got {degs}")
        if len({(t.n, t.size) for t in self.terms}) > 1:
            raise ValueError("all terms must share boundary dimension and matrix size")

    @property
    def order(self):
        return self.terms[0].degree

    def principal(self) -> HomSymbol:
        return self.terms[0]


def gamma_ft_coeff(lam: float, n: int) -> float:
    """Coefficient c(lam, n) in F[rho^(-n-1+lam)] = c * R^(-lam) on R^(n+1).

    c = (2 pi)^((n+1)/2) * 2^(lam-(n+1)/2) * Gamma(lam/2) / Gamma((n+1-lam)/2).
    The direct (L^1) reading of the transform needs 0 < lam < n+1; outside
    that window the value is the analytic continuation.
    """
    if n < 1:
        raise ValueError(f"boundary dimension must be >= 1, got {n}")
    half = lam / 2.0
    if abs(half - round(half)) < 1e-12 and round(half) <= 0:
        raise GammaPoleError(f"Gamma(lam/2) pole at lam = {lam}")
    return (
        (2 * math.pi) ** ((n + 1) / 2)
        * 2.0 ** (lam - (n + 1) / 2)
        * special.gamma(lam / 2)
        / special.gamma((n + 1 - lam) / 2)
    )


def _check_covector(xi, mu):
    if abs(xi) == 0 and np.linalg.norm(mu) == 0:
        raise ValueError("covector (xi, mu) must be nonzero")


def principal_symbol_K(rep: CliffordRep, xi: float, mu):
    """sigma_K(xi, mu) = i (xi^2+|mu|^2)^-1 (xi + cl(nu) cl(mu))."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (rep.dim - 1,):
        raise ValueError(f"mu must have {rep.dim - 1} components")
    _check_covector(xi, mu)
    ident = np.eye(rep.rank)
    q = xi ** 2 + mu @ mu
    return 1j / q * (xi * ident + rep.cl_nu @ rep.cl(mu))


def principal_symbol_Kstar(rep: CliffordRep, xi: float, mu):
    """sigma_K*(xi, mu) = -i (xi^2+|mu|^2)^-1 (xi - cl(nu) cl(mu)); equals sigma_K(xi, mu)^dagger."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (rep.dim - 1,):
        raise ValueError(f"mu must have {rep.dim - 1} components")
    _check_covector(xi, mu)
    ident = np.eye(rep.rank)
    q = xi ** 2 + mu @ mu
    return -1j / q * (xi * ident - rep.cl_nu @ rep.cl(mu))


def symbol_K(rep: CliffordRep) -> HomSymbol:
    """The Poisson-operator principal symbol as a HomSymbol with closed-form FT."""
    n = rep.dim - 1
    ident = np.eye(rep.rank)
    cl_nu_cl = np.stack([rep.cl_nu @ g for g in rep.gens[:n]])

    def value(zeta):
        zeta = np.asarray(zeta, dtype=float)
        xi = np.asarray(zeta[..., 0])
        mu = zeta[..., 1:]
        q = np.asarray(np.einsum("...i,...i->...", zeta, zeta))
        cl = np.asarray(np.einsum("...i,ijk->...jk", mu, cl_nu_cl))
        return (1j / q)[..., None, None] * (xi[..., None, None] * ident + cl)

    def ft(x, mu):
        # residue calculus at xi = +/- i|mu| gives an e^{-|mu||x|} profile
        m = np.linalg.norm(mu)
        a = rep.cl_nu @ rep.cl(mu) / m
        return math.pi * math.exp(-m * abs(x)) * (np.sign(x) * ident + 1j * a)

    return HomSymbol(degree=-1.0, n=n, zeta_dim=n + 1, size=rep.rank, value=value, ft=ft)


def symbol_Kstar(rep: CliffordRep) -> HomSymbol:
    """The adjoint-operator principal symbol, with closed-form FT."""
    n = rep.dim - 1
    ident = np.eye(rep.rank)
    cl_nu_cl = np.stack([rep.cl_nu @ g for g in rep.gens[:n]])

    def value(zeta):
        zeta = np.asarray(zeta, dtype=float)
        xi = np.asarray(zeta[..., 0])
        mu = zeta[..., 1:]
        q = np.asarray(np.einsum("...i,...i->...", zeta, zeta))
        cl = np.asarray(np.einsum("...i,ijk->...jk", mu, cl_nu_cl))
        return (-1j / q)[..., None, None] * (xi[..., None, None] * ident - cl)

    def ft(x, mu):
        m = np.linalg.norm(mu)
        a = rep.cl_nu @ rep.cl(mu) / m
        return math.pi * math.exp(-m * abs(x)) * (-np.sign(x) * ident + 1j * a)

    return HomSymbol(degree=-1.0, n=n, zeta_dim=n + 1, size=rep.rank, value=value, ft=ft)


# ---------------------------------------------------------------------------
# numeric Fourier transform fallback for compose_LK
# ---------------------------------------------------------------------------
#
# Decaying symbols are matched entrywise against four template profiles with
# known transforms,
#     T1 = xi/(xi^2+m^2)          ->  -i pi sign(x) e^(-m|x|)
#     T2 = (xi^2+m^2)^(-1/2)      ->  2 K0(m|x|)
#     T3 = m/(xi^2+m^2)           ->  pi e^(-m|x|)
#     T4 = xi/(xi^2+m^2)^(3/2)    ->  -2 i x K0(m|x|)
# by least squares on sample nodes.  The rational symbols produced in this
# package lie exactly in the template span, so the fallback reduces to a
# closed evaluation; a nonzero remainder is transformed by semi-infinite
# Fourier quadrature (QAWF) per entry, with the truncation tail folded into
# the error estimate.


def _templates(xi, m):
    xi = np.asarray(xi, dtype=float)
    q = xi ** 2 + m ** 2
    return np.stack([xi / q, q ** -0.5, m / q, xi * q ** -1.5], axis=-1)


def _template_fts(x, m):
    ax = abs(x)
    e = math.exp(-m * ax)
    k0 = special.k0(m * ax) if ax > 0 else np.inf
    return np.array(
        [-1j * math.pi * np.sign(x) * e, 2 * k0, math.pi * e, -2j * x * k0]
    )


class _NumericFT:
    """xi-Fourier transform of a symbol at fixed mu, via template matching.

    A nonzero template residual is transformed by oscillation-resolving
    panel Gauss-Legendre quadrature over |xi| <= cutoff*|mu| with nodes
    shared across all requested x (valid for |x| <= x_max); the truncation
    tail, bounded through the fitted cubic decay of the residual, enters the
    error estimate.
    """

    def __init__(self, sym: HomSymbol, mu, tol=1e-9, cutoff=400.0, x_max=None):
        self.sym = sym
        self.mu = np.asarray(mu, dtype=float)
        self.m = float(np.linalg.norm(self.mu))
        if self.m == 0:
            raise ValueError("mu must be nonzero")
        self.cutoff = cutoff * self.m
        self.x_max = x_max if x_max is not None else max(45.0 / self.m, 10.0)
        self.coef = self._asymptotic_coefficients()
        check = self.m * np.array([-55.0, -1.7, -0.4, 0.6, 2.3, 55.0])
        resid = self._sample(check) - np.einsum(
            "ct,tjk->cjk", _templates(check, self.m), self.coef
        )
        self.scale = max(np.abs(self._sample(np.array([self.m]))).max(), 1e-300)
        self.resid_rel = float(np.abs(resid).max()) / self.scale
        self.pure_template = self.resid_rel <= tol
        # pure path: the residual itself bounds the dropped part; remainder
        # path: only the truncation tail of the rule remains (added below)
        self.err_estimate = self.resid_rel * 4.0 if self.pure_template else 0.0
        if not self.pure_template:
            self._build_remainder_rule()

    def _asymptotic_coefficients(self):
        """Template coefficients from Richardson-extrapolated large-xi limits.

        Matching the 1/xi and 1/xi^2 asymptotics exactly (not by least
        squares) makes the unmatched remainder O(xi^-3), so the truncated
        tail of its transform is uniformly small, including at small x.
        """
        m = self.m
        xs = m * 2.0 ** np.arange(10, 15)
        e_half = 0.5 * (self._sample(xs) + self._sample(-xs))
        o_half = 0.5 * (self._sample(xs) - self._sample(-xs))

        def richardson(rows):
            # rows_k = c + a/xs_k + b/xs_k^2 + ...: Neville at t = 1/xs -> 0
            t = 1.0 / xs
            work = [r for r in rows]
            for level in range(1, len(xs)):
                new = []
                for i in range(len(work) - 1):
                    num = work[i + 1] * t[i] - work[i] * t[i + level]
                    new.append(num / (t[i] - t[i + level]))
                work = new
            return work[0]

        c_t2 = richardson([xs[k] * e_half[k] for k in range(len(xs))])
        c_t1 = richardson([xs[k] * o_half[k] for k in range(len(xs))])
        t1 = _templates(xs, m)[:, 0]
        t2 = _templates(xs, m)[:, 1]
        c_t3 = richardson(
            [xs[k] ** 2 * (e_half[k] - c_t2 * t2[k]) / m for k in range(len(xs))]
        )
        c_t4 = richardson(
            [xs[k] ** 2 * (o_half[k] - c_t1 * t1[k]) for k in range(len(xs))]
        )
        return np.stack([c_t1, c_t2, c_t3, c_t4])

    def _sample(self, xis):
        zeta = np.concatenate(
            [xis[:, None], np.broadcast_to(self.mu, (len(xis), len(self.mu))).copy()],
            axis=1,
        )
        return np.asarray(self.sym.value(zeta), dtype=complex)

    def _build_remainder_rule(self):
        # panel width resolves e^{-i x xi} for |x| <= x_max; GL-8 per panel
        width = min(math.pi / (2 * self.x_max), self.cutoff / 64)
        npan = max(int(math.ceil(2 * self.cutoff / width)), 128)
        edges = np.linspace(-self.cutoff, self.cutoff, npan + 1)
        gx, gw = np.polynomial.legendre.leggauss(8)
        mids = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        self._nodes = (mids[:, None] + half[:, None] * gx[None, :]).reshape(-1)
        self._weights = (half[:, None] * gw[None, :]).reshape(-1)
        rho = self._sample(self._nodes) - np.einsum(
            "ct,tjk->cjk", _templates(self._nodes, self.m), self.coef
        )
        self._wrho = self._weights[:, None, None] * rho
        # cubic-decay tail bound for the truncated |xi| > cutoff part
        big = np.abs(self._nodes) > 0.8 * self.cutoff
        c3 = float((np.abs(rho[big]).max(axis=(1, 2)) * np.abs(self._nodes[big]) ** 3).max())
        self.err_estimate += c3 / self.cutoff ** 2 / self.scale

    def __call__(self, x, mu=None):
        out = np.einsum("t,tjk->jk", _template_fts(x, self.m), self.coef)
        if self.pure_template:
            return out
        if abs(x) > self.x_max * (1 + 1e-12):
            raise ValueError(f"remainder rule built for |x| <= {self.x_max}, got {x}")
        phases = np.exp(-1j * x * self._nodes)
        return out + np.einsum("c,cjk->jk", phases, self._wrho)


def compose_LK(sym_L: HomSymbol, sym_K: HomSymbol, mu, method="auto",
               matrix_order="LK", return_error=False):
    """Half-line composition integral for the principal symbol of L o K.

    Computes (2 pi)^-2 int_0^inf sigma_L^(-x, mu) . sigma_K^(x, mu) dx using
    the closed-form transforms attached to the symbols when available
    (``method="auto"`` or ``"closed"``), or the numeric template/QAWF
    fallback (``method="quadrature"``).

    ``matrix_order="KL"`` evaluates the opposite operator-valued product
    sigma_K^(x) . sigma_L^(-x) inside the integrand; the two differ for
    noncommuting symbols and only the "LK" order realizes the boundary
    composition.  With ``return_error=True`` also returns an error estimate
    (outer quadrature error plus the fallback's template residual).
    """
    if sym_L.size != sym_K.size or sym_L.n != sym_K.n:
        raise ValueError("symbols must share boundary dimension and matrix size")
    if sym_L.degree > -1 + 1e-12 or sym_K.degree > -1 + 1e-12:
        raise ValueError(
            f"composition integral diverges: degrees ({sym_L.degree}, {sym_K.degree}) "
            "must be <= -1"
        )
    if matrix_order not in ("LK", "KL"):
        raise ValueError(f"matrix_order must be 'LK' or 'KL', got {matrix_order!r}")
    mu = np.asarray(mu, dtype=float)
    m = float(np.linalg.norm(mu))
    if m == 0:
        raise ValueError("mu must be nonzero")

    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    use_closed = method != "quadrature" and sym_L.ft is not None and sym_K.ft is not None
    if method == "closed" and not use_closed:
        raise ValueError("closed-form transforms are not available on both symbols")
    err = 0.0
    if use_closed:
        ft_L, ft_K = sym_L.ft, sym_K.ft
    else:
        ft_L = _NumericFT(sym_L, mu)
        ft_K = _NumericFT(sym_K, mu)
        err += (ft_L.err_estimate + ft_K.err_estimate) / m

    def integrand(x):
        a = ft_L(-x, mu)
        b = ft_K(x, mu)
        prod = a @ b if matrix_order == "LK" else b @ a
        return np.asarray(prod, dtype=complex)

    # e^{-2 m x}-type decay: a finite upper limit with negligible tail
    upper = max(45.0 / m, 10.0)
    out, quad_err = _dyadic_quad(integrand, upper)
    err += quad_err
    result = out / (2 * math.pi) ** 2
    if return_error:
        return result, err / (2 * math.pi) ** 2
    return result


def _dyadic_quad(f, upper, levels=48, order=16):
    """Gauss-Legendre on dyadic panels of (0, upper]: resolves integrable
    endpoint singularities (log-type) and exponential decay with a fixed
    evaluation count; the error estimate compares against the embedded
    half-order rule."""
    x16, w16 = np.polynomial.legendre.leggauss(order)
    x8, w8 = np.polynomial.legendre.leggauss(order // 2)
    total = None
    coarse = None
    hi = upper
    for _ in range(levels):
        lo = hi / 2
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        vals = [f(mid + half * t) for t in x16]
        panel = half * sum(w * v for w, v in zip(w16, vals))
        vals8 = [f(mid + half * t) for t in x8]
        panel8 = half * sum(w * v for w, v in zip(w8, vals8))
        total = panel if total is None else total + panel
        coarse = panel8 if coarse is None else coarse + panel8
        hi = lo
    return total, float(np.abs(total - coarse).max())


def scattering_normalization(lam):
    """C(lam) = 2^(-2 lam) Gamma(1/2 - lam) / Gamma(1/2 + lam)."""
    z = complex(lam)
    for g in (0.5 - z, 0.5 + z):
        if abs(g.imag) < 1e-12 and abs(g.real - round(g.real)) < 1e-12 and round(g.real) <= 0:
            raise GammaPoleError(f"Gamma pole in C(lambda) at lambda = {lam}")
    c = 2.0 ** (-2 * z) * special.gamma(0.5 - z) / special.gamma(0.5 + z)
    if not isinstance(lam, complex) and abs(c.imag) < 1e-14 * abs(c):
        return c.real
    return c


def scattering_symbol(rep: CliffordRep, lam, xi, normalized=False):
    """Principal symbol of the scattering family at lambda.

    Unnormalized: i C(lam) cl(nu) cl(xi) |xi|^(2 lam - 1), with poles at
    lam in 1/2 + N0 flagged.  The normalized variant divides out C(lam),
    is pole free there, and at lam = 1/2 equals i cl(nu) cl(xi): the
    principal symbol of cl(nu) D on the boundary.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (rep.dim - 1,):
        raise ValueError(f"xi must have {rep.dim - 1} components")
    norm = np.linalg.norm(xi)
    if norm == 0:
        raise ValueError("xi must be nonzero")
    core = 1j * rep.cl_nu @ rep.cl(xi) * norm ** (2 * complex(lam) - 1)
    if normalized:
        return core
    return scattering_normalization(lam) * core


def calderon_symbol(rep: CliffordRep, xi):
    """(1/2)(Id + i cl(nu) cl(xi/|xi|)): idempotent, Hermitian, half rank."""
    xi = np.asarray(xi, dtype=float)
    norm = np.linalg.norm(xi)
    if norm == 0:
        raise ValueError("xi must be nonzero")
    return 0.5 * (np.eye(rep.rank) + 1j * rep.cl_nu @ rep.cl(xi / norm))


# ---------------------------------------------------------------------------
# spherical quadrature and log-free moment conditions
# ---------------------------------------------------------------------------


def sphere_quadrature(dim: int, order: int = 24):
    """Product quadrature nodes/weights on the unit sphere S^(dim-1) in R^dim.

    Trapezoid in the periodic angle, Gauss-Legendre in the polar angles with
    the sin-power surface factors absorbed into the weights.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        mphi = max(4 * order, 16)
        t = 2 * math.pi * np.arange(mphi) / mphi
        pts = np.stack([np.cos(t), np.sin(t)], axis=1)
        return pts, np.full(mphi, 2 * math.pi / mphi)
    sub_pts, sub_w = sphere_quadrature(dim - 1, order)
    x, w = np.polynomial.legendre.leggauss(order)
    theta = 0.5 * math.pi * (x + 1.0)
    wt = w * (math.pi / 2) * np.sin(theta) ** (dim - 2)
    pts = np.concatenate(
        [
            np.repeat(np.cos(theta), len(sub_pts))[:, None],
            np.einsum("t,pj->tpj", np.sin(theta), sub_pts).reshape(-1, dim - 1),
        ],
        axis=1,
    )
    return pts, np.einsum("t,p->tp", wt, sub_w).reshape(-1)


def log_free_moments(a, j: int, dim: int | None = None, order: int = 24):
    """Spherical moments int_{S^(dim-1)} a(omega) omega^alpha domega, |alpha| = j.

    ``a`` is a HomSymbol (dim defaults to its zeta_dim, and the degree must
    equal -dim-j: the order at which these moments obstruct a log-free
    expansion) or a plain callable on points of R^dim.  Returns
    ``(moments, err)``: moments as a list of (alpha, matrix), err a
    quadrature accuracy estimate from comparing two rule orders.
    """
    if j < 0:
        raise ValueError("moment order j must be >= 0")
    if isinstance(a, HomSymbol):
        if dim is None:
            dim = a.zeta_dim
        if abs(a.degree + dim + j) > 1e-9:
            raise ValueError(
                f"degree/order mismatch: symbol degree {a.degree}, expected {-dim - j}"
            )
        fn = a.value
    else:
        if dim is None:
            raise ValueError("dim is required for a bare callable")
        fn = a

    def all_moments(qorder):
        pts, w = sphere_quadrature(dim, qorder)
        vals = np.asarray(fn(pts), dtype=complex)
        out = []
        for alpha in itertools.combinations_with_replacement(range(dim), j):
            mono = np.ones(len(pts))
            for axis in alpha:
                mono = mono * pts[:, axis]
            out.append((alpha, np.einsum("p,p...->...", w * mono, vals)))
        return out

    coarse = all_moments(order)
    fine = all_moments(order + 8)
    err = max(
        (np.abs(mc - mf).max() for (_, mc), (_, mf) in zip(coarse, fine)), default=0.0
    )
    return fine, float(err)


def log_free(a, j: int, dim: int | None = None, tol: float = 1e-8, order: int = 24) -> bool:
    """True when every spherical moment of order j vanishes to tolerance."""
    moments, err = log_free_moments(a, j, dim=dim, order=order)
    worst = max((np.abs(m).max() for _, m in moments), default=0.0)
    return worst <= tol + err
