import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import k0

from diracproj.clifford import build_rep
from diracproj.symbols import (
    ClassicalSymbol,
    GammaPoleError,
    HomSymbol,
    calderon_symbol,
    compose_LK,
    gamma_ft_coeff,
    log_free,
    log_free_moments,
    principal_symbol_K,
    principal_symbol_Kstar,
    scattering_normalization,
    scattering_symbol,
    sphere_quadrature,
    symbol_K,
    symbol_Kstar,
)


def scalar_symbol(n, shift=1.0, with_ft=True):
    """(xi^2 + shift^2 |mu|^2)^(-1/2) as a rank-1 HomSymbol."""

    def value(zeta):
        zeta = np.asarray(zeta, dtype=float)
        xi = np.asarray(zeta[..., 0])
        m2 = np.asarray(np.einsum("...i,...i->...", zeta[..., 1:], zeta[..., 1:]))
        return ((xi ** 2 + shift ** 2 * m2) ** -0.5)[..., None, None] * np.ones((1, 1))

    ft = None
    if with_ft:
        ft = lambda x, mu: 2 * k0(shift * np.linalg.norm(mu) * abs(x)) * np.ones((1, 1))
    return HomSymbol(degree=-1.0, n=n, zeta_dim=n + 1, size=1, value=value, ft=ft)


def test_gamma_ft_coeff_values():
    assert abs(gamma_ft_coeff(1.0, 1) - 2 * math.pi) <= 1e-12
    with pytest.raises(GammaPoleError):
        gamma_ft_coeff(0.0, 1)
    with pytest.raises(GammaPoleError):
        gamma_ft_coeff(-2.0, 2)


@pytest.mark.parametrize("lam", [0.5, 1.0, 1.5])
@pytest.mark.parametrize("n", [1, 2])
def test_gamma_ft_coeff_oracle(lam, n):
    # weak pairing <F f, g> = <f, F g> against a Gaussian, radial quadrature
    d = n + 1
    lhs, _ = integrate.quad(lambda r: r ** (lam - 1) * math.exp(-r * r / 2), 0, 40)
    rhs, _ = integrate.quad(lambda r: r ** (d - 1 - lam) * math.exp(-r * r / 2), 0, 40)
    oracle = (2 * math.pi) ** (d / 2) * lhs / rhs
    assert abs(gamma_ft_coeff(lam, n) - oracle) <= 1e-4 * abs(oracle)


def test_principal_symbols():
    rep = build_rep(3)
    assert np.abs(principal_symbol_K(rep, 1.0, np.zeros(2)) - 1j * np.eye(2)).max() <= 1e-15
    mu = np.array([0.4, -1.1])
    a = principal_symbol_K(rep, 0.7, mu)
    b = principal_symbol_K(rep, 1.4, 2 * mu)
    assert np.abs(b - a / 2).max() <= 1e-14  # homogeneity of degree -1
    # adjoint symbol relations
    ks = principal_symbol_Kstar(rep, 0.7, mu)
    assert np.abs(ks - a.conj().T).max() <= 1e-15
    assert np.abs(principal_symbol_K(rep, -0.7, mu).conj().T - a).max() <= 1e-15
    with pytest.raises(ValueError):
        principal_symbol_K(rep, 0.0, np.zeros(2))


def test_hom_symbol_homogeneity_sampled():
    rep = build_rep(4)
    symbol_K(rep).check_homogeneity(samples=100)
    symbol_Kstar(rep).check_homogeneity(samples=100)


def test_classical_symbol_ordering():
    rep = build_rep(2)
    s = symbol_K(rep)
    lower = HomSymbol(degree=-2.0, n=s.n, zeta_dim=s.zeta_dim, size=s.size,
                      value=lambda z: np.zeros(np.asarray(z).shape[:-1] + (2, 2)))
    cs = ClassicalSymbol([s, lower])
    assert cs.order == -1.0 and cs.principal() is s
    with pytest.raises(ValueError):
        ClassicalSymbol([lower, s])


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("mnorm", [1.0, 2.0, 10.0])
def test_compose_reproduces_projector_symbol(n, mnorm):
    rep = build_rep(n + 1)
    rng = np.random.default_rng(5)
    mu = rng.normal(size=n)
    mu *= mnorm / np.linalg.norm(mu)
    target = 0.25 / mnorm * (np.eye(rep.rank) + 1j * rep.cl_nu @ rep.cl(mu / mnorm))
    closed = compose_LK(symbol_Kstar(rep), symbol_K(rep), mu, method="closed")
    assert np.abs(closed - target).max() <= 1e-8
    quadr = compose_LK(symbol_Kstar(rep), symbol_K(rep), mu, method="quadrature")
    assert np.abs(quadr - target).max() <= 1e-5


def test_compose_scalar_analytic_pair():
    s = scalar_symbol(1)
    for mnorm in (1.0, 3.0):
        mu = np.array([mnorm])
        got = compose_LK(s, s, mu, method="quadrature")
        # int_0^inf (2 K0(m x))^2 dx = pi^2 / m, so the composition is 1/(4 m)
        assert abs(got[0, 0] - 0.25 / mnorm) <= 1e-8


def test_compose_homogeneity_and_orders():
    rep = build_rep(3)
    sK, sKs = symbol_K(rep), symbol_Kstar(rep)
    mu = np.array([0.3, -1.2])
    a = compose_LK(sKs, sK, mu)
    b = compose_LK(sKs, sK, 2 * mu)
    assert np.abs(b - a / 2).max() <= 1e-12
    kl = compose_LK(sKs, sK, mu, matrix_order="KL")
    # for this pair the opposite operator order happens to transpose the
    # Clifford part; it must still differ consistently from the LK result
    assert np.abs(kl - kl.conj().T).max() <= 1e-12


def test_compose_quadrature_remainder_path():
    # shifted profile outside the template span: exercises the QAWF remainder
    exact = scalar_symbol(1, shift=2.0, with_ft=True)
    numeric = scalar_symbol(1, shift=2.0, with_ft=False)
    mu = np.array([1.0])
    want = compose_LK(exact, exact, mu, method="closed")
    got, err = compose_LK(numeric, numeric, mu, method="quadrature", return_error=True)
    assert abs(got[0, 0] - want[0, 0]) <= 1e-5
    assert err < 1e-3


def test_compose_rejects_divergent_degree():
    rep = build_rep(2)
    s = symbol_K(rep)
    bad = HomSymbol(degree=-0.5, n=s.n, zeta_dim=s.zeta_dim, size=s.size, value=s.value)
    with pytest.raises(ValueError):
        compose_LK(bad, s, np.array([1.0]))
    with pytest.raises(ValueError):
        compose_LK(s, s, np.array([0.0]))


def test_scattering_symbol_family():
    rep = build_rep(3)
    xi = np.array([0.4, 0.8])
    s0 = scattering_symbol(rep, 0.0, xi)
    assert np.abs(s0 @ s0 - np.eye(2)).max() <= 1e-12
    assert abs(scattering_normalization(0.0) - 1.0) <= 1e-14
    st = scattering_symbol(rep, 0.5, xi, normalized=True)
    assert np.abs(st - 1j * rep.cl_nu @ rep.cl(xi)).max() <= 1e-14
    # -cl(nu) times the normalized family at 1/2 is the boundary Dirac symbol
    l0 = -rep.cl_nu @ st
    assert np.abs(l0 - 1j * rep.cl(xi)).max() <= 1e-14
    for lam in (0.3j, 1.0j):
        a = scattering_symbol(rep, lam, xi)
        b = scattering_symbol(rep, -lam, xi)
        assert np.abs(a @ b - np.eye(2)).max() <= 1e-12
    for lam in (0.5, 1.5, 2.5):
        with pytest.raises(GammaPoleError):
            scattering_symbol(rep, lam, xi)
    with pytest.raises(ValueError):
        scattering_symbol(rep, 0.0, np.zeros(2))


def test_calderon_symbol_identities():
    rng = np.random.default_rng(1)
    for n in (1, 2, 3, 4):
        rep = build_rep(n + 1)
        xi = rng.normal(size=n)
        c = calderon_symbol(rep, xi)
        assert np.abs(c @ c - c).max() <= 1e-14
        assert np.abs(c - c.conj().T).max() <= 1e-14
        eigs = np.sort(np.linalg.eigvalsh(c))
        assert np.abs(eigs[: rep.rank // 2]).max() <= 1e-14
        assert np.abs(eigs[rep.rank // 2:] - 1).max() <= 1e-14
        assert abs(np.trace(c).real - rep.rank / 2) <= 1e-13
        assert np.abs(calderon_symbol(rep, -xi) - (np.eye(rep.rank) - c)).max() <= 1e-14


def test_sphere_quadrature_areas():
    for dim in (1, 2, 3, 4, 5):
        pts, w = sphere_quadrature(dim, 16)
        area = 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)
        assert abs(w.sum() - area) <= 1e-12 * area
        assert np.abs(np.linalg.norm(pts, axis=1) - 1).max() <= 1e-14


def test_log_free_moments():
    # odd profile: moment vanishes by parity
    odd = lambda pts: pts[:, 0][..., None, None] * np.ones((1, 1))
    moments, err = log_free_moments(odd, 0, dim=3, order=24)
    assert max(np.abs(m).max() for _, m in moments) <= 1e-12
    # constant symbol: order-0 moment is the sphere area (log obstruction)
    const = lambda pts: np.ones(pts.shape[:-1] + (1, 1))
    moments, _ = log_free_moments(const, 0, dim=3, order=24)
    assert abs(moments[0][1][0, 0] - 4 * math.pi) <= 1e-10
    assert not log_free(const, 0, dim=3)
    # disc-model leading angular profile (x + cl(nu) cl(z)) at matching order
    rep = build_rep(2)

    def leading(pts):
        mats = pts[..., 0, None, None] * np.eye(2) + pts[..., 1, None, None] * (
            rep.cl_nu @ rep.gens[0]
        )
        return mats

    assert log_free(leading, 0, dim=2)
    ms, _ = log_free_moments(leading, 0, dim=2)
    assert max(np.abs(m).max() for _, m in ms) <= 1e-12


def test_log_free_degree_mismatch():
    rep = build_rep(2)
    s = symbol_K(rep)  # degree -1, zeta_dim 2
    with pytest.raises(ValueError):
        log_free_moments(s, 0)  # expected degree -2 for j=0 at dim 2
