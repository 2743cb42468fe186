import numpy as np
import pytest

from diracproj.clifford import BoundarySplitting, boundary_clifford, build_rep, volume_element


@pytest.mark.parametrize("d", range(1, 7))
def test_generator_relations(d):
    rep = build_rep(d)
    assert rep.rank == 2 ** (d // 2)
    ident = np.eye(rep.rank)
    for i, gi in enumerate(rep.gens):
        assert np.abs(gi.conj().T + gi).max() <= 1e-14  # skew-Hermitian
        assert np.abs(gi.conj().T @ gi - ident).max() <= 1e-14  # unitary
        for j, gj in enumerate(rep.gens):
            acom = gi @ gj + gj @ gi + 2 * (i == j) * ident
            assert np.abs(acom).max() <= 1e-14


def test_build_rep_examples():
    rep1 = build_rep(1)
    assert rep1.rank == 1
    assert rep1.gens[0][0, 0] == 1j
    rep2 = build_rep(2)
    g1, g2 = rep2.gens
    assert np.abs(g1 @ g2 + g2 @ g1).max() == 0
    assert np.abs(g1 @ g1 + np.eye(2)).max() == 0


def test_build_rep_rejects_nonpositive():
    with pytest.raises(ValueError):
        build_rep(0)
    with pytest.raises(ValueError):
        build_rep(-3)


def test_build_rep_deterministic():
    a, b = build_rep(5), build_rep(5)
    for ga, gb in zip(a.gens, b.gens):
        assert np.array_equal(ga, gb)


def test_boundary_splitting_projections():
    for d in (2, 3, 4, 5):
        rep = build_rep(d)
        sp = BoundarySplitting.from_rep(rep)
        ident = np.eye(rep.rank)
        assert np.abs(sp.proj_plus + sp.proj_minus - ident).max() <= 1e-15
        for p in (sp.proj_plus, sp.proj_minus):
            assert np.abs(p @ p - p).max() <= 1e-14
            assert np.abs(p - p.conj().T).max() <= 1e-14
        assert np.abs(rep.cl_nu @ sp.proj_plus - 1j * sp.proj_plus).max() <= 1e-14
        assert np.abs(rep.cl_nu @ sp.proj_minus + 1j * sp.proj_minus).max() <= 1e-14


def test_splitting_matches_eigendecomposition():
    for d in (2, 4, 6):
        rep = build_rep(d)
        sp = rep.splitting()
        # independent eigendecomposition of the Hermitian matrix -i cl(nu)
        vals, vecs = np.linalg.eigh(-1j * rep.cl_nu)
        plus = vecs[:, vals > 0]
        proj = plus @ plus.conj().T
        assert np.abs(proj - sp.proj_plus).max() <= 1e-13


def test_boundary_clifford():
    rng = np.random.default_rng(0)
    for d in (2, 4, 5):
        rep = build_rep(d)
        ident = np.eye(rep.rank)
        assert np.abs(boundary_clifford(rep, np.zeros(d - 1))).max() == 0
        v = rng.normal(size=d - 1)
        v /= np.linalg.norm(v)
        m = boundary_clifford(rep, v)
        assert np.abs(m @ m + ident).max() <= 1e-13
        assert np.abs(rep.cl_nu @ m + m @ rep.cl_nu).max() <= 1e-14
        # the involution underlying the projector symbol
        invol = 1j * rep.cl_nu @ m
        assert np.abs(invol @ invol - ident).max() <= 1e-13


def test_boundary_clifford_dimension_mismatch():
    rep = build_rep(3)
    with pytest.raises(ValueError):
        boundary_clifford(rep, np.ones(3))


def test_volume_element():
    for d in (1, 2, 3, 4, 5, 6):
        rep = build_rep(d)
        om = volume_element(rep)
        assert np.abs(om @ om - np.eye(rep.rank)).max() <= 1e-12
        if d % 2 == 0:
            for g in rep.gens:
                assert np.abs(om @ g + g @ om).max() <= 1e-13
    assert abs(abs(volume_element(build_rep(1))[0, 0]) - 1) <= 1e-15
