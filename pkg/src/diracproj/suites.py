"""Verification suites over the disc, symbol, index-set and torus modules.

Each suite is a list of named cases; running one produces a
:class:`~diracproj.reporting.SuiteReport` whose rows carry the computed and
expected values, the error, the tolerance and a provenance tag (oracle,
golden value, identity, or informational).  Tolerances default to the
acceptance values and can be overridden globally.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
from scipy import integrate

from . import conformal as cf
from . import disc, index_sets as isets, symbols as sym
from .clifford import build_rep
from .index_sets import IndexSet, NDegree
from .reporting import CaseRow, SuiteReport

__all__ = ["run_suite", "SUITES", "sample_pairs", "run_disc", "run_symbols",
           "run_indexsets", "run_conformal"]


def _run_cases(name, cases, suite_filter=None):
    report = SuiteReport(name)
    for case_id, fn in cases:
        if suite_filter and suite_filter not in case_id:
            continue
        t0 = time.perf_counter()
        row = fn()
        row.case_id = case_id
        row.wall_time = time.perf_counter() - t0
        report.rows.append(row)
    return report


def sample_pairs(count, seed, rmax=0.9):
    """Deterministic (z, w) pairs in the closed disc of radius rmax."""
    rng = np.random.default_rng(seed)
    r = rmax * np.sqrt(rng.uniform(size=(count, 2)))
    t = 2 * math.pi * rng.uniform(size=(count, 2))
    z = r[:, 0] * np.exp(1j * t[:, 0])
    w = r[:, 1] * np.exp(1j * t[:, 1])
    return list(zip(z, w))


# ---------------------------------------------------------------------------
# disc suite
# ---------------------------------------------------------------------------


def _disc_spectrum_case(modes, tol):
    def fn():
        worst = 0.0
        for k in range(modes):
            quad, _ = integrate.quad(lambda r: r ** (2 * k + 1), 0.0, 1.0)
            # disc norm^2 of z^k over circle norm^2 of e^{ikt}
            oracle = (2 * math.pi * quad) / (2 * math.pi)
            val = float(disc.kstark_eigenvalue(k))
            worst = max(worst, abs(val - oracle) / oracle)
        neg_ok = all(disc.kstark_eigenvalue(k) == 0 for k in range(-8, 0))
        return CaseRow(
            "", {"modes": modes}, worst, 0.0,
            worst if neg_ok else math.inf, tol,
            "quadrature of disc monomial norms",
        )
    return fn


def kernel_tail_ratio(kind, pairs, band):
    """Worst |series - closed| / (analytic tail bound) over the pairs.

    Evaluated in mpmath at a precision chosen per pair from the log of the
    bound, which underflows double precision well inside the disc.
    """
    kern, closed = {
        "kkstar": (disc.kkstar_kernel, disc.kkstar_closed),
        "bergman": (disc.bergman_kernel, disc.bergman_closed),
    }[kind]
    ratio = 0.0
    for z, w in pairs:
        x = abs(z) * abs(w)
        if x == 0:
            continue  # the truncated series is exact at the center
        # log10 of the tail bound, computed without underflow
        if kind == "kkstar":
            log_bound = (band + 1) * math.log10(x) - math.log10(2 * math.pi * (1 - x))
        else:
            log_bound = ((band + 1) * math.log10(x)
                         + math.log10((band + 2) / (1 - x) + x / (1 - x) ** 2)
                         - math.log10(math.pi))
        dps = max(30, int(-log_bound) + 15)
        with mpmath.workdps(dps):
            xm = abs(mpmath.mpc(z)) * abs(mpmath.mpc(w))
            if kind == "kkstar":
                bound = xm ** (band + 1) / (2 * mpmath.pi * (1 - xm))
            else:
                bound = (xm ** (band + 1)
                         * ((band + 2) / (1 - xm) + xm / (1 - xm) ** 2) / mpmath.pi)
            err = abs(kern(mpmath.mpc(z), mpmath.mpc(w), band)
                      - closed(mpmath.mpc(z), mpmath.mpc(w)))
            ratio = max(ratio, float(err / bound))
    return ratio


def _kernel_case(kind, band, pairs):
    def fn():
        ratio = kernel_tail_ratio(kind, pairs, band)
        return CaseRow(
            "", {"band": band, "pairs": len(pairs)}, ratio, "<= 1",
            ratio, 1.0, "analytic truncation tail bound",
        )
    return fn


def _calderon_case(tol, band=64):
    rep = build_rep(2)

    def fn():
        C = disc.calderon_bruteforce("spin", band, rep)
        ident = np.eye(C.shape[0])
        worst = max(
            float(np.abs(C @ C - C).max()),
            float(np.abs(C - C.conj().T).max()),
            disc.lagrangian_check(C, rep),
        )
        rank_err = abs(np.trace(C).real - 2 * (band + 1))
        return CaseRow(
            "", {"band": band}, worst, 0.0, max(worst, rank_err), tol,
            "projector identities + Lagrangian relation",
        )
    return fn


def _aps_case(band=32):
    def fn():
        C = disc.calderon_bruteforce("scalar", band)
        expect = np.diag((np.arange(-band, band + 1) >= 0).astype(complex))
        err = float(np.abs(C - expect).max())
        return CaseRow("", {"band": band}, err, 0.0, err, 0.0,
                       "spectral-projection identification")
    return fn


def _symbol_limit_case(tol, band=64):
    rep = build_rep(2)

    def fn():
        C = disc.calderon_bruteforce("spin", band, rep)
        res = disc.calderon_symbol_limit(C, rep)
        err = float(max(res["errors_plus"][-1], res["errors_minus"][-1]))
        return CaseRow(
            "", {"band": band, "rate": res["rate"]}, err, 0.0, err, tol,
            "projector-symbol limit blocks",
        )
    return fn


def _bergman_case(tol, band=24):
    def fn():
        cmpres = disc.bergman_bruteforce(band)
        pk = float(np.abs(cmpres.direct @ cmpres.kmat - cmpres.kmat).max())
        err = max(cmpres.distance(), pk)
        return CaseRow(
            "", {"band": band}, err, 0.0, err, tol,
            "direct span projection vs boundary-composition route",
        )
    return fn


def run_disc(modes=64, tol=1e-10, kernel_band=200, kernel_pairs=100, seed=7,
             suite_filter=None, csv_dir=None):
    pairs = sample_pairs(kernel_pairs, seed)
    spin_band = max(8, min(modes, 64))  # the symbol-limit fit needs band >= 8
    cases = [
        ("disc.kstark-spectrum", _disc_spectrum_case(modes, tol)),
        ("disc.kkstar-kernel", _kernel_case("kkstar", kernel_band, pairs)),
        ("disc.bergman-kernel", _kernel_case("bergman", kernel_band, pairs)),
        ("disc.calderon-spin", _calderon_case(tol, spin_band)),
        ("disc.calderon-aps-scalar", _aps_case()),
        ("disc.calderon-symbol-limit", _symbol_limit_case(1e-3, spin_band)),
        ("disc.bergman-projector", _bergman_case(tol)),
    ]
    report = _run_cases("disc", cases, suite_filter)
    if csv_dir:
        from .reporting import write_json, write_kernel_grid_csv
        for kind in ("kkstar", "bergman"):
            grid = disc.make_kernel_grid(kind, pairs, kernel_band)
            write_kernel_grid_csv(grid, f"{csv_dir}/disc_{kind}_grid.csv")
        small = disc.calderon_bruteforce("spin", 8, build_rep(2))
        write_json({"schema": 1, "projector": "calderon-spin-band8",
                    "matrix": disc.projector_to_json(small)},
                   f"{csv_dir}/disc_calderon_band8.json")
    return report


# ---------------------------------------------------------------------------
# symbols suite
# ---------------------------------------------------------------------------


def _compose_case(n, mnorm, method, tol, seed):
    def fn():
        rep = build_rep(n + 1)
        rng = np.random.default_rng(seed)
        mu = rng.normal(size=n)
        mu *= mnorm / np.linalg.norm(mu)
        target = 0.25 / mnorm * (np.eye(rep.rank) + 1j * rep.cl_nu @ rep.cl(mu / mnorm))
        got = sym.compose_LK(sym.symbol_Kstar(rep), sym.symbol_K(rep), mu, method=method)
        err = float(np.abs(got - target).max())
        return CaseRow("", {"n": n, "|mu|": mnorm, "method": method},
                       err, 0.0, err, tol, "half-line composition vs closed form")
    return fn


def _compose_order_doc_case(n, seed):
    def fn():
        rep = build_rep(n + 1)
        rng = np.random.default_rng(seed)
        mu = rng.normal(size=n)
        mu /= np.linalg.norm(mu)
        lk = sym.compose_LK(sym.symbol_Kstar(rep), sym.symbol_K(rep), mu)
        kl = sym.compose_LK(sym.symbol_Kstar(rep), sym.symbol_K(rep), mu, matrix_order="KL")
        gap = float(np.abs(lk - kl).max())
        return CaseRow("", {"n": n, "order-gap": gap}, gap, "informational",
                       0.0, math.inf, "opposite operator order, for documentation")
    return fn


def _gamma_case(lam, n, tol):
    def fn():
        d = n + 1
        lhs, _ = integrate.quad(lambda r: r ** (lam - 1) * math.exp(-r * r / 2), 0, 40)
        rhs, _ = integrate.quad(lambda r: r ** (d - 1 - lam) * math.exp(-r * r / 2), 0, 40)
        oracle = (2 * math.pi) ** (d / 2) * lhs / rhs
        val = sym.gamma_ft_coeff(lam, n)
        err = abs(val - oracle) / abs(oracle)
        return CaseRow("", {"lam": lam, "n": n}, val, oracle, err, tol,
                       "Gaussian-pairing Fourier oracle")
    return fn


def _scattering_case(tol):
    def fn():
        rep = build_rep(3)
        xi = np.array([0.6, -0.5])
        worst = 0.0
        s0 = sym.scattering_symbol(rep, 0.0, xi)
        worst = max(worst, float(np.abs(s0 @ s0 - np.eye(2)).max()))
        st = sym.scattering_symbol(rep, 0.5, xi, normalized=True)
        worst = max(worst, float(np.abs(st - 1j * rep.cl_nu @ rep.cl(xi)).max()))
        for lam in (0.3j, 1.0j):
            a = sym.scattering_symbol(rep, lam, xi)
            b = sym.scattering_symbol(rep, -lam, xi)
            worst = max(worst, float(np.abs(a @ b - np.eye(2)).max()))
        pole = False
        try:
            sym.scattering_symbol(rep, 0.5, xi)
        except sym.GammaPoleError:
            pole = True
        return CaseRow("", {}, worst, 0.0, worst if pole else math.inf, tol,
                       "involution/inverse/normalization identities")
    return fn


def _calderon_symbol_case(tol):
    def fn():
        worst = 0.0
        rng = np.random.default_rng(3)
        for n in (1, 2, 3, 4):
            rep = build_rep(n + 1)
            xi = rng.normal(size=n)
            c = sym.calderon_symbol(rep, xi)
            worst = max(worst, float(np.abs(c @ c - c).max()))
            worst = max(worst, float(np.abs(c - c.conj().T).max()))
            eigs = np.sort(np.linalg.eigvalsh(c))
            want = np.concatenate([np.zeros(rep.rank // 2), np.ones(rep.rank // 2)])
            worst = max(worst, float(np.abs(eigs - want).max()))
            comp = sym.calderon_symbol(rep, -xi)
            worst = max(worst, float(np.abs(comp - (np.eye(rep.rank) - c)).max()))
        return CaseRow("", {"dims": [1, 2, 3, 4]}, worst, 0.0, worst, tol,
                       "projector-symbol identities")
    return fn


def _moments_case(tol):
    def fn():
        n = 1
        dim = n + 1  # boundary-composition convention: sphere S^n in (x, z)
        rep = build_rep(2)

        def leading(omega_pts):
            # angular profile of the disc-model leading kernel term
            x = omega_pts[..., 0]
            z = omega_pts[..., 1]
            mats = np.zeros(omega_pts.shape[:-1] + (2, 2), dtype=complex)
            mats += x[..., None, None] * np.eye(2)
            mats += z[..., None, None] * (rep.cl_nu @ rep.gens[0])
            return mats

        moments, err = sym.log_free_moments(leading, 0, dim=dim, order=32)
        worst = max(float(np.abs(m).max()) for _, m in moments)
        # a constant symbol has a nonzero order-0 moment: the obstruction case
        const_m, _ = sym.log_free_moments(
            lambda pts: np.ones(pts.shape[:-1] + (1, 1)), 0, dim=dim, order=32
        )
        obstruction = float(np.abs(const_m[0][1]).max())
        ok = worst <= tol + err and obstruction > 1.0
        return CaseRow("", {"dim": dim, "obstruction": obstruction},
                       worst, 0.0, worst if ok else math.inf, tol,
                       "spherical moment quadrature")
    return fn


def run_symbols(tol_closed=1e-8, tol_quad=1e-5, tol_gamma=1e-4, seed=7,
                suite_filter=None):
    cases = []
    for n in (1, 2, 3):
        for mnorm in (1.0, 2.0, 10.0):
            cases.append((f"symbols.compose-closed-n{n}-m{mnorm:g}",
                          _compose_case(n, mnorm, "closed", tol_closed, seed)))
            cases.append((f"symbols.compose-quadrature-n{n}-m{mnorm:g}",
                          _compose_case(n, mnorm, "quadrature", tol_quad, seed)))
    cases.append(("symbols.compose-order-doc", _compose_order_doc_case(2, seed)))
    for lam in (0.5, 1.0, 1.5):
        for n in (1, 2):
            cases.append((f"symbols.gamma-lam{lam:g}-n{n}", _gamma_case(lam, n, tol_gamma)))
    cases.append(("symbols.scattering-identities", _scattering_case(1e-12)))
    cases.append(("symbols.calderon-symbol", _calderon_symbol_case(1e-14)))
    cases.append(("symbols.log-free-moments", _moments_case(1e-8)))
    return _run_cases("symbols", cases, suite_filter)


# ---------------------------------------------------------------------------
# index set suite
# ---------------------------------------------------------------------------


def _theorem_chain(n):
    """The composition chain of the interior-projector structure theorem."""
    half = Fraction(1, 2)
    e_ff = IndexSet.from_gens([(NDegree(1, -half), 0), (NDegree(0, half), 1)], n=n)
    f_ff = IndexSet.smooth(NDegree(Fraction(-3, 2), -half))
    f_rb = IndexSet.smooth(half)
    h_ff, h_rb = isets.compose_boundary(e_ff, f_ff, f_rb, n=n, ambiguous="upper")
    h_rb = isets.refine(h_rb, IndexSet.smooth(half), n=2 if n is None else n)
    g_ff = IndexSet.smooth(NDegree(half, -half))
    g_lb = IndexSet.smooth(half)
    j_ff, j_lb, j_rb = isets.compose_interior(h_ff, h_rb, g_ff, g_lb, n=n, ambiguous="upper")
    return h_ff, h_rb, j_ff, j_lb, j_rb


def _golden_sets_case(n):
    half = Fraction(1, 2)

    def fn():
        h_ff, h_rb, j_ff, j_lb, j_rb = _theorem_chain(None)
        expected_j = IndexSet.from_gens(
            [(NDegree(0, -half), 0), (NDegree(-1, half), 1), (NDegree(1, half), 3)], n=None
        )
        ok = j_ff.eq_symbolic(expected_j)
        smooth_half = IndexSet.smooth(half)
        j_lb = isets.refine(j_lb, smooth_half, n=n)
        j_rb = isets.refine(j_rb, smooth_half, n=n)
        ok &= j_lb.eq_symbolic(smooth_half) and j_rb.eq_symbolic(smooth_half)
        shifted = isets.halfdensity_shift(j_ff, "ff", "from")
        expected_k = IndexSet.from_gens(
            [(NDegree(-1, -1), 0), (NDegree(-2, 0), 1), (NDegree(0, 0), 3)], n=None
        )
        ok &= shifted.eq_symbolic(expected_k)
        ok &= isets.halfdensity_shift(shifted, "ff", "to").eq_symbolic(j_ff)
        ok &= isets.halfdensity_shift(j_rb, "rb", "from").eq_symbolic(IndexSet.smooth(0))
        return CaseRow("", {"n": "symbolic", "J_ff_gens": j_ff.to_json()},
                       {"J_ff": j_ff.pretty(), "shifted": shifted.pretty()},
                       {"J_ff": expected_j.pretty(), "shifted": expected_k.pretty()},
                       0.0 if ok else 1.0, 0.0, "golden composition chain")
    return fn


def _closure_axiom_case(n):
    def fn():
        h_ff, h_rb, j_ff, j_lb, j_rb = _theorem_chain(n)
        bad = 0
        for E in (h_ff, h_rb, j_ff, j_lb, j_rb):
            for beta, k in E.gens:
                if k > 0 and not isets.member(E, beta, k - 1, n):
                    bad += 1
                if not isets.member(E, beta + NDegree(1, 0), k, n):
                    bad += 1
        return CaseRow("", {"n": n}, bad, 0, float(bad), 0.0, "closure axioms on outputs")
    return fn


def _algebra_case(n):
    def fn():
        half = Fraction(1, 2)
        sets = [
            IndexSet.smooth(0),
            IndexSet.smooth(NDegree(0, -half)),
            IndexSet.from_gens([(NDegree(1, 0), 1)], n=n),
            IndexSet.from_gens([(NDegree(Fraction(-3, 2), 0), 0), (NDegree(half, 0), 1)], n=n),
        ]
        bad = 0
        for A in sets:
            for B in sets:
                if not isets.sum_sets(A, B, n).eq_at(isets.sum_sets(B, A, n), n):
                    bad += 1
                if not isets.ext_union(A, B, n).eq_at(isets.ext_union(B, A, n), n):
                    bad += 1
                for Cset in sets:
                    lhs = isets.sum_sets(isets.sum_sets(A, B, n), Cset, n)
                    rhs = isets.sum_sets(A, isets.sum_sets(B, Cset, n), n)
                    if not lhs.eq_at(rhs, n):
                        bad += 1
                    lhs = isets.ext_union(isets.ext_union(A, B, n), Cset, n)
                    rhs = isets.ext_union(A, isets.ext_union(B, Cset, n), n)
                    if not lhs.eq_at(rhs, n):
                        bad += 1
        return CaseRow("", {"n": n}, bad, 0, float(bad), 0.0,
                       "commutativity/associativity on closures")
    return fn


def run_indexsets(n=2, suite_filter=None):
    cases = [
        ("indexsets.golden-structure-sets", _golden_sets_case(n)),
        ("indexsets.closure-axioms", _closure_axiom_case(n)),
        ("indexsets.algebra-laws", _algebra_case(n)),
    ]
    return _run_cases("indexsets", cases, suite_filter)


# ---------------------------------------------------------------------------
# conformal suite
# ---------------------------------------------------------------------------


def run_conformal(grid_m=32, band=2, amplitude=0.2, seed=7, tol_cov=1e-6,
                  tol_selfadj=1e-8, tol_routes=1e-8, tol_indicial=1e-10,
                  n_fields=3, suite_filter=None, csv_dir=None):
    n = 3
    grid = cf.TorusGrid(n, grid_m)
    rep = build_rep(n)
    rep_amb = build_rep(n + 1)
    omega = cf.ConformalFactor.random(n, band, amplitude, seed=seed)

    def covariance_case():
        op = cf.assemble_L1(rep, omega, grid)
        flat = cf.assemble_L1(rep, cf.ConformalFactor.zero(n), grid)
        worst = 0.0
        for s in range(n_fields):
            phi = cf.random_spinor(grid, rep.rank, band=4, seed=seed + s)
            worst = max(worst, cf.covariance_residual(rep, omega, grid, phi,
                                                      op=op, flat_op=flat))
        phi = cf.random_spinor(grid, rep.rank, band=4, seed=seed)
        d3 = cf.dirac_flat(rep, cf.dirac_flat(rep, cf.dirac_flat(rep, phi)))
        flat_err = cf.SpinorField(grid, flat.apply(phi).values - d3.values).norm() / d3.norm()
        return CaseRow("", {"m": grid_m, "band": band, "amplitude": amplitude,
                            "flat-vs-D3": flat_err},
                       worst, 0.0, max(worst, flat_err * (tol_cov / 1e-12)), tol_cov,
                       "conformal covariance law")

    def selfadj_case():
        op = cf.assemble_L1(rep, omega, grid)
        fields = [cf.random_spinor(grid, rep.rank, band=4, seed=seed + 10 + s)
                  for s in range(n_fields + 1)]
        images = [op.apply(p) for p in fields]
        worst = 0.0
        for s in range(n_fields):
            a = cf.conformal_inner(omega, images[s], fields[s + 1])
            b = cf.conformal_inner(omega, fields[s], images[s + 1])
            worst = max(worst, abs(a - b) / (fields[s].norm() * fields[s + 1].norm()))
        return CaseRow("", {"m": grid_m, "cases": n_fields}, worst, 0.0, worst,
                       tol_selfadj, "weighted inner-product symmetry")

    def routes_case():
        opA = cf.assemble_L1_ambient(rep_amb, omega, grid)
        opB = cf.L1CorollaryAmbient(rep_amb, omega, grid, context=opA)
        worst = 0.0
        for s in range(n_fields):
            phi = cf.random_spinor(grid, rep_amb.rank, band=4, seed=seed + 20 + s)
            worst = max(worst, cf.compare_routes(rep_amb, omega, grid, phi,
                                                 ops=(opA, opB)))
        return CaseRow("", {"m": grid_m, "cases": n_fields}, worst, 0.0, worst,
                       tol_routes, "curvature formula vs ambient expansion")

    def curvature_case():
        curv = cf.curvature_conformally_flat(omega, grid)
        tr = curv.trace_identity_residual()
        # directional derivative of scal against central differences
        delta = cf.ConformalFactor.random(n, band, amplitude / 2, seed=seed + 31)
        h = 1e-4
        sp = cf.curvature_conformally_flat(
            cf.ConformalFactor(n, {k: omega.coeffs.get(k, 0) + h * delta.coeffs.get(k, 0)
                                   for k in set(omega.coeffs) | set(delta.coeffs)}), grid).scal
        sm = cf.curvature_conformally_flat(
            cf.ConformalFactor(n, {k: omega.coeffs.get(k, 0) - h * delta.coeffs.get(k, 0)
                                   for k in set(omega.coeffs) | set(delta.coeffs)}), grid).scal
        fd = (sp - sm) / (2 * h)
        dv = delta.sample(grid)
        base = cf.curvature_conformally_flat(omega, grid)
        grad_d = [delta.deriv(j).sample(grid) for j in range(n)]
        omg_d = [omega.deriv(j).sample(grid) for j in range(n)]
        lap_d = sum(delta.deriv(j).deriv(j).sample(grid) for j in range(n))
        dot = sum(g * o for g, o in zip(grad_d, omg_d))
        exp_m2 = np.exp(-2 * omega.sample(grid))
        analytic = -2 * dv * base.scal - (n - 1) * exp_m2 * (2 * lap_d + 2 * (n - 2) * dot)
        fd_err = float(np.abs(analytic - fd).max() / max(np.abs(fd).max(), 1e-30))
        err = max(tr / 1e-10 * 1e-5, fd_err)
        return CaseRow("", {"m": grid_m, "trace-residual": tr}, fd_err, 0.0, err,
                       1e-5, "finite-difference variation oracle")

    def indicial_case():
        worst = 0.0
        phi = cf.random_spinor(grid, rep_amb.rank, band=4, seed=seed + 40)
        dphi = cf.dirac_flat(rep_amb, phi)
        closed_num = -(dphi.values @ rep_amb.cl_nu.T)
        for lam in (0.1, 0.25, 2.0):
            p1 = cf.formal_p1(rep_amb, lam, phi)
            closed = closed_num / (2 * lam - 1)
            worst = max(worst,
                        cf.SpinorField(grid, p1.values - closed).norm() / phi.norm())
        pole = False
        try:
            cf.formal_p1(rep_amb, 0.5, phi)
        except cf.IndicialPoleError:
            pole = True
        return CaseRow("", {"lams": [0.1, 0.25, 2.0], "pole-detected": pole},
                       worst, 0.0, worst if pole else math.inf, tol_indicial,
                       "indicial inversion vs closed form")

    def resolution_case():
        # spectral decay of the covariance residual under grid doubling
        om = cf.ConformalFactor.random(n, min(band, 2), amplitude / 2, seed=seed + 50)
        residuals = {}
        for m in (grid_m // 2, grid_m):
            g = cf.TorusGrid(n, m)
            phi = cf.random_spinor(g, rep.rank, band=2, seed=seed + 51)
            residuals[m] = cf.covariance_residual(rep, om, g, phi, alias_tol=1e-2)
        coarse, fine = residuals[grid_m // 2], residuals[grid_m]
        ok = fine <= coarse / 10 or fine <= 1e-10
        return CaseRow("", {"residuals": {str(k): v for k, v in residuals.items()}},
                       fine, f"<= {coarse}/10 or floor", 0.0 if ok else 1.0, 0.0,
                       "spectral decay under doubling")

    cases = [
        ("conformal.covariance", covariance_case),
        ("conformal.selfadjoint", selfadj_case),
        ("conformal.routes", routes_case),
        ("conformal.curvature", curvature_case),
        ("conformal.indicial", indicial_case),
        ("conformal.resolution-sweep", resolution_case),
    ]
    report = _run_cases("conformal", cases, suite_filter)
    if csv_dir:
        from .reporting import write_field_csv
        curv = cf.curvature_conformally_flat(omega, grid)
        pts = np.stack([p.reshape(-1) for p in grid.points()], axis=1)
        cols = {"scal": curv.scal.reshape(-1)}
        for i in range(n):
            for j in range(i, n):
                cols[f"ric_{i + 1}{j + 1}"] = curv.ric[..., i, j].reshape(-1)
        write_field_csv(pts, cols, f"{csv_dir}/conformal_curvature.csv")
    return report


SUITES = {
    "disc": run_disc,
    "symbols": run_symbols,
    "indexsets": run_indexsets,
    "conformal": run_conformal,
}


def run_suite(name, **kwargs):
    return SUITES[name](**kwargs)
