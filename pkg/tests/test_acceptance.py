"""End-to-end verification suite.

Each test is one release criterion, run at its stated tolerance; the
conftest hook prints a PASS/FAIL line per criterion after the session.
Criterion 6 carries one strict expected-failure case: a real Jacobian
cannot change metric signature, so the Lorentzian-angle coordinate change
has no real chart (see the notes in ckgeo.deform).
"""

import itertools
import time

import numpy as np
import pytest

from ckgeo import algebra as alg
from ckgeo import deform, riemann, spaces
from ckgeo.deform import DeformationParams, PhasePoint
from ckgeo.errors import ChartDomainError
from ckgeo.trig import ck_cos, ck_sin

RNG_SEED = 773_003


# ---------------------------------------------------------------------------
# criterion 1: nine constant-curvature spaces, symbolic metrics + curvatures
# ---------------------------------------------------------------------------

REFERENCE_TABLE2 = {
    "spherical": ["1", "sin(r)^2", "sin(r)^2*sin(theta)^2"],
    "euclidean": ["1", "r^2", "r^2*sin(theta)^2"],
    "hyperbolic": ["1", "sinh(r)^2", "sinh(r)^2*sin(theta)^2"],
    "oscillating-NH": ["1", "0", "0"],
    "galilean": ["1", "0", "0"],
    "expanding-NH": ["1", "0", "0"],
    "anti-de-sitter": ["1", "-sin(r)^2", "-sin(r)^2*sinh(theta)^2"],
    "minkowskian": ["1", "-r^2", "-r^2*sinh(theta)^2"],
    "de-sitter": ["1", "-sinh(r)^2", "-sinh(r)^2*sinh(theta)^2"],
}


def _normalize(sym):
    return [s.replace(" ", "").lower() for s in sym]


def test_criterion_1_table2_reproduction():
    start = time.perf_counter()
    rng = np.random.default_rng(RNG_SEED)
    rows = spaces.space_catalog(3)
    assert len(rows) == 9
    for row in rows:
        assert _normalize(row.metric_diagonal_symbolic) == _normalize(REFERENCE_TABLE2[row.name])
        assert row.K_sectional == row.kappa1
        assert row.K_scalar == 6 * row.kappa1
        if row.degenerate:
            continue
        kp = spaces.KappaPair(row.kappa1, row.kappa2)
        metric = spaces.metric_polar(kp, 3)
        for _ in range(20):
            pt = spaces.random_chart_point(kp, rng).as_array()
            rep = riemann.curvature(metric, pt)
            for val in rep.sectional.values():
                assert abs(val - row.kappa1) < 1e-6
            assert abs(rep.scalar - 6 * row.kappa1) < 1e-6
    assert time.perf_counter() - start < 10.0


# ---------------------------------------------------------------------------
# criterion 2: deformed-space table, closed forms vs finite differences
# ---------------------------------------------------------------------------

def test_criterion_2_table3_reproduction():
    start = time.perf_counter()
    radii = (0.3, 0.7, 1.1)
    for z in (1.0, -1.0):
        for l2 in (1.0, 0.0, -1.0):
            params = DeformationParams(z=z, lambda2_sq=l2, profile="one")
            for r in radii:
                # kappa-trig closed forms: K1j = -z^2 Sk^2/(2 Ck), K23 = K1j/2
                sk = float(ck_sin(z, r))
                ck = float(ck_cos(z, r))
                k1j_expected = -0.5 * z**2 * sk * sk / ck
                closed = deform.polar_sectional_closed(params, r)
                assert closed["K1j"] == pytest.approx(k1j_expected, rel=1e-13)
                assert closed["K23"] == pytest.approx(k1j_expected / 2, rel=1e-13)
                assert closed["K"] == pytest.approx(-2.5 * z**2 * sk * sk / ck, rel=1e-13)
                if l2 == 0.0:
                    continue   # degenerate rows: closed forms only
                metric = deform.deformed_metric_polar(params)
                rep = riemann.curvature(metric, [r, 0.8, 0.6])
                assert abs(rep.sectional[(0, 1)] - closed["K1j"]) < 1e-5
                assert abs(rep.sectional[(0, 2)] - closed["K1j"]) < 1e-5
                assert abs(rep.sectional[(1, 2)] - closed["K23"]) < 1e-5
                assert abs(rep.scalar - closed["K"]) < 1e-5
    assert time.perf_counter() - start < 30.0


# ---------------------------------------------------------------------------
# criterion 3: deformed brackets and Casimir centrality, n <= 5 sites
# ---------------------------------------------------------------------------

def test_criterion_3_bracket_casimir_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(RNG_SEED + 1)
    checks = 0
    for n in (1, 2, 3, 4, 5):
        for z in (0.05, -0.05, 0.5, -0.5):
            params = DeformationParams(z=z)
            gens = deform.generator_functions(params, n)
            pts = PhasePoint(rng.uniform(-1.0, 1.0, (50, n)),
                             rng.uniform(-1.0, 1.0, (50, n)))
            gen = deform.realization(params, n, pts)
            zjm = z * gen.j_minus
            res1 = deform.canonical_poisson(gens["-"], gens["+"], pts) - 4.0 * gen.j_three
            res2 = deform.canonical_poisson(gens["3"], gens["-"], pts) + 2.0 * np.sinh(zjm) / z
            res3 = (deform.canonical_poisson(gens["3"], gens["+"], pts)
                    - 2.0 * gen.j_plus * np.cosh(zjm))
            for res in (res1, res2, res3):
                assert np.max(np.abs(res)) < 1e-8
                checks += res.size
            cas = lambda q, p: deform.casimir(params, n, PhasePoint(q, p))
            for g in gens.values():
                res = deform.canonical_poisson(cas, g, pts)
                assert np.max(np.abs(res)) < 1e-8
                checks += np.size(res)
    assert checks >= 3000
    assert time.perf_counter() - start < 60.0


# ---------------------------------------------------------------------------
# criterion 4: closed-form scalar curvature vs finite differences
# ---------------------------------------------------------------------------

def test_criterion_4_scalar_curvature_formula_agreement():
    rng = np.random.default_rng(RNG_SEED + 2)
    for profile in ("one", "exp", "poly2"):
        for z in (0.1, -0.1):
            params = DeformationParams(z=z, profile=profile)
            metric = deform.deformed_metric_cartesian(params)
            for _ in range(20):
                q = rng.uniform(0.15, 0.8, 3)
                expected = deform.scalar_curvature_formula(params, z * float(np.sum(q * q)))
                rep = riemann.curvature(metric, q)
                assert abs(rep.scalar - expected) < 1e-5


# ---------------------------------------------------------------------------
# criterion 5: the profile g = 1/Ck_z restores constant curvature
# ---------------------------------------------------------------------------

def test_criterion_5_constant_curvature_profile():
    pts = ([0.6, 0.9, 0.5], [1.0, 1.8, 2.5])
    for z in (1.0, -1.0):
        params = DeformationParams(z=z, lambda2_sq=1.0, profile="ck")
        metric = deform.deformed_metric_polar(params)
        for pt in pts:
            rep = riemann.curvature(metric, pt)
            for val in rep.sectional.values():
                assert abs(val - z) < 1e-6
            assert abs(rep.scalar - 6 * z) < 1e-6
    # contraction side of the threefold role: at z = 1e-6 the space is flat
    # to the stated scale (|K - 6z| < 1e-8, with 6z itself -> 0 linearly)
    tiny = DeformationParams(z=1e-6, lambda2_sq=1.0, profile="ck")
    rep = riemann.curvature(deform.deformed_metric_polar(tiny), [0.7, 0.9, 0.5])
    assert abs(rep.scalar - 6e-6) < 1e-8
    assert abs(rep.scalar) < 1e-5


# ---------------------------------------------------------------------------
# criterion 6: coordinate-change consistency (Jacobian metric transport)
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("z,l2", [
    (0.2, 1.0),
    (-0.2, 1.0),
    pytest.param(0.2, -1.0, marks=pytest.mark.xfail(
        strict=True, raises=(ChartDomainError,),
        reason="real Jacobian transport cannot change metric signature; the "
               "Lorentzian-angle chart is complex-valued (see decisions ledger)")),
])
def test_criterion_6_coordinate_change_consistency(z, l2):
    rng = np.random.default_rng(RNG_SEED + 3)
    params = DeformationParams(z=z, lambda2_sq=l2)
    polar_metric = deform.deformed_metric_polar(params)
    for _ in range(50):
        q = rng.uniform(0.1, 0.8, 3)
        x, g_x = deform.transport_metric_to_polar(params, q)
        assert np.max(np.abs(g_x - polar_metric(x))) < 1e-8


# ---------------------------------------------------------------------------
# criterion 7: superintegrability along integrated geodesics
# ---------------------------------------------------------------------------

def _flow_initial_conditions(rng, l2, n=10):
    r = rng.uniform(0.4, 0.65, n)
    phi = rng.uniform(0.5, 5.5, n)
    if l2 > 0:
        theta = rng.uniform(0.9, 2.1, n)
        pr = rng.uniform(-0.08, 0.08, n)
        pth = rng.uniform(-0.1, 0.1, n)
        pph = rng.uniform(0.05, 0.12, n) * rng.choice([-1.0, 1.0], n)
    else:
        # indefinite signature: angular-dominated momenta give bounded
        # (negative-energy) orbits; outward radial start delays the refocus
        # through the r = 0 coordinate axis
        r = rng.uniform(0.55, 0.8, n)
        theta = rng.uniform(0.8, 1.4, n)
        pr = rng.uniform(0.01, 0.05, n)
        pth = rng.uniform(0.1, 0.2, n) * rng.choice([-1.0, 1.0], n)
        pph = rng.uniform(0.1, 0.2, n) * rng.choice([-1.0, 1.0], n)
    return (np.stack([r, theta, phi], -1), np.stack([pr, pth, pph], -1))


@pytest.mark.parametrize("z,l2", [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)])
def test_criterion_7_conservation_along_flows(z, l2):
    rng = np.random.default_rng(RNG_SEED + 4)
    params = DeformationParams(z=z, lambda2_sq=l2, profile="one")
    ham = deform.geodesic_hamiltonian(params)
    invariants = deform.flow_invariants(params)
    q0, p0 = _flow_initial_conditions(rng, l2)
    dt = 2e-4 if l2 > 0 else 5e-5
    states = riemann.geodesic_flow(ham, riemann.FlowState(q0, p0, 0.0, 0.0),
                                   dt=dt, steps=10_000, grad=ham.grad, record_every=1)
    assert len(states) == 10_001
    for name, fn in invariants.items():
        vals = np.array([np.asarray(fn(s.coords, s.momenta)) for s in states])
        assert np.all(np.isfinite(vals))
        ref = np.abs(vals[0])
        scale = np.where(ref > 1e-12, ref, 1.0)
        drift = np.max(np.abs(vals - vals[0]) / scale)
        assert drift < 1e-7, f"{name} drift {drift:.3e} for z={z}, lambda2_sq={l2}"


@pytest.mark.parametrize("z", [1.0, -1.0])
def test_criterion_7_functional_independence(z):
    # four invariants of the kinetic flow in the Cartesian chart: H, the
    # leading and trailing two-site Casimirs, and the full Casimir
    rng = np.random.default_rng(RNG_SEED + 5)
    params = DeformationParams(z=z)

    def invariants(qp):
        pt = PhasePoint(qp[:3], qp[3:])
        gen = deform.realization(params, 3, pt)
        return np.array([
            0.5 * gen.j_plus,
            deform.subchain_casimir(params, pt, 2, side="leading"),
            deform.subchain_casimir(params, pt, 2, side="trailing"),
            deform.casimir(params, 3, pt),
        ])

    for _ in range(8):
        qp = rng.uniform(0.2, 0.9, 6)
        h = 1e-5
        jac = np.empty((4, 6))
        for i in range(6):
            e = np.zeros(6)
            e[i] = h
            jac[:, i] = (-invariants(qp + 2 * e) + 8 * invariants(qp + e)
                         - 8 * invariants(qp - e) + invariants(qp - 2 * e)) / (12 * h)
        s = np.linalg.svd(jac, compute_uv=False)
        assert np.sum(s > 1e-6 * s[0]) == 4


# ---------------------------------------------------------------------------
# criterion 8: exact algebra suite over all sign vectors, N <= 4
# ---------------------------------------------------------------------------

def test_criterion_8_algebra_suite():
    start = time.perf_counter()
    for n in (1, 2, 3, 4):
        for signs in itertools.product((1, 0, -1), repeat=n):
            sig = alg.CKSignature(list(signs))
            sc = alg.build_structure_constants(sig)
            assert alg.jacobi_residual(sc) == 0.0
            assert alg.representation_defect(sig, sc) == 0
            for m in range(1, n + 1):
                target = alg.build_structure_constants(sig.with_kappa_zero(m))
                assert alg.contract_gamma(sc, m, 0).equals(target)
    assert time.perf_counter() - start < 30.0
