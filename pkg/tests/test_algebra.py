import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckgeo.algebra import (
    CKSignature,
    GeneratorIndex,
    build_structure_constants,
    cartan_decompose,
    classify_algebra,
    contract_gamma,
    generators,
    involution_theta,
    jacobi_residual,
    representation_defect,
    space_report,
    structure_constants_json,
    two_index_kappa,
    vector_representation,
)
from ckgeo.errors import IndexRangeError

J = GeneratorIndex


def all_sign_signatures(n):
    return [CKSignature(list(s)) for s in itertools.product((1, 0, -1), repeat=n)]


class TestTwoIndexKappa:
    def test_product_of_basic_coefficients(self):
        sig = CKSignature([2, 3, 1])
        assert two_index_kappa(sig, 0, 2) == 6       # kappa1*kappa2
        assert two_index_kappa(sig, 1, 3) == 3       # kappa2*kappa3
        assert two_index_kappa(sig, 0, 3) == 6

    def test_all_ones(self):
        sig = CKSignature([1, 1, 1, 1])
        for a in range(4):
            for b in range(a + 1, 5):
                assert two_index_kappa(sig, a, b) == 1

    def test_zero_annihilates(self):
        sig = CKSignature([0, -1, 1])
        assert two_index_kappa(sig, 0, 3) == 0

    def test_bounds(self):
        sig = CKSignature([1, 1])
        with pytest.raises(IndexRangeError):
            two_index_kappa(sig, 1, 1)
        with pytest.raises(IndexRangeError):
            two_index_kappa(sig, 0, 3)


class TestStructureConstants:
    def test_first_bracket_so4(self):
        sc = build_structure_constants(CKSignature([1, 1]))
        assert sc.bracket(J(0, 1), J(0, 2)) == {J(1, 2): Fraction(1)}

    def test_antisymmetry_on_lookup(self):
        sc = build_structure_constants(CKSignature([1, 1]))
        assert sc.bracket(J(0, 2), J(0, 1)) == {J(1, 2): Fraction(-1)}

    def test_flag_algebra_only_middle_bracket(self):
        sig = CKSignature([0, 0, 0])
        sc = build_structure_constants(sig)
        for a, b, c in itertools.combinations(range(4), 3):
            assert sc.bracket(J(a, b), J(a, c)) == {}
            assert sc.bracket(J(a, c), J(b, c)) == {}
            assert sc.bracket(J(a, b), J(b, c)) == {J(a, c): Fraction(-1)}

    def test_disjoint_indices_commute(self):
        sc = build_structure_constants(CKSignature([1, -1, 1]))
        assert sc.bracket(J(0, 1), J(2, 3)) == {}

    def test_so4_twelve_unit_brackets_via_matrix_oracle(self):
        # brute-force commutators of the float matrix representation and read
        # off the coefficients: so(4) has 12 nonzero brackets, all +-1
        sig = CKSignature([1, 1, 1])
        rep = vector_representation(sig)
        gens = generators(3)
        mats = {g: rep.matrices[g].astype(float) for g in gens}
        basis = np.stack([mats[g].ravel() for g in gens], axis=1)
        sc = build_structure_constants(sig)
        nonzero = 0
        for gx, gy in itertools.combinations(gens, 2):
            comm = (mats[gx] @ mats[gy] - mats[gy] @ mats[gx]).ravel()
            coef, res, *_ = np.linalg.lstsq(basis, comm, rcond=None)
            assert np.allclose(basis @ coef, comm, atol=1e-12)
            live = {gens[i]: coef[i] for i in np.flatnonzero(np.abs(coef) > 1e-12)}
            table = {t: float(c) for t, c in sc.bracket(gx, gy).items()}
            assert live.keys() == table.keys()
            for t in live:
                assert live[t] == pytest.approx(table[t], abs=1e-12)
                assert abs(live[t]) == pytest.approx(1.0, abs=1e-12)
            nonzero += len(live)
        assert nonzero == 12

    def test_json_wire_format(self):
        sig = CKSignature([0, -1, 1])
        doc = structure_constants_json(sig)
        assert doc["n"] == 3
        assert doc["kappa"] == [0.0, -1.0, 1.0]
        entry = doc["brackets"][0]
        assert set(entry) == {"x", "y", "terms"}
        assert set(entry["terms"][0]) == {"coef", "target"}


class TestJacobi:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exactly_zero_for_all_sign_vectors(self, n):
        for sig in all_sign_signatures(n):
            assert jacobi_residual(build_structure_constants(sig)) == 0.0

    def test_exactly_zero_for_random_real_kappa(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 5))
            sig = CKSignature(rng.uniform(-2, 2, n))
            assert jacobi_residual(build_structure_constants(sig)) == 0.0

    @given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=16),
                    min_size=1, max_size=4))
    @settings(max_examples=60, deadline=None)
    def test_exactly_zero_property(self, kappa):
        assert jacobi_residual(build_structure_constants(CKSignature(kappa))) == 0.0

    def test_specific_rational_signature(self):
        sig = CKSignature([2, -3, 0.5])
        assert jacobi_residual(build_structure_constants(sig)) == 0.0

    def test_corrupted_table_detected(self):
        sc = build_structure_constants(CKSignature([1, 1, 1]))
        key = (J(0, 1), J(0, 2))
        sc.table[key] = {t: -c for t, c in sc.table[key].items()}
        assert jacobi_residual(sc) > 0.0


class TestInvolution:
    def test_anti_invariant_block(self):
        sig = CKSignature([1, 1, 1])
        assert involution_theta(sig, 1, J(0, 1)) == -1

    def test_invariant_block(self):
        sig = CKSignature([1, 1, 1])
        assert involution_theta(sig, 1, J(1, 2)) == 1

    def test_is_involution(self):
        sig = CKSignature([1, -1, 0, 1])
        for m in range(1, 5):
            for g in generators(4):
                s = involution_theta(sig, m, g)
                assert s * s == 1

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_bracket_automorphism(self, n, rng):
        # sign(x) sign(y) = sign(target) on every nonzero bracket entry
        for _ in range(10):
            sig = CKSignature(rng.choice([-1, 0, 1], n))
            sc = build_structure_constants(sig)
            for m in range(1, n + 1):
                for (x, y), term in sc.nonzero_entries():
                    sx, sy = involution_theta(sig, m, x), involution_theta(sig, m, y)
                    for t in term:
                        assert sx * sy == involution_theta(sig, m, t)

    def test_bounds(self):
        with pytest.raises(IndexRangeError):
            involution_theta(CKSignature([1, 1]), 3, J(0, 1))


class TestContraction:
    def test_identity_rescaling(self):
        sc = build_structure_constants(CKSignature([1, -1, 1]))
        assert contract_gamma(sc, 2, 1).equals(sc)

    def test_flat_contraction_so4_to_iso3(self):
        sig = CKSignature([1, 1, 1])
        sc = build_structure_constants(sig)
        target = build_structure_constants(CKSignature([0, 1, 1]))
        assert contract_gamma(sc, 1, 0).equals(target)

    def test_second_slot_contraction(self):
        sc = build_structure_constants(CKSignature([1, -1]))
        target = build_structure_constants(CKSignature([1, 0]))
        assert contract_gamma(sc, 2, 0).equals(target)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_limit_equals_kappa_zero_everywhere(self, n):
        for sig in all_sign_signatures(n):
            sc = build_structure_constants(sig)
            for m in range(1, n + 1):
                target = build_structure_constants(sig.with_kappa_zero(m))
                assert contract_gamma(sc, m, 0).equals(target)

    def test_distance_scales_as_eps_squared(self):
        sig = CKSignature([1, 1, 1])
        sc = build_structure_constants(sig)
        target = build_structure_constants(sig.with_kappa_zero(1))
        d = [contract_gamma(sc, 1, eps).distance(target) for eps in (1.0, 0.1, 0.01)]
        assert d[1] == pytest.approx(d[0] * 1e-2, rel=1e-12)
        assert d[2] == pytest.approx(d[0] * 1e-4, rel=1e-12)

    def test_sequential_contractions_reach_flag(self):
        sc = build_structure_constants(CKSignature([1, -1, 1]))
        for m in (1, 2, 3):
            sc = contract_gamma(sc, m, 0)
        flag = build_structure_constants(CKSignature([0, 0, 0]))
        assert sc.equals(flag)
        # the flag algebra is not abelian: middle brackets survive everywhere
        assert sc.bracket(J(0, 1), J(1, 2)) == {J(0, 2): Fraction(-1)}


class TestCartan:
    def test_point_space_n3(self):
        sig = CKSignature([1, -1, 1])
        dec = cartan_decompose(sig, 1)
        assert len(dec.p_generators) == 3
        assert dec.left_factor_kappa == ()
        assert dec.right_factor_kappa == (Fraction(-1), Fraction(1))

    def test_line_space_n3(self):
        dec = cartan_decompose(CKSignature([1, 1, 1]), 2)
        assert len(dec.p_generators) == 4   # 2 (N - 1)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_bracket_closure_of_the_split(self, n):
        # [h,h] in h, [h,p] in p, [p,p] in h for every sign vector and slot
        for sig in all_sign_signatures(n):
            sc = build_structure_constants(sig)
            for m in range(1, n + 1):
                dec = cartan_decompose(sig, m)
                h, p = dec.h_generators, dec.p_generators
                for (x, y), term in sc.nonzero_entries():
                    targets = set(term)
                    if x in h and y in h:
                        assert targets <= h
                    elif x in p and y in p:
                        assert targets <= h
                    else:
                        assert targets <= p

    def test_p_size_formula(self):
        for n in range(1, 7):
            sig = CKSignature([1] * n)
            for m in range(1, n + 1):
                dec = cartan_decompose(sig, m)
                assert len(dec.p_generators) == m * (n + 1 - m)


class TestSpaceReport:
    def test_point_space(self):
        rep = space_report(CKSignature([1, 1, 1]), 1)
        assert (rep.dimension, rep.rank) == (3, 1)
        assert rep.curvature_coefficient == 1

    def test_middle_slot_n5(self):
        rep = space_report(CKSignature([1, 1, -1, 1, 1]), 3)
        assert (rep.dimension, rep.rank) == (9, 3)
        assert rep.curvature_coefficient == -1

    def test_slot_reflection_symmetry(self):
        for n in range(1, 7):
            sig = CKSignature([1] * n)
            for m in range(1, n + 1):
                a, b = space_report(sig, m), space_report(sig, n + 1 - m)
                assert (a.dimension, a.rank) == (b.dimension, b.rank)
                assert a.rank == min(m, n + 1 - m)


class TestVectorRepresentation:
    def test_rotation_generator(self):
        rep = vector_representation(CKSignature([1, 1, 1]))
        m = rep.matrices[J(0, 1)].astype(float)
        expected = np.zeros((4, 4))
        expected[0, 1] = -1.0
        expected[1, 0] = 1.0
        assert np.array_equal(m, expected)

    def test_invariant_form(self):
        rep = vector_representation(CKSignature([1, -1, 1]))
        ik = rep.ik_matrix.astype(float)
        assert np.array_equal(np.diag(ik), [1.0, 1.0, -1.0, -1.0])

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_antisymmetry_wrt_invariant_form(self, n):
        # X^T Ik + Ik X = 0 exactly, for every sign vector
        for sig in all_sign_signatures(n):
            rep = vector_representation(sig)
            for mat in rep.matrices.values():
                resid = mat.T.dot(rep.ik_matrix) + rep.ik_matrix.dot(mat)
                assert all(v == 0 for v in resid.flat)

    def test_commutator_reproduces_bracket(self):
        rep = vector_representation(CKSignature([1, 1]))
        m01, m02, m12 = (rep.matrices[g].astype(float)
                         for g in (J(0, 1), J(0, 2), J(1, 2)))
        assert np.array_equal(m01 @ m02 - m02 @ m01, m12)

    def test_defect_zero_for_random_rational(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 4))
            sig = CKSignature(rng.uniform(-2, 2, n))
            assert representation_defect(sig) == 0


class TestClassification:
    @pytest.mark.parametrize("kappa,name", [
        ([1, 1, 1], "so(4)"),
        ([-1, 1, 1], "so(3,1)"),
        ([1, -1, 1], "so(2,2)"),
        ([-1, -1, 1], "so(3,1)"),
        ([0, 1, 1], "iso(3)"),
        ([0, -1, 1], "iso(2,1)"),
        ([0, 0, 1], "iiso(2)"),
        ([0, 0, -1], "iiso(1,1)"),
        ([0, 0, 0], "flag"),
        ([1, 0, 1], "t4(so(2)+so(2))"),
        ([-1, 0, 1], "t4(so(1,1)+so(2))"),
    ])
    def test_names(self, kappa, name):
        assert classify_algebra(CKSignature(kappa)) == name

    def test_larger_count_first(self):
        # so(1,3) is reported as so(3,1), matching the usual naming
        assert classify_algebra(CKSignature([-1, 1])) == "so(2,1)"

    def test_scaling_does_not_change_class(self):
        assert classify_algebra(CKSignature([0.25, 4.0, 1.0])) == "so(4)"
