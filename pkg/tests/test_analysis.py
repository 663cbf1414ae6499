from fractions import Fraction

import pytest

from analysis import (
    FINGERPRINT_FIELDS,
    ProductKind,
    action_is_nilpotent,
    center_adjoint_deformed,
    center_deformed_formula,
    certify_nonisomorphic,
    criterion_center_direct,
    derivation_block_report,
    derivation_dim_formula,
    derived_deformed_formula,
    fingerprint,
    is_two_step_nilpotent,
    kernel_intersection_report,
    nilpotency_necessity_check,
    second_derived_dims,
    solvability_transfer_check,
    two_step_D0,
    two_step_D0_check,
    two_step_noniso_theorem_check,
)
from errors import ApplicabilityError
from lie_core import center, change_basis, derivations, derived_series, derived_subalgebra, direct_sum
from products import Action, adjoint_crmod, deformed, direct_product, identity_crmod, semidirect


class TestFingerprint:
    def test_all_fields(self, catalog):
        fp = fingerprint(catalog.get("heisenberg_3"))
        data = fp.to_dict()
        assert list(data) == list(FINGERPRINT_FIELDS)
        assert data["dim_center"] == 1
        assert data["lcs_dims"] == [3, 1, 0]
        assert data["dim_Der"] == 6
        assert data["dim_H1_adjoint"] == 4
        assert data["is_nilpotent"] is True

    def test_selected_fields(self, catalog):
        fp = fingerprint(catalog.get("sl2"), ["dim", "killing_rank"])
        assert fp.dim == 3
        assert fp.killing_rank == 3
        assert fp.dim_Der is None

    @pytest.mark.parametrize("key", ["r31", "heisenberg_3_plus_line", "ex4dim", "sl2"])
    def test_invariant_under_basis_change(self, catalog, basis_change, key):
        L = catalog.get(key)
        assert fingerprint(change_basis(L, basis_change(L.dim))) == fingerprint(L)


class TestCertificates:
    def test_direct_vs_semidirect_square(self, catalog):
        cert = certify_nonisomorphic(catalog.get("r2_direct_square"), catalog.get("r2_semidirect_square"))
        assert cert.conclusive
        assert ("dim_Der", 4, 5) in cert.differing_invariants
        data = cert.to_dict()
        assert {"invariant": "dim_Der", "a": 4, "b": 5} in data["diffs"]

    def test_sl2_squares(self, catalog):
        cert = certify_nonisomorphic(catalog.get("sl2_direct_square"), catalog.get("sl2_semidirect_square"),
                                     ["dim", "dim_Der", "is_solvable"])
        assert cert.differing_invariants == [("dim_Der", 6, 7)]

    def test_same_algebra_inconclusive(self, catalog):
        L = catalog.get("r31")
        cert = certify_nonisomorphic(L, L)
        assert not cert.conclusive
        assert cert.to_dict()["diffs"] == []

    def test_heisenberg_direct_vs_semidirect(self, catalog):
        cm = catalog.get("adjoint_heisenberg_3")
        cert = certify_nonisomorphic(direct_product(cm), semidirect(cm), ["dim_center"])
        assert cert.differing_invariants == [("dim_center", 1, 0)]


class TestCenter:
    @pytest.mark.parametrize("key", ["identity_r2", "adjoint_heisenberg_3", "inclusion_ex4dim", "inclusion_exndim5",
                                     "quotient_free2step3", "zero_r2_trivial", "adjoint_abelian_1"])
    @pytest.mark.parametrize("t", [1, -1, 2, -2, Fraction(1, 3)])
    def test_formula_matches_generic_center(self, catalog, key, t):
        cm = catalog.get(key)
        assert center_deformed_formula(cm, t) == center(deformed(cm, t))

    def test_formula_needs_nonzero_t(self, catalog):
        with pytest.raises(ApplicabilityError):
            center_deformed_formula(catalog.get("identity_r2"), 0)
        with pytest.raises(ApplicabilityError):
            center_adjoint_deformed(catalog.get("r2"), "0")

    @pytest.mark.parametrize("key", ["heisenberg_3", "r31", "sl2", "free2step3", "abelian(2)"])
    def test_adjoint_formula(self, catalog, key):
        g = catalog.get(key)
        assert center_adjoint_deformed(g, 1) == center(deformed(adjoint_crmod(g), 1))

    def test_heisenberg_adjoint_centerless(self, catalog):
        assert center_adjoint_deformed(catalog.get("heisenberg_3"), 1).dim == 0

    @pytest.mark.parametrize("key,direct,deformed_dim", [
        ("quotient_free2step3", 5, 4),
        ("inclusion_exndim5", 1, 0),
    ])
    def test_centers_distinguish(self, catalog, key, direct, deformed_dim):
        cm = catalog.get(key)
        assert center(direct_product(cm)).dim == direct
        assert center(deformed(cm, 1)).dim == deformed_dim

    def test_criterion_absent(self, catalog):
        assert criterion_center_direct(catalog.get("sl2")) is None
        assert criterion_center_direct(catalog.get("heisenberg_3")) is None

    def test_criterion_abelian_line(self, catalog):
        cert = criterion_center_direct(catalog.get("abelian(1)"))
        assert cert.conclusive
        assert cert.differing_invariants == [("dim_center", 2, 0)]


class TestTwoStep:
    @pytest.mark.parametrize("key", ["heisenberg_3", "heisenberg_5", "free2step3"])
    def test_d0_is_derivation(self, catalog, key):
        g = catalog.get(key)
        assert is_two_step_nilpotent(g)
        assert two_step_D0_check(g)

    def test_d0_weights(self, catalog):
        D = two_step_D0(catalog.get("heisenberg_3"))
        assert [D.entry(i, i) for i in range(3)] == [1, 1, 2]

    @pytest.mark.parametrize("key", ["heisenberg_3", "heisenberg_5", "free2step3"])
    def test_noniso(self, catalog, key):
        cert = two_step_noniso_theorem_check(catalog.get(key))
        assert cert.conclusive
        assert cert.differing_invariants[0][2] == 0

    def test_needs_two_step(self, catalog):
        with pytest.raises(ApplicabilityError):
            two_step_D0(catalog.get("r2"))
        assert not is_two_step_nilpotent(catalog.get("abelian(3)"))


class TestDerivedAndNilpotency:
    @pytest.mark.parametrize("key", ["identity_r2", "adjoint_r31", "inclusion_ex4dim", "zero_sl2_standard",
                                     "quotient_free2step3"])
    def test_derived_formula(self, catalog, key):
        cm = catalog.get(key)
        assert derived_deformed_formula(cm, 1) == derived_subalgebra(deformed(cm, 1))

    def test_r31_adjoint_derived_series(self, catalog):
        cm = catalog.get("adjoint_r31")
        assert [S.dim for S in derived_series(deformed(cm, 1))] == [9, 7]
        assert [S.dim for S in derived_series(direct_product(cm))] == [9, 7, 5]
        assert second_derived_dims(deformed(cm, 1)) == (7, 7)
        assert second_derived_dims(direct_product(cm)) == (7, 5)

    def test_solvability_transfer(self, catalog):
        assert solvability_transfer_check(catalog.get("identity_r31"), 1)
        assert not solvability_transfer_check(catalog.get("adjoint_r31"), 1)
        assert solvability_transfer_check(identity_crmod(catalog.get("abelian(3)")), 2)

    def test_action_nilpotency(self, catalog):
        assert action_is_nilpotent(Action.adjoint(catalog.get("heisenberg_3")))
        assert not action_is_nilpotent(Action.adjoint(catalog.get("r2")))

    def test_nilpotency_necessity(self, catalog):
        assert nilpotency_necessity_check(catalog.get("identity_heisenberg_3"), 1)
        assert not nilpotency_necessity_check(catalog.get("adjoint_heisenberg_3"), 1)
        assert not nilpotency_necessity_check(catalog.get("identity_r2"), 1)

    def test_kernel_intersection(self, catalog):
        report = kernel_intersection_report(catalog.get("heisenberg_3_plus_line"))
        assert report == {
            "algebra": "heisenberg_3_plus_line",
            "dim_center": 2,
            "dim_kernel_intersection": 0,
            "strict": True,
        }


class TestDerivationBlocks:
    @pytest.mark.parametrize("key", ["identity_r2", "identity_sl2", "identity_heisenberg_3"])
    @pytest.mark.parametrize("kind", list(ProductKind))
    def test_blocks_and_formula(self, catalog, key, kind):
        report = derivation_block_report(kind, catalog.get(key), 1)
        assert report.ok, report.violations.summary()
        assert report.formula_dim == report.dim_der

    @pytest.mark.parametrize("key", ["adjoint_heisenberg_3", "inclusion_ex4dim", "zero_r2_trivial"])
    def test_blocks_general(self, catalog, key):
        for kind in ProductKind:
            assert derivation_block_report(kind, catalog.get(key), 1).ok

    def test_formula_values(self, catalog):
        assert derivation_dim_formula(ProductKind.SEMIDIRECT, catalog.get("identity_heisenberg_3")) == 17
        assert derivation_dim_formula(ProductKind.SEMIDIRECT, catalog.get("identity_r2")) == 5
        assert derivation_dim_formula(ProductKind.DIRECT, catalog.get("identity_r2")) == 4
        assert derivation_dim_formula(ProductKind.SEMIDIRECT, catalog.get("adjoint_heisenberg_3")) is None

    @pytest.mark.parametrize("key,expected", [
        ("inclusion_ex4dim", {"direct": 10, "semidirect": 11, "deformed": 10}),
        ("inclusion_r2_line", {"direct": 4, "semidirect": 6, "deformed": 6}),
    ])
    def test_inclusion_der_dims(self, catalog, key, expected):
        cm = catalog.get(key)
        dims = {kind.value: derivation_block_report(kind, cm).dim_der for kind in ProductKind}
        assert dims == expected

    def test_ex4dim_deformation_loses_a_derivation(self, catalog):
        cm = catalog.get("inclusion_ex4dim")
        deformed_dim = derivation_block_report(ProductKind.DEFORMED, cm).dim_der
        semidirect_dim = derivation_block_report(ProductKind.SEMIDIRECT, cm).dim_der
        assert (deformed_dim, semidirect_dim) == (10, 11)

    @pytest.mark.parametrize("key", ["zero_r2_adjoint", "zero_r2_trivial", "zero_sl2_standard"])
    @pytest.mark.parametrize("t", [1, -2])
    def test_zero_crossed_module_derivations_coincide(self, catalog, key, t):
        cm = catalog.get(key)
        assert derivations(deformed(cm, t)).subspace == derivations(semidirect(cm)).subspace

    def test_report_dict(self, catalog):
        data = derivation_block_report(ProductKind.SEMIDIRECT, catalog.get("identity_r2")).to_dict()
        assert data["kind"] == "semidirect"
        assert data["dim_Der"] == 5
        assert set(data["block_ranks"]) == {"D1", "D2", "D3", "D4"}
        assert data["violations"] == []

    def test_direct_sum_matches_direct_product(self, catalog):
        cm = catalog.get("identity_r2")
        assert direct_product(cm).same_brackets(direct_sum(cm.h, cm.g))
