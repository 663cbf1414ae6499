from fractions import Fraction

import pytest

from catalog import Catalog, EntryKind
from cohomology import (
    Block,
    Cochain,
    adjoint_module,
    algebra_projection_cochain,
    bracket_cochain,
    canonical_cocycle,
    canonical_cocycle_g_valued,
    cochain_dim,
    cohomology_dim,
    cohomology_report,
    differential,
    differential_matrix,
    is_coboundary,
    linear_deformation,
    module_projection_cochain,
    projection_module,
    pullback,
    push_values,
    random_cochain,
    tilde_cocycle,
    trivial_module,
)
from errors import DegreeError, DimensionError, PreconditionError
from exact_linalg import Matrix
from lie_core import LinearMap, center, centroid, derivations, hom_ab_center, inner_derivations, jacobi_check
from products import (
    CrmodMorphism,
    adjoint_crmod,
    check_crmod_morphism,
    deformed,
    identity_crmod,
    psi_map,
    semidirect,
    semidirect_morphism_map,
    universal_morphism,
)

SMALL_CROSSED = ["identity_r2", "identity_r31", "identity_heisenberg_3", "identity_sl2", "adjoint_heisenberg_3",
                 "adjoint_r2", "inclusion_r2_line", "inclusion_ex4dim", "quotient_free2step3", "zero_sl2_standard"]
ALL_CROSSED = [entry.key for entry in Catalog().list_entries() if entry.kind is EntryKind.CROSSED_MODULE]
SQUARE_BASES = ["r2", "sl2", "heisenberg_3", "r31"]
DIFFERENTIAL_SAMPLES = 50


class TestCochains:
    def test_evaluate_is_alternating(self, catalog):
        L = catalog.get("r31")
        c = random_cochain(L, adjoint_module(L), 2)
        for i in range(3):
            for j in range(3):
                forward = c.evaluate_basis((i, j))
                backward = c.evaluate_basis((j, i))
                assert forward == tuple(-a for a in backward)
        assert c.evaluate_basis((1, 1)) == (0, 0, 0)

    def test_evaluate_multilinear(self, catalog):
        L = catalog.get("sl2")
        c = random_cochain(L, adjoint_module(L), 2)
        u, v = (1, 2, 0), (0, Fraction(1, 2), -1)
        expected = [Fraction(0)] * 3
        for i, a in enumerate(u):
            for j, b in enumerate(v):
                if a and b:
                    expected = [x + a * b * y for x, y in zip(expected, c.evaluate_basis((i, j)))]
        assert c.evaluate(u, v) == tuple(expected)

    def test_vector_layout(self, catalog):
        L = catalog.get("r2")
        M = adjoint_module(L)
        values = (1, 2, 3, 4)
        c = Cochain.from_vector(L, M, 1, values)
        assert c.coeffs[(0,)] == (1, 2)
        assert c.coeffs[(1,)] == (3, 4)
        assert c.to_vector() == values

    def test_bad_keys(self, catalog):
        L = catalog.get("r2")
        with pytest.raises(DimensionError):
            Cochain(2, L, adjoint_module(L), {(1, 0): (1, 0)})
        with pytest.raises(DegreeError):
            Cochain(5, L, adjoint_module(L), {})

    def test_arithmetic(self, catalog):
        L = catalog.get("r2")
        c = random_cochain(L, adjoint_module(L), 1)
        assert c.add(c.scale(-1)).is_zero()


class TestDifferential:
    @pytest.mark.parametrize("key", ["r2", "r31", "heisenberg_3", "sl2", "ex4dim"])
    @pytest.mark.parametrize("k", [0, 1])
    def test_square_is_zero(self, catalog, rng, key, k):
        L = catalog.get(key)
        for M in (adjoint_module(L), trivial_module(L)):
            for _ in range(DIFFERENTIAL_SAMPLES):
                c = random_cochain(L, M, k, rng)
                assert differential(differential(c)).is_zero()

    @pytest.mark.parametrize("key", ["r2", "heisenberg_3", "sl2"])
    def test_matrix_matches_direct(self, catalog, rng, key):
        L = catalog.get(key)
        M = adjoint_module(L)
        for k in (0, 1, 2):
            c = random_cochain(L, M, k, rng)
            D = differential_matrix(L, M, k)
            assert D.apply(c.to_vector()) == differential(c).to_vector()

    def test_degree_one_formula(self, catalog):
        # dα(x, y) = [x, α(y)] − [y, α(x)] − α([x, y]) для присоединённого модуля
        L = catalog.get("r2")
        M = adjoint_module(L)
        alpha = Cochain(1, L, M, {(0,): (0, 1), (1,): (1, 1)})
        d = differential(alpha)
        # [x, α(y)] − [y, α(x)] − α(x) = [x, x + y] − [y, y] − (0, 1) = (1, −1)
        assert d.evaluate_basis((0, 1)) == (1, -1)

    def test_unsupported_degree(self, catalog):
        L = catalog.get("r2")
        with pytest.raises(DegreeError):
            differential_matrix(L, adjoint_module(L), 3)


class TestCohomologyDimensions:
    @pytest.mark.parametrize("key", ["r2", "r31", "heisenberg_3", "sl2", "free2step3"])
    def test_low_degrees_match_derivations(self, catalog, key):
        L = catalog.get(key)
        M = adjoint_module(L)
        assert cohomology_dim(L, M, 0) == L.dim - inner_derivations(L).dim
        assert cohomology_dim(L, M, 1) == derivations(L).dim - inner_derivations(L).dim

    @pytest.mark.parametrize("key,expected", [("r2", 1), ("heisenberg_3", 2), ("sl2", 0), ("r31", 1)])
    def test_trivial_h1(self, catalog, key, expected):
        L = catalog.get(key)
        assert cohomology_dim(L, trivial_module(L), 1) == expected

    @pytest.mark.parametrize("key", ["r2", "sl2"])
    def test_rigid(self, catalog, key):
        L = catalog.get(key)
        assert cohomology_dim(L, adjoint_module(L), 2) == 0

    @pytest.mark.parametrize("key", SQUARE_BASES)
    def test_semidirect_square_h1(self, catalog, key):
        # H¹(g ⋊ g) = H¹(g, g)² ⊕ Hom(g/[g, g], Z(g)) ⊕ Centr(g)
        g = catalog.get(key)
        square = semidirect(identity_crmod(g))
        expected = 2 * cohomology_dim(g, adjoint_module(g), 1) + hom_ab_center(g).dim + centroid(g).dim
        assert cohomology_dim(square, adjoint_module(square), 1) == expected

    def test_semidirect_square_h1_values(self, catalog):
        r2sq = catalog.get("r2_semidirect_square")
        assert cohomology_dim(r2sq, adjoint_module(r2sq), 1) == 1
        h3sq = semidirect(catalog.get("identity_heisenberg_3"))
        assert cohomology_dim(h3sq, adjoint_module(h3sq), 1) == 13

    @pytest.mark.parametrize("key", SQUARE_BASES)
    def test_semidirect_square_h0(self, catalog, key):
        g = catalog.get(key)
        square = semidirect(identity_crmod(g))
        assert cohomology_dim(square, adjoint_module(square), 0) == 2 * center(g).dim

    @pytest.mark.parametrize("key", ["r2", "heisenberg_3", "sl2"])
    def test_semidirect_square_h2_nonzero(self, catalog, key):
        g = catalog.get(key)
        square = semidirect(identity_crmod(g))
        assert cohomology_dim(square, adjoint_module(square), 2) >= 1

    def test_report_shape(self, catalog):
        L = catalog.get("heisenberg_3")
        report = cohomology_report(L, adjoint_module(L), "adjoint", degrees=[0, 1])
        assert report == {
            "algebra": "heisenberg_3",
            "module": "adjoint",
            "dims": {"H0": 1, "H1": 4},
            "Z": {"Z0": 1, "Z1": 6},
            "B": {"B0": 0, "B1": 2},
        }

    def test_cochain_dims(self, catalog):
        L = catalog.get("r31")
        M = adjoint_module(L)
        assert [cochain_dim(L, M, k) for k in range(4)] == [3, 9, 9, 3]


class TestCanonicalCocycle:
    @pytest.mark.parametrize("key", SMALL_CROSSED)
    def test_closed(self, catalog, key):
        cm = catalog.get(key)
        assert differential(canonical_cocycle(cm)).is_zero()
        assert differential(canonical_cocycle_g_valued(cm)).is_zero()

    def test_identity_r2_nontrivial(self, catalog):
        assert is_coboundary(canonical_cocycle(catalog.get("identity_r2"))) is None

    @pytest.mark.parametrize("key", ["identity_sl2", "identity_r31", "identity_heisenberg_3"])
    def test_identity_nontrivial(self, catalog, key):
        assert is_coboundary(canonical_cocycle(catalog.get(key))) is None

    @pytest.mark.parametrize("key", ALL_CROSSED)
    def test_nontrivial_exactly_when_image_of_derived_nonzero(self, catalog, key):
        cm = catalog.get(key)
        nontrivial = is_coboundary(canonical_cocycle(cm)) is None
        assert nontrivial == (cm.image_of_derived().dim > 0)

    def test_vanishing_cocycle(self, catalog):
        c = canonical_cocycle(catalog.get("adjoint_heisenberg_3"))
        assert c.is_zero()
        primitive = is_coboundary(c)
        assert primitive is not None
        assert primitive.is_zero()

    def test_linear_deformation_is_deformed(self, catalog):
        cm = catalog.get("identity_r2")
        t = Fraction(5, 2)
        assert linear_deformation(canonical_cocycle(cm), t).sc == deformed(cm, t).sc


class TestBracketCochains:
    @pytest.mark.parametrize("key", ["r2", "heisenberg_3", "sl2"])
    def test_module_module_is_coboundary(self, catalog, key):
        g = catalog.get(key)
        c = tilde_cocycle(g)
        half = module_projection_cochain(g).scale(Fraction(1, 2))
        assert differential(half).to_vector() == c.to_vector()
        assert is_coboundary(c) is not None

    @pytest.mark.parametrize("key", ["r2", "heisenberg_3", "sl2"])
    def test_algebra_module_is_coboundary(self, catalog, key):
        g = catalog.get(key)
        c = bracket_cochain(g, Block.ALGEBRA, Block.MODULE)
        assert differential(algebra_projection_cochain(g)).to_vector() == c.to_vector()

    def test_module_algebra_is_canonical(self, catalog):
        g = catalog.get("sl2")
        c = bracket_cochain(g, Block.MODULE, Block.ALGEBRA)
        assert c.to_vector() == canonical_cocycle(catalog.get("identity_sl2")).to_vector()

    def test_algebra_algebra_closed_only_for_two_step(self, catalog):
        h3 = catalog.get("heisenberg_3")
        assert differential(bracket_cochain(h3, Block.ALGEBRA, Block.ALGEBRA)).is_zero()
        r2 = catalog.get("r2")
        assert not differential(bracket_cochain(r2, Block.ALGEBRA, Block.ALGEBRA)).is_zero()

    def test_coboundary_deformation_is_lie(self, catalog):
        g = catalog.get("r2")
        assert jacobi_check(linear_deformation(tilde_cocycle(g), 3)) == []


class TestCoboundaryErrors:
    def test_not_closed(self, catalog):
        r2 = catalog.get("r2")
        with pytest.raises(PreconditionError):
            is_coboundary(bracket_cochain(r2, Block.ALGEBRA, Block.ALGEBRA))

    def test_degree_zero(self, catalog):
        L = catalog.get("r2")
        with pytest.raises(DegreeError):
            is_coboundary(Cochain.zero(L, adjoint_module(L), 0))


class TestTransport:
    def test_pullback_identity(self, catalog, rng):
        L = catalog.get("sl2")
        c = random_cochain(L, adjoint_module(L), 2, rng)
        back = pullback(LinearMap.identity(L), c)
        assert back.coeffs == c.coeffs
        assert back.module.rho == c.module.rho

    def test_pullback_commutes_with_differential(self, catalog, rng):
        g = catalog.get("r2")
        psi = psi_map(g, 1)
        M = adjoint_module(psi.target)
        c = random_cochain(psi.target, M, 1, rng)
        assert pullback(psi, differential(c)).coeffs == differential(pullback(psi, c)).coeffs

    def test_pullback_needs_homomorphism(self, catalog):
        L = catalog.get("r2")
        swap = LinearMap(L, L, Matrix.from_rows([[0, 1], [1, 0]]))
        with pytest.raises(PreconditionError):
            pullback(swap, Cochain.zero(L, adjoint_module(L), 1))

    def test_push_values(self, catalog):
        cm = catalog.get("identity_r2")
        c = canonical_cocycle(cm)
        M = projection_module(cm)
        projection = Matrix.from_rows([[0, 0, 1, 0], [0, 0, 0, 1]])
        pushed = push_values(projection, c, M)
        assert pushed.coeffs == canonical_cocycle_g_valued(cm).coeffs

    @pytest.mark.parametrize("key", ["identity_r2", "inclusion_r2_line", "inclusion_ex4dim", "adjoint_heisenberg_3",
                                     "adjoint_sl2", "quotient_free2step3", "zero_r2_adjoint"])
    def test_universal_cocycle_induces_canonical(self, catalog, key):
        cm = catalog.get(key)
        universal = identity_crmod(cm.g)
        F = semidirect_morphism_map(universal_morphism(cm), cm, universal, 0)
        induced = pullback(F, canonical_cocycle_g_valued(universal))
        expected = canonical_cocycle_g_valued(cm)
        assert induced.to_vector() == expected.to_vector()
        assert induced.module.rho == expected.module.rho

    @pytest.mark.parametrize("key", ["r2", "heisenberg_3", "sl2"])
    def test_cocycle_is_natural_along_morphisms(self, catalog, key):
        # (id, ad): id_g -> ad_g; пул-бэк коцикла ad_g равен ψ∘c коцикла id_g
        g = catalog.get(key)
        source, target = identity_crmod(g), adjoint_crmod(g)
        m = CrmodMorphism(LinearMap.identity(g), LinearMap(g, target.g, target.mu.matrix))
        assert check_crmod_morphism(m, source, target).ok
        F = semidirect_morphism_map(m, source, target, 0)
        induced = pullback(F, canonical_cocycle_g_valued(target))
        pushed = push_values(m.psi.matrix, canonical_cocycle_g_valued(source), induced.module)
        assert induced.to_vector() == pushed.to_vector()

    def test_random_cochain_is_seeded(self, catalog):
        L = catalog.get("r31")
        M = adjoint_module(L)
        assert random_cochain(L, M, 2).coeffs == random_cochain(L, M, 2).coeffs
