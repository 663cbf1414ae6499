"""
Analysis - структурные формулы для деформированной алгебры
Центр и производный идеал, специализация ad: g -> Der(g), двуступенно нильпотентные
алгебры, перенос разрешимости, блочная структура дифференцирований и
сертификаты неизоморфности по инвариантам.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from errors import ApplicabilityError, TheoremViolation
from exact_linalg import (
    Matrix,
    Scalar,
    Subspace,
    Vector,
    inverse,
    kernel_of_rows,
    parse_rational,
    rank,
    unit_vector,
    zero_vector,
)
from lie_core import (
    LieAlgebra,
    ad_basis,
    bracket,
    center,
    centroid,
    derivation_kernel_intersection,
    derivations,
    derivations_as_algebra,
    derived_series,
    derived_subalgebra,
    hom_ab_center,
    inner_derivations,
    is_derivation,
    is_nilpotent,
    is_solvable,
    killing_form,
    lower_central_series,
)
from products import (
    Action,
    CheckReport,
    CrossedModule,
    adjoint_crmod,
    deformed,
    direct_product,
    semidirect,
)

logger = logging.getLogger(__name__)


# ============================================================
# FINGERPRINTS AND CERTIFICATES
# ============================================================

FINGERPRINT_FIELDS = (
    "dim",
    "dim_center",
    "dim_derived",
    "derived_series_dims",
    "lcs_dims",
    "dim_Der",
    "dim_Centr",
    "dim_hom_ab_center",
    "dim_H1_adjoint",
    "killing_rank",
    "is_solvable",
    "is_nilpotent",
)


@dataclass
class Fingerprint:
    """Набор базисно-независимых инвариантов; None, если поле не вычислялось"""
    dim: Optional[int] = None
    dim_center: Optional[int] = None
    dim_derived: Optional[int] = None
    derived_series_dims: Optional[Tuple[int, ...]] = None
    lcs_dims: Optional[Tuple[int, ...]] = None
    dim_Der: Optional[int] = None
    dim_Centr: Optional[int] = None
    dim_hom_ab_center: Optional[int] = None
    dim_H1_adjoint: Optional[int] = None
    killing_rank: Optional[int] = None
    is_solvable: Optional[bool] = None
    is_nilpotent: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {}
        for name in FINGERPRINT_FIELDS:
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else value
        return out


def _compute_field(L: LieAlgebra, name: str, cache: Dict[str, Any]) -> Any:
    if name == "dim":
        return L.dim
    if name == "dim_center":
        return center(L).dim
    if name == "dim_derived":
        return derived_subalgebra(L).dim
    if name == "derived_series_dims":
        return tuple(S.dim for S in derived_series(L))
    if name == "lcs_dims":
        return tuple(S.dim for S in lower_central_series(L))
    if name == "dim_Der":
        if "der" not in cache:
            cache["der"] = derivations(L).dim
        return cache["der"]
    if name == "dim_Centr":
        return centroid(L).dim
    if name == "dim_hom_ab_center":
        return hom_ab_center(L).dim
    if name == "dim_H1_adjoint":
        # H^1 с присоединёнными коэффициентами = Der / Inn
        if "der" not in cache:
            cache["der"] = derivations(L).dim
        return cache["der"] - inner_derivations(L).dim
    if name == "killing_rank":
        return rank(killing_form(L))
    if name == "is_solvable":
        return is_solvable(L)
    if name == "is_nilpotent":
        return is_nilpotent(L)
    raise KeyError(f"Unknown fingerprint field '{name}'")


def fingerprint(L: LieAlgebra, fields: Optional[Sequence[str]] = None) -> Fingerprint:
    requested = list(fields) if fields is not None else list(FINGERPRINT_FIELDS)
    cache: Dict[str, Any] = {}
    values = {name: _compute_field(L, name, cache) for name in requested}
    logger.debug(f"Fingerprint of {L.name}: {values}")
    return Fingerprint(**values)


@dataclass
class NonIsoCertificate:
    """
    Сертификат неизоморфности: conclusive, если хотя бы один инвариант различается.
    Совпадение инвариантов изоморфизма не доказывает.
    """
    a_name: str
    b_name: str
    differing_invariants: List[Tuple[str, Any, Any]] = field(default_factory=list)
    conclusive: bool = False
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        def plain(value):
            return list(value) if isinstance(value, tuple) else value

        return {
            "A": self.a_name,
            "B": self.b_name,
            "conclusive": self.conclusive,
            "diffs": [{"invariant": name, "a": plain(a), "b": plain(b)}
                      for name, a, b in self.differing_invariants],
        }


def certify_nonisomorphic(A: LieAlgebra, B: LieAlgebra,
                          invariants: Optional[Sequence[str]] = None) -> NonIsoCertificate:
    names = list(invariants) if invariants is not None else list(FINGERPRINT_FIELDS)
    # поля сравниваются в фиксированном порядке схемы
    ordered = [name for name in FINGERPRINT_FIELDS if name in names]
    fa = fingerprint(A, ordered)
    fb = fingerprint(B, ordered)
    diffs = []
    for name in ordered:
        a, b = getattr(fa, name), getattr(fb, name)
        if a != b:
            diffs.append((name, a, b))
    reason = "invariants differ" if diffs else "all compared invariants agree"
    return NonIsoCertificate(A.name, B.name, diffs, bool(diffs), reason)


# ============================================================
# CENTER OF THE DEFORMED ALGEBRA
# ============================================================

def center_deformed_formula(cm: CrossedModule, t: Scalar) -> Subspace:
    """
    (x, y) централен в deformed(cm, t), t != 0, тогда и только тогда, когда
      ρ(y) = 0,  μ([x, h']) = 0 для всех h',  g'·x = 0 для всех g',  y ∈ Z(g).
    """
    t = parse_rational(t)
    if t == 0:
        raise ApplicabilityError("The center formula describes t != 0; use center(semidirect(cm)) at t = 0")
    p, q = cm.h.dim, cm.g.dim
    pad_h, pad_g = zero_vector(p), zero_vector(q)
    rows: List[Vector] = []
    for r in range(p):
        for c in range(p):
            rows.append(pad_h + tuple(rho.entry(r, c) for rho in cm.action.rho))
    for ad in ad_basis(cm.h):
        composed = cm.mu.matrix.matmul(ad)
        rows.extend(composed.row(r) + pad_g for r in range(q))
    for rho in cm.action.rho:
        rows.extend(rho.row(r) + pad_g for r in range(p))
    for ad in ad_basis(cm.g):
        rows.extend(pad_h + ad.row(r) for r in range(q))
    return kernel_of_rows(rows, p + q)


def center_adjoint_deformed(g: LieAlgebra, t: Scalar) -> Subspace:
    """{(h, 0) : h ∈ ∩ ker D,  [h, h'] ∈ Z(g) для всех h'} в координатах g ⊕ Der(g)"""
    t = parse_rational(t)
    if t == 0:
        raise ApplicabilityError("The adjoint center formula describes t != 0")
    n = g.dim
    der = derivations(g)
    rows: List[Vector] = []
    for D in der.basis:
        rows.extend(D.row(r) for r in range(n))
    ads = ad_basis(g)
    for ad_k in ads:
        for ad_l in ads:
            product = ad_l.matmul(ad_k)
            rows.extend(product.row(r) for r in range(n))
    inner = kernel_of_rows(rows, n)
    return Subspace.direct(inner, Subspace.zero(der.dim))


def criterion_center_direct(g: LieAlgebra) -> Optional[NonIsoCertificate]:
    """При Z(Der(g)) != 0 центр g ⊕ Der(g) больше центра деформированной алгебры"""
    der_algebra, _ = derivations_as_algebra(g)
    z_der = center(der_algebra).dim
    if z_der == 0:
        logger.warning(f"Z(Der({g.name})) = 0, the center criterion does not apply")
        return None
    direct_dim = center(g).dim + z_der
    deformed_dim = center_adjoint_deformed(g, 1).dim
    if deformed_dim >= direct_dim:
        logger.error(f"{g.name}: deformed center {deformed_dim} not smaller than direct {direct_dim}")
        raise TheoremViolation(f"{g.name}: center criterion failed")
    return NonIsoCertificate(
        f"{g.name}+Der({g.name})",
        f"deformed(adjoint_{g.name}, t)",
        [("dim_center", direct_dim, deformed_dim)],
        True,
        f"dim Z(Der) = {z_der}",
    )


# ============================================================
# TWO-STEP NILPOTENT ALGEBRAS
# ============================================================

def is_two_step_nilpotent(g: LieAlgebra) -> bool:
    dims = [S.dim for S in lower_central_series(g)]
    return len(dims) == 3 and dims[2] == 0


def _require_two_step(g: LieAlgebra):
    if not is_two_step_nilpotent(g):
        raise ApplicabilityError(f"{g.name} is not 2-step nilpotent")


def two_step_D0(g: LieAlgebra) -> Matrix:
    """D_0 = 2·id на [g, g] и id на жадном дополнении V"""
    _require_two_step(g)
    derived = derived_subalgebra(g)
    complement = derived.complement_indices()
    basis = Matrix.from_columns(list(derived.basis) + [unit_vector(g.dim, c) for c in complement], rows=g.dim)
    weights = Matrix.block_diagonal(Matrix.scalar(derived.dim, 2), Matrix.identity(len(complement)))
    return basis.matmul(weights).matmul(inverse(basis))


def two_step_D0_check(g: LieAlgebra) -> bool:
    return is_derivation(g, two_step_D0(g))


def two_step_noniso_theorem_check(g: LieAlgebra) -> NonIsoCertificate:
    """
    Для 2-ступенно нильпотентной g: центр deformed(adjoint, 1) равен нулю, сама алгебра
    не нильпотентна, а центр g ⊕ Der(g) содержит Z(g) != 0.
    """
    _require_two_step(g)
    cm = adjoint_crmod(g)
    algebra = deformed(cm, 1)
    deformed_center = center(algebra).dim
    direct_center = center(direct_product(cm)).dim
    nilpotent = is_nilpotent(algebra)
    if deformed_center != 0 or direct_center == 0 or nilpotent:
        logger.error(
            f"{g.name}: deformed center {deformed_center}, direct center {direct_center}, nilpotent {nilpotent}"
        )
        raise TheoremViolation(f"{g.name}: two-step non-isomorphy statement failed")
    return NonIsoCertificate(
        f"{g.name}+Der({g.name})",
        algebra.name,
        [("dim_center", direct_center, deformed_center)],
        True,
        "deformed algebra is centerless and not nilpotent",
    )


# ============================================================
# DERIVED IDEAL AND SOLVABILITY
# ============================================================

def derived_deformed_formula(cm: CrossedModule, t: Scalar = 1) -> Subspace:
    """O ⊕ [g, g], O = span{ρ(g_i) h_j}"""
    p, q = cm.h.dim, cm.g.dim
    orbit = Subspace.span(p, [rho.column(j) for rho in cm.action.rho for j in range(p)])
    return Subspace.direct(orbit, derived_subalgebra(cm.g))


def solvability_transfer_check(cm: CrossedModule, t: Scalar) -> bool:
    algebra = deformed(cm, t)
    value = is_solvable(algebra)
    expected = is_solvable(cm.g)
    if value != expected:
        logger.error(f"{algebra.name}: solvable {value}, but {cm.g.name} solvable {expected}")
        raise TheoremViolation(f"Solvability transfer failed for {cm.name}")
    return value


def action_is_nilpotent(action: Action) -> bool:
    """V_0 = V, V_(k+1) = span ρ(g) V_k доходит до нуля"""
    current = Subspace.full(action.space_dim)
    while current.dim > 0:
        following = Subspace.span(action.space_dim, [rho.apply(v) for rho in action.rho for v in current.basis])
        if following.dim == current.dim:
            return False
        current = following
    return True


def nilpotency_necessity_check(cm: CrossedModule, t: Scalar) -> bool:
    """Нильпотентность deformed(cm, t) влечёт нильпотентность g и действия"""
    algebra = deformed(cm, t)
    nilpotent = is_nilpotent(algebra)
    if nilpotent and not (is_nilpotent(cm.g) and action_is_nilpotent(cm.action)):
        logger.error(f"{algebra.name} is nilpotent while g or the action is not")
        raise TheoremViolation(f"Nilpotency necessity failed for {cm.name}")
    return nilpotent


def kernel_intersection_report(g: LieAlgebra) -> Dict[str, Any]:
    """∩ ker D ⊆ Z(g); включение бывает строгим"""
    kernels = derivation_kernel_intersection(g)
    z = center(g)
    if not kernels.is_subspace_of(z):
        logger.error(f"{g.name}: intersection of derivation kernels is not central")
        raise TheoremViolation(f"{g.name}: derivation kernels not inside the center")
    return {
        "algebra": g.name,
        "dim_center": z.dim,
        "dim_kernel_intersection": kernels.dim,
        "strict": kernels.dim < z.dim,
    }


# ============================================================
# BLOCK STRUCTURE OF DERIVATIONS
# ============================================================

class ProductKind(Enum):
    DIRECT = "direct"
    SEMIDIRECT = "semidirect"
    DEFORMED = "deformed"


@dataclass
class BlockReport:
    """Блоки D1: h->h, D2: g->h, D3: h->g, D4: g->g базиса Der произведения"""
    kind: ProductKind
    algebra: str
    dim_der: int
    block_ranks: Dict[str, int]
    violations: CheckReport
    formula_dim: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.violations.ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "algebra": self.algebra,
            "dim_Der": self.dim_der,
            "block_ranks": dict(self.block_ranks),
            "formula_dim": self.formula_dim,
            "violations": self.violations.to_dict()["violations"],
        }


def product_algebra(kind: ProductKind, cm: CrossedModule, t: Scalar = 1) -> LieAlgebra:
    if kind is ProductKind.DIRECT:
        return direct_product(cm)
    if kind is ProductKind.SEMIDIRECT:
        return semidirect(cm)
    return deformed(cm, t)


def is_identity_crmod(cm: CrossedModule) -> bool:
    return (
        cm.h.same_brackets(cm.g)
        and cm.mu.matrix == Matrix.identity(cm.g.dim)
        and cm.action.rho == tuple(ad_basis(cm.g))
    )


def derivation_dim_formula(kind: ProductKind, cm: CrossedModule) -> Optional[int]:
    """
    Закрытые формулы:
      Der(h ⊕ g) = Der h + Der g + Hom(g/[g,g], Z h) + Hom(h/[h,h], Z g);
      Der(g ⋊ g) = 2·Der g + Centr g + Hom(g/[g,g], Z g);
      Der(deformed(id_g, t)) = Der(g ⊕ g) при t != 0.
    """
    h, g = cm.h, cm.g
    if kind is ProductKind.DIRECT:
        hom_gh = (g.dim - derived_subalgebra(g).dim) * center(h).dim
        hom_hg = (h.dim - derived_subalgebra(h).dim) * center(g).dim
        return derivations(h).dim + derivations(g).dim + hom_gh + hom_hg
    if not is_identity_crmod(cm):
        return None
    if kind is ProductKind.SEMIDIRECT:
        return 2 * derivations(g).dim + centroid(g).dim + hom_ab_center(g).dim
    return 2 * derivations(g).dim + 2 * hom_ab_center(g).dim


def _block_violations(kind: ProductKind, cm: CrossedModule, t, matrices: Sequence[Matrix]) -> CheckReport:
    h, g = cm.h, cm.g
    p, q = h.dim, g.dim
    report = CheckReport(f"{kind.value} derivation blocks of {cm.name}")
    hs = [unit_vector(p, a) for a in range(p)]
    gs = [unit_vector(q, i) for i in range(q)]

    def act(i: int, v: Vector) -> Vector:
        return cm.action.rho[i].apply(v)

    def act_by(y: Vector, v: Vector) -> Vector:
        return cm.action.matrix_of(y).apply(v)

    def mu_br(u: Vector, v: Vector) -> Vector:
        return tuple(t * x for x in cm.mu.apply(bracket(h, u, v)))

    z_h, z_g = center(h), center(g)
    derived_h = derived_subalgebra(h)
    for idx, D in enumerate(matrices):
        D1, D2 = D.submatrix(0, p, 0, p), D.submatrix(0, p, p, p + q)
        D3, D4 = D.submatrix(p, p + q, 0, p), D.submatrix(p, p + q, p, p + q)
        if not is_derivation(g, D4):
            report.add("d4_derivation", (idx,))
        if kind is ProductKind.DIRECT:
            if not is_derivation(h, D1):
                report.add("d1_derivation", (idx,))
            if any(any(D3.apply(b)) for b in derived_h.basis):
                report.add("d3_kills_derived", (idx,))
            if any(not z_h.contains(D2.column(i)) for i in range(q)):
                report.add("d2_into_center", (idx,))
            if any(not z_g.contains(D3.column(a)) for a in range(p)):
                report.add("d3_into_center", (idx,))
            if any(any(D2.apply(b)) for b in derived_subalgebra(g).basis):
                report.add("d2_kills_derived", (idx,))
            continue
        for a in range(p):
            for b in range(a + 1, p):
                image_hh = mu_br(hs[a], hs[b])
                lhs = D2.apply(image_hh)
                rhs = tuple(x - y for x, y in zip(act_by(D3.column(a), hs[b]), act_by(D3.column(b), hs[a])))
                if lhs != rhs:
                    report.add("d2_mu_bracket", (idx, a, b))
                lhs = D4.apply(image_hh)
                rhs = tuple(x + y for x, y in zip(mu_br(D1.column(a), hs[b]), mu_br(hs[a], D1.column(b))))
                if lhs != rhs:
                    report.add("d4_mu_bracket", (idx, a, b))
        for i in range(q):
            D4g = D4.column(i)
            D2g = D2.column(i)
            for a in range(p):
                moved = act(i, hs[a])
                lhs = D1.apply(moved)
                rhs = tuple(x + y for x, y in zip(act(i, D1.column(a)), act_by(D4g, hs[a])))
                if lhs != rhs:
                    report.add("d1_equivariance", (idx, i, a))
                lhs = D3.apply(moved)
                rhs = tuple(x + y for x, y in zip(bracket(g, gs[i], D3.column(a)), mu_br(D2g, hs[a])))
                if lhs != rhs:
                    report.add("d3_equivariance", (idx, i, a))
            for j in range(i + 1, q):
                lhs = D2.apply(g.structure_constant(i, j))
                rhs = tuple(x - y for x, y in zip(act(i, D2.column(j)), act(j, D2g)))
                if lhs != rhs:
                    report.add("d2_cocycle", (idx, i, j))
    return report


def derivation_block_report(kind: ProductKind, cm: CrossedModule, t: Scalar = 1) -> BlockReport:
    t = parse_rational(t) if kind is ProductKind.DEFORMED else parse_rational(0)
    algebra = product_algebra(kind, cm, t)
    der = derivations(algebra)
    p, q = cm.h.dim, cm.g.dim
    blocks = {"D1": (0, p, 0, p), "D2": (0, p, p, p + q), "D3": (p, p + q, 0, p), "D4": (p, p + q, p, p + q)}
    block_ranks = {}
    for label, (r0, r1, c0, c1) in blocks.items():
        block_ranks[label] = Subspace.span(
            (r1 - r0) * (c1 - c0), [D.submatrix(r0, r1, c0, c1).flatten() for D in der.basis]
        ).dim
    violations = _block_violations(kind, cm, t, der.basis)
    if not violations.ok:
        logger.warning(violations.summary())
    return BlockReport(kind, algebra.name, der.dim, block_ranks, violations, derivation_dim_formula(kind, cm))


def second_derived_dims(L: LieAlgebra) -> Tuple[int, int]:
    """Размерности первого и второго производных идеалов"""
    series = derived_series(L)
    first = series[1].dim if len(series) > 1 else series[0].dim
    second = series[2].dim if len(series) > 2 else first
    return first, second
