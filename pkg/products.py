"""
Products - действия, полупрямые произведения, скрещенные модули и деформации
Деформированная скобка (g·h' − g'·h, [g,g'] + t·μ([h,h'])), сжатия ψ_s, φ_s,
морфизмы скрещенных модулей и структурные изоморфизмы.

Координаты пары (h, g) всегда хранятся h-блоком вперёд.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from errors import (
    ActionError,
    ApplicabilityError,
    CrossedModuleError,
    DimensionError,
    IdealError,
    PreconditionError,
    SingularityError,
)
from exact_linalg import (
    Matrix,
    Scalar,
    Subspace,
    Vector,
    format_rational,
    image,
    inverse,
    kernel,
    kernel_of_rows,
    parse_rational,
    rank,
    solve,
    unit_vector,
    zero_vector,
)
from lie_core import (
    LieAlgebra,
    LinearMap,
    ad_basis,
    ad_matrix,
    bracket,
    center,
    change_basis,
    complement_lift,
    derivations_as_algebra,
    direct_sum,
    homomorphism_defects,
    is_derivation,
    is_homomorphism,
    is_ideal,
    matrix_span,
    pair_labels,
    quotient,
    subalgebra,
)

logger = logging.getLogger(__name__)


# ============================================================
# CHECK REPORTS
# ============================================================

@dataclass
class Violation:
    """Одно нарушенное условие на конкретных базисных индексах"""
    rule: str
    where: Tuple[int, ...]
    detail: str = ""

    def to_dict(self) -> Dict:
        return {"rule": self.rule, "where": list(self.where), "detail": self.detail}


@dataclass
class CheckReport:
    """Результат проверки: пустой список нарушений означает успех"""
    subject: str
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, where: Tuple[int, ...], detail: str = ""):
        self.violations.append(Violation(rule, tuple(where), detail))

    def merge(self, other: 'CheckReport'):
        self.violations.extend(other.violations)

    def rules(self) -> List[str]:
        return sorted({v.rule for v in self.violations})

    def summary(self) -> str:
        if self.ok:
            return f"{self.subject}: ok"
        first = self.violations[0]
        return f"{self.subject}: {len(self.violations)} violations (first: {first.rule} at {first.where})"

    def to_dict(self) -> Dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
        }


# ============================================================
# ACTIONS
# ============================================================

@dataclass(frozen=True)
class Action:
    """Действие алгебры acting на пространстве размерности space_dim: по матрице на образующую"""
    acting: LieAlgebra
    space_dim: int
    rho: Tuple[Matrix, ...]

    def __post_init__(self):
        rho = tuple(self.rho)
        if len(rho) != self.acting.dim:
            raise DimensionError(f"Action of {self.acting.name} needs {self.acting.dim} matrices, got {len(rho)}")
        for k, m in enumerate(rho):
            if m.shape != (self.space_dim, self.space_dim):
                raise DimensionError(
                    f"Action matrix {k} has shape {m.shape}, expected {self.space_dim}x{self.space_dim}"
                )
        object.__setattr__(self, "rho", rho)

    @classmethod
    def adjoint(cls, L: LieAlgebra) -> 'Action':
        return cls(L, L.dim, tuple(ad_basis(L)))

    @classmethod
    def trivial(cls, L: LieAlgebra, space_dim: int) -> 'Action':
        return cls(L, space_dim, tuple(Matrix.zeros(space_dim, space_dim) for _ in range(L.dim)))

    def matrix_of(self, x: Sequence[Scalar]) -> Matrix:
        """ρ(x) = Σ x_i ρ(e_i)"""
        if len(x) != self.acting.dim:
            raise DimensionError(f"Element of length {len(x)} for {self.acting.name}")
        result = Matrix.zeros(self.space_dim, self.space_dim)
        for coef, m in zip(x, self.rho):
            coef = parse_rational(coef)
            if coef:
                result = result + m.scale(coef)
        return result

    def act(self, x: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
        return self.matrix_of(x).apply(v)

    def is_trivial(self) -> bool:
        return all(m.is_zero() for m in self.rho)

    def to_lists(self) -> List[List[List[str]]]:
        return [m.to_lists() for m in self.rho]


def check_action(a: Action, h: Optional[LieAlgebra] = None, by_derivations: bool = False) -> CheckReport:
    """
    Проверка действия: ρ([g_i, g_j]) = [ρ(g_i), ρ(g_j)] на всех парах
    и, при by_derivations, что каждое ρ(g_i) является дифференцированием h.
    """
    if h is not None and h.dim != a.space_dim:
        raise DimensionError(f"Action on a {a.space_dim}-space checked against {h.name} of dim {h.dim}")
    report = CheckReport(f"action of {a.acting.name}")
    g = a.acting
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = a.matrix_of(g.structure_constant(i, j))
            rhs = a.rho[i].commutator(a.rho[j])
            if lhs != rhs:
                report.add("action_homomorphism", (i, j),
                           f"rho([{g.basis_labels[i]}, {g.basis_labels[j]}]) != commutator")
    if by_derivations:
        if h is None:
            raise PreconditionError("by_derivations needs the algebra acted upon")
        for i, m in enumerate(a.rho):
            if not is_derivation(h, m):
                report.add("action_by_derivations", (i,), f"rho({g.basis_labels[i]}) is not a derivation of {h.name}")
    return report


# ============================================================
# CROSSED MODULES
# ============================================================

@dataclass(frozen=True)
class CrossedModule:
    """μ: h -> g вместе с действием g на h"""
    h: LieAlgebra
    g: LieAlgebra
    mu: LinearMap
    action: Action
    name: str = "crossed_module"

    def __post_init__(self):
        if self.mu.matrix.shape != (self.g.dim, self.h.dim):
            raise DimensionError(f"{self.name}: mu must be {self.g.dim}x{self.h.dim}")
        if self.action.acting.dim != self.g.dim or self.action.space_dim != self.h.dim:
            raise DimensionError(f"{self.name}: action must be of {self.g.name} on a {self.h.dim}-space")

    def image_of_derived(self) -> Subspace:
        """μ([h, h])"""
        return Subspace.span(self.g.dim, [self.mu.apply(v) for v in self.h.sc.values()])

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "h": self.h.to_dict(),
            "g": self.g.to_dict(),
            "mu": self.mu.matrix.to_lists(),
            "action": self.action.to_lists(),
        }


def check_crossed_module(cm: CrossedModule) -> CheckReport:
    report = CheckReport(cm.name)
    mu_map = LinearMap(cm.h, cm.g, cm.mu.matrix)
    for i, j in homomorphism_defects(mu_map):
        report.add("mu_homomorphism", (i, j), "mu is not a homomorphism on this pair")
    report.merge(check_action(cm.action, cm.h, by_derivations=True))
    g, h = cm.g, cm.h
    mu_columns = cm.mu.matrix.columns()
    # (a) μ(g·h) = [g, μ(h)]
    for i in range(g.dim):
        e_i = unit_vector(g.dim, i)
        for j in range(h.dim):
            lhs = cm.mu.apply(cm.action.rho[i].column(j))
            rhs = bracket(g, e_i, mu_columns[j])
            if lhs != rhs:
                report.add("equivariance", (i, j), f"mu({g.basis_labels[i]}.{h.basis_labels[j]}) != [g, mu(h)]")
    # (b) μ(h)·h' = [h, h']
    for i in range(h.dim):
        acting = cm.action.matrix_of(mu_columns[i])
        for j in range(h.dim):
            if acting.column(j) != h.structure_constant(i, j):
                report.add("peiffer", (i, j), f"mu({h.basis_labels[i]}).{h.basis_labels[j]} != bracket")
    if not report.ok:
        logger.debug(report.summary())
    return report


def identity_crmod(g: LieAlgebra) -> CrossedModule:
    return CrossedModule(g, g, LinearMap.identity(g), Action.adjoint(g), name=f"identity_{g.name}")


def adjoint_crmod(g: LieAlgebra) -> CrossedModule:
    """ad: g -> Der(g); Der(g) действует на g своими матрицами"""
    der, matrices = derivations_as_algebra(g)
    span = matrix_span(matrices, g.dim, g.dim)
    columns = []
    for ad in ad_basis(g):
        coords = span.coordinates(ad.flatten())
        if coords is None:
            raise CrossedModuleError(f"ad of {g.name} is not in Der({g.name})")
        columns.append(coords)
    mu = LinearMap(g, der, Matrix.from_columns(columns, rows=der.dim))
    return CrossedModule(g, der, mu, Action(der, g.dim, tuple(matrices)), name=f"adjoint_{g.name}")


def inclusion_crmod(g: LieAlgebra, I: Subspace, name: Optional[str] = None) -> CrossedModule:
    """Вложение идеала I ⊂ g; g действует на I скобкой"""
    if not is_ideal(g, I):
        raise IdealError(f"{g.name}: subspace is not an ideal")
    sub, inclusion = subalgebra(g, I, name=f"ideal({g.name})")
    rho = []
    for i in range(g.dim):
        e_i = unit_vector(g.dim, i)
        rho.append(Matrix.from_columns([I.coordinates(bracket(g, e_i, b)) for b in I.basis], rows=I.dim))
    return CrossedModule(sub, g, LinearMap(sub, g, inclusion), Action(g, I.dim, tuple(rho)),
                         name=name or f"inclusion_{g.name}")


def quotient_crmod(h: LieAlgebra, I: Subspace, name: Optional[str] = None) -> CrossedModule:
    """Проекция h -> h/I для центрального идеала I; h/I действует через ad подъёма"""
    if not is_ideal(h, I):
        raise IdealError(f"{h.name}: subspace is not an ideal")
    if not I.is_subspace_of(center(h)):
        raise CrossedModuleError(f"{h.name}: quotient crossed module needs a central ideal")
    Q, projection = quotient(h, I, name=f"{h.name}/I")
    rho = tuple(ad_matrix(h, column) for column in complement_lift(I).columns())
    return CrossedModule(h, Q, projection, Action(Q, h.dim, rho), name=name or f"quotient_{h.name}")


def zero_crmod(action: Action, name: Optional[str] = None) -> CrossedModule:
    """0: V -> g для g-модуля V (V абелева)"""
    report = check_action(action)
    if not report.ok:
        raise ActionError(report.summary())
    V = LieAlgebra.abelian(action.space_dim, name="V", labels=[f"v{k + 1}" for k in range(action.space_dim)])
    mu = LinearMap(V, action.acting, Matrix.zeros(action.acting.dim, action.space_dim))
    return CrossedModule(V, action.acting, mu, action, name=name or f"zero_{action.acting.name}")


# ============================================================
# SEMIDIRECT AND DEFORMED PRODUCTS
# ============================================================

def _assemble(name: str, h: LieAlgebra, action: Action,
              h_brackets: Dict[Tuple[int, int], Tuple[Vector, Vector]]) -> LieAlgebra:
    """
    Алгебра на h ⊕ g: [h_a, g_i] = (−ρ(g_i) h_a, 0), [g_i, g_j] = (0, [g_i, g_j]),
    скобки внутри h берутся из h_brackets (пара (h-часть, g-часть)).
    """
    g = action.acting
    p, q = action.space_dim, g.dim
    pad_h, pad_g = zero_vector(p), zero_vector(q)
    sc: Dict[Tuple[int, int], Vector] = {}
    for (a, b), (h_part, g_part) in h_brackets.items():
        sc[(a, b)] = tuple(h_part) + tuple(g_part)
    for i in range(q):
        rho_i = action.rho[i]
        for a in range(p):
            column = rho_i.column(a)
            if any(column):
                sc[(a, p + i)] = tuple(-x for x in column) + pad_g
    for (i, j), vec in g.sc.items():
        sc[(p + i, p + j)] = pad_h + tuple(vec)
    return LieAlgebra(name, p + q, pair_labels(h.basis_labels, g.basis_labels), sc)


def _require_valid(cm: CrossedModule):
    report = check_crossed_module(cm)
    if not report.ok:
        raise CrossedModuleError(report.summary())


def semidirect(data: Union[CrossedModule, Action], name: Optional[str] = None) -> LieAlgebra:
    """h ⋊ g с h, рассматриваемым как абелева алгебра"""
    if isinstance(data, CrossedModule):
        action, h = data.action, data.h
        default_name = f"semidirect({data.name})"
    else:
        action = data
        h = LieAlgebra.abelian(action.space_dim, name="V", labels=[f"v{k + 1}" for k in range(action.space_dim)])
        default_name = f"V><{action.acting.name}"
    report = check_action(action)
    if not report.ok:
        raise ActionError(report.summary())
    return _assemble(name or default_name, h, action, {})


def deformed(cm: CrossedModule, t: Scalar, name: Optional[str] = None) -> LieAlgebra:
    """Скобка (g·h' − g'·h, [g, g'] + t·μ([h, h'])); при t = 0 совпадает с semidirect"""
    _require_valid(cm)
    t = parse_rational(t)
    h_brackets = {}
    if t:
        for (a, b), vec in cm.h.sc.items():
            h_brackets[(a, b)] = (zero_vector(cm.h.dim), tuple(t * x for x in cm.mu.apply(vec)))
    logger.debug(f"Deformed bracket of {cm.name} at t={t}")
    return _assemble(name or f"deformed({cm.name}, t={format_rational(t)})", cm.h, cm.action, h_brackets)


def alt_deformed(cm: CrossedModule, t: Scalar, name: Optional[str] = None) -> LieAlgebra:
    """Деформация кограницей: (g·h' − g'·h + t[h, h'], [g, g'])"""
    _require_valid(cm)
    t = parse_rational(t)
    h_brackets = {}
    if t:
        for (a, b), vec in cm.h.sc.items():
            h_brackets[(a, b)] = (tuple(t * x for x in vec), zero_vector(cm.g.dim))
    return _assemble(name or f"alt_deformed({cm.name}, t={format_rational(t)})", cm.h, cm.action, h_brackets)


def direct_product(cm: CrossedModule) -> LieAlgebra:
    return direct_sum(cm.h, cm.g, name=f"{cm.h.name}+{cm.g.name}")


# ============================================================
# CONTRACTIONS
# ============================================================

def _nonzero(s: Scalar, what: str):
    s = parse_rational(s)
    if s == 0:
        raise SingularityError(f"{what}: parameter must be nonzero")
    return s


def psi_map(g: LieAlgebra, s: Scalar) -> LinearMap:
    """ψ_s(m, g) = (g − s·m, g + s·m) из deformed(identity, s²) в g ⊕ g"""
    s = _nonzero(s, "psi_map")
    n = g.dim
    I = Matrix.identity(n)
    block = Matrix.from_blocks([[I.scale(-s), I], [I.scale(s), I]])
    source = deformed(identity_crmod(g), s * s)
    return LinearMap(source, direct_sum(g, g), block)


def contraction_check_psi(g: LieAlgebra, s: Scalar) -> bool:
    """Перенос структурных констант g ⊕ g по ψ_s даёт ровно деформированную скобку"""
    psi = psi_map(g, s)
    transported = change_basis(psi.target, psi.matrix)
    return transported.sc == psi.source.sc


def phi_map(cm: CrossedModule, s: Scalar) -> LinearMap:
    """φ_s(h, g) = (h / s, g): deformed(cm, 1) -> deformed(cm, s²)"""
    s = _nonzero(s, "phi_map")
    block = Matrix.block_diagonal(Matrix.scalar(cm.h.dim, 1 / s), Matrix.identity(cm.g.dim))
    return LinearMap(deformed(cm, 1), deformed(cm, s * s), block)


def contraction_check_phi(cm: CrossedModule, s: Scalar) -> bool:
    phi = phi_map(cm, s)
    ok, pair = is_homomorphism(phi)
    if not ok:
        logger.debug(f"phi_{s} fails on basis pair {pair} for {cm.name}")
    return ok and phi.is_invertible()


def alt_contraction_map(g: LieAlgebra, t: Scalar) -> LinearMap:
    """(m, g) -> (t·m + g, g) из alt_deformed(identity, t) в g ⊕ g"""
    t = _nonzero(t, "alt_contraction_map")
    n = g.dim
    I = Matrix.identity(n)
    block = Matrix.from_blocks([[I.scale(t), I], [Matrix.zeros(n, n), I]])
    return LinearMap(alt_deformed(identity_crmod(g), t), direct_sum(g, g), block)


def contraction_check_alt(g: LieAlgebra, t: Scalar) -> bool:
    f = alt_contraction_map(g, t)
    return change_basis(f.target, f.matrix).sc == f.source.sc


# ============================================================
# MORPHISMS OF CROSSED MODULES
# ============================================================

@dataclass(frozen=True)
class CrmodMorphism:
    """Пара (φ: h -> h', ψ: g -> g')"""
    phi: LinearMap
    psi: LinearMap

    def to_dict(self) -> Dict:
        return {"phi": self.phi.matrix.to_lists(), "psi": self.psi.matrix.to_lists()}


def check_crmod_morphism(m: CrmodMorphism, cm: CrossedModule, cm2: CrossedModule) -> CheckReport:
    """μ'∘φ = ψ∘μ, φ(g·h) = ψ(g)·φ(h), φ и ψ гомоморфизмы"""
    phi, psi = m.phi.matrix, m.psi.matrix
    if phi.shape != (cm2.h.dim, cm.h.dim) or psi.shape != (cm2.g.dim, cm.g.dim):
        raise DimensionError(f"Morphism {cm.name} -> {cm2.name} has wrong block shapes")
    report = CheckReport(f"{cm.name} -> {cm2.name}")
    for i, j in homomorphism_defects(LinearMap(cm.h, cm2.h, phi)):
        report.add("phi_homomorphism", (i, j))
    for i, j in homomorphism_defects(LinearMap(cm.g, cm2.g, psi)):
        report.add("psi_homomorphism", (i, j))
    left = cm2.mu.matrix.matmul(phi)
    right = psi.matmul(cm.mu.matrix)
    for j in range(cm.h.dim):
        if left.column(j) != right.column(j):
            report.add("square", (j,), "mu'(phi(h)) != psi(mu(h))")
    for i in range(cm.g.dim):
        acting = cm2.action.matrix_of(psi.column(i))
        for j in range(cm.h.dim):
            lhs = phi.apply(cm.action.rho[i].column(j))
            rhs = acting.apply(phi.column(j))
            if lhs != rhs:
                report.add("equivariance", (i, j), "phi(g.h) != psi(g).phi(h)")
    return report


def identity_morphism(cm: CrossedModule) -> CrmodMorphism:
    return CrmodMorphism(LinearMap.identity(cm.h), LinearMap.identity(cm.g))


def universal_morphism(cm: CrossedModule) -> CrmodMorphism:
    """(μ, id_g): cm -> identity_crmod(g)"""
    return CrmodMorphism(LinearMap(cm.h, cm.g, cm.mu.matrix), LinearMap.identity(cm.g))


def inverse_morphism(cm: CrossedModule) -> CrmodMorphism:
    """(id_h, μ⁻¹): cm -> identity_crmod(h), только для обратимого μ"""
    if not cm.mu.is_invertible():
        raise SingularityError(f"{cm.name}: mu is not invertible")
    return CrmodMorphism(LinearMap.identity(cm.h), LinearMap(cm.g, cm.h, inverse(cm.mu.matrix)))


def semidirect_morphism_map(m: CrmodMorphism, cm: CrossedModule, cm2: CrossedModule, t: Scalar = 1) -> LinearMap:
    return LinearMap(deformed(cm, t), deformed(cm2, t), Matrix.block_diagonal(m.phi.matrix, m.psi.matrix))


def pushforward_bracket_check(m: CrmodMorphism, cm: CrossedModule, cm2: CrossedModule) -> bool:
    """Блочное отображение (φ, ψ) переводит скобку [·,·]_1 модуля cm в скобку cm2"""
    ok, pair = is_homomorphism(semidirect_morphism_map(m, cm, cm2))
    if not ok:
        logger.debug(f"Pushforward fails on basis pair {pair}")
    return ok


# ============================================================
# STRUCTURAL ISOMORPHISMS
# ============================================================

def iso_deformed_to_direct(cm: CrossedModule, s: Scalar) -> Optional[LinearMap]:
    """
    Изоморфизм deformed(cm, s²) -> h ⊕ g для инъективного μ с разложением g = μ(h) ⊕ K,
    где K = {k : [k, μ(h)] = 0, ρ(k) = 0}:
        (x, y) -> (a(y) − s·x, y + s·μ(x)),  a(y) = μ⁻¹(μ(h)-компонента y).
    Для обратимого μ это (id_h + μ-перенос) ∘ ψ_s. Иначе None.
    """
    s = parse_rational(s)
    if s == 0:
        logger.warning(f"{cm.name}: iso_deformed_to_direct needs s != 0")
        return None
    h, g = cm.h, cm.g
    if not cm.mu.is_injective():
        logger.warning(f"{cm.name}: mu is not injective, no isomorphism to the direct product")
        return None
    M = image(cm.mu.matrix)
    rows: List[Vector] = []
    for m in M.basis:
        ad = ad_matrix(g, m)
        rows.extend(ad.row(r) for r in range(g.dim))
    for r in range(h.dim):
        for c in range(h.dim):
            rows.append(tuple(rho.entry(r, c) for rho in cm.action.rho))
    K = kernel_of_rows(rows, g.dim)
    if M.dim + K.dim != g.dim or M.intersect(K).dim != 0:
        logger.warning(f"{cm.name}: image of mu has no commuting inert complement")
        return None
    splitting = Matrix.from_columns(list(M.basis) + list(K.basis), rows=g.dim)
    columns: List[Vector] = []
    for a in range(h.dim):
        columns.append(tuple(-s * x for x in unit_vector(h.dim, a)) + tuple(s * x for x in cm.mu.matrix.column(a)))
    for i in range(g.dim):
        coords = solve(splitting, unit_vector(g.dim, i))
        m_part = M.vector(coords[:M.dim])
        preimage = solve(cm.mu.matrix, m_part)
        columns.append(tuple(preimage) + unit_vector(g.dim, i))
    iso = LinearMap(deformed(cm, s * s), direct_sum(h, g), Matrix.from_columns(columns, rows=h.dim + g.dim))
    ok, pair = is_homomorphism(iso)
    if not ok or not iso.is_invertible():
        logger.warning(f"{cm.name}: candidate isomorphism fails on basis pair {pair}")
        return None
    return iso


@dataclass
class SurjectiveModel:
    """Модель deformed(cm, t) на h ⊕ h/ker μ и изоморфизм в неё"""
    model: LieAlgebra
    iso: LinearMap
    verified: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model.to_dict(),
            "iso": self.iso.matrix.to_lists(),
            "verified": self.verified,
        }


def surjective_model(cm: CrossedModule, t: Scalar = 1) -> SurjectiveModel:
    """
    Для сюръективного μ: deformed(quotient_crmod(h, ker μ), t) ≅ deformed(cm, t)
    через блочное отображение (id_h, μ̄), μ̄: h/ker μ -> g.
    """
    if not cm.mu.is_surjective():
        raise ApplicabilityError(f"{cm.name}: mu is not surjective (rank {rank(cm.mu.matrix)} < {cm.g.dim})")
    ker = kernel(cm.mu.matrix)
    if not ker.is_subspace_of(center(cm.h)):
        raise CrossedModuleError(f"{cm.name}: kernel of mu is not central")
    quotient_cm = quotient_crmod(cm.h, ker, name=f"model_{cm.name}")
    model = deformed(quotient_cm, t)
    mu_bar = cm.mu.matrix.matmul(complement_lift(ker))
    iso = LinearMap(model, deformed(cm, t), Matrix.block_diagonal(Matrix.identity(cm.h.dim), mu_bar))
    ok, pair = is_homomorphism(iso)
    verified = ok and iso.is_invertible()
    if not verified:
        logger.warning(f"{cm.name}: surjective model fails on basis pair {pair}")
    return SurjectiveModel(model, iso, verified)
