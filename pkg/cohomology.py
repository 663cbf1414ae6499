"""
Cohomology - комплекс Шевалле–Эйленберга в степенях 0..3
Модули, коцепи на возрастающих кортежах индексов, дифференциал, Z^k, B^k, H^k,
канонический коцикл скрещенного модуля, проверка кограницы и перенос коцепей.

Соглашение о знаках:
    dα(x_0..x_k) = Σ_i (−1)^i ρ(x_i) α(..x̂_i..) + Σ_{i<j} (−1)^{i+j} α([x_i, x_j], ..x̂_i..x̂_j..)
В степени 1: dα(x, y) = x·α(y) − y·α(x) − α([x, y]).
"""

import logging
import os
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from errors import DegreeError, DimensionError, PreconditionError
from exact_linalg import (
    Matrix,
    Scalar,
    Subspace,
    Vector,
    ZERO,
    determinant,
    image,
    kernel,
    parse_rational,
    solve,
    to_vector,
    unit_vector,
    zero_vector,
)
from lie_core import LieAlgebra, LinearMap, ad_basis, is_homomorphism
from products import CrossedModule, identity_crmod, semidirect

logger = logging.getLogger(__name__)

MAX_DEGREE = 3
DEFAULT_SEED = int(os.getenv("LIEDEFORM_SEED", "20240601"))


# ============================================================
# MODULES
# ============================================================

@dataclass(frozen=True)
class Module:
    """Модуль над алгеброй Ли: по матрице ρ(e_i) на образующую"""
    algebra: LieAlgebra
    dim: int
    rho: Tuple[Matrix, ...]
    name: str = "module"

    def __post_init__(self):
        rho = tuple(self.rho)
        if len(rho) != self.algebra.dim:
            raise DimensionError(f"Module {self.name}: {len(rho)} matrices for {self.algebra.name}")
        for m in rho:
            if m.shape != (self.dim, self.dim):
                raise DimensionError(f"Module {self.name}: matrix of shape {m.shape}, expected {self.dim}x{self.dim}")
        object.__setattr__(self, "rho", rho)

    def matrix_of(self, x: Sequence[Scalar]) -> Matrix:
        result = Matrix.zeros(self.dim, self.dim)
        for coef, m in zip(x, self.rho):
            coef = parse_rational(coef)
            if coef:
                result = result + m.scale(coef)
        return result


def adjoint_module(L: LieAlgebra) -> Module:
    return Module(L, L.dim, tuple(ad_basis(L)), name="adjoint")


def trivial_module(L: LieAlgebra, dim: int = 1) -> Module:
    return Module(L, dim, tuple(Matrix.zeros(dim, dim) for _ in range(L.dim)), name="trivial")


def pullback_module(psi: LinearMap, M: Module) -> Module:
    """(M)^ψ: модуль над psi.source, x действует как ψ(x)"""
    if psi.target.dim != M.algebra.dim:
        raise DimensionError(f"Cannot pull back a module over {M.algebra.name} along a map into {psi.target.name}")
    rho = tuple(M.matrix_of(column) for column in psi.matrix.columns())
    return Module(psi.source, M.dim, rho, name=f"{M.name}^psi")


def projection_module(cm: CrossedModule) -> Module:
    """g как модуль над h ⋊ g через проекцию на g-блок"""
    S = semidirect(cm)
    p, q = cm.h.dim, cm.g.dim
    projection = Matrix.from_blocks([[Matrix.zeros(q, p), Matrix.identity(q)]])
    return pullback_module(LinearMap(S, cm.g, projection), adjoint_module(cm.g))


# ============================================================
# COCHAINS
# ============================================================

def _sort_sign(indices: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Знак сортирующей перестановки; 0 при повторе индексов"""
    items = tuple(indices)
    ordered = tuple(sorted(items))
    if len(set(items)) != len(items):
        return 0, ordered
    inversions = sum(1 for i in range(len(items)) for j in range(i + 1, len(items)) if items[i] > items[j])
    return (-1 if inversions % 2 else 1), ordered


def cochain_basis(n: int, k: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(n), k))


@dataclass(frozen=True)
class Cochain:
    """
    Кососимметричная k-коцепь; хранится только на строго возрастающих кортежах
    (нулевые значения не хранятся).
    """
    degree: int
    algebra: LieAlgebra
    module: Module
    coeffs: Dict[Tuple[int, ...], Vector] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= MAX_DEGREE:
            raise DegreeError(f"Cochains of degree {self.degree} are not supported")
        if self.module.algebra.dim != self.algebra.dim:
            raise DimensionError("Module and cochain live over different algebras")
        clean: Dict[Tuple[int, ...], Vector] = {}
        for key, value in self.coeffs.items():
            key = tuple(key)
            if len(key) != self.degree or any(a >= b for a, b in zip(key, key[1:])):
                raise DimensionError(f"Cochain key {key} is not an increasing {self.degree}-tuple")
            if any(not 0 <= i < self.algebra.dim for i in key):
                raise DimensionError(f"Cochain key {key} out of range")
            vec = to_vector(value)
            if len(vec) != self.module.dim:
                raise DimensionError(f"Cochain value of length {len(vec)} in a {self.module.dim}-dim module")
            if any(vec):
                clean[key] = vec
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def zero(cls, L: LieAlgebra, M: Module, k: int) -> 'Cochain':
        return cls(k, L, M, {})

    @classmethod
    def from_vector(cls, L: LieAlgebra, M: Module, k: int, values: Sequence[Scalar]) -> 'Cochain':
        tuples = cochain_basis(L.dim, k)
        if len(values) != len(tuples) * M.dim:
            raise DimensionError(f"C^{k} has dimension {len(tuples) * M.dim}, got {len(values)} values")
        values = to_vector(values)
        coeffs = {}
        for idx, key in enumerate(tuples):
            coeffs[key] = values[idx * M.dim:(idx + 1) * M.dim]
        return cls(k, L, M, coeffs)

    def to_vector(self) -> Vector:
        out: List[Fraction] = []
        zero = zero_vector(self.module.dim)
        for key in cochain_basis(self.algebra.dim, self.degree):
            out.extend(self.coeffs.get(key, zero))
        return tuple(out)

    def evaluate_basis(self, indices: Sequence[int]) -> Vector:
        if len(indices) != self.degree:
            raise DimensionError(f"Degree-{self.degree} cochain evaluated on {len(indices)} arguments")
        sign, key = _sort_sign(indices)
        value = self.coeffs.get(key) if sign else None
        if value is None:
            return zero_vector(self.module.dim)
        return value if sign > 0 else tuple(-a for a in value)

    def evaluate(self, *vectors: Sequence[Scalar]) -> Vector:
        """Полилинейное значение на произвольных векторах"""
        if len(vectors) != self.degree:
            raise DimensionError(f"Degree-{self.degree} cochain evaluated on {len(vectors)} arguments")
        xs = [to_vector(v) for v in vectors]
        out = [ZERO] * self.module.dim
        for key, value in self.coeffs.items():
            if self.degree:
                coef = determinant(Matrix.from_rows([[x[t] for t in key] for x in xs], cols=self.degree))
            else:
                coef = Fraction(1)
            if coef:
                for r, a in enumerate(value):
                    if a:
                        out[r] += coef * a
        return tuple(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def add(self, other: 'Cochain') -> 'Cochain':
        self._check_compatible(other)
        coeffs = dict(self.coeffs)
        for key, value in other.coeffs.items():
            base = coeffs.get(key, zero_vector(self.module.dim))
            coeffs[key] = tuple(a + b for a, b in zip(base, value))
        return Cochain(self.degree, self.algebra, self.module, coeffs)

    def scale(self, s: Scalar) -> 'Cochain':
        s = parse_rational(s)
        return Cochain(self.degree, self.algebra, self.module,
                       {key: tuple(s * a for a in value) for key, value in self.coeffs.items()})

    def _check_compatible(self, other: 'Cochain'):
        if self.degree != other.degree or self.algebra.dim != other.algebra.dim or self.module.dim != other.module.dim:
            raise DimensionError("Cochains of different shapes")


# ============================================================
# DIFFERENTIAL
# ============================================================

def _check_degree(k: int, upper: int):
    if not 0 <= k <= upper:
        raise DegreeError(f"Degree {k} outside the supported range 0..{upper}")


def differential(c: Cochain) -> Cochain:
    """Прямое вычисление dc на всех возрастающих (k+1)-кортежах"""
    k = c.degree
    _check_degree(k, MAX_DEGREE - 1)
    L, M = c.algebra, c.module
    coeffs: Dict[Tuple[int, ...], Vector] = {}
    for S in cochain_basis(L.dim, k + 1):
        acc = [ZERO] * M.dim
        for i in range(k + 1):
            rest = S[:i] + S[i + 1:]
            value = c.evaluate_basis(rest)
            if any(value):
                moved = M.rho[S[i]].apply(value)
                sign = 1 if i % 2 == 0 else -1
                for r, a in enumerate(moved):
                    if a:
                        acc[r] += sign * a
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                br = L.structure_constant(S[i], S[j])
                rest = tuple(S[m] for m in range(k + 1) if m != i and m != j)
                sign = 1 if (i + j) % 2 == 0 else -1
                for m, a in enumerate(br):
                    if a:
                        value = c.evaluate_basis((m,) + rest)
                        for r, b in enumerate(value):
                            if b:
                                acc[r] += sign * a * b
        if any(acc):
            coeffs[S] = tuple(acc)
    return Cochain(k + 1, L, M, coeffs)


def differential_matrix(L: LieAlgebra, M: Module, k: int) -> Matrix:
    """
    Матрица d: C^k -> C^(k+1) в развёртке (кортежи лексикографически,
    координаты модуля быстрее всего).
    """
    _check_degree(k, MAX_DEGREE - 1)
    n, dm = L.dim, M.dim
    source = cochain_basis(n, k)
    target = cochain_basis(n, k + 1)
    column_of = {key: idx for idx, key in enumerate(source)}
    rows = [[ZERO] * (len(source) * dm) for _ in range(len(target) * dm)]
    for s_idx, S in enumerate(target):
        base_row = s_idx * dm
        for i in range(k + 1):
            T = S[:i] + S[i + 1:]
            base_col = column_of[T] * dm
            rho = M.rho[S[i]]
            sign = 1 if i % 2 == 0 else -1
            for r in range(dm):
                for c in range(dm):
                    a = rho.entry(r, c)
                    if a:
                        rows[base_row + r][base_col + c] += sign * a
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                br = L.structure_constant(S[i], S[j])
                rest = tuple(S[m] for m in range(k + 1) if m != i and m != j)
                sign = 1 if (i + j) % 2 == 0 else -1
                for m, a in enumerate(br):
                    if not a:
                        continue
                    perm_sign, T = _sort_sign((m,) + rest)
                    if not perm_sign:
                        continue
                    base_col = column_of[T] * dm
                    for r in range(dm):
                        rows[base_row + r][base_col + r] += sign * perm_sign * a
    logger.debug(f"d^{k} on {L.name}: {len(target) * dm} x {len(source) * dm}")
    return Matrix.from_rows(rows, cols=len(source) * dm)


def cochain_dim(L: LieAlgebra, M: Module, k: int) -> int:
    return len(cochain_basis(L.dim, k)) * M.dim


def cocycle_space(L: LieAlgebra, M: Module, k: int) -> Subspace:
    _check_degree(k, 2)
    return kernel(differential_matrix(L, M, k))


def coboundary_space(L: LieAlgebra, M: Module, k: int) -> Subspace:
    _check_degree(k, 2)
    if k == 0:
        return Subspace.zero(M.dim)
    return image(differential_matrix(L, M, k - 1))


def cohomology_dim(L: LieAlgebra, M: Module, k: int) -> int:
    return cocycle_space(L, M, k).dim - coboundary_space(L, M, k).dim


def cohomology_report(L: LieAlgebra, M: Module, module_label: Optional[str] = None,
                      degrees: Sequence[int] = (0, 1, 2)) -> Dict:
    """Отчёт {"algebra", "module", "dims", "Z", "B"}"""
    report = {"algebra": L.name, "module": module_label or M.name, "dims": {}, "Z": {}, "B": {}}
    for k in degrees:
        Z = cocycle_space(L, M, k)
        B = coboundary_space(L, M, k)
        report["dims"][f"H{k}"] = Z.dim - B.dim
        report["Z"][f"Z{k}"] = Z.dim
        report["B"][f"B{k}"] = B.dim
    return report


# ============================================================
# CANONICAL COCYCLES
# ============================================================

def canonical_cocycle(cm: CrossedModule) -> Cochain:
    """c((h, g), (h', g')) = (0, μ([h, h'])) на h ⋊ g со значениями в присоединённом модуле"""
    S = semidirect(cm)
    p = cm.h.dim
    pad = zero_vector(p)
    coeffs = {}
    for (a, b), vec in cm.h.sc.items():
        coeffs[(a, b)] = pad + cm.mu.apply(vec)
    return Cochain(2, S, adjoint_module(S), coeffs)


def canonical_cocycle_g_valued(cm: CrossedModule) -> Cochain:
    """Тот же коцикл со значениями в g (модуль через проекцию h ⋊ g -> g)"""
    M = projection_module(cm)
    coeffs = {(a, b): cm.mu.apply(vec) for (a, b), vec in cm.h.sc.items()}
    return Cochain(2, M.algebra, M, coeffs)


class Block(Enum):
    """Блок координат g ⋊ g"""
    MODULE = "module"
    ALGEBRA = "algebra"


def _offset(block: Block, n: int) -> int:
    return 0 if block is Block.MODULE else n


def bracket_cochain(g: LieAlgebra, source: Block, target: Block) -> Cochain:
    """
    2-коцепь на g ⋊ g: скобка аргументов из блока source, помещённая в блок target.
    (MODULE, ALGEBRA) даёт канонический коцикл, (MODULE, MODULE) даёт ([m, m'], 0).
    """
    S = semidirect(identity_crmod(g))
    n = g.dim
    s_off, t_off = _offset(source, n), _offset(target, n)
    coeffs = {}
    for (a, b), vec in g.sc.items():
        value = [ZERO] * (2 * n)
        value[t_off:t_off + n] = vec
        coeffs[(s_off + a, s_off + b)] = tuple(value)
    return Cochain(2, S, adjoint_module(S), coeffs)


def tilde_cocycle(g: LieAlgebra) -> Cochain:
    return bracket_cochain(g, Block.MODULE, Block.MODULE)


def _block_move_cochain(g: LieAlgebra, source: Block, target: Block) -> Cochain:
    S = semidirect(identity_crmod(g))
    n = g.dim
    s_off, t_off = _offset(source, n), _offset(target, n)
    coeffs = {(s_off + i,): unit_vector(2 * n, t_off + i) for i in range(n)}
    return Cochain(1, S, adjoint_module(S), coeffs)


def module_projection_cochain(g: LieAlgebra) -> Cochain:
    """α(m, g) = (0, m); d(α/2) = ([m, m'], 0)"""
    return _block_move_cochain(g, Block.MODULE, Block.ALGEBRA)


def algebra_projection_cochain(g: LieAlgebra) -> Cochain:
    """α(m, g) = (g, 0); dα = ([g, g'], 0)"""
    return _block_move_cochain(g, Block.ALGEBRA, Block.MODULE)


def linear_deformation(c: Cochain, t: Scalar) -> LieAlgebra:
    """Структурные константы [x, y] + t·c(x, y) для 2-коцепи с присоединёнными значениями"""
    if c.degree != 2:
        raise DegreeError(f"Linear deformation needs a 2-cochain, got degree {c.degree}")
    L = c.algebra
    if c.module.dim != L.dim:
        raise DimensionError("Linear deformation needs values in the algebra itself")
    t = parse_rational(t)
    sc = dict(L.sc)
    for key, value in c.coeffs.items():
        base = sc.get(key, zero_vector(L.dim))
        sc[key] = tuple(a + t * b for a, b in zip(base, value))
    return LieAlgebra(f"{L.name}+{t}c", L.dim, L.basis_labels, sc)


# ============================================================
# COBOUNDARIES AND TRANSPORT
# ============================================================

def is_coboundary(c: Cochain) -> Optional[Cochain]:
    """Первообразная α с dα = c или None; c обязан быть коциклом"""
    if c.degree == 0:
        raise DegreeError("0-cochains are never coboundaries")
    if c.degree > 2:
        raise DegreeError(f"Coboundary test supports degrees 1..2, got {c.degree}")
    if not differential(c).is_zero():
        raise PreconditionError("is_coboundary needs a cocycle")
    L, M = c.algebra, c.module
    if c.is_zero():
        return Cochain.zero(L, M, c.degree - 1)
    solution = solve(differential_matrix(L, M, c.degree - 1), c.to_vector())
    if solution is None:
        logger.debug(f"Cocycle on {L.name} is not a coboundary")
        return None
    return Cochain.from_vector(L, M, c.degree - 1, solution)


def pullback(psi: LinearMap, c: Cochain) -> Cochain:
    """(ψ*c)(x_1..x_k) = c(ψ x_1, .., ψ x_k) со значениями в (M)^ψ"""
    ok, pair = is_homomorphism(psi)
    if not ok:
        raise PreconditionError(f"pullback needs a homomorphism (fails on basis pair {pair})")
    if psi.target.dim != c.algebra.dim:
        raise DimensionError(f"Map into {psi.target.name} cannot pull back a cochain on {c.algebra.name}")
    module = pullback_module(psi, c.module)
    images = psi.matrix.columns()
    coeffs = {}
    for key in cochain_basis(psi.source.dim, c.degree):
        coeffs[key] = c.evaluate(*[images[i] for i in key])
    return Cochain(c.degree, psi.source, module, coeffs)


def push_values(f: Matrix, c: Cochain, target: Module) -> Cochain:
    """f ∘ c: значения переносятся линейным отображением модулей"""
    if f.shape != (target.dim, c.module.dim):
        raise DimensionError(f"Value map of shape {f.shape} between modules of dims {c.module.dim}, {target.dim}")
    return Cochain(c.degree, c.algebra, target, {key: f.apply(value) for key, value in c.coeffs.items()})


def random_cochain(L: LieAlgebra, M: Module, k: int, rng: Optional[random.Random] = None,
                   bound: int = 2) -> Cochain:
    """Псевдослучайная коцепь с целыми коэффициентами из [−bound, bound]"""
    rng = rng or random.Random(DEFAULT_SEED)
    values = [Fraction(rng.randint(-bound, bound)) for _ in range(cochain_dim(L, M, k))]
    return Cochain.from_vector(L, M, k, values)
