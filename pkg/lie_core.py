"""
Lie Core - алгебры Ли через структурные константы
Скобки, центр, производные ряды, прямые суммы, факторалгебры, гомоморфизмы,
дифференцирования, центроид и Hom(g/[g,g], Z(g)).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from errors import DimensionError, IdealError, LieDeformError, ParseError
from exact_linalg import (
    Matrix,
    Scalar,
    Subspace,
    Vector,
    ZERO,
    format_rational,
    inverse,
    kernel_of_rows,
    parse_rational,
    rank,
    to_vector,
    unit_vector,
    zero_vector,
)

logger = logging.getLogger(__name__)

Index = Union[int, str]


# ============================================================
# LIE ALGEBRA
# ============================================================

@dataclass(frozen=True)
class LieAlgebra:
    """
    Конечномерная алгебра Ли: [e_i, e_j] = Σ_k sc[(i, j)][k] e_k.
    Хранятся только пары i < j с ненулевым результатом; антисимметрия структурная.
    """
    name: str
    dim: int
    basis_labels: Tuple[str, ...]
    sc: Dict[Tuple[int, int], Vector] = field(default_factory=dict)

    def __post_init__(self):
        labels = tuple(str(label) for label in self.basis_labels)
        if len(labels) != self.dim:
            raise DimensionError(f"{self.name}: {len(labels)} labels for dimension {self.dim}")
        if len(set(labels)) != len(labels):
            raise DimensionError(f"{self.name}: duplicate basis labels {labels}")
        clean: Dict[Tuple[int, int], Vector] = {}
        for (i, j), values in self.sc.items():
            if not 0 <= i < j < self.dim:
                raise DimensionError(f"{self.name}: bracket index pair ({i}, {j}) must satisfy 0 <= i < j < {self.dim}")
            vec = to_vector(values)
            if len(vec) != self.dim:
                raise DimensionError(f"{self.name}: bracket ({i}, {j}) has {len(vec)} coordinates")
            if any(vec):
                clean[(i, j)] = vec
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "sc", dict(sorted(clean.items())))

    @classmethod
    def from_brackets(cls, name: str, labels: Sequence[str],
                      brackets: Mapping[Tuple[Index, Index], Union[Mapping[Index, Scalar], Sequence[Scalar]]]) -> 'LieAlgebra':
        """
        Удобный конструктор: ключи и координаты можно задавать индексами или метками,
        пара (j, i) с j > i переворачивается со сменой знака.
        """
        labels = tuple(labels)
        n = len(labels)
        position = {label: k for k, label in enumerate(labels)}

        def resolve(index: Index) -> int:
            if isinstance(index, str):
                if index not in position:
                    raise DimensionError(f"{name}: unknown basis label '{index}'")
                return position[index]
            return int(index)

        sc: Dict[Tuple[int, int], Vector] = {}
        for (left, right), result in brackets.items():
            i, j = resolve(left), resolve(right)
            if isinstance(result, Mapping):
                vec = [ZERO] * n
                for k, value in result.items():
                    vec[resolve(k)] += parse_rational(value)
                vec = tuple(vec)
            else:
                vec = to_vector(result)
            if i == j:
                if any(vec):
                    raise DimensionError(f"{name}: [{labels[i]}, {labels[i]}] must vanish")
                continue
            if i > j:
                i, j = j, i
                vec = tuple(-a for a in vec)
            if (i, j) in sc:
                raise DimensionError(f"{name}: bracket [{labels[i]}, {labels[j]}] given twice")
            sc[(i, j)] = vec
        return cls(name, n, labels, sc)

    @classmethod
    def abelian(cls, n: int, name: Optional[str] = None, labels: Optional[Sequence[str]] = None) -> 'LieAlgebra':
        labels = tuple(labels) if labels is not None else tuple(f"a{k + 1}" for k in range(n))
        return cls(name or f"abelian({n})", n, labels, {})

    def structure_constant(self, i: int, j: int) -> Vector:
        """[e_i, e_j] с учётом антисимметрии"""
        if i < j:
            return self.sc.get((i, j), zero_vector(self.dim))
        if i > j:
            vec = self.sc.get((j, i))
            return tuple(-a for a in vec) if vec is not None else zero_vector(self.dim)
        return zero_vector(self.dim)

    def renamed(self, name: str) -> 'LieAlgebra':
        return LieAlgebra(name, self.dim, self.basis_labels, self.sc)

    def same_brackets(self, other: 'LieAlgebra') -> bool:
        return self.dim == other.dim and self.sc == other.sc

    def to_dict(self) -> Dict:
        brackets = []
        for (i, j), vec in self.sc.items():
            brackets.append({
                "left": i,
                "right": j,
                "result": {str(k): format_rational(a) for k, a in enumerate(vec) if a},
            })
        return {
            "name": self.name,
            "dim": self.dim,
            "basis": list(self.basis_labels),
            "brackets": brackets,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> 'LieAlgebra':
        try:
            dim = int(data["dim"])
            labels = data.get("basis") or [f"e{k + 1}" for k in range(dim)]
            sc: Dict[Tuple[int, int], Vector] = {}
            for item in data.get("brackets", []):
                i, j = int(item["left"]), int(item["right"])
                if i >= j:
                    raise ParseError(f"Bracket entries need left < right, got ({i}, {j})")
                if (i, j) in sc:
                    raise ParseError(f"Bracket ({i}, {j}) listed twice")
                vec = [ZERO] * dim
                for k, value in item["result"].items():
                    k = int(k)
                    if not 0 <= k < dim:
                        raise ParseError(f"Result index {k} out of range for dimension {dim}")
                    vec[k] = parse_rational(value)
                sc[(i, j)] = tuple(vec)
            return cls(str(data.get("name", "unnamed")), dim, tuple(labels), sc)
        except (KeyError, TypeError, AttributeError) as e:
            raise ParseError(f"Malformed Lie algebra data: {e!r}")
        except DimensionError as e:
            raise ParseError(f"Invalid Lie algebra data: {e}")


# ============================================================
# BRACKETS AND STRUCTURAL SUBSPACES
# ============================================================

def _check_vector(L: LieAlgebra, v: Sequence) -> None:
    if len(v) != L.dim:
        raise DimensionError(f"{L.name}: vector of length {len(v)} for dimension {L.dim}")


def bracket(L: LieAlgebra, u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
    _check_vector(L, u)
    _check_vector(L, v)
    u = to_vector(u)
    v = to_vector(v)
    out = [ZERO] * L.dim
    for (i, j), vec in L.sc.items():
        coef = u[i] * v[j] - u[j] * v[i]
        if coef:
            for k, a in enumerate(vec):
                if a:
                    out[k] += coef * a
    return tuple(out)


def structure_tensor(L: LieAlgebra) -> List[List[Vector]]:
    """Полная таблица T[i][j] = [e_i, e_j]"""
    n = L.dim
    zero = zero_vector(n)
    table = [[zero] * n for _ in range(n)]
    for (i, j), vec in L.sc.items():
        table[i][j] = vec
        table[j][i] = tuple(-a for a in vec)
    return table


def ad_matrix(L: LieAlgebra, x: Sequence[Scalar]) -> Matrix:
    """Матрица ad_x: столбец k равен [x, e_k]"""
    _check_vector(L, x)
    x = to_vector(x)
    n = L.dim
    columns = [[ZERO] * n for _ in range(n)]
    for (i, j), vec in L.sc.items():
        xi, xj = x[i], x[j]
        if not xi and not xj:
            continue
        for k, a in enumerate(vec):
            if a:
                if xi:
                    columns[j][k] += xi * a
                if xj:
                    columns[i][k] -= xj * a
    return Matrix.from_columns(columns, rows=n)


def ad_basis(L: LieAlgebra) -> List[Matrix]:
    return [ad_matrix(L, unit_vector(L.dim, i)) for i in range(L.dim)]


def jacobi_check(L: LieAlgebra) -> List[Tuple[int, int, int]]:
    """Тройки i < j < k с ненулевым якобиатором"""
    n = L.dim
    table = structure_tensor(L)

    def with_basis(vec: Vector, k: int) -> List[Fraction]:
        acc = [ZERO] * n
        for m, a in enumerate(vec):
            if a:
                for l, b in enumerate(table[m][k]):
                    if b:
                        acc[l] += a * b
        return acc

    violations = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                first = with_basis(table[i][j], k)
                second = with_basis(table[j][k], i)
                third = with_basis(table[k][i], j)
                if any(a + b + c for a, b, c in zip(first, second, third)):
                    violations.append((i, j, k))
    if violations:
        logger.debug(f"{L.name}: {len(violations)} Jacobi violations")
    return violations


def center(L: LieAlgebra) -> Subspace:
    rows: List[Vector] = []
    for ad in ad_basis(L):
        rows.extend(ad.row(r) for r in range(ad.rows))
    return kernel_of_rows(rows, L.dim)


def bracket_span(L: LieAlgebra, A: Subspace, B: Subspace) -> Subspace:
    if A.ambient_dim != L.dim or B.ambient_dim != L.dim:
        raise DimensionError(f"{L.name}: subspaces must live in the {L.dim}-dimensional algebra")
    vectors = [bracket(L, a, b) for a in A.basis for b in B.basis]
    return Subspace.span(L.dim, vectors)


def derived_subalgebra(L: LieAlgebra) -> Subspace:
    return Subspace.span(L.dim, list(L.sc.values()))


def derived_series(L: LieAlgebra) -> List[Subspace]:
    """L, [L,L], ... до нуля или до стабилизации (повтор не дублируется)"""
    series = [Subspace.full(L.dim)]
    while series[-1].dim > 0:
        current = series[-1]
        following = bracket_span(L, current, current)
        if following == current:
            break
        series.append(following)
    return series


def lower_central_series(L: LieAlgebra) -> List[Subspace]:
    full = Subspace.full(L.dim)
    series = [full]
    while series[-1].dim > 0:
        following = bracket_span(L, full, series[-1])
        if following == series[-1]:
            break
        series.append(following)
    return series


def is_solvable(L: LieAlgebra) -> bool:
    return derived_series(L)[-1].dim == 0


def is_nilpotent(L: LieAlgebra) -> bool:
    return lower_central_series(L)[-1].dim == 0


def is_abelian(L: LieAlgebra) -> bool:
    return not L.sc


def killing_form(L: LieAlgebra) -> Matrix:
    ads = ad_basis(L)
    n = L.dim
    return Matrix.from_rows([[ads[i].matmul(ads[j]).trace() for j in range(n)] for i in range(n)], cols=n)


# ============================================================
# CONSTRUCTIONS
# ============================================================

def pair_labels(first: Sequence[str], second: Sequence[str]) -> Tuple[str, ...]:
    """Метки блочного базиса; при совпадении добавляются суффиксы _1 и _2"""
    first, second = list(first), list(second)
    if set(first) & set(second):
        first = [f"{label}_1" for label in first]
        second = [f"{label}_2" for label in second]
    return tuple(first + second)


def direct_sum(A: LieAlgebra, B: LieAlgebra, name: Optional[str] = None) -> LieAlgebra:
    p, q = A.dim, B.dim
    sc: Dict[Tuple[int, int], Vector] = {}
    pad_b = zero_vector(q)
    pad_a = zero_vector(p)
    for (i, j), vec in A.sc.items():
        sc[(i, j)] = tuple(vec) + pad_b
    for (i, j), vec in B.sc.items():
        sc[(p + i, p + j)] = pad_a + tuple(vec)
    return LieAlgebra(name or f"{A.name}+{B.name}", p + q, pair_labels(A.basis_labels, B.basis_labels), sc)


def is_ideal(L: LieAlgebra, I: Subspace) -> bool:
    for i in range(L.dim):
        e = unit_vector(L.dim, i)
        for b in I.basis:
            if not I.contains(bracket(L, e, b)):
                return False
    return True


def _labels_for(L: LieAlgebra, vectors: Sequence[Vector]) -> Tuple[str, ...]:
    labels = []
    for idx, v in enumerate(vectors):
        support = [k for k, a in enumerate(v) if a]
        if len(support) == 1 and v[support[0]] == 1:
            labels.append(L.basis_labels[support[0]])
        else:
            labels.append(f"v{idx + 1}")
    if len(set(labels)) != len(labels):
        labels = [f"v{idx + 1}" for idx in range(len(vectors))]
    return tuple(labels)


def subalgebra(L: LieAlgebra, S: Subspace, name: Optional[str] = None) -> Tuple[LieAlgebra, Matrix]:
    """Подалгебра на каноническом базисе S и матрица вложения (L.dim x dim S)"""
    if S.ambient_dim != L.dim:
        raise DimensionError(f"{L.name}: subspace of {S.ambient_dim}-space")
    basis = S.basis
    s = len(basis)
    sc: Dict[Tuple[int, int], Vector] = {}
    for a in range(s):
        for b in range(a + 1, s):
            coords = S.coordinates(bracket(L, basis[a], basis[b]))
            if coords is None:
                raise IdealError(f"{L.name}: subspace is not closed under the bracket")
            sc[(a, b)] = coords
    sub = LieAlgebra(name or f"sub({L.name})", s, _labels_for(L, basis), sc)
    return sub, Matrix.from_columns(list(basis), rows=L.dim)


def quotient(L: LieAlgebra, I: Subspace, name: Optional[str] = None) -> Tuple['LieAlgebra', 'LinearMap']:
    """
    L / I на жадном дополнении стандартными векторами. Возвращает алгебру и проекцию.
    """
    if I.ambient_dim != L.dim:
        raise DimensionError(f"{L.name}: ideal lives in {I.ambient_dim}-space")
    if not is_ideal(L, I):
        raise IdealError(f"{L.name}: subspace is not an ideal")
    n = L.dim
    complement = I.complement_indices()
    projection = _complement_projection(I, complement)
    q = len(complement)
    sc: Dict[Tuple[int, int], Vector] = {}
    for a in range(q):
        for b in range(a + 1, q):
            sc[(a, b)] = projection.apply(L.structure_constant(complement[a], complement[b]))
    labels = tuple(L.basis_labels[c] for c in complement)
    Q = LieAlgebra(name or f"{L.name}/I", q, labels, sc)
    logger.debug(f"Quotient {L.name} by {I.dim}-dim ideal -> dim {q}")
    return Q, LinearMap(L, Q, projection)


def _complement_projection(I: Subspace, complement: Sequence[int]) -> Matrix:
    n = I.ambient_dim
    columns = list(I.basis) + [unit_vector(n, c) for c in complement]
    inv = inverse(Matrix.from_columns(columns, rows=n))
    r = I.dim
    return Matrix.from_rows([inv.row(i) for i in range(r, n)], cols=n)


def complement_lift(I: Subspace) -> Matrix:
    """Подъём L/I -> L: столбцы задают стандартные векторы дополнения"""
    complement = I.complement_indices()
    return Matrix.from_columns([unit_vector(I.ambient_dim, c) for c in complement], rows=I.ambient_dim)


def change_basis(L: LieAlgebra, P: Matrix, name: Optional[str] = None) -> LieAlgebra:
    """Структурные константы в базисе f_a = P e_a (столбцы P)"""
    if P.shape != (L.dim, L.dim):
        raise DimensionError(f"{L.name}: change of basis needs a {L.dim}x{L.dim} matrix")
    P_inv = inverse(P)
    columns = P.columns()
    sc: Dict[Tuple[int, int], Vector] = {}
    for a in range(L.dim):
        for b in range(a + 1, L.dim):
            sc[(a, b)] = P_inv.apply(bracket(L, columns[a], columns[b]))
    return LieAlgebra(name or L.name, L.dim, L.basis_labels, sc)


# ============================================================
# LINEAR MAPS
# ============================================================

@dataclass(frozen=True)
class LinearMap:
    """Линейное отображение source -> target, матрица target.dim x source.dim"""
    source: LieAlgebra
    target: LieAlgebra
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise DimensionError(
                f"Map {self.source.name} -> {self.target.name} needs a "
                f"{self.target.dim}x{self.source.dim} matrix, got {self.matrix.shape}"
            )

    @classmethod
    def identity(cls, L: LieAlgebra) -> 'LinearMap':
        return cls(L, L, Matrix.identity(L.dim))

    def apply(self, v: Sequence[Scalar]) -> Vector:
        return self.matrix.apply(to_vector(v))

    def compose(self, inner: 'LinearMap') -> 'LinearMap':
        """self ∘ inner"""
        if inner.target.dim != self.source.dim:
            raise DimensionError(f"Cannot compose {self.source.name} <- {inner.target.name}")
        return LinearMap(inner.source, self.target, self.matrix.matmul(inner.matrix))

    def is_injective(self) -> bool:
        return rank(self.matrix) == self.source.dim

    def is_surjective(self) -> bool:
        return rank(self.matrix) == self.target.dim

    def is_invertible(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective()

    def inverse(self) -> 'LinearMap':
        return LinearMap(self.target, self.source, inverse(self.matrix))


def homomorphism_defects(f: LinearMap) -> Iterator[Tuple[int, int]]:
    """Пары i < j, на которых f[e_i, e_j] != [f e_i, f e_j]"""
    images = f.matrix.columns()
    n = f.source.dim
    for i in range(n):
        for j in range(i + 1, n):
            lhs = f.matrix.apply(f.source.structure_constant(i, j))
            rhs = bracket(f.target, images[i], images[j])
            if lhs != rhs:
                yield (i, j)


def is_homomorphism(f: LinearMap) -> Tuple[bool, Optional[Tuple[int, int]]]:
    first = next(homomorphism_defects(f), None)
    return first is None, first


# ============================================================
# DERIVATIONS, CENTROID, Hom(g/[g,g], Z(g))
# ============================================================

def _unknown(n: int, r: int, c: int) -> int:
    # матрица n x n развёрнута построчно
    return r * n + c


def _densify(sparse_rows: List[Dict[int, Fraction]], ncols: int) -> List[List[Fraction]]:
    dense = []
    for sparse in sparse_rows:
        row = [ZERO] * ncols
        for col, value in sparse.items():
            row[col] = value
        dense.append(row)
    return dense


def matrices_of(S: Subspace, rows: int, cols: int) -> List[Matrix]:
    return [Matrix.from_flat(rows, cols, v) for v in S.basis]


def matrix_span(matrices: Sequence[Matrix], rows: int, cols: int) -> Subspace:
    return Subspace.span(rows * cols, [m.flatten() for m in matrices])


@dataclass(frozen=True)
class DerivationSpace:
    """Der(L): базис из канонизированных (RREF) развёрнутых матриц"""
    algebra: LieAlgebra
    subspace: Subspace
    basis: Tuple[Matrix, ...] = ()

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def contains(self, D: Matrix) -> bool:
        return self.subspace.contains(D.flatten())


def derivations(L: LieAlgebra) -> DerivationSpace:
    n = L.dim
    table = structure_tensor(L)
    equations: List[Dict[int, Fraction]] = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                eq: Dict[int, Fraction] = {}

                def add(col: int, value: Fraction):
                    eq[col] = eq.get(col, ZERO) + value

                for m, a in enumerate(table[i][j]):
                    if a:
                        add(_unknown(n, k, m), a)
                for m in range(n):
                    a = table[m][j][k]
                    if a:
                        add(_unknown(n, m, i), -a)
                    b = table[i][m][k]
                    if b:
                        add(_unknown(n, m, j), -b)
                eq = {col: value for col, value in eq.items() if value}
                if eq:
                    equations.append(eq)
    S = kernel_of_rows(_densify(equations, n * n), n * n)
    logger.debug(f"Der({L.name}): {len(equations)} equations, dim {S.dim}")
    return DerivationSpace(L, S, tuple(matrices_of(S, n, n)))


def is_derivation(L: LieAlgebra, D: Matrix) -> bool:
    if D.shape != (L.dim, L.dim):
        raise DimensionError(f"{L.name}: derivation must be {L.dim}x{L.dim}")
    images = D.columns()
    n = L.dim
    for i in range(n):
        for j in range(i + 1, n):
            lhs = D.apply(L.structure_constant(i, j))
            rhs = [a + b for a, b in zip(bracket(L, images[i], unit_vector(n, j)),
                                         bracket(L, unit_vector(n, i), images[j]))]
            if list(lhs) != rhs:
                return False
    return True


def _matrix_label(D: Matrix, index: int) -> str:
    nonzero = [(k, a) for k, a in enumerate(D.entries) if a]
    if len(nonzero) == 1 and nonzero[0][1] == 1:
        r, c = divmod(nonzero[0][0], D.cols)
        if D.rows < 10:
            return f"E{r + 1}{c + 1}"
        return f"E{r + 1}_{c + 1}"
    return f"D{index + 1}"


def derivations_as_algebra(L: LieAlgebra) -> Tuple[LieAlgebra, List[Matrix]]:
    """Der(L) как абстрактная алгебра Ли + точная матричная реализация её базиса"""
    space = derivations(L)
    basis = list(space.basis)
    sc: Dict[Tuple[int, int], Vector] = {}
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            coords = space.subspace.coordinates(basis[a].commutator(basis[b]).flatten())
            if coords is None:
                raise LieDeformError(f"Der({L.name}) is not closed under the commutator")
            sc[(a, b)] = coords
    labels = [_matrix_label(D, k) for k, D in enumerate(basis)]
    if len(set(labels)) != len(labels):
        labels = [f"D{k + 1}" for k in range(len(basis))]
    return LieAlgebra(f"Der({L.name})", len(basis), tuple(labels), sc), basis


def inner_derivations(L: LieAlgebra) -> Subspace:
    return matrix_span(ad_basis(L), L.dim, L.dim)


def centroid(L: LieAlgebra) -> Subspace:
    """φ[e_i, e_j] = [e_i, φ e_j] по всем упорядоченным парам, включая i = j"""
    n = L.dim
    table = structure_tensor(L)
    equations: List[Dict[int, Fraction]] = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                eq: Dict[int, Fraction] = {}
                for m, a in enumerate(table[i][j]):
                    if a:
                        col = _unknown(n, k, m)
                        eq[col] = eq.get(col, ZERO) + a
                for m in range(n):
                    b = table[i][m][k]
                    if b:
                        col = _unknown(n, m, j)
                        eq[col] = eq.get(col, ZERO) - b
                eq = {col: value for col, value in eq.items() if value}
                if eq:
                    equations.append(eq)
    return kernel_of_rows(_densify(equations, n * n), n * n)


def hom_ab_center(L: LieAlgebra) -> Subspace:
    """Отображения, зануляющиеся на [L, L] и со значениями в Z(L)"""
    n = L.dim
    table = structure_tensor(L)
    equations: List[Dict[int, Fraction]] = []
    for b in derived_subalgebra(L).basis:
        for k in range(n):
            eq = {_unknown(n, k, m): a for m, a in enumerate(b) if a}
            if eq:
                equations.append(eq)
    for i in range(n):
        for col_index in range(n):
            for l in range(n):
                eq = {}
                for m in range(n):
                    a = table[i][m][l]
                    if a:
                        eq[_unknown(n, m, col_index)] = a
                if eq:
                    equations.append(eq)
    return kernel_of_rows(_densify(equations, n * n), n * n)


def derivation_kernel_intersection(L: LieAlgebra) -> Subspace:
    """∩ ker D по всем D из Der(L)"""
    rows: List[Vector] = []
    for D in derivations(L).basis:
        rows.extend(D.row(r) for r in range(D.rows))
    return kernel_of_rows(rows, L.dim)
