"""
Exact Linear Algebra - точная линейная алгебра над рациональными числами
Матрицы, приведённый ступенчатый вид (RREF), ядра, решения систем и подпространства
в канонической форме. Никакой плавающей точки: все сравнения точные.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from errors import DimensionError, ParseError, SingularityError

logger = logging.getLogger(__name__)

Rational = Fraction
Vector = Tuple[Fraction, ...]
Scalar = Union[int, Fraction, str]

ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


# ============================================================
# RATIONALS AND VECTORS
# ============================================================

def parse_rational(value: Scalar) -> Fraction:
    """Разбор "p/q", "p", int или Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"Not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL_RE.match(value)
        if not match:
            raise ParseError(f"Not a rational: '{value}'")
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) else 1
        if denominator == 0:
            raise ParseError(f"Zero denominator in '{value}'")
        return Fraction(numerator, denominator)
    raise ParseError(f"Not a rational: {value!r}")


def format_rational(value: Scalar) -> str:
    return str(parse_rational(value))


def to_vector(values: Iterable[Scalar]) -> Vector:
    return tuple(parse_rational(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, index: int) -> Vector:
    if not 0 <= index < n:
        raise DimensionError(f"Unit vector index {index} out of range for dimension {n}")
    return tuple(ONE if i == index else ZERO for i in range(n))


def _check_same_length(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionError(f"Vector length mismatch: {len(u)} vs {len(v)}")


def vec_add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    _check_same_length(u, v)
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    _check_same_length(u, v)
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(s: Scalar, v: Sequence[Fraction]) -> Vector:
    s = parse_rational(s)
    return tuple(s * a for a in v)


def vec_is_zero(v: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in v)


def lin_comb(coeffs: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]], n: int) -> Vector:
    """Σ coeffs[i] * vectors[i] в пространстве размерности n"""
    if len(coeffs) != len(vectors):
        raise DimensionError(f"{len(coeffs)} coefficients for {len(vectors)} vectors")
    out = [ZERO] * n
    for c, v in zip(coeffs, vectors):
        if c == 0:
            continue
        if len(v) != n:
            raise DimensionError(f"Vector of length {len(v)} in a {n}-dimensional combination")
        for j, a in enumerate(v):
            if a:
                out[j] += c * a
    return tuple(out)


# ============================================================
# MATRIX
# ============================================================

@dataclass(frozen=True)
class Matrix:
    """Плотная матрица с рациональными элементами (построчно)"""
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError(f"Negative matrix shape {self.rows}x{self.cols}")
        entries = tuple(x if type(x) is Fraction else parse_rational(x) for x in self.entries)
        if len(entries) != self.rows * self.cols:
            raise DimensionError(
                f"Matrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> 'Matrix':
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else (cols or 0)
        if cols is not None and n_rows and n_cols != cols:
            raise DimensionError(f"Expected {cols} columns, got {n_cols}")
        flat: List[Fraction] = []
        for row in rows:
            if len(row) != n_cols:
                raise DimensionError(f"Ragged matrix rows: {len(row)} vs {n_cols}")
            flat.extend(row)
        return cls(n_rows, n_cols, tuple(flat))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Scalar]], rows: Optional[int] = None) -> 'Matrix':
        n_cols = len(columns)
        n_rows = len(columns[0]) if n_cols else (rows or 0)
        for col in columns:
            if len(col) != n_rows:
                raise DimensionError(f"Ragged matrix columns: {len(col)} vs {n_rows}")
        flat = [columns[j][i] for i in range(n_rows) for j in range(n_cols)]
        return cls(n_rows, n_cols, tuple(flat))

    @classmethod
    def from_flat(cls, rows: int, cols: int, values: Sequence[Scalar]) -> 'Matrix':
        return cls(rows, cols, tuple(values))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'Matrix':
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> 'Matrix':
        return cls(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    @classmethod
    def scalar(cls, n: int, value: Scalar) -> 'Matrix':
        value = parse_rational(value)
        return cls(n, n, tuple(value if i == j else ZERO for i in range(n) for j in range(n)))

    @classmethod
    def from_blocks(cls, grid: Sequence[Sequence['Matrix']]) -> 'Matrix':
        """Сборка блочной матрицы; блоки одной строки имеют одинаковое число строк"""
        rows: List[List[Fraction]] = []
        for block_row in grid:
            height = block_row[0].rows
            for block in block_row:
                if block.rows != height:
                    raise DimensionError("Blocks in one block row differ in height")
            for i in range(height):
                line: List[Fraction] = []
                for block in block_row:
                    line.extend(block.row(i))
                rows.append(line)
        width = sum(block.cols for block in grid[0]) if grid else 0
        return cls.from_rows(rows, cols=width)

    @classmethod
    def block_diagonal(cls, *blocks: 'Matrix') -> 'Matrix':
        total_rows = sum(b.rows for b in blocks)
        total_cols = sum(b.cols for b in blocks)
        out = [[ZERO] * total_cols for _ in range(total_rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b.entry(i, j)
            r0 += b.rows
            c0 += b.cols
        return cls(total_rows, total_cols, tuple(x for row in out for x in row))

    # --- доступ ---

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def flatten(self) -> Vector:
        return self.entries

    def submatrix(self, row_start: int, row_stop: int, col_start: int, col_stop: int) -> 'Matrix':
        rows = [self.row(i)[col_start:col_stop] for i in range(row_start, row_stop)]
        return Matrix.from_rows(rows, cols=col_stop - col_start)

    # --- арифметика ---

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise DimensionError(f"Cannot apply {self.rows}x{self.cols} matrix to vector of length {len(v)}")
        support = [(j, a) for j, a in enumerate(v) if a]
        out = []
        for i in range(self.rows):
            base = i * self.cols
            acc = ZERO
            for j, a in support:
                e = self.entries[base + j]
                if e:
                    acc += e * a
            out.append(acc)
        return tuple(out)

    def matmul(self, other: 'Matrix') -> 'Matrix':
        if self.cols != other.rows:
            raise DimensionError(f"Cannot multiply {self.shape} by {other.shape}")
        other_rows = [other.row(k) for k in range(other.rows)]
        flat: List[Fraction] = []
        for i in range(self.rows):
            acc = [ZERO] * other.cols
            for k, a in enumerate(self.row(i)):
                if not a:
                    continue
                for j, b in enumerate(other_rows[k]):
                    if b:
                        acc[j] += a * b
            flat.extend(acc)
        return Matrix(self.rows, other.cols, tuple(flat))

    def __matmul__(self, other: 'Matrix') -> 'Matrix':
        return self.matmul(other)

    def __add__(self, other: 'Matrix') -> 'Matrix':
        if self.shape != other.shape:
            raise DimensionError(f"Cannot add {self.shape} and {other.shape}")
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: 'Matrix') -> 'Matrix':
        if self.shape != other.shape:
            raise DimensionError(f"Cannot subtract {other.shape} from {self.shape}")
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> 'Matrix':
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, s: Scalar) -> 'Matrix':
        s = parse_rational(s)
        return Matrix(self.rows, self.cols, tuple(s * a for a in self.entries))

    def commutator(self, other: 'Matrix') -> 'Matrix':
        return self.matmul(other) - other.matmul(self)

    def transpose(self) -> 'Matrix':
        return Matrix.from_columns([self.row(i) for i in range(self.rows)], rows=self.cols)

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise DimensionError(f"Trace of non-square {self.shape} matrix")
        return sum((self.entry(i, i) for i in range(self.rows)), ZERO)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries)

    def to_lists(self) -> List[List[str]]:
        return [[str(a) for a in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> 'Matrix':
        return cls.from_rows([[parse_rational(x) for x in row] for row in data], cols=cols)


# ============================================================
# ELIMINATION
# ============================================================

def _row_reduce(rows: List[List[Fraction]], ncols: int, width: Optional[int] = None) -> List[int]:
    """
    Приведение к RREF на месте. Ведущие элементы ищутся только в первых ncols столбцах,
    операции над строками затрагивают width столбцов. Возвращает список ведущих столбцов.
    """
    if width is None:
        width = ncols
    pivots: List[int] = []
    nrows = len(rows)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            rows[r], rows[pivot] = rows[pivot], rows[r]
        prow = rows[r]
        lead = prow[c]
        if lead != 1:
            inv = 1 / lead
            prow = [x * inv if x else x for x in prow]
            rows[r] = prow
        support = [j for j in range(c, width) if prow[j] != 0]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            factor = row[c]
            if factor != 0:
                for j in support:
                    row[j] -= factor * prow[j]
        pivots.append(c)
        r += 1
    return pivots


def _fraction_rows(rows: Iterable[Sequence[Scalar]], ncols: int, drop_zero: bool = True) -> List[List[Fraction]]:
    out: List[List[Fraction]] = []
    for row in rows:
        if len(row) != ncols:
            raise DimensionError(f"Row of length {len(row)} in a system with {ncols} unknowns")
        line = [x if type(x) is Fraction else parse_rational(x) for x in row]
        if drop_zero and not any(line):
            continue
        out.append(line)
    return out


def rref(M: Matrix) -> Tuple[Matrix, List[int], int]:
    """Единственный приведённый ступенчатый вид, ведущие столбцы и ранг"""
    rows = M.to_rows()
    pivots = _row_reduce(rows, M.cols)
    return Matrix.from_rows(rows, cols=M.cols), pivots, len(pivots)


def rank(M: Matrix) -> int:
    rows = _fraction_rows(M.to_rows(), M.cols)
    return len(_row_reduce(rows, M.cols))


def nullspace(rows: Iterable[Sequence[Scalar]], ncols: int) -> List[Vector]:
    """Базис решений однородной системы, заданной строками (не канонизированный)"""
    work = _fraction_rows(rows, ncols)
    logger.debug(f"Nullspace solve: {len(work)} equations x {ncols} unknowns")
    pivots = _row_reduce(work, ncols)
    pivot_set = set(pivots)
    basis: List[Vector] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        for i, p in enumerate(pivots):
            value = work[i][free]
            if value:
                v[p] = -value
        basis.append(tuple(v))
    return basis


def kernel(M: Matrix) -> 'Subspace':
    return Subspace.span(M.cols, nullspace(M.to_rows(), M.cols))


def kernel_of_rows(rows: Iterable[Sequence[Scalar]], ncols: int) -> 'Subspace':
    return Subspace.span(ncols, nullspace(rows, ncols))


def image(M: Matrix) -> 'Subspace':
    return Subspace.span(M.rows, M.columns())


def solve(M: Matrix, b: Sequence[Scalar]) -> Optional[Vector]:
    """Одно частное решение Mx = b или None, если система несовместна"""
    if len(b) != M.rows:
        raise DimensionError(f"Right-hand side of length {len(b)} for {M.rows} equations")
    rhs = to_vector(b)
    rows = [list(M.row(i)) + [rhs[i]] for i in range(M.rows)]
    pivots = _row_reduce(rows, M.cols + 1)
    if pivots and pivots[-1] == M.cols:
        return None
    x = [ZERO] * M.cols
    for i, p in enumerate(pivots):
        x[p] = rows[i][M.cols]
    return tuple(x)


def inverse(M: Matrix) -> Matrix:
    if M.rows != M.cols:
        raise SingularityError(f"Non-square {M.shape} matrix has no inverse")
    n = M.rows
    rows = [list(M.row(i)) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    pivots = _row_reduce(rows, n, 2 * n)
    if len(pivots) < n:
        raise SingularityError(f"Matrix of rank {len(pivots)} < {n} is not invertible")
    return Matrix.from_rows([row[n:] for row in rows], cols=n)


def determinant(M: Matrix) -> Fraction:
    if M.rows != M.cols:
        raise DimensionError(f"Determinant of non-square {M.shape} matrix")
    n = M.rows
    rows = M.to_rows()
    det = ONE
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return ZERO
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        lead = rows[c][c]
        det *= lead
        for i in range(c + 1, n):
            factor = rows[i][c] / lead
            if factor:
                for j in range(c, n):
                    rows[i][j] -= factor * rows[c][j]
    return det


# ============================================================
# SUBSPACE
# ============================================================

@dataclass(frozen=True)
class Subspace:
    """
    Подпространство Q^n, хранимое в канонической форме: базис = ненулевые строки RREF.
    Любой переданный набор векторов приводится к этой форме, поэтому равные
    подпространства имеют побитово одинаковые базисы.
    """
    ambient_dim: int
    basis: Tuple[Vector, ...] = ()
    pivots: Tuple[int, ...] = field(default=(), init=False)

    def __post_init__(self):
        rows = _fraction_rows(self.basis, self.ambient_dim)
        pivots = _row_reduce(rows, self.ambient_dim)
        object.__setattr__(self, "basis", tuple(tuple(rows[i]) for i in range(len(pivots))))
        object.__setattr__(self, "pivots", tuple(pivots))

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence[Scalar]]) -> 'Subspace':
        return cls(ambient_dim, tuple(tuple(v) for v in vectors))

    @classmethod
    def zero(cls, ambient_dim: int) -> 'Subspace':
        return cls(ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> 'Subspace':
        return cls(ambient_dim, tuple(unit_vector(ambient_dim, i) for i in range(ambient_dim)))

    @classmethod
    def direct(cls, first: 'Subspace', second: 'Subspace') -> 'Subspace':
        """first ⊕ second в пространстве размерности first.ambient_dim + second.ambient_dim"""
        n = first.ambient_dim + second.ambient_dim
        pad_right = zero_vector(second.ambient_dim)
        pad_left = zero_vector(first.ambient_dim)
        vectors = [tuple(v) + pad_right for v in first.basis] + [pad_left + tuple(v) for v in second.basis]
        return cls.span(n, vectors)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _check_ambient(self, other: 'Subspace'):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError(f"Ambient dimension mismatch: {self.ambient_dim} vs {other.ambient_dim}")

    def coordinates(self, v: Sequence[Scalar]) -> Optional[Vector]:
        """Координаты v в каноническом базисе (считываются в ведущих столбцах) или None"""
        if len(v) != self.ambient_dim:
            raise DimensionError(f"Vector of length {len(v)} in {self.ambient_dim}-space")
        vec = to_vector(v)
        coords = tuple(vec[p] for p in self.pivots)
        residual = list(vec)
        for c, b in zip(coords, self.basis):
            if c:
                for j, a in enumerate(b):
                    if a:
                        residual[j] -= c * a
        if any(residual):
            return None
        return coords

    def contains(self, v: Sequence[Scalar]) -> bool:
        return self.coordinates(v) is not None

    def vector(self, coords: Sequence[Scalar]) -> Vector:
        return lin_comb(to_vector(coords), self.basis, self.ambient_dim)

    def sum(self, other: 'Subspace') -> 'Subspace':
        self._check_ambient(other)
        return Subspace.span(self.ambient_dim, list(self.basis) + list(other.basis))

    def intersect(self, other: 'Subspace') -> 'Subspace':
        self._check_ambient(other)
        n = self.ambient_dim
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(n)
        r = self.dim
        rows = [[a[j] for a in self.basis] + [-b[j] for b in other.basis] for j in range(n)]
        solutions = nullspace(rows, r + other.dim)
        return Subspace.span(n, [lin_comb(x[:r], self.basis, n) for x in solutions])

    def is_subspace_of(self, other: 'Subspace') -> bool:
        self._check_ambient(other)
        return all(other.contains(b) for b in self.basis)

    def complement_indices(self) -> List[int]:
        """Жадное дополнение стандартными векторами в порядке индексов"""
        current = self
        chosen: List[int] = []
        for j in range(self.ambient_dim):
            if current.dim == self.ambient_dim:
                break
            e = unit_vector(self.ambient_dim, j)
            if not current.contains(e):
                chosen.append(j)
                current = current.sum(Subspace.span(self.ambient_dim, [e]))
        return chosen

    def to_lists(self) -> List[List[str]]:
        return [[str(a) for a in v] for v in self.basis]


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    return A.sum(B)


def subspace_intersect(A: Subspace, B: Subspace) -> Subspace:
    return A.intersect(B)


def subspace_contains(A: Subspace, v: Sequence[Scalar]) -> bool:
    return A.contains(v)
