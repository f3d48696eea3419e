"""Exact linear algebra: RREF, rank, kernels, span membership and equality.

Matrices are dense and immutable. Over GF(p) elimination is vectorised with
numpy ``int64`` arrays (p < 2**31 keeps every product inside int64); over
the rationals rows are sparse ``Fraction`` maps and the pivot with the
smallest bit size is chosen to limit coefficient growth.
"""

import heapq
import logging
from dataclasses import dataclass
from typing import (
    TYPE_CHECKING,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .scalars import AlgebraError, Field, MixedContext

if TYPE_CHECKING:
    from .scalars import Scalar

logger = logging.getLogger(__name__)

Vector = Dict[int, "Scalar"]
VectorLike = Union[Mapping[int, "Scalar"], Sequence["Scalar"]]


class DimensionMismatch(AlgebraError, ValueError):  # noqa: N818
    """Raised when vectors, matrices or subspaces have incompatible shapes."""


@dataclass(frozen=True)
class ScalarMatrix:
    """Dense row-major matrix of raw scalars over a field."""

    field: Field
    rows: int
    cols: int
    entries: Tuple["Scalar", ...]

    def __post_init__(self) -> None:
        """Check the entry count."""
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(
        cls, field: Field, rows: Sequence[Sequence[object]], cols: Optional[int] = None
    ) -> "ScalarMatrix":
        """Build from nested sequences of ints, fractions or strings."""
        width = len(rows[0]) if rows else (cols or 0)
        entries: List["Scalar"] = []
        for row in rows:
            if len(row) != width:
                raise DimensionMismatch("ragged rows")
            entries.extend(field.coerce(value) for value in row)  # type: ignore[arg-type]
        return cls(field, len(rows), width, tuple(entries))

    @classmethod
    def from_columns(
        cls, field: Field, rows: int, columns: Sequence[Mapping[int, "Scalar"]]
    ) -> "ScalarMatrix":
        """Build from sparse columns (row index -> raw scalar)."""
        cols = len(columns)
        entries = [field.zero] * (rows * cols)
        for j, column in enumerate(columns):
            for i, value in column.items():
                entries[i * cols + j] = value
        return cls(field, rows, cols, tuple(entries))

    @classmethod
    def identity(cls, field: Field, size: int) -> "ScalarMatrix":
        """Identity matrix."""
        return cls.from_columns(field, size, [{j: field.one} for j in range(size)])

    def entry(self, i: int, j: int) -> "Scalar":
        """Raw entry at row i, column j."""
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple["Scalar", ...]:
        """Row i as a tuple."""
        start = i * self.cols
        return self.entries[start : start + self.cols]

    def sparse_rows(self) -> List[Vector]:
        """Rows as sparse maps, zero rows included as empty maps."""
        out = []
        for i in range(self.rows):
            out.append({j: v for j, v in enumerate(self.row(i)) if v != 0})
        return out

    def sparse_columns(self) -> List[Vector]:
        """Columns as sparse maps."""
        columns: List[Vector] = [{} for _ in range(self.cols)]
        for i in range(self.rows):
            for j, value in enumerate(self.row(i)):
                if value != 0:
                    columns[j][i] = value
        return columns

    def apply(self, vector: VectorLike) -> Vector:
        """Sparse product m·v."""
        v = as_sparse(self.field, vector, self.cols)
        return _apply_columns(self.field, self.sparse_columns(), v)

    def count_nonzero_columns(self) -> int:
        """Number of columns with at least one nonzero entry."""
        return sum(1 for column in self.sparse_columns() if column)


@dataclass(frozen=True)
class SubspaceBasis:
    """Canonical RREF basis of a subspace of F^ambient_dim.

    Two bases of the same ambient space describe the same subspace exactly
    when their rows are identical.
    """

    field: Field
    ambient_dim: int
    rows: Tuple[Tuple["Scalar", ...], ...]
    pivots: Tuple[int, ...]

    @property
    def rank(self) -> int:
        """Dimension of the subspace."""
        return len(self.rows)

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "SubspaceBasis":
        """The zero subspace."""
        return cls(field, ambient_dim, (), ())

    def sparse_rows(self) -> List[Vector]:
        """Rows as sparse maps."""
        return [{j: v for j, v in enumerate(row) if v != 0} for row in self.rows]

    vectors = sparse_rows

    def reduce(self, vector: VectorLike) -> Vector:
        """Residual of a vector after elimination against the rows."""
        field = self.field
        v = as_sparse(field, vector, self.ambient_dim)
        for pivot, row in zip(self.pivots, self.rows):
            coef = v.get(pivot)
            if coef is None:
                continue
            for j, value in enumerate(row):
                if value != 0:
                    _set(v, j, field.sub(v.get(j, field.zero), field.mul(coef, value)))
        return v

    def _check_same_space(self, other: "SubspaceBasis") -> None:
        if self.field != other.field:
            raise MixedContext(f"field mismatch: {self.field} vs {other.field}")
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"ambient dims differ: {self.ambient_dim} vs {other.ambient_dim}"
            )


def _set(vector: Vector, index: int, value: "Scalar") -> None:
    if value == 0:
        vector.pop(index, None)
    else:
        vector[index] = value


def _axpy(field: Field, target: Vector, factor: "Scalar", source: Mapping[int, "Scalar"]) -> None:
    """target += factor * source, in place."""
    add, mul = field.add, field.mul
    for j, value in source.items():
        _set(target, j, add(target.get(j, field.zero), mul(factor, value)))


def _apply_columns(field: Field, columns: Sequence[Mapping[int, "Scalar"]], v: Vector) -> Vector:
    out: Vector = {}
    for j, coef in v.items():
        _axpy(field, out, coef, columns[j])
    return out


def as_sparse(field: Field, vector: VectorLike, dim: int) -> Vector:
    """Copy a dense or sparse vector into a sparse map, checking its length."""
    if isinstance(vector, Mapping):
        if any(j < 0 or j >= dim for j in vector):
            raise DimensionMismatch(f"vector index outside ambient dimension {dim}")
        return {j: field.coerce(v) for j, v in vector.items() if v != 0}
    if len(vector) != dim:
        raise DimensionMismatch(f"vector of length {len(vector)}, expected {dim}")
    return {j: field.coerce(v) for j, v in enumerate(vector) if v != 0}


def _rref_modp(m: ScalarMatrix) -> Tuple[List[List[int]], List[int]]:
    p = m.field.characteristic
    a = np.array(m.entries, dtype=np.int64).reshape(m.rows, m.cols) % p
    rank = 0
    pivots: List[int] = []
    for c in range(m.cols):
        if rank == m.rows:
            break
        nonzero = np.nonzero(a[rank:, c])[0]
        if nonzero.size == 0:
            continue
        i = rank + int(nonzero[0])
        if i != rank:
            a[[rank, i]] = a[[i, rank]]
        a[rank] = (a[rank] * pow(int(a[rank, c]), -1, p)) % p
        column = a[:, c].copy()
        column[rank] = 0
        targets = np.nonzero(column)[0]
        if targets.size:
            a[targets] = (a[targets] - np.outer(column[targets], a[rank]) % p) % p
        pivots.append(c)
        rank += 1
    return a[:rank].tolist(), pivots


def _rref_sparse(field: Field, rows: Iterable[Vector]) -> Tuple[List[Vector], List[int]]:
    remaining = [dict(row) for row in rows if row]
    if not remaining:
        return [], []
    cols = max(max(row) for row in remaining) + 1
    done: List[Vector] = []
    pivots: List[int] = []
    for c in range(cols):
        candidates = [i for i, row in enumerate(remaining) if c in row]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: (field.bit_size(remaining[i][c]), i))
        prow = remaining.pop(best)
        inv = field.inv(prow[c])
        prow = {j: field.mul(v, inv) for j, v in prow.items()}
        for row in remaining:
            if c in row:
                _axpy(field, row, field.neg(row[c]), prow)
        for row in done:
            if c in row:
                _axpy(field, row, field.neg(row[c]), prow)
        remaining = [row for row in remaining if row]
        done.append(prow)
        pivots.append(c)
        if not remaining:
            break
    return done, pivots


def _basis(
    field: Field, dim: int, rows: Sequence[Mapping[int, "Scalar"]], pivots: Sequence[int]
) -> SubspaceBasis:
    zero = field.zero
    dense = tuple(tuple(row.get(j, zero) for j in range(dim)) for row in rows)
    return SubspaceBasis(field, dim, dense, tuple(pivots))


def rref(m: ScalarMatrix) -> SubspaceBasis:
    """Canonical reduced row echelon basis of the row space of m."""
    field = m.field
    if not field.is_rational:
        rows, pivots = _rref_modp(m)
        return SubspaceBasis(
            field, m.cols, tuple(tuple(row) for row in rows), tuple(pivots)
        )
    sparse, pivots = _rref_sparse(field, m.sparse_rows())
    return _basis(field, m.cols, sparse, pivots)


def rank(m: ScalarMatrix) -> int:
    """Rank of m."""
    return rref(m).rank


def kernel(m: ScalarMatrix) -> SubspaceBasis:
    """Canonical basis of {v : m·v = 0}; every vector is re-verified."""
    field = m.field
    reduced = rref(m)
    pivot_set = set(reduced.pivots)
    columns = m.sparse_columns()
    vectors: List[Vector] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v: Vector = {free: field.one}
        for pivot, row in zip(reduced.pivots, reduced.rows):
            if row[free] != 0:
                v[pivot] = field.neg(row[free])
        if _apply_columns(field, columns, v):
            raise AlgebraError(f"kernel vector for free column {free} failed verification")
        vectors.append(v)

    logger.debug("kernel of %dx%d matrix has dim %d", m.rows, m.cols, len(vectors))
    return span_of(field, m.cols, vectors)


def span_of(field: Field, dim: int, vectors: Iterable[VectorLike]) -> SubspaceBasis:
    """Canonical basis of the span of the given vectors."""
    sparse = [as_sparse(field, v, dim) for v in vectors]
    if not field.is_rational:
        builder = EchelonBuilder(field, dim)
        for v in sparse:
            builder.add(v)
        return builder.to_basis()
    rows, pivots = _rref_sparse(field, sparse)
    return _basis(field, dim, rows, pivots)


def solve(m: ScalarMatrix, target: VectorLike) -> Optional[Vector]:
    """Canonical solution of m·x = target (free variables zero), or None."""
    field = m.field
    b = as_sparse(field, target, m.rows)
    augmented = []
    for i, row in enumerate(m.sparse_rows()):
        if i in b:
            row[m.cols] = b[i]
        augmented.append(row)
    rows, pivots = _rref_sparse(field, augmented)
    if pivots and pivots[-1] == m.cols:
        return None
    solution = {pivot: row[m.cols] for pivot, row in zip(pivots, rows) if m.cols in row}
    if m.apply(solution) != b:
        raise AlgebraError("solution failed verification")
    return solution


def span_contains(basis: SubspaceBasis, vector: VectorLike) -> bool:
    """Whether the vector reduces to zero against the basis."""
    return not basis.reduce(vector)


def span_equal(b1: SubspaceBasis, b2: SubspaceBasis) -> bool:
    """Whether two bases span the same subspace (identical RREF rows)."""
    b1._check_same_space(b2)
    return b1.rows == b2.rows


def span_within(inner: SubspaceBasis, outer: SubspaceBasis) -> bool:
    """Whether span(inner) is a subspace of span(outer)."""
    inner._check_same_space(outer)
    return all(span_contains(outer, row) for row in inner.sparse_rows())


def first_outside(basis: SubspaceBasis, other: SubspaceBasis) -> Optional[Vector]:
    """First RREF row of `basis` that is not in `other`, if any."""
    basis._check_same_space(other)
    for row in basis.sparse_rows():
        if not span_contains(other, row):
            return row
    return None


class EchelonBuilder:
    """Incremental sparse echelon form.

    Each stored row has its pivot as leading (smallest) column with
    coefficient one; rows are reduced against earlier pivots only, so
    `to_basis` finishes with a back-substitution pass.
    """

    def __init__(self, field: Field, dim: int) -> None:
        """Empty echelon form in F^dim."""
        self.field = field
        self.dim = dim
        self._rows: Dict[int, Vector] = {}

    @property
    def rank(self) -> int:
        """Number of independent rows added so far."""
        return len(self._rows)

    def copy(self) -> "EchelonBuilder":
        """Independent copy sharing no mutable state."""
        other = EchelonBuilder(self.field, self.dim)
        other._rows = {pivot: dict(row) for pivot, row in self._rows.items()}
        return other

    def reduce(self, vector: Mapping[int, "Scalar"]) -> Vector:
        """Residual of a sparse vector against the stored rows."""
        field = self.field
        rows = self._rows
        v = dict(vector)
        heap = [c for c in v if c in rows]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            coef = v.get(c)
            if coef is None:
                continue
            factor = field.neg(coef)
            for j, value in rows[c].items():
                present = j in v
                _set(v, j, field.add(v.get(j, field.zero), field.mul(factor, value)))
                if not present and j in v and j in rows:
                    heapq.heappush(heap, j)
        return v

    def add(self, vector: Mapping[int, "Scalar"]) -> Optional[Vector]:
        """Add a vector; returns the new normalised row, or None if dependent."""
        residual = self.reduce(vector)
        if not residual:
            return None
        pivot = min(residual)
        inv = self.field.inv(residual[pivot])
        row = {j: self.field.mul(v, inv) for j, v in residual.items()}
        self._rows[pivot] = row
        return row

    def contains(self, vector: Mapping[int, "Scalar"]) -> bool:
        """Whether a vector lies in the current span."""
        return not self.reduce(vector)

    def to_basis(self) -> SubspaceBasis:
        """Canonical RREF basis of the span."""
        field = self.field
        reduced: Dict[int, Vector] = {}
        for pivot in sorted(self._rows, reverse=True):
            row = dict(self._rows[pivot])
            for c in [c for c in row if c != pivot and c in reduced]:
                coef = row.get(c)
                if coef is not None:
                    _axpy(field, row, field.neg(coef), reduced[c])
            reduced[pivot] = row
        pivots = sorted(reduced)
        return _basis(field, self.dim, [reduced[p] for p in pivots], pivots)
