"""Subspaces of M_n(F) held as canonical reduced-echelon bases.

A matrix is identified with its row-major vectorisation in F^(n*n); a subspace
stores the nonzero rows of the reduced row-echelon form of any spanning set, so
two subspaces are equal exactly when their stored rows are equal.
"""
import itertools
import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from algebra import ExactMatrix, FieldSpec, _row_reduce, nullspace
from errors import ImproperSubspace, MixedFields, ShapeMismatch, UnsupportedField

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatSubspace:
    """Subspace of n x n matrices with a canonical basis (rref of vectorisations)."""

    field: FieldSpec
    n: int
    rows: Tuple[Tuple, ...]
    pivots: Tuple[int, ...] = dc_field(compare=False, default=())

    @classmethod
    def from_vectors(cls, field: FieldSpec, n: int, vectors: Iterable[Sequence]) -> "MatSubspace":
        vectors = [list(v) for v in vectors]
        d = n * n
        if any(len(v) != d for v in vectors):
            raise ShapeMismatch(f"vectors must have length {d}")
        if not vectors:
            return cls(field, n, (), ())
        rref, pivots, _ = _row_reduce(field, vectors, d)
        rows = tuple(tuple(r) for r in rref[:len(pivots)])
        return cls(field, n, rows, tuple(pivots))

    # ----------------------------------------------------------------- shape

    @property
    def ambient_dim(self) -> int:
        return self.n * self.n

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def free_columns(self) -> Tuple[int, ...]:
        pivot_set = set(self.pivots)
        return tuple(c for c in range(self.ambient_dim) if c not in pivot_set)

    @cached_property
    def basis(self) -> Tuple[ExactMatrix, ...]:
        return tuple(ExactMatrix.from_vector(self.field, self.n, r) for r in self.rows)

    def __len__(self):
        return self.dim

    # ------------------------------------------------------------ membership

    def _vector_of(self, a: ExactMatrix) -> Tuple:
        if not isinstance(a, ExactMatrix):
            raise TypeError(f"expected ExactMatrix, got {type(a).__name__}")
        if a.field != self.field:
            raise MixedFields(f"{a.field} matrix against a subspace over {self.field}")
        if a.shape != (self.n, self.n):
            raise ShapeMismatch(f"{a.shape} matrix against a subspace of M_{self.n}")
        return a.vectorize()

    def reduce_vector(self, vec: Sequence) -> List:
        """Residual of ``vec`` after elimination against the canonical basis."""
        f = self.field
        vec = list(vec)
        for row, c in zip(self.rows, self.pivots):
            coef = vec[c]
            if coef != f.zero:
                vec = [f.sub(x, f.mul(coef, y)) for x, y in zip(vec, row)]
        return vec

    def reduce(self, a: ExactMatrix) -> ExactMatrix:
        return ExactMatrix.from_vector(self.field, self.n, self.reduce_vector(self._vector_of(a)))

    def contains(self, a: ExactMatrix) -> bool:
        zero = self.field.zero
        return all(x == zero for x in self.reduce_vector(self._vector_of(a)))

    def __contains__(self, a: ExactMatrix) -> bool:
        return self.contains(a)

    def coordinates(self, a: ExactMatrix) -> Optional[Tuple]:
        """Coefficients of ``a`` in the canonical basis, or None when a is not in S."""
        if not self.contains(a):
            return None
        vec = a.vectorize()
        return tuple(vec[c] for c in self.pivots)

    def combination(self, coeffs: Sequence) -> ExactMatrix:
        f = self.field
        vec = [f.zero] * self.ambient_dim
        for coef, row in zip(coeffs, self.rows):
            if coef != f.zero:
                vec = [f.add(x, f.mul(coef, y)) for x, y in zip(vec, row)]
        return ExactMatrix.from_vector(f, self.n, vec)

    def elements(self) -> Iterator[ExactMatrix]:
        """All elements over a finite field, coefficient tuples in lexicographic order."""
        if not self.field.is_finite:
            raise UnsupportedField("cannot enumerate a subspace over an infinite field")
        for coeffs in itertools.product(list(self.field.elements()), repeat=self.dim):
            yield self.combination(coeffs)

    def size(self) -> int:
        if not self.field.is_finite:
            raise UnsupportedField("infinite subspace")
        return self.field.order ** self.dim

    def issubspace(self, other: "MatSubspace") -> bool:
        _check_compatible(self, other)
        return all(other.contains(b) for b in self.basis)

    def __le__(self, other: "MatSubspace") -> bool:
        return self.issubspace(other)

    # ----------------------------------------------------------- operations

    def __add__(self, other: "MatSubspace") -> "MatSubspace":
        return span_sum(self, other)

    def __and__(self, other: "MatSubspace") -> "MatSubspace":
        return intersect(self, other)

    def extend(self, w: ExactMatrix) -> "MatSubspace":
        """S + F*w."""
        return MatSubspace.from_vectors(self.field, self.n, list(self.rows) + [self._vector_of(w)])

    def conjugate(self, g: ExactMatrix) -> "MatSubspace":
        """g S g^-1."""
        g_inv = g.inverse()
        return span_of([g @ b @ g_inv for b in self.basis], field=self.field, n=self.n)

    def transpose(self) -> "MatSubspace":
        return span_of([b.T for b in self.basis], field=self.field, n=self.n)

    def embed(self, target: FieldSpec) -> "MatSubspace":
        """The subspace spanned by the same basis over an extension field."""
        return span_of([b.embed(target) for b in self.basis], field=target, n=self.n)

    # ----------------------------------------------------------------- views

    def to_numpy(self) -> np.ndarray:
        """Canonical basis as a (dim, n*n) int64 array; prime fields only."""
        if not self.field.is_prime_field:
            raise UnsupportedField("numpy view is for prime fields")
        return np.array(self.rows, dtype=np.int64).reshape(self.dim, self.ambient_dim)

    def to_literal(self) -> dict:
        return {
            "field": self.field.to_literal(),
            "n": self.n,
            "basis": [b.to_literal() for b in self.basis],
        }

    @classmethod
    def from_literal(cls, obj: dict) -> "MatSubspace":
        field = FieldSpec.from_literal(obj["field"])
        n = int(obj["n"])
        mats = [ExactMatrix.from_rows(field, m["rows"]) for m in obj["basis"]]
        return span_of(mats, field=field, n=n)

    def __repr__(self):
        return f"MatSubspace(dim={self.dim} in M_{self.n}({self.field}))"


def _check_compatible(s: MatSubspace, t: MatSubspace):
    if s.field != t.field:
        raise MixedFields(f"{s.field} vs {t.field}")
    if s.n != t.n:
        raise ShapeMismatch(f"M_{s.n} vs M_{t.n}")


def span_of(mats: Sequence[ExactMatrix], *, field: Optional[FieldSpec] = None,
            n: Optional[int] = None) -> MatSubspace:
    """Canonical span of n x n matrices; ``field`` and ``n`` are needed for an empty list."""
    mats = list(mats)
    if mats:
        field = field or mats[0].field
        n = n or mats[0].rows
    if field is None or n is None:
        raise ShapeMismatch("span of an empty list needs field and n")
    for m in mats:
        if m.field != field:
            raise MixedFields(f"{m.field} matrix in a span over {field}")
        if m.shape != (n, n):
            raise ShapeMismatch(f"{m.shape} matrix in a span of M_{n}")
    return MatSubspace.from_vectors(field, n, [m.vectorize() for m in mats])


def contains(s: MatSubspace, a: ExactMatrix) -> bool:
    return s.contains(a)


def zero_space(field: FieldSpec, n: int) -> MatSubspace:
    return MatSubspace(field, n, (), ())


def full_space(field: FieldSpec, n: int) -> MatSubspace:
    d = n * n
    rows = []
    for i in range(d):
        vec = [field.zero] * d
        vec[i] = field.one
        rows.append(tuple(vec))
    return MatSubspace(field, n, tuple(rows), tuple(range(d)))


def trace_orthogonal(s: MatSubspace) -> MatSubspace:
    """{b : Tr(b x) = 0 for every x in S}.

    Tr(b x) = sum_ij b_ij x_ji, i.e. vec(b) . vec(x^T) in row-major order.
    """
    constraints = [list(x.T.vectorize()) for x in s.basis]
    if not constraints:
        return full_space(s.field, s.n)
    return MatSubspace.from_vectors(s.field, s.n, nullspace(s.field, constraints, s.ambient_dim))


def span_sum(s: MatSubspace, t: MatSubspace) -> MatSubspace:
    _check_compatible(s, t)
    return MatSubspace.from_vectors(s.field, s.n, list(s.rows) + list(t.rows))


def intersect(s: MatSubspace, t: MatSubspace) -> MatSubspace:
    """S ∩ T from the kernel of [S | -T]."""
    _check_compatible(s, t)
    f = s.field
    if s.is_zero or t.is_zero:
        return zero_space(f, s.n)
    ds = s.dim
    cols = list(s.rows) + [[f.neg(x) for x in r] for r in t.rows]
    system = [[c[k] for c in cols] for k in range(s.ambient_dim)]
    kernel = nullspace(f, system, len(cols))
    vectors = []
    for lam in kernel:
        vectors.append(s.combination(lam[:ds]).vectorize())
    return MatSubspace.from_vectors(f, s.n, vectors)


def complement_basis(s: MatSubspace) -> List[ExactMatrix]:
    """Matrix units on the non-pivot coordinates; they span a complement of S."""
    f = s.field
    out = []
    for c in s.free_columns:
        vec = [f.zero] * s.ambient_dim
        vec[c] = f.one
        out.append(ExactMatrix.from_vector(f, s.n, vec))
    return out


def extension_directions(s: MatSubspace) -> Iterator[ExactMatrix]:
    """One representative w per line of M_n / S, so the S + F*w are the distinct one-step extensions.

    Representatives live on the non-pivot coordinates, normalised so that the
    first nonzero coordinate is 1; there are (q^c - 1)/(q - 1) of them.
    """
    f = s.field
    if not f.is_finite:
        raise UnsupportedField("extension directions over an infinite field")
    if s.is_full:
        raise ImproperSubspace("the full algebra has no extensions")
    free = s.free_columns
    c = len(free)
    elems = list(f.elements())
    for lead in range(c):
        for tail in itertools.product(elems, repeat=c - lead - 1):
            vec = [f.zero] * s.ambient_dim
            vec[free[lead]] = f.one
            for pos, x in zip(free[lead + 1:], tail):
                vec[pos] = x
            yield ExactMatrix.from_vector(f, s.n, vec)


def count_directions(s: MatSubspace) -> int:
    q = s.field.order
    return (q ** s.codim - 1) // (q - 1)


def express(mats: Sequence[ExactMatrix], target: ExactMatrix) -> Optional[Tuple]:
    """Coefficients c with sum c_i mats_i = target, or None if target is outside the span."""
    f = target.field
    k = len(mats)
    vecs = [m.vectorize() for m in mats]
    tv = target.vectorize()
    system = [[v[pos] for v in vecs] + [tv[pos]] for pos in range(len(tv))]
    rref, pivots, _ = _row_reduce(f, system, k + 1)
    if k in pivots:
        return None
    coeffs = [f.zero] * k
    for i, pc in enumerate(pivots):
        coeffs[pc] = rref[i][k]
    return tuple(coeffs)
