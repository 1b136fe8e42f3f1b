"""Exact fields and dense exact matrices.

Three kinds of field are supported:

* prime fields F_p, elements stored as residues in [0, p);
* the rationals, elements stored as reduced ``Fraction`` values;
* small extensions K[t]/(m(t)) of a prime field or of the rationals given by an
  explicit monic modulus, elements stored as coefficient tuples (constant term
  first) reduced modulo m.

Matrices keep their entries in this raw canonical form, so equality and hashing
are structural. ``Scalar`` is the public wrapper for single field elements.
"""
from __future__ import annotations

import itertools
import logging
import numbers
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from errors import (
    FieldError,
    MixedFields,
    ShapeMismatch,
    SingularMatrix,
    UnsupportedField,
    ZeroInverse,
)

logger = logging.getLogger(__name__)

MAX_EXTENSION_DEGREE = 4
MAX_RATIONAL_EXTENSION_DEGREE = 3


def _is_prime(n: int) -> bool:
    """Trial division; the characteristics used here are tiny."""
    if n <= 1:
        return False
    if n <= 3:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _divisors(n: int) -> List[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


@dataclass(frozen=True)
class FieldSpec:
    """An exact field: F_p, the rationals (characteristic 0), or K[t]/(modulus)."""

    characteristic: int
    extension_degree: int = 1
    modulus: Optional[Tuple] = None

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or (p != 0 and not _is_prime(p)):
            raise FieldError(f"characteristic must be 0 or prime, got {p}")
        if self.extension_degree < 1:
            raise FieldError("extension degree must be positive")
        if self.extension_degree == 1:
            if self.modulus is not None:
                raise FieldError("modulus given for a degree-1 field")
            return
        if self.modulus is None or len(self.modulus) != self.extension_degree + 1:
            raise FieldError("modulus must have extension_degree + 1 coefficients")
        limit = MAX_EXTENSION_DEGREE if p else MAX_RATIONAL_EXTENSION_DEGREE
        if self.extension_degree > limit:
            raise UnsupportedField(f"extension degree {self.extension_degree} above {limit}")
        modulus = tuple(self._base_coerce(c) for c in self.modulus)
        object.__setattr__(self, "modulus", modulus)
        if modulus[-1] != 1:
            raise FieldError("modulus must be monic")
        if not self._modulus_is_irreducible():
            raise FieldError(f"modulus {list(self.modulus)} is reducible")

    # ------------------------------------------------------------------ builders

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(0)

    @classmethod
    def extension(cls, p: int, modulus: Sequence) -> "FieldSpec":
        """K[t]/(modulus) with K = F_p (or the rationals when p = 0)."""
        return cls(p, len(modulus) - 1, tuple(modulus))

    @classmethod
    def from_literal(cls, obj: dict) -> "FieldSpec":
        p = int(obj["p"])
        k = int(obj.get("k", 1))
        modulus = obj.get("modulus")
        if k == 1:
            return cls(p)
        if modulus is None:
            raise FieldError("extension literal needs a modulus")
        coeffs = tuple(Fraction(c) if isinstance(c, str) else c for c in modulus)
        return cls(p, k, coeffs)

    def to_literal(self) -> dict:
        obj = {"p": self.characteristic, "k": self.extension_degree}
        if self.modulus is not None:
            obj["modulus"] = [self._base_literal(c) for c in self.modulus]
        return obj

    # ---------------------------------------------------------------- properties

    @property
    def is_finite(self) -> bool:
        return self.characteristic != 0

    @property
    def is_prime_field(self) -> bool:
        return self.characteristic != 0 and self.extension_degree == 1

    @property
    def order(self) -> Optional[int]:
        if not self.is_finite:
            return None
        return self.characteristic ** self.extension_degree

    @property
    def zero(self):
        if self.extension_degree > 1:
            return (self._base_zero(),) * self.extension_degree
        return self._base_zero()

    @property
    def one(self):
        if self.extension_degree > 1:
            return (self._base_one(),) + (self._base_zero(),) * (self.extension_degree - 1)
        return self._base_one()

    def __str__(self):
        p = self.characteristic
        if self.extension_degree == 1:
            return f"F_{p}" if p else "Q"
        base = f"F_{p}" if p else "Q"
        return f"{base}[t]/({_poly_str(self.modulus)})"

    # ------------------------------------------------------- base-field plumbing

    def _base_zero(self):
        return 0 if self.characteristic else Fraction(0)

    def _base_one(self):
        return 1 if self.characteristic else Fraction(1)

    def _base_coerce(self, x):
        p = self.characteristic
        if isinstance(x, str):
            try:
                x = Fraction(x)
            except ValueError as exc:
                raise FieldError(f"{x!r} is not an exact field literal") from exc
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (numbers.Integral, Fraction)):
            raise FieldError(f"{x!r} is not an exact field literal")
        if p:
            if isinstance(x, Fraction):
                if x.denominator % p == 0:
                    raise ZeroInverse(f"{x} has no image in F_{p}")
                return x.numerator * pow(x.denominator, -1, p) % p
            return int(x) % p
        return Fraction(x)

    def _base_add(self, a, b):
        p = self.characteristic
        return (a + b) % p if p else a + b

    def _base_sub(self, a, b):
        p = self.characteristic
        return (a - b) % p if p else a - b

    def _base_mul(self, a, b):
        p = self.characteristic
        return (a * b) % p if p else a * b

    def _base_neg(self, a):
        p = self.characteristic
        return (-a) % p if p else -a

    def _base_inv(self, a):
        if a == 0:
            raise ZeroInverse("inverse of zero")
        p = self.characteristic
        return pow(a, -1, p) if p else 1 / a

    def _base_literal(self, a):
        return a if self.characteristic else str(a)

    # ------------------------------------------------ polynomials over the base

    def _poly_trim(self, a: List) -> List:
        while a and a[-1] == 0:
            a.pop()
        return a

    def _poly_sub(self, a: List, b: List) -> List:
        size = max(len(a), len(b))
        zero = self._base_zero()
        out = [
            self._base_sub(a[i] if i < len(a) else zero, b[i] if i < len(b) else zero)
            for i in range(size)
        ]
        return self._poly_trim(out)

    def _poly_mul(self, a: List, b: List) -> List:
        if not a or not b:
            return []
        out = [self._base_zero()] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] = self._base_add(out[i + j], self._base_mul(x, y))
        return self._poly_trim(out)

    def _poly_divmod(self, a: List, b: List) -> Tuple[List, List]:
        a = self._poly_trim(list(a))
        b = self._poly_trim(list(b))
        if not b:
            raise ZeroInverse("polynomial division by zero")
        lead_inv = self._base_inv(b[-1])
        quot = [self._base_zero()] * max(len(a) - len(b) + 1, 1)
        while len(a) >= len(b) and a:
            shift = len(a) - len(b)
            coef = self._base_mul(a[-1], lead_inv)
            quot[shift] = coef
            for i, y in enumerate(b):
                a[i + shift] = self._base_sub(a[i + shift], self._base_mul(coef, y))
            self._poly_trim(a)
        return self._poly_trim(quot), a

    def _reduce(self, coeffs: List) -> Tuple:
        """Reduce a coefficient list modulo the (monic) modulus."""
        k = self.extension_degree
        coeffs = list(coeffs)
        mod = self.modulus
        for d in range(len(coeffs) - 1, k - 1, -1):
            c = coeffs[d]
            if c == 0:
                continue
            shift = d - k
            for i in range(k + 1):
                coeffs[i + shift] = self._base_sub(coeffs[i + shift], self._base_mul(c, mod[i]))
        coeffs = coeffs[:k] + [self._base_zero()] * (k - len(coeffs))
        return tuple(coeffs)

    def _modulus_is_irreducible(self) -> bool:
        k = self.extension_degree
        mod = list(self.modulus)
        p = self.characteristic
        if p:
            # a reducible polynomial of degree k has a monic factor of degree <= k // 2
            for d in range(1, k // 2 + 1):
                for tail in itertools.product(range(p), repeat=d):
                    factor = list(tail) + [1]
                    _, rem = self._poly_divmod(mod, factor)
                    if not rem:
                        return False
            return True
        # degree <= 3 over Q: reducible iff there is a rational root
        denom = 1
        for c in mod:
            denom = denom * Fraction(c).denominator // _gcd(denom, Fraction(c).denominator)
        ints = [int(Fraction(c) * denom) for c in mod]
        if ints[0] == 0:
            return False
        for num in _divisors(ints[0]):
            for den in _divisors(ints[-1]):
                for sign in (1, -1):
                    root = Fraction(sign * num, den)
                    if sum(Fraction(c) * root ** i for i, c in enumerate(ints)) == 0:
                        return False
        return True

    # ----------------------------------------------------- raw element arithmetic

    def coerce(self, value):
        """Canonical raw form of ``value`` (int, Fraction, "n/d", list, Scalar)."""
        if isinstance(value, Scalar):
            if value.field != self:
                raise MixedFields(f"scalar over {value.field} used in {self}")
            return value.value
        k = self.extension_degree
        if k == 1:
            if isinstance(value, (list, tuple)):
                raise FieldError(f"coefficient list given for {self}")
            return self._base_coerce(value)
        if isinstance(value, (list, tuple)):
            coeffs = [self._base_coerce(c) for c in value]
            return self._reduce(coeffs)
        return (self._base_coerce(value),) + (self._base_zero(),) * (k - 1)

    def element(self, value) -> "Scalar":
        return Scalar(self, value)

    def from_int(self, n: int):
        return self.coerce(n)

    def is_zero(self, a) -> bool:
        return a == self.zero

    def add(self, a, b):
        if self.extension_degree == 1:
            return self._base_add(a, b)
        return tuple(self._base_add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        if self.extension_degree == 1:
            return self._base_sub(a, b)
        return tuple(self._base_sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        if self.extension_degree == 1:
            return self._base_neg(a)
        return tuple(self._base_neg(x) for x in a)

    def mul(self, a, b):
        if self.extension_degree == 1:
            return self._base_mul(a, b)
        prod = self._poly_mul(list(a), list(b))
        return self._reduce(prod)

    def inv(self, a):
        if self.extension_degree == 1:
            return self._base_inv(a)
        if a == self.zero:
            raise ZeroInverse("inverse of zero")
        # extended Euclid in K[t]
        r0, r1 = list(self.modulus), self._poly_trim(list(a))
        s0, s1 = [], [self._base_one()]
        while r1:
            q, r = self._poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self._poly_sub(s0, self._poly_mul(q, s1))
        c = self._base_inv(r0[0])
        return self._reduce([self._base_mul(c, x) for x in s0])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def dot(self, xs: Sequence, ys: Sequence):
        """Raw inner product sum(x*y)."""
        p = self.characteristic
        if self.extension_degree == 1:
            acc = sum(x * y for x, y in zip(xs, ys))
            return acc % p if p else Fraction(acc)
        acc = self.zero
        for x, y in zip(xs, ys):
            if x != self.zero and y != self.zero:
                acc = self.add(acc, self.mul(x, y))
        return acc

    def power(self, a, e: int):
        if e < 0:
            return self.power(self.inv(a), -e)
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def elements(self) -> Iterator:
        """All raw elements of a finite field, in canonical order (0, 1, ..., then t, ...)."""
        if not self.is_finite:
            raise UnsupportedField("cannot enumerate an infinite field")
        p = self.characteristic
        k = self.extension_degree
        if k == 1:
            yield from range(p)
            return
        for idx in range(p ** k):
            yield tuple((idx // p ** j) % p for j in range(k))

    def random(self, rng: np.random.Generator, height: int = 9):
        """Random raw element; rationals draw num in [-height, height], den in [1, 5]."""
        p = self.characteristic
        k = self.extension_degree
        if p:
            draws = [int(v) for v in rng.integers(0, p, size=k)]
        else:
            draws = [
                Fraction(int(rng.integers(-height, height + 1)), int(rng.integers(1, 6)))
                for _ in range(k)
            ]
        return draws[0] if k == 1 else tuple(draws)

    def is_square(self, a) -> bool:
        if self.is_finite:
            return any(self.mul(y, y) == a for y in self.elements())
        if self.extension_degree > 1:
            raise UnsupportedField("square test over a rational extension")
        if a < 0:
            return False
        num, den = a.numerator, a.denominator
        return isqrt(num) ** 2 == num and isqrt(den) ** 2 == den

    def literal(self, a):
        """JSON form of a raw element."""
        if self.extension_degree > 1:
            return [self._base_literal(c) for c in a]
        return self._base_literal(a)

    def format(self, a) -> str:
        if self.extension_degree == 1:
            return str(a)
        return _poly_str(a, var="t", skip_zero=True) or "0"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _poly_str(coeffs, var: str = "t", skip_zero: bool = False) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(var if c == 1 else f"{c}{var}")
        else:
            terms.append(f"{var}^{i}" if c == 1 else f"{c}{var}^{i}")
    return "+".join(reversed(terms))


class Scalar:
    """A field element together with its field."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value):
        self.field = field
        self.value = field.coerce(value)

    @classmethod
    def _raw(cls, field: FieldSpec, raw) -> "Scalar":
        obj = cls.__new__(cls)
        obj.field = field
        obj.value = raw
        return obj

    def _other(self, other):
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar._raw(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar._raw(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return Scalar._raw(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            return other.scale(self)
        return Scalar._raw(self.field, self.field.mul(self.value, self._other(other)))

    def __rmul__(self, other):
        return Scalar._raw(self.field, self.field.mul(self._other(other), self.value))

    def __truediv__(self, other):
        return Scalar._raw(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return Scalar._raw(self.field, self.field.div(self._other(other), self.value))

    def __neg__(self):
        return Scalar._raw(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return Scalar._raw(self.field, self.field.power(self.value, e))

    def inverse(self) -> "Scalar":
        return Scalar._raw(self.field, self.field.inv(self.value))

    def __bool__(self):
        return self.value != self.field.zero

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def literal(self):
        return self.field.literal(self.value)

    def __repr__(self):
        return f"Scalar({self.field.format(self.value)} in {self.field})"

    def __str__(self):
        return self.field.format(self.value)


def field_inverse(x: Scalar) -> Scalar:
    """Multiplicative inverse; raises ``ZeroInverse`` for 0."""
    return x.inverse()


class ExactMatrix:
    """Dense m x k matrix over a FieldSpec with entries in raw canonical form.

    Instances are immutable. ``@`` is the matrix product; ``*`` with a scalar
    scales.
    """

    __slots__ = ("field", "rows", "cols", "_data", "_hash")

    def __init__(self, field: FieldSpec, rows: int, cols: int, data: Sequence):
        if len(data) != rows * cols:
            raise ShapeMismatch(f"{len(data)} entries for a {rows}x{cols} matrix")
        self.field = field
        self.rows = rows
        self.cols = cols
        self._data = tuple(data)
        self._hash = None

    # ------------------------------------------------------------ constructors

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        m = len(rows)
        k = len(rows[0]) if rows else 0
        if any(len(r) != k for r in rows):
            raise ShapeMismatch("ragged rows")
        return cls(field, m, k, [field.coerce(x) for r in rows for x in r])

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: Optional[int] = None) -> "ExactMatrix":
        cols = rows if cols is None else cols
        return cls(field, rows, cols, [field.zero] * (rows * cols))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "ExactMatrix":
        data = [field.zero] * (n * n)
        for i in range(n):
            data[i * n + i] = field.one
        return cls(field, n, n, data)

    @classmethod
    def unit(cls, field: FieldSpec, n: int, i: int, j: int) -> "ExactMatrix":
        """Matrix unit E_ij (zero-based indices) of size n x n."""
        data = [field.zero] * (n * n)
        data[i * n + j] = field.one
        return cls(field, n, n, data)

    @classmethod
    def diagonal(cls, field: FieldSpec, values: Sequence) -> "ExactMatrix":
        n = len(values)
        data = [field.zero] * (n * n)
        for i, v in enumerate(values):
            data[i * n + i] = field.coerce(v)
        return cls(field, n, n, data)

    @classmethod
    def from_vector(cls, field: FieldSpec, n: int, vec: Sequence) -> "ExactMatrix":
        """Inverse of row-major ``vectorize`` for n x n matrices."""
        return cls(field, n, n, vec)

    @classmethod
    def from_numpy(cls, field: FieldSpec, arr: np.ndarray) -> "ExactMatrix":
        if not field.is_prime_field:
            raise UnsupportedField("numpy round trip is for prime fields")
        if not np.issubdtype(arr.dtype, np.integer):
            raise FieldError(f"numpy array of dtype {arr.dtype} is not an exact literal")
        m, k = arr.shape
        return cls(field, m, k, [int(x) % field.characteristic for x in arr.reshape(-1)])

    @classmethod
    def from_literal(cls, obj: dict) -> "ExactMatrix":
        field = FieldSpec.from_literal(obj)
        return cls.from_rows(field, obj["rows"])

    # ---------------------------------------------------------------- access

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int):
        return self._data[i * self.cols + j]

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return Scalar._raw(self.field, self.entry(i, j))

    def row(self, i: int) -> Tuple:
        return self._data[i * self.cols:(i + 1) * self.cols]

    def row_lists(self) -> List[List]:
        return [list(self.row(i)) for i in range(self.rows)]

    def vectorize(self) -> Tuple:
        return self._data

    def to_numpy(self) -> np.ndarray:
        if not self.field.is_prime_field:
            raise UnsupportedField("numpy view is for prime fields")
        return np.array(self._data, dtype=np.int64).reshape(self.rows, self.cols)

    def to_literal(self) -> dict:
        obj = self.field.to_literal()
        obj["rows"] = [[self.field.literal(x) for x in self.row(i)] for i in range(self.rows)]
        return obj

    # ------------------------------------------------------------ arithmetic

    def _check_same(self, other: "ExactMatrix"):
        if not isinstance(other, ExactMatrix):
            raise TypeError(f"expected ExactMatrix, got {type(other).__name__}")
        if other.field != self.field:
            raise MixedFields(f"{self.field} vs {other.field}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} + {other.shape}")
        add = self.field.add
        return ExactMatrix(self.field, self.rows, self.cols,
                           [add(x, y) for x, y in zip(self._data, other._data)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} - {other.shape}")
        sub = self.field.sub
        return ExactMatrix(self.field, self.rows, self.cols,
                           [sub(x, y) for x, y in zip(self._data, other._data)])

    def __neg__(self) -> "ExactMatrix":
        neg = self.field.neg
        return ExactMatrix(self.field, self.rows, self.cols, [neg(x) for x in self._data])

    def scale(self, c) -> "ExactMatrix":
        c = self.field.coerce(c)
        mul = self.field.mul
        return ExactMatrix(self.field, self.rows, self.cols, [mul(c, x) for x in self._data])

    def __mul__(self, c) -> "ExactMatrix":
        if isinstance(c, ExactMatrix):
            raise TypeError("use @ for the matrix product")
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.shape} @ {other.shape}")
        m, k, l = self.rows, self.cols, other.cols
        dot = self.field.dot
        cols = [other._data[j::l] for j in range(l)]
        data = []
        for i in range(m):
            r = self._data[i * k:(i + 1) * k]
            data.extend(dot(r, c) for c in cols)
        return ExactMatrix(self.field, m, l, data)

    def transpose(self) -> "ExactMatrix":
        m, k = self.rows, self.cols
        return ExactMatrix(self.field, k, m, [self._data[i * k + j] for j in range(k) for i in range(m)])

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def trace_raw(self):
        if not self.is_square:
            raise ShapeMismatch("trace of a non-square matrix")
        acc = self.field.zero
        for i in range(self.rows):
            acc = self.field.add(acc, self.entry(i, i))
        return acc

    def trace(self) -> Scalar:
        return Scalar._raw(self.field, self.trace_raw())

    def is_zero(self) -> bool:
        zero = self.field.zero
        return all(x == zero for x in self._data)

    def is_idempotent(self) -> bool:
        return self.is_square and self @ self == self

    def power(self, m: int) -> "ExactMatrix":
        if not self.is_square:
            raise ShapeMismatch("power of a non-square matrix")
        if m < 0:
            return self.inverse().power(-m)
        result = ExactMatrix.identity(self.field, self.rows)
        base = self
        while m:
            if m & 1:
                result = result @ base
            base = base @ base
            m >>= 1
        return result

    def inverse(self) -> "ExactMatrix":
        if not self.is_square:
            raise ShapeMismatch("inverse of a non-square matrix")
        n = self.rows
        ident = ExactMatrix.identity(self.field, n).row_lists()
        _, pivots, transform = _row_reduce(self.field, self.row_lists(), n, ident)
        if len(pivots) < n:
            raise SingularMatrix("matrix is singular")
        return ExactMatrix(self.field, n, n, [x for r in transform for x in r])

    def det(self) -> Scalar:
        if not self.is_square:
            raise ShapeMismatch("determinant of a non-square matrix")
        f = self.field
        n = self.rows
        rows = self.row_lists()
        acc = f.one
        for c in range(n):
            piv = next((i for i in range(c, n) if rows[i][c] != f.zero), None)
            if piv is None:
                return Scalar._raw(f, f.zero)
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                acc = f.neg(acc)
            acc = f.mul(acc, rows[c][c])
            inv = f.inv(rows[c][c])
            for i in range(c + 1, n):
                if rows[i][c] != f.zero:
                    factor = f.mul(rows[i][c], inv)
                    rows[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(rows[i], rows[c])]
        return Scalar._raw(f, acc)

    def embed(self, target: FieldSpec) -> "ExactMatrix":
        """Image under the inclusion of the base field into an extension ``target``."""
        if target == self.field:
            return self
        if (target.characteristic != self.field.characteristic
                or self.field.extension_degree != 1):
            raise MixedFields(f"{self.field} does not embed in {target}")
        return ExactMatrix(target, self.rows, self.cols, [target.coerce(x) for x in self._data])

    # ------------------------------------------------------------ comparison

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and self._data == other._data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self):
        body = "; ".join(
            " ".join(self.field.format(x) for x in self.row(i)) for i in range(self.rows)
        )
        return f"ExactMatrix([{body}] over {self.field})"


def random_matrix(field: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> ExactMatrix:
    return ExactMatrix(field, rows, cols, [field.random(rng) for _ in range(rows * cols)])


# --------------------------------------------------------------- elimination


def _row_reduce(field: FieldSpec, rows: List[List], ncols: int,
                transform: Optional[List[List]] = None):
    """Gauss-Jordan elimination on raw rows.

    Returns ``(rref_rows, pivots, transform)``; when ``transform`` is given it is
    updated in lock step, so that ``transform_out @ rows_in == rref``.
    """
    rows = [list(r) for r in rows]
    if transform is not None:
        transform = [list(r) for r in transform]
    m = len(rows)
    zero = field.zero
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c] != zero), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            if transform is not None:
                transform[r], transform[piv] = transform[piv], transform[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        if transform is not None:
            transform[r] = [field.mul(inv, x) for x in transform[r]]
        for i in range(m):
            if i == r or rows[i][c] == zero:
                continue
            factor = rows[i][c]
            rows[i] = [field.sub(x, field.mul(factor, y)) for x, y in zip(rows[i], rows[r])]
            if transform is not None:
                transform[i] = [field.sub(x, field.mul(factor, y))
                                for x, y in zip(transform[i], transform[r])]
        pivots.append(c)
        r += 1
    return rows, pivots, transform


def nullspace(field: FieldSpec, rows: List[List], ncols: int) -> List[Tuple]:
    """Basis of {x : rows . x = 0} as raw tuples."""
    rref, pivots, _ = _row_reduce(field, rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [field.zero] * ncols
        vec[free] = field.one
        for i, pc in enumerate(pivots):
            vec[pc] = field.neg(rref[i][free])
        basis.append(tuple(vec))
    return basis


class RankProfile(NamedTuple):
    rank: int
    rref: ExactMatrix
    pivots: Tuple[int, ...]


def rank_profile(a: ExactMatrix) -> RankProfile:
    """Rank, reduced row-echelon form and pivot columns of ``a``."""
    rows, pivots, _ = _row_reduce(a.field, a.row_lists(), a.cols)
    rref = ExactMatrix(a.field, a.rows, a.cols, [x for r in rows for x in r])
    return RankProfile(len(pivots), rref, tuple(pivots))


def rank(a: ExactMatrix) -> int:
    return rank_profile(a).rank


class PowerTail(NamedTuple):
    """Eventual periodicity of a, a^2, a^3, ... over a finite field.

    ``powers`` holds a^1 .. a^(preperiod + period - 1); the cycle is its tail.
    """

    preperiod: int
    period: int
    powers: Tuple[ExactMatrix, ...]

    @property
    def cycle(self) -> Tuple[ExactMatrix, ...]:
        return self.powers[self.preperiod - 1:]

    def idempotent_power(self) -> ExactMatrix:
        """a^j for the unique j in the cycle window divisible by the period."""
        j = self.period * -(-self.preperiod // self.period)
        return self.powers[j - 1]


def power_tail(a: ExactMatrix) -> PowerTail:
    """Minimal (mu, lambda) with a^(m+lambda) = a^m for all m >= mu."""
    if not a.is_square:
        raise ShapeMismatch("power tail of a non-square matrix")
    if not a.field.is_finite:
        raise UnsupportedField("power sequences over characteristic 0 need not be periodic")
    seen = {}
    powers = []
    x = a
    j = 1
    while x not in seen:
        seen[x] = j
        powers.append(x)
        x = x @ a
        j += 1
    mu = seen[x]
    return PowerTail(mu, j - mu, tuple(powers))


def rank_factorization(a: ExactMatrix) -> ExactMatrix:
    """A reflexive generalised inverse b of ``a`` from a = P [I_r 0; 0 0] Q.

    Row reduction gives E a = R with E invertible; column operations C with
    R C = [I_r 0; 0 0] finish the normal form, so P = E^-1 and Q = C^-1 and
    b = Q^-1 [I_r 0; 0 0]^T P^-1 = C[:, :r] E[:r, :].
    """
    f = a.field
    m, k = a.rows, a.cols
    ident = ExactMatrix.identity(f, m).row_lists()
    rref, pivots, transform = _row_reduce(f, a.row_lists(), k, ident)
    r = len(pivots)
    if r == 0:
        return ExactMatrix.zeros(f, k, m)
    c_cols = []
    for pc in pivots:
        col = [f.zero] * k
        col[pc] = f.one
        c_cols.append(col)
    # only the first r columns of C enter b
    c_left = ExactMatrix(f, k, r, [c_cols[j][i] for i in range(k) for j in range(r)])
    e_top = ExactMatrix(f, r, m, [x for row in transform[:r] for x in row])
    return c_left @ e_top
