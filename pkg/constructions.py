"""Idempotent frames, weight projections and the structural MS certifier.

An orthogonal idempotent frame e_1..e_t splits M_n into blocks e_i M e_j.
Grouping the frame into parts with distinct rational values f(P) turns block
(P, Q) into a weight space of weight f(P) - f(Q); positive weights select a
triangular half of the block decomposition.

``thm21_certify`` checks the three structural hypotheses that make a subspace
an MS without scanning it: a weighted rank condition on Lambda, containment of
V and of its weight-zero part in Lambda-perp, and vanishing of products between
positive and negative weight parts.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from algebra import ExactMatrix, FieldSpec, Scalar, rank
from errors import (
    BadBlocks,
    FamilyMismatch,
    HypothesisFailed,
    InternalContractViolation,
    InvalidFrame,
    InvalidPart,
    ParameterViolation,
    ProductZero,
    RankOutOfRange,
    SigmaConditionFailed,
)
from subspace import MatSubspace, span_of, span_sum, intersect, trace_orthogonal, zero_space

logger = logging.getLogger(__name__)


# ------------------------------------------------------------------- frames


@dataclass(frozen=True)
class IdempotentFrame:
    """Orthogonal idempotents summing to the identity."""

    idempotents: Tuple[ExactMatrix, ...]

    def __post_init__(self):
        if not self.idempotents:
            raise InvalidFrame("empty frame")
        self.validate()

    @classmethod
    def standard(cls, field: FieldSpec, ranks: Sequence[int]) -> "IdempotentFrame":
        """Coordinate-block idempotents diag(0..0, 1..1, 0..0) with the given ranks."""
        if any(r < 1 for r in ranks):
            raise RankOutOfRange(f"frame ranks must be positive, got {list(ranks)}")
        n = sum(ranks)
        out = []
        start = 0
        for r in ranks:
            diag = [1 if start <= i < start + r else 0 for i in range(n)]
            out.append(ExactMatrix.diagonal(field, diag))
            start += r
        return cls(tuple(out))

    @property
    def field(self) -> FieldSpec:
        return self.idempotents[0].field

    @property
    def n(self) -> int:
        return self.idempotents[0].rows

    @cached_property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(rank(e) for e in self.idempotents)

    def __len__(self):
        return len(self.idempotents)

    def validate(self):
        es = self.idempotents
        n = es[0].rows
        total = ExactMatrix.zeros(es[0].field, n)
        for i, e in enumerate(es):
            if not e.is_idempotent():
                raise InvalidFrame(f"e_{i + 1} is not idempotent")
            if e.is_zero():
                raise InvalidFrame(f"e_{i + 1} is zero")
            for j, other in enumerate(es):
                if i != j and not (e @ other).is_zero():
                    raise InvalidFrame(f"e_{i + 1} e_{j + 1} != 0")
            total = total + e
        if total != ExactMatrix.identity(es[0].field, n):
            raise InvalidFrame("frame does not sum to the identity")

    def conjugate(self, g: ExactMatrix) -> "IdempotentFrame":
        g_inv = g.inverse()
        return IdempotentFrame(tuple(g @ e @ g_inv for e in self.idempotents))


@dataclass(frozen=True)
class GroupedFrame:
    """A frame partitioned into parts, each part carrying a rational f-value.

    ``parts`` holds zero-based frame indices. Distinct f-values make every
    nonzero weight f(P) - f(Q) nonzero.
    """

    frame: IdempotentFrame
    parts: Tuple[Tuple[int, ...], ...]
    f_values: Tuple[Fraction, ...]

    def __post_init__(self):
        covered = sorted(i for part in self.parts for i in part)
        if covered != list(range(len(self.frame))):
            raise InvalidFrame(f"parts {self.parts} do not partition the frame")
        if len(self.f_values) != len(self.parts):
            raise InvalidFrame("one f-value per part is required")
        if len(set(self.f_values)) != len(self.f_values):
            raise InvalidFrame(f"f-values {self.f_values} are not distinct")

    @classmethod
    def singletons(cls, frame: IdempotentFrame) -> "GroupedFrame":
        """Each idempotent its own part, f(e_i) = i."""
        t = len(frame)
        return cls(frame, tuple((i,) for i in range(t)), tuple(Fraction(i + 1) for i in range(t)))

    @property
    def field(self) -> FieldSpec:
        return self.frame.field

    @property
    def n(self) -> int:
        return self.frame.n

    @cached_property
    def part_idempotents(self) -> Tuple[ExactMatrix, ...]:
        out = []
        for part in self.parts:
            acc = ExactMatrix.zeros(self.field, self.n)
            for i in part:
                acc = acc + self.frame.idempotents[i]
            out.append(acc)
        return tuple(out)

    @cached_property
    def part_ranks(self) -> Tuple[int, ...]:
        ranks = self.frame.ranks
        return tuple(sum(ranks[i] for i in part) for part in self.parts)

    def weight(self, from_part: int, to_part: int) -> Fraction:
        return self.f_values[from_part] - self.f_values[to_part]

    def positive_weights(self) -> List[Tuple[int, int]]:
        """Ordered part pairs (P, Q) with f(P) - f(Q) > 0."""
        s = len(self.parts)
        return [(a, b) for a in range(s) for b in range(s) if self.weight(a, b) > 0]

    def centralizer(self) -> MatSubspace:
        """Weight-zero space: the sum of the diagonal part blocks e_P M e_P."""
        acc = zero_space(self.field, self.n)
        for e in self.part_idempotents:
            acc = span_sum(acc, block_space(e, e))
        return acc


@dataclass(frozen=True)
class LambdaSpec:
    """One coefficient per part; Lambda = sum sigma_P e_P."""

    grouped: GroupedFrame
    sigmas: Tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.sigmas) != len(self.grouped.parts):
            raise InvalidFrame("one sigma per part is required")

    @classmethod
    def build(cls, grouped: GroupedFrame, sigmas: Sequence) -> "LambdaSpec":
        f = grouped.field
        return cls(grouped, tuple(f.element(s) for s in sigmas))

    @cached_property
    def matrix(self) -> ExactMatrix:
        acc = ExactMatrix.zeros(self.grouped.field, self.grouped.n)
        for s, e in zip(self.sigmas, self.grouped.part_idempotents):
            acc = acc + e.scale(s)
        return acc

    def perp(self) -> MatSubspace:
        return trace_orthogonal(span_of([self.matrix]))


# -------------------------------------------------------------- projections


def _check_part(g: GroupedFrame, part: int):
    if not 0 <= part < len(g.parts):
        raise InvalidPart(f"part {part} outside 0..{len(g.parts) - 1}")


def weight_project(a: ExactMatrix, g: GroupedFrame, from_part: int, to_part: int) -> ExactMatrix:
    """e_P a e_Q, the component of a of weight f(P) - f(Q)."""
    _check_part(g, from_part)
    _check_part(g, to_part)
    es = g.part_idempotents
    return es[from_part] @ a @ es[to_part]


def project_zero(a: ExactMatrix, g: GroupedFrame) -> ExactMatrix:
    acc = ExactMatrix.zeros(a.field, a.rows)
    for e in g.part_idempotents:
        acc = acc + e @ a @ e
    return acc


def block_space(ei: ExactMatrix, ej: ExactMatrix) -> MatSubspace:
    """e_i M_n e_j for arbitrary idempotents."""
    n = ei.rows
    f = ei.field
    gens = [ei @ ExactMatrix.unit(f, n, k, l) @ ej for k in range(n) for l in range(n)]
    return span_of(gens, field=f, n=n)


# --------------------------------------------------------- sigma condition


def sigma_condition_witness(sigmas: Sequence[Scalar], ranks: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """First nonzero k with 0 <= k_P <= rank_P and sum k_P sigma_P = 0, or None."""
    f = sigmas[0].field
    for ks in itertools.product(*(range(r + 1) for r in ranks)):
        if not any(ks):
            continue
        acc = f.element(0)
        for k, s in zip(ks, sigmas):
            acc = acc + s * k
        if not acc:
            return ks
    return None


def _require_sigma(sigmas: Sequence[Scalar], ranks: Sequence[int]):
    witness = sigma_condition_witness(sigmas, ranks)
    if witness is not None:
        raise SigmaConditionFailed(
            f"sum k_i sigma_i vanishes at k = {witness} for sigma = {[str(s) for s in sigmas]}",
            witness=witness,
        )


@dataclass
class Thm21Certificate:
    """Record of the verified structural hypotheses."""

    part_ranks: Tuple[int, ...]
    sigma_tuples_checked: int
    containment_checked: int
    positive_weights: List[Tuple[int, int]]
    products_checked: int
    valid: bool = True

    def to_dict(self) -> Dict:
        return {
            "valid": self.valid,
            "sigma_range": list(self.part_ranks),
            "sigma_tuples_checked": self.sigma_tuples_checked,
            "containment_checked": self.containment_checked,
            "positive_weights": [list(w) for w in self.positive_weights],
            "products_checked": self.products_checked,
        }


def thm21_certify(v: MatSubspace, g: GroupedFrame, lam: LambdaSpec) -> Thm21Certificate:
    """Verify the structural hypotheses; raise ``HypothesisFailed`` on the first failure.

    Idempotents of the block-diagonal centralizer have trace k_P * 1_F in each
    part, so Tr(Lambda e) != 0 for all of them reduces to the integer tuple test.
    """
    ranks = g.part_ranks
    witness = sigma_condition_witness(lam.sigmas, ranks)
    if witness is not None:
        raise HypothesisFailed("sigma", witness)
    tuples = 1
    for r in ranks:
        tuples *= r + 1
    perp = lam.perp()
    for i, b in enumerate(v.basis):
        if not perp.contains(b):
            raise HypothesisFailed("containment", i, f"basis element {i} is not in Lambda-perp")
        if not perp.contains(project_zero(b, g)):
            raise HypothesisFailed("projected_containment", i,
                                   f"weight-zero part of basis element {i} is not in Lambda-perp")
    positive = g.positive_weights()
    checked = 0
    for (p1, q1), (p2, q2) in itertools.product(positive, repeat=2):
        for i, b in enumerate(v.basis):
            left = weight_project(b, g, p1, q1)
            if left.is_zero():
                continue
            for j, c in enumerate(v.basis):
                # -omega' is the reversed pair
                right = weight_project(c, g, q2, p2)
                checked += 1
                if not (left @ right).is_zero():
                    raise HypothesisFailed("products", ((p1, q1), (p2, q2), i, j))
    logger.debug("certificate: %d sigma tuples, %d product pairs", tuples - 1, checked)
    return Thm21Certificate(ranks, tuples - 1, v.dim, positive, checked)


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class TwoBlockFamily:
    """Frame (e_1, e_2, e_3) with parts {e_1, e_2} and {e_3}, coefficients sigma_1, sigma_2.

    V = (Z ∩ Lambda-perp) + e_1 M e_3 + e_3 M e_2 where Z is the centralizer of
    the parts and Lambda = sigma_1 (e_1 + e_2) + sigma_2 e_3. e_1 or e_2 may be 0.
    """

    e1: ExactMatrix
    e2: ExactMatrix
    e3: ExactMatrix
    n1: int
    n2: int
    n3: int
    s1: Scalar
    s2: Scalar

    @property
    def field(self) -> FieldSpec:
        return self.e3.field

    @property
    def n(self) -> int:
        return self.e3.rows

    @cached_property
    def lam(self) -> ExactMatrix:
        return (self.e1 + self.e2).scale(self.s1) + self.e3.scale(self.s2)

    @cached_property
    def centralizer(self) -> MatSubspace:
        ep = self.e1 + self.e2
        return span_sum(block_space(ep, ep), block_space(self.e3, self.e3))

    @cached_property
    def lam_perp(self) -> MatSubspace:
        return trace_orthogonal(span_of([self.lam]))

    @cached_property
    def core(self) -> MatSubspace:
        """Z ∩ Lambda-perp."""
        return intersect(self.centralizer, self.lam_perp)

    @cached_property
    def subspace(self) -> MatSubspace:
        return span_sum(span_sum(self.core, block_space(self.e1, self.e3)), block_space(self.e3, self.e2))

    def transposed(self) -> "TwoBlockFamily":
        """The family on (e_2^T, e_1^T, e_3^T); it contains exactly the transposes of V."""
        return TwoBlockFamily(self.e2.T, self.e1.T, self.e3.T, self.n2, self.n1, self.n3, self.s1, self.s2)

    def conjugate(self, g: ExactMatrix) -> "TwoBlockFamily":
        g_inv = g.inverse()
        return TwoBlockFamily(g @ self.e1 @ g_inv, g @ self.e2 @ g_inv, g @ self.e3 @ g_inv,
                              self.n1, self.n2, self.n3, self.s1, self.s2)

    def grouped(self) -> GroupedFrame:
        nonzero = [e for e in (self.e1, self.e2) if not e.is_zero()]
        frame = IdempotentFrame(tuple(nonzero) + (self.e3,))
        first = tuple(range(len(nonzero)))
        return GroupedFrame(frame, (first, (len(nonzero),)), (Fraction(1), Fraction(3)))

    def to_dict(self) -> Dict:
        return {
            "n1": self.n1, "n2": self.n2, "n3": self.n3,
            "s1": self.s1.literal(), "s2": self.s2.literal(),
            "e1": self.e1.to_literal(), "e2": self.e2.to_literal(), "e3": self.e3.to_literal(),
        }


@dataclass
class FamilyInstance:
    """A built family member with its frame data and structural certificate.

    Unpacks as ``V, g, lam = instance``.
    """

    name: str
    subspace: MatSubspace
    grouped: GroupedFrame
    lam: LambdaSpec
    params: Dict
    certificate: Thm21Certificate
    family: Optional[TwoBlockFamily] = None

    def __iter__(self) -> Iterator:
        return iter((self.subspace, self.grouped, self.lam))

    def to_dict(self) -> Dict:
        return {
            "family": self.name,
            "params": self.params,
            "subspace": self.subspace.to_literal(),
            "codim": self.subspace.codim,
            "certificate": self.certificate.to_dict(),
        }


def _check_codim(v: MatSubspace, expected: int, what: str):
    if v.codim != expected:
        raise InternalContractViolation(f"{what}: codimension {v.codim}, expected {expected}")


def build_example22(ranks: Sequence[int], sigmas: Sequence, field: FieldSpec,
                    conjugator: Optional[ExactMatrix] = None) -> FamilyInstance:
    """V = (M_0 ∩ Lambda-perp) + sum_{i>j} e_i M e_j on a block-diagonal frame, f(e_i) = i."""
    ranks = list(ranks)
    if len(sigmas) != len(ranks):
        raise SigmaConditionFailed("one sigma per frame idempotent is required")
    sig = tuple(field.element(s) for s in sigmas)
    _require_sigma(sig, ranks)
    frame = IdempotentFrame.standard(field, ranks)
    if conjugator is not None:
        frame = frame.conjugate(conjugator)
    grouped = GroupedFrame.singletons(frame)
    lam = LambdaSpec(grouped, sig)
    es = frame.idempotents
    v = intersect(grouped.centralizer(), lam.perp())
    for i in range(len(es)):
        for j in range(i):
            v = span_sum(v, block_space(es[i], es[j]))
    expected = 1 + sum(ranks[i] * ranks[j] for i in range(len(ranks)) for j in range(i + 1, len(ranks)))
    _check_codim(v, expected, "lower-triangular family")
    cert = thm21_certify(v, grouped, lam)
    params = {"ranks": ranks, "sigmas": [s.literal() for s in sig], "field": field.to_literal()}
    logger.info("built ex22 ranks=%s over %s: dim %d", ranks, field, v.dim)
    return FamilyInstance("ex22", v, grouped, lam, params, cert)


@dataclass
class Example23:
    """U = F(u + w) + V for a three-part ex22 member V."""

    base: FamilyInstance
    u: ExactMatrix
    w: ExactMatrix
    subspace: MatSubspace
    corner_vanishes: bool

    def to_dict(self) -> Dict:
        return {
            "family": "ex23",
            "base": self.base.to_dict(),
            "u": self.u.to_literal(),
            "w": self.w.to_literal(),
            "subspace": self.subspace.to_literal(),
            "corner_vanishes": self.corner_vanishes,
        }


def build_example23_extension(base: FamilyInstance, u: ExactMatrix, w: ExactMatrix) -> Example23:
    if base.name != "ex22" or len(base.grouped.frame) < 3:
        raise FamilyMismatch("the extension needs an ex22 member with at least three idempotents")
    e1, e2, e3 = base.grouped.frame.idempotents[:3]
    if e1 @ u @ e2 != u:
        raise BadBlocks("u must lie in e_1 M e_2")
    if e2 @ w @ e3 != w:
        raise BadBlocks("w must lie in e_2 M e_3")
    if (u @ w).is_zero():
        raise ProductZero("u w = 0")
    v = base.subspace
    ext = v.extend(u + w)
    if ext.dim != v.dim + 1:
        raise InternalContractViolation("u + w already lies in V")
    corner = all((e1 @ b @ e3).is_zero() for b in ext.basis)
    return Example23(base, u, w, ext, corner)


def _two_block_instance(name: str, family: TwoBlockFamily, params: Dict) -> FamilyInstance:
    grouped = family.grouped()
    lam = LambdaSpec(grouped, (family.s1, family.s2))
    v = family.subspace
    _check_codim(v, (family.n1 + family.n2) * family.n3 + 1, f"{name} family")
    cert = thm21_certify(v, grouped, lam)
    logger.info("built %s over %s: dim %d, codim %d", name, family.field, v.dim, v.codim)
    return FamilyInstance(name, v, grouped, lam, params, cert, family)


def _two_block_family(n1: int, n2: int, n3: int, s1, s2, field: FieldSpec) -> TwoBlockFamily:
    if min(n1, n2) < 0 or n3 < 1 or n1 + n2 < 1:
        raise RankOutOfRange(f"ranks ({n1}, {n2}, {n3}) are not admissible")
    a = field.element(s1)
    b = field.element(s2)
    if a == b:
        raise SigmaConditionFailed("sigma_1 = sigma_2", witness=(1, 1))
    _require_sigma((a, b), (n1 + n2, n3))
    n = n1 + n2 + n3

    def diag(lo, hi):
        return ExactMatrix.diagonal(field, [1 if lo <= i < hi else 0 for i in range(n)])

    return TwoBlockFamily(diag(0, n1), diag(n1, n1 + n2), diag(n1 + n2, n), n1, n2, n3, a, b)


def build_example24(n1: int, n2: int, n3: int, s1, s2, field: FieldSpec,
                    conjugator: Optional[ExactMatrix] = None) -> FamilyInstance:
    """(Z ∩ Lambda-perp) + e_1 M e_3 + e_3 M e_2 on parts {e_1, e_2}, {e_3} with f = (1, 3)."""
    family = _two_block_family(n1, n2, n3, s1, s2, field)
    if conjugator is not None:
        family = family.conjugate(conjugator)
    params = {"n1": n1, "n2": n2, "n3": n3, "s1": family.s1.literal(), "s2": family.s2.literal(),
              "field": field.to_literal()}
    return _two_block_instance("ex24", family, params)


def build_cor26(n: int, r: int, s1, s2, field: FieldSpec,
                conjugator: Optional[ExactMatrix] = None) -> FamilyInstance:
    """span{sigma_1 e_1 + sigma_2 e_2, e_1 M e_2}-perp with e_1 = diag(I_r, 0).

    This is the two-part member with e_2 = 0, the second idempotent playing the
    role of e_3.
    """
    if not 0 < r < n:
        raise RankOutOfRange(f"need 0 < r < n, got r={r}, n={n}")
    family = _two_block_family(r, 0, n - r, s1, s2, field)
    if conjugator is not None:
        family = family.conjugate(conjugator)
    e1, e2 = family.e1, family.e3
    gens = [family.e1.scale(family.s1) + family.e3.scale(family.s2)]
    gens.extend(block_space(e1, e2).basis)
    v = trace_orthogonal(span_of(gens))
    if v != family.subspace:
        raise InternalContractViolation("orthogonal-complement form disagrees with the block form")
    params = {"n": n, "r": r, "s1": family.s1.literal(), "s2": family.s2.literal(),
              "field": field.to_literal()}
    return _two_block_instance("cor26", family, params)


FAMILIES = ("ex22", "ex23", "ex24", "cor26")


def _ints(params: Dict, *keys: str) -> List:
    out = []
    for key in keys:
        if key not in params:
            raise ParameterViolation(f"missing parameter {key!r}")
        value = params[key]
        if key == "ranks" and not isinstance(value, list):
            raise ParameterViolation(f"parameter 'ranks' must be a list, got {value!r}")
        items = value if key == "ranks" else [value]
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in items):
            raise ParameterViolation(f"parameter {key!r} must be an integer, got {value!r}")
        out.append(value)
    return out


def build_from_params(name: str, params: Dict) -> object:
    """Build a family member from a flat JSON parameter object carrying p/k/modulus."""
    if not isinstance(params, dict):
        raise ParameterViolation("family parameters must be a JSON object")
    _ints(params, "p")
    field = FieldSpec.from_literal(params)
    g = params.get("conjugator")
    g = ExactMatrix.from_rows(field, g) if g is not None else None
    if name == "ex22":
        return build_example22(*_ints(params, "ranks"), params["sigmas"], field, g)
    if name == "ex23":
        base = build_example22(*_ints(params, "ranks"), params["sigmas"], field, g)
        u = ExactMatrix.from_rows(field, params["u"])
        w = ExactMatrix.from_rows(field, params["w"])
        return build_example23_extension(base, u, w)
    if name == "ex24":
        n1, n2, n3 = _ints(params, "n1", "n2", "n3")
        return build_example24(n1, n2, n3, params["s1"], params["s2"], field, g)
    if name == "cor26":
        n, r = _ints(params, "n", "r")
        return build_cor26(n, r, params["s1"], params["s2"], field, g)
    raise FamilyMismatch(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")
