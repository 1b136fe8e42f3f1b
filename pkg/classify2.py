"""Maximal MSs of M_2(F): property checks, family generators and the base-change demo."""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from algebra import ExactMatrix, FieldSpec, Scalar
from constructions import build_cor26
from errors import (
    ExcludedParameter,
    NotAnMS,
    NotNilpotent,
    ParameterViolation,
    SquareParameter,
    UnsupportedField,
)
from mscore import (
    MsStatus,
    MsVerdict,
    Method,
    is_maximal_ms,
    ms_by_idempotent_criterion,
    trace_zero_space,
    verdict_from_candidate,
)
from subspace import MatSubspace, span_of

logger = logging.getLogger(__name__)

SPOT_SAMPLES = 50
SPOT_SEED = 42

SPLIT_DISTINCT = "split_distinct"
REPEATED = "repeated"
IRREDUCIBLE = "irreducible"


class FamilyKind(str, Enum):
    TRACE_ZERO_HYPERPLANE = "TraceZeroHyperplane"
    SPLIT_DIAGONAL_PLUS_NILPOTENT = "SplitDiagonalPlusNilpotent"
    UNIPOTENT_LINE = "UnipotentLine"
    CHAR2_PLANE_IN_H = "Char2PlaneInH"


# clause labels used in reports
CLAUSES = {
    FamilyKind.TRACE_ZERO_HYPERPLANE: "i",
    FamilyKind.SPLIT_DIAGONAL_PLUS_NILPOTENT: "ii",
    FamilyKind.UNIPOTENT_LINE: "iii",
    FamilyKind.CHAR2_PLANE_IN_H: "char2-plane",
}


@dataclass
class Classify2Family:
    kind: FamilyKind
    subspace: MatSubspace
    params: Dict = field(default_factory=dict)

    @property
    def clause(self) -> str:
        return CLAUSES[self.kind]

    def to_dict(self) -> Dict:
        return {"kind": self.kind.value, "clause": self.clause, "params": self.params,
                "subspace": self.subspace.to_literal()}


# ----------------------------------------------------------------- spectra


def spectrum_type(a: ExactMatrix) -> str:
    """Root pattern of the characteristic polynomial x^2 - Tr(a) x + det(a) over a finite field."""
    f = a.field
    if not f.is_finite:
        raise UnsupportedField("spectrum test enumerates field elements")
    tr = a.trace().value
    det = a.det().value
    roots = [y for y in f.elements()
             if f.add(f.sub(f.mul(y, y), f.mul(tr, y)), det) == f.zero]
    if len(roots) == 2:
        return SPLIT_DISTINCT
    if len(roots) == 1:
        return REPEATED
    return IRREDUCIBLE


@dataclass
class Lemma31Report:
    part_i_holds: bool
    part_i_violations: List[ExactMatrix] = field(default_factory=list)
    part_ii_applicable: bool = False
    part_ii_holds: Optional[bool] = None
    part_ii_violations: List[Dict] = field(default_factory=list)
    checked: int = 0

    @property
    def vacuous(self) -> bool:
        return self.checked == 0

    def to_dict(self) -> Dict:
        return {
            "part_i_holds": self.part_i_holds,
            "part_i_violations": [a.to_literal() for a in self.part_i_violations],
            "part_ii_applicable": self.part_ii_applicable,
            "part_ii_holds": self.part_ii_holds,
            "part_ii_violations": self.part_ii_violations,
            "trace_nonzero_elements": self.checked,
        }


def lemma31_check(v: MatSubspace, verdict: Optional[MsVerdict] = None) -> Lemma31Report:
    """Every trace-nonzero element of an MS of M_2 is invertible; for planes also report
    whether such elements have distinct eigenvalues in F (this second part depends on
    the field being algebraically closed and is only reported)."""
    if v.n != 2:
        raise UnsupportedField("the check is for subspaces of M_2")
    verdict = verdict or ms_by_idempotent_criterion(v)
    if verdict.status != MsStatus.MS_PROPER:
        raise NotAnMS(f"subspace is not a proper MS ({verdict.status.value})")
    report = Lemma31Report(True, part_ii_applicable=v.dim == 2)
    if report.part_ii_applicable:
        report.part_ii_holds = True
    for a in v.elements():
        if not a.trace():
            continue
        report.checked += 1
        if not a.det():
            report.part_i_holds = False
            report.part_i_violations.append(a)
        if report.part_ii_applicable:
            kind = spectrum_type(a)
            if kind != SPLIT_DISTINCT:
                report.part_ii_holds = False
                report.part_ii_violations.append({"element": a.to_literal(), "spectrum": kind})
    return report


# ---------------------------------------------------------------- families


def _identity(f: FieldSpec) -> ExactMatrix:
    return ExactMatrix.identity(f, 2)


def build_cor32_family(l1, l2, g: Optional[ExactMatrix] = None,
                       field: Optional[FieldSpec] = None) -> MatSubspace:
    """span{l1 e_1 + l2 e_2, e_1 M e_2} with e_i = g E_ii g^-1."""
    if field is None:
        if isinstance(l1, Scalar):
            field = l1.field
        elif g is not None:
            field = g.field
        else:
            raise ParameterViolation("a field is needed for plain integer parameters")
    a = field.element(l1)
    b = field.element(l2)
    if a == b or not a or not b or not (a + b):
        raise ParameterViolation(f"need l1 != l2, both nonzero, l1 + l2 != 0; got ({a}, {b})")
    g = g if g is not None else _identity(field)
    g_inv = g.inverse()
    e1 = g @ ExactMatrix.unit(field, 2, 0, 0) @ g_inv
    e2 = g @ ExactMatrix.unit(field, 2, 1, 1) @ g_inv
    nil = g @ ExactMatrix.unit(field, 2, 0, 1) @ g_inv
    return span_of([e1.scale(a) + e2.scale(b), nil])


def cor32_as_cor26(l1, l2, g: ExactMatrix) -> MatSubspace:
    """The same plane through the two-block family with sigma = (-l2, l1)."""
    f = g.field
    b = f.element(l2)
    return build_cor26(2, 1, -b, f.element(l1), f).subspace.conjugate(g)


def build_cor34_family(c: ExactMatrix) -> MatSubspace:
    """span{I + c} for a nonzero c with c^2 = 0."""
    if c.shape != (2, 2) or c.is_zero() or not (c @ c).is_zero():
        raise NotNilpotent("c must be a nonzero 2x2 matrix with c^2 = 0")
    return span_of([_identity(c.field) + c])


def general_linear_group(f: FieldSpec) -> List[ExactMatrix]:
    """GL_2(F_q) in lexicographic entry order."""
    elems = list(f.elements())
    out = []
    for vec in itertools.product(elems, repeat=4):
        g = ExactMatrix.from_vector(f, 2, vec)
        if g.det():
            out.append(g)
    return out


def _nilpotents(f: FieldSpec) -> List[ExactMatrix]:
    elems = list(f.elements())
    out = []
    for vec in itertools.product(elems, repeat=4):
        c = ExactMatrix.from_vector(f, 2, vec)
        if not c.is_zero() and (c @ c).is_zero():
            out.append(c)
    return out


def _char2_planes(f: FieldSpec) -> List[MatSubspace]:
    h = trace_zero_space(2, f)
    ident = _identity(f)
    planes = {}
    elems = list(h.elements())
    for x, y in itertools.combinations(elems, 2):
        plane = span_of([x, y])
        if plane.dim == 2 and not plane.contains(ident) and plane not in planes:
            planes[plane] = None
    return list(planes)


def predicted_maximal_families(field: FieldSpec, n: int = 2) -> List[Classify2Family]:
    """The classified maximal MSs of M_2(F_q), labelled by clause and deduplicated."""
    if not field.is_finite:
        raise UnsupportedField("parameter enumeration needs a finite field")
    if n != 2:
        raise UnsupportedField("the classification is for M_2")
    out: Dict[MatSubspace, Classify2Family] = {}

    def add(kind: FamilyKind, s: MatSubspace, params: Dict):
        if s not in out:
            out[s] = Classify2Family(kind, s, params)

    one = field.element(1)
    if field.characteristic == 2:
        for plane in _char2_planes(field):
            add(FamilyKind.CHAR2_PLANE_IN_H, plane, {})
    else:
        add(FamilyKind.TRACE_ZERO_HYPERPLANE, trace_zero_space(2, field), {})

    lams = [field.element(x) for x in field.elements()]
    admissible = [b for b in lams if b and b != one and (one + b)]
    if admissible:
        group = general_linear_group(field)
        for b in admissible:
            for g in group:
                add(FamilyKind.SPLIT_DIAGONAL_PLUS_NILPOTENT, build_cor32_family(one, b, g),
                    {"l1": one.literal(), "l2": b.literal()})

    if field.characteristic != 2:
        for c in _nilpotents(field):
            add(FamilyKind.UNIPOTENT_LINE, build_cor34_family(c), {"c": c.to_literal()})
    logger.info("predicted %d maximal MS candidates over %s", len(out), field)
    return list(out.values())


# ------------------------------------------------------------- base change


@dataclass
class BaseChangeDemo:
    base_field: FieldSpec
    s: Scalar
    a: ExactMatrix
    b: ExactMatrix
    subspace: MatSubspace
    base_verdict: MsVerdict
    maximal: bool
    maximal_mode: str
    extension: FieldSpec
    extended: MatSubspace
    c: ExactMatrix
    extension_verdict: MsVerdict

    @property
    def flips(self) -> bool:
        return self.base_verdict.is_ms and not self.extension_verdict.is_ms

    def to_dict(self) -> Dict:
        return {
            "base_field": self.base_field.to_literal(),
            "s": self.s.literal(),
            "subspace": self.subspace.to_literal(),
            "base_verdict": self.base_verdict.to_dict(),
            "maximal": self.maximal,
            "maximal_mode": self.maximal_mode,
            "extension_field": self.extension.to_literal(),
            "extended_subspace": self.extended.to_literal(),
            "c": self.c.to_literal(),
            "extension_verdict": self.extension_verdict.to_dict(),
            "verdict_flips": self.flips,
        }


def _rational_certificate(v: MatSubspace, a: ExactMatrix, b: ExactMatrix,
                          samples: int = SPOT_SAMPLES, seed: int = SPOT_SEED) -> MsVerdict:
    """Exact determinant-form check for V = span{a, b} over Q, plus a seeded element sample.

    det(x a + y b) is the binary form det(a) x^2 + m x y + det(b) y^2. With m = 0 and
    -det(a)/det(b) not a square every nonzero element is invertible, so the only
    candidate idempotent is I, which must lie outside V.
    """
    k = v.field
    da, db = a.det(), b.det()
    cross = (a + b).det() - da - db
    if cross or not da or not db or k.is_square((-da / db).value):
        raise ParameterViolation(f"determinant form {da} x^2 + {cross} xy + {db} y^2 is isotropic")
    if v.contains(ExactMatrix.identity(k, 2)):
        raise ParameterViolation("the identity lies in V")
    rng = np.random.default_rng(seed)
    checked = 0
    while checked < samples:
        x = k.element(k.random(rng)) * a + k.element(k.random(rng)) * b
        if x.is_zero():
            continue
        if not x.det():
            raise ParameterViolation(f"{x!r} is a singular nonzero element")
        if x.is_idempotent():
            return verdict_from_candidate(v, x)
        checked += 1
    return MsVerdict(
        MsStatus.MS_PROPER, Method.STRUCTURAL_CERTIFICATE,
        evidence={
            "reason": "det(x a + y b) vanishes only at 0 and I is not in V",
            "determinant_form": [da.literal(), cross.literal(), db.literal()],
            "spot_check": {"samples": samples, "seed": seed},
        },
    )


def basechange_demo(k: FieldSpec, s) -> BaseChangeDemo:
    """V = span{diag(1, s), antidiag(1, 1)} is an MS over K but not over K(sqrt s)."""
    if k.extension_degree != 1:
        raise UnsupportedField("the demo adjoins a square root to a prime field or the rationals")
    s = k.element(s)
    one = k.element(1)
    if not s or s == one or s == -one:
        raise ExcludedParameter(f"s must avoid 0, 1, -1; got {s}")
    if k.is_square(s.value):
        raise SquareParameter(f"{s} is a square in {k}")
    a = ExactMatrix.diagonal(k, [1, s])
    b = ExactMatrix.from_rows(k, [[0, 1], [1, 0]])
    v = span_of([a, b])
    not_in_h = bool(a.trace())

    if k.is_finite:
        for x in v.elements():
            if not x.is_zero() and not x.det():
                raise ParameterViolation(f"{x!r} is a singular nonzero element")
        base_verdict = ms_by_idempotent_criterion(v)
        maximal = is_maximal_ms(v).is_maximal
        mode = "brute force"
    else:
        base_verdict = _rational_certificate(v, a, b)
        maximal = not_in_h
        mode = "not contained in the trace-zero hyperplane"

    if k.characteristic:
        ext = FieldSpec.extension(k.characteristic, [k.neg(s.value), 0, 1])
    else:
        ext = FieldSpec.extension(0, [-s.value, 0, 1])
    root = ext.element([0, 1])
    a_l = a.embed(ext)
    b_l = b.embed(ext)
    u = v.embed(ext)
    c = (a_l + b_l.scale(root)).scale(ext.element((one + s).value).inverse())
    ext_verdict = verdict_from_candidate(u, c)
    logger.info("base change over %s with s=%s: MS=%s, extension NotMS witness found",
                k, s, base_verdict.is_ms)
    return BaseChangeDemo(k, s, a, b, v, base_verdict, maximal, mode, ext, u, c, ext_verdict)
