"""Explicit idempotents in one-step extensions of the two-block MS family.

For V = (Z ∩ Lambda-perp) + e_1 M e_3 + e_3 M e_2 and any w outside V the
engine writes down a nonzero idempotent Q with Q - gamma*w in V for a scalar
gamma, which proves V + F*w is not a proper MS. Running it over every
extension direction certifies that V is a maximal MS.
"""
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Union

from algebra import ExactMatrix, Scalar, rank, rank_factorization
from constructions import FamilyInstance, TwoBlockFamily
from errors import (
    DirectionInV,
    FamilyMismatch,
    InternalContractViolation,
    MathieuError,
    WitnessError,
)
from mscore import DirectionEvidence, MaximalityVerdict
from subspace import MatSubspace, complement_basis, express, extension_directions

logger = logging.getLogger(__name__)

SPOT_CHECK_MODE = "theorem-backed spot check"


class WitnessCase(str, Enum):
    CENTRAL = "Central"
    CASE1 = "Case1"
    CASE1_TRANSPOSED = "Case1Transposed"
    CASE2 = "Case2"


@dataclass
class WitnessBundle:
    """Everything the engine produced for one direction w."""

    direction: ExactMatrix
    reduced: ExactMatrix
    w0: ExactMatrix
    w1: ExactMatrix
    w2: ExactMatrix
    case: WitnessCase
    q: ExactMatrix
    gamma: Scalar
    beta: Optional[Scalar] = None
    alpha: Optional[Scalar] = None
    x0: Optional[ExactMatrix] = None
    v: Optional[ExactMatrix] = None
    rank: Optional[int] = None

    def to_dict(self) -> Dict:
        out = {
            "case": self.case.value,
            "direction": self.direction.to_literal(),
            "w0": self.w0.to_literal(),
            "w1": self.w1.to_literal(),
            "w2": self.w2.to_literal(),
            "Q": self.q.to_literal(),
            "gamma": self.gamma.literal(),
        }
        if self.beta is not None:
            out["beta"] = self.beta.literal()
            out["rank"] = self.rank
            out["v"] = self.v.to_literal()
        if self.alpha is not None:
            out["alpha"] = self.alpha.literal()
            out["x0"] = self.x0.to_literal()
        return out


def _contract(ok: bool, what: str):
    if not ok:
        raise InternalContractViolation(what)


@lru_cache(maxsize=32)
def _transposed(family: TwoBlockFamily) -> TwoBlockFamily:
    return family.transposed()


def decompose(family: TwoBlockFamily, w: ExactMatrix):
    """Drop the e_1 M e_3 and e_3 M e_2 parts of w; split the rest as w_0 + w_1 + w_2."""
    e1, e2, e3 = family.e1, family.e2, family.e3
    ep = e1 + e2
    reduced = w - e1 @ w @ e3 - e3 @ w @ e2
    w0 = ep @ w @ ep + e3 @ w @ e3
    w1 = e3 @ w @ e1
    w2 = e2 @ w @ e3
    return reduced, w0, w1, w2


def _case1(family: TwoBlockFamily, w1: ExactMatrix, w2: ExactMatrix):
    """Q for w_0 in Lambda-perp and w_1 != 0; checks the case identities in this frame."""
    f = family.field
    e1, e3 = family.e1, family.e3
    s1, s2 = family.s1, family.s2
    n3 = family.n3
    one = f.element(1)
    v = e1 @ rank_factorization(w1) @ e3
    r = rank(w1)
    _contract(w1 @ v @ w1 == w1, "w1 v w1 != w1")
    _contract(v @ w1 @ v == v, "v w1 v != v")
    vw1 = v @ w1
    w1v = w1 @ v
    _contract(vw1.is_idempotent() and w1v.is_idempotent(), "v w1 or w1 v is not idempotent")
    denom = s1 * r + s2 * (n3 - r)
    beta = -(s2 * n3) / denom
    _contract(bool(beta + one), "beta = -1")
    left = (e3 + w2 + v.scale(beta)) @ (e3 + w1)
    q = (left + (e3 - w1v).scale(beta)).scale((one + beta).inverse())
    lam = family.lam
    expected = s2 * n3 + (s1 - s2) * beta * r / (beta + one)
    _contract((lam @ q).trace() == expected, "trace law for Tr(Lambda Q) fails")
    _contract(not (lam @ (q - w1 - w2)).trace(), "Tr(Lambda (Q - w)) != 0")
    _contract(q.trace() == f.element(n3), "Tr Q != n_3")
    return q, v, beta, r, (one + beta).inverse()


def maximality_witness(family: TwoBlockFamily, v: MatSubspace, w: ExactMatrix) -> WitnessBundle:
    """A nonzero idempotent Q in V + F*w for the two-block member V and w outside V."""
    if v != family.subspace:
        raise FamilyMismatch("subspace is not the member of the given family")
    if v.contains(w):
        raise DirectionInV("direction already lies in V")
    f = family.field
    reduced, w0, w1, w2 = decompose(family, w)
    lam = family.lam

    if w1.is_zero() and w2.is_zero():
        gamma = lam.trace() / (lam @ reduced).trace()
        n = family.n
        bundle = WitnessBundle(w, reduced, w0, w1, w2, WitnessCase.CENTRAL,
                               ExactMatrix.identity(f, n), gamma)
    elif family.lam_perp.contains(w0):
        if not w1.is_zero():
            q, vv, beta, r, gamma = _case1(family, w1, w2)
            case = WitnessCase.CASE1
        else:
            q, vv, beta, r, gamma = _case1(_transposed(family), w2.T, w1.T)
            q, vv = q.T, vv.T
            case = WitnessCase.CASE1_TRANSPOSED
        bundle = WitnessBundle(w, reduced, w0, w1, w2, case, q, gamma, beta=beta, v=vv, rank=r)
    else:
        core = family.core
        coeffs = express(list(core.basis) + [w0], family.e3)
        _contract(coeffs is not None, "e_3 is not in F w_0 + (Z ∩ Lambda-perp)")
        alpha = Scalar(f, coeffs[-1])
        _contract(bool(alpha), "alpha = 0")
        x0 = family.e3 - w0.scale(alpha)
        _contract(core.contains(x0), "x_0 is not in Z ∩ Lambda-perp")
        w2w1 = w2 @ w1
        _contract(v.contains(w2w1), "w_2 w_1 is not in V")
        q = family.e3 + w1.scale(alpha) + w2.scale(alpha) + w2w1.scale(alpha * alpha)
        bundle = WitnessBundle(w, reduced, w0, w1, w2, WitnessCase.CASE2, q, alpha,
                               alpha=alpha, x0=x0)

    q = bundle.q
    _contract(not q.is_zero(), "Q = 0")
    _contract(q.is_idempotent(), "Q^2 != Q")
    _contract(v.contains(q - w.scale(bundle.gamma)), "Q - gamma w is not in V")
    _contract(v.extend(w).contains(q), "Q is not in V + F w")
    logger.debug("direction %r: %s", w, bundle.case.value)
    return bundle


def _resolve(family_or_instance: Union[FamilyInstance, TwoBlockFamily],
             v: Optional[MatSubspace]) -> TwoBlockFamily:
    if isinstance(family_or_instance, FamilyInstance):
        if family_or_instance.family is None:
            raise FamilyMismatch(f"{family_or_instance.name} is not a two-block family member")
        family = family_or_instance.family
    elif isinstance(family_or_instance, TwoBlockFamily):
        family = family_or_instance
    else:
        raise FamilyMismatch(f"expected a family, got {type(family_or_instance).__name__}")
    if v is not None and v != family.subspace:
        raise FamilyMismatch("subspace is not the member of the given family")
    return family


def spot_directions(v: MatSubspace) -> List[ExactMatrix]:
    """Complement basis plus all pairwise sums."""
    comp = complement_basis(v)
    sums = [comp[i] + comp[j] for i in range(len(comp)) for j in range(i + 1, len(comp))]
    return comp + sums


def certify_maximal(family_or_instance: Union[FamilyInstance, TwoBlockFamily],
                    v: Optional[MatSubspace] = None, workers: int = 1) -> MaximalityVerdict:
    """Run the engine on every extension direction (finite fields) or a spanning sample (rationals)."""
    family = _resolve(family_or_instance, v)
    v = family.subspace
    # warm the cached frame data before threads share it
    _ = (family.core, family.lam_perp)
    if family.field.is_finite:
        directions = list(extension_directions(v))
        mode = "exhaustive"
    else:
        directions = spot_directions(v)
        mode = SPOT_CHECK_MODE
    logger.info("witnessing %d directions (%s)", len(directions), mode)

    def run(w):
        try:
            return maximality_witness(family, v, w)
        except MathieuError as exc:
            raise WitnessError(f"direction {w!r}: {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            bundles = list(pool.map(run, directions))
    else:
        bundles = [run(w) for w in directions]

    evidence = [DirectionEvidence(b.direction, idempotent=b.q) for b in bundles]
    cases = Counter(b.case.value for b in bundles)
    details = {"directions": len(bundles), "cases": dict(sorted(cases.items()))}
    return MaximalityVerdict(True, evidence, mode=mode, details=details)
