"""MS verdicts for subspaces of M_n(F).

Two independent deciders are provided over finite fields:

* ``ms_by_idempotent_criterion``: a proper subspace is an MS exactly when it
  holds no nonzero idempotent, so an exhaustive scan of its elements decides.
* ``ms_by_definition``: the definition taken literally, over every a, b, c in
  M_n(F), using the eventual periodicity of a, a^2, ... to make "for all m >= N"
  a finite check.

Prime fields go through vectorised numpy scans; extension fields fall back to
exact ``ExactMatrix`` loops.
"""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from algebra import ExactMatrix, FieldSpec, power_tail
from errors import BudgetExceeded, UnsupportedField, WitnessError
from subspace import MatSubspace, extension_directions, span_of, trace_orthogonal

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 7
SCAN_CHUNK = 1 << 16
PAIR_CHUNK = 1 << 18


class MsStatus(str, Enum):
    MS_PROPER = "MS_Proper"
    MS_FULL_ALGEBRA = "MS_FullAlgebra"
    NOT_MS = "NotMS"


class Method(str, Enum):
    IDEMPOTENT_SCAN = "IdempotentScan"
    DEFINITION_BRUTE_FORCE = "DefinitionBruteForce"
    STRUCTURAL_CERTIFICATE = "StructuralCertificate"


@dataclass
class MsVerdict:
    status: MsStatus
    method: Method
    witness: Optional[ExactMatrix] = None
    evidence: Dict = field(default_factory=dict)

    @property
    def is_ms(self) -> bool:
        return self.status != MsStatus.NOT_MS

    def to_dict(self) -> Dict:
        out = {"status": self.status.value, "method": self.method.value, "evidence": self.evidence}
        if self.witness is not None:
            out["witness"] = self.witness.to_literal()
        return out


@dataclass
class DirectionEvidence:
    """What happened to S + F*w: full algebra, or an idempotent inside it."""

    direction: ExactMatrix
    idempotent: Optional[ExactMatrix] = None
    full_algebra: bool = False

    @property
    def blocks_extension(self) -> bool:
        return self.full_algebra or self.idempotent is not None

    def to_dict(self) -> Dict:
        out = {"direction": self.direction.to_literal(), "full_algebra": self.full_algebra}
        if self.idempotent is not None:
            out["idempotent"] = self.idempotent.to_literal()
        return out


@dataclass
class MaximalityVerdict:
    is_maximal: bool
    evidence: List = field(default_factory=list)
    mode: str = "brute force"
    note: str = ""
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "is_maximal": self.is_maximal,
            "mode": self.mode,
            "note": self.note,
            "details": self.details,
            "evidence": [e.to_dict() for e in self.evidence],
        }


# ------------------------------------------------------------------ helpers


def _require_finite(f: FieldSpec, what: str):
    if not f.is_finite:
        raise UnsupportedField(f"{what} needs a finite field; use a structural certificate over {f}")


def is_nonzero_idempotent(e: ExactMatrix) -> bool:
    return not e.is_zero() and e.is_idempotent()


def verify_witness(s: MatSubspace, e: ExactMatrix) -> bool:
    """e^2 = e, e != 0 and e in S."""
    return is_nonzero_idempotent(e) and s.contains(e)


def _coefficient_block(idx: np.ndarray, p: int, d: int) -> np.ndarray:
    """Base-p digits of ``idx``, most significant first, as an (m, d) array."""
    powers = p ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % p


def _membership_matrix(s: MatSubspace) -> np.ndarray:
    """Columns vec(z^T) for a basis z of S-perp; x in S iff vec(x) @ M == 0 mod p."""
    perp = trace_orthogonal(s)
    if perp.is_zero:
        return np.zeros((s.ambient_dim, 0), dtype=np.int64)
    return np.array([z.T.vectorize() for z in perp.basis], dtype=np.int64).T


def _members(flat: np.ndarray, mem: np.ndarray, p: int) -> np.ndarray:
    if mem.shape[1] == 0:
        return np.ones(flat.shape[0], dtype=bool)
    return np.all((flat @ mem) % p == 0, axis=1)


# -------------------------------------------------------------- idempotents


def _scan_prime(s: MatSubspace) -> Optional[ExactMatrix]:
    p = s.field.characteristic
    n = s.n
    d = s.dim
    basis = s.to_numpy()
    total = p ** d
    for start in range(1, total, SCAN_CHUNK):
        idx = np.arange(start, min(total, start + SCAN_CHUNK), dtype=np.int64)
        coeffs = _coefficient_block(idx, p, d)
        mats = ((coeffs @ basis) % p).reshape(-1, n, n)
        squares = np.matmul(mats, mats) % p
        hits = np.all(squares == mats, axis=(1, 2))
        if hits.any():
            return ExactMatrix.from_numpy(s.field, mats[int(np.argmax(hits))])
    return None


def _scan_generic(s: MatSubspace) -> Optional[ExactMatrix]:
    for e in s.elements():
        if is_nonzero_idempotent(e):
            return e
    return None


def find_idempotent(s: MatSubspace, budget: int = DEFAULT_BUDGET) -> Optional[ExactMatrix]:
    """First nonzero idempotent of S in lexicographic coefficient order, or None."""
    _require_finite(s.field, "idempotent scan")
    needed = s.field.order ** s.dim
    if needed > budget:
        raise BudgetExceeded(needed, budget, "idempotent scan")
    if s.is_zero:
        return None
    if s.field.is_prime_field:
        return _scan_prime(s)
    return _scan_generic(s)


def ms_by_idempotent_criterion(s: MatSubspace, budget: int = DEFAULT_BUDGET) -> MsVerdict:
    if s.is_full:
        return MsVerdict(MsStatus.MS_FULL_ALGEBRA, Method.IDEMPOTENT_SCAN,
                         evidence={"reason": "the full algebra is an ideal"})
    e = find_idempotent(s, budget)
    if e is None:
        return MsVerdict(MsStatus.MS_PROPER, Method.IDEMPOTENT_SCAN,
                         evidence={"scanned": s.field.order ** s.dim})
    return MsVerdict(MsStatus.NOT_MS, Method.IDEMPOTENT_SCAN, witness=e)


def verdict_from_candidate(s: MatSubspace, e: ExactMatrix) -> MsVerdict:
    """NotMS verdict backed by an explicitly supplied idempotent; works over any field."""
    if not is_nonzero_idempotent(e):
        raise WitnessError("candidate is not a nonzero idempotent")
    if not s.contains(e):
        raise WitnessError("candidate idempotent is not in the subspace")
    return MsVerdict(MsStatus.NOT_MS, Method.STRUCTURAL_CERTIFICATE, witness=e,
                     evidence={"reason": "supplied idempotent"})


# ---------------------------------------------------------- the definition


class _MatrixRing:
    """All p^(n*n) matrices of M_n(F_p) with the power tail of each one."""

    def __init__(self, p: int, n: int):
        self.p = p
        self.n = n
        count = p ** (n * n)
        idx = np.arange(count, dtype=np.int64)
        self.elements = _coefficient_block(idx, p, n * n).reshape(count, n, n)
        self.tails = [self._tail(a) for a in self.elements]
        logger.debug("matrix ring M_%d(F_%d): %d elements", n, p, count)

    def _tail(self, a: np.ndarray) -> Tuple[int, int, np.ndarray]:
        seen = {}
        powers = []
        x = a
        j = 1
        while x.tobytes() not in seen:
            seen[x.tobytes()] = j
            powers.append(x)
            x = (x @ a) % self.p
            j += 1
        mu = seen[x.tobytes()]
        return mu, j - mu, np.stack(powers)


@lru_cache(maxsize=8)
def _matrix_ring(p: int, n: int) -> _MatrixRing:
    return _MatrixRing(p, n)


def _failing_pair_prime(ring: _MatrixRing, y: np.ndarray, mem: np.ndarray) -> Optional[Tuple[int, int]]:
    """First (b, c) index pair with b y c outside S, or None."""
    elems = ring.elements
    count = len(elems)
    n = ring.n
    p = ring.p
    rows = max(1, PAIR_CHUNK // count)
    for start in range(0, count, rows):
        by = np.matmul(elems[start:start + rows], y) % p
        prods = np.matmul(by[:, None], elems[None]) % p
        ok = _members(prods.reshape(-1, n * n), mem, p)
        if not ok.all():
            flat = int(np.argmin(ok))
            return start + flat // count, flat % count
    return None


def _definition_prime(s: MatSubspace) -> MsVerdict:
    p = s.field.characteristic
    ring = _matrix_ring(p, s.n)
    mem = _membership_matrix(s)
    cleared = set()
    qualifying = 0
    for ai, (mu, period, powers) in enumerate(ring.tails):
        flat = powers.reshape(len(powers), -1)
        if not _members(flat, mem, p).all():
            continue
        qualifying += 1
        for offset, y in enumerate(powers[mu - 1:]):
            key = y.tobytes()
            if key in cleared:
                continue
            pair = _failing_pair_prime(ring, y, mem)
            if pair is None:
                cleared.add(key)
                continue
            a = ExactMatrix.from_numpy(s.field, ring.elements[ai])
            j = period * -(-mu // period)
            e = ExactMatrix.from_numpy(s.field, powers[j - 1])
            evidence = {
                "a": a.to_literal(),
                "b": ExactMatrix.from_numpy(s.field, ring.elements[pair[0]]).to_literal(),
                "c": ExactMatrix.from_numpy(s.field, ring.elements[pair[1]]).to_literal(),
                "m": mu + offset,
                "preperiod": mu,
                "period": period,
            }
            return MsVerdict(MsStatus.NOT_MS, Method.DEFINITION_BRUTE_FORCE, witness=e, evidence=evidence)
    return MsVerdict(MsStatus.MS_PROPER, Method.DEFINITION_BRUTE_FORCE,
                     evidence={"qualifying": qualifying})


def _definition_generic(s: MatSubspace) -> MsVerdict:
    f = s.field
    n = s.n
    ring = []
    for vec in itertools.product(list(f.elements()), repeat=n * n):
        ring.append(ExactMatrix.from_vector(f, n, vec))
    cleared = set()
    qualifying = 0
    for a in ring:
        tail = power_tail(a)
        if not all(s.contains(x) for x in tail.powers):
            continue
        qualifying += 1
        for offset, y in enumerate(tail.cycle):
            if y in cleared:
                continue
            failing = next(((b, c) for b in ring for c in ring if not s.contains(b @ y @ c)), None)
            if failing is None:
                cleared.add(y)
                continue
            b, c = failing
            evidence = {
                "a": a.to_literal(),
                "b": b.to_literal(),
                "c": c.to_literal(),
                "m": tail.preperiod + offset,
                "preperiod": tail.preperiod,
                "period": tail.period,
            }
            return MsVerdict(MsStatus.NOT_MS, Method.DEFINITION_BRUTE_FORCE,
                             witness=tail.idempotent_power(), evidence=evidence)
    return MsVerdict(MsStatus.MS_PROPER, Method.DEFINITION_BRUTE_FORCE,
                     evidence={"qualifying": qualifying})


def ms_by_definition(s: MatSubspace, budget: int = DEFAULT_BUDGET) -> MsVerdict:
    """Decide the MS property from the definition over all a, b, c in M_n(F).

    a qualifies when a^m lies in S for every m >= 1; a^1 .. a^(mu+lambda-1)
    cover every power. S fails when some qualifying a has b a^m c outside S for
    an m in the eventual cycle. The verdict witness is the idempotent power a^j
    (j >= mu, lambda | j) of the failing a.
    """
    _require_finite(s.field, "definition brute force")
    q = s.field.order
    needed = q ** (2 * s.n * s.n)
    if needed > budget:
        raise BudgetExceeded(needed, budget, "definition brute force")
    if s.is_full:
        return MsVerdict(MsStatus.MS_FULL_ALGEBRA, Method.DEFINITION_BRUTE_FORCE,
                         evidence={"reason": "the full algebra is an ideal"})
    if s.field.is_prime_field:
        return _definition_prime(s)
    return _definition_generic(s)


# ------------------------------------------------------------- hyperplanes


def trace_zero_space(n: int, field: FieldSpec) -> MatSubspace:
    """H = I_n-perp, the trace-zero matrices."""
    return trace_orthogonal(span_of([ExactMatrix.identity(field, n)]))


# ---------------------------------------------------------------- maximality


def is_maximal_ms(s: MatSubspace, budget: int = DEFAULT_BUDGET,
                  cache: Optional[Dict] = None) -> MaximalityVerdict:
    """Maximal among proper MSs: S is a proper MS and no S + F*w is a proper MS.

    ``cache`` maps subspaces to their idempotent (or None) and may be shared
    across calls.
    """
    _require_finite(s.field, "maximality test")
    verdict = ms_by_idempotent_criterion(s, budget)
    if verdict.status != MsStatus.MS_PROPER:
        return MaximalityVerdict(False, note=f"not a proper MS ({verdict.status.value})")
    cache = {} if cache is None else cache
    evidence = []
    for w in extension_directions(s):
        u = s.extend(w)
        if u.is_full:
            evidence.append(DirectionEvidence(w, full_algebra=True))
            continue
        if u in cache:
            e = cache[u]
        else:
            e = find_idempotent(u, budget)
            cache[u] = e
        evidence.append(DirectionEvidence(w, idempotent=e))
        if e is None:
            return MaximalityVerdict(False, evidence, note="an extension S + F*w is a proper MS")
    return MaximalityVerdict(True, evidence)
