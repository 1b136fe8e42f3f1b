"""Exhaustive and sampled censuses of subspaces of M_n(F_q).

Every k-dimensional subspace of F_q^d has exactly one reduced row-echelon
basis, so enumerating pivot patterns and the free entries to the right of each
pivot visits every subspace once. Counts are checked against the Gaussian
binomial coefficient.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from algebra import FieldSpec
from classify2 import (
    Classify2Family,
    FamilyKind,
    IRREDUCIBLE,
    lemma31_check,
    predicted_maximal_families,
    spectrum_type,
)
from errors import BudgetExceeded, InternalContractViolation, ParameterViolation, UnsupportedField
from mscore import (
    DEFAULT_BUDGET,
    MsStatus,
    find_idempotent,
    is_maximal_ms,
    ms_by_definition,
    ms_by_idempotent_criterion,
    trace_zero_space,
)
from subspace import MatSubspace

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
DEFAULT_SAMPLES = 200
ORACLE_SAMPLE = 500
VERDICT_LABELS = ("MS", "NotMS")


def gaussian_binomial(d: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^d."""
    if k < 0 or k > d:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _pmap(fn: Callable, items: Sequence, workers: int) -> List:
    """Order-preserving map, optionally on a thread pool."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# -------------------------------------------------------------- enumeration


def enumerate_subspaces(field: FieldSpec, d: int, k: int,
                        budget: int = DEFAULT_BUDGET) -> Iterator[Tuple[Tuple, ...]]:
    """Canonical bases (rref rows) of every k-dimensional subspace of F^d.

    Pivot patterns come in lexicographic order; within a pattern the free
    entries run through the field in lexicographic order.
    """
    if not field.is_finite:
        raise UnsupportedField("subspace enumeration needs a finite field")
    q = field.order
    if q ** (k * (d - k)) > budget:
        raise BudgetExceeded(q ** (k * (d - k)), budget, "subspace enumeration")
    if k == 0:
        yield ()
        return
    elems = list(field.elements())
    for pivots in itertools.combinations(range(d), k):
        pivot_set = set(pivots)
        slots = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, d) if j not in pivot_set]
        for values in itertools.product(elems, repeat=len(slots)):
            rows = [[field.zero] * d for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = field.one
            for (i, j), x in zip(slots, values):
                rows[i][j] = x
            yield tuple(tuple(r) for r in rows)


def enumerate_matrix_subspaces(field: FieldSpec, n: int, k: int,
                               budget: int = DEFAULT_BUDGET) -> Iterator[MatSubspace]:
    for rows in enumerate_subspaces(field, n * n, k, budget):
        pivots = tuple(next(j for j, x in enumerate(r) if x != field.zero) for r in rows)
        yield MatSubspace(field, n, rows, pivots)


def random_subspace(field: FieldSpec, n: int, rng: np.random.Generator,
                    dim: Optional[int] = None) -> MatSubspace:
    """Random subspace: dimension uniform over the proper range, then random echelon entries.

    The distribution is not uniform over subspaces.
    """
    d = n * n
    k = int(rng.integers(0, d)) if dim is None else dim
    pivots = sorted(int(x) for x in rng.choice(d, size=k, replace=False))
    rows = []
    for p in pivots:
        row = [field.zero] * d
        row[p] = field.one
        for j in range(p + 1, d):
            if j not in pivots:
                row[j] = field.random(rng)
        rows.append(row)
    return MatSubspace.from_vectors(field, n, rows)


# ------------------------------------------------------------------ report


@dataclass
class CensusReport:
    field: FieldSpec
    n: int
    kind: str = "census"
    dims: Dict[int, Dict[str, int]] = field(default_factory=dict)
    oracle_agreement: Optional[bool] = None
    disagreements: List[Dict] = field(default_factory=list)
    witnesses: List[Dict] = field(default_factory=list)
    maximal: List[MatSubspace] = field(default_factory=list)
    hyperplanes: Dict = field(default_factory=dict)
    lemma31_violations: List[Dict] = field(default_factory=list)
    heredity_violations: List[Dict] = field(default_factory=list)
    classification: Optional[Dict] = None
    sample: Optional[Dict] = None

    @property
    def total_subspaces(self) -> int:
        return sum(row["subspaces"] for row in self.dims.values())

    @property
    def counts_match(self) -> bool:
        return all(row["subspaces"] == row["gaussian_binomial"] for row in self.dims.values()
                   if "gaussian_binomial" in row)

    @property
    def affirmative(self) -> bool:
        ok = not self.lemma31_violations and not self.heredity_violations
        if self.oracle_agreement is not None:
            ok = ok and self.oracle_agreement
        if self.classification is not None:
            ok = ok and not self.classification["misses"]
        return ok

    def to_frame(self) -> pd.DataFrame:
        rows = [dict(dim=k, **v) for k, v in sorted(self.dims.items())]
        return pd.DataFrame(rows)

    def agreement_table(self) -> pd.DataFrame:
        """Crosstab of the two deciders' statuses (oracle runs only)."""
        pairs = [(d["definition"], d["criterion"]) for d in self.disagreements]
        counts = self.dims
        agreed = []
        for k in sorted(counts):
            row = counts[k]
            agreed += [("MS", "MS")] * row.get("agree_ms", 0)
            agreed += [("NotMS", "NotMS")] * row.get("agree_not_ms", 0)
        frame = pd.DataFrame(agreed + pairs, columns=["definition", "criterion"])
        index = pd.Index(VERDICT_LABELS, name="definition")
        columns = pd.Index(VERDICT_LABELS, name="criterion")
        if frame.empty:
            return pd.DataFrame(0, index=index, columns=columns)
        table = pd.crosstab(frame["definition"], frame["criterion"])
        return table.reindex(index=index, columns=columns, fill_value=0)

    def to_dict(self) -> Dict:
        out = {
            "kind": self.kind,
            "field": self.field.to_literal(),
            "n": self.n,
            "dims": {str(k): v for k, v in sorted(self.dims.items())},
            "total_subspaces": self.total_subspaces,
            "counts_match_gaussian_binomial": self.counts_match,
            "witnesses": self.witnesses,
            "maximal": [s.to_literal() for s in self.maximal],
            "hyperplanes": self.hyperplanes,
            "lemma31_violations": self.lemma31_violations,
            "heredity_violations": self.heredity_violations,
        }
        if self.oracle_agreement is not None:
            out["oracle_agreement"] = self.oracle_agreement
            out["disagreements"] = self.disagreements
            table = self.agreement_table()
            out["agreement_table"] = {
                row: {col: int(table.at[row, col]) for col in table.columns} for row in table.index
            }
        if self.classification is not None:
            out["classification"] = self.classification
        if self.sample is not None:
            out["sample"] = self.sample
        return out


# ------------------------------------------------------------------ oracle


def _oracle_pair(s: MatSubspace, budget: int) -> Tuple[MsStatus, MsStatus]:
    return ms_by_definition(s, budget).status, ms_by_idempotent_criterion(s, budget).status


def _label(status: MsStatus) -> str:
    return "NotMS" if status == MsStatus.NOT_MS else "MS"


def oracle_compare(n: int, field: FieldSpec, sample: Optional[int] = None,
                   seed: int = DEFAULT_SEED, budget: int = DEFAULT_BUDGET,
                   workers: int = 1) -> CensusReport:
    """Run both deciders on every proper subspace (or a seeded sample) and record disagreements."""
    if not field.is_finite:
        raise UnsupportedField("oracle comparison needs a finite field")
    report = CensusReport(field, n, kind="oracle-compare")
    if sample is None:
        subspaces = []
        for k in range(n * n):
            batch = list(enumerate_matrix_subspaces(field, n, k, budget))
            report.dims[k] = {"subspaces": len(batch),
                              "gaussian_binomial": gaussian_binomial(n * n, k, field.order)}
            subspaces.extend(batch)
    else:
        rng = np.random.default_rng(seed)
        subspaces = [random_subspace(field, n, rng) for _ in range(sample)]
        report.sample = {"size": sample, "seed": seed}
        for s in subspaces:
            row = report.dims.setdefault(s.dim, {"subspaces": 0})
            row["subspaces"] += 1
    logger.info("oracle comparison over %d subspaces of M_%d(%s)", len(subspaces), n, field)

    results = _pmap(lambda s: _oracle_pair(s, budget), subspaces, workers)
    for s, (by_def, by_crit) in zip(subspaces, results):
        row = report.dims[s.dim]
        if by_def == by_crit:
            key = "agree_not_ms" if by_crit == MsStatus.NOT_MS else "agree_ms"
            row[key] = row.get(key, 0) + 1
        else:
            report.disagreements.append({
                "subspace": s.to_literal(),
                "definition": _label(by_def),
                "criterion": _label(by_crit),
            })
            logger.warning("✗ deciders disagree on %r", s)
    for row in report.dims.values():
        row.setdefault("agree_ms", 0)
        row.setdefault("agree_not_ms", 0)
    report.oracle_agreement = not report.disagreements
    return report


# ------------------------------------------------------------------ census


def _hyperplanes_of(s: MatSubspace) -> Iterator[MatSubspace]:
    """Codimension-1 subspaces of S, from coordinate hyperplanes of F^dim(S)."""
    k = s.dim
    for rows in enumerate_subspaces(s.field, k, k - 1):
        gens = [s.combination(r).vectorize() for r in rows]
        yield MatSubspace.from_vectors(s.field, s.n, gens)


def _has_irreducible_element(s: MatSubspace) -> bool:
    return any(a.trace() and spectrum_type(a) == IRREDUCIBLE for a in s.elements())


def _compare_classification(field: FieldSpec, maximal: List[MatSubspace],
                            status: Dict[MatSubspace, MsStatus],
                            predicted: Optional[List[Classify2Family]] = None) -> Dict:
    if predicted is None:
        predicted = predicted_maximal_families(field)
    observed = set(maximal)
    predicted_set = {p.subspace for p in predicted}
    misses = []
    closure_dependent = []
    per_clause: Dict[str, Dict[str, int]] = {}
    for fam in predicted:
        tally = per_clause.setdefault(fam.clause, {"predicted": 0, "maximal": 0})
        tally["predicted"] += 1
        is_max = fam.subspace in observed
        tally["maximal"] += int(is_max)
        if fam.kind == FamilyKind.UNIPOTENT_LINE:
            closure_dependent.append({
                "subspace": fam.subspace.to_literal(),
                "is_ms": status[fam.subspace] != MsStatus.NOT_MS,
                "maximal": is_max,
            })
        elif not is_max:
            misses.append(fam.to_dict())
    extras = [s for s in maximal if s not in predicted_set]
    signatures = [_has_irreducible_element(s) for s in extras]
    return {
        "predicted": len(predicted),
        "per_clause": dict(sorted(per_clause.items())),
        "misses": misses,
        "closure_dependent": closure_dependent,
        "extras": [s.to_literal() for s in extras],
        "extras_with_irreducible_spectrum": sum(signatures),
        "all_extras_have_irreducible_spectrum": all(signatures),
        "exact_match": not misses and not extras and all(c["maximal"] for c in closure_dependent),
    }


def ms_census(n: int, field: FieldSpec, compare_classification: bool = False,
              budget: int = DEFAULT_BUDGET, workers: int = 1,
              check_heredity: bool = True,
              predicted: Optional[List[Classify2Family]] = None) -> CensusReport:
    """MS and maximal-MS tallies over every subspace of M_n(F_q).

    ``predicted`` reuses an already computed list of classified families.
    """
    if not field.is_finite:
        raise UnsupportedField("a census needs a finite field")
    d = n * n
    q = field.order
    report = CensusReport(field, n)
    status: Dict[MatSubspace, MsStatus] = {}
    verdict_of = {}
    by_dim: Dict[int, List[MatSubspace]] = {}
    for k in range(d + 1):
        batch = list(enumerate_matrix_subspaces(field, n, k, budget))
        by_dim[k] = batch
        verdicts = _pmap(lambda s: ms_by_idempotent_criterion(s, budget), batch, workers)
        ms_count = 0
        for s, verdict in zip(batch, verdicts):
            status[s] = verdict.status
            verdict_of[s] = verdict
            if verdict.status == MsStatus.NOT_MS:
                report.witnesses.append({"subspace": s.to_literal(), "witness": verdict.witness.to_literal()})
            else:
                ms_count += 1
        report.dims[k] = {"subspaces": len(batch), "gaussian_binomial": gaussian_binomial(d, k, q),
                          "ms": ms_count, "maximal": 0}
        logger.info("dim %d: %d subspaces, %d MS", k, len(batch), ms_count)
    if not report.counts_match:
        raise InternalContractViolation("subspace counts differ from the Gaussian binomials")

    # extension lookups reuse the census verdicts instead of rescanning
    cache = {s: verdict_of[s].witness for k in range(1, d) for s in by_dim[k]}
    proper_ms = [s for k in range(d) for s in by_dim[k] if status[s] == MsStatus.MS_PROPER]
    verdicts = _pmap(lambda s: is_maximal_ms(s, budget, cache), proper_ms, workers)
    for s, verdict in zip(proper_ms, verdicts):
        if verdict.is_maximal:
            report.maximal.append(s)
            report.dims[s.dim]["maximal"] += 1

    h = trace_zero_space(n, field)
    hyper_ms = [s for s in by_dim[d - 1] if status[s] == MsStatus.MS_PROPER]
    report.hyperplanes = {
        "total": len(by_dim[d - 1]),
        "ms": len(hyper_ms),
        "only_trace_zero": hyper_ms == [h],
    }

    if n == 2:
        for s in proper_ms:
            check = lemma31_check(s, verdict_of[s])
            if not check.part_i_holds:
                report.lemma31_violations.append({
                    "subspace": s.to_literal(),
                    "elements": [a.to_literal() for a in check.part_i_violations],
                })

    if check_heredity:
        for s in proper_ms:
            if s.dim == 0:
                continue
            for t in _hyperplanes_of(s):
                if status[t] == MsStatus.NOT_MS:
                    report.heredity_violations.append({"ms": s.to_literal(), "sub": t.to_literal()})

    if compare_classification:
        if n != 2:
            raise UnsupportedField("the classification comparison is for M_2")
        report.classification = _compare_classification(field, report.maximal, status, predicted)
    logger.info("census of M_%d(%s): %d maximal MSs", n, field, len(report.maximal))
    return report


# --------------------------------------------------------------- sampling


@dataclass
class DebondtReport:
    field: FieldSpec
    n: int
    samples: int
    seed: int
    codim: int
    with_idempotent: int = 0
    skipped_in_h: int = 0
    counterexamples: List[MatSubspace] = field(default_factory=list)

    @property
    def affirmative(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> Dict:
        return {
            "kind": "debondt-sample",
            "field": self.field.to_literal(),
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "codim": self.codim,
            "with_idempotent": self.with_idempotent,
            "skipped_in_trace_zero": self.skipped_in_h,
            "counterexamples": [s.to_literal() for s in self.counterexamples],
        }


def debondt_sample(field: FieldSpec, n: int = 3, samples: int = DEFAULT_SAMPLES,
                   seed: int = DEFAULT_SEED, codim: int = 2, budget: int = DEFAULT_BUDGET,
                   workers: int = 1) -> DebondtReport:
    """Seeded random subspaces of codimension < n outside H must hold a nonzero idempotent."""
    p = field.characteristic
    if p and p < n:
        raise ParameterViolation(f"need char 0 or char >= n; got char {p}, n = {n}")
    if not field.is_finite:
        raise UnsupportedField("sampling scans need a finite field")
    if not 0 < codim < n:
        raise ParameterViolation(f"codimension must lie in 1..{n - 1}")
    report = DebondtReport(field, n, samples, seed, codim)
    rng = np.random.default_rng(seed)
    h = trace_zero_space(n, field)
    drawn = []
    while len(drawn) < samples:
        s = random_subspace(field, n, rng, dim=n * n - codim)
        if s.issubspace(h):
            report.skipped_in_h += 1
            continue
        drawn.append(s)
    logger.info("scanning %d sampled subspaces of M_%d(%s)", len(drawn), n, field)
    found = _pmap(lambda s: find_idempotent(s, budget), drawn, workers)
    for s, e in zip(drawn, found):
        if e is None:
            report.counterexamples.append(s)
            logger.warning("✗ idempotent-free sample %r", s)
        else:
            report.with_idempotent += 1
    return report
