"""JSON reports and one-line console summaries."""
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Union

from algebra import ExactMatrix
from errors import WitnessError
from mscore import MaximalityVerdict, Method, MsStatus, MsVerdict
from subspace import MatSubspace

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

OK = "✓"
FAIL = "✗"


def to_json(payload: Dict) -> str:
    body = dict(payload)
    body["schema_version"] = SCHEMA_VERSION
    return json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False)


def dump_json(payload: Dict, path: Optional[Union[str, Path]] = None) -> str:
    """Serialise with a schema version; write to ``path`` when given. Returns the text."""
    text = to_json(payload)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
        logger.info("%s report written to %s", OK, path)
    return text


def read_json(path: Union[str, Path]) -> Dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# ------------------------------------------------------------------ verdicts


def describe_verdict(verdict: MsVerdict, label: str = "subspace") -> str:
    if verdict.status == MsStatus.MS_FULL_ALGEBRA:
        return f"{OK} {label} is the full algebra (an ideal, hence an MS)"
    if verdict.status == MsStatus.MS_PROPER:
        return f"{OK} {label} is a proper MS [{verdict.method.value}]"
    return f"{FAIL} {label} is not an MS: nonzero idempotent {verdict.witness!r} [{verdict.method.value}]"


def describe_maximality(verdict: MaximalityVerdict, label: str = "subspace") -> str:
    if verdict.is_maximal:
        return f"{OK} {label} is a maximal MS ({len(verdict.evidence)} directions, {verdict.mode})"
    note = f": {verdict.note}" if verdict.note else ""
    return f"{FAIL} {label} is not a maximal MS{note}"


def describe_census(report) -> str:
    mark = OK if report.affirmative else FAIL
    maximal = len(report.maximal)
    line = (f"{mark} M_{report.n}({report.field}): {report.total_subspaces} subspaces, "
            f"{maximal} maximal MSs")
    if report.oracle_agreement is not None:
        line += f", {len(report.disagreements)} oracle disagreements"
    if report.classification is not None:
        cls = report.classification
        line += f", {len(cls['misses'])} misses, {len(cls['extras'])} extras"
    return line


def describe_debondt(report) -> str:
    mark = OK if report.affirmative else FAIL
    return (f"{mark} {report.with_idempotent}/{report.samples} sampled codim-{report.codim} "
            f"subspaces of M_{report.n}({report.field}) hold a nonzero idempotent")


def describe_basechange(demo) -> str:
    mark = OK if demo.flips else FAIL
    return (f"{mark} span{{a, b}} over {demo.base_field} with s={demo.s}: "
            f"MS={demo.base_verdict.is_ms}, maximal={demo.maximal}; over {demo.extension} "
            f"c^2 = c gives NotMS")


# ------------------------------------------------------------------- loading


def verdict_from_dict(obj: Dict) -> MsVerdict:
    witness = obj.get("witness")
    return MsVerdict(
        MsStatus(obj["status"]),
        Method(obj["method"]),
        ExactMatrix.from_literal(witness) if witness is not None else None,
        obj.get("evidence", {}),
    )


def check_witness(e: ExactMatrix, subspace: Optional[MatSubspace] = None):
    if e.is_zero():
        raise WitnessError("witness is zero")
    if not e.is_idempotent():
        raise WitnessError("witness is not idempotent")
    if subspace is not None and not subspace.contains(e):
        raise WitnessError("witness is not in the subspace")


def load_verdict(source: Union[str, Path, Dict]) -> MsVerdict:
    """Parse a verdict report and re-verify its witness.

    A NotMS verdict must carry a witness e with e^2 = e and e != 0, and e must
    lie in the embedded subspace when the report has one.
    """
    obj = source if isinstance(source, dict) else read_json(source)
    verdict = verdict_from_dict(obj)
    subspace = MatSubspace.from_literal(obj["subspace"]) if "subspace" in obj else None
    if verdict.status == MsStatus.NOT_MS:
        if verdict.witness is None:
            raise WitnessError("NotMS verdict without a witness")
        check_witness(verdict.witness, subspace)
    elif verdict.witness is not None:
        raise WitnessError(f"{verdict.status.value} verdict carries a witness")
    return verdict


def verify_census_witnesses(source: Union[str, Path, Dict]) -> int:
    """Re-verify every (subspace, witness) pair stored in a census report; returns the count."""
    obj = source if isinstance(source, dict) else read_json(source)
    count = 0
    for item in obj.get("witnesses", []):
        check_witness(ExactMatrix.from_literal(item["witness"]), MatSubspace.from_literal(item["subspace"]))
        count += 1
    return count
