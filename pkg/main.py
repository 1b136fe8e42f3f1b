"""Command-line front end: certify, construct, maximal, census, oracle-compare,
classify2, demo-basechange, debondt-sample.

Reports go to stdout (or --output) as JSON; status lines go to stderr.
Exit codes: 0 affirmative verdict, 1 negative verdict with witness, 2 error.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence

from algebra import ExactMatrix, FieldSpec, _is_prime
from census import DEFAULT_SAMPLES, DEFAULT_SEED, ORACLE_SAMPLE, debondt_sample, ms_census, oracle_compare
from classify2 import basechange_demo, predicted_maximal_families
from constructions import FAMILIES, build_from_params
from errors import ConfigError, MathieuError
from maximality import certify_maximal, maximality_witness
from mscore import (
    DEFAULT_BUDGET,
    MsStatus,
    ms_by_definition,
    ms_by_idempotent_criterion,
    verdict_from_candidate,
)
from report import (
    describe_basechange,
    describe_census,
    describe_debondt,
    describe_maximality,
    describe_verdict,
    dump_json,
)
from subspace import MatSubspace

logger = logging.getLogger("mzspaces")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2

COMMANDS = ("certify", "construct", "maximal", "census", "oracle-compare",
            "classify2", "demo-basechange", "debondt-sample")


@dataclass(frozen=True)
class CommandConfig:
    command: str
    p: Optional[int] = None
    k: int = 1
    modulus: Optional[tuple] = None
    n: int = 2
    subspace: Optional[str] = None
    method: str = "criterion"
    candidate: Optional[str] = None
    family: Optional[str] = None
    params: Dict = field(default_factory=dict, hash=False)
    direction: Optional[str] = None
    exhaustive: bool = False
    compare_classification: bool = False
    sample: Optional[int] = None
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    s: Optional[str] = None
    budget: int = DEFAULT_BUDGET
    workers: int = 1
    output: Optional[str] = None
    csv: Optional[str] = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.budget <= 0:
            raise ConfigError("budget must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.sample is not None and self.sample < 1:
            raise ConfigError("sample size must be at least 1")
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.command == "certify" and not self.subspace:
            raise ConfigError("certify needs --subspace")
        if self.command == "construct" and self.family not in FAMILIES:
            raise ConfigError(f"--family must be one of {', '.join(FAMILIES)}")
        if self.command == "maximal" and not (self.direction or self.exhaustive):
            raise ConfigError("maximal needs --direction or --exhaustive")
        if self.command in ("census", "oracle-compare", "classify2", "demo-basechange", "debondt-sample"):
            self.field_spec()

    def field_spec(self) -> FieldSpec:
        if self.p is None:
            raise ConfigError("a field is required (--q/--p/--field)")
        try:
            if self.k == 1:
                return FieldSpec(self.p)
            return FieldSpec(self.p, self.k, self.modulus)
        except MathieuError as exc:
            raise ConfigError(f"invalid field: {exc}") from exc


def _load_json_arg(text: str):
    """Inline JSON, or a path to a JSON file."""
    path = Path(text)
    try:
        if path.is_file():
            return json.loads(path.read_text(encoding="utf-8"))
    except OSError:
        pass
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not a JSON file or literal: {text[:40]}") from exc


def _split_order(q: int):
    """q = p^k for a prime p."""
    for p in range(2, q + 1):
        if q % p == 0 and _is_prime(p):
            k = 0
            rest = q
            while rest % p == 0:
                rest //= p
                k += 1
            if rest != 1:
                raise ConfigError(f"{q} is not a prime power")
            return p, k
    raise ConfigError(f"{q} is not a prime power")


# ------------------------------------------------------------------ commands


def _emit(config: CommandConfig, payload: Dict):
    text = dump_json(payload, config.output)
    if config.output is None:
        print(text)


def _cmd_certify(config: CommandConfig) -> int:
    obj = _load_json_arg(config.subspace)
    s = MatSubspace.from_literal(obj)
    if config.candidate:
        e = ExactMatrix.from_literal(_load_json_arg(config.candidate))
        verdict = verdict_from_candidate(s, e)
    elif config.method == "definition":
        verdict = ms_by_definition(s, config.budget)
    else:
        verdict = ms_by_idempotent_criterion(s, config.budget)
    logger.info(describe_verdict(verdict))
    payload = verdict.to_dict()
    payload["subspace"] = s.to_literal()
    _emit(config, payload)
    return EXIT_NEGATIVE if verdict.status == MsStatus.NOT_MS else EXIT_OK


def _cmd_construct(config: CommandConfig) -> int:
    built = build_from_params(config.family, config.params)
    logger.info("✓ built %s: dim %d, codim %d", config.family, built.subspace.dim, built.subspace.codim)
    _emit(config, built.to_dict())
    return EXIT_OK


def _cmd_maximal(config: CommandConfig) -> int:
    params = dict(config.params)
    name = params.pop("family", None)
    if name not in ("ex24", "cor26"):
        raise ConfigError("--family-params needs \"family\": \"ex24\" or \"cor26\"")
    instance = build_from_params(name, params)
    if config.direction:
        w = ExactMatrix.from_literal(_load_json_arg(config.direction))
        bundle = maximality_witness(instance.family, instance.subspace, w)
        logger.info("✓ %s witness: nonzero idempotent Q in V + F w", bundle.case.value)
        _emit(config, bundle.to_dict())
        return EXIT_OK
    verdict = certify_maximal(instance, workers=config.workers)
    logger.info(describe_maximality(verdict, name))
    payload = verdict.to_dict()
    payload["family"] = instance.to_dict()
    _emit(config, payload)
    return EXIT_OK if verdict.is_maximal else EXIT_NEGATIVE


def _write_csv(config: CommandConfig, frame):
    if config.csv:
        frame.to_csv(config.csv, index=False)
        logger.info("✓ table saved to %s", config.csv)


def _cmd_census(config: CommandConfig) -> int:
    report = ms_census(config.n, config.field_spec(), config.compare_classification,
                       config.budget, config.workers)
    logger.info("\n%s", report.to_frame().to_string(index=False))
    _write_csv(config, report.to_frame())
    logger.info(describe_census(report))
    _emit(config, report.to_dict())
    return EXIT_OK if report.affirmative else EXIT_NEGATIVE


def _cmd_oracle(config: CommandConfig) -> int:
    report = oracle_compare(config.n, config.field_spec(), config.sample, config.seed,
                            config.budget, config.workers)
    logger.info("\n%s", report.agreement_table().to_string())
    _write_csv(config, report.to_frame())
    logger.info(describe_census(report))
    _emit(config, report.to_dict())
    return EXIT_OK if report.oracle_agreement else EXIT_NEGATIVE


def _cmd_classify2(config: CommandConfig) -> int:
    f = config.field_spec()
    predicted = predicted_maximal_families(f)
    report = ms_census(2, f, compare_classification=True, budget=config.budget,
                       workers=config.workers, predicted=predicted)
    logger.info(describe_census(report))
    payload = {
        "kind": "classify2",
        "field": f.to_literal(),
        "predicted": [fam.to_dict() for fam in predicted],
        "census": report.to_dict(),
    }
    _emit(config, payload)
    return EXIT_OK if not report.classification["misses"] else EXIT_NEGATIVE


def _cmd_basechange(config: CommandConfig) -> int:
    if config.s is None:
        raise ConfigError("demo-basechange needs --s")
    demo = basechange_demo(config.field_spec(), config.s)
    logger.info(describe_basechange(demo))
    _emit(config, demo.to_dict())
    return EXIT_OK if demo.flips else EXIT_NEGATIVE


def _cmd_debondt(config: CommandConfig) -> int:
    report = debondt_sample(config.field_spec(), config.n, config.samples, config.seed,
                            budget=config.budget, workers=config.workers)
    logger.info(describe_debondt(report))
    _emit(config, report.to_dict())
    return EXIT_OK if report.affirmative else EXIT_NEGATIVE


HANDLERS = {
    "certify": _cmd_certify,
    "construct": _cmd_construct,
    "maximal": _cmd_maximal,
    "census": _cmd_census,
    "oracle-compare": _cmd_oracle,
    "classify2": _cmd_classify2,
    "demo-basechange": _cmd_basechange,
    "debondt-sample": _cmd_debondt,
}


def run(config: CommandConfig) -> int:
    """Dispatch one command; library errors become exit code 2."""
    try:
        config.validate()
        return HANDLERS[config.command](config)
    except (MathieuError, OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        logger.error("✗ %s: %s", type(e).__name__, e)
        return EXIT_ERROR


# ----------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mzspaces", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--output", help="write the JSON report here instead of stdout")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="element budget for exhaustive loops")
    parser.add_argument("--workers", type=int, default=1, help="thread pool size")
    sub = parser.add_subparsers(dest="command", required=True)

    def field_args(p, flag="--q"):
        p.add_argument(flag, type=int, dest="q", help="field order (prime or prime power)")
        p.add_argument("--modulus", help="modulus coefficients, constant term first, e.g. 1,1,1")

    cert = sub.add_parser("certify", help="MS verdict for a subspace literal")
    cert.add_argument("--subspace", required=True, help="subspace JSON file or literal")
    cert.add_argument("--method", choices=("criterion", "definition"), default="criterion")
    cert.add_argument("--candidate", help="matrix literal of a claimed idempotent")

    cons = sub.add_parser("construct", help="build a family member with its certificate")
    cons.add_argument("--family", required=True, choices=FAMILIES)
    cons.add_argument("--params", required=True, help="family parameters as JSON")

    maxi = sub.add_parser("maximal", help="maximality witnesses for an ex24/cor26 member")
    maxi.add_argument("--family-params", required=True, help='JSON with "family" plus its parameters')
    group = maxi.add_mutually_exclusive_group(required=True)
    group.add_argument("--direction", help="matrix literal of one direction w")
    group.add_argument("--exhaustive", action="store_true")

    cen = sub.add_parser("census", help="MS and maximal-MS census of M_n(F_q)")
    cen.add_argument("--n", type=int, default=2)
    field_args(cen)
    cen.add_argument("--compare-classification", action="store_true")
    cen.add_argument("--csv", help="save the per-dimension table")

    orc = sub.add_parser("oracle-compare", help="definition versus idempotent criterion")
    orc.add_argument("--n", type=int, default=2)
    field_args(orc)
    orc.add_argument("--sample", type=int, nargs="?", const=ORACLE_SAMPLE,
                     help="random sample size instead of the full enumeration")
    orc.add_argument("--seed", type=int, default=DEFAULT_SEED)
    orc.add_argument("--csv", help="save the per-dimension table")

    cls = sub.add_parser("classify2", help="predicted maximal MSs of M_2 against the census")
    field_args(cls, "--field")

    demo = sub.add_parser("demo-basechange", help="MS over K that fails over K(sqrt s)")
    demo.add_argument("--p", type=int, required=True, help="prime, or 0 for the rationals")
    demo.add_argument("--s", required=True)

    deb = sub.add_parser("debondt-sample", help="sampled low-codimension subspaces of M_n")
    deb.add_argument("--n", type=int, default=3)
    field_args(deb)
    deb.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    deb.add_argument("--seed", type=int, default=DEFAULT_SEED)
    deb.set_defaults(q=5)
    return parser


def config_from_args(args: argparse.Namespace) -> CommandConfig:
    values = vars(args)
    p = values.get("p")
    k = 1
    modulus = None
    q = values.get("q")
    if q is not None:
        p, k = _split_order(q)
        if k > 1:
            if not values.get("modulus"):
                raise ConfigError(f"q = {q} needs --modulus")
            try:
                modulus = tuple(int(c) for c in values["modulus"].split(","))
            except ValueError as exc:
                text = values["modulus"]
                raise ConfigError(f"--modulus must be comma-separated integers, got {text!r}") from exc
    params = {}
    if values.get("params"):
        params = _load_json_arg(values["params"])
    if values.get("family_params"):
        params = _load_json_arg(values["family_params"])
    if not isinstance(params, dict):
        raise ConfigError("family parameters must be a JSON object")
    return CommandConfig(
        command=args.command,
        p=p,
        k=k,
        modulus=modulus,
        n=values.get("n") or 2,
        subspace=values.get("subspace"),
        method=values.get("method") or "criterion",
        candidate=values.get("candidate"),
        family=values.get("family"),
        params=params,
        direction=values.get("direction"),
        exhaustive=bool(values.get("exhaustive")),
        compare_classification=bool(values.get("compare_classification")),
        sample=values.get("sample"),
        samples=values.get("samples", DEFAULT_SAMPLES),
        seed=values.get("seed", DEFAULT_SEED),
        s=values.get("s"),
        budget=args.budget,
        workers=args.workers,
        output=args.output,
        csv=values.get("csv"),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
    )
    try:
        config = config_from_args(args)
    except MathieuError as e:
        logger.error("✗ %s", e)
        return EXIT_ERROR
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
