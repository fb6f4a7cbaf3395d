"""
Command-line entry point.

Exit codes: 0 on success, 1 when a verification fails (the witness is written to
stdout as JSON), 2 on usage errors and exceeded caps.
"""

import argparse
import dataclasses
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from src.conf.config import configure_logging, settings
from src.services.asymptotics import asymptotic_constants, estimate_asymptotics
from src.services.bijections import mobile_to_hypermap
from src.services.counting import cached_counts
from src.services.errors import CartoError, VerificationError
from src.services.mobiles import Flavor, sample_pointed_rooted
from src.services.oracle import enumerate_family, pointed_rooted_profile, sampler_check
from src.services.twopoint import closed_form, get_family, solve_recurrence
from src.services.verify import run_suite


logger = logging.getLogger(__name__)

SUBCOMMANDS = ("twopoint", "verify", "enumerate", "sample", "asymptotics", "export", "serve")


class Config(BaseModel):
    """
    One validated invocation.

    Caps from ``settings`` are enforced here, before any work starts.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="ignore")

    subcommand: Literal["twopoint", "verify", "enumerate", "sample", "asymptotics", "export", "serve"]
    family: str = "GeneralMap"
    i: int = 1
    order: Optional[int] = None
    z: Optional[Fraction] = None
    provenance: Literal["recurrence", "closed_form"] = "closed_form"
    format: Literal["json", "csv"] = "json"
    series: Optional[str] = None
    out: Optional[Path] = None
    suite: Literal["roundtrip", "oracle", "closedform", "identities", "all"] = "all"
    max_edges: int = 3
    n: Optional[int] = None
    profile: Optional[Literal["root", "face"]] = None
    seed: Optional[int] = None
    trials: Optional[int] = None
    exact: bool = False
    as_float: bool = False
    observable: str = "R"
    terms: int = 12
    host: str = "127.0.0.1"
    port: int = 8000
    jobs: int = settings.JOBS
    log_level: Optional[str] = None

    @model_validator(mode="after")
    def check_caps(self) -> "Config":
        if self.subcommand in ("twopoint", "export", "asymptotics"):
            try:
                self.family = get_family(self.family).name
            except CartoError as e:
                raise ValueError(str(e))
        if self.order is not None and not 0 <= self.order <= settings.MAX_SERIES_ORDER:
            raise ValueError(f"--order must lie in 0..{settings.MAX_SERIES_ORDER}")
        if self.i < 0:
            raise ValueError("--i must be nonnegative")
        if self.jobs < 1:
            raise ValueError("--jobs must be positive")
        if self.subcommand in ("enumerate", "sample") and (self.n is None or self.n < 1):
            raise ValueError("--n must be a positive size")
        if self.subcommand == "sample" and self.n > settings.MAX_MOBILE_BLACKS:
            raise ValueError(f"sampling is capped at {settings.MAX_MOBILE_BLACKS} edges")
        if self.trials is not None and self.trials < 1:
            raise ValueError("--trials must be positive")
        if self.as_float and (self.subcommand != "asymptotics" or self.order is None):
            raise ValueError("--float applies to the estimator only and needs --order")
        if self.subcommand == "export" and self.out is None:
            raise ValueError("export needs --out")
        return self


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=settings.JOBS, help="Worker processes.")
    common.add_argument("--log-level", default=None, help="Logging threshold, LOG_LEVEL by default.")
    return common


def _series_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", default="general", help="Family name or alias.")
    p.add_argument("--i", type=int, default=1, help="Largest distance index.")
    p.add_argument("--order", type=int, default=None, help="Truncation order in t.")
    p.add_argument("--z", type=Fraction, default=None, help="Rational face weight.")
    p.add_argument("--provenance", choices=["recurrence", "closed_form"], default="closed_form")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carto",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        description="Labelled maps, mobiles and exact two-point functions.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    common = _common()

    p = sub.add_parser("twopoint", parents=[common], help="Two-point series of a family.")
    _series_flags(p)
    p.add_argument("--series", default=None, help="Series key for CSV output, R_<i> by default.")

    p = sub.add_parser("verify", parents=[common], help="Run a verification suite.")
    p.add_argument("--suite", choices=["roundtrip", "oracle", "closedform", "identities", "all"], default="all")
    p.add_argument("--max-edges", type=int, default=3, help="Largest size of the exhaustive suites.")
    p.add_argument("--order", type=int, default=None, help="Truncation order of the series suites.")

    p = sub.add_parser("enumerate", parents=[common], help="Brute-force rooted objects.")
    p.add_argument("--n", type=int, required=True, help="Edges, or dark faces for the 3-families.")
    p.add_argument("--family", default="GeneralMap")
    p.add_argument("--profile", choices=["root", "face"], default=None)

    p = sub.add_parser("sample", parents=[common], help="Uniform pointed rooted maps through mobiles.")
    p.add_argument("--n", type=int, required=True, help="Number of edges.")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None, help="Run a chi-square uniformity check.")

    p = sub.add_parser("asymptotics", parents=[common], help="Local limit constants.")
    p.add_argument("--family", default="general")
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--exact", action="store_true", help="Exact rational constants.")
    p.add_argument("--order", type=int, default=None, help="Coefficients used by the estimator.")
    p.add_argument("--observable", default="R")
    p.add_argument("--terms", type=int, default=12, help="Richardson terms.")
    p.add_argument("--float", dest="as_float", action="store_true", help="Estimator value as a float.")

    p = sub.add_parser("export", parents=[common], help="Write a two-point table to disk.")
    _series_flags(p)
    p.add_argument("--out", type=Path, required=True, help="JSON file, or directory of CSV files.")

    p = sub.add_parser("serve", parents=[common], help="Run the HTTP API.")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _dump(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _table(config: Config):
    solver = solve_recurrence if config.provenance == "recurrence" else closed_form
    return solver(config.family, config.i, config.order, config.z)


def _twopoint(config: Config) -> int:
    table = _table(config)
    if config.format == "json":
        sys.stdout.write(_dump(table.to_json()))
        return 0
    key = config.series or f"R_{config.i}"
    found = {**table.entries(), **table.parameters}.get(key)
    if found is None:
        raise CartoError(f"{table.family} table has no series {key!r}")
    sys.stdout.write(found.to_csv())
    return 0


def _export(config: Config) -> int:
    table = _table(config)
    if config.format == "json":
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(_dump(table.to_json()), encoding="utf-8")
        written = [str(config.out)]
    else:
        config.out.mkdir(parents=True, exist_ok=True)
        written = []
        for key, s in sorted({**table.entries(), **table.parameters}.items()):
            path = config.out / f"{key}.csv"
            path.write_text(s.to_csv(), encoding="utf-8")
            written.append(str(path))
    logger.info("exported %d files", len(written))
    sys.stdout.write(_dump({"family": table.family, "written": written}))
    return 0


def _verify(config: Config) -> int:
    report = run_suite(config.suite, config.max_edges, config.order, config.jobs)
    sys.stdout.write(_dump(report.to_json()))
    return 0 if report.ok else 1


def _enumerate(config: Config) -> int:
    family = get_family(config.family).name
    if config.profile is None:
        report = enumerate_family(family, config.n, config.jobs)
    else:
        report = pointed_rooted_profile(config.n, family, kind=config.profile, jobs=config.jobs)
    sys.stdout.write(_dump(report.to_json()))
    return 0


def _sample(config: Config) -> int:
    n = config.n
    counts = cached_counts(Flavor(p=2), n, 1 + 4 * n)
    if config.trials is not None:
        report = sampler_check(n, config.trials, config.seed, counts=counts)
        sys.stdout.write(_dump({**dataclasses.asdict(report), "seed": config.seed}))
        return 0
    mobile = sample_pointed_rooted(n, seed=config.seed, counts=counts)
    decoded = mobile_to_hypermap(mobile)
    payload = {
        "n": n,
        "seed": config.seed,
        "mobile": mobile.encode(),
        "hypermap": decoded.hypermap.to_json(
            labels=list(decoded.labels), pointed=decoded.pointed, root=decoded.root
        ),
    }
    sys.stdout.write(_dump(payload))
    return 0


def _asymptotics(config: Config) -> int:
    payload = {}
    if config.exact or config.order is None:
        payload["constants"] = asymptotic_constants(config.family, config.i).to_json()
    if config.order is not None:
        estimate = estimate_asymptotics(config.family, config.i, config.order, config.observable, config.terms)
        payload["estimate"] = estimate.to_json(as_float=config.as_float)
    sys.stdout.write(_dump(payload))
    return 0


def _serve(config: Config) -> int:
    import uvicorn

    uvicorn.run("main:app", host=config.host, port=config.port)
    return 0


HANDLERS = {
    "twopoint": _twopoint,
    "verify": _verify,
    "enumerate": _enumerate,
    "sample": _sample,
    "asymptotics": _asymptotics,
    "export": _export,
    "serve": _serve,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse, validate and execute one invocation.

    Args:
        argv (Optional[Sequence[str]]): Arguments without the program name; ``sys.argv[1:]`` by default.

    Returns:
        int: The exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        config = Config(**vars(args))
    except ValidationError as e:
        message = "; ".join(err["msg"] for err in e.errors())
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"carto {args.subcommand}: error: {message}\n")
        return 2
    configure_logging(config.log_level)
    try:
        return HANDLERS[config.subcommand](config)
    except VerificationError as e:
        logger.error("%s", e)
        sys.stdout.write(_dump({"check": e.check, "witness": e.witness}))
        return 1
    except CartoError as e:
        logger.error("%s", e)
        sys.stderr.write(f"carto {config.subcommand}: error: {e}\n")
        return 2


def main() -> None:
    sys.exit(run())
