# apps/ghm/main.py
"""
ghm command line: build generalized Hilbert matrices, evaluate their closed
forms and check them against the exact oracles.

    ghm <family> <command> --n N [family flags] [--z0 Z] [--prec P]
        [--format json|csv] [--printed-formulas] [--output PATH]

Exit codes: 0 success, 1 verification mismatch, 2 usage/parameter error.
"""
from __future__ import annotations

import logging
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import click
from pydantic import BaseModel, ConfigDict

from apps.ghm.services.errors import (
    GeneratorError,
    GHMError,
    IncompatibleCommand,
    LinearAlgebraError,
    MalformedFlagValue,
    MalformedRational,
    MissingParameter,
    NotApplicable,
    ParameterError,
    UnknownFlag,
    ZeroDenominator,
)
from apps.ghm.services.exact_arith import (
    MIN_PRECISION,
    ComplexRational,
    as_complex,
    format_complex,
    format_rational,
    parse_complex,
    parse_rational,
)
from apps.ghm.services.families.base import Family
from apps.ghm.services.families.registry import (
    FAMILY_NAMES,
    allowed_params,
    is_hermitian,
    make_family,
    required_params,
)
from apps.ghm.services.gram_engine import (
    GramReport,
    build_A,
    build_H,
    cd_bound,
    closed_dets,
    corollary_bound,
    determinantal_system,
    theorem_bounds,
)
from apps.ghm.services.matrix_core import (
    ExactMatrix,
    bareiss_det,
    exact_inverse,
    is_positive_definite,
    smallest_eigenvalue,
)
from apps.ghm.services.report import FORMATS, emit_report
from apps.ghm.settings import load_settings

log = logging.getLogger("apps.ghm.cli")

COMMANDS = ("matrix", "det", "inverse", "bound", "eigen", "verify")
HERMITIAN_ONLY = ("bound", "eigen")
RATIONAL_PARAMS = ("a", "b", "c", "q", "V", "alpha", "beta")

Rows = Tuple[Tuple[ComplexRational, ...], ...]


# -------------------------------
#       MODELS
# -------------------------------
class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: str
    command: str
    n: int
    alphas: Optional[Tuple[ComplexRational, ...]] = None
    a: Optional[Fraction] = None
    b: Optional[Fraction] = None
    c: Optional[Fraction] = None
    q: Optional[Fraction] = None
    V: Optional[Fraction] = None
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None
    connection: Optional[Rows] = None
    prec: int = 256
    z0: Optional[ComplexRational] = None
    format: str = "json"
    printed_formulas: bool = False
    output: Optional[str] = None

    @property
    def params(self) -> Dict[str, object]:
        names = ("alphas", "connection") + RATIONAL_PARAMS
        return {name: getattr(self, name) for name in names if getattr(self, name) is not None}


# -------------------------------
#   Parameter types
# -------------------------------
class _ExactParamType(click.ParamType):
    def _parse(self, text: str):
        raise NotImplementedError

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            return self._parse(value)
        except MalformedRational as e:
            flag = param.opts[0] if param is not None else self.name
            raise MalformedFlagValue(f"{flag}: {e}", ctx) from e


class RationalType(_ExactParamType):
    name = "rational"

    def _parse(self, text: str) -> Fraction:
        return parse_rational(text)


class ComplexType(_ExactParamType):
    name = "complex"

    def _parse(self, text: str) -> ComplexRational:
        return parse_complex(text)


class ComplexListType(_ExactParamType):
    name = "complex-list"

    def _parse(self, text: str) -> Tuple[ComplexRational, ...]:
        return tuple(parse_complex(part) for part in text.split(","))


class ConnectionType(_ExactParamType):
    """Rows separated by ';', entries by ','."""

    name = "rows"

    def _parse(self, text: str) -> Rows:
        return tuple(tuple(parse_complex(x) for x in row.split(",")) for row in text.split(";"))


RATIONAL = RationalType()
COMPLEX = ComplexType()
COMPLEX_LIST = ComplexListType()
CONNECTION = ConnectionType()


# -------------------------------
#   Argument parsing
# -------------------------------
def _check_compatibility(config: RunConfig) -> None:
    allowed = allowed_params(config.family)
    for name in ("alphas", "connection") + RATIONAL_PARAMS:
        if getattr(config, name) is not None and name not in allowed:
            raise IncompatibleCommand(f"--{name} does not apply to the {config.family} family")
    missing = [name for name in required_params(config.family) if getattr(config, name) is None]
    if missing:
        raise MissingParameter(f"{config.family} needs --{', --'.join(missing)}")
    if config.command in HERMITIAN_ONLY and not is_hermitian(config.family):
        raise IncompatibleCommand(f"{config.command} needs a Hermitian family, got {config.family}")
    if config.printed_formulas and config.command != "verify":
        raise IncompatibleCommand("--printed-formulas is only valid with verify")


@click.command(name="ghm", context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("family", type=click.Choice(FAMILY_NAMES))
@click.argument("command", type=click.Choice(COMMANDS))
@click.option("--n", "n", type=click.IntRange(min=0), default=None, help="Matrix order (size n + 1).")
@click.option("--alphas", type=COMPLEX_LIST, default=None, help="Comma-separated exponents.")
@click.option("--a", "a", type=RATIONAL, default=None)
@click.option("--b", "b", type=RATIONAL, default=None)
@click.option("--c", "c", type=RATIONAL, default=None)
@click.option("--q", "q", type=RATIONAL, default=None)
@click.option("--V", "V", type=RATIONAL, default=None, help="q^(nu+1) for the lommel family.")
@click.option("--alpha", type=RATIONAL, default=None)
@click.option("--beta", type=RATIONAL, default=None)
@click.option("--connection", type=CONNECTION, default=None, help="Lower-triangular C as 'r0;r1;...'.")
@click.option("--z0", type=COMPLEX, default=None, help="Unimodular point for the corollary bounds.")
@click.option("--prec", type=click.IntRange(min=MIN_PRECISION), default=None, help="BigFloat precision in bits.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None)
@click.option("--printed-formulas", is_flag=True, default=False, help="Also evaluate the printed closed forms.")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def _arguments(family, command, n, fmt, prec, **params) -> RunConfig:
    if n is None:
        raise MissingParameter("--n is required")
    settings = load_settings()
    config = RunConfig(
        family=family,
        command=command,
        n=n,
        prec=settings.prec if prec is None else prec,
        format=settings.format if fmt is None else fmt,
        **params,
    )
    _check_compatibility(config)
    return config


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Validated RunConfig; click.exceptions.Exit for --help."""
    try:
        with _arguments.make_context("ghm", list(argv)) as ctx:
            return _arguments.invoke(ctx)
    except click.NoSuchOption as e:
        raise UnknownFlag(e.format_message()) from e


def format_args(config: RunConfig) -> List[str]:
    """argv that parse_args maps back to ``config``."""
    argv = [config.family, config.command, f"--n={config.n}"]
    if config.alphas is not None:
        argv.append("--alphas=" + ",".join(format_complex(x) for x in config.alphas))
    for name in RATIONAL_PARAMS:
        value = getattr(config, name)
        if value is not None:
            argv.append(f"--{name}={format_rational(value)}")
    if config.connection is not None:
        rows = ";".join(",".join(format_complex(x) for x in row) for row in config.connection)
        argv.append(f"--connection={rows}")
    if config.z0 is not None:
        argv.append(f"--z0={format_complex(config.z0)}")
    argv += [f"--prec={config.prec}", f"--format={config.format}"]
    if config.printed_formulas:
        argv.append("--printed-formulas")
    if config.output is not None:
        argv.append(f"--output={config.output}")
    return argv


# -------------------------------
#   Evaluation
# -------------------------------
_SKIPPABLE = (NotApplicable, LinearAlgebraError, GeneratorError, ZeroDenominator)


def _fill_matrix(report: GramReport, fam: Family, n: int) -> ExactMatrix:
    H = fam.matrix(n)
    report.entries = H
    return H


def _fill_det(report: GramReport, fam: Family, H: ExactMatrix, n: int) -> None:
    report.det_closed = as_complex(fam.closed_det(n))
    report.det_oracle = bareiss_det(H)


def _fill_inverse(report: GramReport, fam: Family, H: ExactMatrix, n: int) -> None:
    report.inverse_closed = fam.closed_inverse(n)
    report.inverse_oracle = exact_inverse(H)


def _fill_bounds(report: GramReport, fam: Family, n: int, prec: int, z0: Optional[ComplexRational]) -> None:
    if not fam.pd_mode():
        log.info("[Bounds] %s parameters are outside the positive-definite regime", fam.name)
    gsys = fam.gram_system()
    try:
        report.bounds["b1"], report.bounds["b2"] = theorem_bounds(gsys, n, prec)
    except _SKIPPABLE as e:
        report.bounds["b1"] = report.bounds["b2"] = None
        report.bound_notes["b1"] = report.bound_notes["b2"] = str(e)
    evaluators = {
        "closed": lambda: fam.closed_bound(n, prec),
        "corollary": lambda: corollary_bound(gsys, n, z0, prec),
        "cd": lambda: cd_bound(gsys, n, z0, prec),
    }
    for key, evaluate in evaluators.items():
        if key != "closed" and z0 is None:
            report.bounds[key] = None
            report.bound_notes[key] = "no z0 given and the family has no default"
            continue
        try:
            report.bounds[key] = evaluate()
        except _SKIPPABLE as e:
            report.bounds[key] = None
            report.bound_notes[key] = str(e)
            log.info("[Bounds] %s skipped: %s", key, e)
            continue
        if report.bounds[key].note:
            report.bound_notes[key] = report.bounds[key].note


def _fill_enclosure(report: GramReport, fam: Family, n: int, prec: int) -> None:
    try:
        report.enclosure = smallest_eigenvalue(fam.gram_matrix(n), prec)
    except LinearAlgebraError as e:
        report.bound_notes["lambda_s"] = str(e)


def _fill_checks(report: GramReport, fam: Family, H: ExactMatrix, n: int) -> None:
    checks = report.checks
    sys_ = fam.system
    if fam.has_entry_formula():
        checks["entries_gram"] = H == build_H(sys_, n)
    checks["gram_inverse"] = fam.gram_inverse(n) == report.inverse_oracle
    checks["identity"] = H @ report.inverse_closed == ExactMatrix.identity(n + 1)
    dets = closed_dets(sys_, n)
    checks["det_h"] = dets.det_h == report.det_oracle
    G = fam.gram_matrix(n)
    checks["det_g"] = dets.det_g == bareiss_det(G)
    if is_positive_definite(G):
        dsys = determinantal_system(G, name=f"{fam.name}-determinantal")
        A = build_A(fam.gram_system(), n)
        D = build_A(dsys, n)
        checks["determinantal"] = build_H(dsys, n) == G and all(
            D.d2[ell] * D[ell, ell].abs2() == A.d2[ell] * A[ell, ell].abs2() for ell in range(n + 1)
        )
    cd, cor = report.bounds.get("cd"), report.bounds.get("corollary")
    if cd is not None and cor is not None:
        checks["cd_corollary"] = cd.exact == cor.exact


def _evaluate(config: RunConfig, command: str) -> GramReport:
    report = GramReport(family=config.family, n=config.n, prec=config.prec, command=command)
    n, prec = config.n, config.prec
    try:
        fam = make_family(config.family, config.params)
        fam.check_order(n)
        z0 = config.z0 if config.z0 is not None else fam.default_z0()
        report.z0 = z0
        H = _fill_matrix(report, fam, n)
        if command in ("det", "verify"):
            _fill_det(report, fam, H, n)
        if command in ("inverse", "verify"):
            _fill_inverse(report, fam, H, n)
        if command in ("bound", "verify"):
            _fill_bounds(report, fam, n, prec, z0)
        if command in ("bound", "eigen", "verify"):
            _fill_enclosure(report, fam, n, prec)
        if command == "verify":
            _fill_checks(report, fam, H, n)
            if config.printed_formulas:
                report.errata = fam.printed_errata(n, prec)
    except ParameterError as e:
        log.warning("[Verify] parameter error: %s", e)
        report.errors.append(f"{type(e).__name__}: {e}")
        report.parameter_error = True
    except GHMError as e:
        log.error("[Verify] %s failed: %s", command, e)
        report.errors.append(f"{type(e).__name__}: {e}")
    return report


def run_verify(config: RunConfig) -> GramReport:
    """Every closed form against every oracle, plus bounds, enclosure and (optionally) errata."""
    return _evaluate(config, "verify")


def run_command(config: RunConfig) -> GramReport:
    return _evaluate(config, config.command)


def exit_code(report: GramReport) -> int:
    if report.parameter_error:
        return 2
    return 0 if report.ok else 1


# -------------------------------
#   Entry points
# -------------------------------
def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="[%(name)s] %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        settings = load_settings()
    except ParameterError as e:
        click.echo(f"ghm: {e}", err=True)
        return 2
    _configure_logging(settings.log_level)
    try:
        config = parse_args(argv)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except ParameterError as e:
        click.echo(f"ghm: {e}", err=True)
        return 2

    report = run_command(config)
    text = emit_report(report, config.format)
    if config.output:
        with click.open_file(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    for err in report.errors:
        click.echo(f"ghm: {err}", err=True)
    return exit_code(report)


@click.command(
    name="ghm",
    context_settings={"ignore_unknown_options": True, "allow_extra_args": True},
    add_help_option=False,
)
@click.pass_context
def cli(ctx: click.Context) -> None:
    ctx.exit(main(ctx.args))


if __name__ == "__main__":
    cli()
