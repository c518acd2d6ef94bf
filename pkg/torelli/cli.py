import os
import sys
from contextlib import contextmanager
from typing import Iterator

import typer
from dotenv import load_dotenv

load_dotenv()  # loads .env from the current working directory if present

from mpmath import mp

from torelli.ciani import ab_of, classify, closed_discriminant, x_invariant
from torelli.config import RunConfig, load_config
from torelli.errors import ConfigurationError, IdentityCheckError, InputFormatError, TorelliError
from torelli.klein import (
    coefficients_from_tau,
    eighteen_identities,
    verify_klein_corollary,
    verify_main_identity,
)
from torelli.loading import load_payload, parse_tau_list, read_source
from torelli.polycore import parse_form, render
from torelli.render import render_report, summary_table
from torelli.resultant import discriminant_quartic
from torelli.schemas import (
    ChiReport,
    ClassifyReport,
    ComplexValue,
    DiscReport,
    FormPayload,
    IgusaReport,
    IntegerMatrixPayload,
    IsotropicReport,
    KleinCorollaryReport,
    KleinReport,
    MatrixPayload,
    SymplecticReport,
    TauPayload,
    ThetaReport,
    fmt_rational,
    fmt_real,
)
from torelli.selftest import run_selftest, suite_names
from torelli.symplectic import (
    Subgroup,
    ThetaCharacteristic,
    enumerate_max_isotropic,
    kappa_squared_parabolic,
    membership_report,
    subgroup_membership,
)
from torelli.theta import (
    GUARD_BITS,
    IgusaLabel,
    RiemannMatrix,
    VanishingPolicy,
    chi_k,
    chi_weight,
    classify_parity,
    igusa_classify,
    sigma140,
    theta_null,
)

EXIT_DOMAIN_ERROR: int = 1
EXIT_USAGE: int = 2
EXIT_INDETERMINATE: int = 3

app = typer.Typer(
    name="torelli",
    help="Exact and high-precision checks for Ciani quartics, theta constants and chi18.",
    add_completion=False,
    no_args_is_help=True,
)
theta_app = typer.Typer(help="Theta constants.", no_args_is_help=True)
isotropic_app = typer.Typer(help="Maximal isotropic subspaces of F_2^(2g).", no_args_is_help=True)
symplectic_app = typer.Typer(help="Integer symplectic matrices.", no_args_is_help=True)
app.add_typer(theta_app, name="theta")
app.add_typer(isotropic_app, name="isotropic")
app.add_typer(symplectic_app, name="symplectic")

_PREC_HELP = "Working precision in bits (overrides --prec before the command and TORELLI_PREC)"
_TAU_HELP = "Riemann matrix: TauPayload JSON (inline or file), or comma-separated diagonal entries like '0.8i,1.1i'"


@app.callback()
def main(
    ctx: typer.Context,
    prec: int | None = typer.Option(None, "--prec", help="Working precision in bits (default 256)"),
    workers: int | None = typer.Option(None, "--workers", help="Worker pool size for theta and grid evaluation"),
    output_format: str | None = typer.Option(None, "--format", help="Output format: json or text"),
    seed: int | None = typer.Option(None, "--seed", help="Seed for randomized selftest suites"),
    debug: bool = typer.Option(False, "--debug", help="Emit [DEBUG] lines on stderr"),
) -> None:
    if debug:
        os.environ["TORELLI_DEBUG"] = "1"
    ctx.obj = {"precision": prec, "workers": workers, "output_format": output_format, "seed": seed}


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------

def _config(ctx: typer.Context, prec: int | None = None, theta: bool = False) -> RunConfig:
    overrides = dict(ctx.obj or {})
    if prec is not None:
        overrides["precision"] = prec
    try:
        config = load_config(**overrides)
        if theta:
            config.require_theta_precision()
    except ConfigurationError as exc:
        typer.echo(f"Error [{exc.code}]: {exc}", err=True)
        raise typer.Exit(code=EXIT_USAGE)
    return config


@contextmanager
def _domain_errors() -> Iterator[None]:
    """TorelliError -> 'Error [<code>]: <message>' on stderr, exit 1."""
    try:
        yield
    except ConfigurationError as exc:
        typer.echo(f"Error [{exc.code}]: {exc}", err=True)
        raise typer.Exit(code=EXIT_USAGE)
    except TorelliError as exc:
        typer.echo(f"Error [{exc.code}]: {exc}", err=True)
        raise typer.Exit(code=EXIT_DOMAIN_ERROR)


def _emit(report, config: RunConfig) -> None:
    typer.echo(render_report(report, config.output_format))


def _read_tau(text: str, precision: int) -> RiemannMatrix:
    raw = read_source(text).strip()
    if raw.startswith("{"):
        return load_payload(raw, TauPayload).to_riemann(precision)
    return RiemannMatrix.diagonal(parse_tau_list(raw, precision), precision)


def _complex_list(values, precision: int) -> list[ComplexValue]:
    return [ComplexValue.of(v, precision) for v in values]


# ---------------------------------------------------------------------------
# Exact commands
# ---------------------------------------------------------------------------

@app.command(name="disc")
def disc_cmd(
    ctx: typer.Context,
    form: str = typer.Option(..., "--form", help="Quartic as text ('x^4+y^4+z^4'), a FormPayload JSON, or a file"),
    rule: str = typer.Option("greedy", "--rule", help="Sylvester split rule: greedy or reverse"),
) -> None:
    """Exact discriminant of a ternary quartic."""
    if rule not in ("greedy", "reverse"):
        raise typer.BadParameter(f"rule must be 'greedy' or 'reverse', got {rule!r}", param_hint="--rule")
    config = _config(ctx)
    with _domain_errors():
        raw = read_source(form).strip()
        q = load_payload(raw, FormPayload).to_form() if raw.startswith("{") else parse_form(raw, 4)
        value = discriminant_quartic(q, rule)
        _emit(DiscReport(form=render(q), rule=rule, discriminant=fmt_rational(value)), config)


@app.command(name="classify")
def classify_cmd(
    ctx: typer.Context,
    matrix: str = typer.Option(..., "--matrix", help='Ciani matrix JSON {"a": [...], "b": [...]} or a file'),
) -> None:
    """Classify the marked triple of a Ciani matrix by T = det Mat(A, rho)."""
    config = _config(ctx)
    with _domain_errors():
        payload = load_payload(matrix, MatrixPayload)
        m = payload.to_matrix()
        result = classify(ab_of(m))
        report = ClassifyReport(
            matrix=payload,
            label=result.label.value,
            T=fmt_rational(result.t),
            square=result.square,
            twist_d=fmt_rational(result.twist.d) if result.twist else None,
            X=fmt_rational(x_invariant(m)),
            D=fmt_rational(closed_discriminant(m)),
        )
        _emit(report, config)


@isotropic_app.command(name="enumerate")
def isotropic_enumerate_cmd(
    ctx: typer.Context,
    g: int = typer.Option(3, "--g", help="Genus, 1 to 3"),
) -> None:
    """List the maximal isotropic subspaces by canonical basis."""
    config = _config(ctx)
    with _domain_errors():
        subspaces = enumerate_max_isotropic(g)
        report = IsotropicReport(
            g=g,
            count=len(subspaces),
            subspaces=[[list(v) for v in s.basis] for s in subspaces],
        )
        _emit(report, config)


@symplectic_app.command(name="check")
def symplectic_check_cmd(
    ctx: typer.Context,
    matrix: str = typer.Option(..., "--matrix", help='{"matrix": [[...], ...]} (2g x 2g integers) or a file'),
) -> None:
    """Symplecticity and subgroup membership of an integer matrix."""
    config = _config(ctx)
    with _domain_errors():
        m = load_payload(matrix, IntegerMatrixPayload).to_symplectic()
        kappa = kappa_squared_parabolic(m) if subgroup_membership(m, Subgroup.PARABOLIC) else None
        _emit(SymplecticReport(g=m.g, membership=membership_report(m), kappa_squared=kappa), config)


# ---------------------------------------------------------------------------
# Theta commands
# ---------------------------------------------------------------------------

@theta_app.command(name="null")
def theta_null_cmd(
    ctx: typer.Context,
    char: str = typer.Option(..., "--char", help="Characteristic such as '[101;010]'"),
    tau: str = typer.Option(..., "--tau", help=_TAU_HELP),
    prec: int | None = typer.Option(None, "--prec", help=_PREC_HELP),
) -> None:
    """Theta constant theta[eps](tau)."""
    try:
        eps = ThetaCharacteristic.parse(char)
    except ValueError as exc:
        raise typer.BadParameter(str(exc), param_hint="--char")
    config = _config(ctx, prec, theta=True)
    with _domain_errors():
        riemann = _read_tau(tau, config.precision)
        value = theta_null(eps, riemann, config.precision)
        report = ThetaReport(
            characteristic=str(eps),
            parity=classify_parity(eps),
            precision=config.precision,
            value=ComplexValue.of(value, config.precision),
        )
        _emit(report, config)


@app.command(name="chi18")
def chi18_cmd(
    ctx: typer.Context,
    tau: str = typer.Option(..., "--tau", help=_TAU_HELP),
    prec: int | None = typer.Option(None, "--prec", help=_PREC_HELP),
) -> None:
    """Product of the even theta constants (chi18 in genus 3, chi_k otherwise)."""
    config = _config(ctx, prec, theta=True)
    with _domain_errors():
        riemann = _read_tau(tau, config.precision)
        value = chi_k(riemann, config.precision, config.workers)
        report = ChiReport(
            kind="chi18" if riemann.g == 3 else "chi_k",
            g=riemann.g,
            weight=chi_weight(riemann.g),
            precision=config.precision,
            value=ComplexValue.of(value, config.precision),
        )
        _emit(report, config)


@app.command(name="sigma140")
def sigma140_cmd(
    ctx: typer.Context,
    tau: str = typer.Option(..., "--tau", help=_TAU_HELP),
    prec: int | None = typer.Option(None, "--prec", help=_PREC_HELP),
) -> None:
    """Sigma140: the sum over even eps of the products of the other 35 eighth powers."""
    config = _config(ctx, prec, theta=True)
    with _domain_errors():
        riemann = _read_tau(tau, config.precision)
        value = sigma140(riemann, config.precision, config.workers)
        report = ChiReport(
            kind="sigma140",
            g=riemann.g,
            precision=config.precision,
            value=ComplexValue.of(value, config.precision),
        )
        _emit(report, config)


@app.command(name="igusa")
def igusa_cmd(
    ctx: typer.Context,
    tau: str = typer.Option(..., "--tau", help=_TAU_HELP),
    prec: int | None = typer.Option(None, "--prec", help=_PREC_HELP),
) -> None:
    """Decomposable / hyperelliptic / non-hyperelliptic from the vanishing of chi18 and Sigma140."""
    config = _config(ctx, prec, theta=True)
    with _domain_errors():
        riemann = _read_tau(tau, config.precision)
        policy = VanishingPolicy(config.zero_fraction, config.nonzero_fraction)
        result = igusa_classify(riemann, config.precision, policy, config.workers)
        with mp.workprec(config.precision + GUARD_BITS):
            report = IgusaReport(
                label=result.label.value,
                precision=config.precision,
                chi18_abs=fmt_real(abs(result.chi18)),
                sigma140_abs=fmt_real(abs(result.sigma140)),
                zero_count=result.zero_count,
                band_count=result.band_count,
                smallest_magnitudes=[fmt_real(m) for m in result.magnitudes[:3]],
            )
        _emit(report, config)
    if result.label is IgusaLabel.INDETERMINATE:
        print(
            f"[WARN] {result.band_count} theta magnitude(s) fall inside the guard band; raise --prec",
            file=sys.stderr,
        )
        raise typer.Exit(code=EXIT_INDETERMINATE)


# ---------------------------------------------------------------------------
# Main identity
# ---------------------------------------------------------------------------

def _klein_report(taus_text: str, config: RunConfig, timings: bool) -> KleinReport:
    p = config.precision
    taus = parse_tau_list(taus_text, p)
    if len(taus) != 3:
        raise InputFormatError(f"verify-klein needs three tau values, got {len(taus)}", raw_input=taus_text)
    print(f"[INFO] uniformizing at p = {p}", file=sys.stderr)
    u = coefficients_from_tau(taus, None, p)
    eighteen = eighteen_identities(u, workers=config.workers)
    print("[INFO] evaluating chi18 on the quotient", file=sys.stderr)
    main_report = verify_main_identity(taus, p, workers=config.workers, uniformized=u)
    policy = VanishingPolicy(config.zero_fraction, config.nonzero_fraction)
    label = igusa_classify(main_report.tau_prime, p, policy, config.workers).label
    return KleinReport(
        taus=_complex_list(u.taus, p),
        precision=p,
        residual_main=fmt_real(main_report.residual),
        closed_residual=fmt_real(main_report.closed_residual),
        degenerate=main_report.degenerate,
        lhs=ComplexValue.of(main_report.lhs, p),
        rhs=ComplexValue.of(main_report.rhs, p),
        det_m=ComplexValue.of(main_report.det_m, p),
        c=ComplexValue.of(eighteen.c, p),
        fitted_from=eighteen.fitted_from,
        residuals_18=[fmt_real(r, 3) for r in eighteen.residuals],
        c_modulus_residual=fmt_real(eighteen.c_modulus_residual),
        classification=label.value,
        passed=main_report.passed(p) and eighteen.passed(p),
        timings={k: f"{v:.3f}" for k, v in main_report.timings.items()} if timings else None,
    )


def _corollary_report(matrix: str, config: RunConfig, timings: bool) -> KleinCorollaryReport:
    p = config.precision
    m = load_payload(matrix, MatrixPayload).to_matrix()
    report = verify_klein_corollary(m, p, config.workers)
    return KleinCorollaryReport(
        matrix=MatrixPayload.from_matrix(m),
        cofactor=MatrixPayload.from_matrix(report.cofactor),
        precision=p,
        D=fmt_rational(report.d_value),
        X=fmt_rational(report.x_value),
        discriminant=fmt_rational(report.discriminant),
        taus=_complex_list(report.main.taus, p),
        shifted=report.shifted,
        coefficient_residual=fmt_real(report.coefficient_residual),
        residual_main=fmt_real(report.main.residual),
        lhs=ComplexValue.of(report.main.lhs, p),
        passed=report.passed(p),
        timings={k: f"{v:.3f}" for k, v in report.main.timings.items()} if timings else None,
    )


@app.command(name="verify-klein")
def verify_klein_cmd(
    ctx: typer.Context,
    tau: str | None = typer.Option(None, "--tau", help="Three comma-separated tau values, e.g. '0.8i,1.1i,1.3i'"),
    corollary: bool = typer.Option(False, "--corollary", help="Close the loop from a rational Ciani matrix"),
    matrix: str | None = typer.Option(None, "--matrix", help="Ciani matrix JSON or file (with --corollary)"),
    timings: bool = typer.Option(False, "--timings", help="Include wall-clock timings in the report"),
    prec: int | None = typer.Option(None, "--prec", help=_PREC_HELP),
) -> None:
    """(pi/2)^54 chi18(Omega') against X(m(Omega)), with the 18 theta identities."""
    if corollary and matrix is None:
        raise typer.BadParameter("--corollary needs --matrix", param_hint="--matrix")
    if not corollary and tau is None:
        raise typer.BadParameter("give --tau, or --corollary with --matrix", param_hint="--tau")
    config = _config(ctx, prec, theta=True)
    with _domain_errors():
        if corollary:
            report = _corollary_report(matrix, config, timings)
        else:
            report = _klein_report(tau, config, timings)
        _emit(report, config)
        if not report.passed:
            raise IdentityCheckError(f"identity residuals exceed 2^-{config.precision // 2}")


# ---------------------------------------------------------------------------
# Selftest
# ---------------------------------------------------------------------------

@app.command(name="selftest")
def selftest_cmd(
    ctx: typer.Context,
    suite: str = typer.Option("all", "--suite", help="One of: polycore, resultant, ciani, symplectic, theta, klein, all"),
    prec: int | None = typer.Option(None, "--prec", help=_PREC_HELP),
) -> None:
    """Run the invariant suites and print a summary."""
    if suite not in suite_names():
        raise typer.BadParameter(f"unknown suite {suite!r}; choose from {', '.join(suite_names())}", param_hint="--suite")
    config = _config(ctx, prec, theta=suite in ("theta", "klein", "all"))
    with _domain_errors():
        report = run_selftest(suite, config.precision, config.seed, config.workers)
    if config.output_format == "text":
        typer.echo(summary_table(report))
    else:
        _emit(report, config)
    if not report.ok:
        raise typer.Exit(code=EXIT_DOMAIN_ERROR)
