"""Command-line front end: synthesize | verify | oracle.

A thin client of the certification service (in process by default,
--server URL to target a running instance).  Exit codes: 0 pass,
2 certification failure, 3 infeasible synthesis, 4 I/O error, 5 usage.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx
from pydantic import ValidationError

from .report import report_to_json
from .service.client import make_client
from .service.schemas import (
    OracleRequest,
    ReportModel,
    SynthesizeRequest,
    VerifyRequest,
)
from .synthesis import InfeasibleSynthesisError

EXIT_PASS = 0
EXIT_CERT_FAIL = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4
EXIT_USAGE = 5

FD_STEP_RANGE = (1e-5, 1e-2)


def _check_positive_c(ctx, param, value):
    if value is not None and value <= 0:
        raise click.BadParameter("C must be positive")
    return value


def _check_fd_step(ctx, param, value):
    if value is not None and not (FD_STEP_RANGE[0] <= value <= FD_STEP_RANGE[1]):
        raise click.BadParameter(
            f"fd-step must lie in [{FD_STEP_RANGE[0]}, {FD_STEP_RANGE[1]}]")
    return value


def _check_grid_n(ctx, param, value):
    if value is not None and value < 1024:
        raise click.BadParameter("grid-n must be >= 1024")
    return value


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as err:
        click.echo(f"I/O error writing {path}: {err}", err=True)
        sys.exit(EXIT_IO)


@click.group()
def cli():
    """Certified counterexample metrics: positive total Ricci curvature over a
    base with Ricci below -C, cross-checked by a finite-difference oracle."""


@cli.command()
@click.option("--C", "C", type=float, required=True, callback=_check_positive_c,
              help="target base-Ricci deficit (strictly positive)")
@click.option("--k", type=int, default=2, show_default=True, help="fiber dimension")
@click.option("--grid-n", type=int, default=8192, show_default=True,
              callback=_check_grid_n, help="certification grid size")
@click.option("--fd-step", type=float, default=1e-3, show_default=True,
              callback=_check_fd_step, help="accepted for config symmetry; unused here")
@click.option("--out", type=click.Path(path_type=Path), default=Path("."),
              show_default=True, help="output directory")
@click.option("--csv", "emit_csv", is_flag=True, help="also write curvature CSV")
@click.option("--server", default=None, help="service URL (default: in process)")
def synthesize(C, k, grid_n, fd_step, out, emit_csv, server):
    """Synthesize profiles for the target C and certify the curvature claims."""
    client = make_client(server)
    try:
        resp = client.synthesize(SynthesizeRequest(C=C, k=k, grid_n=grid_n,
                                                   emit_csv=emit_csv))
    except InfeasibleSynthesisError as err:
        click.echo(f"infeasible: {err}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except httpx.HTTPError as err:
        click.echo(f"service error: {err}", err=True)
        sys.exit(EXIT_IO)
    if resp.status == "infeasible":
        click.echo(f"infeasible: {resp.message}", err=True)
        sys.exit(EXIT_INFEASIBLE)

    report = resp.report.model_dump()
    report_path = Path(out) / "report.json"
    _write_text(report_path, report_to_json(report))
    if emit_csv and resp.csv_text is not None:
        _write_text(Path(out) / "curvature.csv", resp.csv_text)

    cert = report["certificate"]
    click.echo(f"verdict: {cert['verdict']}")
    click.echo(f"C = {report['params']['C']}, k = {report['params']['k']}, "
               f"lambda = {report['params']['lam']}")
    click.echo(f"base Ricci minimum {cert['base_min']} at r = {cert['witness_r']}")
    click.echo(f"min horizontal eigenvalue: window {cert['min_horiz_eigen_inside']}, "
               f"outside {cert['min_horiz_eigen_outside']}")
    click.echo(f"min vertical lower bound:  {cert['min_vert_lower']}")
    click.echo(f"negative-Ricci measure:    {cert['negative_measure']}")
    n_pass = sum(1 for it in cert["lemma_items"] if it["passed"])
    click.echo(f"construction items passed: {n_pass}/{len(cert['lemma_items'])}")
    click.echo(f"report: {report_path}")
    if resp.status != "pass":
        for failure in resp.failed_checks:
            click.echo(f"FAILED: {failure}", err=True)
        sys.exit(EXIT_CERT_FAIL)


@cli.command()
@click.argument("report_path", type=click.Path(path_type=Path))
@click.option("--grid-n", type=int, default=None, callback=_check_grid_n,
              help="re-certification grid size (default: the stored one)")
@click.option("--server", default=None, help="service URL (default: in process)")
def verify(report_path, grid_n, server):
    """Reconstruct the profiles from a stored report and re-run certification."""
    try:
        raw = json.loads(Path(report_path).read_text(encoding="utf-8"))
    except OSError as err:
        click.echo(f"I/O error reading {report_path}: {err}", err=True)
        sys.exit(EXIT_IO)
    except json.JSONDecodeError as err:
        click.echo(f"unparseable report {report_path}: {err}", err=True)
        sys.exit(EXIT_IO)
    try:
        report = ReportModel.model_validate(raw)
    except ValidationError as err:
        click.echo(f"malformed report {report_path}: {err}", err=True)
        sys.exit(EXIT_IO)

    client = make_client(server)
    try:
        resp = client.verify(VerifyRequest(report=report, grid_n=grid_n))
    except httpx.HTTPError as err:
        click.echo(f"service error: {err}", err=True)
        sys.exit(EXIT_IO)
    click.echo(f"verification: {resp.status}")
    for name, value in resp.minima.items():
        click.echo(f"{name}: {value}")
    if not resp.ok:
        click.echo(resp.message, err=True)
        sys.exit(EXIT_CERT_FAIL)


@cli.command()
@click.option("--C", "C", type=float, required=True, callback=_check_positive_c,
              help="target base-Ricci deficit (strictly positive)")
@click.option("--k", type=int, default=2, show_default=True, help="fiber dimension")
@click.option("--grid-n", type=int, default=8192, show_default=True,
              callback=_check_grid_n, help="accepted for config symmetry; unused here")
@click.option("--fd-step", type=float, default=1e-3, show_default=True,
              callback=_check_fd_step, help="finite-difference step")
@click.option("--out", type=click.Path(path_type=Path), default=Path("."),
              show_default=True, help="output directory")
@click.option("--n-points", type=int, default=25, show_default=True,
              help="number of interior chart points")
@click.option("--server", default=None, help="service URL (default: in process)")
def oracle(C, k, grid_n, fd_step, out, n_points, server):
    """Compare closed-form curvature against the finite-difference oracle."""
    client = make_client(server)
    try:
        resp = client.oracle(OracleRequest(C=C, k=k, fd_step=fd_step,
                                           n_points=n_points))
    except InfeasibleSynthesisError as err:
        click.echo(f"infeasible: {err}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except httpx.HTTPError as err:
        click.echo(f"service error: {err}", err=True)
        sys.exit(EXIT_IO)
    if resp.status == "infeasible":
        click.echo(f"infeasible: {resp.message}", err=True)
        sys.exit(EXIT_INFEASIBLE)

    out_path = Path(out) / "oracle_report.json"
    payload = resp.model_dump()
    _write_text(out_path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    click.echo(f"oracle comparison at h = {payload['fd_step']} "
               f"({payload['n_points']} chart points)")
    for name, block in payload["blocks"].items():
        click.echo(f"{name}: dev(h) = {block['dev_h']}, dev(h/2) = {block['dev_half']}, "
                   f"order = {block['order']}")
    click.echo(f"mixed entries: {payload['mixed_max_h']} "
               f"(bound {payload['mixed_bound_h']})")
    click.echo(f"report: {out_path}")
    if resp.status != "pass":
        for failure in resp.failures:
            click.echo(f"FAILED: {failure}", err=True)
        sys.exit(EXIT_CERT_FAIL)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as err:
        sys.exit(err.exit_code)
    except click.ClickException as err:
        err.show()
        sys.exit(EXIT_USAGE)
    except click.exceptions.Abort:
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
