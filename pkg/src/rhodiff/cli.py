"""Command-line interface.

Subcommands: ``test`` (analyze a table file), ``power`` and ``samplesize``
(Monte Carlo planning), ``tie-sweep`` (random-scenario type-I-error sweep
to CSV), ``serve`` (HTTP JSON service plus the bundled calculator page).

Exit codes: 0 success, 2 bad input, 3 computation failure.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click

from .fit import FitError, FitOptions
from .inference import TEST_NAMES, run_all_tests
from .model import ModelDomainError
from .serialize import report_to_dict, summary_to_dict
from .simulate import SimConfig, estimate_power, min_sample_size, random_config_sweep, write_sweep_csv
from .tableio import read_table
from .tables import TableError

INPUT_ERROR = 2
COMPUTE_ERROR = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.4f}"


def _report_text(report) -> str:
    u, c = report.unconstrained.params, report.constrained.params
    lines = [
        f"test of delta = {report.delta0:g} (two-sided, alpha = {report.alpha:g})",
        "",
        f"  free fit:   delta = {u.delta:.4f}  pi1 = {u.pi1:.4f}  "
        f"pi2 = {u.pi2:.4f}  rho = {u.rho:.4f}",
        f"  fixed fit:  pi1 = {c.pi1:.4f}  rho = {c.rho:.4f}",
        "",
        f"  {'test':<8} {'statistic':>10} {'p-value':>10} {'reject':>8}",
    ]
    for name, res in report.results().items():
        if res is None:
            lines.append(f"  {name:<8} {'n/a':>10} {'n/a':>10} {'n/a':>8}")
        else:
            lines.append(f"  {name:<8} {res.statistic:>10.4f} {res.p_value:>10.4f} "
                         f"{str(res.reject).lower():>8}")
    for w in report.warnings:
        lines.append(f"  warning: {w}")
    return "\n".join(lines)


def _report_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["delta0", "alpha"]
    row = [f"{report.delta0:.4f}", f"{report.alpha:.4f}"]
    for name, res in report.results().items():
        header += [f"{name}_statistic", f"{name}_p_value", f"{name}_reject"]
        if res is None:
            row += ["", "", ""]
        else:
            row += [f"{res.statistic:.4f}", f"{res.p_value:.4f}", str(res.reject).lower()]
    u, c = report.unconstrained.params, report.constrained.params
    header += ["delta_hat", "pi1_hat", "rho_hat", "pi1_null", "rho_null"]
    row += [f"{u.delta:.4f}", f"{u.pi1:.4f}", f"{u.rho:.4f}",
            f"{c.pi1:.4f}", f"{c.rho:.4f}"]
    writer.writerow(header)
    writer.writerow(row)
    return buf.getvalue()


@click.group()
def main():
    """Risk-difference tests and power tools for paired-organ binary data."""


@main.command("test")
@click.argument("table_file", type=click.Path())
@click.option("--delta0", default=0.0, show_default=True,
              help="Hypothesized risk difference (group 2 minus group 1).")
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]),
              default="text", show_default=True)
@click.option("--tolerance", default=1e-6, show_default=True)
@click.option("--max-iterations", default=500, show_default=True)
def cmd_test(table_file, delta0, alpha, fmt, tolerance, max_iterations):
    """Run all three tests of a fixed risk difference on a table file."""
    try:
        table = read_table(table_file)
    except (TableError, OSError) as exc:
        _fail(INPUT_ERROR, str(exc))
    try:
        opts = FitOptions(tolerance=tolerance, max_iterations=max_iterations)
        report = run_all_tests(table, delta0=delta0, opts=opts, alpha=alpha)
    except (ModelDomainError, ValueError) as exc:
        _fail(INPUT_ERROR, str(exc))
    except FitError as exc:
        _fail(COMPUTE_ERROR, str(exc))
    if fmt == "json":
        click.echo(json.dumps(report_to_dict(report), indent=2))
    elif fmt == "csv":
        click.echo(_report_csv(report), nl=False)
    else:
        click.echo(_report_text(report))
    if not (report.unconstrained.converged and report.constrained.converged):
        _fail(COMPUTE_ERROR, "a fit did not converge; report is partial")


def _power_config(pi1, rho, delta1, m, n, alpha, replicates, seed) -> SimConfig:
    try:
        return SimConfig(pi1=pi1, rho=rho, delta_true=delta1, delta_null=0.0,
                         m1=m, m2=m, n1=n, n2=n,
                         replicates=replicates, alpha=alpha, seed=seed)
    except (ModelDomainError, ValueError) as exc:
        _fail(INPUT_ERROR, str(exc))


@main.command("power")
@click.option("--pi1", required=True, type=float,
              help="Group-1 response probability.")
@click.option("--rho", required=True, type=float,
              help="Within-subject correlation.")
@click.option("--delta1", required=True, type=float,
              help="True risk difference under the alternative.")
@click.option("--m", default=50, show_default=True,
              help="Bilateral subjects per group.")
@click.option("--n", default=50, show_default=True,
              help="Unilateral subjects per group.")
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--replicates", default=10000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]),
              default="text", show_default=True)
def cmd_power(pi1, rho, delta1, m, n, alpha, replicates, seed, fmt):
    """Monte Carlo power of the three tests against delta = 0."""
    config = _power_config(pi1, rho, delta1, m, n, alpha, replicates, seed)
    summary = estimate_power(config)
    if fmt == "json":
        click.echo(json.dumps(summary_to_dict(summary), indent=2))
        return
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["test", "power", "mc_se", "nonconverged"])
        for name in TEST_NAMES:
            tr = summary.tests[name]
            writer.writerow([name, f"{tr.rate:.4f}", f"{tr.mc_se:.4f}", tr.nonconverged])
        click.echo(buf.getvalue(), nl=False)
        return
    click.echo(f"power against delta = 0 with true delta = {delta1:g} "
               f"(pi1 = {pi1:g}, rho = {rho:g}, m = {m}, n = {n}, "
               f"alpha = {alpha:g}, {replicates} replicates)")
    for name in TEST_NAMES:
        tr = summary.tests[name]
        click.echo(f"  {name:<8} {tr.rate:>8.4f}  (mc se {tr.mc_se:.4f}, "
                   f"{tr.nonconverged} nonconverged)")


@main.command("samplesize")
@click.option("--pi1", required=True, type=float)
@click.option("--rho", required=True, type=float)
@click.option("--delta1", required=True, type=float)
@click.option("--power", "target_power", default=0.8, show_default=True)
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--test", "test_name", type=click.Choice(list(TEST_NAMES)),
              default="score", show_default=True)
@click.option("--replicates", default=20000, show_default=True,
              help="Search budget; the confirmation run uses four times this.")
@click.option("--seed", default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def cmd_samplesize(pi1, rho, delta1, target_power, alpha, test_name,
                   replicates, seed, fmt):
    """Smallest common group size m = n reaching the target power."""
    try:
        size = min_sample_size(rho=rho, pi1=pi1, delta1=delta1,
                               target_power=target_power, alpha=alpha,
                               test=test_name, replicates=replicates, seed=seed)
    except (ModelDomainError, ValueError) as exc:
        _fail(INPUT_ERROR, str(exc))
    except RuntimeError as exc:
        _fail(COMPUTE_ERROR, str(exc))
    if fmt == "json":
        click.echo(json.dumps({
            "schema_version": "1",
            "sample_size": size,
            "test": test_name,
            "target_power": target_power,
            "pi1": pi1, "rho": rho, "delta1": delta1, "alpha": alpha,
            "replicates": replicates, "seed": seed}, indent=2))
    else:
        click.echo(f"minimal m = n for {target_power:.0%} power of the "
                   f"{test_name} test: {size}")


@main.command("tie-sweep")
@click.option("--count", default=2000, show_default=True,
              help="Number of random admissible scenarios.")
@click.option("--replicates", default=10000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--out", required=True, type=click.Path(),
              help="Output CSV path (one row per scenario).")
def cmd_tie_sweep(count, replicates, seed, alpha, out):
    """Type-I error across randomly drawn scenarios, written as CSV."""
    if count < 0:
        _fail(INPUT_ERROR, f"count must be non-negative, got {count}")

    def progress(done, total):
        if done % 100 == 0 or done == total:
            click.echo(f"  {done}/{total} scenarios", err=True)

    results = random_config_sweep(count, seed=seed, replicates=replicates,
                                  alpha=alpha, progress=progress)
    write_sweep_csv(results, out)
    click.echo(f"wrote {count} scenarios to {out}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def cmd_serve(host, port):
    """Serve the JSON API and the browser calculator."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
