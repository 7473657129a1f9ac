"""Command-line interface: a thin client of the estimation service.

Commands talk to the FastAPI app through the service client (in-process by
default, remote with --server) and only handle argument parsing, output
writing, and exit codes. Exit code 0 means every requested spec succeeded.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .client import ServiceClient, ServiceError


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running paneliv service; default runs in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Panel IV estimation engine and replication harness."""
    ctx.obj = ServiceClient(server)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@main.group()
def instrument() -> None:
    """Predicted-mortality instrument commands."""


@instrument.command("build")
@click.option("--mortality", required=True, type=click.Path(), help="country,disease,year,mortality CSV.")
@click.option("--interventions", default=None, type=click.Path(),
              help="disease,intervention_year CSV; defaults to the bundled schedule.")
@click.option("--years", default=None, help="Comma-separated years to evaluate (default: data years).")
@click.option("--frontier", default=0.0, show_default=True, help="Post-intervention frontier mortality.")
@click.option("--summary", "show_summary", is_flag=True, help="Print per-year summary statistics instead.")
@click.option("--out", default=None, type=click.Path(), help="Write output to this path.")
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "csv"]), show_default=True)
@click.pass_obj
def instrument_build(client: ServiceClient, mortality: str, interventions: str | None,
                     years: str | None, frontier: float, show_summary: bool,
                     out: str | None, fmt: str) -> None:
    """Build the predicted-mortality series from disease-level data."""
    payload = {
        "mortality_csv": str(Path(mortality).resolve()),
        "interventions_csv": str(Path(interventions).resolve()) if interventions else None,
        "years": [int(y) for y in years.split(",")] if years else None,
        "frontier_mortality": frontier,
    }
    try:
        response = client.post("/instrument/build", payload)
    except ServiceError as exc:
        _fail(str(exc))
    if show_summary:
        lines = ["year,count,mean,sd,min,max,degenerate"] if fmt == "csv" else []
        for row in response["summary"]:
            if fmt == "csv":
                lines.append(f"{row['label']},{row['count']},{row['mean']!r},{row['sd']!r},"
                             f"{row['minimum']!r},{row['maximum']!r},{row['degenerate']}")
            else:
                flag = " (degenerate)" if row["degenerate"] else ""
                lines.append(f"{row['label']:>6}  n={row['count']:<5} mean={row['mean']:.3f} "
                             f"sd={row['sd']:.3f} min={row['minimum']:.3f} max={row['maximum']:.3f}{flag}")
        _emit("\n".join(lines) + "\n", out)
        return
    lines = ["country,year,predicted_mortality"]
    for point in response["series"]:
        lines.append(f"{point['country']},{point['year']},{point['predicted_mortality']!r}")
    _emit("\n".join(lines) + "\n", out)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Run configuration file.")
@click.option("--out", default=None, type=click.Path())
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "csv"]), show_default=True)
@click.pass_obj
def run(client: ServiceClient, config_path: str, out: str | None, fmt: str) -> None:
    """Execute every regression spec in a config file."""
    try:
        response = client.post("/run", {"config_path": str(Path(config_path).resolve()),
                                        "format": fmt})
    except ServiceError as exc:
        _fail(str(exc))
    _emit(response["rendered"], out)
    failures = [o for o in response["outcomes"] if not o["ok"]]
    for outcome in failures:
        click.echo(f"spec {outcome['name']} failed: {outcome['error']}", err=True)
    if failures:
        sys.exit(1)


@main.command()
@click.option("--table", "table_id", required=True, metavar="ID", help="Preset id, e.g. T4.")
@click.option("--data", "data_dir", required=True, type=click.Path(), help="Directory of input CSVs.")
@click.option("--out", default=None, type=click.Path())
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "csv"]), show_default=True)
@click.pass_obj
def replicate(client: ServiceClient, table_id: str, data_dir: str, out: str | None, fmt: str) -> None:
    """Render one preset table layout from a data directory."""
    try:
        response = client.post("/replicate", {"table_id": table_id,
                                              "data_dir": str(Path(data_dir).resolve()),
                                              "format": fmt})
    except ServiceError as exc:
        _fail(str(exc))
    _emit(response["rendered"], out)


@main.command()
@click.option("--config", "config_path", default=None, type=click.Path(),
              help="Config file with a [dgp] section; optional.")
@click.option("--seed", default=None, type=int,
              help="Master seed [default: 0, or the config's [dgp] seed].")
@click.option("--reps", default=None, type=int,
              help="Replications [default: 500, or the config's [dgp] reps].")
@click.option("--out", default=None, type=click.Path())
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "csv"]), show_default=True)
@click.pass_obj
def simulate(client: ServiceClient, config_path: str | None, seed: int | None,
             reps: int | None, out: str | None, fmt: str) -> None:
    """Run the exclusion-violation Monte Carlo demonstration."""
    payload = {
        "config_path": str(Path(config_path).resolve()) if config_path else None,
        "seed": seed,
        "reps": reps,
    }
    try:
        response = client.post("/simulate", payload)
    except ServiceError as exc:
        _fail(str(exc))
    _emit(response["report"], out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the estimation service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
