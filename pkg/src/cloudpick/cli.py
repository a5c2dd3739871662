"""Command-line surface: validate catalogs, run evaluations, benchmark, serve.

Exit codes are a fixed enumeration so scripts can dispatch on outcomes:

    0  success
    1  catalog invariant violations (``validate``)
    2  usage error (bad flags/arguments)
    3  validation error (malformed catalog/session/config during a run)
    4  no feasible (image, service) combination
    5  I/O error (unreadable/unwritable paths)
"""

from __future__ import annotations

import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import click
import yaml

from . import bench as bench_mod
from .catalog import catalog_violations, load_catalog
from .errors import (
    CatalogError,
    HierarchyError,
    RequirementError,
    ValidationError,
)
from .session import (
    MODE_INTEGRATED,
    MODE_TWO_PHASE,
    RelaxationPolicy,
    SyntheticRef,
    dump_result,
    load_session,
    resolve_catalog,
    result_document,
    run_pipeline,
)

EXIT_OK = 0
EXIT_CATALOG_INVALID = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NO_FEASIBLE = 4
EXIT_IO = 5


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main() -> None:
    """Rank compatible cloud VM image / infrastructure service combinations."""


@main.command()
@click.argument("catalog_path", type=click.Path(path_type=Path))
def validate(catalog_path: Path) -> None:
    """Check every catalog invariant and list all violations."""
    try:
        text = catalog_path.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    violations = catalog_violations(text)
    if not violations:
        click.echo("OK")
        sys.exit(EXIT_OK)
    for violation in violations:
        click.echo(str(violation))
    sys.exit(EXIT_CATALOG_INVALID)


@main.command()
@click.option("--session", "session_path", required=True, type=click.Path(path_type=Path))
@click.option("--catalog", "catalog_path", type=click.Path(path_type=Path), default=None,
              help="Override the catalog referenced by the session.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write the result document here instead of stdout.")
@click.option("--mode", type=click.Choice([MODE_TWO_PHASE, MODE_INTEGRATED]), default=None)
@click.option("--relaxation", default=None,
              help="Relaxation policy: 'auto' or a fixed non-negative level.")
@click.option("--seed", type=int, default=None,
              help="Override the seed of a synthetic catalog reference.")
@click.option("--parallel", is_flag=True, default=False,
              help="Evaluate alternatives concurrently (same results, merged deterministically).")
def evaluate(session_path, catalog_path, out_path, mode, relaxation, seed, parallel) -> None:
    """Run the full pipeline for a session document and emit ranked results."""
    try:
        session = load_session(session_path)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    except ValidationError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    if mode is not None:
        session = replace(session, mode=mode)
    if relaxation is not None:
        if relaxation == "auto":
            session = replace(session, relaxation=RelaxationPolicy(auto=True))
        else:
            try:
                level = int(relaxation)
            except ValueError:
                _fail(EXIT_USAGE, f"--relaxation must be 'auto' or an integer, got {relaxation!r}")
            if level < 0:
                _fail(EXIT_USAGE, "--relaxation level must be >= 0")
            session = replace(session, relaxation=RelaxationPolicy(auto=False, level=level))
    if seed is not None and session.catalog_synthetic is not None:
        session = replace(
            session,
            catalog_synthetic=SyntheticRef(
                session.catalog_synthetic.m,
                session.catalog_synthetic.n,
                seed,
                session.catalog_synthetic.dependencies,
            ),
        )

    try:
        if catalog_path is not None:
            catalog = load_catalog(catalog_path)
        else:
            catalog = resolve_catalog(session, base_dir=session_path.parent)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    except CatalogError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except ValidationError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    try:
        result = run_pipeline(catalog, session, parallel=parallel)
    except (ValidationError, RequirementError, HierarchyError) as exc:
        _fail(EXIT_VALIDATION, str(exc))

    doc = {"generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    doc.update(result_document(result))
    text = dump_result(doc)
    if out_path is not None:
        try:
            out_path.write_text(text, encoding="utf-8")
        except OSError as exc:
            _fail(EXIT_IO, str(exc))
    else:
        click.echo(text, nl=False)

    if result.no_feasible_combination:
        click.echo("no feasible combination: revise requirements or dependencies", err=True)
        sys.exit(EXIT_NO_FEASIBLE)
    sys.exit(EXIT_OK)


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Bench config YAML; defaults to the full 100..1000 sweep.")
@click.option("--out-dir", "out_dir", required=True, type=click.Path(path_type=Path))
def bench(config_path, out_dir) -> None:
    """Time the pipeline over synthetic catalogs and fit the scaling curve."""
    try:
        if config_path is not None:
            doc = yaml.safe_load(config_path.read_text(encoding="utf-8"))
        else:
            doc = None
        config = bench_mod.parse_bench_config(doc)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    except yaml.YAMLError as exc:
        _fail(EXIT_VALIDATION, f"invalid YAML: {exc}")
    except ValidationError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    report = bench_mod.run_bench(config)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        bench_mod.write_csv(report, out_dir / "bench_report.csv")
        summary = yaml.safe_dump(
            bench_mod.summary_document(report), sort_keys=False, default_flow_style=False
        )
        (out_dir / "bench_summary.yaml").write_text(summary, encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    click.echo(f"wrote {out_dir / 'bench_report.csv'} and {out_dir / 'bench_summary.yaml'}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--catalog", "catalog_specs", multiple=True, required=True,
              help="Catalog to serve, as PATH or ID=PATH (default id: file stem).")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(catalog_specs, host, port) -> None:
    """Start the HTTP service backing the interactive selection loop."""
    from .server import create_app

    catalogs = {}
    for spec in catalog_specs:
        if "=" in spec:
            catalog_id, _, raw_path = spec.partition("=")
        else:
            catalog_id, raw_path = Path(spec).stem, spec
        path = Path(raw_path)
        try:
            catalogs[catalog_id] = load_catalog(path)
        except OSError as exc:
            _fail(EXIT_IO, str(exc))
        except CatalogError as exc:
            _fail(EXIT_VALIDATION, str(exc))

    import uvicorn

    uvicorn.run(create_app(catalogs), host=host, port=port)


if __name__ == "__main__":
    main()
