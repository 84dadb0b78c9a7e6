"""Command-line workflow: analyze, diagnose, export, serve, examples."""

from __future__ import annotations

import json
from pathlib import Path

import click

from .bundle import (
    attributes_csv_text,
    compute_cache_key,
    matrix_digest,
    occupancy_csv_text,
    parameters_json_bytes,
    payload_json_bytes,
    run_analysis,
    with_epsilon,
)
from .datasets import example_names, example_specs, load_example
from .errors import AnalysisError
from .performance import TransformConfig, parse_csv


def transform_options(f):
    options = [
        click.option("--scale/--no-scale", default=True, show_default=True,
                     help="Rescale values to proportions in [0, 1]."),
        click.option("--invert", is_flag=True, default=False,
                     help="Replace each column x by max(x) - x first (for lower-is-better metrics)."),
        click.option("--scale-by", type=click.Choice(["column", "global"]),
                     default="column", show_default=True,
                     help="Scale per algorithm column or over the whole dataset."),
        click.option("--min-item", type=float, default=0.0, show_default=True,
                     help="Lower bound of already-scaled values (used with --no-scale)."),
        click.option("--max-item", type=float, default=1.0, show_default=True,
                     help="Upper bound of already-scaled values (used with --no-scale)."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def run_options(f):
    options = [
        click.option("--epsilon", type=float, default=0.0, show_default=True,
                     help="Goodness threshold for the strengths/weaknesses partition."),
        click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
                     default=Path("irtfolio-out"), show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--format", "fmt", type=click.Choice(["svg", "png"]),
                     default="svg", show_default=True),
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
                     help="key=value file; command-line flags take precedence."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


_CONFIG_PARSERS = {
    "scale": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "invert": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "scale_by": str,
    "min_item": float,
    "max_item": float,
    "epsilon": float,
    "seed": int,
    "format": str,
    "out": Path,
}


def _apply_config_file(ctx: click.Context, values: dict) -> dict:
    """Fill parameters from a key=value file where flags were left at defaults."""
    path = values.pop("config_file", None)
    if not path:
        return values
    overrides = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.ClickException(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_PARSERS:
            raise click.ClickException(f"{path}:{lineno}: unknown option {key!r}")
        overrides[key] = _CONFIG_PARSERS[key](raw.strip())

    alias = {"format": "fmt", "out": "out_dir"}
    for key, value in overrides.items():
        param = alias.get(key, key)
        if param not in values:
            continue
        if ctx.get_parameter_source(param) == click.core.ParameterSource.DEFAULT:
            values[param] = value
    return values


def _load_dataset(dataset: str):
    path = Path(dataset)
    if path.exists():
        matrix = parse_csv(path.read_bytes())
        return matrix, path.stem
    if dataset in example_names():
        return load_example(dataset), dataset
    raise click.ClickException(
        f"{dataset!r} is neither a file nor a bundled example; "
        f"examples: {', '.join(example_names())}"
    )


def _compute_payload(dataset, scale, invert, scale_by, min_item, max_item,
                     epsilon, out_dir, seed) -> dict:
    """Run (or load from the on-disk cache) the analysis for a dataset."""
    if not 0.0 <= epsilon <= 1.0:
        raise click.ClickException(f"epsilon must lie in [0, 1], got {epsilon}")
    matrix, name = _load_dataset(dataset)
    config = TransformConfig(
        scale=scale, invert=invert, scale_by=scale_by,
        min_item=min_item, max_item=max_item,
    )
    key = compute_cache_key(matrix_digest(matrix), config, seed=seed)
    cache_file = out_dir / "cache" / f"{key}.json"
    if cache_file.exists():
        click.echo(f"cache hit: {key[:12]}", err=True)
        payload = json.loads(cache_file.read_text())
    else:
        bundle = run_analysis(
            matrix, config, epsilon, source_name=name, seed=seed
        )
        payload = bundle.to_payload()
        if not bundle.params.converged:
            click.echo(
                "warning: model fit did not converge; results use the best "
                "parameters found",
                err=True,
            )
        cache_file.parent.mkdir(parents=True, exist_ok=True)
        cache_file.write_bytes(payload_json_bytes(payload))
    return with_epsilon(payload, epsilon)


@click.group()
@click.version_option(package_name="irtfolio")
def main():
    """Item-response analysis of algorithm portfolio benchmarks."""


@main.command()
@click.argument("dataset")
@transform_options
@run_options
@click.pass_context
def analyze(ctx, dataset, **kwargs):
    """Fit the model and write tables, JSON and plot types 1-4.

    DATASET is a CSV file path or the name of a bundled example.
    """
    kwargs = _apply_config_file(ctx, kwargs)
    fmt = kwargs.pop("fmt")
    out_dir = kwargs["out_dir"]
    try:
        payload = _compute_payload(dataset, **kwargs)
    except AnalysisError as exc:
        raise click.ClickException(str(exc)) from None
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "analysis.json").write_bytes(payload_json_bytes(payload))
    (out_dir / "parameters.json").write_bytes(parameters_json_bytes(payload))
    (out_dir / "attributes.csv").write_text(attributes_csv_text(payload))
    (out_dir / "occupancy.csv").write_text(occupancy_csv_text(payload))
    from .plots import render_plot

    for kind in ("1", "2", "3", "4"):
        (out_dir / f"plot{kind}.{fmt}").write_bytes(render_plot(payload, kind, fmt))
    click.echo(f"analysis written to {out_dir}")


@main.command()
@click.argument("dataset")
@transform_options
@run_options
@click.pass_context
def diagnose(ctx, dataset, **kwargs):
    """Write model-goodness, effectiveness and heatmap plots."""
    kwargs = _apply_config_file(ctx, kwargs)
    fmt = kwargs.pop("fmt")
    out_dir = kwargs["out_dir"]
    try:
        payload = _compute_payload(dataset, **kwargs)
    except AnalysisError as exc:
        raise click.ClickException(str(exc)) from None
    out_dir.mkdir(parents=True, exist_ok=True)
    from .plots import plot_kinds, render_plot

    for kind in plot_kinds(payload):
        if kind in ("1", "2", "3", "4"):
            continue
        (out_dir / f"{kind}.{fmt}").write_bytes(render_plot(payload, kind, fmt))
    click.echo(f"diagnostics written to {out_dir}")


@main.command()
@click.option("--analysis-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("irtfolio-out"), show_default=True,
              help="Directory holding analysis.json from a previous run.")
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Archive path [default: <analysis-dir>/bundle.tar].")
def export(analysis_dir, output):
    """Pack all plots (as PNG) and tables into a tar archive."""
    analysis_file = analysis_dir / "analysis.json"
    if not analysis_file.exists():
        raise click.ClickException(
            f"no analysis found in {analysis_dir}; run `irtfolio analyze` first"
        )
    payload = json.loads(analysis_file.read_text())
    from .export import build_bundle_tar

    output = output or analysis_dir / "bundle.tar"
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_bytes(build_bundle_tar(payload))
    click.echo(f"bundle written to {output}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--data-dir", type=click.Path(file_okay=False, path_type=Path),
              default=None, help="Persistence directory [default: temporary].")
def serve(host, port, data_dir):
    """Start the HTTP API with the bundled examples preloaded."""
    import uvicorn

    from .server import create_app

    app = create_app(data_dir=data_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except OSError as exc:
        raise click.ClickException(f"cannot bind {host}:{port}: {exc}") from None


@main.group()
def examples():
    """Bundled example datasets."""


@examples.command("list")
def examples_list():
    """List the bundled example datasets."""
    for spec in example_specs():
        click.echo(
            f"{spec.name}  {spec.n_instances}x{len(spec.algorithm_names)}  "
            f"seed={spec.seed}  {spec.description}"
        )


if __name__ == "__main__":
    main()
