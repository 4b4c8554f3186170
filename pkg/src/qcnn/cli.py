"""Command-line interface: simulate, train, eval, compare, report, plot.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 training divergence.
"""

from __future__ import annotations

import functools
import hashlib
import json
import logging
import sys
from pathlib import Path

import click

from .analytic import StatQCFunction, decision_limit
from .cnn import (
    ModelFormatError,
    NetworkClassifier,
    TrainingDivergedError,
    build_template_network,
    load_model,
    save_model,
    train,
)
from .config import ConfigError, RunConfig, parse_int_list
from .datasets import (
    MAX_N,
    MIX_RATIOS,
    DatasetError,
    TestSetSpec,
    TrainingSetSpec,
    build_training_set,
    iter_test_chunks,
    write_binary,
    write_csv,
)
from .evaluation import (
    compare,
    count_rejections,
    critical_error_report,
    monotonicity_scan,
    read_rows_csv,
    sign_summary,
    write_critical_csv,
    write_rows_csv,
)
from .numerics import RngState, RngStream, seed_from_env
from .plotting import emit_plots

log = logging.getLogger("qcnn")

EXIT_CONFIG, EXIT_DATA, EXIT_DIVERGED = 2, 3, 4

# purpose-specific substreams of the master seed
DATA_STREAM, TRAIN_STREAM, EVAL_STREAM, CONTROL_STREAM, CRITICAL_STREAM = range(5)

BASELINE_P_FR = 0.01


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(fn):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            _fail(EXIT_CONFIG, str(exc))
        except TrainingDivergedError as exc:
            _fail(EXIT_DIVERGED, f"training diverged: {exc}")
        except (DatasetError, ModelFormatError, FileNotFoundError, OverflowError) as exc:
            _fail(EXIT_DATA, str(exc))
        except ValueError as exc:
            _fail(EXIT_DATA, str(exc))

    return wrapper


def _common(fn):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON run configuration."),
        click.option("--seed", type=int, help="Master seed (default: $QCNN_SEED or the config value)."),
        click.option("--n", "n_text", help="Measurement count(s): 'all' or e.g. '2,3'."),
        click.option("--a", "a_text", help="Mix ratio(s): 'all' or e.g. '1,6'."),
        click.option("--unit", type=int, help="Training-set unit size."),
        click.option("--grid", help="Scenario grid, e.g. 'sigma=1.1:7.0:0.1;mu=0.1:6.0:0.1'."),
        click.option("--workers", type=int, help="Parallel workers; 1 is the deterministic reference mode."),
        click.option("--paper-scale", is_flag=True, help="Full-size training and in-control test sets."),
        click.option("--in-control", "in_control", type=int, help="In-control test-set size."),
        click.option("--replicates", type=int, help="Test tuples per contamination pattern."),
        click.option("--epochs", type=int, help="Training epochs."),
        click.option("--out", type=click.Path(file_okay=False), help="Output directory."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def resolve_config(config_path=None, seed=None, n_text=None, a_text=None, unit=None, grid=None,
                   workers=None, paper_scale=False, in_control=None, replicates=None,
                   epochs=None, out=None, formats=None) -> RunConfig:
    """Config file, then --paper-scale, then $QCNN_SEED, then explicit flags."""
    cfg = RunConfig.load(config_path) if config_path else RunConfig()
    if paper_scale:
        cfg = cfg.paper_scale()
    try:
        env_seed = seed_from_env(cfg.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.override(
        seed=seed if seed is not None else env_seed,
        n_list=parse_int_list(n_text, range(1, MAX_N + 1), "--n") or None,
        a_list=parse_int_list(a_text, MIX_RATIOS, "--a") or None,
        unit=unit, grid=grid, workers=workers, in_control_count=in_control,
        replicates=replicates, out=out, formats=formats, trainer_epochs=epochs,
    )


def _root(cfg: RunConfig) -> RngStream:
    return RngStream(RngState(cfg.seed))


def _stream(cfg: RunConfig, purpose: int, *keys: int) -> RngStream:
    s = _root(cfg).substream(purpose)
    for key in keys:
        s = s.substream(key)
    return s


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def model_path(cfg: RunConfig, a: int, n: int) -> Path:
    return cfg.out_dir / "models" / f"model_a{a}_n{n}.qcnn"


def training_data(cfg: RunConfig, a: int, n: int):
    spec = TrainingSetSpec(a, n, unit=cfg.unit)
    return spec, build_training_set(spec, _stream(cfg, DATA_STREAM, a, n))


def _pairs(cfg: RunConfig):
    return [(a, n) for n in cfg.n_list for a in cfg.a_list]


def _load_classifier(cfg: RunConfig, a: int, n: int):
    path = model_path(cfg, a, n)
    if not path.exists():
        raise FileNotFoundError(f"missing model {path}; run 'qcnn train' first")
    spec, params = load_model(path)
    if spec.n != n:
        raise ModelFormatError("shape_mismatch", f"{path} holds an n={spec.n} network")
    return NetworkClassifier(spec, params)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Simulate QC data, train small CNN classifiers and compare them with limit rules."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@_common
@click.option("--format", "fmt", type=click.Choice(["csv", "binary", "both"]), help="Dataset file format.")
@_guard
def simulate(fmt, **opts):
    """Write training sets T_a(n) and in-control test sets D(n,0,1) plus a manifest."""
    formats = {"csv": ("csv",), "binary": ("binary",), "both": ("csv", "binary")}.get(fmt)
    cfg = resolve_config(formats=formats, **opts)
    out = cfg.out_dir / "datasets"
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"config": cfg.to_dict(), "training": [], "in_control": []}

    def emit(stem, batches, n):
        files = {}
        if "csv" in cfg.formats:
            path = out / f"{stem}.csv"
            write_csv(batches, path)
            files["csv"] = {"path": path.name, "sha256": _sha256(path)}
        if "binary" in cfg.formats:
            path = out / f"{stem}.qcds"
            write_binary(batches, path, n)
            files["binary"] = {"path": path.name, "sha256": _sha256(path)}
        return files

    for a, n in _pairs(cfg):
        spec, data = training_data(cfg, a, n)
        files = emit(f"train_a{a}_n{n}", data, n)
        manifest["training"].append({"a": a, "n": n, "unit": cfg.unit,
                                     "composition": spec.composition(), "files": files})
        click.echo(f"T_{a}({n}): {spec.total} records")
    for n in cfg.n_list:
        spec = TestSetSpec(n, 0, in_control_count=cfg.in_control_count)
        batches = list(iter_test_chunks(spec, _stream(cfg, CONTROL_STREAM, n)))
        files = emit(f"in_control_n{n}", batches, n)
        manifest["in_control"].append({"n": n, "count": spec.total, "files": files})
        click.echo(f"D({n},0,1): {spec.total} records")
    _write_json(out / "manifest.json", manifest)


def measure_p_fr(cfg: RunConfig, classifier, n: int) -> tuple[int, int]:
    spec = TestSetSpec(n, 0, in_control_count=cfg.in_control_count)
    return count_rejections(classifier, spec, _stream(cfg, CONTROL_STREAM, n))


@main.command("train")
@_common
@_guard
def train_cmd(**opts):
    """Train one network per requested (a, n) and save it with provenance."""
    cfg = resolve_config(**opts)
    (cfg.out_dir / "models").mkdir(parents=True, exist_ok=True)
    for a, n in _pairs(cfg):
        _, data = training_data(cfg, a, n)
        net = build_template_network(n)
        trainer = cfg.override(trainer_seed=_stream(cfg, TRAIN_STREAM, a, n).state.stream_id).trainer
        params, report = train(net, data, trainer)
        clf = NetworkClassifier(net, params)
        rejected, total = measure_p_fr(cfg, clf, n)
        provenance = {
            "a": a, "n": n, "seed": cfg.seed, "unit": cfg.unit,
            "trainer": trainer.to_dict(), "report": report.to_dict(),
            "p_fr": rejected / total, "p_fr_sample_size": total,
        }
        path = save_model(net, params, model_path(cfg, a, n), provenance)
        click.echo(f"a={a} n={n}: P_FR={rejected / total:.6f} "
                   f"best epoch {report.best_epoch} -> {path}")


@main.command("eval")
@_common
@_guard
def eval_cmd(**opts):
    """Measure each model's false-rejection rate and its matched decision limit."""
    cfg = resolve_config(**opts)
    results = []
    for a, n in _pairs(cfg):
        clf = _load_classifier(cfg, a, n)
        rejected, total = measure_p_fr(cfg, clf, n)
        p_fr = rejected / total
        limit = decision_limit(p_fr, n) if 0 < p_fr < 1 else None
        results.append({"a": a, "n": n, "p_fr": p_fr, "N": total, "l": limit})
        shown = "undefined" if limit is None else f"{limit:.6f}"
        click.echo(f"a={a} n={n}: P_FR={p_fr:.6f} l={shown}")
    (cfg.out_dir).mkdir(parents=True, exist_ok=True)
    _write_json(cfg.out_dir / "eval.json", results)


@main.command("compare")
@_common
@click.option("--baseline-only", is_flag=True,
              help=f"Compare the limit rule with itself (l from P_FR={BASELINE_P_FR}).")
@click.option("--critical", is_flag=True, help="Also write the critical-error table.")
@_guard
def compare_cmd(baseline_only, critical, **opts):
    """Rejection probabilities over the grid, differences and p-values."""
    cfg = resolve_config(**opts)
    grid = cfg.grid_spec
    classifiers = {}
    for a, n in _pairs(cfg):
        if baseline_only:
            classifiers[(a, n)] = (StatQCFunction(decision_limit(BASELINE_P_FR, n)), BASELINE_P_FR)
        else:
            classifiers[(a, n)] = (_load_classifier(cfg, a, n), None)
    tables = cfg.out_dir / "tables"
    tables.mkdir(parents=True, exist_ok=True)
    summary = {}
    for (a, n), (clf, p_fr) in classifiers.items():
        result = compare(a, n, clf, grid, _stream(cfg, EVAL_STREAM, a, n),
                         replicates=cfg.replicates, in_control_count=cfg.in_control_count,
                         p_fr=p_fr, workers=cfg.workers)
        path = write_rows_csv(result.rows, tables / f"compare_a{a}_n{n}.csv")
        summary[f"a={a},n={n}"] = {"p_fr": result.p_fr, "l": result.limit,
                                   "rows": len(result), "signs": sign_summary(result.rows)}
        click.echo(f"a={a} n={n}: {len(result)} rows, P_FR={result.p_fr:.6f}, "
                   f"l={result.limit:.6f} -> {path}")
    _write_json(tables / "summary.json", summary)
    if critical:
        models = {(n, a): clf for (a, n), (clf, _) in classifiers.items() if n >= 2}
        known = {(n, a): p for (a, n), (_, p) in classifiers.items() if p is not None}
        if not models:
            raise ConfigError("--critical needs at least one n >= 2")
        rows = critical_error_report(models, cfg.critical, _root(cfg).substream(CRITICAL_STREAM),
                                     replicates=cfg.replicates,
                                     in_control_count=cfg.in_control_count, p_fr=known)
        path = write_critical_csv(rows, tables / "critical.csv")
        click.echo(f"critical-error table: {len(rows)} rows -> {path}")


def _table_files(cfg: RunConfig, tables) -> list[Path]:
    paths = [Path(t) for t in tables] or sorted((cfg.out_dir / "tables").glob("compare_a*_n*.csv"))
    if not paths:
        raise FileNotFoundError(f"no comparison tables under {cfg.out_dir / 'tables'}")
    return paths


@main.command()
@_common
@click.argument("tables", nargs=-1, type=click.Path(dir_okay=False))
@_guard
def report(tables, **opts):
    """Summarize comparison tables: sign counts, significance and monotonicity."""
    cfg = resolve_config(**opts)
    rows = [r for path in _table_files(cfg, tables) for r in read_rows_csv(path)]
    findings = monotonicity_scan(rows)
    significant = sum(1 for r in rows if r.p_value < 0.01)
    doc = {
        "rows": len(rows),
        "significant_at_0.01": significant,
        "signs": sign_summary(rows),
        "monotonicity_findings": [
            {"item": f.item, "description": f.description, "low": f.low, "high": f.high,
             "difference": f.difference, "tolerance": f.tolerance}
            for f in findings
        ],
    }
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(cfg.out_dir / "report.json", doc)
    click.echo(f"{len(rows)} rows, {significant} with p < 0.01, "
               f"{len(findings)} monotonicity findings")
    for key, counts in doc["signs"].items():
        click.echo(f"  {key}: +{counts['positive']} -{counts['negative']} ={counts['zero']}")


@main.command()
@_common
@click.argument("tables", nargs=-1, type=click.Path(dir_okay=False))
@_guard
def plot(tables, **opts):
    """SVG plots of P_N, P_S and their difference against sigma and mu."""
    cfg = resolve_config(**opts)
    rows = [r for path in _table_files(cfg, tables) for r in read_rows_csv(path)]
    if not rows:
        raise DatasetError("comparison tables hold no rows")
    written = []
    for column in ("p_n", "p_s", "delta_p"):
        written += emit_plots(rows, cfg.out_dir / "plots", column)
    click.echo(f"wrote {len(written)} plots to {cfg.out_dir / 'plots'}")


if __name__ == "__main__":
    main()
