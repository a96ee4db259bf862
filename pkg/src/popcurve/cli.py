"""Batch command-line front end: synth / classify / validate."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .curvefit import CurveLabel
from .errors import NoInput, PopcurveError, TooFewSeries
from .series import ingest_csv, preprocess
from .synth import make_corpus, write_corpus
from .validation import ExperimentConfig, fit_label_all, run_experiment

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sim-length", type=int, default=400)
    p.add_argument("--split-ratio", type=float, default=0.70)
    p.add_argument("--cluster-threshold", type=float, default=30.0)
    p.add_argument("--purity-threshold", type=float, default=0.55)
    p.add_argument("--knn-threshold", type=float, default=5.0)
    p.add_argument("--fit-error-threshold", type=float, default=5.7)
    p.add_argument("--dying-epsilon", type=float, default=0.04)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config", type=Path, default=None,
                   help="key=value file; flags given on the command line win")


def _load_config_file(path: Path) -> dict:
    out = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PopcurveError(f"{path}:{lineno}: expected key=value")
        key, val = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _resolve_config(args, argv) -> ExperimentConfig:
    values = {
        "sim_length": args.sim_length,
        "split_ratio": args.split_ratio,
        "cluster_threshold": args.cluster_threshold,
        "purity_threshold": args.purity_threshold,
        "knn_threshold": args.knn_threshold,
        "fit_error_threshold": args.fit_error_threshold,
        "dying_epsilon": args.dying_epsilon,
        "rng_seed": args.seed,
        "jobs": args.jobs,
    }
    if args.config is not None:
        overrides = _load_config_file(args.config)
        explicit = {a.split("=", 1)[0].lstrip("-").replace("-", "_")
                    for a in argv if a.startswith("--")}
        for key, val in overrides.items():
            cfg_key = "rng_seed" if key == "seed" else key
            if cfg_key in values and key not in explicit and cfg_key not in explicit:
                caster = int if cfg_key in ("sim_length", "rng_seed", "jobs") else float
                values[cfg_key] = caster(val)
    return ExperimentConfig(**values)


def _manifest(args, cfg: ExperimentConfig, inputs: list[str]) -> dict:
    return {
        "tool": "popcurve",
        "version": __version__,
        "inputs": sorted(inputs),
        "config": cfg.to_dict(),
    }


def _load_dir(indir: Path, sim_length: int):
    """Ingest and preprocess every CSV in a directory. Returns
    (series, origins, failures)."""
    files = sorted(indir.glob("*.csv"))
    files = [f for f in files if f.name != "labels.csv"]
    if not files:
        raise NoInput(f"no CSV files in {indir}")
    series, origins, failures = [], [], []
    for path in files:
        try:
            raws = ingest_csv(path)
        except PopcurveError as exc:
            failures.append(f"{path.name}: {exc}")
            continue
        except ValueError as exc:
            failures.append(f"{path.name}: {exc}")
            continue
        for raw in raws:
            try:
                series.append(preprocess(raw, sim_length))
                origins.append((path.stem, raw.species_name))
            except PopcurveError as exc:
                failures.append(f"{path.name}/{raw.species_name}: {exc}")
    return series, origins, failures


def cmd_synth(args, argv) -> int:
    corpus = make_corpus(
        per_class=args.per_class,
        noise_sigma=args.noise,
        seed=args.seed,
        length=args.sim_length,
        table1_mix=args.table1_mix,
        total=args.total,
    )
    write_corpus(args.out, corpus)
    print(f"wrote {len(corpus)} series to {args.out}")
    return EXIT_OK


def cmd_classify(args, argv) -> int:
    cfg = _resolve_config(args, argv)
    t0 = time.perf_counter()
    series, origins, failures = _load_dir(args.input, cfg.sim_length)
    if not series:
        raise NoInput(f"no usable series in {args.input}")
    results = fit_label_all(series, cfg)
    outdir = args.out
    outdir.mkdir(parents=True, exist_ok=True)
    records = [
        {"model": model, "species": species, **res.to_dict()}
        for (model, species), res in zip(origins, results)
    ]
    manifest = _manifest(args, cfg, [str(args.input)])
    with open(outdir / "labels.json", "w", encoding="utf-8") as fh:
        json.dump({"manifest": manifest, "records": records}, fh,
                  sort_keys=True, indent=2)
    with open(outdir / "labels.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "species", "label", "family", "rss"])
        for rec in records:
            writer.writerow([rec["model"], rec["species"], rec["label"],
                             rec["family"] or "", rec["rss"] if rec["rss"] is not None else ""])
    manifest["timings"] = {"total_s": round(time.perf_counter() - t0, 3)}
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
    for failure in failures:
        print(f"skipped: {failure}", file=sys.stderr)
    print(f"classified {len(records)} series -> {outdir}")
    if failures and args.strict:
        return EXIT_DATA
    return EXIT_OK


def _plot_clusters(report, series, outdir: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .curvefit import detect_constant

    # clustered series in the same local order used by the pipeline
    clustered = [i for i in report.train_indices if not detect_constant(series[i])]
    for c in report.clusters:
        fig, ax = plt.subplots(figsize=(6, 3))
        for m in c.members:
            ax.plot(series[clustered[m]].values, color="0.7", lw=0.6)
        ax.plot(series[clustered[c.medoid_index]].values, color="C3", lw=2.0)
        ax.set_title(f"cluster {c.cluster_id}: {c.label.value} "
                     f"(n={len(c.members)}, purity={c.purity:.2f})")
        ax.set_ylim(-0.05, 1.1)
        fig.tight_layout()
        fig.savefig(outdir / f"cluster_{c.cluster_id:03d}.svg")
        plt.close(fig)


def cmd_validate(args, argv) -> int:
    cfg = _resolve_config(args, argv)
    t0 = time.perf_counter()
    series, origins, failures = _load_dir(args.input, cfg.sim_length)
    if len(series) < 20:
        raise TooFewSeries(f"need >= 20 usable series, got {len(series)}")
    timings = {}
    t1 = time.perf_counter()
    fit_results = fit_label_all(series, cfg)
    timings["fit_s"] = round(time.perf_counter() - t1, 3)
    t1 = time.perf_counter()
    report = run_experiment(series, cfg, dataset_tag=str(args.input),
                            fit_results=fit_results)
    timings["cluster_knn_s"] = round(time.perf_counter() - t1, 3)

    outdir = args.out
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = _manifest(args, cfg, [str(args.input)])
    with open(outdir / "report.json", "w", encoding="utf-8") as fh:
        fh.write(report.to_json(extra={"manifest": manifest}))
    report.confusion.to_csv(outdir / "confusion.csv")
    with open(outdir / "dendrogram.json", "w", encoding="utf-8") as fh:
        json.dump(report.dendrogram.to_dict(), fh, sort_keys=True)
    report.medoid_index.save(outdir / "medoids.json")

    from .curvefit import detect_constant

    clustered = [i for i in report.train_indices if not detect_constant(series[i])]
    medoid_locals = {c.medoid_index for c in report.clusters}
    local_cluster = {}
    for c in report.clusters:
        for m in c.members:
            local_cluster[m] = c
    with open(outdir / "clusters.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "species", "cluster_id", "is_medoid", "label"])
        for m, i in enumerate(clustered):
            c = local_cluster[m]
            model, species = origins[i]
            writer.writerow([model, species, c.cluster_id,
                             int(m in medoid_locals), c.label.value])
    if args.plots:
        _plot_clusters(report, series, outdir)

    timings["total_s"] = round(time.perf_counter() - t0, 3)
    manifest["timings"] = timings
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
    for failure in failures:
        print(f"skipped: {failure}", file=sys.stderr)
    print(
        f"clusters={report.n_clusters} "
        f"train_agreement={report.training_agreement_pct:.2f}% "
        f"test_agreement={report.test_agreement_pct:.2f}% -> {outdir}"
    )
    if failures and args.strict:
        return EXIT_DATA
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="popcurve",
                     description="Classify population time series by curve "
                                 "fitting and DTW clustering.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p_synth.add_argument("--out", type=Path, required=True)
    p_synth.add_argument("--per-class", type=int, default=100)
    p_synth.add_argument("--noise", type=float, default=0.02)
    p_synth.add_argument("--seed", type=int, default=7)
    p_synth.add_argument("--sim-length", type=int, default=400)
    p_synth.add_argument("--table1-mix", action="store_true")
    p_synth.add_argument("--total", type=int, default=None)
    p_synth.set_defaults(func=cmd_synth)

    p_cls = sub.add_parser("classify", help="curve-fit classify a CSV directory")
    p_cls.add_argument("input", type=Path)
    p_cls.add_argument("--out", type=Path, required=True)
    p_cls.add_argument("--strict", action="store_true")
    _add_config_flags(p_cls)
    p_cls.set_defaults(func=cmd_classify)

    p_val = sub.add_parser("validate", help="run the full two-method experiment")
    p_val.add_argument("input", type=Path)
    p_val.add_argument("--out", type=Path, required=True)
    p_val.add_argument("--strict", action="store_true")
    p_val.add_argument("--plots", action="store_true")
    _add_config_flags(p_val)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, argv)
    except (PopcurveError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
