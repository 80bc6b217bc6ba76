"""Command-line interface.

Verbs:
  simulate    synthesize current recordings plus a dataset manifest
  augment     build a labeled spectrum dataset from healthy recordings
  train       fit a classifier on a spectrum dataset
  eval        evaluate a saved classifier on a spectrum dataset
  experiment  run one of the benchmark protocols (E1..E4, epsilon)
  report      render the table and figures for a finished run

The process exits 0 only when every invariant guard passed; guard and
validation failures exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .augment import GaussianPeakSource, build_augmented_dataset, collect_segments, peak_training_bins
from .classifier import Mlp, ResNet1d, ResNetConfig, LinearSvm, build_resnet, evaluate, train, train_mlp, train_svm
from .experiments import DataLeakageError, load_experiment_config, run_experiment
from .motor import FaultClass, load_motor_parameters, save_motor_parameters
from .neural.checkpoint import load_checkpoint, save_checkpoint
from .neural.layers import Dense
from .reportfig import render_run_figures
from .sim_oracle import SimSpec, save_sim_spec, simulate
from .signal_io import DatasetManifest, ManifestEntry, load_manifest, load_recording, save_manifest, save_recording, split_windows
from .spectrum import LabeledDataset, load_dataset, save_dataset, window_spectrum
from .vae import VaePeakSource, train_vae

__all__ = ["main"]


def _parse_faults(text: str) -> tuple[FaultClass, ...]:
    return tuple(FaultClass.from_name(t) for t in text.split(",") if t.strip())


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _cmd_simulate(args) -> int:
    params = load_motor_parameters(args.motor)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    motor_copy = out / "motor.cfg"
    save_motor_parameters(params, motor_copy)

    fault = FaultClass.from_name(args.fault)
    rng = np.random.default_rng(args.seed)
    entries = []
    for i in range(args.n):
        spec = SimSpec(
            params=params,
            fault=fault,
            fault_amp_db=args.severity_db,
            noise_std=args.noise_std,
            duration_s=args.duration,
            sample_rate_hz=args.rate,
            seed=int(rng.integers(0, 2**62)),
            max_order=args.max_order,
            mechanical_frequencies_hz=_parse_floats(args.mech_freqs) if args.mech_freqs else (),
            source_id=f"sim-{fault.value}-{args.seed}-{i}",
        )
        rec = simulate(spec)
        rec_path = out / f"{rec.source_id}.csv"
        save_recording(rec, rec_path)
        save_sim_spec(spec, out / f"{rec.source_id}.spec.json")
        entries.append(
            ManifestEntry(
                path=rec_path.name,
                label=fault,
                motor_params_path=motor_copy.name,
                sample_rate_hz=args.rate,
            )
        )
    save_manifest(DatasetManifest(entries=tuple(entries)), out / "manifest.txt")
    print(f"wrote {args.n} recordings and manifest to {out}")
    return 0


def _manifest_recordings(manifest_path: Path):
    manifest = load_manifest(manifest_path)
    base = manifest_path.parent
    motor_paths = {e.motor_params_path for e in manifest.entries}
    if len(motor_paths) != 1:
        raise ValueError(f"manifest references {len(motor_paths)} motor configs; expected exactly one")
    params = load_motor_parameters(base / next(iter(motor_paths)))
    recordings = [
        load_recording(base / e.path, e.sample_rate_hz, label=e.label)
        for e in manifest.entries
    ]
    return params, recordings


def _cmd_augment(args) -> int:
    params, recordings = _manifest_recordings(Path(args.manifest))
    healthy = [r for r in recordings if r.label in (FaultClass.HEALTHY, None)]
    if not healthy:
        raise ValueError("manifest holds no healthy or unlabeled recordings to augment")

    hop = args.hop or args.window_len // 2
    pool = []
    for rec in healthy:
        for i, w in enumerate(split_windows(rec, args.window_len, hop)):
            pool.append(window_spectrum(w, rec.sample_rate_hz, origin=f"{rec.source_id}:{i}"))

    faults = _parse_faults(args.faults)
    mech = _parse_floats(args.mech_freqs) if args.mech_freqs else None
    if args.generator == "B":
        source = GaussianPeakSource()
    else:
        first = pool[0]
        bins = peak_training_bins(params.supply_frequency_hz, (3, 5), first.bin_width_hz, first.n_bins)
        segments = collect_segments(pool, bins)
        model = train_vae(segments, epochs=args.vae_epochs, seed=args.seed)
        source = VaePeakSource(model)

    dataset = build_augmented_dataset(
        pool, params, faults, source,
        per_class=args.per_class, seed=args.seed,
        max_order=args.max_order, user_frequencies_hz=mech,
    )
    save_dataset(dataset, args.out)
    meta = {
        "generator_option": args.generator,
        "seed": args.seed,
        "per_class": args.per_class,
        "faults": [f.value for f in faults],
        "max_order": args.max_order,
        "window_len": args.window_len,
        "hop": hop,
        "amp_fraction_range": [0.3, 1.0],
        "sigma_range": [0.5, 2.0],
    }
    Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(dataset)} windows to {args.out}")
    return 0


def _auto_feature_scale(dataset: LabeledDataset) -> float:
    """1 / median window maximum: puts the fundamental near unit scale."""
    peak = float(np.median([w.magnitudes.max() for w in dataset]))
    return 1.0 / peak if peak > 0 else 1.0


def _cmd_train(args) -> int:
    dataset = load_dataset(args.data)
    scale = float(args.feature_scale) if args.feature_scale != "auto" else _auto_feature_scale(dataset)
    classes = dataset.classes()
    out = Path(args.out)
    meta: dict = {"model_type": args.model, "classes": [c.value for c in classes]}

    if args.model == "resnet":
        cfg = ResNetConfig(
            n_classes=len(classes),
            block_channels=tuple(int(c) for c in args.channels.split(",")),
            epochs=args.epochs,
            seed=args.seed,
            feature_scale=scale,
        )
        model = build_resnet(cfg)
        history = train(model, dataset, cfg)
        model.save(out)
        meta["resnet"] = {
            "n_classes": cfg.n_classes,
            "block_channels": list(cfg.block_channels),
            "kernel_size": cfg.kernel_size,
            "batch_size": cfg.batch_size,
            "lr": cfg.lr,
            "epochs": cfg.epochs,
            "seed": cfg.seed,
            "feature_scale": cfg.feature_scale,
        }
        print(f"final train loss {history['loss'][-1]:.4f}, accuracy {history['accuracy'][-1]:.3f}")
    elif args.model == "svm":
        model = train_svm(dataset, c_param=args.svm_c, epochs=args.epochs * 50, seed=args.seed)
        save_checkpoint(out, {"weights": model.weights, "bias": model.bias})
        meta["svm"] = {"input_scale": model.input_scale}
    elif args.model == "mlp":
        hidden = tuple(int(h) for h in args.hidden.split(",") if h.strip())
        model = train_mlp(dataset, hidden_dims=hidden, epochs=args.epochs, seed=args.seed, feature_scale=scale)
        save_checkpoint(out, model.named_parameters())
        meta["mlp"] = {"hidden": list(hidden), "feature_scale": scale, "n_bins": dataset.windows[0].n_bins}
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown model {args.model}")

    Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"saved {args.model} model to {out}")
    return 0


def load_model(path: str | Path):
    """Rebuild a saved classifier from its checkpoint and meta sidecar."""
    path = Path(path)
    meta = json.loads(Path(str(path) + ".meta.json").read_text())
    classes = [FaultClass.from_name(c) for c in meta["classes"]]
    kind = meta["model_type"]
    if kind == "resnet":
        m = meta["resnet"]
        cfg = ResNetConfig(
            n_classes=m["n_classes"],
            block_channels=tuple(m["block_channels"]),
            kernel_size=m["kernel_size"],
            batch_size=m["batch_size"],
            lr=m["lr"],
            epochs=m["epochs"],
            seed=m["seed"],
            feature_scale=m["feature_scale"],
        )
        model = ResNet1d(cfg)
        model.load(path)
        model.classes = classes
        return model
    if kind == "svm":
        arrays = load_checkpoint(path)
        return LinearSvm(
            weights=arrays["weights"],
            bias=arrays["bias"],
            classes=classes,
            input_scale=meta["svm"]["input_scale"],
        )
    if kind == "mlp":
        m = meta["mlp"]
        arrays = load_checkpoint(path)
        rng = np.random.default_rng(0)
        dims = [m["n_bins"], *m["hidden"], len(classes)]
        layers = [Dense(dims[i], dims[i + 1], rng, name=f"mlp{i}") for i in range(len(dims) - 1)]
        model = Mlp(layers=layers, classes=classes, feature_scale=m["feature_scale"])
        for p in model.parameters():
            p.data = arrays[p.name]
        return model
    raise ValueError(f"unknown model type {kind!r} in {path}.meta.json")


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    dataset = load_dataset(args.data)
    report = evaluate(model, dataset)
    print(f"accuracy: {report.accuracy:.4f}")
    print(f"macro F1: {report.macro_f1:.4f}")
    print("per-class F1:")
    for cls, f1 in report.per_class_f1.items():
        print(f"  {cls.value:<20} {f1:.4f}")
    print("confusion (rows true, cols predicted):")
    names = [c.value for c in report.classes]
    width = max(len(n) for n in names)
    for name, row in zip(names, report.confusion):
        print(f"  {name:<{width}}  " + " ".join(f"{v:6d}" for v in row))
    if args.out:
        lines = [",".join(experiments._CSV_COLUMNS)]
        lines.append(
            ",".join(
                (
                    "adhoc", Path(str(args.model)).stem, "eval",
                    f"{report.accuracy:.6f}", "0.000000",
                    f"{report.macro_f1:.6f}", "0.000000",
                    "1", "-", "-", "-", "-",
                )
            )
        )
        Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_experiment_config(args.experiment, args.config)
    run_dir, result = run_experiment(cfg, args.out)
    rows = experiments.read_report_csv(run_dir / "report.csv")
    print(experiments.render_table(rows))
    print(f"\nrun directory: {run_dir}")
    return 0


def _cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    report_csv = run_dir / "report.csv"
    if not report_csv.exists():
        raise ValueError(f"{run_dir} holds no report.csv; run an experiment first")
    rows = experiments.read_report_csv(report_csv)
    table = experiments.render_table(rows)
    (run_dir / "table.txt").write_text(table + "\n")
    print(table)
    if not args.no_figures:
        for fig_path in render_run_figures(run_dir, rows):
            print(f"figure: {fig_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="motorsig", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize current recordings")
    p.add_argument("--motor", required=True, help="motor parameter key=value file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--fault", default="healthy")
    p.add_argument("--n", type=int, default=5, help="number of recordings")
    p.add_argument("--severity-db", type=float, default=-20.0)
    p.add_argument("--noise-std", type=float, default=0.005)
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=8192.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-order", type=int, default=1)
    p.add_argument("--mech-freqs", default="", help="comma list for mechanical_other")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("augment", help="build an injected spectrum dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="dataset CSV path")
    p.add_argument("--faults", required=True, help="comma list of fault classes")
    p.add_argument("--per-class", type=int, default=50)
    p.add_argument("--generator", choices=("A", "B"), default="B")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-len", type=int, default=8192)
    p.add_argument("--hop", type=int, default=0, help="default: window/2")
    p.add_argument("--max-order", type=int, default=1)
    p.add_argument("--mech-freqs", default="")
    p.add_argument("--vae-epochs", type=int, default=40)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("train", help="train a classifier on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--model", choices=("resnet", "svm", "mlp"), default="resnet")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--epochs", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--feature-scale", default="auto")
    p.add_argument("--channels", default="16,32,64,128")
    p.add_argument("--hidden", default="64")
    p.add_argument("--svm-c", type=float, default=1.0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved classifier")
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="", help="optional CSV row output")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run a benchmark protocol")
    p.add_argument("experiment", choices=("E1", "E2", "E3", "E4", "epsilon", "EPSILON"))
    p.add_argument("--config", default=None, help="key=value override file")
    p.add_argument("--out", default="runs", help="output root directory")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("report", help="render table and figures for a run")
    p.add_argument("run_dir")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, DataLeakageError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
