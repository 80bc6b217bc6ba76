"""Figure rendering for the report path.

Figures are written as PNG files next to the delimited report output:
an accuracy chart (bars for E1-E4, curves over observation counts for
the epsilon study) and, when sample spectra were saved with the run, an
overlay of healthy versus injected spectra.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectrum import load_dataset

__all__ = ["render_accuracy_figure", "render_spectra_figure", "render_run_figures"]

_FIG_DPI = 150


def _fig_size(scale: float = 1.0, ratio: float = 0.62) -> tuple[float, float]:
    width = 6.4 * scale
    return width, width * ratio


def render_accuracy_figure(rows: list[dict[str, str]], path: str | Path) -> Path:
    """Accuracy chart for one report: bars, or curves for count variants."""
    path = Path(path)
    is_epsilon = any(r["variant"].startswith("count") for r in rows)
    fig, ax = plt.subplots(figsize=_fig_size())
    if is_epsilon:
        models = sorted({r["model"] for r in rows})
        for model in models:
            pts = sorted(
                (int(r["variant"][len("count"):]), 100 * float(r["accuracy_mean"]), 100 * float(r["accuracy_std"]))
                for r in rows
                if r["model"] == model
            )
            counts, means, stds = zip(*pts)
            ax.errorbar(counts, means, yerr=stds, marker="o", capsize=3, label=model)
        ax.set_xscale("log")
        ax.set_xlabel("anomalous observations in training set")
    else:
        labels = [f"{r['model']}\n{r['variant']}" for r in rows]
        means = [100 * float(r["accuracy_mean"]) for r in rows]
        stds = [100 * float(r["accuracy_std"]) for r in rows]
        x = np.arange(len(rows))
        ax.bar(x, means, yerr=stds, capsize=4, color="tab:blue", alpha=0.85)
        ax.set_xticks(x, labels, fontsize=8)
    ax.set_ylabel("accuracy (%)")
    ax.set_ylim(0, 105)
    ax.grid(True, axis="y", alpha=0.3)
    if is_epsilon:
        ax.legend(fontsize=8)
    eid = rows[0]["experiment_id"] if rows else ""
    ax.set_title(f"{eid}: classification accuracy")
    fig.tight_layout()
    fig.savefig(path, dpi=_FIG_DPI)
    plt.close(fig)
    return path


def render_spectra_figure(samples_csv: str | Path, path: str | Path) -> Path:
    """Overlay the sample spectra of one run, one trace per class."""
    path = Path(path)
    dataset = load_dataset(samples_csv)
    fig, ax = plt.subplots(figsize=_fig_size(scale=1.1))
    for w in dataset:
        freqs = np.arange(w.n_bins) * w.bin_width_hz
        name = w.label.value if w.label is not None else "unlabeled"
        ax.semilogy(freqs, np.maximum(w.magnitudes, 1e-6), lw=0.9, label=name)
    ax.set_xlabel("frequency (Hz)")
    ax.set_ylabel("|FFT| magnitude")
    ax.set_title("healthy vs peak-injected spectra")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_FIG_DPI)
    plt.close(fig)
    return path


def render_run_figures(run_dir: str | Path, rows: list[dict[str, str]]) -> list[Path]:
    """Render every figure a run directory supports; returns written paths."""
    run_dir = Path(run_dir)
    written = [render_accuracy_figure(rows, run_dir / "accuracy.png")]
    samples = run_dir / "samples.csv"
    if samples.exists():
        written.append(render_spectra_figure(samples, run_dir / "spectra.png"))
    return written
