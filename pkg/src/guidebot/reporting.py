"""Delimited reports and matplotlib figures for the analysis subcommands."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .gender import GenderLabel, GenderModel
from .spectral import SpectralFeature, Spectrum


def write_spectrum_tsv(spectrum: Spectrum, path: str | Path) -> None:
    lines = ["frequency_hz\tmagnitude"]
    for freq, mag in zip(spectrum.frequencies(), spectrum.magnitudes):
        lines.append(f"{freq:.6f}\t{mag:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def plot_spectrum(
    spectrum: Spectrum,
    path: str | Path,
    peak: SpectralFeature | None = None,
    title: str = "Magnitude spectrum",
) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(spectrum.frequencies(), spectrum.magnitudes, lw=0.8)
    if peak is not None:
        ax.axvspan(peak.band_low_hz, peak.band_high_hz, color="0.92", zorder=0)
        ax.plot(
            [peak.peak_frequency_hz],
            [peak.peak_magnitude],
            "rv",
            label=f"peak {peak.peak_frequency_hz:.1f} Hz",
        )
        ax.legend()
    ax.set_xlabel("Frequency (Hz)")
    ax.set_ylabel("Magnitude")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_training_peaks(model: GenderModel, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    male = model.male_training_peaks_hz
    female = model.female_training_peaks_hz
    ax.plot(range(1, len(male) + 1), male, "bs", label="male peaks")
    ax.plot(range(1, len(female) + 1), female, "ro", label="female peaks")
    ax.axhline(
        model.threshold_hz,
        color="k",
        ls="--",
        label=f"threshold {model.display_threshold_hz} Hz",
    )
    ax.set_xlabel("Speaker")
    ax.set_ylabel("Peak frequency (Hz)")
    ax.set_title("Training peaks and decision threshold")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_evaluation_tsv(
    rows: Sequence[tuple[str, float, GenderLabel, GenderLabel]],
    accuracy_percent: float,
    path: str | Path,
) -> None:
    """Rows are (source, peak_hz, expected, predicted)."""
    lines = ["source\tpeak_hz\texpected\tpredicted\tcorrect"]
    for source, peak_hz, expected, predicted in rows:
        lines.append(
            f"{source}\t{peak_hz:.3f}\t{expected.value}\t{predicted.value}"
            f"\t{'yes' if expected == predicted else 'no'}"
        )
    lines.append(f"# accuracy_percent\t{accuracy_percent}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def plot_evaluation(
    rows: Sequence[tuple[str, float, GenderLabel, GenderLabel]],
    model: GenderModel,
    accuracy_percent: float,
    path: str | Path,
) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for idx, (_, peak_hz, expected, predicted) in enumerate(rows, start=1):
        marker = "o" if expected is GenderLabel.FEMALE else "s"
        color = "g" if expected == predicted else "r"
        ax.plot([idx], [peak_hz], marker=marker, color=color, ls="none")
    ax.axhline(
        model.threshold_hz,
        color="k",
        ls="--",
        label=f"threshold {model.display_threshold_hz} Hz",
    )
    ax.set_xlabel("Sample")
    ax.set_ylabel("Peak frequency (Hz)")
    ax.set_title(f"Recognition outcomes (accuracy {accuracy_percent:.1f}%)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
