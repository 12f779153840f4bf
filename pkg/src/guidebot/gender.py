"""Voice gender identification from the spectral peak frequency.

Training averages the peak frequency of each class and stores the midpoint
of the two class means as the decision threshold. Classification is a
single comparison: peaks strictly above the threshold are female, anything
else is male.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .audio_io import PcmSignal
from .spectral import (
    DEFAULT_BAND_HIGH_HZ,
    DEFAULT_BAND_LOW_HZ,
    SpectralFeature,
    peak_of_signal,
)

_THRESHOLD_RTOL = 1e-6


class EmptyClass(ValueError):
    """Training requires at least one sample per class."""


class MalformedModelFile(ValueError):
    """Model file is unreadable or violates the model invariants."""


class GenderLabel(Enum):
    FEMALE = "female"
    MALE = "male"


@dataclass(frozen=True)
class GenderModel:
    """Trained decision threshold plus the per-class training peaks."""

    threshold_hz: float
    male_training_peaks_hz: tuple[float, ...]
    female_training_peaks_hz: tuple[float, ...]
    band: tuple[float, float] = (DEFAULT_BAND_LOW_HZ, DEFAULT_BAND_HIGH_HZ)

    def __post_init__(self) -> None:
        if not self.male_training_peaks_hz or not self.female_training_peaks_hz:
            raise ValueError("both training classes must be non-empty")
        if self.threshold_hz <= 0:
            raise ValueError("threshold must be positive")
        expected = _midpoint_threshold(
            self.male_training_peaks_hz, self.female_training_peaks_hz
        )
        if abs(self.threshold_hz - expected) > _THRESHOLD_RTOL * expected:
            raise ValueError(
                f"threshold {self.threshold_hz} inconsistent with training peaks "
                f"(expected {expected})"
            )

    @property
    def display_threshold_hz(self) -> int:
        """Threshold rounded to whole hertz for reporting."""
        return round(self.threshold_hz)


@dataclass(frozen=True)
class EvaluationReport:
    """Expected/predicted label pairs and the resulting accuracy."""

    per_sample: tuple[tuple[GenderLabel, GenderLabel], ...]
    accuracy_percent: float


def _midpoint_threshold(
    male_peaks_hz: Sequence[float], female_peaks_hz: Sequence[float]
) -> float:
    male_mean = sum(male_peaks_hz) / len(male_peaks_hz)
    female_mean = sum(female_peaks_hz) / len(female_peaks_hz)
    return (male_mean + female_mean) / 2


def train_from_peaks(
    male_peaks_hz: Sequence[float],
    female_peaks_hz: Sequence[float],
    band: tuple[float, float] = (DEFAULT_BAND_LOW_HZ, DEFAULT_BAND_HIGH_HZ),
) -> GenderModel:
    """Build a model directly from already-extracted peak frequencies."""
    if not male_peaks_hz:
        raise EmptyClass("no male training peaks")
    if not female_peaks_hz:
        raise EmptyClass("no female training peaks")
    male = tuple(float(f) for f in male_peaks_hz)
    female = tuple(float(f) for f in female_peaks_hz)
    male_mean = sum(male) / len(male)
    female_mean = sum(female) / len(female)
    if male_mean == female_mean:
        warnings.warn(
            "male and female class means coincide; the model cannot separate them",
            stacklevel=2,
        )
    return GenderModel(
        threshold_hz=(male_mean + female_mean) / 2,
        male_training_peaks_hz=male,
        female_training_peaks_hz=female,
        band=band,
    )


def train(
    male_samples: Iterable[PcmSignal],
    female_samples: Iterable[PcmSignal],
    band: tuple[float, float] = (DEFAULT_BAND_LOW_HZ, DEFAULT_BAND_HIGH_HZ),
) -> GenderModel:
    """Extract the peak frequency of every sample and train on those peaks."""
    low, high = band
    male_peaks = [peak_of_signal(s, low, high).peak_frequency_hz for s in male_samples]
    female_peaks = [
        peak_of_signal(s, low, high).peak_frequency_hz for s in female_samples
    ]
    return train_from_peaks(male_peaks, female_peaks, band)


def classify(model: GenderModel, feature: SpectralFeature) -> GenderLabel:
    """Female iff the peak is strictly above the threshold, else male."""
    if feature.peak_frequency_hz > model.threshold_hz:
        return GenderLabel.FEMALE
    return GenderLabel.MALE


def evaluate(
    model: GenderModel,
    labeled_features: Sequence[tuple[SpectralFeature, GenderLabel]],
) -> EvaluationReport:
    """Classify every feature and report accuracy as a percentage."""
    if not labeled_features:
        raise ValueError("nothing to evaluate")
    per_sample = tuple(
        (expected, classify(model, feature)) for feature, expected in labeled_features
    )
    correct = sum(1 for expected, predicted in per_sample if expected == predicted)
    return EvaluationReport(
        per_sample=per_sample,
        accuracy_percent=100.0 * correct / len(per_sample),
    )


def save_model(model: GenderModel) -> bytes:
    """Serialize a model to the line-oriented ``key = value`` text format."""
    lines = [
        f"threshold_hz = {model.threshold_hz!r}",
        f"band_low_hz = {model.band[0]!r}",
        f"band_high_hz = {model.band[1]!r}",
        "male_peaks_hz = " + ", ".join(repr(f) for f in model.male_training_peaks_hz),
        "female_peaks_hz = "
        + ", ".join(repr(f) for f in model.female_training_peaks_hz),
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


_MODEL_KEYS = {
    "threshold_hz",
    "band_low_hz",
    "band_high_hz",
    "male_peaks_hz",
    "female_peaks_hz",
}


def load_model(data: bytes) -> GenderModel:
    """Parse :func:`save_model` output, re-checking the threshold invariant."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedModelFile("model file is not UTF-8 text") from exc

    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise MalformedModelFile(f"line {lineno}: expected 'key = value'")
        if key not in _MODEL_KEYS:
            raise MalformedModelFile(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise MalformedModelFile(f"line {lineno}: duplicate key {key!r}")
        values[key] = value.strip()

    missing = _MODEL_KEYS - values.keys()
    if missing:
        raise MalformedModelFile(f"missing keys: {', '.join(sorted(missing))}")

    def parse_float(key: str) -> float:
        try:
            return float(values[key])
        except ValueError as exc:
            raise MalformedModelFile(f"{key} is not a number") from exc

    def parse_list(key: str) -> tuple[float, ...]:
        parts = [p.strip() for p in values[key].split(",") if p.strip()]
        if not parts:
            raise MalformedModelFile(f"{key} holds no values")
        try:
            return tuple(float(p) for p in parts)
        except ValueError as exc:
            raise MalformedModelFile(f"{key} holds a non-number") from exc

    try:
        return GenderModel(
            threshold_hz=parse_float("threshold_hz"),
            male_training_peaks_hz=parse_list("male_peaks_hz"),
            female_training_peaks_hz=parse_list("female_peaks_hz"),
            band=(parse_float("band_low_hz"), parse_float("band_high_hz")),
        )
    except ValueError as exc:
        raise MalformedModelFile(str(exc)) from exc
