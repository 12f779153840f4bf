"""Radix-2 FFT and spectral peak extraction.

The transform is a hand-rolled iterative Cooley-Tukey decimation in time:
inputs are zero-padded to the next power of two, bit-reverse permuted, and
combined stage by stage as X_k = E_k + w^k O_k over the even/odd half
transforms. The speech feature is the bin-center frequency at maximum
magnitude inside a band.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .audio_io import PcmSignal

# Recognizable voice energy sits in this range; starting above DC keeps
# recording offset out of the peak search.
DEFAULT_BAND_LOW_HZ = 30.0
DEFAULT_BAND_HIGH_HZ = 3400.0


class EmptySignal(ValueError):
    """FFT requested on a signal with no samples."""


class EmptyBand(ValueError):
    """No bin center falls inside the requested frequency band."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Magnitudes for the non-negative frequency bins below Nyquist."""

    magnitudes: np.ndarray
    bin_width_hz: float
    fft_size: int

    def __post_init__(self) -> None:
        if len(self.magnitudes) != self.fft_size // 2:
            raise ValueError("expected one magnitude per bin below Nyquist")
        if len(self.magnitudes) and float(np.min(self.magnitudes)) < 0:
            raise ValueError("magnitudes must be non-negative")
        if self.bin_width_hz <= 0:
            raise ValueError("bin width must be positive")

    @property
    def sample_rate_hz(self) -> float:
        return self.bin_width_hz * self.fft_size

    @property
    def nyquist_hz(self) -> float:
        return self.sample_rate_hz / 2

    def frequencies(self) -> np.ndarray:
        """Bin-center frequencies matching :attr:`magnitudes`."""
        return np.arange(len(self.magnitudes)) * self.bin_width_hz


@dataclass(frozen=True)
class SpectralFeature:
    """Peak location found by :func:`extract_peak`."""

    peak_frequency_hz: float
    peak_magnitude: float
    band_low_hz: float
    band_high_hz: float


def next_power_of_two(n: int) -> int:
    if n < 1:
        raise ValueError("need a positive length")
    return 1 << (n - 1).bit_length()


def fft_complex(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Full complex DFT of ``values``, zero-padded to the next power of two."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional sequence")
    if x.size == 0:
        raise EmptySignal("cannot transform an empty signal")
    size = next_power_of_two(x.size)
    buf = np.zeros(size, dtype=np.complex128)
    buf[: x.size] = x
    return _radix2_in_place(buf)


def _radix2_in_place(buf: np.ndarray) -> np.ndarray:
    """Iterative radix-2 decimation-in-time transform (length a power of two)."""
    n = buf.size
    if n == 1:
        return buf
    levels = n.bit_length() - 1

    # Bit-reversal permutation: the iterative equivalent of recursively
    # splitting into even- and odd-indexed subsequences.
    index = np.arange(n)
    reversed_index = np.zeros(n, dtype=np.intp)
    work = index.copy()
    for _ in range(levels):
        reversed_index = (reversed_index << 1) | (work & 1)
        work >>= 1
    out = buf[reversed_index]

    half = 1
    while half < n:
        size = 2 * half
        twiddle = np.exp((-2j * np.pi / size) * np.arange(half))
        blocks = out.reshape(-1, size)
        even = blocks[:, :half].copy()
        odd = blocks[:, half:] * twiddle
        blocks[:, :half] = even + odd
        blocks[:, half:] = even - odd
        half = size
    return out


def fft(signal: PcmSignal) -> Spectrum:
    """Transform a signal and keep the magnitudes below Nyquist."""
    transformed = fft_complex(signal.samples)
    size = transformed.size
    magnitudes = np.abs(transformed[: size // 2])
    magnitudes.setflags(write=False)
    return Spectrum(
        magnitudes=magnitudes,
        bin_width_hz=signal.sample_rate_hz / size,
        fft_size=size,
    )


def extract_peak(
    spectrum: Spectrum,
    band_low_hz: float = DEFAULT_BAND_LOW_HZ,
    band_high_hz: float = DEFAULT_BAND_HIGH_HZ,
) -> SpectralFeature:
    """Find the largest-magnitude bin inside [band_low_hz, band_high_hz].

    Ties break toward the lowest frequency. Raises :class:`EmptyBand` when
    no bin center lies inside the band.
    """
    if not 0 <= band_low_hz < band_high_hz:
        raise ValueError("need 0 <= band_low_hz < band_high_hz")
    if band_high_hz > spectrum.nyquist_hz:
        raise ValueError("band extends beyond Nyquist")
    frequencies = spectrum.frequencies()
    in_band = (frequencies >= band_low_hz) & (frequencies <= band_high_hz)
    if not in_band.any():
        raise EmptyBand(
            f"no bin center inside [{band_low_hz}, {band_high_hz}] Hz "
            f"at bin width {spectrum.bin_width_hz} Hz"
        )
    candidates = np.nonzero(in_band)[0]
    # argmax returns the first maximum, i.e. the lowest in-band frequency.
    best = candidates[int(np.argmax(spectrum.magnitudes[candidates]))]
    return SpectralFeature(
        peak_frequency_hz=float(frequencies[best]),
        peak_magnitude=float(spectrum.magnitudes[best]),
        band_low_hz=band_low_hz,
        band_high_hz=band_high_hz,
    )


def peak_of_signal(
    signal: PcmSignal,
    band_low_hz: float = DEFAULT_BAND_LOW_HZ,
    band_high_hz: float = DEFAULT_BAND_HIGH_HZ,
) -> SpectralFeature:
    """Convenience: FFT then peak extraction in one call."""
    return extract_peak(fft(signal), band_low_hz, band_high_hz)
