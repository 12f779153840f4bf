import numpy as np
import pytest

from guidebot.audio_io import PcmSignal

TABLE_MALE_PEAKS = (512.0, 698.0, 497.0, 506.0, 628.0)
TABLE_FEMALE_PEAKS = (623.0, 676.0, 628.0, 576.0, 639.0)


def tone_signal(
    frequency_hz: float,
    duration_s: float = 1.0,
    sample_rate_hz: int = 44100,
    amplitude: int = 16384,
) -> PcmSignal:
    """Pure sine test fixture."""
    t = np.arange(int(duration_s * sample_rate_hz)) / sample_rate_hz
    samples = np.rint(amplitude * np.sin(2 * np.pi * frequency_hz * t)).astype(int)
    return PcmSignal(samples=tuple(int(v) for v in samples), sample_rate_hz=sample_rate_hz)


def random_signal(rng: np.random.Generator, length: int, rate: int = 44100) -> PcmSignal:
    samples = rng.integers(-32768, 32768, size=length)
    return PcmSignal(samples=tuple(int(v) for v in samples), sample_rate_hz=rate)


def dft_oracle(values) -> np.ndarray:
    """Direct O(N^2) DFT used as the independent reference."""
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    k = np.arange(n)
    matrix = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return matrix @ x


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20150515)
