"""Mono 16-bit PCM WAV parsing and writing.

Only the canonical RIFF/WAVE layout is handled: a ``fmt `` chunk followed
by a ``data`` chunk, with unknown chunks skipped by their declared size.
Stereo, non-PCM and non-16-bit files are rejected rather than converted.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

_PCM_FORMAT_TAG = 1
_HEADER_SIZE = 44  # RIFF(12) + fmt(24) + data header(8)

INT16_MIN = -32768
INT16_MAX = 32767


class MalformedContainer(ValueError):
    """The byte stream is not a well-formed RIFF/WAVE container."""


class UnsupportedFormat(ValueError):
    """The container is valid but not PCM / mono / 16-bit."""


@dataclass(frozen=True)
class PcmSignal:
    """Time-domain mono audio: raw signed 16-bit samples plus their rate."""

    samples: tuple[int, ...]
    sample_rate_hz: int
    channel_count: int = 1

    def __post_init__(self) -> None:
        if self.channel_count != 1:
            raise ValueError("only mono signals are supported")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        for value in self.samples:
            if not INT16_MIN <= value <= INT16_MAX:
                raise ValueError(f"sample {value} outside signed 16-bit range")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def parse_wav(data: bytes) -> PcmSignal:
    """Parse a RIFF/WAVE byte string into a :class:`PcmSignal`.

    Raises :class:`MalformedContainer` for structural damage and
    :class:`UnsupportedFormat` for valid containers we do not accept
    (non-PCM, multi-channel, sample width other than 16 bits).
    """
    if len(data) < 12:
        raise MalformedContainer("too short for a RIFF header")
    if data[0:4] != b"RIFF":
        raise MalformedContainer("missing RIFF magic")
    (riff_size,) = struct.unpack_from("<I", data, 4)
    if riff_size < 4 or 8 + riff_size > len(data):
        raise MalformedContainer("RIFF size field disagrees with payload")
    if data[8:12] != b"WAVE":
        raise MalformedContainer("missing WAVE form type")

    end = 8 + riff_size
    offset = 12
    sample_rate: int | None = None
    while offset < end:
        if offset + 8 > end:
            raise MalformedContainer("truncated chunk header")
        chunk_id = data[offset : offset + 4]
        (chunk_size,) = struct.unpack_from("<I", data, offset + 4)
        body = offset + 8
        if body + chunk_size > end:
            raise MalformedContainer(
                f"chunk {chunk_id!r} declares {chunk_size} bytes beyond the container"
            )
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise MalformedContainer("fmt chunk shorter than 16 bytes")
            format_tag, channels, rate, _byte_rate, _block_align, bits = struct.unpack_from(
                "<HHIIHH", data, body
            )
            if format_tag != _PCM_FORMAT_TAG:
                raise UnsupportedFormat(f"format tag {format_tag} is not PCM")
            if channels != 1:
                raise UnsupportedFormat(f"{channels} channels; only mono is supported")
            if bits != 16:
                raise UnsupportedFormat(f"{bits} bits per sample; only 16 is supported")
            if rate == 0:
                raise MalformedContainer("fmt chunk declares a zero sample rate")
            sample_rate = rate
        elif chunk_id == b"data":
            if sample_rate is None:
                raise MalformedContainer("data chunk appears before fmt chunk")
            if chunk_size % 2 != 0:
                raise MalformedContainer("odd data size cannot hold 16-bit samples")
            count = chunk_size // 2
            samples = struct.unpack_from(f"<{count}h", data, body)
            return PcmSignal(samples=samples, sample_rate_hz=sample_rate)
        # RIFF pads odd-sized chunks to an even boundary.
        offset = body + chunk_size + (chunk_size % 2)
    raise MalformedContainer("no data chunk found")


def write_wav(signal: PcmSignal) -> bytes:
    """Serialize a signal to canonical 44-byte-header PCM16 mono WAV bytes."""
    data_size = 2 * len(signal.samples)
    rate = signal.sample_rate_hz
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + data_size,
        b"WAVE",
        b"fmt ",
        16,
        _PCM_FORMAT_TAG,
        1,
        rate,
        rate * 2,
        2,
        16,
        b"data",
        data_size,
    )
    return header + struct.pack(f"<{len(signal.samples)}h", *signal.samples)


def read_wav_file(path: str | Path) -> PcmSignal:
    return parse_wav(Path(path).read_bytes())


def write_wav_file(path: str | Path, signal: PcmSignal) -> None:
    Path(path).write_bytes(write_wav(signal))
