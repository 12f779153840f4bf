"""Speech service boundary: recognition protocol client, a bundled mock
recognition server, and a deterministic tone-based text-to-speech stub.

The recognition protocol is two ordered HTTP exchanges: POST the encoded
audio to ``/recognize`` and receive a session id, then poll
``GET /result/<id>`` until the transcript is ready. The mock server keys
transcripts on a content hash of the uploaded payload, so tests are fully
offline and deterministic.
"""

from __future__ import annotations

import hashlib
import threading
import time
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, HTTPServer
from typing import Callable

import numpy as np
import requests

from .audio_io import PcmSignal, write_wav

DEFAULT_LANGUAGE = "en-us"
DEFAULT_RETRIES = 3
DEFAULT_RETRY_DELAY_MS = 100

TTS_SAMPLE_RATE_HZ = 44100
TTS_SEGMENT_SECONDS = 0.1
TTS_AMPLITUDE = 16384
TTS_BASE_HZ = 200
TTS_STEP_HZ = 2


class TransportError(RuntimeError):
    """The recognition endpoint could not be reached."""


class RecognitionPending(RuntimeError):
    """No result after the configured number of polls."""


class RemoteRejection(RuntimeError):
    """The server answered with an error status."""


class UnknownSession(KeyError):
    """Result requested for a session id the server never issued."""


@dataclass(frozen=True)
class Transcript:
    text: str
    confidence: float | None = None

    def __post_init__(self) -> None:
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")


@dataclass(frozen=True)
class RecognitionRequest:
    payload: bytes
    language_tag: str = DEFAULT_LANGUAGE
    session_id: str = ""

    def __post_init__(self) -> None:
        if not self.payload:
            raise ValueError("payload must be non-empty")
        if not self.language_tag:
            raise ValueError("language tag must be non-empty")


@dataclass(frozen=True)
class CodecBoundary:
    """Pluggable audio encoder applied before upload."""

    encode: Callable[[PcmSignal], bytes]
    format_name: str


def wav_passthrough_codec() -> CodecBoundary:
    """Default codec: plain WAV bytes, no compression."""
    return CodecBoundary(encode=write_wav, format_name="wav-passthrough")


def fingerprint(payload: bytes) -> str:
    """Content hash used by the mock server to key primed transcripts."""
    return hashlib.sha256(payload).hexdigest()


@dataclass
class RecognitionClient:
    endpoint: str
    codec: CodecBoundary = field(default_factory=wav_passthrough_codec)
    language_tag: str = DEFAULT_LANGUAGE
    retries: int = DEFAULT_RETRIES
    retry_delay_ms: int = DEFAULT_RETRY_DELAY_MS

    def recognize(self, signal: PcmSignal) -> Transcript:
        """Upload the encoded signal, then poll for the transcript."""
        payload = self.codec.encode(signal)
        request = RecognitionRequest(payload=payload, language_tag=self.language_tag)
        session_id = self._upload(request)
        return self._poll(session_id)

    def _upload(self, request: RecognitionRequest) -> str:
        try:
            response = requests.post(
                f"{self.endpoint}/recognize",
                data=request.payload,
                headers={"X-Language": request.language_tag},
                timeout=10,
            )
        except requests.RequestException as exc:
            raise TransportError(f"cannot reach {self.endpoint}: {exc}") from exc
        if response.status_code != 200:
            raise RemoteRejection(
                f"upload rejected with status {response.status_code}"
            )
        return response.text.strip()

    def _poll(self, session_id: str) -> Transcript:
        url = f"{self.endpoint}/result/{session_id}"
        for attempt in range(self.retries):
            try:
                response = requests.get(url, timeout=10)
            except requests.RequestException as exc:
                raise TransportError(f"cannot reach {self.endpoint}: {exc}") from exc
            if response.status_code == 200:
                confidence_header = response.headers.get("X-Confidence")
                confidence = (
                    float(confidence_header) if confidence_header is not None else None
                )
                return Transcript(text=response.text, confidence=confidence)
            if response.status_code == 202:
                if attempt + 1 < self.retries:
                    time.sleep(self.retry_delay_ms / 1000.0)
                continue
            raise RemoteRejection(
                f"result request failed with status {response.status_code}"
            )
        raise RecognitionPending(
            f"no result for session {session_id} after {self.retries} polls"
        )


class MockRecognitionServer:
    """Serial HTTP server speaking the two-request recognition protocol.

    ``mapping`` keys payload fingerprints to transcripts; unmapped uploads
    resolve to an empty transcript with confidence 0. ``pending_polls``
    makes every session answer 202 that many times before the result, to
    exercise client retry behaviour.
    """

    def __init__(
        self,
        mapping: dict[str, str] | None = None,
        host: str = "127.0.0.1",
        port: int = 0,
        pending_polls: int = 0,
    ) -> None:
        self.mapping = dict(mapping or {})
        self.pending_polls = pending_polls
        self.request_log: list[str] = []
        self._sessions: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._thread: threading.Thread | None = None

        server_self = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt: str, *args) -> None:  # silence stderr
                pass

            def do_POST(self) -> None:
                server_self.request_log.append(f"POST {self.path}")
                if self.path != "/recognize":
                    self.send_error(404, "unknown endpoint")
                    return
                length = int(self.headers.get("Content-Length", "0"))
                payload = self.rfile.read(length)
                session_id = server_self._open_session(payload)
                body = session_id.encode("ascii")
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self) -> None:
                server_self.request_log.append(f"GET {self.path}")
                if not self.path.startswith("/result/"):
                    self.send_error(404, "unknown endpoint")
                    return
                session_id = self.path[len("/result/") :]
                try:
                    state = server_self._poll_session(session_id)
                except UnknownSession:
                    self.send_error(404, "unknown session")
                    return
                if state is None:
                    self.send_response(202)
                    self.send_header("Content-Length", "0")
                    self.end_headers()
                    return
                text, confidence = state
                body = text.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                if confidence is not None:
                    self.send_header("X-Confidence", str(confidence))
                self.end_headers()
                self.wfile.write(body)

        self._server = HTTPServer((host, port), Handler)

    def _open_session(self, payload: bytes) -> str:
        session_id = uuid.uuid4().hex
        with self._lock:
            self._sessions[session_id] = {
                "fingerprint": fingerprint(payload),
                "pending_left": self.pending_polls,
            }
        return session_id

    def _poll_session(self, session_id: str) -> tuple[str, float | None] | None:
        with self._lock:
            if session_id not in self._sessions:
                raise UnknownSession(session_id)
            session = self._sessions[session_id]
            if session["pending_left"] > 0:
                session["pending_left"] -= 1
                return None
            key = session["fingerprint"]
        if key in self.mapping:
            return self.mapping[key], None
        return "", 0.0

    def prime(self, payload: bytes, transcript: str) -> None:
        """Map a payload (by content hash) to a transcript."""
        self.mapping[fingerprint(payload)] = transcript

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def serve_in_background(self) -> "MockRecognitionServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def shutdown(self) -> None:
        self._server.shutdown()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
        self._server.server_close()

    def __enter__(self) -> "MockRecognitionServer":
        return self.serve_in_background()

    def __exit__(self, *exc_info) -> None:
        self.shutdown()


def synthesize(text: str) -> PcmSignal:
    """Deterministic text-to-speech stub.

    Each UTF-8 byte becomes a 100 ms sine segment at (200 + 2 * byte) Hz,
    amplitude 16384, sampled at 44100 Hz. Empty text gives an empty signal.
    """
    samples_per_segment = int(TTS_SAMPLE_RATE_HZ * TTS_SEGMENT_SECONDS)
    t = np.arange(samples_per_segment) / TTS_SAMPLE_RATE_HZ
    segments = []
    for byte in text.encode("utf-8"):
        freq = TTS_BASE_HZ + TTS_STEP_HZ * byte
        tone = TTS_AMPLITUDE * np.sin(2 * np.pi * freq * t)
        segments.append(np.rint(tone).astype(np.int16))
    if not segments:
        return PcmSignal(samples=(), sample_rate_hz=TTS_SAMPLE_RATE_HZ)
    samples = tuple(int(v) for v in np.concatenate(segments))
    return PcmSignal(samples=samples, sample_rate_hz=TTS_SAMPLE_RATE_HZ)
