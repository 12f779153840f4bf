"""End-to-end turn orchestration: audio in, recognition and gender
identification, dialogue plus question answering, synthesized speech out.

A turn starts by firing any automatic transition left pending from the
previous turn (a finished dance, a spoken goodbye), maps the input to a
lettered condition for the current state, steps the conversation, and
synthesizes everything spoken to a WAV file when an output directory is
configured.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from . import dialogue, qa
from .audio_io import PcmSignal, write_wav_file
from .dialogue import ActionKind, Condition, Conversation, RobotAction
from .gender import GenderLabel, GenderModel, classify, load_model
from .spectral import DEFAULT_BAND_HIGH_HZ, DEFAULT_BAND_LOW_HZ, peak_of_signal
from .speech import (
    DEFAULT_RETRIES,
    DEFAULT_RETRY_DELAY_MS,
    RecognitionClient,
    Transcript,
    synthesize,
)

ASR_ENDPOINT_ENV_VAR = "GUIDE_ASR_ENDPOINT"


class PipelineStageError(RuntimeError):
    """A module error annotated with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    band_low_hz: float = DEFAULT_BAND_LOW_HZ
    band_high_hz: float = DEFAULT_BAND_HIGH_HZ
    sample_rate_hz: int = 44100
    model_path: Path | None = None
    rules_path: Path | None = None
    asr_endpoint: str | None = None
    asr_retries: int = DEFAULT_RETRIES
    asr_retry_delay_ms: int = DEFAULT_RETRY_DELAY_MS
    output_dir: Path | None = None

    def __post_init__(self) -> None:
        if not self.band_low_hz < self.band_high_hz:
            raise ValueError("band_low_hz must be below band_high_hz")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        values[key.strip()] = value.strip()
    return values


_CONFIG_KEYS = {
    "band_low_hz": ("band_low_hz", float),
    "band_high_hz": ("band_high_hz", float),
    "sample_rate_hz": ("sample_rate_hz", int),
    "model_path": ("model_path", Path),
    "rules_path": ("rules_path", Path),
    "output_dir": ("output_dir", Path),
    "asr.endpoint": ("asr_endpoint", str),
    "asr.retries": ("asr_retries", int),
    "asr.retry_delay_ms": ("asr_retry_delay_ms", int),
}


def build_config(
    config_file: str | Path | None = None,
    overrides: dict[str, object] | None = None,
    environ: dict[str, str] | None = None,
) -> PipelineConfig:
    """Merge sources by precedence: override (CLI) > env var > file > default."""
    env = os.environ if environ is None else environ
    settings: dict[str, object] = {}
    if config_file is not None:
        raw = parse_config_text(Path(config_file).read_text(encoding="utf-8"))
        for file_key, value in raw.items():
            if file_key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {file_key!r}")
            attr, convert = _CONFIG_KEYS[file_key]
            settings[attr] = convert(value)
    if env.get(ASR_ENDPOINT_ENV_VAR):
        settings["asr_endpoint"] = env[ASR_ENDPOINT_ENV_VAR]
    for attr, value in (overrides or {}).items():
        if value is not None:
            settings[attr] = value
    return PipelineConfig(**settings)


@dataclass(frozen=True)
class TurnRecord:
    input_source: str
    transcript: Transcript
    gender: GenderLabel | None
    state_before: int
    state_after: int
    actions: tuple[RobotAction, ...]
    output_wav: Path | None
    condition: Condition | None = None

    def log_lines(self) -> list[str]:
        """Action trace in the ``STATE n | COND x | ACTION ...`` format."""
        condition = self.condition if self.condition is not None else Condition.AUTO
        return [
            dialogue.log_line(self.state_after, condition, action)
            for action in self.actions
        ]


@dataclass
class GuideSession:
    """Per-visitor conversation plus the loaded model, rules and ASR client."""

    conversation: Conversation = field(default_factory=Conversation)
    model: GenderModel | None = None
    rules: tuple[qa.ResponseRule, ...] = field(default_factory=qa.default_rules)
    client: RecognitionClient | None = None
    turn_index: int = 0

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "GuideSession":
        model = None
        if config.model_path is not None:
            model = load_model(Path(config.model_path).read_bytes())
        rules = qa.default_rules()
        if config.rules_path is not None:
            rules = qa.load_rules(Path(config.rules_path).read_text(encoding="utf-8"))
        client = None
        if config.asr_endpoint:
            client = RecognitionClient(
                endpoint=config.asr_endpoint,
                retries=config.asr_retries,
                retry_delay_ms=config.asr_retry_delay_ms,
            )
        return cls(model=model, rules=rules, client=client)


def infer_condition(
    state_id: int, text: str, rules: Sequence[qa.ResponseRule]
) -> tuple[Condition, str | None] | None:
    """Map an utterance to the condition it triggers in the current state.

    Returns ``None`` when the utterance means nothing in this state.
    """
    tokens = qa.normalize(text)
    token_set = set(tokens)
    if state_id == 3:
        if tokens:
            return Condition.NAME_GIVEN, text.strip()
        return Condition.NO_NAME, None
    if state_id == 4:
        if tokens:
            return Condition.GREETING_ANSWERED, text
        return Condition.NO_GREETING, None
    if state_id in (8, 14):
        declines = ("no" in token_set and "thanks" in token_set) or (
            "nothing" in token_set
        ) or tokens == ["no"]
        if declines:
            return Condition.NOTHING_ELSE, None
        if state_id == 8:
            if "explain" in token_set:
                return Condition.EXPLAIN_REQUEST, None
            if token_set & {"dance", "dancing"}:
                return Condition.DANCE_REQUEST, None
            if token_set & {"sing", "singing", "song", "music"}:
                return Condition.SONG_REQUEST, None
            if token_set & {"picture", "photo", "pose"}:
                return Condition.PICTURE_REQUEST, None
        answer = qa.respond(rules, text)
        if answer is not None:
            return Condition.QUESTION_RECOGNIZED, answer
        return Condition.QUESTION_UNRECOGNIZED, None
    return None


def drain_pending(session: GuideSession) -> list[RobotAction]:
    """Fire automatic transitions left over from the previous turn."""
    actions: list[RobotAction] = []
    while dialogue.auto_successor(session.conversation.state_id) is not None:
        actions.extend(session.conversation.step(Condition.AUTO))
    return actions


def apply_condition(
    session: GuideSession, condition: Condition, text: str | None = None
) -> list[RobotAction]:
    """One conditioned step plus the instant follow-ups (save-name, reply)."""
    actions = session.conversation.step(condition, text)
    while session.conversation.state_id in dialogue.IMMEDIATE_AUTO_STATES:
        actions.extend(session.conversation.step(Condition.AUTO))
    return actions


def _spoken_text(actions: Sequence[RobotAction]) -> str:
    return " ".join(a.text for a in actions if a.kind is ActionKind.SPEAK and a.text)


def _maybe_synthesize(
    config: PipelineConfig, session: GuideSession, actions: Sequence[RobotAction]
) -> Path | None:
    spoken = _spoken_text(actions)
    if not spoken or config.output_dir is None:
        return None
    try:
        config.output_dir.mkdir(parents=True, exist_ok=True)
        output_wav = config.output_dir / f"turn_{session.turn_index:03d}.wav"
        write_wav_file(output_wav, synthesize(spoken))
    except Exception as exc:
        raise PipelineStageError("tts", exc) from exc
    return output_wav


def run_condition_turn(
    config: PipelineConfig,
    session: GuideSession,
    condition: Condition,
    text: str | None = None,
    label: str | None = None,
) -> TurnRecord:
    """Process a directly injected condition (REPL meta-commands)."""
    state_before = session.conversation.state_id
    try:
        actions = drain_pending(session)
        actions.extend(apply_condition(session, condition, text))
    except Exception as exc:
        raise PipelineStageError("dialogue", exc) from exc
    output_wav = _maybe_synthesize(config, session, actions)
    session.turn_index += 1
    return TurnRecord(
        input_source=label or f"<condition {condition.value}>",
        transcript=Transcript(text=""),
        gender=None,
        state_before=state_before,
        state_after=session.conversation.state_id,
        actions=tuple(actions),
        output_wav=output_wav,
        condition=condition,
    )


def run_turn(
    config: PipelineConfig,
    session: GuideSession,
    source: PcmSignal | str,
    label: str | None = None,
) -> TurnRecord:
    """Process one input (audio signal or typed text) through the full loop."""
    state_before = session.conversation.state_id

    if isinstance(source, PcmSignal):
        if session.client is None:
            raise PipelineStageError("asr", RuntimeError("no ASR endpoint configured"))
        try:
            transcript = session.client.recognize(source)
        except Exception as exc:
            raise PipelineStageError("asr", exc) from exc
        gender: GenderLabel | None = None
        if session.model is not None:
            try:
                feature = peak_of_signal(
                    source, config.band_low_hz, config.band_high_hz
                )
                gender = classify(session.model, feature)
            except Exception as exc:
                raise PipelineStageError("gender", exc) from exc
            session.conversation.context = replace(
                session.conversation.context, visitor_gender=gender
            )
        text = transcript.text
        input_source = label or "<audio>"
    else:
        text = source
        transcript = Transcript(text=text)
        gender = None
        input_source = label or "<text>"

    if not text.strip():
        return TurnRecord(
            input_source=input_source,
            transcript=transcript,
            gender=gender,
            state_before=state_before,
            state_after=state_before,
            actions=(),
            output_wav=None,
        )

    condition: Condition | None = None
    try:
        actions = drain_pending(session)
        inferred = infer_condition(
            session.conversation.state_id, text, session.rules
        )
        if inferred is not None:
            condition, payload = inferred
            actions.extend(apply_condition(session, condition, payload))
    except Exception as exc:
        raise PipelineStageError("dialogue", exc) from exc

    output_wav = _maybe_synthesize(config, session, actions)
    session.turn_index += 1
    return TurnRecord(
        input_source=input_source,
        transcript=transcript,
        gender=gender,
        state_before=state_before,
        state_after=session.conversation.state_id,
        actions=tuple(actions),
        output_wav=output_wav,
        condition=condition,
    )
