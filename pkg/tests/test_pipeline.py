import pytest

from guidebot.audio_io import read_wav_file
from guidebot.dialogue import ActionKind, Condition
from guidebot.gender import GenderLabel, save_model, train_from_peaks
from guidebot.pipeline import (
    ASR_ENDPOINT_ENV_VAR,
    GuideSession,
    PipelineConfig,
    PipelineStageError,
    build_config,
    infer_condition,
    parse_config_text,
    run_condition_turn,
    run_turn,
)
from guidebot.qa import default_rules
from guidebot.speech import (
    MockRecognitionServer,
    RecognitionClient,
    wav_passthrough_codec,
)

from conftest import TABLE_FEMALE_PEAKS, TABLE_MALE_PEAKS, tone_signal

RULES = default_rules()


def session_at_state(state_id: int, **session_kwargs) -> GuideSession:
    session = GuideSession(**session_kwargs)
    script = {
        8: [
            (Condition.PERSON, None),
            (Condition.FACE_UNRECOGNIZED, None),
            (Condition.NAME_GIVEN, "Putri"),
            (Condition.GREETING_ANSWERED, "I am fine"),
        ],
    }
    for condition, text in script.get(state_id, []):
        session.conversation.advance(condition, text)
    assert session.conversation.state_id == state_id
    return session


class TestInferCondition:
    def test_name_state(self):
        assert infer_condition(3, "Putri", RULES) == (Condition.NAME_GIVEN, "Putri")
        assert infer_condition(3, "   ", RULES) == (Condition.NO_NAME, None)

    def test_greeting_state(self):
        condition, payload = infer_condition(4, "I am fine", RULES)
        assert condition is Condition.GREETING_ANSWERED
        assert payload == "I am fine"

    def test_request_state_intents(self):
        assert infer_condition(8, "can you dance", RULES)[0] is Condition.DANCE_REQUEST
        assert infer_condition(8, "sing a song", RULES)[0] is Condition.SONG_REQUEST
        assert (
            infer_condition(8, "can you explain about yourself", RULES)[0]
            is Condition.EXPLAIN_REQUEST
        )
        assert (
            infer_condition(8, "can we take a picture with you", RULES)[0]
            is Condition.PICTURE_REQUEST
        )
        assert infer_condition(8, "no thanks", RULES)[0] is Condition.NOTHING_ELSE

    def test_request_state_question(self):
        condition, answer = infer_condition(8, "what is your name", RULES)
        assert condition is Condition.QUESTION_RECOGNIZED
        assert answer == "My name is Lumen"

    def test_request_state_unknown(self):
        condition, payload = infer_condition(8, "xylophone", RULES)
        assert condition is Condition.QUESTION_UNRECOGNIZED
        assert payload is None

    def test_anything_else_state(self):
        assert infer_condition(14, "no thanks", RULES)[0] is Condition.NOTHING_ELSE
        assert (
            infer_condition(14, "how old are you", RULES)[0]
            is Condition.QUESTION_RECOGNIZED
        )

    def test_meaningless_in_standby(self):
        assert infer_condition(1, "hello", RULES) is None


class TestTypedTurns:
    def test_name_question_in_request_state(self, tmp_path):
        config = PipelineConfig(output_dir=tmp_path)
        session = session_at_state(8)
        record = run_turn(config, session, "what is your name")
        assert record.state_before == 8
        assert record.state_after == 13
        speaks = [a.text for a in record.actions if a.kind is ActionKind.SPEAK]
        assert "My name is Lumen" in speaks
        assert record.condition is Condition.QUESTION_RECOGNIZED
        assert record.output_wav is not None and record.output_wav.exists()
        # the WAV holds the spoken answer as byte tones
        signal = read_wav_file(record.output_wav)
        assert len(signal.samples) == 4410 * len(b"My name is Lumen")

    def test_empty_input_is_noop(self):
        config = PipelineConfig()
        session = session_at_state(8)
        record = run_turn(config, session, "   ")
        assert record.state_before == record.state_after == 8
        assert record.actions == ()
        assert record.output_wav is None

    def test_pending_auto_fires_at_next_turn(self):
        config = PipelineConfig()
        session = session_at_state(8)
        run_turn(config, session, "what is your name")
        assert session.conversation.state_id == 13
        record = run_turn(config, session, "how old are you")
        # drain: 13 -> 14 (asking anything else), then the question answers
        assert record.state_after == 15
        speaks = [a.text for a in record.actions if a.kind is ActionKind.SPEAK]
        assert any("anything else" in t for t in speaks)
        assert "I am very young." in speaks

    def test_no_wav_without_output_dir(self):
        config = PipelineConfig()
        session = session_at_state(8)
        record = run_turn(config, session, "what is your name")
        assert record.output_wav is None

    def test_reproducible_records(self, tmp_path):
        config_a = PipelineConfig(output_dir=tmp_path / "a")
        config_b = PipelineConfig(output_dir=tmp_path / "b")
        record_a = run_turn(config_a, session_at_state(8), "what is your name")
        record_b = run_turn(config_b, session_at_state(8), "what is your name")
        assert record_a.actions == record_b.actions
        assert record_a.state_after == record_b.state_after
        assert (
            record_a.output_wav.read_bytes() == record_b.output_wav.read_bytes()
        )

    def test_log_lines_format(self):
        config = PipelineConfig()
        session = session_at_state(8)
        record = run_turn(config, session, "can you dance")
        lines = record.log_lines()
        assert lines and all(line.startswith("STATE 10 | COND F | ACTION ") for line in lines)


class TestAudioTurns:
    @pytest.fixture
    def dance_server(self):
        server = MockRecognitionServer()
        codec = wav_passthrough_codec()
        clip = tone_signal(623.0)
        server.prime(codec.encode(clip), "can you dance")
        with server:
            yield server, clip

    def _model(self):
        return train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)

    def test_audio_turn_recognizes_and_classifies(self, dance_server):
        server, clip = dance_server
        session = session_at_state(8, model=self._model())
        session.client = RecognitionClient(endpoint=server.endpoint)
        config = PipelineConfig()
        record = run_turn(config, session, clip, label="dance.wav")
        assert record.transcript.text == "can you dance"
        assert record.gender is GenderLabel.FEMALE
        assert any(a.kind is ActionKind.DANCE for a in record.actions)
        assert record.state_after == 10
        assert record.input_source == "dance.wav"

    def test_gender_updates_honorific(self):
        server = MockRecognitionServer()
        codec = wav_passthrough_codec()
        clip = tone_signal(623.0)
        server.prime(codec.encode(clip), "xylophone")
        with server:
            session = session_at_state(8, model=self._model())
            session.client = RecognitionClient(endpoint=server.endpoint)
            record = run_turn(PipelineConfig(), session, clip)
        assert session.conversation.context.visitor_gender is GenderLabel.FEMALE
        # the unrecognized question re-prompts with the fresh honorific
        speaks = [a.text for a in record.actions if a.kind is ActionKind.SPEAK]
        assert "what can I help you, Ma'am?" in speaks

    def test_signal_not_mutated_between_stages(self, dance_server):
        server, clip = dance_server
        before = clip.samples
        session = session_at_state(8, model=self._model())
        session.client = RecognitionClient(endpoint=server.endpoint)
        run_turn(PipelineConfig(), session, clip)
        assert clip.samples == before

    def test_audio_without_client_raises_staged_error(self):
        session = session_at_state(8)
        with pytest.raises(PipelineStageError) as excinfo:
            run_turn(PipelineConfig(), session, tone_signal(440.0, duration_s=0.1))
        assert excinfo.value.stage == "asr"
        assert "[asr]" in str(excinfo.value)

    def test_empty_transcript_is_noop(self):
        with MockRecognitionServer() as server:
            session = session_at_state(8)
            session.client = RecognitionClient(endpoint=server.endpoint)
            record = run_turn(PipelineConfig(), session, tone_signal(300.0, duration_s=0.1))
            assert record.transcript.text == ""
            assert record.state_before == record.state_after == 8
            assert record.actions == ()


class TestConditionTurns:
    def test_person_meta(self):
        session = GuideSession()
        record = run_condition_turn(PipelineConfig(), session, Condition.PERSON)
        assert record.state_after == 2
        assert record.condition is Condition.PERSON

    def test_timeout_returns_to_goodbye_then_standby(self):
        session = session_at_state(8)
        record = run_condition_turn(PipelineConfig(), session, Condition.TIMEOUT_20S)
        assert record.state_after == 6
        record = run_condition_turn(PipelineConfig(), session, Condition.PERSON)
        # drain played the goodbye auto first, then the person arrived
        assert record.state_after == 2


class TestConfig:
    def test_defaults(self):
        config = build_config(environ={})
        assert config.band_low_hz == 30.0
        assert config.band_high_hz == 3400.0
        assert config.sample_rate_hz == 44100
        assert config.asr_retries == 3
        assert config.asr_retry_delay_ms == 100

    def test_file_values(self, tmp_path):
        path = tmp_path / "guide.conf"
        path.write_text(
            "band_low_hz = 50\nband_high_hz = 4000\nasr.endpoint = http://x:1\n"
            "asr.retries = 7\nasr.retry_delay_ms = 5\n# comment\n"
        )
        config = build_config(config_file=path, environ={})
        assert config.band_low_hz == 50.0
        assert config.asr_endpoint == "http://x:1"
        assert config.asr_retries == 7
        assert config.asr_retry_delay_ms == 5

    def test_env_overrides_file(self, tmp_path):
        path = tmp_path / "guide.conf"
        path.write_text("asr.endpoint = http://file:1\n")
        config = build_config(
            config_file=path, environ={ASR_ENDPOINT_ENV_VAR: "http://env:2"}
        )
        assert config.asr_endpoint == "http://env:2"

    def test_flag_overrides_env(self, tmp_path):
        path = tmp_path / "guide.conf"
        path.write_text("asr.endpoint = http://file:1\n")
        config = build_config(
            config_file=path,
            overrides={"asr_endpoint": "http://flag:3"},
            environ={ASR_ENDPOINT_ENV_VAR: "http://env:2"},
        )
        assert config.asr_endpoint == "http://flag:3"

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "guide.conf"
        path.write_text("nonsense = 1\n")
        with pytest.raises(ValueError):
            build_config(config_file=path, environ={})

    def test_invalid_band_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig(band_low_hz=500, band_high_hz=100)

    def test_parse_config_text(self):
        values = parse_config_text("a = 1\n\n# note\nb = two words\n")
        assert values == {"a": "1", "b": "two words"}

    def test_session_from_config(self, tmp_path):
        model_path = tmp_path / "model.txt"
        model_path.write_bytes(
            save_model(train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS))
        )
        config = PipelineConfig(model_path=model_path)
        session = GuideSession.from_config(config)
        assert session.model is not None
        assert session.model.display_threshold_hz == 598
        assert session.client is None
        assert len(session.rules) == 31
