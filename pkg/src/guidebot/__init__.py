"""Audio communication toolkit for an exhibition-guide robot."""

from .audio_io import (
    MalformedContainer,
    PcmSignal,
    UnsupportedFormat,
    parse_wav,
    read_wav_file,
    write_wav,
    write_wav_file,
)
from .dialogue import (
    Condition,
    Conversation,
    DialogueState,
    Posture,
    RobotAction,
    SessionContext,
    greet_response,
    honorific,
)
from .gender import (
    EvaluationReport,
    GenderLabel,
    GenderModel,
    classify,
    evaluate,
    load_model,
    save_model,
    train,
    train_from_peaks,
)
from .pipeline import GuideSession, PipelineConfig, TurnRecord, run_turn
from .qa import ResponseRule, default_rules, normalize, respond
from .spectral import (
    EmptyBand,
    EmptySignal,
    SpectralFeature,
    Spectrum,
    extract_peak,
    fft,
    fft_complex,
    peak_of_signal,
)
from .speech import (
    CodecBoundary,
    MockRecognitionServer,
    RecognitionClient,
    RecognitionPending,
    RemoteRejection,
    Transcript,
    TransportError,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "PcmSignal",
    "parse_wav",
    "write_wav",
    "read_wav_file",
    "write_wav_file",
    "MalformedContainer",
    "UnsupportedFormat",
    "Spectrum",
    "SpectralFeature",
    "fft",
    "fft_complex",
    "extract_peak",
    "peak_of_signal",
    "EmptySignal",
    "EmptyBand",
    "GenderLabel",
    "GenderModel",
    "EvaluationReport",
    "train",
    "train_from_peaks",
    "classify",
    "evaluate",
    "save_model",
    "load_model",
    "ResponseRule",
    "normalize",
    "respond",
    "default_rules",
    "Condition",
    "Conversation",
    "DialogueState",
    "SessionContext",
    "RobotAction",
    "Posture",
    "greet_response",
    "honorific",
    "Transcript",
    "CodecBoundary",
    "RecognitionClient",
    "MockRecognitionServer",
    "TransportError",
    "RecognitionPending",
    "RemoteRejection",
    "synthesize",
    "PipelineConfig",
    "GuideSession",
    "TurnRecord",
    "run_turn",
]
