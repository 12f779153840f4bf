"""Command-line interface.

Subcommands wrap one library operation each: ``train``, ``identify``,
``fft`` and ``evaluate`` cover the gender-identification workflow (with
optional TSV reports and matplotlib figures), ``transcribe``/``say`` cover
the speech services, ``converse`` runs the interactive conversation loop,
and ``serve-mock`` hosts the recognition mock server.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, dialogue, gender, pipeline, reporting, spectral
from .audio_io import read_wav_file, write_wav_file
from .dialogue import Condition
from .pipeline import GuideSession, PipelineConfig, PipelineStageError, build_config
from .speech import MockRecognitionServer, fingerprint, synthesize, wav_passthrough_codec


def _add_band_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--band-low", type=float, default=None, help="band lower edge in Hz")
    parser.add_argument("--band-high", type=float, default=None, help="band upper edge in Hz")


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides: dict[str, object] = {}
    if getattr(args, "band_low", None) is not None:
        overrides["band_low_hz"] = args.band_low
    if getattr(args, "band_high", None) is not None:
        overrides["band_high_hz"] = args.band_high
    if getattr(args, "model", None) is not None:
        overrides["model_path"] = Path(args.model)
    if getattr(args, "rules", None) is not None:
        overrides["rules_path"] = Path(args.rules)
    if getattr(args, "endpoint", None) is not None:
        overrides["asr_endpoint"] = args.endpoint
    if getattr(args, "out_dir", None) is not None:
        overrides["output_dir"] = Path(args.out_dir)
    return build_config(config_file=args.config, overrides=overrides)


def _cmd_train(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    band = (config.band_low_hz, config.band_high_hz)
    male = [read_wav_file(p) for p in args.male]
    female = [read_wav_file(p) for p in args.female]
    model = gender.train(male, female, band)
    Path(args.output).write_bytes(gender.save_model(model))
    print(f"threshold: {model.display_threshold_hz} Hz")
    print(f"model written to {args.output}")
    if args.plot:
        reporting.plot_training_peaks(model, args.plot)
        print(f"figure written to {args.plot}")
    return 0


def _load_model_file(path: str | Path) -> gender.GenderModel:
    return gender.load_model(Path(path).read_bytes())


def _cmd_identify(args: argparse.Namespace) -> int:
    model = _load_model_file(args.model)
    signal = read_wav_file(args.wav)
    feature = spectral.peak_of_signal(signal, model.band[0], model.band[1])
    label = gender.classify(model, feature)
    print(label.value)
    if args.verbose:
        print(
            f"peak: {feature.peak_frequency_hz:.1f} Hz, "
            f"threshold: {model.display_threshold_hz} Hz"
        )
    return 0


def _cmd_fft(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    signal = read_wav_file(args.wav)
    spectrum = spectral.fft(signal)
    feature = spectral.extract_peak(
        spectrum, config.band_low_hz, config.band_high_hz
    )
    print(
        f"fft size: {spectrum.fft_size}, bin width: {spectrum.bin_width_hz:.4f} Hz"
    )
    print(
        f"peak: {feature.peak_frequency_hz:.1f} Hz "
        f"(magnitude {feature.peak_magnitude:.1f}, "
        f"band [{feature.band_low_hz:.0f}, {feature.band_high_hz:.0f}] Hz)"
    )
    if args.output:
        reporting.write_spectrum_tsv(spectrum, args.output)
        print(f"spectrum written to {args.output}")
    if args.plot:
        reporting.plot_spectrum(
            spectrum, args.plot, peak=feature, title=Path(args.wav).name
        )
        print(f"figure written to {args.plot}")
    return 0


def _parse_manifest(path: str | Path) -> list[tuple[str, gender.GenderLabel]]:
    entries: list[tuple[str, gender.GenderLabel]] = []
    base = Path(path).parent
    for lineno, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.strip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        wav_path, sep, expected = line.partition("\t")
        if not sep:
            raise ValueError(f"manifest line {lineno}: expected 'path<TAB>gender'")
        try:
            label = gender.GenderLabel(expected.strip().lower())
        except ValueError as exc:
            raise ValueError(
                f"manifest line {lineno}: unknown gender {expected!r}"
            ) from exc
        resolved = Path(wav_path.strip())
        if not resolved.is_absolute():
            resolved = base / resolved
        entries.append((str(resolved), label))
    return entries


def _cmd_evaluate(args: argparse.Namespace) -> int:
    model = _load_model_file(args.model)
    entries = _parse_manifest(args.labeled)
    labeled = []
    rows = []
    for wav_path, expected in entries:
        signal = read_wav_file(wav_path)
        feature = spectral.peak_of_signal(signal, model.band[0], model.band[1])
        labeled.append((feature, expected))
        rows.append(
            (wav_path, feature.peak_frequency_hz, expected, gender.classify(model, feature))
        )
    report = gender.evaluate(model, labeled)
    print(f"accuracy: {report.accuracy_percent:.1f}%")
    if args.report:
        reporting.write_evaluation_tsv(rows, report.accuracy_percent, args.report)
        print(f"report written to {args.report}")
    if args.plot:
        reporting.plot_evaluation(rows, model, report.accuracy_percent, args.plot)
        print(f"figure written to {args.plot}")
    return 0


def _cmd_transcribe(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    session = GuideSession.from_config(config)
    if session.client is None:
        print("error: [asr] no endpoint configured "
              "(use --endpoint, GUIDE_ASR_ENDPOINT, or asr.endpoint)", file=sys.stderr)
        return 1
    signal = read_wav_file(args.wav)
    transcript = session.client.recognize(signal)
    print(f"language : {session.client.language_tag}")
    print(f"recognized words : {transcript.text}")
    return 0


def _cmd_say(args: argparse.Namespace) -> int:
    signal = synthesize(args.text)
    write_wav_file(args.output, signal)
    print(
        f"wrote {args.output}: {len(signal.samples)} samples "
        f"({signal.duration_seconds:.2f} s)"
    )
    return 0


def _print_actions(record) -> None:
    for line in record.log_lines():
        print(line)
    if record.output_wav is not None:
        print(f"(speech written to {record.output_wav})")


def _cmd_converse(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    session = GuideSession.from_config(config)
    print("conversation ready. meta-commands: /person /face <name|unknown> /timeout /quit")
    print(f"STATE {session.conversation.state_id} | waiting")
    while True:
        try:
            line = input("> ")
        except EOFError:
            break
        line = line.strip()
        if line == "/quit":
            break
        try:
            if line.startswith("/"):
                record = _handle_meta(config, session, line)
                if record is None:
                    continue
            else:
                record = pipeline.run_turn(config, session, line)
        except PipelineStageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            continue
        _print_actions(record)
        print(f"STATE {record.state_after} | waiting")
    print("bye.")
    return 0


def _handle_meta(config, session, line):
    parts = line.split(maxsplit=1)
    command = parts[0]
    argument = parts[1].strip() if len(parts) > 1 else ""
    if command == "/person":
        return pipeline.run_condition_turn(config, session, Condition.PERSON)
    if command == "/face":
        if argument and argument.lower() != "unknown":
            return pipeline.run_condition_turn(
                config, session, Condition.FACE_RECOGNIZED, text=argument
            )
        return pipeline.run_condition_turn(
            config, session, Condition.FACE_UNRECOGNIZED
        )
    if command == "/timeout":
        session.conversation.context = replace(
            session.conversation.context,
            seconds_since_face_seen=dialogue.TIMEOUT_SECONDS,
        )
        return pipeline.run_condition_turn(config, session, Condition.TIMEOUT_20S)
    print(f"unknown meta-command {command}", file=sys.stderr)
    return None


def _cmd_serve_mock(args: argparse.Namespace) -> int:
    mapping: dict[str, str] = {}
    if args.map:
        for lineno, raw in enumerate(
            Path(args.map).read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not raw.strip() or raw.startswith("#"):
                continue
            wav_path, sep, text = raw.partition("\t")
            if not sep:
                raise ValueError(f"map line {lineno}: expected 'path<TAB>transcript'")
            codec = wav_passthrough_codec()
            payload = codec.encode(read_wav_file(wav_path.strip()))
            mapping[fingerprint(payload)] = text.strip()
    server = MockRecognitionServer(
        mapping=mapping, port=args.port, pending_polls=args.pending
    )
    print(f"mock recognition server listening on {server.endpoint}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="guidebot",
        description="Audio toolkit for an exhibition-guide robot.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", default=None, help="key = value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a gender threshold model from WAVs")
    p_train.add_argument("--male", nargs="+", required=True, metavar="WAV")
    p_train.add_argument("--female", nargs="+", required=True, metavar="WAV")
    p_train.add_argument("-o", "--output", required=True, help="model file to write")
    p_train.add_argument("--plot", default=None, help="write a training figure (PNG)")
    _add_band_flags(p_train)
    p_train.set_defaults(handler=_cmd_train)

    p_id = sub.add_parser("identify", help="classify one WAV against a model")
    p_id.add_argument("--model", required=True)
    p_id.add_argument("wav")
    p_id.add_argument("-v", "--verbose", action="store_true")
    p_id.set_defaults(handler=_cmd_identify)

    p_fft = sub.add_parser("fft", help="spectrum and peak of a WAV")
    p_fft.add_argument("wav")
    p_fft.add_argument("-o", "--output", default=None, help="write spectrum TSV")
    p_fft.add_argument("--plot", default=None, help="write a spectrum figure (PNG)")
    _add_band_flags(p_fft)
    p_fft.set_defaults(handler=_cmd_fft)

    p_eval = sub.add_parser("evaluate", help="accuracy over a labeled manifest")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--labeled", required=True, help="TSV: path<TAB>expected gender")
    p_eval.add_argument("--report", default=None, help="write per-sample TSV")
    p_eval.add_argument("--plot", default=None, help="write an outcome figure (PNG)")
    p_eval.set_defaults(handler=_cmd_evaluate)

    p_tr = sub.add_parser("transcribe", help="recognize a WAV via the ASR endpoint")
    p_tr.add_argument("wav")
    p_tr.add_argument("--endpoint", default=None)
    p_tr.set_defaults(handler=_cmd_transcribe)

    p_say = sub.add_parser("say", help="synthesize text to a WAV")
    p_say.add_argument("text")
    p_say.add_argument("-o", "--output", required=True)
    p_say.set_defaults(handler=_cmd_say)

    p_conv = sub.add_parser("converse", help="interactive conversation loop")
    p_conv.add_argument("--model", default=None)
    p_conv.add_argument("--rules", default=None)
    p_conv.add_argument("--endpoint", default=None)
    p_conv.add_argument("--out-dir", default=None, help="directory for spoken WAVs")
    p_conv.set_defaults(handler=_cmd_converse)

    p_mock = sub.add_parser("serve-mock", help="run the mock recognition server")
    p_mock.add_argument("--port", type=int, default=0)
    p_mock.add_argument("--map", default=None, help="TSV: wav path<TAB>transcript")
    p_mock.add_argument(
        "--pending", type=int, default=0, help="202 responses before each result"
    )
    p_mock.set_defaults(handler=_cmd_serve_mock)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except PipelineStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        stage = getattr(exc, "stage", args.command)
        print(f"error: [{stage}] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
