import pytest

from guidebot.gender import (
    EmptyClass,
    GenderLabel,
    MalformedModelFile,
    classify,
    evaluate,
    load_model,
    save_model,
    train,
    train_from_peaks,
)
from guidebot.spectral import SpectralFeature

from conftest import TABLE_FEMALE_PEAKS, TABLE_MALE_PEAKS, tone_signal


def feature(peak_hz: float) -> SpectralFeature:
    return SpectralFeature(
        peak_frequency_hz=peak_hz, peak_magnitude=1.0, band_low_hz=30, band_high_hz=3400
    )


class TestTraining:
    def test_reference_peak_table(self):
        model = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        assert model.threshold_hz == pytest.approx(598.3, abs=0.05)
        assert model.display_threshold_hz == 598

    def test_two_point_midpoint(self):
        assert train_from_peaks([100], [300]).threshold_hz == 200.0

    def test_hand_computed_pair(self):
        assert train_from_peaks([77], [634]).threshold_hz == 355.5

    def test_symmetric_in_class_order(self):
        forward = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        swapped = train_from_peaks(TABLE_FEMALE_PEAKS, TABLE_MALE_PEAKS)
        assert forward.threshold_hz == swapped.threshold_hz

    def test_degenerate_means_warn(self):
        with pytest.warns(UserWarning):
            model = train_from_peaks([500], [500])
        assert model.threshold_hz == 500.0

    def test_empty_class_rejected(self):
        with pytest.raises(EmptyClass):
            train_from_peaks([], [300])
        with pytest.raises(EmptyClass):
            train_from_peaks([300], [])

    def test_monotone_in_female_shift(self):
        base = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        delta = 10.0
        shifted = train_from_peaks(
            TABLE_MALE_PEAKS, [f + delta for f in TABLE_FEMALE_PEAKS]
        )
        assert shifted.threshold_hz == pytest.approx(
            base.threshold_hz + delta / 2, rel=1e-12
        )

    def test_deterministic(self):
        a = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        b = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        assert a == b

    def test_train_from_signals_matches_tones(self):
        male = [tone_signal(f, duration_s=0.25) for f in (400.0, 420.0)]
        female = [tone_signal(f, duration_s=0.25) for f in (600.0, 620.0)]
        model = train(male, female, band=(30.0, 3400.0))
        # tone peaks are bin-quantized, so allow one bin width (~2.7 Hz at 16384)
        assert model.threshold_hz == pytest.approx(510.0, abs=3.0)


class TestClassify:
    def test_above_threshold_is_female(self):
        model = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        assert classify(model, feature(623.0)) is GenderLabel.FEMALE

    def test_below_threshold_is_male(self):
        model = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        assert classify(model, feature(512.0)) is GenderLabel.MALE

    def test_boundary_is_male(self):
        model = train_from_peaks([100], [300])
        assert classify(model, feature(200.0)) is GenderLabel.MALE

    def test_amplitude_invariant_end_to_end(self):
        from guidebot.spectral import peak_of_signal

        model = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        loud = tone_signal(623.0, duration_s=0.5, amplitude=16384)
        quiet = tone_signal(623.0, duration_s=0.5, amplitude=8192)
        assert classify(model, peak_of_signal(loud)) == classify(
            model, peak_of_signal(quiet)
        )


class TestEvaluate:
    def test_eight_of_ten(self):
        model = train_from_peaks([100], [300])
        labeled = [(feature(50.0), GenderLabel.MALE)] * 4
        labeled += [(feature(400.0), GenderLabel.FEMALE)] * 4
        labeled += [(feature(400.0), GenderLabel.MALE)]  # predicted female, wrong
        labeled += [(feature(50.0), GenderLabel.FEMALE)]  # predicted male, wrong
        report = evaluate(model, labeled)
        assert report.accuracy_percent == 80.0

    def test_all_correct(self):
        model = train_from_peaks([100], [300])
        report = evaluate(model, [(feature(400.0), GenderLabel.FEMALE)])
        assert report.accuracy_percent == 100.0

    def test_reference_table_self_classification(self):
        model = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        labeled = [(feature(f), GenderLabel.MALE) for f in TABLE_MALE_PEAKS]
        labeled += [(feature(f), GenderLabel.FEMALE) for f in TABLE_FEMALE_PEAKS]
        report = evaluate(model, labeled)
        assert report.accuracy_percent == 70.0
        # the three misclassified peaks: male 698, male 628, female 576
        wrong = [
            expected
            for expected, predicted in report.per_sample
            if expected != predicted
        ]
        assert wrong.count(GenderLabel.MALE) == 2
        assert wrong.count(GenderLabel.FEMALE) == 1

    def test_accuracy_matches_brute_count(self):
        model = train_from_peaks([100], [300])
        labeled = [
            (feature(f), label)
            for f, label in [
                (50, GenderLabel.MALE),
                (250, GenderLabel.FEMALE),
                (150, GenderLabel.FEMALE),
                (350, GenderLabel.FEMALE),
            ]
        ]
        report = evaluate(model, labeled)
        correct = 0
        for f, label in labeled:
            predicted = (
                GenderLabel.FEMALE
                if f.peak_frequency_hz > model.threshold_hz
                else GenderLabel.MALE
            )
            if predicted == label:
                correct += 1
        assert report.accuracy_percent == 100.0 * correct / len(labeled)

    def test_empty_rejected(self):
        model = train_from_peaks([100], [300])
        with pytest.raises(ValueError):
            evaluate(model, [])


class TestModelFile:
    def test_round_trip(self):
        model = train_from_peaks(TABLE_MALE_PEAKS, TABLE_FEMALE_PEAKS)
        assert load_model(save_model(model)) == model

    def test_truncated_rejected(self):
        data = save_model(train_from_peaks([100], [300]))
        with pytest.raises(MalformedModelFile):
            load_model(data[: len(data) // 2])

    def test_inconsistent_threshold_rejected(self):
        data = save_model(train_from_peaks([100], [300]))
        tampered = data.replace(b"threshold_hz = 200.0", b"threshold_hz = 777.0")
        assert tampered != data
        with pytest.raises(MalformedModelFile):
            load_model(tampered)

    def test_unknown_key_rejected(self):
        data = save_model(train_from_peaks([100], [300])) + b"extra = 1\n"
        with pytest.raises(MalformedModelFile):
            load_model(data)

    def test_missing_key_rejected(self):
        text = save_model(train_from_peaks([100], [300])).decode()
        without_band = "\n".join(
            line for line in text.splitlines() if not line.startswith("band_low")
        )
        with pytest.raises(MalformedModelFile):
            load_model(without_band.encode())

    def test_non_numeric_rejected(self):
        data = save_model(train_from_peaks([100], [300]))
        with pytest.raises(MalformedModelFile):
            load_model(data.replace(b"200.0", b"abc"))

    def test_not_text_rejected(self):
        with pytest.raises(MalformedModelFile):
            load_model(b"\xff\xfe\x00\x01")
