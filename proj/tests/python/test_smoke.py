import math

import numpy as np
import pytest

import cryfl


def test_power_spectrum_matches_numpy():
    rng = np.random.default_rng(0)
    frame = rng.uniform(-1, 1, 400)
    got = np.array(cryfl.power_spectrum(frame.tolist()))
    want = np.abs(np.fft.rfft(frame, 512)) ** 2
    assert got.shape == want.shape
    assert np.max(np.abs(got - want)) <= 1e-9 * want.max()


def test_filter_design_and_mfcc():
    sections = cryfl.design_butterworth_bandpass(cryfl.FilterSpec(100.0, 4000.0, 4), 16000)
    assert len(sections) == 4
    assert 20 * math.log10(cryfl.cascade_magnitude(sections, 50.0, 16000)) <= -20.0

    t = np.arange(16000) / 16000.0
    clip = cryfl.AudioClip((0.5 * np.sin(2 * np.pi * 440.0 * t)).tolist(), 16000)
    assert len(cryfl.mfcc(clip)) == 40
    assert cryfl.resample(clip, 8000).sample_rate_hz == 8000
    assert cryfl.tanh_distortion(cryfl.AudioClip([0.5], 16000), 4.0).samples[0] == pytest.approx(math.tanh(2.0))


def test_svm_and_aggregate():
    w = cryfl.SvmModel([1.0, 0.0, 0.0], 0.0)
    assert cryfl.hinge_loss(w, [0.5, 0.0], 1) == 0.5
    assert cryfl.predict(cryfl.SvmModel.zeros(2), [1.0, 2.0]) == (1, 0.0)
    assert cryfl.aggregate([([0.0], 1), ([4.0], 3)]) == [3.0]


def test_federated_training_on_synthetic_features():
    cfg = cryfl.SynthConfig()
    cfg.n_normal = 20
    cfg.n_asphyxia = 20
    cfg.seed = 1
    data = [(cryfl.mfcc(clip), label) for clip, label, _ in cryfl.generate_synthetic_corpus(cfg)]

    fed = cryfl.FedConfig()
    fed.num_silos = 4
    fed.rounds = 10
    fed.seed = 2
    model, history = cryfl.run_federated_training(data, fed)
    assert len(history) == 10
    assert history[-1].avg_train_accuracy >= 0.95

    preds = [cryfl.predict(model, x)[0] for x, _ in data]
    report = cryfl.metrics(preds, [y for _, y in data])
    assert report.uar == pytest.approx((report.sensitivity + report.specificity) / 2)


def test_errors_surface_as_value_errors():
    with pytest.raises(cryfl.CryflError):
        cryfl.tanh_distortion(cryfl.AudioClip([0.1], 16000), 0.0)
    with pytest.raises(ValueError, match="InvalidFilterSpec"):
        cryfl.design_butterworth_bandpass(cryfl.FilterSpec(100.0, 9000.0, 4), 16000)
