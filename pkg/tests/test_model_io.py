import numpy as np
import pytest

from tossup.buzzer import MlpBuzzerConfig, ThresholdBuzzer, init_mlp_buzzer
from tossup.guesser import IrGuesser, train_dan, train_linear
from tossup.guesser.dan import DanConfig
from tossup.guesser.linear import LinearConfig
from tossup.model_io import load_model, save_model

TRAIN = [
    ("mozart opera flute magic", "The_Magic_Flute"),
    ("magic flute tamino papageno", "The_Magic_Flute"),
    ("verdi aida egypt opera", "Aida"),
    ("aida radames princess", "Aida"),
]


class TestRoundTrips:
    def test_bm25(self, tmp_path):
        model = IrGuesser.train(TRAIN)
        path = tmp_path / "ir.model"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.guess("mozart flute", 2) == model.guess("mozart flute", 2)

    def test_linear(self, tmp_path):
        model = train_linear(TRAIN, LinearConfig(n_buckets=2**10, epochs=10, seed=0))
        path = tmp_path / "linear.model"
        save_model(model, path, config={"epochs": 10})
        loaded = load_model(path)
        assert np.array_equal(loaded.weights, model.weights)
        assert loaded.guess("verdi aida", 2) == model.guess("verdi aida", 2)

    def test_dan(self, tmp_path):
        config = DanConfig(embedding_dim=8, hidden_dim=8, n_layers=2, epochs=2,
                           batch_size=2, seed=0)
        model = train_dan(TRAIN, config)
        path = tmp_path / "dan.model"
        save_model(model, path, config=vars(config))
        loaded = load_model(path)
        for name in model.params:
            assert np.array_equal(loaded.params[name], model.params[name]), name
        assert loaded.guess("mozart flute", 2) == model.guess("mozart flute", 2)

    def test_mlp_buzzer(self, tmp_path):
        model = init_mlp_buzzer(MlpBuzzerConfig(hidden_dim=10, seed=4))
        model.mu = np.linspace(0, 1, 17)
        model.sigma = np.linspace(1, 2, 17)
        path = tmp_path / "buzzer.model"
        save_model(model, path)
        loaded = load_model(path)
        features = np.random.default_rng(0).normal(size=17)
        assert loaded.score(features) == model.score(features)

    def test_threshold_buzzer(self, tmp_path):
        path = tmp_path / "threshold.model"
        save_model(ThresholdBuzzer(threshold=0.37), path)
        assert load_model(path).threshold == 0.37


class TestContainerFormat:
    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.model"
        path.write_bytes(b"not a container at all")
        with pytest.raises(ValueError, match="magic"):
            load_model(path)

    def test_header_records_kind_and_layout(self, tmp_path):
        import json
        import struct

        model = init_mlp_buzzer(MlpBuzzerConfig(seed=0))
        path = tmp_path / "buzzer.model"
        save_model(model, path)
        blob = path.read_bytes()
        header_len = struct.unpack("<I", blob[8:12])[0]
        header = json.loads(blob[12 : 12 + header_len])
        assert header["kind"] == "buzzer_mlp"
        assert header["meta"]["feature_layout"] == "v1-17dim"
        assert {a["name"] for a in header["arrays"]} == {"mu", "sigma", "W1", "b1", "W2", "b2"}
