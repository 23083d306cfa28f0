import json

import numpy as np
import pytest

from svmcompare.estimators import SVMCompare, SVMRank, SVMRank2
from svmcompare.persist import load_model, model_tag, save_model

from conftest import random_dataset


def fitted(cls, seed=0):
    d = random_dataset(np.random.default_rng(seed), n=20, p=2)
    model = cls(C=2.0, kernel="gaussian", gamma=0.3)
    return model.fit(d.x, d.x_prime, d.y)


class TestRoundTrip:
    @pytest.mark.parametrize("cls", [SVMCompare, SVMRank, SVMRank2])
    def test_predictions_survive_save_load(self, cls, tmp_path):
        model = fitted(cls)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert type(loaded) is cls
        probe = random_dataset(np.random.default_rng(1), n=9, p=2)
        assert np.array_equal(
            model.rank_diffs(probe.x, probe.x_prime),
            loaded.rank_diffs(probe.x, probe.x_prime),
        )
        assert np.array_equal(
            model.predict(probe.x, probe.x_prime),
            loaded.predict(probe.x, probe.x_prime),
        )

    def test_arrays_restored_bitwise(self, tmp_path):
        model = fitted(SVMCompare)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert np.array_equal(model.sv_v_, loaded.sv_v_)
        assert np.array_equal(model.sv_x_, loaded.sv_x_)
        assert loaded.beta_ == model.beta_
        assert np.array_equal(model.scaler_.mean, loaded.scaler_.mean)

    def test_threshold_restored(self, tmp_path):
        model = fitted(SVMRank)
        path = tmp_path / "model.json"
        save_model(model, path)
        assert load_model(path).tau_hat_ == model.tau_hat_

    def test_unscaled_model_round_trips(self, tmp_path):
        d = random_dataset(np.random.default_rng(2), n=16, p=2)
        model = SVMCompare(scale=False).fit(d.x, d.x_prime, d.y)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.scaler_ is None
        probe = random_dataset(np.random.default_rng(3), n=5, p=2)
        assert np.array_equal(
            model.rank_diffs(probe.x, probe.x_prime),
            loaded.rank_diffs(probe.x, probe.x_prime),
        )

    def test_grid_cell_metadata_preserved(self, tmp_path):
        model = fitted(SVMRank2)
        model.grid_cell_ = {"C": 2.0, "gamma": 0.3}
        path = tmp_path / "model.json"
        save_model(model, path)
        assert load_model(path).grid_cell_ == {"C": 2.0, "gamma": 0.3}


class TestErrors:
    def test_unfitted_model_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="unfitted"):
            save_model(SVMCompare(), tmp_path / "model.json")

    def test_wrong_format_tag(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(fitted(SVMRank), path)
        blob = json.loads(path.read_text())
        blob["format"] = "something-else"
        path.write_text(json.dumps(blob))
        with pytest.raises(ValueError, match="format"):
            load_model(path)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(fitted(SVMRank), path)
        blob = json.loads(path.read_text())
        blob["version"] = 99
        path.write_text(json.dumps(blob))
        with pytest.raises(ValueError, match="version"):
            load_model(path)

    def test_unknown_model_kind(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(fitted(SVMRank), path)
        blob = json.loads(path.read_text())
        blob["model"] = "mystery"
        path.write_text(json.dumps(blob))
        with pytest.raises(ValueError, match="model"):
            load_model(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_model(tmp_path / "missing.json")


class TestModelTag:
    def test_tags(self):
        assert model_tag(SVMCompare()) == "compare"
        assert model_tag(SVMRank()) == "rank"
        assert model_tag(SVMRank2()) == "rank2"
