"""
Training Loop Tests
===================

Test Verification Strategy
-------------------------
- Verify config parsing, bundled config lookup and override precedence
- Verify the best-snapshot rule and the validation schedule on tiny runs
- Verify that two runs with the same seed produce identical models
- Verify that divergence writes a diagnostic snapshot
"""

import json

import numpy as np
import pytest

from gridseg.exceptions import ConfigError, NumericError
from gridseg.nn.init import build_model
from gridseg.services import training_service
from gridseg.services.dataset_service import read_manifest
from gridseg.services.training_service import (
    BestSnapshot,
    TrainConfig,
    load_train_config,
    parse_train_config,
    train,
    write_diagnostics,
    write_training_log,
)
from gridseg.utils.io import read_csv


def tiny_config(**overrides):
    values = dict(filters=2, blocks=1, granularities=(24,), batch_size=2,
                  max_iterations=3, validation_interval=2, seed=0)
    values.update(overrides)
    return TrainConfig(**values)


class TestConfig:
    def test_parse(self):
        values = parse_train_config("filters = 8\ngranularities = 24, 48\nflip = no  # no augmentation\n")
        assert values == {'filters': 8, 'granularities': (24, 48), 'flip': False}

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match='unknown key'):
            parse_train_config("dropout = 0.5\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            parse_train_config("filters = many\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_train_config("filters 8\n")

    def test_bundled_configs(self):
        toy = load_train_config('toy')
        assert toy.filters == 16 and toy.max_iterations == 5000
        assert load_train_config('full').filters == 32

    def test_overrides_win(self, temp_dir):
        path = temp_dir / 'run.conf'
        path.write_text("filters = 8\nseed = 3\n")
        config = load_train_config(str(path), filters=4, seed=None)
        assert config.filters == 4 and config.seed == 3

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="bundled: full, toy"):
            load_train_config('no-such-config')

    def test_validation(self):
        with pytest.raises(ConfigError):
            TrainConfig(batch_size=0)
        with pytest.raises(ConfigError):
            TrainConfig(encoding='slic')

    def test_deterministic_forces_one_thread(self):
        assert TrainConfig(threads=4, deterministic=True).worker_threads == 1
        assert TrainConfig(threads=4).worker_threads == 4


def test_best_snapshot():
    model = build_model(2, 0, seed=0)
    best = BestSnapshot()
    assert best.offer(0, 0.7, model)
    model.params['conv_in.bias'][...] = 0.25
    assert best.offer(1, 0.4, model)
    model.params['conv_in.bias'][...] = 0.5
    assert not best.offer(2, 0.5, model)
    assert best.iteration == 1 and best.loss == 0.4
    np.testing.assert_array_equal(best.state['conv_in.bias'], 0.25)


class TestTrain:
    def test_validation_schedule(self, tiny_dataset):
        manifest = read_manifest(tiny_dataset)
        result = train(tiny_config(), manifest, read_manifest(tiny_dataset, 'validation'))
        assert [row.iteration for row in result.log] == [0, 2, 3]
        assert result.log[0].train_loss is None
        assert result.log[0].is_best
        assert result.best_iteration in (0, 2, 3)
        assert result.best_val_loss == min(row.val_loss for row in result.log)
        assert result.train_samples == 3 and result.val_samples == 3

    def test_same_seed_same_model(self, tiny_dataset):
        manifest = read_manifest(tiny_dataset)
        a = train(tiny_config(), manifest, manifest)
        b = train(tiny_config(), manifest, manifest)
        for name in a.model.params:
            np.testing.assert_array_equal(a.model.params[name], b.model.params[name])
        assert [r.val_loss for r in a.log] == [r.val_loss for r in b.log]

    def test_zero_iterations(self, tiny_dataset):
        manifest = read_manifest(tiny_dataset)
        result = train(tiny_config(max_iterations=0), manifest, manifest)
        assert [row.iteration for row in result.log] == [0]
        assert result.best_iteration == 0

    def test_log_csv(self, tiny_dataset, temp_dir):
        manifest = read_manifest(tiny_dataset)
        result = train(tiny_config(), manifest, manifest)
        write_training_log(result.log, temp_dir / 'log.csv')
        rows = read_csv(temp_dir / 'log.csv')
        assert [r['iteration'] for r in rows] == ['0', '2', '3']
        assert rows[0]['train_loss'] == ''
        assert set(rows[0]) == {'iteration', 'train_loss', 'val_loss', 'is_best'}

    def test_divergence_writes_diagnostics(self, tiny_dataset, temp_dir, monkeypatch):
        def explode(state, params, grads):
            raise NumericError("Non-finite gradient")

        monkeypatch.setattr(training_service, 'nadam_step', explode)
        manifest = read_manifest(tiny_dataset)
        with pytest.raises(NumericError):
            train(tiny_config(), manifest, manifest, diagnostics_dir=temp_dir / 'diag')
        report = json.loads((temp_dir / 'diag' / 'diverged-1.json').read_text())
        assert report['iteration'] == 1
        assert (temp_dir / 'diag' / 'diverged-1.gseg').exists()


def test_write_diagnostics_lists_bad_parameters(temp_dir):
    model = build_model(2, 0, seed=0)
    model.params['conv_out.bias'][...] = np.nan
    path = write_diagnostics(model, temp_dir, 7, tiny_config(), NumericError("boom"))
    report = json.loads(path.read_text())
    assert report['nonfinite_parameters'] == ['conv_out.bias']
    assert report['config']['filters'] == 2
