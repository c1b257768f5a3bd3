"""RunConfig: key=value ayrıştırma, öncelik ve doğrulama."""

import pytest

import os

from config import RunConfig, parse_values, resolve_threads
from errors import ConfigError


class TestRunConfigText:
    def test_defaults_follow_training_schedule(self):
        rc = RunConfig()
        assert rc.pretrain_lr == 3e-3
        assert rc.pretrain_epochs == 450
        assert rc.lr_decay_every == 200 and rc.lr_decay_factor == 0.1
        assert rc.finetune_lr == 1e-5 and rc.finetune_epochs == 20
        assert rc.batch_size == 1024 and rc.gamma == 0.1

    def test_text_round_trip(self):
        rc = RunConfig().with_overrides(k=4, gamma=0.25, func_base_freqs="0.01,0.02", layer_widths="16,32")
        again = RunConfig.from_text(rc.to_text())
        assert again == rc
        assert again.func_base_freqs == (0.01, 0.02)
        assert again.layer_widths == (16, 32)

    def test_to_text_is_sorted_key_value(self):
        lines = RunConfig().to_text().splitlines()
        assert lines == sorted(lines)
        assert "pretrain_lr=0.003" in lines
        assert "batch_size=1024" in lines

    def test_comments_and_blank_lines_are_skipped(self):
        rc = RunConfig.from_text("# yorum\n\nseed = 9\n")
        assert rc.seed == 9

    def test_line_without_equals_is_rejected(self):
        with pytest.raises(ConfigError, match="key=value"):
            RunConfig.from_text("seed 9\n")

    def test_unknown_key_is_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            RunConfig.from_text("learning_rate=0.1\n")

    def test_bad_value_is_rejected(self):
        with pytest.raises(ConfigError, match="invalid value"):
            RunConfig().with_overrides(seed="abc")

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig.load(tmp_path / "nope.txt")

    def test_save_and_load(self, tmp_path):
        rc = RunConfig().with_overrides(seed=5, preset="easy")
        rc.save(tmp_path / "config.txt")
        assert RunConfig.load(tmp_path / "config.txt") == rc


class TestOverrides:
    def test_none_values_are_ignored(self):
        rc = RunConfig().with_overrides(seed=None, k=3)
        assert rc.seed == 0 and rc.k == 3

    def test_dashes_map_to_underscores(self):
        assert RunConfig().with_overrides(**{"batch-size": "64"}).batch_size == 64

    def test_file_then_flags_precedence(self):
        from_file = RunConfig.from_text("seed=3\ngamma=0.5\n")
        final = from_file.with_overrides(gamma=0.0)
        assert final.seed == 3 and final.gamma == 0.0


class TestValidate:
    @pytest.mark.parametrize("key,value", [
        ("pretrain_lr", 0.0),
        ("finetune_lr", -1e-5),
        ("batch_size", 0),
        ("gamma", -0.1),
        ("geo_separation", 0.0),
        ("geo_jitter", -1.0),
        ("preset", "hard"),
        ("n_points", 1),
        ("k", -2),
    ])
    def test_invalid_values(self, key, value):
        with pytest.raises(ConfigError):
            RunConfig().with_overrides(**{key: value}).validate()

    def test_defaults_are_valid(self):
        assert RunConfig().validate() == RunConfig()

    def test_zero_noise_is_allowed(self):
        RunConfig().with_overrides(geo_jitter=0.0, signal_noise_sd=0.0).validate()


class TestEnvironment:
    def test_zero_threads_means_all_cores(self):
        assert resolve_threads("0") == (os.cpu_count() or 1)

    def test_explicit_thread_count(self):
        assert resolve_threads("3") == 3

    @pytest.mark.parametrize("value", ["abc", "1.5", "", "-2"])
    def test_bad_thread_values(self, value):
        with pytest.raises(ConfigError, match="DMVFC_THREADS"):
            resolve_threads(value)


class TestParseValues:
    def test_keys_are_normalized_and_raw(self):
        assert parse_values("# yorum\nbatch-size = 64\npreset=easy\n") == {"batch_size": "64", "preset": "easy"}

    def test_empty_text(self):
        assert parse_values("\n# yalnız yorum\n") == {}
