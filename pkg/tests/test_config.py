"""Config parsing, canonical formatting, presets."""

import math
from dataclasses import replace

import pytest

from simosounder.config import (
    ConfigError,
    RunConfig,
    default_config,
    format_config,
    load_config,
    parse_config,
)


class TestRoundTrip:
    def test_default_round_trip(self):
        cfg = RunConfig()
        text = format_config(cfg)
        assert parse_config(text) == cfg
        assert format_config(parse_config(text)) == text

    def test_pi_preset_round_trip(self):
        cfg = default_config("pi")
        text = format_config(cfg)
        assert parse_config(text) == cfg

    def test_randomized_round_trips(self):
        import numpy as np
        rng = np.random.default_rng(17)
        for _ in range(50):
            cfg = replace(
                RunConfig(),
                geometry=rng.choice(["ula", "pi"]),
                frequency_hz=float(rng.uniform(1e9, 6e9)),
                link_offset_x_m=float(rng.uniform(-3, 3)),
                polarization_leakage=float(rng.uniform(0, 0.2)),
                element_trims_db=tuple(float(v) for v in rng.uniform(-25, 0, 4)),
                capacity_calibration_db=float(rng.uniform(0, 80)),
                replica_enabled=bool(rng.integers(0, 2)),
                replica_amplitude_scale=float(rng.uniform(0, 1)),
                fading_amplitude_sigma_db=float(rng.uniform(0, 2)),
                per_element_snr_db=float(rng.uniform(10, 40)),
                intervals=int(rng.integers(1, 5)),
                snapshots_per_interval=int(rng.integers(1, 300)),
                samples_per_snapshot=int(rng.integers(16, 4096)),
                seed=int(rng.integers(0, 2 ** 62)),
            )
            text = format_config(cfg)
            assert parse_config(text) == cfg
            assert format_config(parse_config(text)) == text

    def test_comments_and_blanks_ignored(self):
        text = format_config(RunConfig())
        noisy = "# leading comment\n\n" + text.replace(
            "seed = 1", "seed = 1  # trailing comment"
        )
        assert parse_config(noisy) == RunConfig()


class TestStrictness:
    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="snr"):
            parse_config("snr = 33\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("seed = 1\nseed = 2\n")

    def test_bad_number_rejected(self):
        with pytest.raises(ConfigError, match="tx_power_dbm"):
            parse_config("tx_power_dbm = minus-eight\n")

    def test_non_finite_number_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("tx_power_dbm = inf\n")

    def test_bad_bool_rejected(self):
        with pytest.raises(ConfigError, match="noise_enabled"):
            parse_config("noise_enabled = yes\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("seed 1\n")

    def test_bad_geometry_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("geometry = circle\n")

    def test_vector_arity_enforced(self):
        with pytest.raises(ConfigError, match="tx_polarization"):
            parse_config("tx_polarization = 0.0,1.0\n")


class TestPresets:
    def test_ula_defaults(self):
        cfg = default_config("ula")
        assert cfg.geometry == "ula"
        assert not cfg.replica_enabled
        assert cfg.element_trims_db == (0.0, -19.0, -17.0, -15.0)
        assert cfg.intervals == 2 and cfg.snapshots_per_interval == 100

    def test_pi_defaults(self):
        cfg = default_config("pi")
        assert cfg.geometry == "pi"
        assert cfg.replica_enabled
        assert cfg.replica_blocked_elements == (4,)
        assert cfg.element_trims_db == (0.0, 0.0, 0.0, 0.0)
        assert cfg.fading_amplitude_sigma_db == 0.5

    def test_unknown_preset_rejected(self):
        with pytest.raises(ConfigError):
            default_config("circular")

    def test_shipped_files_match_presets(self):
        import os
        root = os.path.join(os.path.dirname(__file__), "..", "configs")
        assert load_config(os.path.join(root, "ula.cfg")) == default_config("ula")
        assert load_config(os.path.join(root, "pi.cfg")) == default_config("pi")
