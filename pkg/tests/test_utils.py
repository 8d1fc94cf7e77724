import json
import os

import numpy as np
import pytest

import utils.profiles
import utils.sc_io
import utils.sc_lib
import utils.sc_logging
import utils.settings


## Seeds and formatting

def test_sub_seed_streams():
    a = utils.sc_lib.make_rng(utils.sc_lib.sub_seed(7, "noise", 3)).standard_normal(5)
    b = utils.sc_lib.make_rng(utils.sc_lib.sub_seed(7, "noise", 3)).standard_normal(5)
    assert np.array_equal(a, b)

    others = [
        utils.sc_lib.sub_seed(7, "noise", 4),
        utils.sc_lib.sub_seed(7, "sampling", 3),
        utils.sc_lib.sub_seed(8, "noise", 3),
    ]
    for seed in others:
        assert not np.array_equal(utils.sc_lib.make_rng(seed).standard_normal(5), a)


def test_sub_seed_unknown_purpose():
    with pytest.raises(KeyError):
        utils.sc_lib.sub_seed(0, "weather")


def test_seed_label():
    label = utils.sc_lib.seed_label(utils.sc_lib.sub_seed(5, "synthesis", 0))
    assert label == {"entropy": [5, 1, 0], "spawn_key": []}
    assert utils.sc_lib.seed_label(np.int64(3)) == 3
    assert utils.sc_lib.seed_label(None) is None


@pytest.mark.parametrize("value", [0.0, 1e-300, -2.5, 1 / 3, np.float64(np.pi), 123456789.123456789])
def test_format_float_is_exact(value):
    assert float(utils.sc_lib.format_float(value)) == value


def test_format_row():
    assert utils.sc_lib.format_row([1e-05, 50, 0.1]) == "1e-05,50,0.1"


def test_stable_hash_ignores_key_order():
    assert utils.sc_lib.stable_hash({"a": 1, "b": [1, 2]}) == utils.sc_lib.stable_hash({"b": [1, 2], "a": 1})
    assert utils.sc_lib.stable_hash({"a": 1}) != utils.sc_lib.stable_hash({"a": 2})


def test_to_jsonable():
    data = {1: np.arange(3), "x": (np.float64(0.5), np.int32(2), np.bool_(True))}
    converted = utils.sc_lib.to_jsonable(data)
    assert converted == {"1": [0, 1, 2], "x": [0.5, 2, True]}
    json.dumps(converted)


## Result files

def test_vector_and_matrix_csv(tmp_path):
    rng = np.random.default_rng(0)
    vector = rng.standard_normal(17)
    path = str(tmp_path / "nested" / "v.csv")
    utils.sc_io.write_vector_csv(path, vector)
    assert np.array_equal(np.loadtxt(path), vector)

    matrix = rng.standard_normal((4, 3))
    path = str(tmp_path / "m.csv")
    utils.sc_io.write_matrix_csv(path, matrix)
    assert np.array_equal(np.loadtxt(path, delimiter=",", ndmin=2), matrix)


def test_table_csv(tmp_path):
    path = str(tmp_path / "table.csv")
    utils.sc_io.write_table_csv(path, ["variance", "mse"], [(0.0, 1e-30), (1e-5, 0.25)])
    assert (tmp_path / "table.csv").read_text() == "variance,mse\n0.0,1e-30\n1e-05,0.25\n"
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(table, [[0.0, 1e-30], [1e-5, 0.25]])


def test_save_json_is_stable(tmp_path):
    path = str(tmp_path / "out.json")
    utils.sc_io.save_json(path, {"values": np.array([1.5, 2.0]), "n": np.int64(3)})
    first = (tmp_path / "out.json").read_bytes()
    assert first.endswith(b"}\n")
    assert utils.sc_io.load_json(path) == {"values": [1.5, 2.0], "n": 3}

    utils.sc_io.save_json(path, {"values": [1.5, 2.0], "n": 3})
    assert (tmp_path / "out.json").read_bytes() == first


def test_export_points(tmp_path):
    path = str(tmp_path / "points.csv")
    utils.sc_io.export_points(path, np.array([[0.25, 0.5], [1.0, 0.0]]))
    assert (tmp_path / "points.csv").read_text() == "x,y\n0.25,0.5\n1.0,0.0\n"


## Logging

def test_logs_go_to_log_dir(tmp_path):
    utils.sc_logging.update_debug_log("hello")
    utils.sc_logging.log_error("bad input", "CONFIG")
    utils.sc_logging.log_experiment("unit", {"mse": 0.5})

    log_dir = tmp_path / "logs"
    assert utils.sc_logging.get_log_dir() == str(log_dir)
    assert "hello" in (log_dir / "debug.log").read_text()
    assert "CONFIG: bad input" in (log_dir / "error.log").read_text()
    experiment = (log_dir / "experiments.log").read_text()
    assert "--- Experiment unit" in experiment and "mse: 0.5" in experiment
    assert "CONFIG: bad input" in utils.sc_logging.tail_log("debug", lines=1)


def test_logging_can_be_disabled(tmp_path, monkeypatch):
    monkeypatch.setenv("DEBUG_LOGGING", "false")
    utils.sc_logging.update_debug_log("quiet")
    utils.sc_logging.log_error("quiet")
    assert not (tmp_path / "logs").exists()


def test_clear_logs(tmp_path):
    utils.sc_logging.update_debug_log("first")
    assert utils.sc_logging.get_log_size("debug") > 0
    utils.sc_logging.clear_logs()
    assert "first" not in (tmp_path / "logs" / "debug.log").read_text()
    assert utils.sc_logging.get_log_size("error") == 0


## Settings and profiles

def test_settings_access():
    assert utils.settings.get_setting("svd_cutoff") == utils.settings.svd_cutoff
    assert utils.settings.get_setting("no_such_setting", 42) == 42
    assert not utils.settings.set_setting("no_such_setting", 1)


def test_set_setting(monkeypatch):
    monkeypatch.setattr(utils.settings, "workers", utils.settings.workers)
    assert utils.settings.set_setting("workers", 3)
    assert utils.settings.workers == 3


def test_settings_from_environment(monkeypatch):
    for name, value in {"ZERO_TOL": "1e-9", "WORKERS": "4", "SPECTRAL_SCALING": "TRUE"}.items():
        monkeypatch.setenv(name, value)
    for name in ("zero_tol", "svd_cutoff", "spectral_scaling", "master_seed", "trials", "max_retries", "workers",
                 "noise_variance", "output_dir", "profile_dir"):
        monkeypatch.setattr(utils.settings, name, getattr(utils.settings, name))

    utils.settings.load_settings()
    assert utils.settings.zero_tol == 1e-9
    assert utils.settings.workers == 4
    assert utils.settings.spectral_scaling is True


def test_default_profiles_are_created(tmp_path):
    assert utils.profiles.list_profiles() == ["ci", "full", "small"]
    for name in ("ci", "full", "small"):
        assert os.path.exists(tmp_path / "profiles" / f"{name}.json")
    assert utils.profiles.get_profile("full")["p_shifts"] == 10
    assert utils.profiles.get_profile("nope") is None


def test_user_profile_is_kept(tmp_path):
    profile_dir = tmp_path / "profiles"
    profile_dir.mkdir()
    (profile_dir / "small.json").write_text(json.dumps({"complex": "small", "trials": 3}))
    (profile_dir / "broken.json").write_text("{")

    assert utils.profiles.get_profile("small") == {"complex": "small", "trials": 3}
    assert "broken" not in utils.profiles.list_profiles()

    ## callers get a copy
    utils.profiles.get_profile("small")["trials"] = 99
    assert utils.profiles.get_profile("small")["trials"] == 3
