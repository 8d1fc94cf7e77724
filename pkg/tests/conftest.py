import os
import tempfile

import pytest

# settings and logging read the environment on import
os.environ.setdefault("SC_LOG_DIR", tempfile.mkdtemp(prefix="sc-logs-"))

import utils.profiles
import utils.settings
from simplicial.complex import hodge_laplacians
from simplicial.datasets import small_complex
from simplicial.spectral import build_spectral_bases


@pytest.fixture(autouse=True)
def isolated_paths(tmp_path, monkeypatch):
    """Logs, results and profiles of every test live under its tmp_path"""
    monkeypatch.setenv("SC_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setattr(utils.settings, "output_dir", str(tmp_path / "results"))
    monkeypatch.setattr(utils.settings, "profile_dir", str(tmp_path / "profiles"))
    monkeypatch.setattr(utils.profiles, "available_profiles", {})
    return tmp_path


@pytest.fixture
def small():
    return small_complex()


@pytest.fixture
def small_laplacians(small):
    return hodge_laplacians(small)


@pytest.fixture
def small_bases(small, small_laplacians):
    return build_spectral_bases(small, small_laplacians, w0=4, w2=1, distinct=True)
