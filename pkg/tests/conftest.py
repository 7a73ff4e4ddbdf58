"""Shared fixtures for the workbench tests."""
import os

import numpy as np
import pytest

from app.clifford_core import Signature, build_gamma_rep
from app.config import load_run_config
from app.field_tensors import minkowski_rep, two_spinor_momentum


@pytest.fixture(autouse=True)
def _isolated_environment(monkeypatch):
    """Keep SPINORLAB_* variables from the developer's shell out of the tests."""
    for key in list(os.environ):
        if key.startswith("SPINORLAB_"):
            monkeypatch.delenv(key)


@pytest.fixture
def minkowski():
    return minkowski_rep()


@pytest.fixture
def euclidean_rep():
    def build(n):
        return build_gamma_rep(n, Signature.euclidean(n))
    return build


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def null_momentum(rng):
    phi = rng.normal(size=2) + 1j * rng.normal(size=2)
    return two_spinor_momentum(phi)


@pytest.fixture
def run_config(tmp_path):
    def build(**flags):
        flags.setdefault("out_dir", tmp_path / "reports")
        flags.setdefault("log_dir", tmp_path / "logs")
        return load_run_config(**flags)
    return build
