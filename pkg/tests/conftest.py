"""
Pytest configuration and shared fixtures for the log-sum verifier test suite.

Provides the Flask app and client, a CLI runner, isolated report storage
and small hand-built matrices and families used across test modules.
"""

import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from app import create_app
from config import Config
from modules.generators import haar_unitary
from modules.matfun import HermitianMatrix, to_exchange
from modules.report_storage import ReportStorage


class TestConfig(Config):
    """Test-specific configuration with isolated storage"""
    TESTING = True
    REPORTS_FOLDER = None  # Will be set in fixture
    MAX_API_TRIALS = 50


@pytest.fixture
def app(tmp_path, monkeypatch):
    """
    Create and configure a Flask application instance for testing.

    Args:
        tmp_path: Per-test temporary directory
        monkeypatch: Used to point the report folder at tmp_path

    Returns:
        Flask: Configured Flask app with test settings
    """
    monkeypatch.setattr(TestConfig, 'REPORTS_FOLDER', str(tmp_path / 'reports'))
    app = create_app(TestConfig)
    yield app


@pytest.fixture
def client(app):
    """
    Create a test client for the Flask application.

    Args:
        app: Flask application fixture

    Returns:
        FlaskClient: Test client for making HTTP requests
    """
    return app.test_client()


@pytest.fixture
def cli_runner():
    """
    Create a click runner for the command line.

    Returns:
        CliRunner: Runner that captures output and exit codes
    """
    return CliRunner()


@pytest.fixture
def report_storage(tmp_path):
    """
    Create a ReportStorage writing into a temporary folder.

    Returns:
        ReportStorage: Storage with an isolated reports folder
    """
    return ReportStorage(str(tmp_path / 'reports'))


@pytest.fixture
def write_json(tmp_path):
    """
    Write a JSON document into tmp_path.

    Returns:
        Callable taking (name, data) and returning the file path
    """
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write


@pytest.fixture
def rng():
    """Seeded numpy generator so hand-rolled instances are reproducible"""
    return np.random.default_rng(20240611)


@pytest.fixture
def rotation():
    """2x2 rotation by pi/4"""
    c = np.cos(np.pi / 4)
    return np.array([[c, -c], [c, c]])


@pytest.fixture
def random_pd(rng):
    """
    Factory for random positive definite matrices.

    Returns:
        Callable (n, lo, hi) -> HermitianMatrix with spectrum in [lo, hi]
    """
    def _make(n, lo=0.5, hi=5.0):
        u = haar_unitary(rng, n)
        values = rng.uniform(lo, hi, n)
        return HermitianMatrix((u * values) @ u.conj().T)
    return _make


@pytest.fixture
def exchange():
    """Encode a matrix (or list of matrices) in the exchange format"""
    def _encode(value):
        if isinstance(value, (list, tuple)):
            return [to_exchange(v) for v in value]
        return to_exchange(value)
    return _encode


@pytest.fixture
def scalar_matrices():
    """Turn a list of positive reals into a family of 1x1 matrices"""
    def _make(values):
        return [HermitianMatrix([[float(v)]]) for v in values]
    return _make


@pytest.fixture
def reports_dir(tmp_path):
    path = tmp_path / 'cli_reports'
    os.makedirs(path, exist_ok=True)
    return path
