import os

import numpy as np
import pytest

from shared.config import reset_settings
from shared.models import DetectionParams, FeedbackParams, OpoParams


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch, tmp_path):
    """Each test sees default settings, unaffected by the caller's environment."""
    for name in list(os.environ):
        if name.startswith('CFSQ_'):
            monkeypatch.delenv(name)
    monkeypatch.chdir(tmp_path)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def theory_opo():
    return OpoParams(T1=0.12, L1=5.0e-3, l=0.5, x=0.1)


@pytest.fixture
def theory_feedback():
    return FeedbackParams(T2=1.0, L2=0.05, la=0.25, lb=0.25)


@pytest.fixture
def experiment_opo():
    return OpoParams(T1=0.20, L1=6.5e-3, l=0.5, x=0.111)


@pytest.fixture
def experiment_feedback():
    return FeedbackParams(T2=0.8, L2=0.12, la=0.25, lb=0.25)


@pytest.fixture
def detection():
    return DetectionParams(xi=0.985, rho=0.99)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


FIG4_CONFIG = """\
# theory parameter set
T1 = 0.12
L1 = 5.0e-3
L2 = 5.0e-2
l = 0.5
la = 0.25
lb = 0.25
"""


@pytest.fixture
def fig4_config_text():
    return FIG4_CONFIG


@pytest.fixture
def write_config(tmp_path):
    def _write(text, name="run.cfg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write
