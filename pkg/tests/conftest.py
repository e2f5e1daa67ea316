import math

import numpy as np
import pytest

from rfvlc.params import Geometry, QosSpec, RfParams, VlcParams


@pytest.fixture
def geom():
    return Geometry()


@pytest.fixture
def rf():
    return RfParams()


@pytest.fixture
def vlc():
    return VlcParams()


@pytest.fixture
def qos():
    return QosSpec(theta=1e-3, T=1e-4)


def cell(phi_deg, d_v=2.5, y_r=20.0):
    """Geometry and LED for a cell of radius d_v tan(phi)."""
    phi = math.radians(phi_deg)
    return Geometry(d_v=d_v, d_c=d_v * math.tan(phi), y_r=y_r), VlcParams(phi_half=phi)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
