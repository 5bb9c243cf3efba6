from __future__ import annotations

import warnings

import pytest

from qspectra.errors import ScanWarning


@pytest.fixture(autouse=True)
def _quiet_scan_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ScanWarning)
        yield
