"""Shared fixtures: the shipped chart tower and step data, loaded once."""

from __future__ import annotations

import pytest

from lgresolve.chart import load_centers, load_tower
from lgresolve.pluecker import load_steps


@pytest.fixture(scope="session")
def charts():
    return load_tower()


@pytest.fixture(scope="session")
def center_steps():
    return load_centers()


@pytest.fixture(scope="session")
def pl_steps(charts):
    return load_steps(charts)
