"""Shared fixtures for the test suite."""

import pytest

import helpers


@pytest.fixture(scope="session")
def corpus():
    """The seeded 200-graph corpus used by the sweep-style tests."""
    return helpers.corpus()


@pytest.fixture
def rose2():
    return helpers.rose(2)


@pytest.fixture
def rose3():
    return helpers.rose(3)


@pytest.fixture
def loop():
    return helpers.rose(1)


@pytest.fixture
def fan():
    return helpers.fan_graph()
