import logfire
import pytest

from charpcartan.algebra.ffpoly import PolyRing


@pytest.fixture(scope='session', autouse=True)
def configure_logfire() -> None:
	"""Keeps logfire local and silent during the tests."""
	logfire.configure(send_to_logfire=False, console=False)


@pytest.fixture
def f3x() -> PolyRing:
	return PolyRing.build(3, ['x'])


@pytest.fixture
def f3x_laurent() -> PolyRing:
	return PolyRing.build(3, ['x'], laurent=['x'])


@pytest.fixture
def f3xy() -> PolyRing:
	return PolyRing.build(3, ['x', 'y'])
