import pytest

from charpcartan.errors import IntegralityFailureError, InvalidPrimeError, LevelError, UsageError
from charpcartan.geometry.counting import (
	DEFAULT_TOLERANCE,
	CountMethod,
	bm_count_closed,
	dormant_count,
	dormant_count_genus2_closed,
	elliptic_affine_count,
)


class TestDormantCount:
	"""Tests the cosecant sum against known values."""

	@pytest.mark.parametrize(('p', 'g', 'N', 'expected'), [(5, 2, 1, 5), (7, 2, 1, 14), (3, 2, 2, 30), (3, 2, 1, 1), (11, 2, 1, 55)])
	def test_genus_two(self, p: int, g: int, N: int, expected: int) -> None:
		result = dormant_count(p, g, N)
		assert result.value == expected
		assert result.method == CountMethod.NUMERIC
		assert result.residual < DEFAULT_TOLERANCE
		assert dormant_count_genus2_closed(p, N) == expected

	@pytest.mark.parametrize(('p', 'N', 'expected'), [(3, 1, 1), (5, 1, 15), (7, 1, 98), (3, 2, 414), (5, 2, 172250)])
	def test_genus_three(self, p: int, N: int, expected: int) -> None:
		assert dormant_count(p, 3, N).value == expected

	@pytest.mark.parametrize('g', [0, 1])
	def test_genus_below_two(self, g: int) -> None:
		with pytest.raises(UsageError):
			dormant_count(5, g)

	def test_level_zero(self) -> None:
		with pytest.raises(LevelError):
			dormant_count(5, 2, 0)
		with pytest.raises(LevelError):
			dormant_count_genus2_closed(5, 0)

	def test_invalid_prime(self) -> None:
		with pytest.raises(InvalidPrimeError):
			dormant_count(4, 2)

	def test_unreachable_tolerance(self) -> None:
		with pytest.raises(IntegralityFailureError):
			dormant_count(5, 2, tolerance=-1.0)


class TestClosedForms:
	"""Tests the closed-form counts on the model curves."""

	@pytest.mark.parametrize(('p', 'N', 'expected'), [(3, 1, 2), (3, 2, 6), (5, 3, 100)])
	def test_elliptic(self, p: int, N: int, expected: int) -> None:
		result = elliptic_affine_count(p, N)
		assert result.value == expected
		assert result.method == CountMethod.CLOSED_FORM

	@pytest.mark.parametrize(('p', 'N', 'expected'), [(3, 1, 2), (3, 2, 6), (5, 2, 20)])
	def test_multiplicative(self, p: int, N: int, expected: int) -> None:
		assert bm_count_closed(p, N).value == expected

	def test_levels_start_at_one(self) -> None:
		with pytest.raises(LevelError):
			elliptic_affine_count(3, 0)
		with pytest.raises(LevelError):
			bm_count_closed(3, 0)
