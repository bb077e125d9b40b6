"""Integer counting formulas for dormant structures, evaluated in extended precision with an integrality certificate."""

from enum import Enum

import logfire
import mpmath
from pydantic import BaseModel, ConfigDict, Field

from charpcartan.algebra.ffpoly import Prime
from charpcartan.errors import IntegralityFailureError, LevelError, UsageError

DEFAULT_TOLERANCE = 1e-6
WORKING_DIGITS = 40


class CountMethod(str, Enum):
	NUMERIC = 'numeric'
	CLOSED_FORM = 'closed_form'


class CountResult(BaseModel):
	model_config = ConfigDict(frozen=True)

	value: int
	residual: float = Field(default=0.0, description='Distance of the raw numeric sum from the reported integer.')
	method: CountMethod


def _check_level(N: int) -> None:
	if N < 1:
		raise LevelError(f'Levels start at 1, got {N}')


def dormant_count_genus2_closed(p: Prime | int, N: int) -> int:
	"""q(q^2 − 1)/24 with q = p^N, the g = 2 value of the cosecant sum."""
	_check_level(N)
	q = Prime.of(p).p ** N
	return q * (q * q - 1) // 24


def dormant_count(p: Prime | int, g: int, N: int = 1, tolerance: float = DEFAULT_TOLERANCE) -> CountResult:
	"""
	q^(g−1)/2^(2g−1) · Σ_(θ=1)^(q−1) sin(πθ/q)^(−(2g−2)) with q = p^N, rounded to the nearest integer.

	:raises IntegralityFailureError: if the sum is farther than `tolerance` from an integer, or disagrees with the closed
		form for g = 2.
	"""
	if g < 2:  # noqa: PLR2004
		raise UsageError(f'The dormant count needs genus g >= 2, got {g}')
	_check_level(N)
	q = Prime.of(p).p ** N
	with logfire.span('Evaluating dormant count', p=int(p), g=g, N=N), mpmath.workdps(WORKING_DIGITS):
		total = mpmath.fsum(mpmath.sin(mpmath.pi * theta / q) ** (-(2 * g - 2)) for theta in range(1, q))
		raw = total * mpmath.mpf(q) ** (g - 1) / mpmath.mpf(2) ** (2 * g - 1)
		value = int(mpmath.nint(raw))
		residual = float(abs(raw - value))
	if residual >= tolerance:
		raise IntegralityFailureError(f'Dormant count for (p={int(p)}, g={g}, N={N}) is {mpmath.nstr(raw, 20)}, not an integer')
	if g == 2 and value != dormant_count_genus2_closed(p, N):  # noqa: PLR2004
		raise IntegralityFailureError(f'Numeric genus-2 count {value} disagrees with the closed form {dormant_count_genus2_closed(p, N)}')
	logfire.debug('Dormant count', value=value, residual=residual)
	return CountResult(value=value, residual=residual, method=CountMethod.NUMERIC)


def elliptic_affine_count(p: Prime | int, N: int) -> CountResult:
	"""p^(N−1)(p − 1)."""
	_check_level(N)
	p = Prime.of(p).p
	return CountResult(value=p ** (N - 1) * (p - 1), method=CountMethod.CLOSED_FORM)


def bm_count_closed(p: Prime | int, N: int) -> CountResult:
	"""p^N − p^(N−1), the number of level-N classes on G_m."""
	_check_level(N)
	p = Prime.of(p).p
	return CountResult(value=p**N - p ** (N - 1), method=CountMethod.CLOSED_FORM)
