from enum import Enum
from typing import ClassVar


class ErrorKind(str, Enum):
	"""
	Kinds of failures the library can report.

	Every exception raised by the core modules carries exactly one of these kinds; the CLI surfaces it as `error.kind`.
	"""

	DIVISION_BY_ZERO = 'division_by_zero'
	RING_MISMATCH = 'ring_mismatch'
	NOT_IN_FROBENIUS_SUBRING = 'not_in_frobenius_subring'
	DEGREE_ERROR = 'degree_error'
	NOT_CLOSED = 'not_closed'
	INTERNAL_CARTIER_ERROR = 'internal_cartier_error'  # a bug, closedness guarantees the Frobenius subring
	ALGEBRA_MISMATCH = 'algebra_mismatch'
	INVALID_STRUCTURE_CONSTANTS = 'invalid_structure_constants'
	LEVEL_ERROR = 'level_error'
	INTEGRALITY_FAILURE = 'integrality_failure'
	NOT_INVERTIBLE = 'not_invertible'
	INVALID_PRIME = 'invalid_prime'
	INVALID_RING = 'invalid_ring'
	SYNTAX_ERROR = 'syntax_error'
	UNDECLARED_VARIABLE = 'undeclared_variable'
	NEGATIVE_EXPONENT = 'negative_exponent_on_polynomial_variable'
	USAGE_ERROR = 'usage_error'


class CharpCartanError(Exception):
	"""Base class of all library errors."""

	kind: ClassVar[ErrorKind]
	usage: ClassVar[bool] = False  # usage errors are caused by malformed input rather than by the mathematics


class DivisionByZeroError(CharpCartanError):
	kind = ErrorKind.DIVISION_BY_ZERO


class RingMismatchError(CharpCartanError):
	kind = ErrorKind.RING_MISMATCH


class NotInFrobeniusSubringError(CharpCartanError):
	kind = ErrorKind.NOT_IN_FROBENIUS_SUBRING


class DegreeError(CharpCartanError):
	kind = ErrorKind.DEGREE_ERROR


class NotClosedError(CharpCartanError):
	kind = ErrorKind.NOT_CLOSED


class InternalCartierError(CharpCartanError):
	kind = ErrorKind.INTERNAL_CARTIER_ERROR


class AlgebraMismatchError(CharpCartanError):
	kind = ErrorKind.ALGEBRA_MISMATCH


class InvalidStructureConstantsError(CharpCartanError):
	kind = ErrorKind.INVALID_STRUCTURE_CONSTANTS


class LevelError(CharpCartanError):
	kind = ErrorKind.LEVEL_ERROR


class IntegralityFailureError(CharpCartanError):
	kind = ErrorKind.INTEGRALITY_FAILURE


class NotInvertibleError(CharpCartanError):
	kind = ErrorKind.NOT_INVERTIBLE


class InvalidPrimeError(CharpCartanError):
	kind = ErrorKind.INVALID_PRIME
	usage = True


class InvalidRingError(CharpCartanError):
	kind = ErrorKind.INVALID_RING
	usage = True


class ExpressionSyntaxError(CharpCartanError):
	"""Raised by the expression parser, remembers the offending character position."""

	kind = ErrorKind.SYNTAX_ERROR
	usage = True

	def __init__(self, message: str, position: int) -> None:
		super().__init__(f'{message} (at position {position})')
		self.position = position


class UndeclaredVariableError(CharpCartanError):
	kind = ErrorKind.UNDECLARED_VARIABLE
	usage = True

	def __init__(self, name: str) -> None:
		super().__init__(f'Variable {name!r} is not declared, declare it with --vars')
		self.name = name


class NegativeExponentError(CharpCartanError):
	kind = ErrorKind.NEGATIVE_EXPONENT
	usage = True


class UsageError(CharpCartanError):
	kind = ErrorKind.USAGE_ERROR
	usage = True
