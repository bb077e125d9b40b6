"""
Exact arithmetic kernel: the prime field F_p, sparse multivariate Laurent polynomials over F_p and derivations of
their coordinate rings together with the restricted (p-power) structure.

Coefficients are machine integers in [0, p). Polynomials are immutable, zero terms are never stored and the canonical
term order is the descending lexicographic order on exponent vectors.
"""

import operator
import re
from collections.abc import Iterable, Mapping, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import isprime

from charpcartan.errors import (
	DivisionByZeroError,
	InvalidPrimeError,
	InvalidRingError,
	NegativeExponentError,
	NotInFrobeniusSubringError,
	NotInvertibleError,
	RingMismatchError,
)

MAX_PRIME = 2**31
VARIABLE_NAME_PATTERN = re.compile(r'[A-Za-z_][A-Za-z0-9_]*')

Exponents = tuple[int, ...]


class Prime(BaseModel):
	"""The characteristic of the base field, an odd prime."""

	model_config = ConfigDict(frozen=True)

	p: int = Field(description='An odd prime with 3 <= p <= 2^31.')

	@field_validator('p')
	@classmethod
	def _check_odd_prime(cls, p: int) -> int:
		if p == 2:  # noqa: PLR2004
			raise InvalidPrimeError('p = 2 is not supported, the characteristic must be an odd prime')
		if p < 3 or p > MAX_PRIME or not isprime(p):  # noqa: PLR2004
			raise InvalidPrimeError(f'{p} is not an odd prime in [3, 2^31]')
		return p

	@classmethod
	def of(cls, value: 'Prime | int') -> 'Prime':
		"""Returns `value` as a Prime, validating plain integers."""
		if isinstance(value, Prime):
			return value
		return cls(p=value)

	def __int__(self) -> int:
		return self.p

	def __index__(self) -> int:
		return self.p


def fp_inv(a: int, p: Prime | int) -> int:
	"""
	Returns the inverse of `a` in F_p.

	:raises DivisionByZeroError: if `a` is divisible by p.
	"""
	p = int(p)
	a %= p
	if a == 0:
		raise DivisionByZeroError(f'0 has no inverse modulo {p}')
	return pow(a, -1, p)


class Variable(BaseModel):
	"""A ring generator; Laurent variables may carry negative exponents."""

	model_config = ConfigDict(frozen=True)

	name: str
	laurent: bool = False


class PolyRing(BaseModel):
	"""The ring F_p[x_1^(±1), ..., x_n^(±1)] where only variables flagged as Laurent are inverted."""

	model_config = ConfigDict(frozen=True)

	prime: Prime
	variables: tuple[Variable, ...] = ()

	@model_validator(mode='after')
	def _check_variables(self) -> 'PolyRing':
		names = [v.name for v in self.variables]
		if len(set(names)) != len(names):
			raise InvalidRingError(f'Variable names must be unique, got {names}')
		for name in names:
			if not VARIABLE_NAME_PATTERN.fullmatch(name):
				raise InvalidRingError(f'{name!r} is not a valid variable name')
			# dx would be ambiguous between a variable and the differential of x
			if name.startswith('d') and name[1:] in names:
				raise InvalidRingError(f'Variable {name!r} clashes with the differential of {name[1:]!r}')
		return self

	@classmethod
	def build(cls, p: Prime | int, names: Sequence[str], laurent: Iterable[str] = ()) -> 'PolyRing':
		"""Builds a ring from variable names, inverting the variables listed in `laurent`."""
		laurent = set(laurent)
		unknown = laurent.difference(names)
		if unknown:
			raise InvalidRingError(f'Laurent variables {sorted(unknown)} are not ring variables')
		return cls(prime=Prime.of(p), variables=tuple(Variable(name=name, laurent=name in laurent) for name in names))

	@classmethod
	def constants(cls, p: Prime | int) -> 'PolyRing':
		"""The ring without variables, i.e. F_p itself."""
		return cls(prime=Prime.of(p))

	@property
	def p(self) -> int:
		return self.prime.p

	@property
	def nvars(self) -> int:
		return len(self.variables)

	@property
	def names(self) -> tuple[str, ...]:
		return tuple(v.name for v in self.variables)

	@property
	def laurent_flags(self) -> tuple[bool, ...]:
		return tuple(v.laurent for v in self.variables)

	def index(self, name: str) -> int:
		"""Returns the position of the variable `name`."""
		try:
			return self.names.index(name)
		except ValueError:
			raise InvalidRingError(f'{name!r} is not a variable of the ring') from None

	def gen(self, var: int | str) -> 'Poly':
		"""Returns the generator with the given index or name."""
		i = self.index(var) if isinstance(var, str) else var
		exps = [0] * self.nvars
		exps[i] = 1
		return Poly._make(self, {tuple(exps): 1})

	def gens(self) -> tuple['Poly', ...]:
		return tuple(self.gen(i) for i in range(self.nvars))

	def zero(self) -> 'Poly':
		return Poly._make(self, {})

	def one(self) -> 'Poly':
		return self.constant(1)

	def constant(self, c: int) -> 'Poly':
		c %= self.p
		return Poly._make(self, {(0,) * self.nvars: c} if c else {})

	def describe(self) -> str:
		"""Renders the ring in the `--vars` syntax, e.g. `x:laurent,y`."""
		return ','.join(f'{v.name}:laurent' if v.laurent else v.name for v in self.variables)


def _check_same_ring(a: 'Poly | Derivation', b: 'Poly | Derivation') -> None:
	if a.ring is not b.ring and a.ring != b.ring:
		raise RingMismatchError(f'Operands live in different rings: [{a.ring.describe()}] and [{b.ring.describe()}]')


class Poly:
	"""
	A sparse Laurent polynomial over F_p.

	`terms` maps exponent vectors to nonzero coefficients in [0, p). Instances are never mutated after construction.
	"""

	__slots__ = ('ring', 'terms')

	ring: PolyRing
	terms: dict[Exponents, int]

	def __init__(self, ring: PolyRing, terms: Mapping[Sequence[int], int] | None = None) -> None:
		p = ring.p
		nvars = ring.nvars
		flags = ring.laurent_flags
		clean: dict[Exponents, int] = {}
		for raw_exps, coefficient in (terms or {}).items():
			exps = tuple(int(e) for e in raw_exps)
			if len(exps) != nvars:
				raise InvalidRingError(f'Exponent vector {exps} does not match the {nvars} ring variables')
			for e, is_laurent, variable in zip(exps, flags, ring.variables, strict=True):
				if e < 0 and not is_laurent:
					raise NegativeExponentError(f'Negative exponent {e} on polynomial variable {variable.name!r}')
			clean[exps] = (clean.get(exps, 0) + coefficient) % p
		self.ring = ring
		self.terms = {exps: c for exps, c in clean.items() if c}

	@classmethod
	def _make(cls, ring: PolyRing, terms: dict[Exponents, int]) -> 'Poly':
		"""Wraps already canonical terms without validation."""
		poly = object.__new__(cls)
		poly.ring = ring
		poly.terms = terms
		return poly

	@classmethod
	def monomial(cls, ring: PolyRing, exponents: Sequence[int], coefficient: int = 1) -> 'Poly':
		return cls(ring, {tuple(exponents): coefficient})

	# Inspection

	def is_zero(self) -> bool:
		return not self.terms

	def is_constant(self) -> bool:
		return all(not any(exps) for exps in self.terms)

	def constant_value(self) -> int:
		"""Returns the constant term."""
		return self.terms.get((0,) * self.ring.nvars, 0)

	def is_monomial_unit(self) -> bool:
		"""True iff the polynomial is a nonzero constant times a monomial in the Laurent variables only."""
		if len(self.terms) != 1:
			return False
		(exps,) = self.terms
		return all(e == 0 or is_laurent for e, is_laurent in zip(exps, self.ring.laurent_flags, strict=True))

	def sorted_terms(self) -> list[tuple[Exponents, int]]:
		"""Terms in canonical (descending lexicographic) order."""
		return sorted(self.terms.items(), reverse=True)

	# Arithmetic

	def _coerce(self, other: 'Poly | int') -> 'Poly':
		if isinstance(other, int):
			return self.ring.constant(other)
		_check_same_ring(self, other)
		return other

	def __add__(self, other: 'Poly | int') -> 'Poly':
		if not isinstance(other, Poly | int):
			return NotImplemented
		other = self._coerce(other)
		p = self.ring.p
		terms = dict(self.terms)
		for exps, c in other.terms.items():
			value = (terms.get(exps, 0) + c) % p
			if value:
				terms[exps] = value
			else:
				terms.pop(exps, None)
		return Poly._make(self.ring, terms)

	__radd__ = __add__

	def __neg__(self) -> 'Poly':
		p = self.ring.p
		return Poly._make(self.ring, {exps: p - c for exps, c in self.terms.items()})

	def __sub__(self, other: 'Poly | int') -> 'Poly':
		if not isinstance(other, Poly | int):
			return NotImplemented
		return self + (-self._coerce(other))

	def __rsub__(self, other: int) -> 'Poly':
		return (-self) + other

	def scale(self, c: int) -> 'Poly':
		"""Multiplies by the scalar c in F_p."""
		p = self.ring.p
		c %= p
		if c == 0:
			return self.ring.zero()
		return Poly._make(self.ring, {exps: (v * c) % p for exps, v in self.terms.items()})

	def __mul__(self, other: 'Poly | int') -> 'Poly':
		if isinstance(other, int):
			return self.scale(other)
		if not isinstance(other, Poly):
			return NotImplemented
		_check_same_ring(self, other)
		p = self.ring.p
		product: dict[Exponents, int] = {}
		for e1, c1 in self.terms.items():
			for e2, c2 in other.terms.items():
				exps = tuple(map(operator.add, e1, e2))
				product[exps] = (product.get(exps, 0) + c1 * c2) % p
		return Poly._make(self.ring, {exps: c for exps, c in product.items() if c})

	__rmul__ = __mul__

	def inverse(self) -> 'Poly':
		"""
		Returns the inverse of a monomial unit.

		:raises NotInvertibleError: if the polynomial is not a unit of the ring.
		"""
		if not self.is_monomial_unit():
			raise NotInvertibleError(f'{self.render()} is not a unit of F_{self.ring.p}[{self.ring.describe()}]')
		((exps, c),) = self.terms.items()
		return Poly._make(self.ring, {tuple(-e for e in exps): fp_inv(c, self.ring.p)})

	def __pow__(self, k: int) -> 'Poly':
		if k < 0:
			return self.inverse() ** (-k)
		result = self.ring.one()
		base = self
		while k:
			if k & 1:
				result = result * base
			k >>= 1
			if k:
				base = base * base
		return result

	# Calculus

	def derivative(self, i: int) -> 'Poly':
		"""Formal partial derivative with respect to the i-th variable."""
		p = self.ring.p
		terms: dict[Exponents, int] = {}
		for exps, c in self.terms.items():
			k = exps[i] % p
			if k == 0:
				continue
			shifted = list(exps)
			shifted[i] -= 1
			terms[tuple(shifted)] = (c * k) % p
		return Poly._make(self.ring, terms)

	def frobenius(self) -> 'Poly':
		"""Returns f^p, i.e. every exponent multiplied by p (coefficients of F_p are fixed by Frobenius)."""
		p = self.ring.p
		return Poly._make(self.ring, {tuple(e * p for e in exps): c for exps, c in self.terms.items()})

	def pth_root(self) -> 'Poly':
		"""
		Returns g with g^p = f.

		:raises NotInFrobeniusSubringError: if some exponent is not divisible by p.
		"""
		p = self.ring.p
		terms: dict[Exponents, int] = {}
		for exps, c in self.terms.items():
			if any(e % p for e in exps):
				raise NotInFrobeniusSubringError(f'{self.render()} is not a p-th power: exponent vector {exps} is not divisible by {p}')
			terms[tuple(e // p for e in exps)] = c
		return Poly._make(self.ring, terms)

	def substitute(self, target: PolyRing, images: Sequence['Poly']) -> 'Poly':
		"""
		Applies the ring homomorphism sending the i-th variable to `images[i]`.

		Negative exponents require the corresponding image to be a monomial unit.
		"""
		if len(images) != self.ring.nvars:
			raise InvalidRingError(f'Expected {self.ring.nvars} images, got {len(images)}')
		if target.p != self.ring.p:
			raise RingMismatchError('Substitution must preserve the characteristic')
		for image in images:
			if image.ring != target:
				raise RingMismatchError('Every image must live in the target ring')
		powers: dict[tuple[int, int], Poly] = {}

		def power(i: int, e: int) -> Poly:
			if (i, e) not in powers:
				powers[i, e] = images[i] ** e
			return powers[i, e]

		result = target.zero()
		for exps, c in self.terms.items():
			term = target.constant(c)
			for i, e in enumerate(exps):
				if e:
					term = term * power(i, e)
			result = result + term
		return result

	# Comparison and rendering

	def __eq__(self, other: object) -> bool:
		if isinstance(other, int):
			return self == self.ring.constant(other)
		if not isinstance(other, Poly):
			return NotImplemented
		return self.terms == other.terms and (self.ring is other.ring or self.ring == other.ring)

	def __hash__(self) -> int:
		# constants compare equal to their residue in [0, p), so they hash like it
		if self.is_constant():
			return hash(self.constant_value())
		return hash((self.ring.names, frozenset(self.terms.items())))

	def render(self) -> str:
		"""Renders the polynomial in the CLI grammar, e.g. `2*x^3*y^-1 + 1`."""
		if not self.terms:
			return '0'
		return ' + '.join(_render_monomial(self.ring.names, exps, c) for exps, c in self.sorted_terms())

	def __str__(self) -> str:
		return self.render()

	def __repr__(self) -> str:
		return f'Poly({self.render()!r})'


def _render_monomial(names: Sequence[str], exps: Exponents, c: int, extra: Sequence[str] = ()) -> str:
	factors = [name if e == 1 else f'{name}^{e}' for name, e in zip(names, exps, strict=True) if e != 0]
	factors.extend(extra)
	if not factors:
		return str(c)
	if c == 1:
		return '*'.join(factors)
	return '*'.join([str(c), *factors])


def poly_mul(f: Poly, g: Poly) -> Poly:
	"""Exact product of two polynomials of the same ring."""
	return f * g


def partial_derivative(f: Poly, i: int) -> Poly:
	"""Formal partial derivative, exponent factors reduced mod p."""
	return f.derivative(i)


def pth_root(f: Poly) -> Poly:
	"""Inverse of the Frobenius embedding; see `Poly.pth_root`."""
	return f.pth_root()


class Derivation:
	"""A vector field Σ f_i ∂/∂x_i on the coordinate ring."""

	__slots__ = ('coeffs', 'ring')

	ring: PolyRing
	coeffs: tuple[Poly, ...]

	def __init__(self, ring: PolyRing, coeffs: Sequence[Poly]) -> None:
		if len(coeffs) != ring.nvars:
			raise InvalidRingError(f'A derivation needs {ring.nvars} coefficients, got {len(coeffs)}')
		for c in coeffs:
			if c.ring != ring:
				raise RingMismatchError('Derivation coefficients must live in the derivation ring')
		self.ring = ring
		self.coeffs = tuple(coeffs)

	@classmethod
	def zero(cls, ring: PolyRing) -> 'Derivation':
		return cls(ring, [ring.zero()] * ring.nvars)

	@classmethod
	def coordinate(cls, ring: PolyRing, var: int | str) -> 'Derivation':
		"""The coordinate field ∂/∂x_i."""
		i = ring.index(var) if isinstance(var, str) else var
		coeffs = [ring.zero()] * ring.nvars
		coeffs[i] = ring.one()
		return cls(ring, coeffs)

	@classmethod
	def euler(cls, ring: PolyRing, var: int | str) -> 'Derivation':
		"""The Euler field x_i ∂/∂x_i."""
		i = ring.index(var) if isinstance(var, str) else var
		coeffs = [ring.zero()] * ring.nvars
		coeffs[i] = ring.gen(i)
		return cls(ring, coeffs)

	def apply(self, f: Poly) -> Poly:
		_check_same_ring(self, f)
		result = self.ring.zero()
		for i, c in enumerate(self.coeffs):
			if not c.is_zero():
				result = result + c * f.derivative(i)
		return result

	__call__ = apply

	def iterate(self, f: Poly, k: int) -> Poly:
		"""Applies the derivation k times to f."""
		for _ in range(k):
			if f.is_zero():
				break
			f = self.apply(f)
		return f

	def bracket(self, other: 'Derivation') -> 'Derivation':
		"""The commutator [self, other] = self∘other − other∘self."""
		_check_same_ring(self, other)
		return Derivation(self.ring, [self.apply(g) - other.apply(f) for f, g in zip(self.coeffs, other.coeffs, strict=True)])

	def p_power(self) -> 'Derivation':
		"""The restricted p-power D^[p], determined by its values D^p(x_i) on the ring generators."""
		return Derivation(self.ring, [self.iterate(x, self.ring.p) for x in self.ring.gens()])

	def scale(self, f: Poly | int) -> 'Derivation':
		return Derivation(self.ring, [c * f for c in self.coeffs])

	def __add__(self, other: 'Derivation') -> 'Derivation':
		_check_same_ring(self, other)
		return Derivation(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs, strict=True)])

	def __neg__(self) -> 'Derivation':
		return Derivation(self.ring, [-c for c in self.coeffs])

	def __sub__(self, other: 'Derivation') -> 'Derivation':
		return self + (-other)

	def is_zero(self) -> bool:
		return all(c.is_zero() for c in self.coeffs)

	def __eq__(self, other: object) -> bool:
		if not isinstance(other, Derivation):
			return NotImplemented
		return self.ring == other.ring and self.coeffs == other.coeffs

	def __hash__(self) -> int:
		return hash(self.coeffs)

	def render(self) -> str:
		parts = [f'({c.render()})*d/d{name}' for c, name in zip(self.coeffs, self.ring.names, strict=True) if not c.is_zero()]
		return ' + '.join(parts) if parts else '0'

	def __repr__(self) -> str:
		return f'Derivation({self.render()!r})'


def derivation_p_power(D: Derivation) -> Derivation:
	"""See `Derivation.p_power`."""
	return D.p_power()


def derivation_bracket(D1: Derivation, D2: Derivation) -> Derivation:
	"""See `Derivation.bracket`."""
	return D1.bracket(D2)
