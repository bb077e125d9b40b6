"""
Restricted Lie algebras over F_p and over the coordinate rings of the model spaces.

Two realizations share one element interface (`parent`, `bracket`, `+`, `-`, `scale`, `zero_like`, `p_power`):
matrix algebras gl_n, where v^[p] = v^p, and abstract algebras given by structure constants, where the p-power is
computed by splitting off one basis direction at a time with the Jacobson formula.
"""

import json
import re
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, Protocol, Self

import logfire
from pydantic import BaseModel, ConfigDict, Field, model_validator

from charpcartan.algebra.ffpoly import Derivation, Poly, PolyRing, Prime, fp_inv
from charpcartan.errors import AlgebraMismatchError, InvalidStructureConstantsError, RingMismatchError

BRACKET_KEY_PATTERN = re.compile(r'\[\s*(\d+)\s*,\s*(\d+)\s*\]')


class RestrictedElement(Protocol):
	"""What `si_coefficients` and the identity checks need from an element."""

	@property
	def parent(self) -> object: ...

	def bracket(self, other: Self) -> Self: ...

	def __add__(self, other: Self) -> Self: ...

	def __sub__(self, other: Self) -> Self: ...

	def __neg__(self) -> Self: ...

	def scale(self, c: int) -> Self: ...

	def zero_like(self) -> Self: ...

	def p_power(self) -> Self: ...

	def is_zero(self) -> bool: ...


def _check_same_parent(v: RestrictedElement, u: RestrictedElement) -> None:
	if v.parent != u.parent:
		raise AlgebraMismatchError('Elements belong to different Lie algebras')


# Matrix algebras


class MatrixLieAlgebra(BaseModel):
	"""gl_n over a coordinate ring (over F_p itself when the ring has no variables)."""

	model_config = ConfigDict(frozen=True)

	n: int = Field(ge=1, description='Matrix size.')
	ring: PolyRing

	@property
	def p(self) -> int:
		return self.ring.p

	def element(self, rows: Sequence[Sequence[Poly | int]]) -> 'LieElt':
		"""Builds an element from rows of polynomials or integers."""
		return LieElt(self, [[self.ring.constant(x) if isinstance(x, int) else x for x in row] for row in rows])

	def zero(self) -> 'LieElt':
		return self.element([[0] * self.n for _ in range(self.n)])

	def identity(self) -> 'LieElt':
		return self.element([[int(i == j) for j in range(self.n)] for i in range(self.n)])

	def unit(self, a: int, b: int) -> 'LieElt':
		"""The matrix unit E_ab (0-based)."""
		return self.element([[int((i, j) == (a, b)) for j in range(self.n)] for i in range(self.n)])

	def basis(self) -> list['LieElt']:
		"""The matrix units E_ab in row-major order."""
		return [self.unit(a, b) for a in range(self.n) for b in range(self.n)]


class LieElt:
	"""An element of gl_n(R): an n×n matrix of polynomials."""

	__slots__ = ('algebra', 'entries')

	algebra: MatrixLieAlgebra
	entries: tuple[tuple[Poly, ...], ...]

	def __init__(self, algebra: MatrixLieAlgebra, entries: Sequence[Sequence[Poly]]) -> None:
		if len(entries) != algebra.n or any(len(row) != algebra.n for row in entries):
			raise AlgebraMismatchError(f'Expected a {algebra.n}x{algebra.n} matrix')
		for row in entries:
			for x in row:
				if x.ring != algebra.ring:
					raise RingMismatchError('Matrix entries must live in the algebra ring')
		self.algebra = algebra
		self.entries = tuple(tuple(row) for row in entries)

	@classmethod
	def _make(cls, algebra: MatrixLieAlgebra, entries: list[list[Poly]]) -> 'LieElt':
		elt = object.__new__(cls)
		elt.algebra = algebra
		elt.entries = tuple(tuple(row) for row in entries)
		return elt

	@property
	def parent(self) -> MatrixLieAlgebra:
		return self.algebra

	@property
	def n(self) -> int:
		return self.algebra.n

	@property
	def ring(self) -> PolyRing:
		return self.algebra.ring

	def zero_like(self) -> 'LieElt':
		return self.algebra.zero()

	def is_zero(self) -> bool:
		return all(x.is_zero() for row in self.entries for x in row)

	def entry(self, i: int, j: int) -> Poly:
		return self.entries[i][j]

	def _map(self, fn: Any) -> 'LieElt':
		return LieElt._make(self.algebra, [[fn(x) for x in row] for row in self.entries])

	def __add__(self, other: 'LieElt') -> 'LieElt':
		if not isinstance(other, LieElt):
			return NotImplemented
		_check_same_parent(self, other)
		return LieElt._make(self.algebra, [[a + b for a, b in zip(r1, r2, strict=True)] for r1, r2 in zip(self.entries, other.entries, strict=True)])

	def __neg__(self) -> 'LieElt':
		return self._map(lambda x: -x)

	def __sub__(self, other: 'LieElt') -> 'LieElt':
		if not isinstance(other, LieElt):
			return NotImplemented
		return self + (-other)

	def scale(self, c: Poly | int) -> 'LieElt':
		return self._map(lambda x: x * c)

	def __matmul__(self, other: 'LieElt') -> 'LieElt':
		"""Matrix product."""
		_check_same_parent(self, other)
		n = self.n
		zero = self.ring.zero()
		rows = []
		for i in range(n):
			row = []
			for j in range(n):
				total = zero
				for k in range(n):
					a, b = self.entries[i][k], other.entries[k][j]
					if not a.is_zero() and not b.is_zero():
						total = total + a * b
				row.append(total)
			rows.append(row)
		return LieElt._make(self.algebra, rows)

	def apply(self, vector: Sequence[Poly]) -> list[Poly]:
		"""Matrix times column vector."""
		return [sum((a * x for a, x in zip(row, vector, strict=True)), self.ring.zero()) for row in self.entries]

	def bracket(self, other: 'LieElt') -> 'LieElt':
		"""The commutator [self, other] = self·other − other·self."""
		return self @ other - other @ self

	def p_power(self) -> 'LieElt':
		"""v^[p] = v^p, the p-th matrix power."""
		p = self.algebra.p
		result = self.algebra.identity()
		base = self
		while p:
			if p & 1:
				result = result @ base
			p >>= 1
			if p:
				base = base @ base
		return result

	def derive(self, D: Derivation) -> 'LieElt':
		"""Applies a derivation to every entry."""
		return self._map(D.apply)

	def frobenius(self) -> 'LieElt':
		"""Raises every entry to the p-th power."""
		return self._map(Poly.frobenius)

	def __eq__(self, other: object) -> bool:
		if not isinstance(other, LieElt):
			return NotImplemented
		return self.algebra == other.algebra and self.entries == other.entries

	def __hash__(self) -> int:
		return hash(self.entries)

	def rows(self) -> list[list[str]]:
		"""Rendered entries, row by row."""
		return [[x.render() for x in row] for row in self.entries]

	def render(self) -> str:
		return '; '.join(', '.join(row) for row in self.rows())

	def __repr__(self) -> str:
		return f'LieElt({self.render()!r})'


# Abstract algebras

Vector = tuple[int, ...]


class AbstractRestrictedLie(BaseModel):
	"""
	A finite-dimensional restricted Lie algebra over F_p given by structure constants.

	`table[i][j]` is the coordinate vector of [e_i, e_j] and `pth[i]` the one of e_i^[p]. Construction rejects tables that
	are not antisymmetric, violate the Jacobi identity or the restricted axiom (ad e_i)^p = ad(e_i^[p]).
	"""

	model_config = ConfigDict(frozen=True)

	prime: Prime
	names: tuple[str, ...]
	table: tuple[tuple[Vector, ...], ...]
	pth: tuple[Vector, ...]

	@property
	def p(self) -> int:
		return self.prime.p

	@property
	def dim(self) -> int:
		return len(self.names)

	@model_validator(mode='after')
	def _check_axioms(self) -> 'AbstractRestrictedLie':
		d = self.dim
		p = self.p
		if len(self.table) != d or any(len(row) != d for row in self.table) or len(self.pth) != d:
			raise InvalidStructureConstantsError(f'Structure constants do not match dimension {d}')
		for vector in [*(v for row in self.table for v in row), *self.pth]:
			if len(vector) != d or any(not 0 <= c < p for c in vector):
				raise InvalidStructureConstantsError(f'{vector} is not a reduced coordinate vector of length {d}')
		for i in range(d):
			for j in range(d):
				if self.table[i][j] != tuple((-c) % p for c in self.table[j][i]):
					raise InvalidStructureConstantsError(f'Bracket is not antisymmetric on ({self.names[i]}, {self.names[j]})')
		basis = [self._unit(i) for i in range(d)]
		for i in range(d):
			for j in range(i + 1, d):
				for k in range(j + 1, d):
					a, b, c = basis[i], basis[j], basis[k]
					total = _vadd(_vadd(self._br(a, self._br(b, c)), self._br(b, self._br(c, a))), self._br(c, self._br(a, b)), p)
					if any(total):
						raise InvalidStructureConstantsError(f'Jacobi identity fails on ({self.names[i]}, {self.names[j]}, {self.names[k]})')
		for i in range(d):
			for j in range(d):
				w = basis[j]
				for _ in range(p):
					w = self._br(basis[i], w)
				if w != self._br(self.pth[i], basis[j]):
					raise InvalidStructureConstantsError(f'(ad {self.names[i]})^p differs from ad({self.names[i]}^[p]) on {self.names[j]}')
		logfire.debug('Validated restricted Lie algebra', names=self.names, p=p)
		return self

	def _unit(self, i: int) -> Vector:
		return tuple(int(k == i) for k in range(self.dim))

	def _br(self, a: Vector, b: Vector) -> Vector:
		"""Bracket of scalar coordinate vectors."""
		p = self.p
		out = [0] * self.dim
		for i, x in enumerate(a):
			if not x:
				continue
			for j, y in enumerate(b):
				if not y:
					continue
				for k, c in enumerate(self.table[i][j]):
					if c:
						out[k] = (out[k] + x * y * c) % p
		return tuple(out)

	@classmethod
	def from_mapping(cls, data: Mapping[str, Any]) -> 'AbstractRestrictedLie':
		"""
		Loads `{"p": 5, "dim": 3, "names": [...], "brackets": {"[0,1]": [...]}, "pth": [[...], ...]}`.

		Brackets not listed are zero; a listed [i,j] also determines [j,i]. `names` is optional.
		"""
		try:
			prime = Prime.of(int(data['p']))
			d = int(data['dim'])
			p = prime.p
			names = tuple(data.get('names') or (f'e{i}' for i in range(d)))
			table = [[[0] * d for _ in range(d)] for _ in range(d)]
			seen: dict[tuple[int, int], Vector] = {}
			for key, raw in data.get('brackets', {}).items():
				match = BRACKET_KEY_PATTERN.fullmatch(key)
				if match is None:
					raise InvalidStructureConstantsError(f'Bracket key {key!r} is not of the form "[i,j]"')
				i, j = int(match.group(1)), int(match.group(2))
				if i >= d or j >= d:
					raise InvalidStructureConstantsError(f'Bracket key {key!r} is out of range for dimension {d}')
				vector = tuple(int(c) % p for c in raw)
				if len(vector) != d:
					raise InvalidStructureConstantsError(f'Bracket {key!r} must have {d} coordinates')
				if i == j and any(vector):
					raise InvalidStructureConstantsError(f'Bracket {key!r} of a basis element with itself must vanish')
				negated = tuple((-c) % p for c in vector)
				if seen.get((j, i), negated) != negated:
					raise InvalidStructureConstantsError(f'Brackets [{i},{j}] and [{j},{i}] are not antisymmetric')
				seen[i, j] = vector
				table[i][j] = list(vector)
				table[j][i] = list(negated)
			pth = tuple(tuple(int(c) % p for c in row) for row in data['pth'])
		except (AttributeError, KeyError, OverflowError, TypeError, ValueError) as e:
			raise InvalidStructureConstantsError(f'Malformed algebra description: {e}') from e
		return cls(prime=prime, names=names, table=tuple(tuple(tuple(v) for v in row) for row in table), pth=pth)

	@classmethod
	def from_json(cls, path: str | Path) -> 'AbstractRestrictedLie':
		with open(path, encoding='utf-8') as f:
			try:
				data = json.load(f)
			except (json.JSONDecodeError, UnicodeDecodeError, RecursionError) as e:
				raise InvalidStructureConstantsError(f'{path} is not valid JSON: {e}') from e
		return cls.from_mapping(data)

	def to_mapping(self) -> dict[str, Any]:
		brackets = {f'[{i},{j}]': list(self.table[i][j]) for i in range(self.dim) for j in range(i + 1, self.dim) if any(self.table[i][j])}
		return {'p': self.p, 'dim': self.dim, 'names': list(self.names), 'brackets': brackets, 'pth': [list(v) for v in self.pth]}

	def element(self, coeffs: Sequence[Poly | int], ring: PolyRing | None = None) -> 'AbstractElt':
		"""An element Σ coeffs[i] e_i of R ⊗ g; integer coordinates default to R = F_p."""
		ring = ring or next((c.ring for c in coeffs if isinstance(c, Poly)), PolyRing.constants(self.prime))
		return AbstractElt(self, ring, [ring.constant(c) if isinstance(c, int) else c for c in coeffs])

	def basis(self, ring: PolyRing | None = None) -> list['AbstractElt']:
		return [self.element(list(self._unit(i)), ring) for i in range(self.dim)]


def _vadd(a: Vector, b: Vector, p: int) -> Vector:
	return tuple((x + y) % p for x, y in zip(a, b, strict=True))


class AbstractElt:
	"""An element Σ f_i e_i of R ⊗ g for an abstract restricted Lie algebra g."""

	__slots__ = ('algebra', 'coeffs', 'ring')

	algebra: AbstractRestrictedLie
	ring: PolyRing
	coeffs: tuple[Poly, ...]

	def __init__(self, algebra: AbstractRestrictedLie, ring: PolyRing, coeffs: Sequence[Poly]) -> None:
		if len(coeffs) != algebra.dim:
			raise AlgebraMismatchError(f'Expected {algebra.dim} coordinates, got {len(coeffs)}')
		if ring.p != algebra.p:
			raise AlgebraMismatchError('Coefficient ring and algebra have different characteristics')
		for c in coeffs:
			if c.ring != ring:
				raise RingMismatchError('Coordinates must live in the coefficient ring')
		self.algebra = algebra
		self.ring = ring
		self.coeffs = tuple(coeffs)

	@property
	def parent(self) -> tuple[AbstractRestrictedLie, PolyRing]:
		return self.algebra, self.ring

	def zero_like(self) -> 'AbstractElt':
		return AbstractElt(self.algebra, self.ring, [self.ring.zero()] * self.algebra.dim)

	def is_zero(self) -> bool:
		return all(c.is_zero() for c in self.coeffs)

	def __add__(self, other: 'AbstractElt') -> 'AbstractElt':
		if not isinstance(other, AbstractElt):
			return NotImplemented
		_check_same_parent(self, other)
		return AbstractElt(self.algebra, self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs, strict=True)])

	def __neg__(self) -> 'AbstractElt':
		return AbstractElt(self.algebra, self.ring, [-c for c in self.coeffs])

	def __sub__(self, other: 'AbstractElt') -> 'AbstractElt':
		if not isinstance(other, AbstractElt):
			return NotImplemented
		return self + (-other)

	def scale(self, c: Poly | int) -> 'AbstractElt':
		return AbstractElt(self.algebra, self.ring, [x * c for x in self.coeffs])

	def bracket(self, other: 'AbstractElt') -> 'AbstractElt':
		_check_same_parent(self, other)
		out = [self.ring.zero()] * self.algebra.dim
		for i, a in enumerate(self.coeffs):
			if a.is_zero():
				continue
			for j, b in enumerate(other.coeffs):
				if b.is_zero():
					continue
				ab = a * b
				for k, c in enumerate(self.algebra.table[i][j]):
					if c:
						out[k] = out[k] + ab.scale(c)
		return AbstractElt(self.algebra, self.ring, out)

	def p_power(self) -> 'AbstractElt':
		"""
		The restricted p-power.

		Writes the element as head + tail with head = f_k e_k the last nonzero direction and uses
		(head + tail)^[p] = f_k^p e_k^[p] + tail^[p] + Σ s_i(head, tail)/i.
		"""
		nonzero = [i for i, c in enumerate(self.coeffs) if not c.is_zero()]
		if not nonzero:
			return self.zero_like()
		k = nonzero[-1]
		f = self.coeffs[k]
		head_power = AbstractElt(self.algebra, self.ring, [f.frobenius() * c for c in self.algebra.pth[k]])
		if len(nonzero) == 1:
			return head_power
		head = AbstractElt(self.algebra, self.ring, [f if i == k else self.ring.zero() for i in range(self.algebra.dim)])
		tail = self - head
		return head_power + tail.p_power() + jacobson_correction(head, tail)

	def derive(self, D: Derivation) -> 'AbstractElt':
		return AbstractElt(self.algebra, self.ring, [D.apply(c) for c in self.coeffs])

	def __eq__(self, other: object) -> bool:
		if not isinstance(other, AbstractElt):
			return NotImplemented
		return self.parent == other.parent and self.coeffs == other.coeffs

	def __hash__(self) -> int:
		return hash(self.coeffs)

	def render(self) -> str:
		parts = [f'({c.render()})*{name}' for c, name in zip(self.coeffs, self.algebra.names, strict=True) if not c.is_zero()]
		return ' + '.join(parts) if parts else '0'

	def __repr__(self) -> str:
		return f'AbstractElt({self.render()!r})'


# Built-in algebras


def sl2(p: Prime | int) -> AbstractRestrictedLie:
	"""sl_2 with basis (e, h, f): [h,e] = 2e, [h,f] = −2f, [e,f] = h, e^[p] = f^[p] = 0, h^[p] = h."""
	return AbstractRestrictedLie.from_mapping(
		{
			'p': int(p),
			'dim': 3,
			'names': ['e', 'h', 'f'],
			'brackets': {'[1,0]': [2, 0, 0], '[1,2]': [0, 0, -2], '[0,2]': [0, 1, 0]},
			'pth': [[0, 0, 0], [0, 1, 0], [0, 0, 0]],
		}
	)


def aff1(p: Prime | int) -> AbstractRestrictedLie:
	"""Lie(Aff_1) with basis (a, b): [a,b] = b, a^[p] = a, b^[p] = 0."""
	return AbstractRestrictedLie.from_mapping({'p': int(p), 'dim': 2, 'names': ['a', 'b'], 'brackets': {'[0,1]': [0, 1]}, 'pth': [[1, 0], [0, 0]]})


def abelian(p: Prime | int, dim: int) -> AbstractRestrictedLie:
	"""Lie(G_m^dim): zero bracket and e_i^[p] = e_i."""
	return AbstractRestrictedLie.from_mapping(
		{'p': int(p), 'dim': dim, 'brackets': {}, 'pth': [[int(i == j) for j in range(dim)] for i in range(dim)]}
	)


def sl2_matrix_images(algebra: MatrixLieAlgebra) -> list[LieElt]:
	"""e ↦ E12, h ↦ diag(1, −1), f ↦ E21."""
	return [algebra.unit(0, 1), algebra.element([[1, 0], [0, -1]]), algebra.unit(1, 0)]


def aff1_matrix_images(algebra: MatrixLieAlgebra) -> list[LieElt]:
	"""a ↦ E11, b ↦ E12."""
	return [algebra.unit(0, 0), algebra.unit(0, 1)]


def matrix_image(elt: AbstractElt, images: Sequence[LieElt]) -> LieElt:
	"""Applies the linear map e_i ↦ images[i] to an element."""
	if len(images) != elt.algebra.dim:
		raise AlgebraMismatchError(f'Expected {elt.algebra.dim} images, got {len(images)}')
	result = images[0].zero_like()
	for c, image in zip(elt.coeffs, images, strict=True):
		if not c.is_zero():
			result = result + image.scale(c)
	return result


def check_isomorphism(algebra: AbstractRestrictedLie, images: Sequence[LieElt]) -> bool:
	"""True iff e_i ↦ images[i] respects brackets and p-powers on the basis."""
	ring = images[0].ring
	basis = algebra.basis(ring)
	for i, a in enumerate(basis):
		if matrix_image(a.p_power(), images) != images[i].p_power():
			return False
		for j, b in enumerate(basis):
			if matrix_image(a.bracket(b), images) != images[i].bracket(images[j]):
				return False
	return True


# Jacobson coefficients and identity checks


def si_coefficients[E: RestrictedElement](v: E, u: E) -> list[E]:
	"""
	Returns [s_1, ..., s_(p−1)] where s_i(v, u) is the coefficient of t^(i−1) in ad(vt + u)^(p−1)(v).

	The expansion keeps one element per power of t, so each step maps x·t^k to [v,x]·t^(k+1) + [u,x]·t^k.
	"""
	_check_same_parent(v, u)
	p = _characteristic(v)
	current = [v]
	for _ in range(p - 1):
		nxt = [v.zero_like() for _ in range(len(current) + 1)]
		for k, x in enumerate(current):
			if x.is_zero():
				continue
			nxt[k + 1] = nxt[k + 1] + v.bracket(x)
			nxt[k] = nxt[k] + u.bracket(x)
		current = nxt
	return current[: p - 1]


def _characteristic(v: RestrictedElement) -> int:
	parent = v.parent
	if isinstance(parent, tuple):
		return parent[0].p
	return parent.p


def jacobson_correction[E: RestrictedElement](v: E, u: E) -> E:
	"""Σ_(i=1)^(p−1) s_i(v, u)/i."""
	p = _characteristic(v)
	result = v.zero_like()
	for i, s in enumerate(si_coefficients(v, u), start=1):
		if not s.is_zero():
			result = result + s.scale(fp_inv(i, p))
	return result


def p_power[E: RestrictedElement](v: E) -> E:
	return v.p_power()


def jacobson_check(v: RestrictedElement, u: RestrictedElement) -> bool:
	"""(v + u)^[p] = v^[p] + u^[p] + Σ s_i(v, u)/i."""
	_check_same_parent(v, u)
	return (v + u).p_power() == v.p_power() + u.p_power() + jacobson_correction(v, u)


def l1123_check(v: RestrictedElement, u: RestrictedElement) -> bool:
	"""Σ s_i(v, u − v)/i = −Σ s_i(−v, u)/i."""
	_check_same_parent(v, u)
	return jacobson_correction(v, u - v) == -jacobson_correction(-v, u)


def ad_power_check(v: RestrictedElement, w: RestrictedElement) -> bool:
	"""(ad v)^p (w) = [v^[p], w]."""
	_check_same_parent(v, w)
	x = w
	for _ in range(_characteristic(v)):
		x = v.bracket(x)
	return x == v.p_power().bracket(w)


def homogeneity_check(a: int | Poly, v: RestrictedElement) -> bool:
	"""(a·v)^[p] = a^p · v^[p]."""
	a_p = a.frobenius() if isinstance(a, Poly) else pow(a, _characteristic(v), _characteristic(v))
	return v.scale(a).p_power() == v.p_power().scale(a_p)
