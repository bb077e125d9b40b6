"""
Differential forms on the model spaces, the exterior derivative and the Cartier operator.

The Frobenius twist X^(1) of a model space over F_p is identified with X itself: the output of the Cartier operator
lives on the same ring, the variable y_i of the twist being written as x_i.
"""

from collections.abc import Iterator, Mapping, Sequence
from itertools import combinations

import logfire
from pydantic import BaseModel, ConfigDict

from charpcartan.algebra.ffpoly import Derivation, Poly, PolyRing, _check_same_ring, _render_monomial
from charpcartan.errors import DegreeError, InternalCartierError, InvalidRingError, NotClosedError, NotInFrobeniusSubringError, RingMismatchError

Indices = tuple[int, ...]


def _sort_with_sign(indices: Sequence[int]) -> tuple[int, Indices]:
	"""Returns the sign of the permutation sorting `indices` and the sorted tuple, or sign 0 on repeated indices."""
	if len(set(indices)) != len(indices):
		return 0, ()
	inversions = sum(1 for a, b in combinations(indices, 2) if a > b)
	return (-1) ** inversions, tuple(sorted(indices))


class DiffForm:
	"""
	A q-form Σ f_I dx_I with I running over strictly increasing index tuples.

	Coefficients given for unsorted index tuples are reordered with the permutation sign; repeated indices vanish.
	"""

	__slots__ = ('coeffs', 'degree', 'ring')

	ring: PolyRing
	degree: int
	coeffs: dict[Indices, Poly]

	def __init__(self, ring: PolyRing, degree: int, coeffs: Mapping[Sequence[int], Poly] | None = None) -> None:
		if degree < 0:
			raise DegreeError(f'Form degree must be nonnegative, got {degree}')
		clean: dict[Indices, Poly] = {}
		for raw, f in (coeffs or {}).items():
			if len(raw) != degree:
				raise DegreeError(f'Index tuple {tuple(raw)} does not have length {degree}')
			if any(i < 0 or i >= ring.nvars for i in raw):
				raise InvalidRingError(f'Index tuple {tuple(raw)} refers to a missing variable')
			if f.ring != ring:
				raise RingMismatchError('Form coefficients must live in the form ring')
			sign, indices = _sort_with_sign(raw)
			if sign == 0:
				continue
			clean[indices] = clean.get(indices, ring.zero()) + f.scale(sign)
		self.ring = ring
		self.degree = degree
		self.coeffs = {indices: f for indices, f in clean.items() if not f.is_zero()}

	@classmethod
	def _make(cls, ring: PolyRing, degree: int, coeffs: dict[Indices, Poly]) -> 'DiffForm':
		form = object.__new__(cls)
		form.ring = ring
		form.degree = degree
		form.coeffs = {indices: f for indices, f in coeffs.items() if not f.is_zero()}
		return form

	# Constructors

	@classmethod
	def zero(cls, ring: PolyRing, degree: int = 1) -> 'DiffForm':
		return cls(ring, degree)

	@classmethod
	def function(cls, f: Poly) -> 'DiffForm':
		"""The 0-form f."""
		return cls._make(f.ring, 0, {(): f})

	@classmethod
	def one_form(cls, ring: PolyRing, coefficients: Sequence[Poly]) -> 'DiffForm':
		"""The 1-form Σ coefficients[i] dx_i."""
		if len(coefficients) != ring.nvars:
			raise DegreeError(f'A 1-form needs {ring.nvars} coefficients, got {len(coefficients)}')
		return cls(ring, 1, {(i,): f for i, f in enumerate(coefficients)})

	@classmethod
	def dx(cls, ring: PolyRing, var: int | str) -> 'DiffForm':
		i = ring.index(var) if isinstance(var, str) else var
		return cls(ring, 1, {(i,): ring.one()})

	@classmethod
	def differential(cls, f: Poly) -> 'DiffForm':
		"""The exact 1-form df."""
		return cls._make(f.ring, 1, {(i,): f.derivative(i) for i in range(f.ring.nvars)})

	@classmethod
	def dlog(cls, u: Poly) -> 'DiffForm':
		"""u^(-1) du for a monomial unit u."""
		inverse = u.inverse()
		return cls.differential(u).scale(inverse)

	# Inspection

	def is_zero(self) -> bool:
		return not self.coeffs

	def coefficient(self, i: int) -> Poly:
		"""The coefficient of dx_i of a 1-form."""
		if self.degree != 1:
			raise DegreeError(f'coefficient() needs a 1-form, got degree {self.degree}')
		return self.coeffs.get((i,), self.ring.zero())

	def coefficients(self) -> tuple[Poly, ...]:
		return tuple(self.coefficient(i) for i in range(self.ring.nvars))

	def items(self) -> Iterator[tuple[Indices, Poly]]:
		"""Coefficients in canonical (ascending index tuple) order."""
		yield from sorted(self.coeffs.items(), key=lambda item: item[0])

	def is_closed(self) -> bool:
		return exterior_derivative(self).is_zero()

	# Arithmetic

	def _check_compatible(self, other: 'DiffForm') -> None:
		_check_same_ring(self, other)
		if self.degree != other.degree:
			raise DegreeError(f'Cannot add forms of degree {self.degree} and {other.degree}')

	def __add__(self, other: 'DiffForm') -> 'DiffForm':
		if not isinstance(other, DiffForm):
			return NotImplemented
		self._check_compatible(other)
		coeffs = dict(self.coeffs)
		for indices, f in other.coeffs.items():
			coeffs[indices] = coeffs[indices] + f if indices in coeffs else f
		return DiffForm._make(self.ring, self.degree, coeffs)

	def __neg__(self) -> 'DiffForm':
		return DiffForm._make(self.ring, self.degree, {indices: -f for indices, f in self.coeffs.items()})

	def __sub__(self, other: 'DiffForm') -> 'DiffForm':
		if not isinstance(other, DiffForm):
			return NotImplemented
		return self + (-other)

	def scale(self, f: Poly | int) -> 'DiffForm':
		"""Multiplies every coefficient by the function (or scalar) f."""
		return DiffForm._make(self.ring, self.degree, {indices: g * f for indices, g in self.coeffs.items()})

	def frobenius_expand(self) -> 'DiffForm':
		"""
		Raises every coefficient to the p-th power.

		Applied to a Cartier output this writes F^*(C(ω)) in the frame F^*(dy_i), which is how the twisted coordinates are
		compared against objects on X.
		"""
		return DiffForm._make(self.ring, self.degree, {indices: f.frobenius() for indices, f in self.coeffs.items()})

	def pullback(self, target: PolyRing, images: Sequence[Poly]) -> 'DiffForm':
		"""Pulls back along the ring map x_i ↦ images[i]: f dx_I ↦ φ(f) dφ(x_i1) ∧ … ∧ dφ(x_iq)."""
		differentials = [DiffForm.differential(image) for image in images]
		result = DiffForm.zero(target, self.degree)
		for indices, f in self.coeffs.items():
			term = DiffForm.function(f.substitute(target, images))
			for i in indices:
				term = wedge(term, differentials[i])
			result = result + term
		return result

	def __eq__(self, other: object) -> bool:
		if not isinstance(other, DiffForm):
			return NotImplemented
		return self.degree == other.degree and self.ring == other.ring and self.coeffs == other.coeffs

	def __hash__(self) -> int:
		return hash((self.degree, frozenset(self.coeffs.items())))

	def render(self) -> str:
		"""Renders the form in the CLI grammar, one monomial per term, e.g. `x*dx + 2*dy` or `dx^dy`."""
		if self.degree == 0:
			return self.coeffs.get((), self.ring.zero()).render()
		parts = []
		names = self.ring.names
		for indices, f in self.items():
			wedge_symbol = '^'.join(f'd{names[i]}' for i in indices)
			parts.extend(_render_monomial(names, exps, c, extra=[wedge_symbol]) for exps, c in f.sorted_terms())
		return ' + '.join(parts) if parts else '0'

	def __str__(self) -> str:
		return self.render()

	def __repr__(self) -> str:
		return f'DiffForm({self.render()!r})'


def exterior_derivative(omega: DiffForm) -> DiffForm:
	"""d(f dx_I) = Σ_j ∂_j f dx_j ∧ dx_I."""
	ring = omega.ring
	coeffs: dict[Indices, Poly] = {}
	for indices, f in omega.coeffs.items():
		for j in range(ring.nvars):
			if j in indices:
				continue
			g = f.derivative(j)
			if g.is_zero():
				continue
			before = sum(1 for i in indices if i < j)
			target = tuple(sorted((*indices, j)))
			g = -g if before % 2 else g
			coeffs[target] = coeffs[target] + g if target in coeffs else g
	return DiffForm._make(ring, omega.degree + 1, coeffs)


def wedge(alpha: DiffForm, beta: DiffForm) -> DiffForm:
	"""Graded-commutative exterior product."""
	_check_same_ring(alpha, beta)
	degree = alpha.degree + beta.degree
	coeffs: dict[Indices, Poly] = {}
	for i_indices, f in alpha.coeffs.items():
		for j_indices, g in beta.coeffs.items():
			sign, indices = _sort_with_sign(i_indices + j_indices)
			if sign == 0:
				continue
			product = f * g if sign > 0 else -(f * g)
			coeffs[indices] = coeffs[indices] + product if indices in coeffs else product
	return DiffForm._make(alpha.ring, degree, coeffs)


def pairing(D: Derivation, omega: DiffForm) -> Poly:
	"""
	The contraction ⟨D, ω⟩ = Σ f_i · (coefficient of dx_i) of a field against a 1-form.

	:raises DegreeError: if ω is not a 1-form.
	"""
	if omega.degree != 1:
		raise DegreeError(f'Pairing needs a 1-form, got degree {omega.degree}')
	_check_same_ring(D, omega)
	result = D.ring.zero()
	for (i,), f in omega.coeffs.items():
		result = result + D.coeffs[i] * f
	return result


def evaluate_2form(omega: DiffForm, D1: Derivation, D2: Derivation) -> Poly:
	"""The value ω(D1, D2) of a 2-form, with (dx_i ∧ dx_j)(D1, D2) = a_i b_j − a_j b_i."""
	if omega.degree != 2:  # noqa: PLR2004
		raise DegreeError(f'Expected a 2-form, got degree {omega.degree}')
	result = omega.ring.zero()
	for (i, j), f in omega.coeffs.items():
		result = result + f * (D1.coeffs[i] * D2.coeffs[j] - D1.coeffs[j] * D2.coeffs[i])
	return result


class CartierResult(BaseModel):
	"""C(ω) as a 1-form on the twist, the twisted variable y_i being written as x_i."""

	model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

	value: DiffForm


def _top_derivative(f: Poly, i: int) -> Poly:
	"""
	−∂_i^(p−1)(f) in closed form.

	On x_i^e the iterate is e(e−1)⋯(e−p+2) x_i^(e−p+1); the product runs over every residue but e+1, so by Wilson's
	theorem it is −1 when e ≡ −1 (mod p) and 0 otherwise.
	"""
	p = f.ring.p
	terms = {}
	for exps, c in f.terms.items():
		if exps[i] % p == p - 1:
			terms[(*exps[:i], exps[i] - (p - 1), *exps[i + 1 :])] = c
	return Poly._make(f.ring, terms)


def cartier(omega: DiffForm) -> CartierResult:
	"""
	Applies the Cartier operator to a closed 1-form.

	On the coordinate field ∂_i (whose p-power vanishes) the defining formula reduces to h_i = −∂_i^(p−1)(f_i), which lies
	in the Frobenius subring; the i-th coefficient of C(ω) is its p-th root.

	:raises NotClosedError: if dω ≠ 0.
	"""
	if omega.degree != 1:
		raise DegreeError(f'The Cartier operator is implemented on 1-forms, got degree {omega.degree}')
	if not omega.is_closed():
		raise NotClosedError(f'{omega.render()} is not closed')
	ring = omega.ring
	coefficients = []
	for i, f in enumerate(omega.coefficients()):
		h = _top_derivative(f, i)
		try:
			coefficients.append(h.pth_root())
		except NotInFrobeniusSubringError as e:
			logfire.error('Cartier coefficient outside the Frobenius subring', form=omega.render(), index=i)
			raise InternalCartierError(f'Cartier coefficient {i} of the closed form {omega.render()} is not a p-th power') from e
	return CartierResult(value=DiffForm.one_form(ring, coefficients))


def is_C_fixed(omega: DiffForm) -> bool:
	"""True iff ω is a closed 1-form with C(ω) = ω under the identification of the twist."""
	if omega.degree != 1 or not omega.is_closed():
		return False
	return cartier(omega).value == omega


def is_C_kernel(omega: DiffForm) -> bool:
	"""True iff ω is a closed 1-form with C(ω) = 0."""
	if omega.degree != 1 or not omega.is_closed():
		return False
	return cartier(omega).value.is_zero()


def cartier_pairing_expanded(D: Derivation, omega: DiffForm) -> Poly:
	"""Σ g_i^p · h_i for D = Σ g_i ∂_i, i.e. ⟨F_S^*(D), C(ω)⟩ written on X."""
	expanded = cartier(omega).value.frobenius_expand()
	result = D.ring.zero()
	for g, h in zip(D.coeffs, expanded.coefficients(), strict=True):
		if not g.is_zero() and not h.is_zero():
			result = result + g.frobenius() * h
	return result
