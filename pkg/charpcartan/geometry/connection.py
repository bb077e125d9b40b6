"""
Lie-algebra-valued 1-forms and connections d + A on trivial bundles over the model spaces.

Curvature and p-curvature are computed twice: from the form through the Lie structure (curvature via the values on
coordinate field pairs, p-curvature through the Jacobson coefficients of the semidirect algebra) and from the
connection matrix as an operator (dA + A∧A, and the p-th power of ∇_D applied to basis columns).
"""

from collections.abc import Sequence

import logfire
from pydantic import BaseModel, ConfigDict

from charpcartan.algebra.derham import DiffForm, cartier_pairing_expanded, exterior_derivative, pairing, wedge
from charpcartan.algebra.ffpoly import Derivation, Poly, PolyRing
from charpcartan.algebra.rlie import AbstractElt, AbstractRestrictedLie, LieElt, MatrixLieAlgebra, jacobson_correction
from charpcartan.errors import AlgebraMismatchError, DegreeError, NotClosedError, RingMismatchError

type LieValue = LieElt | AbstractElt


def _coordinates(elt: LieValue) -> list[Poly]:
	"""Coordinates in the basis of `LieValuedForm.basis` (row-major matrix units for gl_n)."""
	if isinstance(elt, LieElt):
		return [x for row in elt.entries for x in row]
	return list(elt.coeffs)


class LieValuedForm:
	"""ω = Σ ω_k ⊗ b_k, one 1-form per basis element b_k of the Lie algebra."""

	__slots__ = ('algebra', 'components', 'ring')

	algebra: MatrixLieAlgebra | AbstractRestrictedLie
	ring: PolyRing
	components: tuple[DiffForm, ...]

	def __init__(self, algebra: MatrixLieAlgebra | AbstractRestrictedLie, ring: PolyRing, components: Sequence[DiffForm]) -> None:
		dim = algebra.n**2 if isinstance(algebra, MatrixLieAlgebra) else algebra.dim
		if len(components) != dim:
			raise AlgebraMismatchError(f'Expected {dim} components, got {len(components)}')
		if isinstance(algebra, MatrixLieAlgebra) and algebra.ring != ring:
			raise RingMismatchError('Matrix algebra and forms must share a ring')
		for form in components:
			if form.ring != ring:
				raise RingMismatchError('All components must live on the same ring')
			if form.degree != 1:
				raise DegreeError(f'Components must be 1-forms, got degree {form.degree}')
		self.algebra = algebra
		self.ring = ring
		self.components = tuple(components)

	@classmethod
	def from_matrix(cls, forms: Sequence[Sequence[DiffForm]]) -> 'LieValuedForm':
		"""A gl_n-valued form given as an n×n matrix of 1-forms."""
		ring = forms[0][0].ring
		return cls(MatrixLieAlgebra(n=len(forms), ring=ring), ring, [form for row in forms for form in row])

	@classmethod
	def scalar(cls, omega: DiffForm) -> 'LieValuedForm':
		"""A 1-form viewed as a gl_1-valued form."""
		return cls.from_matrix([[omega]])

	@property
	def is_matrix(self) -> bool:
		return isinstance(self.algebra, MatrixLieAlgebra)

	def basis(self) -> list[LieValue]:
		if isinstance(self.algebra, MatrixLieAlgebra):
			return self.algebra.basis()
		return self.algebra.basis(self.ring)

	def matrix(self) -> list[list[DiffForm]]:
		if not isinstance(self.algebra, MatrixLieAlgebra):
			raise AlgebraMismatchError('Only gl_n-valued forms have a matrix of forms')
		n = self.algebra.n
		return [list(self.components[a * n : (a + 1) * n]) for a in range(n)]

	def evaluate(self, D: Derivation) -> LieValue:
		"""The Lie algebra element ω(D) with polynomial coefficients."""
		result = None
		for form, b in zip(self.components, self.basis(), strict=True):
			term = b.scale(pairing(D, form))
			result = term if result is None else result + term
		return result

	def is_zero(self) -> bool:
		return all(form.is_zero() for form in self.components)

	def render(self) -> list[str]:
		return [form.render() for form in self.components]


class ConnMatrix:
	"""The connection ∇ = d + A on the free module of rank n, A an n×n matrix of 1-forms."""

	__slots__ = ('forms', 'n', 'ring')

	ring: PolyRing
	n: int
	forms: tuple[tuple[DiffForm, ...], ...]

	def __init__(self, forms: Sequence[Sequence[DiffForm]]) -> None:
		n = len(forms)
		if n == 0 or any(len(row) != n for row in forms):
			raise AlgebraMismatchError('A connection matrix must be a nonempty square matrix')
		ring = forms[0][0].ring
		for row in forms:
			for form in row:
				if form.ring != ring:
					raise RingMismatchError('All connection forms must live on the same ring')
				if form.degree != 1:
					raise DegreeError(f'Connection entries must be 1-forms, got degree {form.degree}')
		self.ring = ring
		self.n = n
		self.forms = tuple(tuple(row) for row in forms)

	@classmethod
	def zero(cls, ring: PolyRing, n: int) -> 'ConnMatrix':
		return cls([[DiffForm.zero(ring) for _ in range(n)] for _ in range(n)])

	@classmethod
	def from_form(cls, omega: LieValuedForm) -> 'ConnMatrix':
		return cls(omega.matrix())

	@classmethod
	def chi_dagger(cls, chi: DiffForm) -> 'ConnMatrix':
		"""The rank-2 connection d + [[0, χ], [0, 0]]."""
		zero = DiffForm.zero(chi.ring)
		return cls([[zero, chi], [zero, zero]])

	@property
	def algebra(self) -> MatrixLieAlgebra:
		return MatrixLieAlgebra(n=self.n, ring=self.ring)

	def to_form(self) -> LieValuedForm:
		return LieValuedForm.from_matrix(self.forms)

	def at(self, D: Derivation) -> LieElt:
		"""The matrix A(D) of contractions."""
		return self.algebra.element([[pairing(D, form) for form in row] for row in self.forms])

	def apply(self, D: Derivation, vector: Sequence[Poly]) -> list[Poly]:
		"""∇_D v = D(v) + A(D)·v on a column of polynomials."""
		moved = self.at(D).apply(vector)
		return [D.apply(x) + y for x, y in zip(vector, moved, strict=True)]

	def render(self) -> list[list[str]]:
		return [[form.render() for form in row] for row in self.forms]


def operator_power(A: ConnMatrix, D: Derivation, vector: Sequence[Poly]) -> list[Poly]:
	"""(∇_D)^p applied to a column."""
	vector = list(vector)
	for _ in range(A.ring.p):
		vector = A.apply(D, vector)
	return vector


class SemidirectElt:
	"""An element (D, v) of T_X ⋉ (O_X ⊗ g)."""

	__slots__ = ('field_part', 'lie_part')

	field_part: Derivation
	lie_part: LieValue

	def __init__(self, field_part: Derivation, lie_part: LieValue) -> None:
		if field_part.ring != lie_part.ring:
			raise RingMismatchError('Field and Lie parts must share a ring')
		self.field_part = field_part
		self.lie_part = lie_part

	@property
	def parent(self) -> tuple[PolyRing, object]:
		return self.field_part.ring, self.lie_part.parent

	def zero_like(self) -> 'SemidirectElt':
		return SemidirectElt(Derivation.zero(self.field_part.ring), self.lie_part.zero_like())

	def is_zero(self) -> bool:
		return self.field_part.is_zero() and self.lie_part.is_zero()

	def __add__(self, other: 'SemidirectElt') -> 'SemidirectElt':
		return SemidirectElt(self.field_part + other.field_part, self.lie_part + other.lie_part)

	def __neg__(self) -> 'SemidirectElt':
		return SemidirectElt(-self.field_part, -self.lie_part)

	def __sub__(self, other: 'SemidirectElt') -> 'SemidirectElt':
		return self + (-other)

	def scale(self, c: int) -> 'SemidirectElt':
		return SemidirectElt(self.field_part.scale(c), self.lie_part.scale(c))

	def bracket(self, other: 'SemidirectElt') -> 'SemidirectElt':
		return semidirect_bracket(self, other)

	def p_power(self) -> 'SemidirectElt':
		"""(D, v)^[p] = (D^[p], v^[p] + Σ s_i(D, v)/i)."""
		D, v = self.field_part, self.lie_part
		correction = jacobson_correction(SemidirectElt(D, v.zero_like()), SemidirectElt(Derivation.zero(D.ring), v))
		return SemidirectElt(D.p_power(), v.p_power() + correction.lie_part)

	def __eq__(self, other: object) -> bool:
		if not isinstance(other, SemidirectElt):
			return NotImplemented
		return self.field_part == other.field_part and self.lie_part == other.lie_part

	def __hash__(self) -> int:
		return hash((self.field_part, self.lie_part))

	def __repr__(self) -> str:
		return f'SemidirectElt({self.field_part.render()!r}, {self.lie_part.render()!r})'


def semidirect_bracket(a: SemidirectElt, b: SemidirectElt) -> SemidirectElt:
	"""[(D1, v1), (D2, v2)] = ([D1, D2], [v1, v2] + D1(v2) − D2(v1))."""
	if a.parent != b.parent:
		raise AlgebraMismatchError('Semidirect elements over different rings or algebras')
	D1, v1 = a.field_part, a.lie_part
	D2, v2 = b.field_part, b.lie_part
	return SemidirectElt(D1.bracket(D2), v1.bracket(v2) + v2.derive(D1) - v1.derive(D2))


class Curvature2Form(BaseModel):
	"""A g-valued 2-form, one 2-form per basis element."""

	model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

	components: tuple[DiffForm, ...]

	def is_zero(self) -> bool:
		return all(form.is_zero() for form in self.components)

	def render(self) -> list[str]:
		return [form.render() for form in self.components]


class PCurvature(BaseModel):
	"""Values of the p-curvature at the coordinate fields ∂/∂x_1, ..., ∂/∂x_n."""

	model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

	values: tuple[LieElt | AbstractElt, ...]
	formal: bool = False  # the input was not flat, so the values carry no geometric meaning

	def is_zero(self) -> bool:
		return all(value.is_zero() for value in self.values)

	def render(self) -> list[str]:
		return [value.render() for value in self.values]


def curvature_form(omega: LieValuedForm) -> Curvature2Form:
	"""
	ψ = dω + ½[ω, ω], evaluated on coordinate field pairs as
	ψ(∂_i, ∂_j) = ∂_i(ω(∂_j)) − ∂_j(ω(∂_i)) + [ω(∂_i), ω(∂_j)] − ω([∂_i, ∂_j]).
	"""
	ring = omega.ring
	fields = [Derivation.coordinate(ring, i) for i in range(ring.nvars)]
	values = [omega.evaluate(D) for D in fields]
	coeffs: list[dict[tuple[int, int], Poly]] = [{} for _ in omega.components]
	for i in range(ring.nvars):
		for j in range(i + 1, ring.nvars):
			psi = values[j].derive(fields[i]) - values[i].derive(fields[j]) + values[i].bracket(values[j])
			psi = psi - omega.evaluate(fields[i].bracket(fields[j]))
			for k, c in enumerate(_coordinates(psi)):
				if not c.is_zero():
					coeffs[k][i, j] = c
	return Curvature2Form(components=tuple(DiffForm(ring, 2, c) for c in coeffs))


def curvature_operator(A: ConnMatrix) -> Curvature2Form:
	"""dA + A∧A, entry by entry."""
	components = []
	for a in range(A.n):
		for b in range(A.n):
			F = exterior_derivative(A.forms[a][b])
			for c in range(A.n):
				F = F + wedge(A.forms[a][c], A.forms[c][b])
			components.append(F)
	return Curvature2Form(components=tuple(components))


def p_curvature_form_at(omega: LieValuedForm, D: Derivation) -> LieValue:
	"""ω(D)^[p] − ω(D^[p]) + Σ s_i(D, ω(D))/i, the s_i taken in the semidirect algebra."""
	value = omega.evaluate(D)
	correction = jacobson_correction(SemidirectElt(D, value.zero_like()), SemidirectElt(Derivation.zero(D.ring), value))
	return value.p_power() - omega.evaluate(D.p_power()) + correction.lie_part


def p_curvature_form(omega: LieValuedForm) -> PCurvature:
	"""
	The p-curvature of a flat g-valued 1-form at every coordinate field.

	Non-flat input is still evaluated; the result is then marked `formal`.
	"""
	ring = omega.ring
	flat = curvature_form(omega).is_zero()
	if not flat:
		logfire.warn('p-curvature of a non-flat form is only formal', form=omega.render())
	values = tuple(p_curvature_form_at(omega, Derivation.coordinate(ring, i)) for i in range(ring.nvars))
	return PCurvature(values=values, formal=not flat)


def p_curvature_at(pc: PCurvature, D: Derivation) -> LieValue:
	"""Extends the p-curvature to D = Σ g_i ∂_i Frobenius-semilinearly: Σ g_i^p ψ(∂_i)."""
	if not pc.values:
		raise DegreeError('The ring has no coordinate fields')
	if len(D.coeffs) != len(pc.values):
		raise RingMismatchError('Derivation and p-curvature live on different rings')
	result = pc.values[0].zero_like()
	for g, value in zip(D.coeffs, pc.values, strict=True):
		if not g.is_zero():
			result = result + value.scale(g.frobenius())
	return result


def p_curvature_operator(A: ConnMatrix, D: Derivation) -> LieElt:
	"""The matrix of (∇_D)^p − ∇_(D^[p]), column j obtained by applying the operator to the j-th standard basis vector."""
	if A.ring != D.ring:
		raise RingMismatchError('Connection and derivation live on different rings')
	ring = A.ring
	D_p = D.p_power()
	columns = []
	for j in range(A.n):
		e_j = [ring.one() if i == j else ring.zero() for i in range(A.n)]
		powered = operator_power(A, D, e_j)
		columns.append([x - y for x, y in zip(powered, A.apply(D_p, e_j), strict=True)])
	return A.algebra.element([[columns[j][i] for j in range(A.n)] for i in range(A.n)])


def p_curvature_abelian(omega: DiffForm, D: Derivation) -> Poly:
	"""
	The rank-1 p-curvature ⟨D, ω⟩^p − ⟨F_S^*(D), C(ω)⟩ of a closed 1-form.

	:raises NotClosedError: if ω is not closed.
	"""
	return pairing(D, omega) ** omega.ring.p - cartier_pairing_expanded(D, omega)


def lemma_ga_check(chi: DiffForm) -> bool:
	"""
	True iff for every coordinate field ∂_i the p-curvature of d + [[0, χ], [0, 0]] equals −[[0, h_i], [0, 0]], where h_i is
	the i-th coefficient of C(χ) written on X.

	:raises NotClosedError: if χ is not closed.
	"""
	if not chi.is_closed():
		raise NotClosedError(f'{chi.render()} is not closed')
	ring = chi.ring
	A = ConnMatrix.chi_dagger(chi)
	for i in range(ring.nvars):
		D = Derivation.coordinate(ring, i)
		expected = A.algebra.element([[0, -cartier_pairing_expanded(D, chi)], [0, 0]])
		if p_curvature_operator(A, D) != expected:
			logfire.debug('Upper-triangular p-curvature mismatch', chi=chi.render(), index=i)
			return False
	return True
