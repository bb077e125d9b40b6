"""Maurer–Cartan forms g^(-1)dg of the model groups G_m, G_a and Aff_1 and their multiplication/inversion identities."""

from collections.abc import Sequence
from enum import Enum

import logfire

from charpcartan.algebra.derham import DiffForm
from charpcartan.algebra.ffpoly import Poly, PolyRing, Prime
from charpcartan.geometry.connection import LieValuedForm

type PolyMatrix = list[list[Poly]]
type FormMatrix = list[list[DiffForm]]


class ModelGroup(str, Enum):
	GM = 'gm'
	GA = 'ga'
	AFF1 = 'aff1'


def group_ring(group: ModelGroup, p: Prime | int) -> PolyRing:
	"""Coordinate ring of the matrix model: F_p[x^±1], F_p[y] or F_p[x^±1, y]."""
	match group:
		case ModelGroup.GM:
			return PolyRing.build(p, ['x'], laurent=['x'])
		case ModelGroup.GA:
			return PolyRing.build(p, ['y'])
		case ModelGroup.AFF1:
			return PolyRing.build(p, ['x', 'y'], laurent=['x'])


def doubled_ring(ring: PolyRing) -> PolyRing:
	"""The coordinate ring of G × G: every variable `v` gets a copy `v2`."""
	names = [*ring.names, *(f'{name}2' for name in ring.names)]
	laurent = [v.name for v in ring.variables if v.laurent]
	return PolyRing.build(ring.prime, names, laurent=[*laurent, *(f'{name}2' for name in laurent)])


def group_matrix(group: ModelGroup, ring: PolyRing) -> PolyMatrix:
	"""The universal point g: (x), [[1, y], [0, 1]] or [[x, y], [0, 1]]."""
	one, zero = ring.one(), ring.zero()
	match group:
		case ModelGroup.GM:
			return [[ring.gen('x')]]
		case ModelGroup.GA:
			return [[one, ring.gen('y')], [zero, one]]
		case ModelGroup.AFF1:
			return [[ring.gen('x'), ring.gen('y')], [zero, one]]


def group_inverse_matrix(group: ModelGroup, ring: PolyRing) -> PolyMatrix:
	"""g^(-1) in closed form."""
	one, zero = ring.one(), ring.zero()
	match group:
		case ModelGroup.GM:
			return [[ring.gen('x') ** -1]]
		case ModelGroup.GA:
			return [[one, -ring.gen('y')], [zero, one]]
		case ModelGroup.AFF1:
			x_inv = ring.gen('x') ** -1
			return [[x_inv, -(x_inv * ring.gen('y'))], [zero, one]]


def multiplication_images(group: ModelGroup, doubled: PolyRing) -> list[Poly]:
	"""μ^*: the coordinates of g·g2 in terms of the doubled ring."""
	match group:
		case ModelGroup.GM:
			return [doubled.gen('x') * doubled.gen('x2')]
		case ModelGroup.GA:
			return [doubled.gen('y') + doubled.gen('y2')]
		case ModelGroup.AFF1:
			x, y, x2, y2 = doubled.gens()
			return [x * x2, x * y2 + y]


def inversion_images(group: ModelGroup, ring: PolyRing) -> list[Poly]:
	"""ι^*: the coordinates of g^(-1)."""
	match group:
		case ModelGroup.GM:
			return [ring.gen('x') ** -1]
		case ModelGroup.GA:
			return [-ring.gen('y')]
		case ModelGroup.AFF1:
			x_inv = ring.gen('x') ** -1
			return [x_inv, -(x_inv * ring.gen('y'))]


def _poly_times_forms(left: PolyMatrix, forms: FormMatrix, right: PolyMatrix) -> FormMatrix:
	"""left · forms · right for matrices of functions around a matrix of 1-forms."""
	n = len(forms)
	ring = forms[0][0].ring
	out = []
	for a in range(n):
		row = []
		for b in range(n):
			total = DiffForm.zero(ring)
			for c in range(n):
				for d in range(n):
					coefficient = left[a][c] * right[d][b]
					if not coefficient.is_zero() and not forms[c][d].is_zero():
						total = total + forms[c][d].scale(coefficient)
			row.append(total)
		out.append(row)
	return out


def _substitute_matrix(matrix: PolyMatrix, target: PolyRing, images: Sequence[Poly]) -> PolyMatrix:
	return [[x.substitute(target, images) for x in row] for row in matrix]


def _pullback_matrix(forms: FormMatrix, target: PolyRing, images: Sequence[Poly]) -> FormMatrix:
	return [[form.pullback(target, images) for form in row] for row in forms]


def maurer_cartan_matrix(group: ModelGroup, ring: PolyRing) -> FormMatrix:
	"""g^(-1) dg as a matrix of 1-forms."""
	g = group_matrix(group, ring)
	dg = [[DiffForm.differential(x) for x in row] for row in g]
	identity = [[ring.one() if a == b else ring.zero() for b in range(len(g))] for a in range(len(g))]
	return _poly_times_forms(group_inverse_matrix(group, ring), dg, identity)


def maurer_cartan(group: ModelGroup, p: Prime | int) -> LieValuedForm:
	"""The left-invariant Maurer–Cartan form of the matrix model, on the group's coordinate ring."""
	return LieValuedForm.from_matrix(maurer_cartan_matrix(group, group_ring(group, p)))


def mc_pullback_check(group: ModelGroup, p: Prime | int) -> bool:
	"""
	Checks μ^*ω = g2^(-1)(pr_1^*ω)g2 + pr_2^*ω on G × G and ι^*ω = −g ω g^(-1) on G.
	"""
	ring = group_ring(group, p)
	omega = maurer_cartan_matrix(group, ring)
	doubled = doubled_ring(ring)
	n = ring.nvars
	first = list(doubled.gens()[:n])
	second = list(doubled.gens()[n:])

	g2 = _substitute_matrix(group_matrix(group, ring), doubled, second)
	g2_inv = _substitute_matrix(group_inverse_matrix(group, ring), doubled, second)
	lhs = _pullback_matrix(omega, doubled, multiplication_images(group, doubled))
	conjugated = _poly_times_forms(g2_inv, _pullback_matrix(omega, doubled, first), g2)
	rhs = [[a + b for a, b in zip(r1, r2, strict=True)] for r1, r2 in zip(conjugated, _pullback_matrix(omega, doubled, second), strict=True)]
	multiplication_ok = lhs == rhs

	inverted = _pullback_matrix(omega, ring, inversion_images(group, ring))
	adjoint = _poly_times_forms(group_matrix(group, ring), omega, group_inverse_matrix(group, ring))
	inversion_ok = inverted == [[-form for form in row] for row in adjoint]

	logfire.debug('Maurer-Cartan pullback identities', group=group.value, p=int(p), multiplication=multiplication_ok, inversion=inversion_ok)
	return multiplication_ok and inversion_ok
