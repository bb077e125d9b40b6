import random

import pytest

from charpcartan.algebra.derham import (
	DiffForm,
	cartier,
	cartier_pairing_expanded,
	evaluate_2form,
	exterior_derivative,
	is_C_fixed,
	is_C_kernel,
	pairing,
	wedge,
)
from charpcartan.algebra.ffpoly import Derivation, Poly, PolyRing
from charpcartan.errors import DegreeError, NotClosedError, RingMismatchError
from charpcartan.selftest.generators import random_closed_form, random_poly

SEED = 7


class TestDiffForm:
	"""Tests construction, arithmetic and rendering of forms."""

	def test_unsorted_indices_carry_the_sign(self, f3xy: PolyRing) -> None:
		one = f3xy.one()
		assert DiffForm(f3xy, 2, {(1, 0): one}) == -DiffForm(f3xy, 2, {(0, 1): one})
		assert DiffForm(f3xy, 2, {(0, 0): one}).is_zero()

	def test_render(self, f3xy: PolyRing) -> None:
		x, _ = f3xy.gens()
		omega = DiffForm.one_form(f3xy, [x, f3xy.constant(2)])
		assert omega.render() == 'x*dx + 2*dy'
		assert wedge(DiffForm.dx(f3xy, 'x'), DiffForm.dx(f3xy, 'y')).render() == 'dx^dy'
		assert DiffForm.zero(f3xy).render() == '0'

	def test_degree_mismatch(self, f3xy: PolyRing) -> None:
		with pytest.raises(DegreeError):
			_ = DiffForm.dx(f3xy, 0) + DiffForm.zero(f3xy, 2)
		with pytest.raises(DegreeError):
			DiffForm(f3xy, -1)

	def test_ring_mismatch(self, f3x: PolyRing, f3xy: PolyRing) -> None:
		with pytest.raises(RingMismatchError):
			DiffForm(f3xy, 1, {(0,): f3x.one()})

	def test_dlog(self, f3x_laurent: PolyRing) -> None:
		x = f3x_laurent.gen('x')
		assert DiffForm.dlog(x.scale(2) * x) == DiffForm.dx(f3x_laurent, 'x').scale((x**-1).scale(2))

	def test_pullback(self, f3xy: PolyRing) -> None:
		target = PolyRing.build(3, ['t'])
		t = target.gen('t')
		omega = DiffForm.one_form(f3xy, [f3xy.gen('y'), f3xy.zero()])
		# x ↦ t^2, y ↦ t: y dx ↦ t · 2t dt
		assert omega.pullback(target, [t * t, t]) == DiffForm.dx(target, 't').scale((t * t).scale(2))


class TestExteriorDerivative:
	"""Tests d and the wedge product."""

	def test_examples(self, f3x: PolyRing, f3xy: PolyRing) -> None:
		x = f3x.gen('x')
		assert DiffForm.differential(x * x) == DiffForm.dx(f3x, 'x').scale(x.scale(2))
		a, _ = f3xy.gens()
		x_dy = DiffForm.dx(f3xy, 'y').scale(a)
		assert exterior_derivative(x_dy) == wedge(DiffForm.dx(f3xy, 'x'), DiffForm.dx(f3xy, 'y'))

	def test_d_squared_vanishes(self) -> None:
		rng = random.Random(SEED)
		ring = PolyRing.build(5, ['x', 'y', 'z'], laurent=['z'])
		for _ in range(20):
			f = random_poly(rng, ring, terms=5, degree=6)
			assert exterior_derivative(DiffForm.differential(f)).is_zero()

	def test_wedge_examples(self, f3xy: PolyRing) -> None:
		dx, dy = DiffForm.dx(f3xy, 'x'), DiffForm.dx(f3xy, 'y')
		x, y = f3xy.gens()
		assert wedge(dx, dx).is_zero()
		assert wedge(dx, dy) == -wedge(dy, dx)
		assert wedge(dx.scale(x), dy.scale(y)) == wedge(dx, dy).scale(x * y)

	def test_curves_have_no_2_forms(self, f3x: PolyRing) -> None:
		assert exterior_derivative(DiffForm.dx(f3x, 'x').scale(f3x.gen('x') ** 4)).is_zero()


class TestPairing:
	"""Tests the contraction of fields against forms."""

	def test_examples(self, f3xy: PolyRing, f3x_laurent: PolyRing) -> None:
		dx = DiffForm.dx(f3xy, 'x')
		assert pairing(Derivation.coordinate(f3xy, 'x'), dx) == 1
		assert pairing(Derivation.coordinate(f3xy, 'y'), dx).is_zero()
		x = f3x_laurent.gen('x')
		assert pairing(Derivation.euler(f3x_laurent, 'x'), DiffForm.dx(f3x_laurent, 'x').scale(x**-1)) == 1

	def test_needs_a_1_form(self, f3xy: PolyRing) -> None:
		with pytest.raises(DegreeError):
			pairing(Derivation.coordinate(f3xy, 'x'), DiffForm.zero(f3xy, 2))

	def test_evaluate_2form(self, f3xy: PolyRing) -> None:
		omega = wedge(DiffForm.dx(f3xy, 'x'), DiffForm.dx(f3xy, 'y'))
		dx, dy = Derivation.coordinate(f3xy, 'x'), Derivation.coordinate(f3xy, 'y')
		assert evaluate_2form(omega, dx, dy) == 1
		assert evaluate_2form(omega, dy, dx) == -1


class TestCartier:
	"""Tests the Cartier operator, its fixed points and its kernel."""

	def test_examples(self, f3x: PolyRing, f3x_laurent: PolyRing) -> None:
		x = f3x.gen('x')
		dx = DiffForm.dx(f3x, 'x')
		assert cartier(dx.scale(x * x)).value == dx
		assert cartier(dx).value.is_zero()
		dlog = DiffForm.dx(f3x_laurent, 'x').scale(f3x_laurent.gen('x') ** -1)
		assert cartier(dlog).value == dlog

	def test_not_closed(self, f3xy: PolyRing) -> None:
		with pytest.raises(NotClosedError):
			cartier(DiffForm.dx(f3xy, 'y').scale(f3xy.gen('x')))

	def test_needs_a_1_form(self, f3xy: PolyRing) -> None:
		with pytest.raises(DegreeError):
			cartier(DiffForm.zero(f3xy, 2))

	def test_fixed_points(self, f3x: PolyRing, f3x_laurent: PolyRing) -> None:
		assert is_C_fixed(DiffForm.dx(f3x_laurent, 'x').scale(f3x_laurent.gen('x') ** -1))
		assert not is_C_fixed(DiffForm.dx(f3x, 'x'))
		assert is_C_fixed(DiffForm.zero(f3x))

	def test_kernel(self, f3x: PolyRing, f3x_laurent: PolyRing) -> None:
		assert is_C_kernel(DiffForm.dx(f3x, 'x'))
		assert not is_C_kernel(DiffForm.dx(f3x_laurent, 'x').scale(f3x_laurent.gen('x') ** -1))
		assert is_C_kernel(DiffForm.dx(f3x, 'x').scale(f3x.gen('x')))

	def test_non_closed_forms_are_neither_fixed_nor_killed(self, f3xy: PolyRing) -> None:
		omega = DiffForm.dx(f3xy, 'y').scale(f3xy.gen('x'))
		assert not is_C_fixed(omega)
		assert not is_C_kernel(omega)

	@pytest.mark.parametrize('p', [3, 5, 7])
	def test_exact_forms_are_killed(self, p: int) -> None:
		rng = random.Random(SEED + p)
		ring = PolyRing.build(p, ['x', 'y'], laurent=['x'])
		for _ in range(10):
			assert cartier(DiffForm.differential(random_poly(rng, ring, terms=4, degree=2 * p))).value.is_zero()

	@pytest.mark.parametrize('p', [3, 5, 7])
	def test_semilinearity(self, p: int) -> None:
		rng = random.Random(SEED * p)
		ring = PolyRing.build(p, ['x', 'y'], laurent=['x'])
		for _ in range(10):
			omega = random_closed_form(rng, ring)
			f = random_poly(rng, ring, terms=2, degree=1)
			assert cartier(omega.scale(f.frobenius())).value == cartier(omega).value.scale(f)

	def test_largest_prime(self) -> None:
		p = 2_147_483_647
		ring = PolyRing.build(p, ['x', 'y'], laurent=['x'])
		x, y = ring.gens()
		dx, dy = DiffForm.dx(ring, 'x'), DiffForm.dx(ring, 'y')
		assert cartier(dx + dy.scale(y)).value.is_zero()
		assert cartier(dx.scale(x ** (p - 1)) + dy.scale(y ** (2 * p - 1))).value == dx + dy.scale(y)
		assert is_C_fixed(DiffForm.dlog(x))

	@pytest.mark.parametrize('p', [3, 5, 7])
	def test_additive_on_logarithmic_forms(self, p: int) -> None:
		rng = random.Random(SEED + 2 * p)
		ring = PolyRing.build(p, ['x', 'y'], laurent=['x', 'y'])

		def unit() -> Poly:
			return Poly.monomial(ring, [rng.randint(-2 * p, 2 * p) for _ in range(ring.nvars)], rng.randrange(1, p))

		for _ in range(20):
			u, v = unit(), unit()
			assert cartier(DiffForm.dlog(u * v)).value == cartier(DiffForm.dlog(u)).value + cartier(DiffForm.dlog(v)).value
			assert is_C_fixed(DiffForm.dlog(u * v))

	def test_pairing_expanded(self, f3x: PolyRing) -> None:
		x = f3x.gen('x')
		omega = DiffForm.dx(f3x, 'x').scale(x**5)  # C(x^5 dx) = x dx
		D = Derivation(f3x, [x.scale(2)])
		assert cartier_pairing_expanded(D, omega) == (x**3).scale(2) * x**3
