import random

import pytest

from charpcartan.algebra.ffpoly import (
	Derivation,
	Poly,
	PolyRing,
	Prime,
	derivation_bracket,
	derivation_p_power,
	fp_inv,
	partial_derivative,
	poly_mul,
	pth_root,
)
from charpcartan.errors import (
	DivisionByZeroError,
	InvalidPrimeError,
	InvalidRingError,
	NegativeExponentError,
	NotInFrobeniusSubringError,
	NotInvertibleError,
	RingMismatchError,
)
from charpcartan.selftest.generators import random_derivation, random_poly

SEED = 11


class TestPrime:
	"""Tests the validation of the characteristic."""

	@pytest.mark.parametrize('p', [3, 5, 7, 2_147_483_647])
	def test_accepts_odd_primes(self, p: int) -> None:
		assert Prime(p=p).p == p
		assert int(Prime.of(p)) == p

	@pytest.mark.parametrize('p', [2, 1, 0, -3, 9, 15, 2**31 + 11])
	def test_rejects_other_integers(self, p: int) -> None:
		with pytest.raises(InvalidPrimeError):
			Prime(p=p)

	def test_two_has_dedicated_message(self) -> None:
		with pytest.raises(InvalidPrimeError, match='p = 2'):
			Prime.of(2)


class TestFpInv:
	"""Tests inversion in F_p."""

	@pytest.mark.parametrize(('a', 'p', 'expected'), [(2, 3, 2), (1, 7, 1), (3, 7, 5), (-1, 5, 4)])
	def test_inverse(self, a: int, p: int, expected: int) -> None:
		assert fp_inv(a, p) == expected
		assert (a * fp_inv(a, p)) % p == 1

	@pytest.mark.parametrize('a', [0, 3, 9])
	def test_zero_has_no_inverse(self, a: int) -> None:
		with pytest.raises(DivisionByZeroError):
			fp_inv(a, 3)


class TestPolyRing:
	"""Tests the construction of coordinate rings."""

	def test_build(self) -> None:
		ring = PolyRing.build(5, ['x', 'y'], laurent=['x'])
		assert ring.p == 5  # noqa: PLR2004
		assert ring.names == ('x', 'y')
		assert ring.laurent_flags == (True, False)
		assert ring.describe() == 'x:laurent,y'

	def test_constants_ring(self) -> None:
		ring = PolyRing.constants(7)
		assert ring.nvars == 0
		assert ring.constant(9).render() == '2'

	@pytest.mark.parametrize('names', [['x', 'x'], ['1x'], ['x', 'dx'], ['x-y']])
	def test_rejects_bad_variable_names(self, names: list[str]) -> None:
		with pytest.raises(InvalidRingError):
			PolyRing.build(3, names)

	def test_unknown_variable(self, f3x: PolyRing) -> None:
		with pytest.raises(InvalidRingError):
			f3x.index('z')


class TestPolyArithmetic:
	"""Tests sums, products and powers."""

	def test_product_example(self, f3x: PolyRing) -> None:
		x = f3x.gen('x')
		assert poly_mul(x + 1, x + 2) == x**2 + 2
		assert (x + 1) * 1 == x + 1

	def test_laurent_unit(self, f3x_laurent: PolyRing) -> None:
		x = f3x_laurent.gen('x')
		assert x * x**-1 == 1
		assert x.inverse() == x**-1

	def test_coefficients_are_reduced(self, f3x: PolyRing) -> None:
		x = f3x.gen('x')
		assert x.scale(3).is_zero()
		assert (x + x + x).is_zero()
		assert Poly(f3x, {(1,): 4}) == x

	@pytest.mark.parametrize('p', [3, 5, 7])
	def test_ring_axioms_on_random_polynomials(self, p: int) -> None:
		rng = random.Random(SEED + p)
		ring = PolyRing.build(p, ['x', 'y'], laurent=['x'])
		for _ in range(70):
			f, g, h = (random_poly(rng, ring) for _ in range(3))
			assert poly_mul(poly_mul(f, g), h) == poly_mul(f, poly_mul(g, h))
			assert poly_mul(f, g) == poly_mul(g, f)
			assert poly_mul(f, g + h) == poly_mul(f, g) + poly_mul(f, h)

	def test_constants_hash_like_their_residue(self, f3x: PolyRing) -> None:
		assert hash(f3x.constant(2)) == hash(2)
		assert hash(f3x.zero()) == hash(0)
		assert 1 in {f3x.one()}
		assert {f3x.constant(2): 'two'}[2] == 'two'

	def test_ring_mismatch(self, f3x: PolyRing, f3xy: PolyRing) -> None:
		with pytest.raises(RingMismatchError):
			_ = f3x.gen('x') * f3xy.gen('x')

	def test_negative_exponent_on_polynomial_variable(self, f3x: PolyRing) -> None:
		with pytest.raises(NegativeExponentError):
			Poly.monomial(f3x, [-1])
		with pytest.raises(NotInvertibleError):
			_ = f3x.gen('x') ** -1

	def test_non_monomial_is_not_invertible(self, f3x_laurent: PolyRing) -> None:
		with pytest.raises(NotInvertibleError):
			(f3x_laurent.gen('x') + 1).inverse()

	def test_frobenius(self, f3xy: PolyRing) -> None:
		x, y = f3xy.gens()
		f = x * y.scale(2) + 1
		assert f.frobenius() == f**3

	def test_substitute(self, f3xy: PolyRing) -> None:
		x, y = f3xy.gens()
		target = PolyRing.build(3, ['t'])
		t = target.gen('t')
		assert (x * y + 1).substitute(target, [t, t + 1]) == t * t + t + 1

	def test_render(self) -> None:
		ring = PolyRing.build(5, ['x', 'y'], laurent=['y'])
		x, y = ring.gens()
		assert (x**3 * y**-1 * 2 + 1).render() == '2*x^3*y^-1 + 1'
		assert ring.zero().render() == '0'
		assert (x + y + 1).render() == 'x + y + 1'


class TestCalculus:
	"""Tests derivatives and p-th roots."""

	def test_derivative_examples(self, f3x_laurent: PolyRing, f3xy: PolyRing) -> None:
		x = f3x_laurent.gen('x')
		assert partial_derivative(x**3, 0).is_zero()
		assert partial_derivative(x**-1, 0) == (x**-2).scale(2)
		assert partial_derivative(f3xy.gen('x'), 1).is_zero()

	def test_pth_root_examples(self, f3x: PolyRing, f3xy: PolyRing) -> None:
		x = f3x.gen('x')
		assert pth_root(x**3) == x
		a, b = f3xy.gens()
		assert pth_root((a**6 * b**3).scale(2)) == (a**2 * b).scale(2)
		with pytest.raises(NotInFrobeniusSubringError):
			pth_root(x**2)

	def test_pth_root_inverts_frobenius(self, f3x_laurent: PolyRing) -> None:
		x = f3x_laurent.gen('x')
		f = x**-2 + x.scale(2) + 1
		assert f.frobenius().pth_root() == f

	@pytest.mark.parametrize('p', [3, 5, 7])
	def test_pth_root_of_random_pth_powers(self, p: int) -> None:
		rng = random.Random(SEED * p)
		ring = PolyRing.build(p, ['x', 'y'], laurent=['x'])
		for _ in range(20):
			f = random_poly(rng, ring)
			assert pth_root(f**p) == f


class TestDerivation:
	"""Tests brackets and p-powers of vector fields."""

	def test_p_power_of_coordinate_field_vanishes(self, f3x: PolyRing) -> None:
		assert Derivation.coordinate(f3x, 'x').p_power().is_zero()

	@pytest.mark.parametrize('p', [3, 5])
	def test_euler_field_is_restricted_idempotent(self, p: int) -> None:
		ring = PolyRing.build(p, ['x'])
		euler = Derivation.euler(ring, 'x')
		assert euler.p_power() == euler

	def test_zero_p_power(self, f3xy: PolyRing) -> None:
		assert Derivation.zero(f3xy).p_power().is_zero()

	def test_bracket_examples(self, f3xy: PolyRing) -> None:
		dx = Derivation.coordinate(f3xy, 'x')
		dy = Derivation.coordinate(f3xy, 'y')
		euler = Derivation.euler(f3xy, 'x')
		assert dx.bracket(euler) == dx
		assert euler.bracket(euler).is_zero()
		assert dx.bracket(dy).is_zero()

	def test_free_function_forms(self, f3x: PolyRing) -> None:
		x = f3x.gen('x')
		dx = Derivation.coordinate(f3x, 'x')
		D = Derivation(f3x, [x * x])
		assert derivation_bracket(dx, D) == Derivation(f3x, [x.scale(2)])
		assert derivation_p_power(D).is_zero()

	@pytest.mark.parametrize('p', [3, 5])
	def test_p_power_satisfies_leibniz(self, p: int) -> None:
		rng = random.Random(SEED + 2 * p)
		ring = PolyRing.build(p, ['x', 'y'], laurent=['x'])
		for _ in range(50):
			E = random_derivation(rng, ring).p_power()
			f, g = random_poly(rng, ring, terms=2, degree=2), random_poly(rng, ring, terms=2, degree=2)
			assert E(f * g) == E(f) * g + f * E(g)

	@pytest.mark.parametrize('p', [3, 5])
	def test_p_power_is_the_p_fold_iterate(self, p: int) -> None:
		rng = random.Random(SEED + 3 * p)
		ring = PolyRing.build(p, ['x', 'y'], laurent=['x'])
		for _ in range(20):
			D = random_derivation(rng, ring)
			f = random_poly(rng, ring, terms=2, degree=2)
			assert D.iterate(f, p) == D.p_power()(f)

	def test_iterate_stops_at_zero(self) -> None:
		ring = PolyRing.build(2_147_483_647, ['x'])
		dx = Derivation.coordinate(ring, 'x')
		assert dx.iterate(ring.gen('x'), ring.p - 1).is_zero()

	def test_apply_and_iterate(self, f3xy: PolyRing) -> None:
		x, y = f3xy.gens()
		D = Derivation(f3xy, [y, x])
		assert D(x * y) == y * y + x * x
		assert D.iterate(x, 2) == x

	def test_wrong_number_of_coefficients(self, f3xy: PolyRing) -> None:
		with pytest.raises(InvalidRingError):
			Derivation(f3xy, [f3xy.one()])
