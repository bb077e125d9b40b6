"""
Seeded random inputs for the property suites.

Flat connections are drawn from families that are flat by construction: random forms are almost never flat, so
rejection sampling would not terminate in practice.
"""

import random

from charpcartan.algebra.derham import DiffForm
from charpcartan.algebra.ffpoly import Derivation, Exponents, Poly, PolyRing
from charpcartan.algebra.rlie import AbstractElt, AbstractRestrictedLie, LieElt, MatrixLieAlgebra
from charpcartan.geometry.connection import LieValuedForm

DEFAULT_TERMS = 3
DEFAULT_DEGREE = 3


def random_poly(rng: random.Random, ring: PolyRing, terms: int = DEFAULT_TERMS, degree: int = DEFAULT_DEGREE) -> Poly:
	"""Up to `terms` monomials with exponents in [0, degree], or [−degree, degree] for Laurent variables."""
	collected: dict[Exponents, int] = {}
	for _ in range(terms):
		exps = tuple(rng.randint(-degree if laurent else 0, degree) for laurent in ring.laurent_flags)
		collected[exps] = collected.get(exps, 0) + rng.randrange(1, ring.p)
	return Poly(ring, collected)


def random_derivation(rng: random.Random, ring: PolyRing, terms: int = 2, degree: int = 2) -> Derivation:
	return Derivation(ring, [random_poly(rng, ring, terms, degree) for _ in range(ring.nvars)])


def random_matrix(rng: random.Random, algebra: MatrixLieAlgebra) -> LieElt:
	"""A matrix with entries uniform in F_p (the ring is expected to be F_p itself)."""
	return algebra.element([[rng.randrange(algebra.p) for _ in range(algebra.n)] for _ in range(algebra.n)])


def random_abstract(rng: random.Random, algebra: AbstractRestrictedLie) -> AbstractElt:
	return algebra.element([rng.randrange(algebra.p) for _ in range(algebra.dim)])


def random_one_form(rng: random.Random, ring: PolyRing, terms: int = 2, degree: int = 2) -> DiffForm:
	return DiffForm.one_form(ring, [random_poly(rng, ring, terms, degree) for _ in range(ring.nvars)])


def random_closed_form(rng: random.Random, ring: PolyRing, degree: int = 2) -> DiffForm:
	"""
	df + Σ r_i^p x_i^(p−1) dx_i + Σ c_i x_i^(−1) dx_i, each summand switched on at random.

	The df part lies in the kernel of the Cartier operator; the other parts map to r_i dx_i and c_i x_i^(−1) dx_i, so both
	kernel and non-kernel forms are produced.
	"""
	p = ring.p
	omega = DiffForm.differential(random_poly(rng, ring, degree=degree))
	for i, laurent in enumerate(ring.laurent_flags):
		if rng.random() < 0.5:  # noqa: PLR2004
			r = random_poly(rng, ring, terms=2, degree=1)
			exps = [0] * ring.nvars
			exps[i] = p - 1
			omega = omega + DiffForm.dx(ring, i).scale(r.frobenius() * Poly.monomial(ring, exps))
		if laurent and rng.random() < 0.5:  # noqa: PLR2004
			exps = [0] * ring.nvars
			exps[i] = -1
			omega = omega + DiffForm.dx(ring, i).scale(Poly.monomial(ring, exps, rng.randrange(1, p)))
	return omega


def random_flat_gl1(rng: random.Random, ring: PolyRing) -> LieValuedForm:
	"""A closed 1-form as a gl_1-valued form; in rank one flatness is closedness."""
	return LieValuedForm.scalar(random_closed_form(rng, ring))


def random_flat_gl2(rng: random.Random, ring: PolyRing) -> LieValuedForm:
	"""
	One of diag(ω_1, ω_2), [[0, χ], [0, 0]] and [[ω, χ], [0, ω]] with closed entries, all flat since the wedge terms cancel.

	On a curve every form is flat, so an arbitrary matrix of 1-forms is drawn as a fourth family.
	"""
	zero = DiffForm.zero(ring)
	families = ['diagonal', 'upper', 'unipotent'] + (['generic'] if ring.nvars == 1 else [])
	match rng.choice(families):
		case 'diagonal':
			forms = [[random_closed_form(rng, ring), zero], [zero, random_closed_form(rng, ring)]]
		case 'upper':
			forms = [[zero, random_closed_form(rng, ring)], [zero, zero]]
		case 'unipotent':
			omega = random_closed_form(rng, ring)
			forms = [[omega, random_closed_form(rng, ring)], [zero, omega]]
		case _:
			forms = [[random_one_form(rng, ring) for _ in range(2)] for _ in range(2)]
	return LieValuedForm.from_matrix(forms)
