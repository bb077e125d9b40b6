"""
Randomized property suites behind the `selftest` subcommand.

Every suite draws from the `random.Random` it is handed and checks exact equalities; there are no tolerances except
for the floating sums of the counting formulas.
"""

import random
from collections import Counter
from collections.abc import Callable
from typing import Any

import logfire
from pydantic import BaseModel, Field

from charpcartan.algebra.derham import DiffForm, cartier, is_C_fixed, is_C_kernel
from charpcartan.algebra.ffpoly import Derivation, Poly, PolyRing
from charpcartan.algebra.rlie import (
	MatrixLieAlgebra,
	ad_power_check,
	aff1,
	aff1_matrix_images,
	homogeneity_check,
	jacobson_check,
	l1123_check,
	matrix_image,
	sl2,
	sl2_matrix_images,
)
from charpcartan.errors import CharpCartanError
from charpcartan.geometry.classify import (
	ba_to_form,
	bm_to_form,
	check_structure_tuple,
	enumerate_Ba,
	enumerate_Bm,
	product_tuple,
	truncate_Ba,
	truncate_Bm,
)
from charpcartan.geometry.connection import ConnMatrix, curvature_form, lemma_ga_check, operator_power, p_curvature_at, p_curvature_form, p_curvature_operator
from charpcartan.geometry.counting import bm_count_closed, dormant_count, dormant_count_genus2_closed, elliptic_affine_count
from charpcartan.geometry.groups import ModelGroup, maurer_cartan, mc_pullback_check
from charpcartan.selftest.generators import (
	random_abstract,
	random_closed_form,
	random_derivation,
	random_flat_gl1,
	random_flat_gl2,
	random_matrix,
	random_poly,
)

SMALL_PRIMES = (3, 5, 7)
MAX_REPORTED_FAILURES = 5
DLOG_EXPONENT_BOUND = 20


class SuiteResult(BaseModel):
	name: str
	passed: bool
	samples: int = Field(description='Number of checked properties.')
	failures: list[str] = Field(default_factory=list, description=f'The first {MAX_REPORTED_FAILURES} failing samples.')


class SuiteContext:
	"""Random source, sample sizes and failure bookkeeping of one suite run."""

	def __init__(self, name: str, rng: random.Random, samples: int | None = None) -> None:
		self.name = name
		self.rng = rng
		self.cap = samples
		self.checked = 0
		self.failed = 0
		self.failures: list[str] = []

	def size(self, full: int) -> int:
		"""The number of random draws for a loop of nominal size `full`."""
		return full if self.cap is None else min(full, self.cap)

	def check(self, label: str, predicate: Callable[..., bool], *args: Any) -> bool:
		"""Records one sample; domain errors raised by the predicate count as failures."""
		self.checked += 1
		try:
			ok = bool(predicate(*args))
			reason = label
		except CharpCartanError as e:
			ok = False
			reason = f'{label}: {e.kind.value}: {e}'
		if not ok:
			self.failed += 1
			logfire.warn('Selftest sample failed', suite=self.name, sample=reason)
			if len(self.failures) < MAX_REPORTED_FAILURES:
				self.failures.append(reason)
		return ok

	def result(self) -> SuiteResult:
		return SuiteResult(name=self.name, passed=self.failed == 0, samples=self.checked, failures=self.failures)


type Suite = Callable[[SuiteContext], None]

SUITES: dict[str, Suite] = {}


def suite(name: str) -> Callable[[Suite], Suite]:
	"""Registers a suite under `name`; suites run in registration order."""

	def register(fn: Suite) -> Suite:
		SUITES[name] = fn
		return fn

	return register


def _scalar_algebra(p: int, n: int) -> MatrixLieAlgebra:
	return MatrixLieAlgebra(n=n, ring=PolyRing.constants(p))


@suite('jacobson')
def jacobson_suite(ctx: SuiteContext) -> None:
	"""(v + u)^[p] = v^[p] + u^[p] + Σ s_i(v, u)/i on random pairs of gl_2 and gl_3 over F_p."""
	for p in SMALL_PRIMES:
		for n in (2, 3):
			algebra = _scalar_algebra(p, n)
			for k in range(ctx.size(200)):
				v, u = random_matrix(ctx.rng, algebra), random_matrix(ctx.rng, algebra)
				ctx.check(f'p={p} gl_{n} #{k}: v={v.rows()} u={u.rows()}', jacobson_check, v, u)


@suite('l1123')
def l1123_suite(ctx: SuiteContext) -> None:
	"""Σ s_i(v, u − v)/i = −Σ s_i(−v, u)/i on random pairs of gl_2 and gl_3 over F_p."""
	for p in SMALL_PRIMES:
		for n in (2, 3):
			algebra = _scalar_algebra(p, n)
			for k in range(ctx.size(200)):
				v, u = random_matrix(ctx.rng, algebra), random_matrix(ctx.rng, algebra)
				ctx.check(f'p={p} gl_{n} #{k}: v={v.rows()} u={u.rows()}', l1123_check, v, u)


def _agrees_with_matrix_model(elt: Any, images: list[Any]) -> bool:
	return matrix_image(elt.p_power(), images) == matrix_image(elt, images).p_power()


@suite('restricted_axioms')
def restricted_axioms_suite(ctx: SuiteContext) -> None:
	"""
	(ad v)^p = ad(v^[p]) and (a·v)^[p] = a^p·v^[p] on gl_2, and the p-maps of the built-in sl_2 and Lie(Aff_1) against
	their matrix models.
	"""
	for p in SMALL_PRIMES:
		algebra = _scalar_algebra(p, 2)
		models = [(sl2(p), sl2_matrix_images(algebra)), (aff1(p), aff1_matrix_images(algebra))]
		for k in range(ctx.size(50)):
			v, w = random_matrix(ctx.rng, algebra), random_matrix(ctx.rng, algebra)
			ctx.check(f'p={p} ad power #{k}: v={v.rows()} w={w.rows()}', ad_power_check, v, w)
			a = ctx.rng.randrange(p)
			ctx.check(f'p={p} homogeneity #{k}: a={a} v={v.rows()}', homogeneity_check, a, v)
			for abstract, images in models:
				x, y = random_abstract(ctx.rng, abstract), random_abstract(ctx.rng, abstract)
				ctx.check(f'p={p} {abstract.names} jacobson #{k}: {x.render()}, {y.render()}', jacobson_check, x, y)
				ctx.check(f'p={p} {abstract.names} matrix model #{k}: {x.render()}', _agrees_with_matrix_model, x, images)


def _cartier_of_exact_vanishes(f: Poly) -> bool:
	return cartier(DiffForm.differential(f)).value.is_zero()


def _cartier_semilinear(omega: DiffForm, f: Poly) -> bool:
	return cartier(omega.scale(f.frobenius())).value == cartier(omega).value.scale(f)


@suite('cartier')
def cartier_suite(ctx: SuiteContext) -> None:
	"""C∘d = 0, dlog forms are fixed points, and C(f^p·ω) = f·C(ω)."""
	rings = [PolyRing.build(p, ['x', 'y'], laurent=['x']) for p in SMALL_PRIMES]
	for k in range(ctx.size(100)):
		ring = rings[k % len(rings)]
		f = random_poly(ctx.rng, ring, terms=4, degree=2 * ring.p)
		ctx.check(f'p={ring.p} C(d({f.render()})) = 0', _cartier_of_exact_vanishes, f)

	for p in SMALL_PRIMES:
		ring = PolyRing.build(p, ['x'], laurent=['x'])
		for c in range(1, p):
			for m in range(-DLOG_EXPONENT_BOUND, DLOG_EXPONENT_BOUND + 1):
				if m % p:
					u = Poly.monomial(ring, [m], c)
					ctx.check(f'p={p} dlog({u.render()}) is fixed', is_C_fixed, DiffForm.dlog(u))

	for k in range(ctx.size(50)):
		ring = rings[k % len(rings)]
		omega = random_closed_form(ctx.rng, ring)
		f = random_poly(ctx.rng, ring, terms=2, degree=1)
		ctx.check(f'p={ring.p} C(({f.render()})^p * ({omega.render()}))', _cartier_semilinear, omega, f)


def _form_matches_operator(omega: Any, A: ConnMatrix, D: Derivation) -> bool:
	"""Both p-curvature algorithms agree at every coordinate field and at the general field D."""
	pc = p_curvature_form(omega)
	if pc.formal:
		return False
	ring = A.ring
	for i, value in enumerate(pc.values):
		if value != p_curvature_operator(A, Derivation.coordinate(ring, i)):
			return False
	return p_curvature_at(pc, D) == p_curvature_operator(A, D)


def _operator_power_linear(A: ConnMatrix, D: Derivation, f: Poly, vector: list[Poly]) -> bool:
	f_p = f.frobenius()
	return operator_power(A, D, [f_p * x for x in vector]) == [f_p * y for y in operator_power(A, D, vector)]


@suite('p_curvature')
def p_curvature_suite(ctx: SuiteContext) -> None:
	"""The p-curvature of the form through the Jacobson coefficients equals the operator (∇_D)^p − ∇_(D^[p])."""
	rings = [PolyRing.build(3, ['x', 'y']), PolyRing.build(5, ['x'])]
	for k in range(ctx.size(50)):
		ring = rings[k % len(rings)]
		omega = random_flat_gl1(ctx.rng, ring) if ctx.rng.random() < 0.5 else random_flat_gl2(ctx.rng, ring)  # noqa: PLR2004
		A = ConnMatrix.from_form(omega)
		D = random_derivation(ctx.rng, ring, terms=1, degree=1)
		ctx.check(f'p={ring.p} form vs operator #{k}: {A.render()}', _form_matches_operator, omega, A, D)
		f = random_poly(ctx.rng, ring, terms=2, degree=1)
		vector = [random_poly(ctx.rng, ring, terms=2, degree=2) for _ in range(A.n)]
		ctx.check(f'p={ring.p} O-linearity #{k}: f={f.render()}', _operator_power_linear, A, Derivation.coordinate(ring, 0), f, vector)


@suite('maurer_cartan')
def maurer_cartan_suite(ctx: SuiteContext) -> None:
	"""The Maurer–Cartan forms of G_m, G_a and Aff_1 are flat and p-flat and satisfy the pullback identities."""
	for group in ModelGroup:
		for p in SMALL_PRIMES:
			omega = maurer_cartan(group, p)
			ctx.check(f'{group.value} p={p} flat', lambda form: curvature_form(form).is_zero(), omega)
			ctx.check(f'{group.value} p={p} p-flat', lambda form: p_curvature_form(form).is_zero(), omega)
			ctx.check(f'{group.value} p={p} pullbacks', mc_pullback_check, group, p)


def _p_flat_iff_kernel(chi: DiffForm) -> bool:
	A = ConnMatrix.chi_dagger(chi)
	p_flat = all(p_curvature_operator(A, Derivation.coordinate(chi.ring, i)).is_zero() for i in range(chi.ring.nvars))
	return p_flat == is_C_kernel(chi)


@suite('lemma_ga')
def lemma_ga_suite(ctx: SuiteContext) -> None:
	"""The p-curvature of d + [[0, χ], [0, 0]] is −[[0, C(χ)], [0, 0]]; it vanishes iff χ is in the kernel of C."""
	ring = PolyRing.build(3, ['x', 'y'])
	for k in range(ctx.size(50)):
		chi = random_closed_form(ctx.rng, ring)
		ctx.check(f'#{k}: chi={chi.render()}', lemma_ga_check, chi)
		ctx.check(f'#{k}: p-flat iff C(chi) = 0 for chi={chi.render()}', _p_flat_iff_kernel, chi)


def _fibers_have_size(keys: list[Any], size: int) -> bool:
	return all(count == size for count in Counter(keys).values())


@suite('classification')
def classification_suite(ctx: SuiteContext) -> None:
	"""Sizes of B_m and B_a, fibers of the truncation maps, and structure tuples on products G_m^s × A^t."""
	for p in (3, 5):
		for N in range(1, 4):
			items = enumerate_Bm(p, N)
			ctx.check(f'|B_m| p={p} N={N}', lambda xs, q, n: len(xs) == q**n - q ** (n - 1) == bm_count_closed(q, n).value, items, p, N)
			for N_target in range(1, N):
				truncated = [truncate_Bm(item, N_target).m for item in items]
				ctx.check(f'B_m fibers p={p} N={N}->{N_target}', _fibers_have_size, truncated, p ** (N - N_target))
			for item in items:
				ctx.check(f'B_m form m={item.m} p={p} N={N} is fixed', is_C_fixed, bm_to_form(item))

	items = enumerate_Ba(3, 2, 9)
	ctx.check('|B_a| p=3 N=2 D=9', lambda xs: len(xs) == 18, items)  # noqa: PLR2004
	ctx.check('B_a fibers p=3 N=2->1', _fibers_have_size, [truncate_Ba(item, 1).sort_key() for item in items], 9)
	for item in items:
		ctx.check(f'B_a form {item.sort_key()} is in the kernel', is_C_kernel, ba_to_form(item))

	for p in (3, 5):
		bm_choices = {N: enumerate_Bm(p, N) for N in (1, 2)}
		ba_choices = {N: enumerate_Ba(p, N, 2 * p) for N in (1, 2)}
		for k in range(ctx.size(20)):
			N = ctx.rng.randint(1, 2)
			s = ctx.rng.randint(0, 2)
			t = ctx.rng.randint(1 if s == 0 else 0, 2)
			bm_items = [ctx.rng.choice(bm_choices[N]) for _ in range(s)]
			ba_items = [ctx.rng.choice(ba_choices[N]) for _ in range(t)]
			tuple_ = product_tuple(p, bm_items, ba_items)
			ctx.check(f'p={p} tuple #{k} s={s} t={t}', lambda x: check_structure_tuple(x).ok, tuple_)


def _dormant_matches_closed_form(p: int, N: int) -> bool:
	result = dormant_count(p, 2, N)
	return result.value == dormant_count_genus2_closed(p, N) and result.residual < 1e-6  # noqa: PLR2004


@suite('counting')
def counting_suite(ctx: SuiteContext) -> None:
	"""The cosecant sums are integers matching the closed forms, and the affine elliptic count is p^(N−1)(p − 1)."""
	for p in (3, 5, 7, 11):
		for N in (1, 2):
			ctx.check(f'dormant p={p} g=2 N={N}', _dormant_matches_closed_form, p, N)
	ctx.check('dormant (5, 2, 1) = 5', lambda: dormant_count(5, 2, 1).value == 5)  # noqa: PLR2004
	ctx.check('dormant (7, 2, 1) = 14', lambda: dormant_count(7, 2, 1).value == 14)  # noqa: PLR2004
	for p in SMALL_PRIMES:
		for N in (1, 2):
			ctx.check(f'dormant p={p} g=3 N={N} is integral', lambda q, n: dormant_count(q, 3, n).residual < 1e-6, p, N)  # noqa: PLR2004
		for N in range(1, 5):
			ctx.check(f'elliptic p={p} N={N}', lambda q, n: elliptic_affine_count(q, n).value == q ** (n - 1) * (q - 1), p, N)
