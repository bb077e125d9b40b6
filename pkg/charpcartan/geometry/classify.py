"""
Canonical representatives of Frobenius-Ehresmann structures on the model curves G_m and A^1, their truncations to lower
levels, and the membership test for structure tuples on products G_m^s × A^t.

On the model spaces every bundle is trivial, so a class is determined by its form: m·T^(-1)dT for G_m and du with
u = a·T + Σ a_i T^i for A^1. The bundle witnesses are not materialized.
"""

from collections.abc import Sequence
from itertools import permutations, product

import logfire
from pydantic import BaseModel, ConfigDict, Field, model_validator

from charpcartan.algebra.derham import DiffForm, is_C_fixed, is_C_kernel
from charpcartan.algebra.ffpoly import Poly, PolyRing, Prime
from charpcartan.errors import LevelError, RingMismatchError, UsageError


def _check_level(N: int) -> None:
	if N < 1:
		raise LevelError(f'Levels start at 1, got {N}')


class BmItem(BaseModel):
	"""The class of dlog(T^m) at level N, 1 ≤ m ≤ p^N − 1 with gcd(m, p) = 1."""

	model_config = ConfigDict(frozen=True)

	prime: Prime
	N: int = Field(ge=1)
	m: int

	@model_validator(mode='after')
	def _check_representative(self) -> 'BmItem':
		p = self.prime.p
		if not 1 <= self.m <= p**self.N - 1 or self.m % p == 0:
			raise UsageError(f'm = {self.m} is not a canonical level-{self.N} representative: need 1 <= m < {p}^{self.N} and p ∤ m')
		return self


class BaItem(BaseModel):
	"""The class of du for u = a·T + Σ a_i T^i at level N, where a_i ≠ 0 only for i ∈ pZ ∖ p^N Z."""

	model_config = ConfigDict(frozen=True)

	prime: Prime
	N: int = Field(ge=1)
	a: int
	extra: dict[int, int] = Field(default_factory=dict)

	@model_validator(mode='after')
	def _check_representative(self) -> 'BaItem':
		p = self.prime.p
		if not 1 <= self.a <= p - 1:
			raise UsageError(f'The leading coefficient must be in F_p^×, got {self.a}')
		for i, c in self.extra.items():
			if i < 1 or i % p or i % p**self.N == 0:
				raise UsageError(f'Exponent {i} is not in {p}Z ∖ {p}^{self.N}Z')
			if not 1 <= c <= p - 1:
				raise UsageError(f'Coefficient of T^{i} must be in F_p^×, got {c}')
		return self

	def sort_key(self) -> tuple[int, tuple[tuple[int, int], ...]]:
		return self.a, tuple(sorted(self.extra.items()))


def enumerate_Bm(p: Prime | int, N: int) -> list[BmItem]:
	"""All m with 1 ≤ m ≤ p^N − 1 and p ∤ m, ascending."""
	_check_level(N)
	prime = Prime.of(p)
	with logfire.span('Enumerating B_m', p=prime.p, N=N):
		return [BmItem(prime=prime, N=N, m=m) for m in range(1, prime.p**N) if m % prime.p]


def truncate_Bm(item: BmItem, N_target: int) -> BmItem:
	"""
	The class at a lower level: m mod p^N_target.

	:raises LevelError: if N_target is not in [1, item.N].
	"""
	if not 1 <= N_target <= item.N:
		raise LevelError(f'Cannot truncate level {item.N} to level {N_target}')
	return BmItem(prime=item.prime, N=N_target, m=item.m % item.prime.p**N_target)


def admissible_exponents(p: Prime | int, N: int, D: int) -> list[int]:
	"""The exponents i ≤ D with p | i and p^N ∤ i."""
	p = int(p)
	return [i for i in range(p, D + 1, p) if i % p**N]


def enumerate_Ba(p: Prime | int, N: int, D: int) -> list[BaItem]:
	"""All canonical u = a·T + Σ a_i T^i with exponents ≤ D, ordered by (a, sorted exponent list)."""
	_check_level(N)
	if D < 1:
		raise UsageError(f'The degree bound must be positive, got {D}')
	prime = Prime.of(p)
	exponents = admissible_exponents(prime, N, D)
	with logfire.span('Enumerating B_a', p=prime.p, N=N, D=D, exponents=exponents):
		items = []
		for a in range(1, prime.p):
			for values in product(range(prime.p), repeat=len(exponents)):
				extra = {i: c for i, c in zip(exponents, values, strict=True) if c}
				items.append(BaItem(prime=prime, N=N, a=a, extra=extra))
		return sorted(items, key=BaItem.sort_key)


def truncate_Ba(item: BaItem, N_target: int) -> BaItem:
	"""Drops the terms a_i T^i with p^N_target | i, which become trivial at the lower level."""
	if not 1 <= N_target <= item.N:
		raise LevelError(f'Cannot truncate level {item.N} to level {N_target}')
	modulus = item.prime.p**N_target
	return BaItem(prime=item.prime, N=N_target, a=item.a, extra={i: c for i, c in item.extra.items() if i % modulus})


def curve_ring(p: Prime | int, laurent: bool) -> PolyRing:
	"""F_p[T^±1] for G_m, F_p[T] for A^1."""
	return PolyRing.build(p, ['T'], laurent=['T'] if laurent else [])


def bm_to_form(item: BmItem) -> DiffForm:
	"""m·T^(-1)dT on F_p[T^±1]."""
	ring = curve_ring(item.prime, laurent=True)
	return DiffForm.dlog(ring.gen('T')).scale(item.m)


def ba_to_poly(item: BaItem, ring: PolyRing | None = None, var: str = 'T') -> Poly:
	"""u = a·T + Σ a_i T^i."""
	ring = ring or curve_ring(item.prime, laurent=False)
	T = ring.gen(var)
	u = T.scale(item.a)
	for i, c in item.extra.items():
		u = u + (T**i).scale(c)
	return u


def ba_to_form(item: BaItem) -> DiffForm:
	"""du on F_p[T]."""
	return DiffForm.differential(ba_to_poly(item))


class StructureTuple(BaseModel):
	"""(ω_1, …, ω_s, χ_1, …, χ_t) on a ring with s + t variables."""

	model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

	ring: PolyRing
	omegas: tuple[DiffForm, ...] = ()
	chis: tuple[DiffForm, ...] = ()

	@model_validator(mode='after')
	def _check_shape(self) -> 'StructureTuple':
		if len(self.omegas) + len(self.chis) != self.ring.nvars:
			raise UsageError(f'Expected s + t = {self.ring.nvars} forms, got {len(self.omegas)} + {len(self.chis)}')
		for form in (*self.omegas, *self.chis):
			if form.ring != self.ring:
				raise RingMismatchError('All forms of a structure tuple must live on its ring')
		return self


class StructureReport(BaseModel):
	"""Outcome of the structure tuple test; slots are 1-based."""

	ok: bool
	omega_failures: list[int] = Field(default_factory=list, description='Slots whose form is not C-fixed.')
	chi_failures: list[int] = Field(default_factory=list, description='Slots whose form is not in the kernel of C.')
	basis_ok: bool
	determinant: str


def determinant(matrix: Sequence[Sequence[Poly]], ring: PolyRing) -> Poly:
	"""Leibniz expansion; the empty matrix has determinant 1."""
	n = len(matrix)
	total = ring.zero()
	for perm in permutations(range(n)):
		inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
		term = ring.one()
		for row, col in enumerate(perm):
			term = term * matrix[row][col]
			if term.is_zero():
				break
		total = total - term if inversions % 2 else total + term
	return total


def unit_determinant(matrix: Sequence[Sequence[Poly]], ring: PolyRing) -> bool:
	"""True iff the determinant is a unit, i.e. a nonzero constant times a Laurent monomial."""
	return determinant(matrix, ring).is_monomial_unit()


def check_structure_tuple(t: StructureTuple) -> StructureReport:
	"""
	Tests that every ω_i is C-fixed, every χ_j lies in the kernel of C, and the forms are a basis of the 1-forms (unit
	determinant of the coefficient matrix in dx_1, ..., dx_n).
	"""
	omega_failures = [slot for slot, omega in enumerate(t.omegas, start=1) if not is_C_fixed(omega)]
	chi_failures = [slot for slot, chi in enumerate(t.chis, start=len(t.omegas) + 1) if not is_C_kernel(chi)]
	matrix = [form.coefficients() if form.degree == 1 else [t.ring.zero()] * t.ring.nvars for form in (*t.omegas, *t.chis)]
	det = determinant(matrix, t.ring)
	basis_ok = unit_determinant(matrix, t.ring)
	ok = not omega_failures and not chi_failures and basis_ok
	logfire.debug('Checked structure tuple', ok=ok, omega_failures=omega_failures, chi_failures=chi_failures, determinant=det.render())
	return StructureReport(ok=ok, omega_failures=omega_failures, chi_failures=chi_failures, basis_ok=basis_ok, determinant=det.render())


def product_ring(p: Prime | int, s: int, t: int) -> PolyRing:
	"""Coordinate ring of G_m^s × A^t with variables x1..xs (Laurent) and y1..yt."""
	xs = [f'x{k}' for k in range(1, s + 1)]
	ys = [f'y{k}' for k in range(1, t + 1)]
	return PolyRing.build(p, [*xs, *ys], laurent=xs)


def product_tuple(p: Prime | int, bm_items: Sequence[BmItem], ba_items: Sequence[BaItem]) -> StructureTuple:
	"""The structure tuple on G_m^s × A^t whose factors are the given curve representatives."""
	ring = product_ring(p, len(bm_items), len(ba_items))
	omegas = [DiffForm.dlog(ring.gen(f'x{k}')).scale(item.m) for k, item in enumerate(bm_items, start=1)]
	chis = [DiffForm.differential(ba_to_poly(item, ring, f'y{k}')) for k, item in enumerate(ba_items, start=1)]
	return StructureTuple(ring=ring, omegas=tuple(omegas), chis=tuple(chis))
