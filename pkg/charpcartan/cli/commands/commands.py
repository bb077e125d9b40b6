from enum import Enum

import logfire
from pydantic import Field

from charpcartan.algebra.derham import cartier, is_C_fixed, is_C_kernel
from charpcartan.algebra.ffpoly import Derivation, PolyRing
from charpcartan.algebra.rlie import AbstractElt, AbstractRestrictedLie, LieElt, MatrixLieAlgebra, jacobson_check, jacobson_correction, l1123_check
from charpcartan.cli.commands.base import BaseCommand, CommandResult, CommandResultStatus, default_command, env_seed, env_tolerance
from charpcartan.cli.expression import parse_form, parse_form_grid, parse_forms, parse_poly, parse_poly_grid, parse_vars
from charpcartan.errors import UsageError
from charpcartan.geometry.classify import (
	StructureTuple,
	ba_to_poly,
	check_structure_tuple,
	enumerate_Ba,
	enumerate_Bm,
	truncate_Ba,
	truncate_Bm,
)
from charpcartan.geometry.connection import (
	ConnMatrix,
	LieValuedForm,
	curvature_form,
	curvature_operator,
	p_curvature_at,
	p_curvature_form,
	p_curvature_operator,
)
from charpcartan.geometry.counting import bm_count_closed, dormant_count, elliptic_affine_count
from charpcartan.geometry.groups import ModelGroup, maurer_cartan, mc_pullback_check
from charpcartan.selftest.runner import SelftestRunner
from charpcartan.utils import split_list

P_DESCRIPTION = 'The characteristic, an odd prime.'
VARS_DESCRIPTION = 'Ring variables, e.g. "x:laurent,y". Laurent variables may carry negative exponents.'


def render_value(value: LieElt | AbstractElt) -> list[list[str]] | str:
	"""Matrices render row by row, abstract elements as one expression."""
	if isinstance(value, LieElt):
		return value.rows()
	return value.render()


@default_command
class Cartier(BaseCommand):
	"""Applies the Cartier operator to a closed 1-form and tells whether the form is a fixed point of it."""

	name = 'cartier'

	p: int = Field(description=P_DESCRIPTION)
	vars: str = Field(default='', description=VARS_DESCRIPTION)
	form: str = Field(description='A closed 1-form, e.g. "x^-1*dx".')

	def execute(self) -> CommandResult:
		omega = parse_form(self.form, parse_vars(self.vars, self.p))
		value = cartier(omega).value
		return CommandResult(data={'form': value.render(), 'fixed_point': value == omega})


class ConnectionInput(BaseCommand):
	"""Shared flags of the commands reading a Lie-algebra-valued 1-form."""

	p: int = Field(description=P_DESCRIPTION)
	vars: str = Field(default='', description=VARS_DESCRIPTION)
	conn: str | None = Field(default=None, description='A gl_n-valued 1-form as a matrix of 1-forms, rows separated by ";" and entries by ",".')
	algebra: str | None = Field(default=None, description='Path of an abstract restricted Lie algebra JSON file.')
	components: str | None = Field(default=None, description='With --algebra: one 1-form per basis element, separated by ";".')

	def load_form(self) -> LieValuedForm:
		ring = parse_vars(self.vars, self.p)
		if self.algebra is not None:
			if self.components is None:
				raise UsageError('--algebra needs --components')
			algebra = AbstractRestrictedLie.from_json(self.algebra)
			if algebra.p != ring.p:
				raise UsageError(f'The algebra is defined over F_{algebra.p}, not F_{ring.p}')
			return LieValuedForm(algebra, ring, parse_forms(self.components, ring))
		if self.conn is None:
			raise UsageError('Give either --conn or --algebra with --components')
		return LieValuedForm.from_matrix(parse_form_grid(self.conn, ring))


@default_command
class Curvature(ConnectionInput):
	"""Computes the curvature dω + ½[ω, ω] of a Lie-algebra-valued 1-form."""

	name = 'curvature'

	def execute(self) -> CommandResult:
		omega = self.load_form()
		psi = curvature_form(omega)
		data = {'curvature': psi.render(), 'flat': psi.is_zero()}
		if omega.is_matrix:
			data['operator_agrees'] = curvature_operator(ConnMatrix.from_form(omega)) == psi
		return CommandResult(data=data)


@default_command
class PCurvature(ConnectionInput):
	"""Computes the p-curvature of a flat Lie-algebra-valued 1-form at every coordinate field."""

	name = 'pcurvature'

	field: str | None = Field(default=None, description='Coefficients g_1, ..., g_n of a vector field Σ g_i ∂_i, separated by ",".')

	def execute(self) -> CommandResult:
		omega = self.load_form()
		pc = p_curvature_form(omega)
		data = {'values': [render_value(v) for v in pc.values], 'formal': pc.formal, 'p_flat': pc.is_zero()}
		if omega.is_matrix:
			A = ConnMatrix.from_form(omega)
			operators = [p_curvature_operator(A, Derivation.coordinate(omega.ring, i)) for i in range(omega.ring.nvars)]
			data['operator_agrees'] = list(pc.values) == operators
		if self.field is not None:
			data['at_field'] = render_value(p_curvature_at(pc, self._field(omega.ring)))
		return CommandResult(data=data)

	def _field(self, ring: PolyRing) -> Derivation:
		coefficients = [parse_poly(item, ring) for item in split_list(self.field, ',')]
		if len(coefficients) != ring.nvars:
			raise UsageError(f'--field needs {ring.nvars} coefficients, got {len(coefficients)}')
		return Derivation(ring, coefficients)


@default_command
class McCheck(BaseCommand):
	"""Checks that the Maurer–Cartan form of a model group is flat and p-flat and satisfies the pullback identities."""

	name = 'mc-check'

	group: ModelGroup = Field(description='The model group.')
	p: int = Field(description=P_DESCRIPTION)

	def execute(self) -> CommandResult:
		omega = maurer_cartan(self.group, self.p)
		return CommandResult(
			data={
				'group': self.group.value,
				'form': [[form.render() for form in row] for row in omega.matrix()],
				'flat': curvature_form(omega).is_zero(),
				'p_flat': p_curvature_form(omega).is_zero(),
				'pullback': mc_pullback_check(self.group, self.p),
			}
		)


class LiePairInput(BaseCommand):
	"""Shared flags of the commands reading two Lie algebra elements."""

	p: int = Field(description=P_DESCRIPTION)
	vars: str = Field(default='', description='Variables of the coefficient ring; empty for scalar elements.')
	v: str = Field(description='First element: a matrix "a, b; c, d", or coordinates "a, b, c" with --algebra.')
	u: str = Field(description='Second element, in the same format.')
	algebra: str | None = Field(default=None, description='Path of an abstract restricted Lie algebra JSON file.')

	def load_pair(self) -> tuple[LieElt | AbstractElt, LieElt | AbstractElt]:
		ring = parse_vars(self.vars, self.p)
		if self.algebra is not None:
			algebra = AbstractRestrictedLie.from_json(self.algebra)
			if algebra.p != ring.p:
				raise UsageError(f'The algebra is defined over F_{algebra.p}, not F_{ring.p}')
			return tuple(self._coordinates(algebra, src, ring) for src in (self.v, self.u))
		v, u = parse_poly_grid(self.v, ring), parse_poly_grid(self.u, ring)
		if len(v) != len(u):
			raise UsageError(f'--v is {len(v)}x{len(v)} but --u is {len(u)}x{len(u)}')
		algebra = MatrixLieAlgebra(n=len(v), ring=ring)
		return algebra.element(v), algebra.element(u)

	@staticmethod
	def _coordinates(algebra: AbstractRestrictedLie, src: str, ring: PolyRing) -> AbstractElt:
		coordinates = [parse_poly(item, ring) for item in split_list(src, ',')]
		if len(coordinates) != algebra.dim:
			raise UsageError(f'Expected {algebra.dim} coordinates, got {len(coordinates)}')
		return algebra.element(coordinates, ring)


@default_command
class JacobsonCheck(LiePairInput):
	"""Checks (v + u)^[p] = v^[p] + u^[p] + Σ s_i(v, u)/i."""

	name = 'jacobson-check'

	def execute(self) -> CommandResult:
		v, u = self.load_pair()
		return CommandResult(data={'holds': jacobson_check(v, u), 'correction': render_value(jacobson_correction(v, u))})


@default_command
class L1123Check(LiePairInput):
	"""Checks Σ s_i(v, u − v)/i = −Σ s_i(−v, u)/i."""

	name = 'l1123-check'

	def execute(self) -> CommandResult:
		v, u = self.load_pair()
		return CommandResult(data={'holds': l1123_check(v, u), 'lhs': render_value(jacobson_correction(v, u - v))})


@default_command
class ClassifyGm(BaseCommand):
	"""Lists the level-N structures on G_m, represented by 1 <= m < p^N with p ∤ m."""

	name = 'classify-gm'

	p: int = Field(description=P_DESCRIPTION)
	N: int = Field(description='The level.')
	target: int | None = Field(default=None, description='Also truncate every class to this lower level.')

	def execute(self) -> CommandResult:
		items = enumerate_Bm(self.p, self.N)
		data = {'p': self.p, 'N': self.N, 'count': len(items), 'items': [item.m for item in items]}
		if self.target is not None:
			data['truncated'] = [truncate_Bm(item, self.target).m for item in items]
		return CommandResult(data=data)


@default_command
class ClassifyGa(BaseCommand):
	"""Lists the level-N structures on A^1 with exponents up to D, represented by u = a·T + Σ a_i T^i."""

	name = 'classify-ga'

	p: int = Field(description=P_DESCRIPTION)
	N: int = Field(description='The level.')
	D: int = Field(description='Degree bound of the representatives.')
	target: int | None = Field(default=None, description='Also truncate every class to this lower level.')

	def execute(self) -> CommandResult:
		items = enumerate_Ba(self.p, self.N, self.D)
		rendered = [{'a': item.a, 'terms': sorted([i, c] for i, c in item.extra.items()), 'u': ba_to_poly(item).render()} for item in items]
		data = {'p': self.p, 'N': self.N, 'D': self.D, 'count': len(items), 'items': rendered}
		if self.target is not None:
			data['truncated'] = [ba_to_poly(truncate_Ba(item, self.target)).render() for item in items]
		return CommandResult(data=data)


@default_command
class CheckTuple(BaseCommand):
	"""Checks that (ω_1, ..., ω_s, χ_1, ..., χ_t) are C-fixed, C-killed and form a basis of the 1-forms."""

	name = 'check-tuple'

	p: int = Field(description=P_DESCRIPTION)
	vars: str = Field(default='', description=VARS_DESCRIPTION)
	omegas: str = Field(default='', description='The C-fixed slots, separated by ";".')
	chis: str = Field(default='', description='The C-kernel slots, separated by ";".')

	def execute(self) -> CommandResult:
		ring = parse_vars(self.vars, self.p)
		structure = StructureTuple(ring=ring, omegas=tuple(parse_forms(self.omegas, ring)), chis=tuple(parse_forms(self.chis, ring)))
		report = check_structure_tuple(structure)
		data = report.model_dump()
		data['fixed_points'] = [is_C_fixed(omega) for omega in structure.omegas]
		data['kernel'] = [is_C_kernel(chi) for chi in structure.chis]
		return CommandResult(data=data)


class CountFormula(str, Enum):
	DORMANT = 'dormant'
	ELLIPTIC = 'elliptic'
	BM = 'bm'


@default_command
class Count(BaseCommand):
	"""Evaluates a counting formula: dormant (genus g, level N), elliptic (p^(N−1)(p−1)) or bm (p^N − p^(N−1))."""

	name = 'count'

	formula: CountFormula = Field(description='Which formula to evaluate.')
	p: int = Field(description=P_DESCRIPTION)
	g: int | None = Field(default=None, description='Genus, needed by the dormant formula.')
	N: int = Field(default=1, description='The level.')
	tolerance: float = Field(default_factory=env_tolerance, description='Integrality tolerance (env CHARPCARTAN_TOLERANCE).')

	def execute(self) -> CommandResult:
		match self.formula:
			case CountFormula.DORMANT:
				if self.g is None:
					raise UsageError('The dormant formula needs --g')
				result = dormant_count(self.p, self.g, self.N, self.tolerance)
			case CountFormula.ELLIPTIC:
				result = elliptic_affine_count(self.p, self.N)
			case CountFormula.BM:
				result = bm_count_closed(self.p, self.N)
		return CommandResult(data=result.model_dump(mode='json'))


@default_command
class Selftest(BaseCommand):
	"""Runs the randomized property suites; the seed determines every random draw."""

	name = 'selftest'

	seed: int = Field(default_factory=env_seed, description='Random seed (env CHARPCARTAN_SEED, default 0).')
	samples: int | None = Field(default=None, ge=1, description='Cap on the samples per suite; full sizes if not given.')
	suites: str | None = Field(default=None, description='Comma-separated suite names; all suites if not given.')

	def execute(self) -> CommandResult:
		names = split_list(self.suites, ',') if self.suites is not None else None
		results = SelftestRunner(seed=self.seed, samples=self.samples).run(names)
		passed = all(result.passed for result in results)
		logfire.info('Selftest finished', seed=self.seed, passed=passed)
		return CommandResult(
			status=CommandResultStatus.SUCCESS if passed else CommandResultStatus.FAILURE,
			data={'seed': self.seed, 'passed': passed, 'suites': [result.model_dump() for result in results]},
		)
