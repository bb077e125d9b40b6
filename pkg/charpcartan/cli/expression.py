"""
Parser for the expression grammar shared by all subcommands.

	expr   := ('+' | '-')? term (('+' | '-') term)*
	term   := factor ('*'? factor)*
	factor := int | ident ('^' '-'? int)? | d-ident ('^' d-ident)*

`d-ident` is `d` followed by a declared variable name (the differential dx). Differentials in one term are wedged in the
order they appear. All terms with a nonzero coefficient must have the same form degree.
"""

import re
import string
from collections.abc import Sequence

from pydantic import BaseModel, Field

from charpcartan.algebra.derham import DiffForm
from charpcartan.algebra.ffpoly import Poly, PolyRing, Prime
from charpcartan.errors import ExpressionSyntaxError, InvalidRingError, UndeclaredVariableError
from charpcartan.utils import split_grid, split_list

TOKEN_PATTERN = re.compile(r'\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^]))', re.ASCII)


class Token(BaseModel):
	kind: str
	text: str
	position: int


class Term(BaseModel):
	"""One signed monomial term: coefficient · Π x_i^e_i · dx_j1 ∧ … ∧ dx_jq."""

	coefficient: int = 1
	exponents: dict[str, int] = Field(default_factory=dict)
	differentials: list[str] = Field(default_factory=list)
	position: int = 0


class ExprAST(BaseModel):
	terms: list[Term]


def tokenize(src: str) -> list[Token]:
	tokens = []
	position = 0
	while position < len(src):
		if not src[position:].strip(string.whitespace):
			break
		match = TOKEN_PATTERN.match(src, position)
		if match is None:
			offset = position + len(src[position:]) - len(src[position:].lstrip(string.whitespace))
			raise ExpressionSyntaxError(f'Unexpected character {src[offset]!r}', offset)
		kind = match.lastgroup
		tokens.append(Token(kind=kind, text=match.group(kind), position=match.start(kind)))
		position = match.end()
	return tokens


class ExpressionParser:
	"""Recursive-descent parser of one expression over a fixed ring."""

	def __init__(self, ring: PolyRing) -> None:
		self.ring = ring
		self.tokens: list[Token] = []
		self.index = 0
		self.end = 0

	def parse(self, src: str) -> ExprAST:
		self.tokens = tokenize(src)
		self.index = 0
		self.end = len(src)
		if not self.tokens:
			raise ExpressionSyntaxError('Empty expression', 0)
		terms = []
		sign = 1
		if self._peek_op('+', '-'):
			sign = -1 if self._next().text == '-' else 1
		terms.append(self._term(sign))
		while self.index < len(self.tokens):
			if not self._peek_op('+', '-'):
				token = self.tokens[self.index]
				raise ExpressionSyntaxError(f'Expected "+" or "-", got {token.text!r}', token.position)
			sign = -1 if self._next().text == '-' else 1
			terms.append(self._term(sign))
		return ExprAST(terms=terms)

	def _peek_op(self, *ops: str) -> bool:
		if self.index >= len(self.tokens):
			return False
		token = self.tokens[self.index]
		return token.kind == 'op' and token.text in ops

	def _next(self) -> Token:
		token = self.tokens[self.index]
		self.index += 1
		return token

	def _expect(self, kind: str, what: str) -> Token:
		if self.index >= len(self.tokens):
			raise ExpressionSyntaxError(f'Expected {what}, got end of input', self.end)
		token = self._next()
		if token.kind != kind:
			raise ExpressionSyntaxError(f'Expected {what}, got {token.text!r}', token.position)
		return token

	def _term(self, sign: int) -> Term:
		start = self.tokens[self.index].position if self.index < len(self.tokens) else self.end
		term = Term(coefficient=sign, position=start)
		self._factor(term)
		while self.index < len(self.tokens) and not self._peek_op('+', '-'):
			if self._peek_op('*'):
				self._next()
			self._factor(term)
		return term

	def _factor(self, term: Term) -> None:
		if self.index >= len(self.tokens):
			raise ExpressionSyntaxError('Expected a number, variable or differential, got end of input', self.end)
		token = self._next()
		if token.kind == 'int':
			term.coefficient *= int(token.text)
			return
		if token.kind != 'ident':
			raise ExpressionSyntaxError(f'Expected a number, variable or differential, got {token.text!r}', token.position)
		name = self._resolve(token)
		if name is None:
			term.differentials.append(token.text[1:])
			while self._peek_op('^'):
				self._next()
				differential = self._expect('ident', 'a differential after "^"')
				if self._resolve(differential) is not None:
					raise ExpressionSyntaxError(f'Expected a differential after "^", got {differential.text!r}', differential.position)
				term.differentials.append(differential.text[1:])
			return
		exponent = 1
		if self._peek_op('^'):
			self._next()
			negative = False
			if self._peek_op('-'):
				self._next()
				negative = True
			exponent = int(self._expect('int', 'an integer exponent').text)
			exponent = -exponent if negative else exponent
		term.exponents[name] = term.exponents.get(name, 0) + exponent

	def _resolve(self, token: Token) -> str | None:
		"""Returns the variable name, or None for a differential."""
		names = self.ring.names
		if token.text in names:
			return token.text
		if token.text.startswith('d') and token.text[1:] in names:
			return None
		raise UndeclaredVariableError(token.text)


def evaluate(ast: ExprAST, ring: PolyRing) -> Poly | DiffForm:
	"""Turns a parsed expression into a polynomial (no differentials) or a differential form."""
	degree = None
	result: Poly | DiffForm | None = None
	for term in ast.terms:
		coefficient = term.coefficient % ring.p
		term_degree = len(term.differentials)
		# built before the zero check so exponents are validated on every term
		f = Poly.monomial(ring, [term.exponents.get(name, 0) for name in ring.names], coefficient)
		value = f if term_degree == 0 else DiffForm(ring, term_degree, {tuple(ring.index(name) for name in term.differentials): f})
		if not coefficient:
			continue
		if degree is not None and term_degree != degree:
			raise ExpressionSyntaxError(f'Term of degree {term_degree} in an expression of degree {degree}', term.position)
		degree = term_degree
		result = value if result is None else result + value
	if result is None:
		first = len(ast.terms[0].differentials)
		return ring.zero() if first == 0 else DiffForm.zero(ring, first)
	return result


def parse_expression(src: str, ring: PolyRing) -> Poly | DiffForm:
	"""Parses `src` over `ring`; see the module docstring for the grammar."""
	return evaluate(ExpressionParser(ring).parse(src), ring)


def parse_poly(src: str, ring: PolyRing) -> Poly:
	value = parse_expression(src, ring)
	if isinstance(value, DiffForm):
		raise ExpressionSyntaxError(f'Expected a function, got a {value.degree}-form', 0)
	return value


def parse_form(src: str, ring: PolyRing, degree: int = 1) -> DiffForm:
	"""Parses a form of the given degree; the zero function is read as the zero form."""
	value = parse_expression(src, ring)
	if isinstance(value, Poly):
		if value.is_zero() or degree == 0:
			return DiffForm.function(value) if degree == 0 else DiffForm.zero(ring, degree)
		raise ExpressionSyntaxError(f'Expected a {degree}-form, got a function', 0)
	if value.degree != degree:
		if value.is_zero():
			return DiffForm.zero(ring, degree)
		raise ExpressionSyntaxError(f'Expected a {degree}-form, got a {value.degree}-form', 0)
	return value


def parse_forms(src: str, ring: PolyRing) -> list[DiffForm]:
	"""Semicolon-separated 1-forms."""
	return [parse_form(item, ring) for item in split_list(src, ';')]


def parse_form_grid(src: str, ring: PolyRing) -> list[list[DiffForm]]:
	"""A square matrix of 1-forms written as `a, b; c, d`."""
	rows = split_grid(src)
	if len(rows) != len(rows[0]):
		raise ExpressionSyntaxError(f'Connection matrix must be square, got {len(rows)}x{len(rows[0])}', 0)
	return [[parse_form(entry, ring) for entry in row] for row in rows]


def parse_poly_grid(src: str, ring: PolyRing) -> list[list[Poly]]:
	"""A square matrix of functions written as `a, b; c, d`."""
	rows = split_grid(src)
	if len(rows) != len(rows[0]):
		raise ExpressionSyntaxError(f'Matrix must be square, got {len(rows)}x{len(rows[0])}', 0)
	return [[parse_poly(entry, ring) for entry in row] for row in rows]


def parse_vars(spec: str, p: Prime | int) -> PolyRing:
	"""Builds a ring from `name[:laurent],...`; a blank spec is the ring without variables."""
	names: list[str] = []
	laurent: list[str] = []
	for item in split_list(spec, ','):
		name, _, qualifier = item.partition(':')
		name, qualifier = name.strip(), qualifier.strip()
		if qualifier not in ('', 'laurent'):
			raise InvalidRingError(f'Unknown variable qualifier {qualifier!r}, only "laurent" is supported')
		names.append(name)
		if qualifier:
			laurent.append(name)
	return PolyRing.build(p, names, laurent=laurent)


def render(value: Poly | DiffForm | Sequence[Poly | DiffForm]) -> str | list[str]:
	if isinstance(value, Poly | DiffForm):
		return value.render()
	return [x.render() for x in value]
