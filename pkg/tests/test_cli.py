import io
import json
import random
import string
from pathlib import Path
from typing import Any

import pytest

from charpcartan.cli.commands.registry import CommandsRegistry
from charpcartan.cli.runner import EXIT_DOMAIN_ERROR, EXIT_OK, EXIT_USAGE_ERROR, run

DATA_DIR = Path(__file__).parent.parent / 'data'
SEED = 13
FUZZ_ALPHABET = 'xyd^*+- 0123$'
USAGE_KINDS = {
	'invalid_prime',
	'invalid_ring',
	'syntax_error',
	'undeclared_variable',
	'negative_exponent_on_polynomial_variable',
	'usage_error',
}


def invoke(*argv: str) -> tuple[int, str]:
	out = io.StringIO()
	code = run(list(argv), stdout=out)
	return code, out.getvalue()


def invoke_json(*argv: str) -> tuple[int, dict[str, Any]]:
	code, text = invoke(*argv)
	return code, json.loads(text)


class TestRegistry:
	def test_default_commands(self) -> None:
		names = [command.get_command_name() for command in CommandsRegistry.create_default().commands]
		assert names == [
			'cartier',
			'curvature',
			'pcurvature',
			'mc-check',
			'jacobson-check',
			'l1123-check',
			'classify-gm',
			'classify-ga',
			'check-tuple',
			'count',
			'selftest',
		]


class TestCartierCommand:
	def test_example_output(self) -> None:
		code, text = invoke('cartier', '--p', '3', '--vars', 'x:laurent', '--form', 'x^-1*dx')
		assert code == EXIT_OK
		assert text == '{"ok": true, "result": {"fixed_point": true, "form": "x^-1*dx"}}\n'

	def test_not_a_fixed_point(self) -> None:
		code, data = invoke_json('cartier', '--p', '3', '--vars', 'x', '--form', 'x^2*dx')
		assert code == EXIT_OK
		assert data['result'] == {'fixed_point': False, 'form': 'dx'}

	def test_largest_prime(self) -> None:
		code, data = invoke_json('cartier', '--p', '2147483647', '--vars', 'x', '--form', 'dx')
		assert code == EXIT_OK
		assert data['result'] == {'fixed_point': False, 'form': '0'}

	def test_not_closed(self) -> None:
		code, data = invoke_json('cartier', '--p', '3', '--vars', 'x,y', '--form', 'x*dy')
		assert code == EXIT_DOMAIN_ERROR
		assert data['ok'] is False
		assert data['error']['kind'] == 'not_closed'

	def test_pretty(self) -> None:
		_, text = invoke('cartier', '--p', '3', '--vars', 'x', '--form', 'dx', '--pretty')
		assert text.startswith('{\n  "ok": true')


class TestConnectionCommands:
	def test_curvature(self) -> None:
		code, data = invoke_json('curvature', '--p', '3', '--vars', 'x,y', '--conn', 'x*dy, 0; 0, 0')
		assert code == EXIT_OK
		assert data['result'] == {'curvature': ['dx^dy', '0', '0', '0'], 'flat': False, 'operator_agrees': True}

	def test_pcurvature(self) -> None:
		code, data = invoke_json('pcurvature', '--p', '3', '--vars', 'x', '--conn', 'x*dx', '--field', '2*x')
		assert code == EXIT_OK
		assert data['result'] == {'values': [[['x^3']]], 'formal': False, 'p_flat': False, 'operator_agrees': True, 'at_field': [['2*x^6']]}

	def test_pcurvature_abstract_algebra(self) -> None:
		code, data = invoke_json('pcurvature', '--p', '5', '--vars', 'x', '--algebra', str(DATA_DIR / 'aff1.json'), '--components', 'dx; 0')
		assert code == EXIT_OK
		assert data['result'] == {'values': ['(1)*a'], 'formal': False, 'p_flat': False}

	def test_algebra_over_other_prime(self) -> None:
		code, data = invoke_json('pcurvature', '--p', '3', '--vars', 'x', '--algebra', str(DATA_DIR / 'aff1.json'), '--components', 'dx; 0')
		assert code == EXIT_USAGE_ERROR
		assert data['error']['kind'] == 'usage_error'

	def test_missing_algebra_file(self, tmp_path: Path) -> None:
		code, _ = invoke('curvature', '--p', '5', '--vars', 'x', '--algebra', str(tmp_path / 'missing.json'), '--components', 'dx; 0')
		assert code != EXIT_OK

	@pytest.mark.parametrize(
		'content',
		[b'{"p": 5, "names": ["\xff"]}', b'{"p": 1e400, "dim": 2, "brackets": {}, "pth": [[1, 0], [0, 0]]}', b'[1, 2]'],
	)
	def test_malformed_algebra_file(self, tmp_path: Path, content: bytes) -> None:
		path = tmp_path / 'algebra.json'
		path.write_bytes(content)
		code, data = invoke_json('pcurvature', '--p', '5', '--vars', 'x', '--algebra', str(path), '--components', 'dx; 0')
		assert code == EXIT_DOMAIN_ERROR
		assert data['error']['kind'] == 'invalid_structure_constants'

	def test_needs_an_input(self) -> None:
		code, _ = invoke('curvature', '--p', '3', '--vars', 'x')
		assert code == EXIT_USAGE_ERROR

	@pytest.mark.parametrize('group', ['gm', 'ga', 'aff1'])
	def test_mc_check(self, group: str) -> None:
		code, data = invoke_json('mc-check', '--group', group, '--p', '5')
		assert code == EXIT_OK
		result = data['result']
		assert result['flat'] and result['p_flat'] and result['pullback']

	def test_mc_check_form(self) -> None:
		_, data = invoke_json('mc-check', '--group', 'aff1', '--p', '3')
		assert data['result']['form'] == [['x^-1*dx', 'x^-1*dy'], ['0', '0']]


class TestLieCommands:
	def test_jacobson(self) -> None:
		code, data = invoke_json('jacobson-check', '--p', '3', '--v', '0, 1; 0, 0', '--u', '0, 0; 1, 0')
		assert code == EXIT_OK
		assert data['result'] == {'holds': True, 'correction': [['0', '1'], ['1', '0']]}

	def test_l1123(self) -> None:
		code, data = invoke_json('l1123-check', '--p', '5', '--v', '1, 2; 3, 4', '--u', '0, 1; 1, 0')
		assert code == EXIT_OK
		assert data['result']['holds'] is True

	def test_abstract_pair(self) -> None:
		code, data = invoke_json('jacobson-check', '--p', '5', '--algebra', str(DATA_DIR / 'sl2.json'), '--v', '1, 0, 0', '--u', '0, 0, 1')
		assert code == EXIT_OK
		assert data['result']['holds'] is True

	def test_size_mismatch(self) -> None:
		code, _ = invoke('jacobson-check', '--p', '3', '--v', '0, 1; 0, 0', '--u', '1')
		assert code == EXIT_USAGE_ERROR


class TestClassifyCommands:
	def test_gm_example(self) -> None:
		code, data = invoke_json('classify-gm', '--p', '3', '--N', '2', '--target', '1')
		assert code == EXIT_OK
		assert data['result'] == {'p': 3, 'N': 2, 'count': 6, 'items': [1, 2, 4, 5, 7, 8], 'truncated': [1, 2, 1, 2, 1, 2]}

	def test_ga(self) -> None:
		code, data = invoke_json('classify-ga', '--p', '3', '--N', '2', '--D', '9')
		assert code == EXIT_OK
		assert data['result']['count'] == 18  # noqa: PLR2004
		assert data['result']['items'][0] == {'a': 1, 'terms': [], 'u': 'T'}

	def test_level_zero_is_a_domain_error(self) -> None:
		code, data = invoke_json('classify-gm', '--p', '3', '--N', '0')
		assert code == EXIT_DOMAIN_ERROR
		assert data['error']['kind'] == 'level_error'

	def test_check_tuple(self) -> None:
		code, data = invoke_json('check-tuple', '--p', '3', '--vars', 'x:laurent,y', '--omegas', 'x^-1*dx', '--chis', 'dy')
		assert code == EXIT_OK
		result = data['result']
		assert result['ok'] is True
		assert result['fixed_points'] == [True]
		assert result['kernel'] == [True]
		assert result['determinant'] == 'x^-1'

	def test_check_tuple_failure_still_exits_zero(self) -> None:
		code, data = invoke_json('check-tuple', '--p', '3', '--vars', 'x:laurent,y', '--omegas', 'dx', '--chis', 'dy')
		assert code == EXIT_OK
		assert data['result']['omega_failures'] == [1]


class TestCountCommand:
	def test_dormant_example(self) -> None:
		code, data = invoke_json('count', '--formula', 'dormant', '--p', '5', '--g', '2', '--N', '1')
		assert code == EXIT_OK
		assert data['result']['value'] == 5  # noqa: PLR2004
		assert data['result']['residual'] < 1e-6  # noqa: PLR2004
		assert data['result']['method'] == 'numeric'

	@pytest.mark.parametrize(('formula', 'expected'), [('elliptic', 100), ('bm', 100)])
	def test_closed_forms(self, formula: str, expected: int) -> None:
		_, data = invoke_json('count', '--formula', formula, '--p', '5', '--N', '3')
		assert data['result'] == {'value': expected, 'residual': 0.0, 'method': 'closed_form'}

	@pytest.mark.parametrize(
		'argv',
		[
			['count', '--formula', 'dormant', '--p', '5'],
			['count', '--formula', 'dormant', '--p', '5', '--g', '1'],
			['count', '--formula', 'unknown', '--p', '5'],
		],
	)
	def test_usage_errors(self, argv: list[str]) -> None:
		code, data = invoke_json(*argv)
		assert code == EXIT_USAGE_ERROR
		assert data['error']['kind'] == 'usage_error'


class TestSelftestCommand:
	def test_small_run(self) -> None:
		code, data = invoke_json('selftest', '--seed', '1', '--samples', '2', '--suites', 'jacobson,counting')
		assert code == EXIT_OK
		assert data['result']['passed'] is True
		assert [suite['name'] for suite in data['result']['suites']] == ['jacobson', 'counting']

	def test_unknown_suite(self) -> None:
		code, _ = invoke('selftest', '--suites', 'nope')
		assert code == EXIT_USAGE_ERROR

	def test_samples_must_be_positive(self) -> None:
		code, data = invoke_json('selftest', '--samples', '0')
		assert code == EXIT_USAGE_ERROR
		assert data['error']['kind'] == 'usage_error'


class TestEnvelope:
	"""Tests the exit codes and the determinism of the output."""

	@pytest.mark.parametrize(
		('argv', 'kind'),
		[
			([], 'usage_error'),
			(['nope'], 'usage_error'),
			(['cartier', '--p', '4', '--vars', 'x', '--form', 'dx'], 'invalid_prime'),
			(['cartier', '--p', '2', '--vars', 'x', '--form', 'dx'], 'invalid_prime'),
			(['cartier', '--p', 'three', '--vars', 'x', '--form', 'dx'], 'usage_error'),
			(['cartier', '--p', '3', '--vars', 'x', '--form', 'dz'], 'undeclared_variable'),
			(['cartier', '--p', '3', '--vars', 'x', '--form', 'x^-1*dx'], 'negative_exponent_on_polynomial_variable'),
			(['cartier', '--p', '3', '--vars', 'x', '--form', 'dx +'], 'syntax_error'),
			(['cartier', '--p', '3', '--vars', 'x,x', '--form', 'dx'], 'invalid_ring'),
			(['cartier', '--p', '3', '--vars', 'x'], 'usage_error'),
		],
	)
	def test_usage_errors(self, argv: list[str], kind: str) -> None:
		code, data = invoke_json(*argv)
		assert code == EXIT_USAGE_ERROR
		assert data == {'ok': False, 'error': {'kind': kind, 'message': data['error']['message']}}

	def test_bad_environment_seed(self, monkeypatch: pytest.MonkeyPatch) -> None:
		monkeypatch.setenv('CHARPCARTAN_SEED', 'abc')
		code, _ = invoke('selftest', '--samples', '1', '--suites', 'counting')
		assert code == EXIT_USAGE_ERROR

	def test_deterministic(self) -> None:
		argv = ['pcurvature', '--p', '3', '--vars', 'x,y', '--conn', 'x*dx + y*dy, dy; 0, x*dx + y*dy']
		assert invoke(*argv) == invoke(*argv)

	def test_fuzzed_forms_never_crash(self) -> None:
		rng = random.Random(SEED)
		for _ in range(300):
			src = ''.join(rng.choice(FUZZ_ALPHABET) for _ in range(rng.randint(1, 8)))
			code, data = invoke_json('cartier', '--p', '3', '--vars', 'x,y', f'--form={src}')
			if code == EXIT_USAGE_ERROR:
				assert data['error']['kind'] in USAGE_KINDS
			else:
				assert code in (EXIT_OK, EXIT_DOMAIN_ERROR)

	def test_fuzzed_command_names(self) -> None:
		rng = random.Random(SEED)
		for _ in range(50):
			name = ''.join(rng.choice(string.ascii_letters + string.digits) for _ in range(rng.randint(1, 10)))
			code, _ = invoke(name)
			assert code == EXIT_USAGE_ERROR
