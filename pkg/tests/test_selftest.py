import random

import pytest

from charpcartan.errors import UsageError
from charpcartan.selftest.runner import SelftestRunner
from charpcartan.selftest.suites import MAX_REPORTED_FAILURES, SuiteContext

SAMPLES = 3
SUITE_NAMES = ['jacobson', 'l1123', 'restricted_axioms', 'cartier', 'p_curvature', 'maurer_cartan', 'lemma_ga', 'classification', 'counting']


class TestSuiteContext:
	"""Tests the per-suite bookkeeping."""

	def test_size_cap(self) -> None:
		assert SuiteContext('x', random.Random(0)).size(200) == 200  # noqa: PLR2004
		assert SuiteContext('x', random.Random(0), samples=SAMPLES).size(200) == SAMPLES
		assert SuiteContext('x', random.Random(0), samples=500).size(200) == 200  # noqa: PLR2004

	def test_failures_are_recorded_and_capped(self) -> None:
		ctx = SuiteContext('x', random.Random(0))
		for k in range(MAX_REPORTED_FAILURES + 2):
			ctx.check(f'sample {k}', lambda: False)
		ctx.check('passing', lambda: True)
		result = ctx.result()
		assert not result.passed
		assert result.samples == MAX_REPORTED_FAILURES + 3
		assert result.failures == [f'sample {k}' for k in range(MAX_REPORTED_FAILURES)]

	def test_domain_errors_count_as_failures(self) -> None:
		def explode() -> bool:
			raise UsageError('boom')

		ctx = SuiteContext('x', random.Random(0))
		assert not ctx.check('exploding', explode)
		assert ctx.result().failures == ['exploding: usage_error: boom']


class TestSelftestRunner:
	def test_suite_names(self) -> None:
		assert SelftestRunner.suite_names() == SUITE_NAMES

	@pytest.mark.parametrize('name', SUITE_NAMES)
	def test_suites_pass(self, name: str) -> None:
		result = SelftestRunner(seed=0, samples=SAMPLES).run_suite(name)
		assert result.passed, result.failures
		assert result.samples > 0

	def test_deterministic(self) -> None:
		names = ['jacobson', 'cartier', 'lemma_ga']
		first = SelftestRunner(seed=42, samples=SAMPLES).run(names)
		second = SelftestRunner(seed=42, samples=SAMPLES).run(names)
		assert first == second

	def test_suite_draws_do_not_depend_on_selection(self) -> None:
		alone = SelftestRunner(seed=9, samples=SAMPLES).run(['cartier'])
		together = SelftestRunner(seed=9, samples=SAMPLES).run(['jacobson', 'cartier'])
		assert alone[0] == together[1]

	def test_unknown_suite(self) -> None:
		with pytest.raises(UsageError):
			SelftestRunner().run(['jacobson', 'nope'])
		with pytest.raises(UsageError):
			SelftestRunner().run_suite('nope')
