import random
import sys

import logfire
from tqdm import tqdm

from charpcartan.errors import UsageError
from charpcartan.selftest.suites import SUITES, SuiteContext, SuiteResult


class SelftestRunner:
	"""
	Runs the property suites in registration order.

	Each suite gets its own generator seeded from (seed, suite name), so a single suite reproduces the draws it makes in a
	full run.
	"""

	def __init__(self, seed: int = 0, samples: int | None = None) -> None:
		self.seed = seed
		self.samples = samples

	@staticmethod
	def suite_names() -> list[str]:
		return list(SUITES)

	def run_suite(self, name: str) -> SuiteResult:
		if name not in SUITES:
			raise UsageError(f'Unknown suite {name!r}; available: {", ".join(SUITES)}')
		ctx = SuiteContext(name, random.Random(f'{self.seed}:{name}'), self.samples)
		with logfire.span('Running suite {name}', name=name, seed=self.seed, samples=self.samples):
			SUITES[name](ctx)
		result = ctx.result()
		logfire.info('Suite finished', name=name, passed=result.passed, samples=result.samples)
		return result

	def run(self, names: list[str] | None = None) -> list[SuiteResult]:
		selected = self.suite_names() if names is None else names
		for name in selected:
			if name not in SUITES:
				raise UsageError(f'Unknown suite {name!r}; available: {", ".join(SUITES)}')
		# Progress goes to stderr; stdout is reserved for the JSON payload
		return [self.run_suite(name) for name in tqdm(selected, desc='Running selftest suites', file=sys.stderr, disable=None)]
