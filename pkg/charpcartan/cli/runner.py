import sys
from typing import Any, TextIO

import logfire
from pydantic import ValidationError

from charpcartan.cli.commands.base import CommandResultStatus
from charpcartan.cli.commands.registry import CommandsRegistry
from charpcartan.errors import CharpCartanError, ErrorKind
from charpcartan.utils import dump_json

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2


def configure_logfire(send: bool = False) -> None:
	"""Logs never reach stdout, which carries only the JSON payload."""
	logfire.configure(send_to_logfire=True if send else 'if-token-present', console=False)


def _error_payload(kind: ErrorKind, message: str) -> dict[str, Any]:
	return {'ok': False, 'error': {'kind': kind.value, 'message': message}}


class CommandRunner:
	"""Parses one command line, executes the command and writes the JSON envelope."""

	def __init__(self, registry: CommandsRegistry | None = None, stdout: TextIO | None = None, configure_logging: bool = False) -> None:
		self.registry = registry or CommandsRegistry.create_default()
		self.stdout = stdout
		self.configure_logging = configure_logging

	def run(self, argv: list[str]) -> int:
		"""Returns the exit code: 0 on success, 1 on domain errors or failed self-tests, 2 on usage errors."""
		pretty = '--pretty' in argv
		if self.configure_logging:
			configure_logfire(send='--logfire' in argv)
		try:
			command = self.registry.parse(argv)
			with logfire.span('Running {command}', command=command.get_command_str()):
				result = command.execute()
			ok = result.status == CommandResultStatus.SUCCESS
			payload: dict[str, Any] = {'ok': ok, 'result': result.data}
			code = EXIT_OK if ok else EXIT_DOMAIN_ERROR
		except CharpCartanError as e:
			logfire.info('Command failed', kind=e.kind.value, message=str(e))
			payload = _error_payload(e.kind, str(e))
			code = EXIT_USAGE_ERROR if e.usage else EXIT_DOMAIN_ERROR
		except ValidationError as e:
			payload = _error_payload(ErrorKind.USAGE_ERROR, '; '.join(f'{".".join(map(str, err["loc"]))}: {err["msg"]}' for err in e.errors()))
			code = EXIT_USAGE_ERROR
		except OSError as e:
			payload = _error_payload(ErrorKind.USAGE_ERROR, f'Cannot read input file: {e}')
			code = EXIT_USAGE_ERROR
		print(dump_json(payload, pretty=pretty), file=self.stdout or sys.stdout)
		return code


def run(argv: list[str] | None = None, stdout: TextIO | None = None) -> int:
	"""Runs one command line without touching the logfire configuration."""
	return CommandRunner(stdout=stdout).run(sys.argv[1:] if argv is None else argv)
