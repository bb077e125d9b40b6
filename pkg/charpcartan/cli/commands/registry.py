import argparse
import types
from enum import Enum
from typing import Any, NoReturn, Union, get_args, get_origin

from pydantic.fields import FieldInfo

# Import all commands to make sure they're loaded for __subclasses__() to work
from charpcartan.cli.commands import commands as _  # noqa: F401
from charpcartan.cli.commands.base import BaseCommand
from charpcartan.errors import UsageError

COMMON_FLAGS = ('pretty', 'logfire')


class JsonArgumentParser(argparse.ArgumentParser):
	"""Raises `UsageError` instead of printing usage text, so the runner can answer with the JSON envelope."""

	def error(self, message: str) -> NoReturn:
		raise UsageError(f'{self.prog}: {message}')


def _unwrap_optional(annotation: Any) -> Any:
	if get_origin(annotation) in (Union, types.UnionType):
		args = [arg for arg in get_args(annotation) if arg is not type(None)]
		if len(args) == 1:
			return args[0]
	return annotation


def _argument_kwargs(name: str, info: FieldInfo) -> dict[str, Any]:
	"""argparse keyword arguments for one model field; absent flags fall back to the field default."""
	annotation = _unwrap_optional(info.annotation)
	kwargs: dict[str, Any] = {'dest': name, 'help': info.description, 'default': argparse.SUPPRESS}
	if annotation is bool:
		kwargs['action'] = 'store_true'
		return kwargs
	if isinstance(annotation, type) and issubclass(annotation, Enum):
		kwargs['choices'] = [member.value for member in annotation]
		kwargs['type'] = str
	else:
		kwargs['type'] = annotation if annotation in (int, float, str) else str
	kwargs['required'] = info.is_required()
	return kwargs


class CommandsRegistry:
	"""Registry for subcommands."""

	def __init__(self, commands: list[type[BaseCommand]] | None = None) -> None:
		self.commands = commands if commands is not None else []

	@classmethod
	def create_default(cls) -> 'CommandsRegistry':
		"""Creates a CommandsRegistry with the default subcommands."""
		return cls(commands=BaseCommand.get_default_commands())

	def register_command(self, command: type[BaseCommand]) -> None:
		"""Register a new command."""
		self.commands.append(command)

	def get_command(self, name: str) -> type[BaseCommand]:
		for command in self.commands:
			if command.get_command_name() == name:
				return command
		raise UsageError(f'Unknown command {name!r}')

	def build_parser(self) -> JsonArgumentParser:
		"""One sub-parser per command; model fields become `--flags`."""
		common = JsonArgumentParser(add_help=False)
		common.add_argument('--pretty', action='store_true', default=False, help='Indent the JSON output.')
		common.add_argument('--logfire', action='store_true', default=False, help='Send logs to logfire even without a token in the environment.')

		parser = JsonArgumentParser(prog='charpcartan', description='Curvature, p-curvature and Cartier operators in characteristic p.')
		subparsers = parser.add_subparsers(dest='command', required=True, parser_class=JsonArgumentParser)
		for command in self.commands:
			sub = subparsers.add_parser(command.get_command_name(), parents=[common], help=command.get_command_description())
			for name, info in command.model_fields.items():
				sub.add_argument(f'--{name}', **_argument_kwargs(name, info))
		return parser

	def parse(self, argv: list[str]) -> BaseCommand:
		"""Parses the command line into a command instance; the common flags are read by the runner."""
		namespace = self.build_parser().parse_args(argv)
		values = vars(namespace).copy()
		command = self.get_command(values.pop('command'))
		for flag in COMMON_FLAGS:
			values.pop(flag, None)
		return command(**values)
