import os
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, ClassVar

from pydantic import BaseModel, ConfigDict, Field

from charpcartan.errors import UsageError
from charpcartan.geometry.counting import DEFAULT_TOLERANCE


class CommandResultStatus(str, Enum):
	SUCCESS = 'success'
	FAILURE = 'failure'  # the command ran, but a checked property does not hold (exit code 1)


class CommandResult(BaseModel):
	"""Represents the outcome of an executed command."""

	status: CommandResultStatus = Field(default=CommandResultStatus.SUCCESS, description='Whether the command succeeded.')
	data: dict[str, Any] = Field(default_factory=dict, description='The JSON result payload.')


def _env_number[T: (int, float)](name: str, parse: type[T], default: T) -> T:
	raw = os.getenv(name)
	if raw is None:
		return default
	try:
		return parse(raw)
	except ValueError as e:
		raise UsageError(f'Environment variable {name}={raw!r} is not a valid {parse.__name__}') from e


def env_seed() -> int:
	return _env_number('CHARPCARTAN_SEED', int, 0)


def env_tolerance() -> float:
	return _env_number('CHARPCARTAN_TOLERANCE', float, DEFAULT_TOLERANCE)


class BaseCommand(BaseModel, ABC):
	"""
	An abstract class for all subcommands.
	The docstring of a subclass is the subcommand's help text.
	Its fields are the subcommand's flags.
	"""

	model_config = ConfigDict(extra='forbid', frozen=True)

	name: ClassVar[str]

	@abstractmethod
	def execute(self) -> CommandResult:
		"""Abstract method to be implemented by subclasses."""
		pass

	@classmethod
	def get_command_name(cls) -> str:
		return cls.name

	@classmethod
	def get_command_description(cls) -> str:
		"""Returns the first paragraph of the docstring."""
		return (cls.__doc__ or '').strip().split('\n\n')[0].replace('\n', ' ')

	def get_command_str(self) -> str:
		"""Returns pretty string of the command with its values, e.g. for logging."""
		return f'{self.get_command_name()}({", ".join(f"{name}={value!r}" for name, value in self.model_dump().items())})'

	@classmethod
	def is_default_command(cls) -> bool:
		"""Check if this command is marked as a default command."""
		return getattr(cls, '_is_default_command', False)

	@classmethod
	def get_default_commands(cls) -> list[type['BaseCommand']]:
		"""Get all command subclasses that are marked as default commands, in definition order."""

		def get_all_subclasses(cls: type['BaseCommand']) -> list[type['BaseCommand']]:
			"""Recursively get all subclasses."""
			result = []
			for subclass in cls.__subclasses__():
				result.append(subclass)
				result.extend(get_all_subclasses(subclass))
			return result

		return [command for command in get_all_subclasses(cls) if command.is_default_command()]


def default_command(cls: type[BaseCommand]) -> type[BaseCommand]:
	"""Decorator to mark a command as one of the default subcommands of the CLI."""
	cls._is_default_command = True
	return cls
