import sys

from dotenv import load_dotenv

from charpcartan.cli.runner import CommandRunner


def main() -> None:
	load_dotenv()

	# Logfire is configured once the --logfire flag is known
	runner = CommandRunner(configure_logging=True)
	sys.exit(runner.run(sys.argv[1:]))


if __name__ == '__main__':
	main()
