from src.cli.args import CliCommand, parse_args
from src.cli.commands import dispatch, run_analyze

__all__ = ["CliCommand", "dispatch", "parse_args", "run_analyze"]
