"""
File to start soslab command line tool.
"""

import logging
import sys
import traceback
from typing import Callable, Dict, List, Optional
from cli.logger import logger, set_verbose
from cli import commands
from cli.config_data import read_config_file
from cli.parser import parse_args
from stochsched.errors import ContractViolationError, HorizonCapError, NumericalError


COMMANDS: Dict[str, Callable] = {"certify": commands.cmd_certify,
                                 "check-density": commands.cmd_check_density,
                                 "config": commands.cmd_config,
                                 "curves": commands.cmd_curves,
                                 "generate": commands.cmd_generate,
                                 "run": commands.cmd_run}
EXIT_FAILURE: int = 2
EXIT_USAGE: int = 1


class ExceptionHandler:
    """
    Class to handle unexpected errors.
    """

    def exception_hook(self, exc_type: type, exc_value: BaseException, exc_traceback: "traceback") -> None:
        """
        Method handles unexpected errors.
        :param exc_type: exception class;
        :param exc_value: exception instance;
        :param exc_traceback: traceback object.
        """

        traceback.print_exception(exc_type, exc_value, exc_traceback)
        full_msg_text = (f"Произошла ошибка. Сфотографируйте сообщение с ошибкой и обратитесь в техподдержку.\n\n"
                         f"{str(exc_value)}")
        print(full_msg_text, file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Function runs command given on command line.
    :param argv: command line arguments without program name.
    :return: exit code.
    """

    logger
    exception_handler = ExceptionHandler()
    sys.excepthook = exception_handler.exception_hook
    defaults = read_config_file()
    try:
        args = parse_args(defaults, argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    set_verbose(args.verbose)
    try:
        return COMMANDS[args.command](args, defaults)
    except (NumericalError, ContractViolationError) as exc:
        logging.error("%s", exc)
        return EXIT_FAILURE
    except (HorizonCapError, ValueError, OSError) as exc:
        logging.error("%s", exc)
        return EXIT_USAGE
    except Exception:
        exception_handler.exception_hook(*sys.exc_info())
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
