"""
Точка входа командной строки: разбор аргументов, настройка логирования и коды завершения.
"""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional

from config.logging_config import setup_logging
from core.exceptions import (
    ApproximationBoundError,
    ContractDesignError,
    DegenerateScaleError,
    NotImplementableError,
    OracleError,
    SolverError,
    StorageError,
    ValidationError,
    ZeroContractError,
)

from .handlers import dual, report, solve, verify
from .handlers.common import (
    EXIT_INPUT_ERROR,
    EXIT_NOT_IMPLEMENTABLE,
    EXIT_SOLVER_ERROR,
    EXIT_UNEXPECTED,
    EXIT_USAGE,
)

logger = logging.getLogger(__name__)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser, завершающийся кодом 64 при ошибке использования."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: ошибка: {message}\n")


def build_parser() -> CliArgumentParser:
    """
    Создает парсер со всеми командами.

    Returns:
        CliArgumentParser: Парсер; у каждой команды в defaults записан handler(args, out) -> int
    """
    parser = CliArgumentParser(
        prog="contracts",
        description="Оптимальные и устойчивые к затратам контракты для делегированной генерации текста",
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS, default=None, help="уровень логирования (stderr)")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # Порядок регистрации задает порядок команд в справке
    solve.register(subparsers)
    dual.register(subparsers)
    verify.register(subparsers)
    report.register(subparsers)
    return parser


def _fail(code: int, message: str) -> int:
    print(f"Ошибка: {message}", file=sys.stderr)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """
    Выполняет команду и возвращает код завершения.

    Args:
        argv: Аргументы без имени программы (по умолчанию sys.argv[1:])

    Returns:
        int: 0 успех, 1 нарушения IC, 2 нереализуемо, 3 входные данные,
            4 численный решатель, 5 непредвиденная ошибка, 64 использование
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(level=args.log_level)
    logger.info(f"Команда {args.command}")

    try:
        return args.handler(args, sys.stdout)
    except NotImplementableError as e:
        logger.error(f"Целевое действие нереализуемо: {e}")
        message = f"target not implementable: {e}"
        if e.certificate is not None:
            weights = ", ".join(f"{w:.4f}" for w in e.certificate)
            message += f" (веса смеси альтернатив: {weights})"
        return _fail(EXIT_NOT_IMPLEMENTABLE, message)
    except (ValidationError, StorageError, ZeroContractError) as e:
        return _fail(EXIT_INPUT_ERROR, str(e))
    except (SolverError, DegenerateScaleError, ApproximationBoundError, OracleError) as e:
        return _fail(EXIT_SOLVER_ERROR, f"сбой решателя: {e}")
    except ContractDesignError as e:
        return _fail(EXIT_UNEXPECTED, str(e))
    except Exception as e:
        logger.exception(f"Непредвиденная ошибка: {e}")
        return _fail(EXIT_UNEXPECTED, f"непредвиденная ошибка: {e}")
