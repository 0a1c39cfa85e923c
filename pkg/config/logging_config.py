"""
Настройка логирования.

Записи стандартного logging оформляются через structlog: в виде строк
key=value для консоли или JSON (CONTRACTS_LOG_FORMAT=json) для Graylog/ELK.
Логи всегда идут в stderr, stdout остается только для результатов команд.
"""

import logging
import os
import sys
from typing import List, Optional

import structlog

from .settings import Settings, get_settings


def _build_formatter(log_format: str) -> structlog.stdlib.ProcessorFormatter:
    """Создает форматтер stdlib-записей на процессорах structlog."""
    shared_processors = [
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt="iso", utc=True),
    ]

    if log_format == "json":
        renderer = structlog.processors.JSONRenderer(ensure_ascii=False)
        shared_processors.append(structlog.processors.format_exc_info)
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=False)

    return structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared_processors,
        processors=[
            structlog.stdlib.ProcessorFormatter.remove_processors_meta,
            renderer,
        ],
    )


def setup_logging(settings: Optional[Settings] = None, level: Optional[str] = None) -> logging.Logger:
    """
    Настройка логирования с проверкой прав доступа к файлу логов.

    Повторный вызов заменяет ранее установленные обработчики.

    Args:
        settings: Настройки приложения (по умолчанию глобальные)
        level: Уровень логирования, перекрывающий настройки

    Returns:
        logging.Logger: Логгер пакета
    """
    settings = settings or get_settings()
    formatter = _build_formatter(settings.log_format)

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if settings.log_file is not None:
        try:
            settings.log_file.parent.mkdir(parents=True, exist_ok=True)
            if os.access(settings.log_file.parent, os.W_OK):
                handlers.append(logging.FileHandler(settings.log_file, encoding="utf-8"))
            else:
                print(f"Нет прав на запись в {settings.log_file.parent}, логи только в stderr", file=sys.stderr)
        except OSError as e:
            print(f"Ошибка настройки файлового логирования: {e}", file=sys.stderr)

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)
    root.setLevel((level or settings.log_level).upper())

    return logging.getLogger("contracts")
