"""
Пакет обработчиков команд командной строки.
"""

from . import common
from . import solve
from . import dual
from . import verify
from . import report

__all__ = ['common', 'solve', 'dual', 'verify', 'report']
