#!/usr/bin/env python3
"""
Точка входа командной строки решателя контрактов.

Пример:
    python run.py solve instances/binary_2x2.json --objective budget
"""

import sys
from pathlib import Path

# Добавляем корневую директорию в путь для импортов
sys.path.insert(0, str(Path(__file__).parent))

from cli.main import main


if __name__ == "__main__":
    sys.exit(main())
