"""
Командная строка решателя контрактов.
"""

from .main import main

__all__ = ['main']
