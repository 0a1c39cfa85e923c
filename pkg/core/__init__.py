"""
Основной модуль решателя контрактов: доменные типы, LP/QP движок,
оптимальные и устойчивые контракты, минимаксные тесты и загрузка экземпляров.
"""

from .service import get_contract_service, SolveResult, VerificationReport
from .models import (
    Contract,
    ContractSetting,
    HypothesisTest,
    Objective,
    ConstraintKind,
    Robustness,
    SolveRequest,
)
from .validators import validate_setting
from .ingest import load_instance
from .storage import get_contract_storage

__version__ = "1.0.0"

__all__ = [
    'get_contract_service',
    'SolveResult',
    'VerificationReport',
    'Contract',
    'ContractSetting',
    'HypothesisTest',
    'Objective',
    'ConstraintKind',
    'Robustness',
    'SolveRequest',
    'validate_setting',
    'load_instance',
    'get_contract_storage',
]
