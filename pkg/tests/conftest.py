"""
Общие фикстуры тестов.
"""

import json
from pathlib import Path

import pytest

from core.ingest import load_instance
from core.models import ContractSetting

INSTANCES_DIR = Path(__file__).parent.parent / "instances"


@pytest.fixture
def instances_dir() -> Path:
    return INSTANCES_DIR


@pytest.fixture
def binary_setting() -> ContractSetting:
    """Две модели с pass@1 0.2 и 0.5, затраты 0 и 1."""
    return ContractSetting(distributions=[[0.8, 0.2], [0.5, 0.5]], costs=[0.0, 1.0])


@pytest.fixture
def tightness_setting() -> ContractSetting:
    """Экземпляр, на котором гарантия аппроксимации b/a достигается."""
    return ContractSetting(distributions=[[1.0, 0.0], [0.4, 0.6], [0.0, 1.0]], costs=[0.0, 1.0, 2.0])


@pytest.fixture
def three_outcome_setting() -> ContractSetting:
    return ContractSetting(
        distributions=[[0.5, 0.3, 0.2], [0.3, 0.4, 0.3], [0.1, 0.3, 0.6]],
        costs=[0.0, 0.2, 0.5],
    )


@pytest.fixture
def non_monotone_setting() -> ContractSetting:
    """Средний исход информативнее верхнего: оптимальный контракт не монотонен."""
    return ContractSetting(
        distributions=[[0.5, 0.1, 0.4], [0.2, 0.7, 0.1]],
        costs=[0.0, 1.0],
    )


@pytest.fixture
def mt_bench_instance():
    return load_instance(INSTANCES_DIR / "mt_bench_synthetic.json")


@pytest.fixture
def tmp_instance(tmp_path):
    """Записывает JSON экземпляр во временный файл и возвращает путь."""
    def _write(data: dict, name: str = "instance.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write
