"""
Тесты валидаторов задачи контракта.
"""

import pytest

from core.exceptions import (
    CostsNotNondecreasingError,
    DuplicateTargetDistributionError,
    InvalidCostError,
    NotImplementableError,
    TargetNotStrictlyCostliestError,
)
from core.models import ContractSetting
from core.validators import CostVectorValidator, DuplicateRowValidator, validate_costs, validate_setting


class TestCostVectorValidator:
    """Тесты валидатора вектора затрат."""

    def test_valid_costs(self):
        validator = CostVectorValidator()

        assert validator.validate([0.0, 0.5, 1.0]) == []
        assert validator.validate([0.0, 0.0, 1.0]) == []

    def test_decreasing_costs(self):
        """Тест убывающих затрат."""
        errors = CostVectorValidator().validate([0.0, 2.0, 1.0], strict_target=False)

        assert len(errors) == 1
        assert "убывают" in errors[0]

    def test_strict_target(self):
        """Тест строгого превосходства затраты цели."""
        validator = CostVectorValidator()

        assert validator.validate([0.0, 1.0, 1.0], strict_target=True)
        assert validator.validate([0.0, 1.0, 1.0], strict_target=False) == []

    def test_validate_costs(self):
        assert validate_costs([0.0, 1.0]) == [0.0, 1.0]
        with pytest.raises(InvalidCostError):
            validate_costs([-1.0, 1.0])
        with pytest.raises(CostsNotNondecreasingError):
            validate_costs([1.0, 1.0], strict_target=True)


class TestValidateSetting:
    """Тесты полной проверки задачи."""

    def test_valid_setting(self, tightness_setting):
        assert validate_setting(tightness_setting) is tightness_setting

    def test_costs_not_nondecreasing(self):
        """Тест убывающих затрат альтернатив."""
        setting = ContractSetting(
            distributions=[[0.6, 0.4], [0.5, 0.5], [0.2, 0.8]],
            costs=[0.5, 0.1, 1.0],
        )

        with pytest.raises(CostsNotNondecreasingError):
            validate_setting(setting)

    def test_target_not_strictly_costliest(self):
        """Тест равных затрат цели и альтернативы."""
        setting = ContractSetting(distributions=[[0.6, 0.4], [0.2, 0.8]], costs=[1.0, 1.0])

        with pytest.raises(TargetNotStrictlyCostliestError):
            validate_setting(setting)

    def test_target_not_last(self):
        """Тест цели, которая не является последним действием."""
        setting = ContractSetting(distributions=[[0.6, 0.4], [0.2, 0.8]], costs=[0.0, 1.0], target=0)

        with pytest.raises(TargetNotStrictlyCostliestError):
            validate_setting(setting)

    def test_duplicate_target_distribution(self):
        """Тест совпадения строки цели с более дешевой альтернативой."""
        setting = ContractSetting(
            distributions=[[0.6, 0.4], [0.2, 0.8], [0.2, 0.8]],
            costs=[0.0, 0.5, 1.0],
        )

        with pytest.raises(DuplicateTargetDistributionError) as info:
            validate_setting(setting)

        assert isinstance(info.value, NotImplementableError)
        assert info.value.certificate == (0.0, 1.0)

    def test_find_duplicates(self):
        setting = ContractSetting(distributions=[[0.2, 0.8], [0.2, 0.8]], costs=[0.0, 1.0])

        assert DuplicateRowValidator().find_duplicates(setting) == [0]
