"""
Тесты переборных оракулов.
"""

import numpy as np
import pytest

from core import statistics
from core.contracts import min_budget_contract, min_pay_contract
from core.exceptions import InvalidBoundError, TooManyOutcomesError
from core.models import ContractSetting
from core.oracle import enumerate_tests, grid_min_budget, grid_min_pay, sample_cost_vectors
from core.validators import validate_costs


class TestGridOracles:
    """Тесты сеточных оракулов."""

    def test_binary_grid(self, binary_setting):
        """Тест: сетка находит контракт в пределах шага от оптимума LP."""
        lp_pay = min_pay_contract(binary_setting).expected_pay(binary_setting.target_distribution)

        contract = grid_min_pay(binary_setting, grid_step=1e-3)

        assert contract.expected_pay(binary_setting.target_distribution) == pytest.approx(lp_pay, abs=1e-3)
        assert contract.expected_pay(binary_setting.target_distribution) >= lp_pay - 1e-9

    def test_tightness_grid_budget(self, tightness_setting):
        contract = grid_min_budget(tightness_setting, grid_step=1e-3)

        assert contract.budget == pytest.approx(2.5, abs=1e-3)

    def test_three_outcomes(self):
        """Тест сетки на трех исходах с крупным шагом."""
        setting = ContractSetting(
            distributions=[[0.6, 0.3, 0.1], [0.1, 0.3, 0.6]],
            costs=[0.0, 0.1],
        )
        lp_budget = min_budget_contract(setting).budget

        contract = grid_min_budget(setting, grid_step=0.01)

        assert contract.budget == pytest.approx(lp_budget, abs=0.01)

    def test_too_many_outcomes(self):
        setting = ContractSetting(distributions=[[0.25] * 4, [0.1, 0.2, 0.3, 0.4]], costs=[0.0, 1.0])

        with pytest.raises(TooManyOutcomesError):
            grid_min_budget(setting)


class TestEnumerateTests:
    """Тесты перебора детерминированных тестов."""

    def test_binary(self):
        bounds = enumerate_tests([[0.8, 0.2], [0.5, 0.5]])

        assert bounds.sum_risk == pytest.approx(0.7)
        assert bounds.ratio_risk == pytest.approx(0.4)
        assert bounds.sum_test == (0.0, 1.0)

    def test_never_beats_lp(self, three_outcome_setting):
        """Тест: детерминированные тесты не лучше минимаксного LP."""
        bounds = enumerate_tests(three_outcome_setting.matrix)
        _, sum_risk = statistics.minimax_sum_test(three_outcome_setting)
        _, ratio_risk = statistics.minimax_ratio_test(three_outcome_setting)

        assert bounds.sum_risk >= sum_risk - 1e-9
        assert bounds.ratio_risk >= ratio_risk - 1e-9

    def test_limit(self):
        rows = np.full((2, 21), 1.0 / 21)

        with pytest.raises(TooManyOutcomesError):
            enumerate_tests(rows)


class TestSampleCostVectors:
    """Тесты выборки векторов затрат из C_b."""

    def test_extremes_first(self):
        vectors = sample_cost_vectors(2.0, 3, 5, seed=0)

        assert len(vectors) == 5
        assert vectors[0] == (0.0, 0.0, 2.0)
        assert vectors[1] == (2.0, 2.0, 2.0)

    def test_vectors_in_cost_set(self):
        """Тест: векторы неотрицательны, не убывают и имеют разброс не больше b."""
        for costs in sample_cost_vectors(1.5, 4, 100, seed=11):
            validate_costs(costs)
            assert costs[-1] - costs[0] <= 1.5 + 1e-12

    def test_deterministic_seed(self):
        assert sample_cost_vectors(1.0, 3, 10, seed=5) == sample_cost_vectors(1.0, 3, 10, seed=5)
        assert sample_cost_vectors(1.0, 3, 10, seed=5) != sample_cost_vectors(1.0, 3, 10, seed=6)

    def test_invalid_bound(self):
        with pytest.raises(InvalidBoundError):
            sample_cost_vectors(0.0, 3, 10)
