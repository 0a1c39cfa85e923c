"""
Приемочные проверки на сериях случайных экземпляров с фиксированными зернами.

Запуск только быстрых тестов: pytest -m "not slow".
"""

import os

import numpy as np
import pytest

from core import statistics
from core.contracts import (
    approximation_certificate,
    cost_robust_contract,
    is_threshold_contract,
    min_budget_contract,
    min_pay_contract,
    min_variance_contract,
    robust_surrogate,
    robust_violations,
)
from core.ingest import CostConfig, ReferenceModel, load_instance, per_mtoken_cost, tokens_per_kwh_for_cost
from core.models import ConstraintKind, Objective, RiskKind, RobustnessKind
from core.oracle import enumerate_tests, grid_min_budget, grid_min_pay, sample_cost_vectors
from core.service import ContractService
from tests.generators import bounded_gap_setting, mlr_rows, random_binary_setting, random_setting, seeds

RANDOM_INSTANCES = seeds(500)
TOL = 1e-6
GRID_STEP = 1e-3

pytestmark = pytest.mark.slow


class TestRobustEquivalence:
    """Устойчивые контракты совпадают со статистическими."""

    def test_budget_equals_sum_risk_scale(self):
        """Тест: бюджет устойчивого min-budget контракта равен b/(1 - R*)."""
        for seed in RANDOM_INSTANCES:
            setting = random_setting(seed)
            bound = setting.cost_spread

            psi, risk = statistics.minimax_sum_test(setting)
            contract = cost_robust_contract(setting, bound, Objective.MIN_BUDGET)
            expected = statistics.test_to_contract(
                psi, RiskKind.SUM, bound, statistics.risk_report(setting, None, psi)
            )
            by_lp = min_budget_contract(robust_surrogate(setting, bound), statistical_form=False)

            assert contract.budget == pytest.approx(bound / (1.0 - risk), abs=TOL), seed
            assert np.allclose(contract.as_array(), expected.as_array(), atol=TOL), seed
            assert by_lp.budget == pytest.approx(contract.budget, abs=TOL), seed

    def test_pay_equals_ratio_risk_scale(self):
        """Тест: ожидаемая выплата устойчивого min-pay контракта равна b/(1 - ρ*)."""
        for seed in RANDOM_INSTANCES:
            setting = random_setting(seed)
            bound = setting.cost_spread

            _, ratio = statistics.minimax_ratio_test(setting)
            contract = cost_robust_contract(setting, bound, Objective.MIN_PAY)

            pay = contract.expected_pay(setting.target_distribution)
            assert pay == pytest.approx(bound / (1.0 - ratio), abs=TOL), seed

    def test_dual_budget(self):
        """Тест сильной двойственности: b/TV до ближайшей смеси равно устойчивому бюджету."""
        for seed in RANDOM_INSTANCES:
            setting = random_setting(seed)
            bound = setting.cost_spread

            mix = statistics.least_favorable_mix(setting, None, bound)
            contract = cost_robust_contract(setting, bound, Objective.MIN_BUDGET)

            assert mix.implied_budget == pytest.approx(contract.budget, abs=TOL), seed

    def test_robust_contracts_pass_sampled_costs(self):
        """Тест: устойчивые контракты не нарушают IC ни на одном векторе из C_b."""
        for seed in RANDOM_INSTANCES:
            setting = random_setting(seed)
            bound = setting.cost_spread
            vectors = sample_cost_vectors(bound, setting.n, 102, seed=seed)

            for objective in (Objective.MIN_PAY, Objective.MIN_BUDGET):
                contract = cost_robust_contract(setting, bound, objective)
                assert robust_violations(setting, contract, vectors) == [], (seed, objective)


class TestApproximation:
    """Гарантия аппроксимации b/a."""

    def test_tightness_instance(self, tightness_setting):
        report = approximation_certificate(tightness_setting, 1.0, 2.0)

        assert report.aware_budget == pytest.approx(2.5, abs=1e-9)
        assert report.robust_budget == pytest.approx(5.0, abs=1e-9)
        assert report.ratio == pytest.approx(2.0, abs=1e-9)
        assert report.ratio == pytest.approx(report.guarantee)

    def test_aware_contract_is_not_robust_on_tightness(self, tightness_setting):
        """Тест: контракт для точных затрат нарушает IC в крайней точке (0, 0, b)."""
        contract = min_budget_contract(tightness_setting)

        violations = robust_violations(tightness_setting, contract, sample_cost_vectors(2.0, 3, 2))

        assert violations
        assert violations[0].costs == (0.0, 0.0, 2.0)

    def test_random_bounded_gaps(self):
        for seed in seeds(100):
            setting, lower, upper = bounded_gap_setting(seed)

            report = approximation_certificate(setting, lower, upper)

            assert report.ratio <= upper / lower + 1e-7, seed


class TestStructure:
    """Структура оптимальных контрактов."""

    def test_binary_identity(self):
        """Тест: для двух исходов все три критерия дают один контракт с t_fail = 0."""
        for seed in seeds(100):
            setting = random_binary_setting(seed)

            contracts = [
                min_pay_contract(setting).as_array(),
                min_budget_contract(setting).as_array(),
                min_variance_contract(setting).as_array(),
            ]

            assert contracts[0][0] == pytest.approx(0.0, abs=1e-8), seed
            assert np.max(np.abs(contracts[1] - contracts[0])) <= 1e-8, seed
            assert np.max(np.abs(contracts[2] - contracts[0])) <= 1e-8, seed

    def test_mlr_gives_threshold(self):
        """Тест: при MLR устойчивый min-budget контракт пороговый."""
        rng = np.random.default_rng(2024)
        for _ in range(200):
            n, m = int(rng.integers(2, 6)), int(rng.integers(2, 9))
            rows = mlr_rows(rng, n, m)
            assert statistics.check_mlr(rows)

            contract = cost_robust_contract(rows, 1.0, Objective.MIN_BUDGET)

            assert is_threshold_contract(contract), contract.payments


class TestOracleAgreement:
    """Сверка LP с переборными оракулами."""

    def test_grid_oracles(self):
        for seed in seeds(50, start=1000):
            setting = random_binary_setting(seed)
            target = setting.target_distribution

            budget = min_budget_contract(setting).budget
            pay = min_pay_contract(setting).expected_pay(target)
            grid_budget = grid_min_budget(setting, GRID_STEP).budget
            grid_pay = grid_min_pay(setting, GRID_STEP).expected_pay(target)

            assert budget - 1e-9 <= grid_budget <= budget + GRID_STEP, seed
            assert pay - 1e-9 <= grid_pay <= pay + GRID_STEP, seed

    def test_deterministic_tests(self):
        for seed in seeds(50):
            setting = random_setting(seed)

            bounds = enumerate_tests(setting.matrix)
            _, sum_risk = statistics.minimax_sum_test(setting)
            _, ratio_risk = statistics.minimax_ratio_test(setting)

            assert bounds.sum_risk >= sum_risk - 1e-9, seed
            assert bounds.ratio_risk >= ratio_risk - 1e-9, seed


class TestCostConversion:
    """Пересчет энергоэффективности в цену 1M токенов."""

    def test_llama_costs(self):
        config = CostConfig(energy_rate=0.105)

        for price in (0.182, 0.24, 0.64):
            model = ReferenceModel(name=str(price), tokens_per_kwh=tokens_per_kwh_for_cost(price, config))
            assert round(per_mtoken_cost(model, config), 3) == price


SNAPSHOT = os.environ.get("CONTRACTS_MT_BENCH_SNAPSHOT")

# (критерий, режим) -> значение собственного критерия строки
MONOTONE_TABLE = {
    (Objective.MIN_PAY, RobustnessKind.COST_AWARE): 4.19,
    (Objective.MIN_PAY, RobustnessKind.COST_ROBUST): 4.82,
    (Objective.MIN_BUDGET, RobustnessKind.COST_AWARE): 6.16,
    (Objective.MIN_BUDGET, RobustnessKind.COST_ROBUST): 6.63,
    (Objective.MIN_VARIANCE, RobustnessKind.COST_AWARE): 1.71,
    (Objective.MIN_VARIANCE, RobustnessKind.COST_ROBUST): 1.83,
}
UNCONSTRAINED_TABLE = {
    (Objective.MIN_PAY, RobustnessKind.COST_AWARE): 0.86,
    (Objective.MIN_PAY, RobustnessKind.COST_ROBUST): 0.92,
    (Objective.MIN_BUDGET, RobustnessKind.COST_AWARE): 3.59,
    (Objective.MIN_BUDGET, RobustnessKind.COST_ROBUST): 3.91,
    (Objective.MIN_VARIANCE, RobustnessKind.COST_AWARE): 1.45,
    (Objective.MIN_VARIANCE, RobustnessKind.COST_ROBUST): 1.53,
}


@pytest.mark.skipif(SNAPSHOT is None, reason="нужен CONTRACTS_MT_BENCH_SNAPSHOT с файлом экземпляра MT-Bench")
class TestMTBenchSnapshot:
    """Сверка сводной таблицы с опубликованными значениями (допуск 5%)."""

    def test_report_tables(self):
        instance = load_instance(SNAPSHOT, uniform_verbosity=True)
        rows = ContractService().report(instance.setting)
        by_cell = {(r.objective, r.constraint, r.robustness): r for r in rows}

        for constraint, table in ((ConstraintKind.MONOTONE, MONOTONE_TABLE),
                                  (ConstraintKind.UNCONSTRAINED, UNCONSTRAINED_TABLE)):
            for (objective, kind), expected in table.items():
                row = by_cell[(objective, constraint, kind)]
                assert row.objective_value() == pytest.approx(expected, rel=0.05), (objective, constraint, kind)

