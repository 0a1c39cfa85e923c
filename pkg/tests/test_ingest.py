"""
Тесты загрузки экземпляров и пересчета энергопотребления в затраты.
"""

import pytest

from core.exceptions import (
    DuplicateTargetDistributionError,
    EmptyHistogramError,
    InvalidCostError,
    SchemaError,
    StorageError,
)
from core.ingest import (
    CostConfig,
    ModelRecord,
    ReferenceModel,
    histogram_to_distribution,
    load_instance,
    parse_instance,
    per_mtoken_cost,
    per_response_cost,
    tokens_per_kwh_for_cost,
)
from core.models import ConstraintKind, Objective


def _model(name, cost, **fields):
    record = {"name": name, "cost": cost}
    record.update(fields)
    return record


class TestEnergyCosts:
    """Тесты пересчета энергоэффективности в затраты."""

    def test_per_mtoken_costs(self):
        """Тест цен $0.182, $0.24 и $0.64 за 1M токенов при тарифе 0.105."""
        config = CostConfig(energy_rate=0.105)

        costs = [
            per_mtoken_cost(ReferenceModel(name=name, tokens_per_kwh=tpk), config)
            for name, tpk in [("7b", 576923.0769230769), ("13b", 437500.0), ("70b", 164062.5)]
        ]

        assert costs == pytest.approx([0.182, 0.24, 0.64])

    def test_inverse_conversion(self):
        config = CostConfig(energy_rate=0.105)

        assert tokens_per_kwh_for_cost(0.24, config) == pytest.approx(437500.0)

        with pytest.raises(InvalidCostError):
            tokens_per_kwh_for_cost(0.0, config)

    def test_per_response_cost(self):
        """Тест c = α · E|ω|: 0.24 $/1M · 190 токенов."""
        record = ModelRecord(name="13b", tokens_per_kwh=437500.0, verbosity=190, pass_rate=0.35)

        cost = per_response_cost(record, CostConfig(energy_rate=0.105))

        assert cost == pytest.approx(4.56e-5)

    def test_invalid_rate(self):
        with pytest.raises(InvalidCostError):
            CostConfig(energy_rate=0.0)


class TestHistograms:
    """Тесты нормировки гистограмм."""

    def test_normalization(self):
        dist = histogram_to_distribution([1, 3, 4])

        assert dist.probs == pytest.approx((0.125, 0.375, 0.5))

    def test_empty_histogram(self):
        with pytest.raises(EmptyHistogramError):
            histogram_to_distribution([0, 0, 0])

    def test_empty_histogram_in_instance(self):
        """Тест указателя на пустую гистограмму в файле."""
        data = {
            "models": [
                _model("a", 0.0, score_histogram=[0, 0]),
                _model("b", 1.0, score_histogram=[1, 1]),
            ]
        }

        with pytest.raises(EmptyHistogramError) as info:
            parse_instance(data)

        assert "/models/0/score_histogram" in str(info.value)


class TestParseInstance:
    """Тесты разбора документа экземпляра."""

    def test_codegen_instance(self, instances_dir):
        """Тест экземпляра pass@1 с экстраполированной энергоэффективностью."""
        instance = load_instance(instances_dir / "codegen_pass1.json")

        assert instance.model_names == ("CodeLlama-7b", "CodeLlama-13b", "CodeLlama-70b")
        assert instance.outcome_labels == ("fail", "pass")
        assert instance.setting.target == 2
        assert instance.setting.distributions[2].probs == pytest.approx((0.5, 0.5))
        assert instance.setting.costs == pytest.approx((0.182e-6 * 180, 0.24e-6 * 190, 0.64e-6 * 175))
        assert instance.payment_unit == "response"

    def test_uniform_verbosity_switches_to_mtoken(self, instances_dir):
        """Тест: при общей многословности затраты считаются в $ за 1M токенов."""
        instance = load_instance(instances_dir / "codegen_pass1.json", uniform_verbosity=True)

        assert instance.payment_unit == "mtoken"
        assert instance.setting.costs == pytest.approx((0.182, 0.24, 0.64))

    def test_energy_rate_override(self, instances_dir):
        instance = load_instance(instances_dir / "codegen_pass1.json", uniform_verbosity=True, energy_rate=0.21)

        assert instance.setting.costs == pytest.approx((0.364, 0.48, 1.28))

    def test_defaults(self, mt_bench_instance):
        """Тест параметров решения по умолчанию из файла."""
        assert mt_bench_instance.request.objective == Objective.MIN_PAY
        assert mt_bench_instance.request.constraint == ConstraintKind.MONOTONE
        assert mt_bench_instance.setting.m == 10
        assert mt_bench_instance.payment_unit == "mtoken"

    def test_target_by_index(self):
        data = {
            "models": [_model("a", 0.0, pass_rate=0.2), _model("b", 1.0, pass_rate=0.5)],
            "target": 1,
        }

        assert parse_instance(data).setting.target == 1

    def test_schema_error_pointer(self):
        """Тест JSON-указателя на поле с нарушением схемы."""
        data = {"models": [_model("a", 0.0, pass_rate=1.5), _model("b", 1.0, pass_rate=0.5)]}

        with pytest.raises(SchemaError) as info:
            parse_instance(data)

        assert info.value.path == "/models/0/pass_rate"

    def test_unknown_target(self):
        data = {
            "models": [_model("a", 0.0, pass_rate=0.2), _model("b", 1.0, pass_rate=0.5)],
            "target": "c",
        }

        with pytest.raises(SchemaError) as info:
            parse_instance(data)

        assert info.value.path == "/target"

    def test_target_must_be_last(self):
        """Тест: целевой может быть только последняя модель списка."""
        data = {
            "models": [_model("a", 0.0, pass_rate=0.2), _model("b", 1.0, pass_rate=0.5)],
            "target": "a",
        }

        with pytest.raises(SchemaError) as info:
            parse_instance(data)

        assert info.value.path == "/target"

    def test_unknown_extrapolation_source(self):
        data = {
            "models": [
                {"name": "a", "tokens_per_kwh": 1000.0, "pass_rate": 0.2},
                {"name": "b", "extrapolated_from": "missing", "pass_rate": 0.5},
            ]
        }

        with pytest.raises(SchemaError) as info:
            parse_instance(data)

        assert info.value.path == "/models/1/extrapolated_from"

    def test_outcome_count_mismatch(self):
        data = {
            "models": [_model("a", 0.0, score_histogram=[1, 1, 1]), _model("b", 1.0, score_histogram=[1, 2])],
            "outcomes": 3,
        }

        with pytest.raises(SchemaError) as info:
            parse_instance(data)

        assert info.value.path == "/models/1/score_histogram"

    def test_duplicate_names(self):
        data = {"models": [_model("a", 0.0, pass_rate=0.2), _model("a", 1.0, pass_rate=0.5)]}

        with pytest.raises(SchemaError):
            parse_instance(data)

    def test_identical_rows_not_implementable(self, instances_dir):
        """Тест экземпляра, где цель совпадает с более дешевой моделью."""
        with pytest.raises(DuplicateTargetDistributionError):
            load_instance(instances_dir / "identical_rows.json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(StorageError):
            load_instance(tmp_path / "missing.json")

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")

        with pytest.raises(SchemaError):
            load_instance(path)

    def test_not_utf8(self, tmp_path):
        """Тест файла не в UTF-8: ошибка схемы, а не непредвиденное исключение."""
        path = tmp_path / "utf16.json"
        path.write_bytes(b"\xff\xfe{\x00}\x00")

        with pytest.raises(SchemaError) as info:
            load_instance(path)

        assert info.value.path == "/"
