# core/ingest.py - загрузка экземпляров и оценка затрат по энергопотреблению

"""
Разбор файлов экземпляров, перевод гистограмм оценок в распределения и
пересчет энергоэффективности генераторов в затраты.

Формат файла - один JSON документ:

    {
      "models": [{"name": ..., "tokens_per_kwh": ..., "verbosity": ...,
                  "score_histogram": [...] | "pass_rate": ...}, ...],
      "outcomes": 10 | ["1", "2", ...],
      "target": "имя" | индекс,
      "cost_config": {"energy_rate": 0.105, "payment_unit": "response"},
      "reference_models": [{"name": ..., "tokens_per_kwh": ...}],
      "uniform_verbosity": false,
      "defaults": {"objective": "budget", "constraint": "monotone", "bound": ..., "ic_margin": 0}
    }
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from config.settings import get_settings

from .exceptions import EmptyHistogramError, InvalidCostError, SchemaError, StorageError
from .models import (
    ConstraintKind,
    ContractSetting,
    Objective,
    OutcomeDistribution,
    SolveRequest,
)
from .validators import validate_setting

logger = logging.getLogger(__name__)

TOKENS_PER_MTOKEN = 1e6


class CostConfig(BaseModel):
    """Параметры пересчета энергии в деньги."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    energy_rate: float = Field(default_factory=lambda: get_settings().energy_rate, description="Тариф, $/кВт·ч")
    payment_unit: Literal["response", "mtoken"] = Field(
        default="response", description="Единица затрат: $ за ответ или $ за 1M токенов"
    )

    @field_validator('energy_rate')
    @classmethod
    def validate_rate(cls, v):
        if not math.isfinite(v) or v <= 0:
            raise InvalidCostError(f"Тариф на электроэнергию должен быть положительным, получено {v}")
        return v


class ReferenceModel(BaseModel):
    """Запись только с энергоэффективностью (не является действием)."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1)
    tokens_per_kwh: float = Field(..., gt=0, description="Выходных токенов на кВт·ч")


class ModelRecord(BaseModel):
    """Генератор: энергоэффективность, многословность и распределение оценок."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1)
    tokens_per_kwh: Optional[float] = Field(default=None, gt=0, description="Выходных токенов на кВт·ч")
    extrapolated_from: Optional[str] = Field(default=None, description="Модель, чья энергоэффективность используется")
    verbosity: float = Field(default=1.0, ge=0, description="Средняя длина ответа в токенах")
    score_histogram: Optional[List[float]] = Field(default=None, min_length=2, description="Счетчики оценок")
    pass_rate: Optional[float] = Field(default=None, ge=0, le=1, description="Доля решенных задач pass@1")
    cost: Optional[float] = Field(default=None, ge=0, description="Явная затрата в единицах payment_unit")

    @field_validator('score_histogram')
    @classmethod
    def validate_histogram(cls, v):
        if v is not None and any(not math.isfinite(x) or x < 0 for x in v):
            raise ValueError("счетчики гистограммы должны быть неотрицательными")
        return v

    @model_validator(mode='after')
    def validate_outcome_source(self):
        if (self.score_histogram is None) == (self.pass_rate is None):
            raise ValueError("нужно указать ровно одно из полей score_histogram или pass_rate")
        if self.cost is None and self.tokens_per_kwh is None and self.extrapolated_from is None:
            raise ValueError("нужно указать tokens_per_kwh, extrapolated_from или cost")
        return self


class InstanceDefaults(BaseModel):
    """Параметры решения по умолчанию, хранящиеся в экземпляре."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    objective: Optional[Objective] = None
    constraint: Optional[ConstraintKind] = None
    bound: Optional[float] = Field(default=None, gt=0)
    ic_margin: Optional[float] = Field(default=None, ge=0)


class InstanceFile(BaseModel):
    """Схема файла экземпляра."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    models: List[ModelRecord] = Field(..., min_length=2)
    outcomes: Optional[Union[int, List[str]]] = None
    target: Optional[Union[int, str]] = None
    cost_config: CostConfig = Field(default_factory=CostConfig)
    reference_models: List[ReferenceModel] = Field(default_factory=list)
    uniform_verbosity: bool = False
    defaults: InstanceDefaults = Field(default_factory=InstanceDefaults)


class LoadedInstance(BaseModel):
    """Результат загрузки: проверенная задача и параметры решения."""
    model_config = ConfigDict(frozen=True)

    setting: ContractSetting
    request: SolveRequest
    model_names: Tuple[str, ...]
    outcome_labels: Tuple[str, ...]
    default_bound: Optional[float] = None
    payment_unit: str = "response"
    source: Optional[str] = None


def per_mtoken_cost(record: Union[ModelRecord, ReferenceModel], config: CostConfig) -> float:
    """
    Затраты на 1M выходных токенов: 1e6 · тариф / токенов_на_кВт·ч.

    Raises:
        InvalidCostError: Энергоэффективность не задана
    """
    if record.tokens_per_kwh is None:
        raise InvalidCostError(f"У модели {record.name} не задана энергоэффективность")
    return TOKENS_PER_MTOKEN * config.energy_rate / record.tokens_per_kwh


def tokens_per_kwh_for_cost(cost_per_mtoken: float, config: CostConfig) -> float:
    """Обратное преобразование: энергоэффективность по цене 1M токенов."""
    if cost_per_mtoken <= 0:
        raise InvalidCostError(f"Цена 1M токенов должна быть положительной, получено {cost_per_mtoken}")
    return TOKENS_PER_MTOKEN * config.energy_rate / cost_per_mtoken


def per_response_cost(record: ModelRecord, config: CostConfig) -> float:
    """Затраты на ответ c_i = α_i · E|ω_R|."""
    if record.verbosity == 0:
        logger.warning(f"У модели {record.name} нулевая многословность, затраты на ответ равны 0")
    return per_mtoken_cost(record, config) / TOKENS_PER_MTOKEN * record.verbosity


def histogram_to_distribution(counts: Sequence[float]) -> OutcomeDistribution:
    """
    Нормирует гистограмму оценок в распределение.

    Raises:
        EmptyHistogramError: Сумма счетчиков равна нулю
    """
    total = math.fsum(counts)
    if not total > 0:
        raise EmptyHistogramError(f"Пустая гистограмма: {tuple(counts)}")
    return OutcomeDistribution(probs=tuple(c / total for c in counts))


def model_distribution(record: ModelRecord) -> OutcomeDistribution:
    """Распределение исходов модели; pass@1 p дает строку (1 - p, p)."""
    if record.pass_rate is not None:
        return OutcomeDistribution(probs=(1.0 - record.pass_rate, record.pass_rate))
    return histogram_to_distribution(record.score_histogram)


def _pointer(loc: Sequence[Union[str, int]]) -> str:
    return "/" + "/".join(str(part) for part in loc)


def _resolve_energy(index: int, record: ModelRecord, known: Dict[str, float]) -> ModelRecord:
    if record.tokens_per_kwh is not None or record.extrapolated_from is None:
        return record
    source = record.extrapolated_from
    if source not in known:
        raise SchemaError(f"/models/{index}/extrapolated_from", f"неизвестная модель {source!r}")
    logger.info(f"Энергоэффективность {record.name} экстраполирована с {source}")
    return record.model_copy(update={"tokens_per_kwh": known[source]})


def model_cost(record: ModelRecord, config: CostConfig) -> float:
    """Затрата модели в единицах config.payment_unit."""
    if record.cost is not None:
        return record.cost
    if config.payment_unit == "mtoken":
        return per_mtoken_cost(record, config)
    return per_response_cost(record, config)


def parse_instance(
    data: dict,
    uniform_verbosity: Optional[bool] = None,
    energy_rate: Optional[float] = None,
    source: Optional[str] = None,
) -> LoadedInstance:
    """
    Строит экземпляр из разобранного JSON.

    Args:
        data: Документ экземпляра
        uniform_verbosity: Перекрывает поле uniform_verbosity файла
        energy_rate: Перекрывает тариф из cost_config
        source: Имя источника для сообщений

    Raises:
        SchemaError: Нарушение схемы (с JSON-указателем на поле)
    """
    try:
        instance = InstanceFile.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        raise SchemaError(_pointer(first["loc"]), first["msg"]) from e

    config = instance.cost_config
    if energy_rate is not None:
        config = CostConfig(energy_rate=energy_rate, payment_unit=config.payment_unit)
    if uniform_verbosity is None:
        uniform_verbosity = instance.uniform_verbosity
    if uniform_verbosity:
        # Общая многословность сокращается: затраты в $ за 1M токенов
        config = CostConfig(energy_rate=config.energy_rate, payment_unit="mtoken")

    known: Dict[str, float] = {ref.name: ref.tokens_per_kwh for ref in instance.reference_models}
    for record in instance.models:
        if record.tokens_per_kwh is not None:
            known[record.name] = record.tokens_per_kwh

    names = [record.name for record in instance.models]
    if len(set(names)) != len(names):
        raise SchemaError("/models", "имена моделей должны быть уникальными")

    distributions = []
    costs = []
    for index, record in enumerate(instance.models):
        record = _resolve_energy(index, record, known)
        field = "pass_rate" if record.pass_rate is not None else "score_histogram"
        try:
            distributions.append(model_distribution(record))
        except EmptyHistogramError as e:
            raise EmptyHistogramError(f"/models/{index}/{field}: {e}") from e
        costs.append(model_cost(record, config))

    m = distributions[0].m
    if isinstance(instance.outcomes, int):
        labels = tuple(str(j) for j in range(instance.outcomes))
    elif instance.outcomes is not None:
        labels = tuple(instance.outcomes)
    else:
        labels = tuple(str(j) for j in range(m))
    for index, dist in enumerate(distributions):
        if dist.m != len(labels):
            field = "pass_rate" if instance.models[index].pass_rate is not None else "score_histogram"
            raise SchemaError(f"/models/{index}/{field}", f"{dist.m} исходов вместо {len(labels)}")

    if instance.target is None:
        target = len(names) - 1
    elif isinstance(instance.target, str):
        if instance.target not in names:
            raise SchemaError("/target", f"неизвестная модель {instance.target!r}")
        target = names.index(instance.target)
    else:
        if not 0 <= instance.target < len(names):
            raise SchemaError("/target", f"индекс {instance.target} вне диапазона [0, {len(names)})")
        target = instance.target
    if target != len(names) - 1:
        raise SchemaError(
            "/target", f"целевой должна быть последняя модель списка {names[-1]!r}, указана {names[target]!r}"
        )

    setting = validate_setting(ContractSetting(distributions=distributions, costs=costs, target=target))

    defaults = instance.defaults
    request = SolveRequest(
        objective=defaults.objective or Objective.MIN_PAY,
        constraint=defaults.constraint or ConstraintKind.UNCONSTRAINED,
        ic_margin=defaults.ic_margin if defaults.ic_margin is not None else get_settings().ic_margin,
    )
    logger.info(f"Загружен экземпляр {source or '<dict>'}: {setting.n} моделей, {setting.m} исходов")
    return LoadedInstance(
        setting=setting,
        request=request,
        model_names=tuple(names),
        outcome_labels=labels,
        default_bound=defaults.bound,
        payment_unit=config.payment_unit,
        source=source,
    )


def load_instance(
    path: Union[str, Path],
    uniform_verbosity: Optional[bool] = None,
    energy_rate: Optional[float] = None,
) -> LoadedInstance:
    """
    Загружает и проверяет файл экземпляра.

    Args:
        path: Путь к JSON файлу
        uniform_verbosity: Перекрывает поле uniform_verbosity файла
        energy_rate: Перекрывает тариф из cost_config

    Returns:
        LoadedInstance: Задача, запрос по умолчанию, имена моделей и исходов

    Raises:
        StorageError: Файл не читается
        SchemaError: Нарушение схемы
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Ошибка чтения файла экземпляра {path}: {e}")
    except UnicodeDecodeError as e:
        raise SchemaError("/", f"файл не в кодировке UTF-8: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("/", f"некорректный JSON: {e}")
    if not isinstance(data, dict):
        raise SchemaError("/", "документ экземпляра должен быть объектом")
    return parse_instance(data, uniform_verbosity=uniform_verbosity, energy_rate=energy_rate, source=str(path))
