"""
Настройки приложения, загружаемые из переменных окружения.

Все переменные читаются с префиксом CONTRACTS_ (например, CONTRACTS_ENERGY_RATE)
и, при наличии, из файла .env в текущей директории.
"""

from pathlib import Path
from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки приложения."""

    model_config = SettingsConfigDict(
        env_prefix="CONTRACTS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Оценка стоимости генерации
    energy_rate: float = Field(default=0.105, gt=0, description="Тариф на электроэнергию, $/кВт·ч")

    # Настройки логирования
    log_level: str = Field(default="WARNING", description="Уровень логирования")
    log_format: Literal["text", "json"] = Field(default="text", description="Формат логов")
    log_file: Optional[Path] = Field(default=None, description="Путь к файлу логов")

    # Настройки вычислений
    workers: int = Field(default=4, ge=1, description="Размер пула потоков для report/sweep")
    seed: int = Field(default=0, description="Зерно генератора случайных векторов затрат")
    verify_samples: int = Field(default=100, ge=1, description="Число случайных векторов затрат при проверке")
    ic_margin: float = Field(default=0.0, ge=0, description="Запас ε в ограничениях IC")

    # Настройки вывода
    table_precision: int = Field(default=4, ge=0, le=12, description="Знаков после запятой в таблицах")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Валидация уровня логирования."""
        level = v.upper().strip()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Неизвестный уровень логирования: {v}")
        return level


# Глобальная переменная с настройками
settings = Settings()


def get_settings() -> Settings:
    """Возвращает объект настроек."""
    return settings


def load_settings_from_file(env_file: str = ".env") -> Settings:
    """
    Загружает настройки из указанного файла.

    Args:
        env_file: Путь к файлу с переменными окружения

    Returns:
        Settings: Объект настроек
    """
    return Settings(_env_file=env_file)


def create_env_example(path: str = ".env.example") -> Path:
    """Создает пример файла .env."""
    env_example_content = """# Тариф на электроэнергию для пересчета энергопотребления в затраты ($/кВт·ч)
CONTRACTS_ENERGY_RATE=0.105

# Настройки логирования (логи пишутся в stderr)
CONTRACTS_LOG_LEVEL=WARNING
CONTRACTS_LOG_FORMAT=text
# CONTRACTS_LOG_FILE=./logs/contracts.log

# Вычисления
CONTRACTS_WORKERS=4
CONTRACTS_SEED=0
CONTRACTS_VERIFY_SAMPLES=100
CONTRACTS_IC_MARGIN=0

# Вывод
CONTRACTS_TABLE_PRECISION=4
"""
    target = Path(path)
    target.write_text(env_example_content, encoding="utf-8")
    return target
