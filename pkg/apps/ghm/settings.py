# apps/ghm/settings.py
import logging
import os

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from apps.ghm.services.errors import ParameterError
from apps.ghm.services.exact_arith import DEFAULT_PRECISION, MIN_PRECISION
from apps.ghm.services.report import FORMATS

load_dotenv()


class Settings(BaseModel):
    """Defaults read from GHM_* environment variables; CLI flags override them."""

    model_config = ConfigDict(frozen=True)

    prec: int = DEFAULT_PRECISION
    format: str = "json"
    log_level: str = "WARNING"

    @field_validator("prec")
    @classmethod
    def _prec(cls, v: int) -> int:
        if v < MIN_PRECISION:
            raise ValueError(f"GHM_PREC must be at least {MIN_PRECISION}")
        return v

    @field_validator("format")
    @classmethod
    def _format(cls, v: str) -> str:
        v = v.lower()
        if v not in FORMATS:
            raise ValueError(f"GHM_FORMAT must be one of {FORMATS}")
        return v

    @field_validator("log_level")
    @classmethod
    def _log_level(cls, v: str) -> str:
        v = v.upper()
        if not isinstance(logging.getLevelName(v), int):
            raise ValueError(f"GHM_LOG_LEVEL {v!r} is not a logging level")
        return v


def load_settings() -> Settings:
    try:
        return Settings(
            prec=os.getenv("GHM_PREC", str(DEFAULT_PRECISION)),
            format=os.getenv("GHM_FORMAT", "json"),
            log_level=os.getenv("GHM_LOG_LEVEL", "WARNING"),
        )
    except ValidationError as e:
        raise ParameterError(f"invalid GHM_* setting: {e.errors()[0]['msg']}") from e
