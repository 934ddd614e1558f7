# rscavity/utils/config.py

import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from .errors import InputError

ROOT_DIR = Path(__file__).parent.parent.parent

# field name -> environment variable
ENV_VARS = {
    "threads":       "RSCAVITY_THREADS",
    "component_cap": "RSCAVITY_COMPONENT_CAP",
    "tree_node_cap": "RSCAVITY_TREE_NODE_CAP",
    "truncation":    "RSCAVITY_TRUNCATION",
    "log_dir":       "RSCAVITY_LOG_DIR",
}


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


class Settings(BaseModel):
    """
    Runtime knobs, read from the environment (and a local ``.env``).

    Every operation with a cap also takes an explicit keyword override,
    so these are defaults only.
    """

    threads: int = Field(default_factory=_default_threads, ge=1)
    component_cap: int = Field(30, ge=1)
    tree_node_cap: int = Field(10_000_000, ge=1)
    truncation: float = Field(50.0, gt=0)
    log_dir: Path = ROOT_DIR / "data" / "run_logs"

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()
        raw = {}
        for field, var in ENV_VARS.items():
            value = os.getenv(var)
            if value not in (None, ""):
                raw[field] = value
        try:
            return cls(**raw)
        except ValidationError as exc:
            first = exc.errors()[0]
            field = first["loc"][0] if first.get("loc") else "?"
            raise InputError(f"invalid {ENV_VARS.get(field, field)}: {first['msg']}") from exc


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()
