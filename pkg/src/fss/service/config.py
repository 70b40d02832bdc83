"""Service configuration from a TOML file with environment overrides."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ValidationError
from ..model import ModelSpec

TREATMENTS = ("O", "T", "TA")

ENV_PREFIX = "FSS_"


@dataclass(frozen=True)
class ServiceConfig:
    sales_path: Path
    calendar_path: Path
    store_dir: Path
    horizon_days: int = 14
    products: tuple[str, ...] = ()  # pool; empty means every product in the sales file
    products_per_session: int = 3
    treatment_mode: str = "param"  # "param": explicit per request; "round_robin": rotate
    treatments: tuple[str, ...] = TREATMENTS
    port: int = 8000
    model_spec: ModelSpec = field(default_factory=ModelSpec)
    allow_duplicate_workers: bool = False
    signoff_min_seconds: float = 10.0
    residual_weeks_max: int = 38
    rng_seed: int | None = None

    def __post_init__(self):
        if self.treatment_mode not in ("param", "round_robin"):
            raise ValidationError("treatment_mode must be 'param' or 'round_robin'")
        for t in self.treatments:
            if t not in TREATMENTS:
                raise ValidationError(f"unknown treatment {t!r}")
        if self.products_per_session < 1:
            raise ValidationError("products_per_session must be >= 1")
        if self.horizon_days < 1:
            raise ValidationError("horizon_days must be >= 1")
        object.__setattr__(self, "sales_path", Path(self.sales_path))
        object.__setattr__(self, "calendar_path", Path(self.calendar_path))
        object.__setattr__(self, "store_dir", Path(self.store_dir))


def load_service_config(path: str | Path) -> ServiceConfig:
    """Load a service config; FSS_* environment variables override file values."""
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with Path(path).open("rb") as fh:
        raw = tomllib.load(fh)

    data = raw.get("data", {})
    service = raw.get("service", {})
    spec = ModelSpec.from_mapping(raw.get("model", {}))

    def env(name: str, default):
        return os.environ.get(ENV_PREFIX + name, default)

    sales = env("SALES", data.get("sales"))
    calendar = env("CALENDAR", data.get("calendar"))
    store = env("STORE_DIR", service.get("store_dir", "store"))
    if not sales or not calendar:
        raise ValidationError("config must provide data.sales and data.calendar paths")

    return ServiceConfig(
        sales_path=Path(sales),
        calendar_path=Path(calendar),
        store_dir=Path(store),
        horizon_days=int(env("HORIZON_DAYS", service.get("horizon_days", 14))),
        products=tuple(service.get("products", ())),
        products_per_session=int(service.get("products_per_session", 3)),
        treatment_mode=str(env("TREATMENT_MODE", service.get("treatment_mode", "param"))),
        treatments=tuple(service.get("treatments", TREATMENTS)),
        port=int(env("PORT", service.get("port", 8000))),
        model_spec=spec,
        allow_duplicate_workers=bool(service.get("allow_duplicate_workers", False)),
        signoff_min_seconds=float(service.get("signoff_min_seconds", 10.0)),
        residual_weeks_max=int(service.get("residual_weeks_max", 38)),
        rng_seed=service.get("rng_seed"),
    )
