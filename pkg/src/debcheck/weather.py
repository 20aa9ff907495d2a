"""Repository weather: the broken-package fraction mapped to a forecast."""

from __future__ import annotations

import enum
from typing import Mapping, NamedTuple

from .expand import PackageId
from .solver import CheckResult


class WeatherCategory(enum.Enum):
    """Severity bands for the share of non-installable packages."""

    CLEAR = "clear"
    FEW_CLOUDS = "few-clouds"
    CLOUDS = "clouds"
    SHOWERS = "showers"
    STORM = "storm"


# Band boundaries are left-closed/right-open so the mapping is total and
# unambiguous: [0,1%) [1,2%) [2,3%) [3,4%) [4%,100%].
_BANDS = (
    (0.01, WeatherCategory.CLEAR),
    (0.02, WeatherCategory.FEW_CLOUDS),
    (0.03, WeatherCategory.CLOUDS),
    (0.04, WeatherCategory.SHOWERS),
)


def weather_category(fraction: float) -> WeatherCategory:
    """Map a broken fraction in [0, 1] onto its weather band."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction out of range: {fraction!r}")
    for upper, category in _BANDS:
        if fraction < upper:
            return category
    return WeatherCategory.STORM


class Summary(NamedTuple):
    total: int
    broken: int
    fraction: float
    category: WeatherCategory


def summarize(results: Mapping[PackageId, CheckResult]) -> Summary:
    """Count verdicts and derive the weather; an empty map is clear."""
    total = len(results)
    broken = sum(1 for result in results.values() if not result.installable)
    fraction = broken / total if total else 0.0
    return Summary(total, broken, fraction, weather_category(fraction))
