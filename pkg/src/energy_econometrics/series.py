"""Annual time-series container and deterministic-regressor algebra.

A break year is the last observation of the old regime. With a sample that
starts in ``start_year`` and has ``T`` observations, a break in year ``Y``
sits at 1-based position ``T_b = Y - start_year + 1`` and has fraction
``lambda = T_b / T``. Shift dummies (DU, DT) and pulses (DTB) all switch on
at position ``T_b + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BreakOutOfRange, DataError, NonPositiveValue, SeriesTooShort


class Deterministic(str, Enum):
    """Deterministic terms of a test regression."""

    NONE = "n"
    CONSTANT = "c"
    CONSTANT_TREND = "ct"

    @classmethod
    def from_string(cls, value: str | Deterministic) -> Deterministic:
        if isinstance(value, Deterministic):
            return value
        aliases = {
            "n": cls.NONE,
            "none": cls.NONE,
            "nc": cls.NONE,
            "c": cls.CONSTANT,
            "constant": cls.CONSTANT,
            "ct": cls.CONSTANT_TREND,
            "constant_and_trend": cls.CONSTANT_TREND,
            "trend": cls.CONSTANT_TREND,
        }
        try:
            return aliases[value.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown deterministic specification {value!r}") from None

    @property
    def has_constant(self) -> bool:
        return self is not Deterministic.NONE

    @property
    def has_trend(self) -> bool:
        return self is Deterministic.CONSTANT_TREND


class BreakKind(str, Enum):
    INTERCEPT = "intercept"
    TREND = "trend"
    BOTH = "both"

    @property
    def shifts_level(self) -> bool:
        return self is not BreakKind.TREND

    @property
    def shifts_slope(self) -> bool:
        return self is not BreakKind.INTERCEPT


class DummyStyle(str, Enum):
    SHIFT = "shift"
    PULSE = "pulse"


@dataclass(frozen=True, order=True)
class BreakDate:
    """A break year together with its position in a sample of ``nobs``."""

    year: int
    fraction: float = field(compare=False)
    nobs: int = field(compare=False)
    start_year: int = field(compare=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.fraction < 1.0:
            raise BreakOutOfRange(
                f"break year {self.year} gives fraction {self.fraction:.4f} outside (0, 1)",
                year=self.year,
            )

    @classmethod
    def from_year(cls, year: int, start_year: int, nobs: int) -> BreakDate:
        position = year - start_year + 1
        return cls(year=year, fraction=position / nobs, nobs=nobs, start_year=start_year)

    @classmethod
    def from_position(cls, position: int, start_year: int, nobs: int) -> BreakDate:
        return cls.from_year(start_year + position - 1, start_year, nobs)

    @property
    def position(self) -> int:
        """1-based index of the last pre-break observation (``T_b``)."""
        return self.year - self.start_year + 1

    def to_dict(self) -> dict:
        return {"year": self.year, "fraction": self.fraction}


@dataclass(frozen=True)
class BreakSpec:
    kind: BreakKind
    dates: tuple[BreakDate, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.dates) <= 2:
            raise BreakOutOfRange(f"a break specification holds one or two dates, got {len(self.dates)}")
        if len(self.dates) == 2 and not self.dates[0].year < self.dates[1].year:
            raise BreakOutOfRange(
                f"break dates must be strictly increasing, got {self.dates[0].year} and {self.dates[1].year}"
            )


@dataclass(frozen=True, eq=False)
class Series:
    """Immutable annual series; observation ``t`` belongs to ``start_year + t``."""

    name: str
    start_year: int
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if values.size < 1:
            raise SeriesTooShort(1, 0, f"series {self.name!r}")
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise DataError(f"series {self.name!r} has a non-finite value at index {int(bad[0])}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.name == other.name
            and self.start_year == other.start_year
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def nobs(self) -> int:
        return self.values.size

    @property
    def end_year(self) -> int:
        return self.start_year + self.nobs - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.start_year + self.nobs)

    def position_of(self, year: int) -> int:
        """1-based position of ``year`` in the sample."""
        if not self.start_year <= year <= self.end_year:
            raise BreakOutOfRange(
                f"year {year} is outside {self.name!r} ({self.start_year}-{self.end_year})", year=year
            )
        return year - self.start_year + 1

    def year_at(self, index: int) -> int:
        return self.start_year + index

    def value_at(self, year: int) -> float:
        return float(self.values[self.position_of(year) - 1])

    def break_at(self, year: int) -> BreakDate:
        self.position_of(year)
        return BreakDate.from_year(year, self.start_year, self.nobs)

    def slice_years(self, first: int, last: int) -> Series:
        lo = self.position_of(first) - 1
        hi = self.position_of(last)
        return Series(self.name, first, self.values[lo:hi])

    def renamed(self, name: str) -> Series:
        return Series(name, self.start_year, self.values)

    def shifted(self, offset: float) -> Series:
        return Series(self.name, self.start_year, self.values + offset)

    def scaled(self, factor: float) -> Series:
        return Series(self.name, self.start_year, self.values * factor)


# ============== Transformations ==============


def log_transform(s: Series) -> Series:
    nonpositive = np.flatnonzero(s.values <= 0.0)
    if nonpositive.size:
        index = int(nonpositive[0])
        raise NonPositiveValue(index, float(s.values[index]), s.name)
    return Series(f"ln{s.name}", s.start_year, np.log(s.values))


def difference(s: Series, order: int = 1) -> Series:
    if order < 1:
        raise ValueError("difference order must be positive")
    if s.nobs <= order:
        raise SeriesTooShort(order + 1, s.nobs, f"difference of order {order}")
    return Series(f"D{order}.{s.name}" if order > 1 else f"D.{s.name}", s.start_year + order, np.diff(s.values, n=order))


def lag(s: Series, k: int = 1) -> Series:
    """Series whose value in year ``y`` is the value of ``s`` in year ``y - k``."""
    if k < 1:
        raise ValueError("lag order must be positive")
    if s.nobs <= k:
        raise SeriesTooShort(k + 1, s.nobs, f"lag of order {k}")
    return Series(f"L{k}.{s.name}", s.start_year + k, s.values[: s.nobs - k])


def align(*series: Series) -> tuple[Series, ...]:
    """Restrict every series to the years all of them cover."""
    if not series:
        return ()
    first = max(s.start_year for s in series)
    last = min(s.end_year for s in series)
    if last < first:
        raise SeriesTooShort(1, 0, "alignment of series without common years")
    return tuple(s.slice_years(first, last) for s in series)


# ============== Deterministic regressors ==============


def constant_column(nobs: int) -> np.ndarray:
    return np.ones(nobs)


def trend_column(nobs: int) -> np.ndarray:
    """Linear trend numbered 1..T."""
    return np.arange(1.0, nobs + 1.0)


def check_break_position(position: int, nobs: int, year: int | None = None) -> None:
    if not 2 <= position <= nobs - 1:
        raise BreakOutOfRange(
            f"break position {position} must lie strictly inside [2, {nobs - 1}]", year=year
        )


def level_shift(nobs: int, position: int) -> np.ndarray:
    """DU: 1 for t > T_b (1-based), else 0."""
    check_break_position(position, nobs)
    t = trend_column(nobs)
    return (t > position).astype(float)


def trend_shift(nobs: int, position: int) -> np.ndarray:
    """DT: t - T_b for t > T_b, else 0."""
    check_break_position(position, nobs)
    t = trend_column(nobs)
    return np.where(t > position, t - position, 0.0)


def pulse(nobs: int, position: int) -> np.ndarray:
    """DTB: 1 at t = T_b + 1."""
    check_break_position(position, nobs)
    out = np.zeros(nobs)
    out[position] = 1.0
    return out


def break_interaction(nobs: int, position: int, form: str = "ramp") -> np.ndarray:
    """T(B) either as the ramp ``(t - T_b) 1[t > T_b]`` or the product ``t 1[t > T_b]``."""
    if form == "ramp":
        return trend_shift(nobs, position)
    if form == "product":
        return trend_column(nobs) * level_shift(nobs, position)
    raise ValueError(f"unknown interaction form {form!r}")


def break_dummies(nobs: int, spec: BreakSpec, style: DummyStyle | str = DummyStyle.SHIFT) -> dict[str, np.ndarray]:
    """Regressor columns for every date in ``spec``, keyed by type and break year."""
    style = DummyStyle(style)
    columns: dict[str, np.ndarray] = {}
    for date in spec.dates:
        position = _position_in(date, nobs)
        if style is DummyStyle.PULSE:
            columns[f"DTB_{date.year}"] = pulse(nobs, position)
            continue
        if spec.kind.shifts_level:
            columns[f"DU_{date.year}"] = level_shift(nobs, position)
        if spec.kind.shifts_slope:
            columns[f"DT_{date.year}"] = trend_shift(nobs, position)
    return columns


def _position_in(date: BreakDate, nobs: int) -> int:
    position = int(math.floor(date.fraction * nobs + 0.5))
    check_break_position(position, nobs, date.year)
    return position
