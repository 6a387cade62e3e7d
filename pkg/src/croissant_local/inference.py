"""Sampling-based type inference for textual and JSON scalar values.

Each value is classified into a :class:`ValueClass`; the classes observed for
a column are joined over a small promotion lattice and finally resolved to a
Croissant data type tag.

The lattice (bottom to top)::

    NULL < INT < FLOAT < TEXT
    NULL < DATE < DATETIME < TEXT
    NULL < BOOL, TIME, URL < TEXT
"""

from __future__ import annotations

import datetime as _dt
import enum
import re
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "ValueClass",
    "TypeLatticeState",
    "classify_value",
    "classify_json_value",
    "join_classes",
    "join_types",
    "class_leq",
    "resolve_column",
    "resolve_class",
]

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class ValueClass(enum.Enum):
    NULL = "NULL"
    BOOL = "BOOL"
    INT = "INT"
    FLOAT = "FLOAT"
    DATE = "DATE"
    DATETIME = "DATETIME"
    TIME = "TIME"
    URL = "URL"
    TEXT = "TEXT"


_INT_RE = re.compile(r"[+-]?\d+\Z")
_FLOAT_RE = re.compile(r"[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?\Z")
_DATE_RE = re.compile(r"(\d{4})-(\d{2})-(\d{2})\Z")
_TIME_PART = r"(\d{2}):(\d{2})(?::(\d{2})(?:\.\d+)?)?"
_DATETIME_RE = re.compile(
    r"(\d{4})-(\d{2})-(\d{2})[T ]" + _TIME_PART + r"(?:Z|[+-]\d{2}(?::?\d{2})?)?\Z"
)
_TIME_RE = re.compile(r"(\d{2}):(\d{2}):(\d{2})(?:\.\d+)?\Z")
_URL_RE = re.compile(r"https?://[^\s/?#]+[^\s]*\Z", re.IGNORECASE)


def _valid_date(y: str, m: str, d: str) -> bool:
    try:
        _dt.date(int(y), int(m), int(d))
    except ValueError:
        return False
    return True


def _valid_time(h: str, m: str, s: str | None) -> bool:
    # 60 admits leap seconds
    return int(h) < 24 and int(m) < 60 and (s is None or int(s) <= 60)


def classify_value(raw: str, *, urls: bool = True) -> ValueClass:
    """Classify one textual value.

    ``urls=False`` disables URL recognition (URL-shaped text is then TEXT),
    which is how delimited text files are treated.
    """
    if raw == "":
        return ValueClass.NULL
    low = raw.lower()
    if low == "true" or low == "false":
        return ValueClass.BOOL
    if _INT_RE.match(raw):
        # out-of-range integers stay TEXT to avoid silent precision loss
        return ValueClass.INT if INT64_MIN <= int(raw) <= INT64_MAX else ValueClass.TEXT
    if _FLOAT_RE.match(raw):
        return ValueClass.FLOAT
    m = _DATE_RE.match(raw)
    if m:
        return ValueClass.DATE if _valid_date(*m.groups()) else ValueClass.TEXT
    m = _DATETIME_RE.match(raw)
    if m:
        y, mo, d, h, mi, s = m.groups()
        if _valid_date(y, mo, d) and _valid_time(h, mi, s):
            return ValueClass.DATETIME
        return ValueClass.TEXT
    m = _TIME_RE.match(raw)
    if m:
        return ValueClass.TIME if _valid_time(*m.groups()) else ValueClass.TEXT
    if urls and _URL_RE.match(raw):
        return ValueClass.URL
    return ValueClass.TEXT


_STRING_NUMERIC = frozenset({ValueClass.INT, ValueClass.FLOAT, ValueClass.BOOL})


def classify_json_value(value: object) -> ValueClass:
    """Classify a decoded JSON scalar.

    Native JSON numbers and booleans keep their type. Strings go through
    :func:`classify_value` for temporal and URL shapes, but a number or
    boolean spelled as a string stays TEXT.
    """
    if value is None:
        return ValueClass.NULL
    if isinstance(value, bool):
        return ValueClass.BOOL
    if isinstance(value, int):
        return ValueClass.INT if INT64_MIN <= value <= INT64_MAX else ValueClass.TEXT
    if isinstance(value, float):
        return ValueClass.FLOAT
    if isinstance(value, str):
        cls = classify_value(value)
        return ValueClass.TEXT if cls in _STRING_NUMERIC else cls
    return ValueClass.TEXT


_CHAINS = {
    frozenset({ValueClass.INT, ValueClass.FLOAT}): ValueClass.FLOAT,
    frozenset({ValueClass.DATE, ValueClass.DATETIME}): ValueClass.DATETIME,
}


def join_classes(a: ValueClass, b: ValueClass) -> ValueClass:
    """Least upper bound of two classes in the promotion lattice."""
    if a is b or b is ValueClass.NULL:
        return a
    if a is ValueClass.NULL:
        return b
    return _CHAINS.get(frozenset({a, b}), ValueClass.TEXT)


def class_leq(a: ValueClass, b: ValueClass) -> bool:
    """Lattice order: ``a <= b`` iff joining ``a`` into ``b`` leaves ``b``."""
    return join_classes(a, b) is b


def resolve_class(classes: Iterable[ValueClass]) -> ValueClass:
    out = ValueClass.NULL
    for c in classes:
        out = join_classes(out, c)
    return out


@dataclass(frozen=True)
class TypeLatticeState:
    """Accumulated type evidence for one column or leaf path."""

    seen_classes: frozenset[ValueClass] = frozenset()
    non_null_count: int = 0
    sampled_count: int = 0

    @property
    def resolved(self) -> ValueClass:
        return resolve_class(self.seen_classes)

    def merge(self, other: TypeLatticeState) -> TypeLatticeState:
        return TypeLatticeState(
            self.seen_classes | other.seen_classes,
            self.non_null_count + other.non_null_count,
            self.sampled_count + other.sampled_count,
        )


EMPTY_STATE = TypeLatticeState()


def join_types(state: TypeLatticeState, cls: ValueClass) -> TypeLatticeState:
    """Add one observation to ``state``; NULL only bumps the sample count."""
    if cls is ValueClass.NULL:
        return TypeLatticeState(state.seen_classes, state.non_null_count, state.sampled_count + 1)
    return TypeLatticeState(
        state.seen_classes | {cls}, state.non_null_count + 1, state.sampled_count + 1
    )


_RESOLUTION = {
    ValueClass.NULL: "sc:Text",
    ValueClass.BOOL: "sc:Boolean",
    ValueClass.INT: "cr:Int64",
    ValueClass.FLOAT: "cr:Float64",
    ValueClass.DATE: "sc:Date",
    ValueClass.DATETIME: "sc:DateTime",
    ValueClass.TIME: "sc:Time",
    ValueClass.URL: "sc:URL",
    ValueClass.TEXT: "sc:Text",
}


def resolve_column(state: TypeLatticeState) -> str:
    """Final Croissant data type for a column; all-NULL columns are sc:Text."""
    return _RESOLUTION[state.resolved]


class ColumnAccumulator:
    """Mutable per-column counterpart of :class:`TypeLatticeState`.

    Handlers scanning many rows use this to avoid allocating a new frozen
    state per cell.
    """

    __slots__ = ("resolved", "seen", "non_null", "sampled")

    def __init__(self) -> None:
        self.resolved = ValueClass.NULL
        self.seen: set[ValueClass] = set()
        self.non_null = 0
        self.sampled = 0

    def add(self, cls: ValueClass) -> None:
        self.sampled += 1
        if cls is ValueClass.NULL:
            return
        self.non_null += 1
        if cls not in self.seen:
            self.seen.add(cls)
            self.resolved = join_classes(self.resolved, cls)

    def state(self) -> TypeLatticeState:
        return TypeLatticeState(frozenset(self.seen), self.non_null, self.sampled)
