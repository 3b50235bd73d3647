"""Fact sets: feature-value associations used by evaluation and sessions.

Each binding remembers whether it was given from outside or derived by a
rule, and may carry the concept it was stated about. A feature holds at
most one value; binding a second, different value is a loud conflict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .errors import Inconsistent

Value = object  # categorical label (str) or number


def values_equal(a: Value, b: Value) -> bool:
    """Label equality, with tolerance for numbers: a value re-derived
    through a chain of formulas must not look like a conflict just because
    of floating-point noise."""
    if isinstance(a, (int, float)) and isinstance(b, (int, float)) \
            and not isinstance(a, bool) and not isinstance(b, bool):
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)
    return a == b


@dataclass(frozen=True)
class Fact:
    value: Value
    given: bool = True
    concept: Optional[str] = None


class FactSet:
    """Mapping from feature name to a single Fact."""

    def __init__(self, bindings: Optional[Mapping[str, Value]] = None, given: bool = True):
        self._facts: dict[str, Fact] = {}
        if bindings:
            for name, value in bindings.items():
                self.bind(name, value, given=given)

    def bind(self, feature: str, value: Value, given: bool = True,
             concept: Optional[str] = None) -> None:
        current = self._facts.get(feature)
        if current is not None and not values_equal(current.value, value):
            raise Inconsistent(
                f"{feature!r} already bound to {current.value!r}, got {value!r}")
        if current is None or (given and not current.given):
            self._facts[feature] = Fact(value, given=given, concept=concept)

    def value(self, feature: str) -> Value:
        return self._facts[feature].value

    def get(self, feature: str, default: Value = None) -> Value:
        fact = self._facts.get(feature)
        return default if fact is None else fact.value

    def fact(self, feature: str) -> Fact:
        return self._facts[feature]

    def given_features(self) -> list[str]:
        return [name for name, fact in self._facts.items() if fact.given]

    def copy(self) -> "FactSet":
        out = FactSet()
        out._facts = dict(self._facts)
        return out

    def merged(self, other: "FactSet") -> "FactSet":
        """New FactSet with both sets' bindings; conflicts raise Inconsistent."""
        out = self.copy()
        for name, fact in other._facts.items():
            out.bind(name, fact.value, given=fact.given, concept=fact.concept)
        return out

    def as_dict(self) -> dict[str, Value]:
        return {name: fact.value for name, fact in self._facts.items()}

    def __contains__(self, feature: str) -> bool:
        return feature in self._facts

    def __iter__(self) -> Iterator[str]:
        return iter(self._facts)

    def __len__(self) -> int:
        return len(self._facts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FactSet):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v.value!r}" for k, v in self._facts.items())
        return f"FactSet({inner})"
