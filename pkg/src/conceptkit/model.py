"""Domain model: features, concepts, classes, rules, and frames.

A knowledge base is a directed graph of concepts. Frames are verb-labelled
arcs between two concepts; each frame declares input, output, and optional
external features and carries rules. Rules are either categorical (value
bindings, optionally bidirectional) or quantitative (a guarded formula for
one target feature). Features live in one global space, and every feature
is bound to exactly one classifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Optional, Union

from . import expressions as xp
from .errors import UnguardedDivision, UnknownReference

FeatureKind = Literal["categorical", "ordinal", "numeric"]


@dataclass
class FeatureDef:
    """A named attribute with a value domain.

    Categorical and ordinal features enumerate their labels in `values`
    (ordinal order = list position). Numeric features carry a unit and
    optional [lower, upper] bounds instead.
    """
    name: str
    kind: FeatureKind = "categorical"
    values: list[str] = field(default_factory=list)
    unit: str = ""
    bounds: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.kind == "numeric":
            if self.values:
                raise ValueError(f"numeric feature {self.name!r} cannot enumerate values")
            if self.bounds is not None and self.bounds[0] >= self.bounds[1]:
                raise ValueError(f"feature {self.name!r} has empty bounds")
        elif len(set(self.values)) != len(self.values):
            raise ValueError(f"feature {self.name!r} repeats a domain label")

    def accepts(self, value: object) -> bool:
        if self.kind == "numeric":
            return isinstance(value, (int, float)) and not isinstance(value, bool)
        return value in self.values

    def rank(self, value: str) -> int:
        return self.values.index(value)


@dataclass
class ConceptClass:
    """A recognizable category inside a concept; `support` counts observed
    instances."""
    name: str
    support: int = 0


@dataclass
class Concept:
    """A node of the concept graph."""
    name: str
    classes: dict[str, ConceptClass] = field(default_factory=dict)
    features: list[str] = field(default_factory=list)
    subconcepts: list[str] = field(default_factory=list)

    @property
    def id(self) -> str:
        return self.name

    def class_names(self) -> list[str]:
        return list(self.classes)


@dataclass(frozen=True)
class Guard:
    """Firing condition of a quantitative rule: either `given(feature)`
    (the feature must carry a value) or `nonzero(expr)`."""
    kind: Literal["given", "nonzero"]
    feature: str = ""
    expr: Optional[xp.Expression] = None

    def __str__(self) -> str:
        if self.kind == "given":
            return f"given({self.feature})"
        return f"nonzero({xp.render(self.expr)})"


@dataclass
class CategoricalRule:
    """Conjunction of input/external bindings implying output bindings.

    `reciprocal` rules are biconditionals, usable consequent-to-antecedent
    in backward evaluation; plain rules fire forward only.
    """
    antecedent: dict[str, str]
    consequent: dict[str, str]
    reciprocal: bool = True

    def render(self) -> str:
        arrow = "⇔" if self.reciprocal else "→"
        ante = ", ".join(f"{f}={v}" for f, v in self.antecedent.items())
        cons = ", ".join(f"{f}={v}" for f, v in self.consequent.items())
        return f"If {ante} {arrow} {cons}"


@dataclass
class QuantitativeRule:
    """Guarded formula producing one numeric target feature. Always
    one-sided: the inverse direction must be declared as its own rule."""
    target: str
    formula: xp.Expression
    guards: list[Guard] = field(default_factory=list)

    def given_features(self) -> list[str]:
        return [g.feature for g in self.guards if g.kind == "given"]

    def nonzero_guards(self) -> list[Guard]:
        return [g for g in self.guards if g.kind == "nonzero"]

    def render(self) -> str:
        given = self.given_features()
        parts = []
        if given:
            parts.append(", ".join(given) + " given")
        for g in self.nonzero_guards():
            parts.append(f"{xp.render(g.expr)} ≠ 0")
        cond = " and ".join(parts) if parts else "always"
        return f"If {cond} → {self.target} = {xp.render(self.formula)}"


Rule = Union[CategoricalRule, QuantitativeRule]


@dataclass
class Frame:
    """A directed, verb-labelled transformer from one concept to another.

    Causality flows source -> target. Externals are optional side
    information (e.g. an ambient temperature) that quantitative rules may
    require before they activate.
    """
    name: str
    source: str
    target: str
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    externals: list[str] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)

    def declared_features(self) -> list[str]:
        return [*self.inputs, *self.outputs, *self.externals]

    def reciprocal_rules(self) -> list[CategoricalRule]:
        return [r for r in self.rules
                if isinstance(r, CategoricalRule) and r.reciprocal]


# -- element references (used by suppress and the violation report) --------

@dataclass(frozen=True)
class ClassRef:
    concept: str
    name: str

    def __str__(self) -> str:
        return f"{self.concept}::{self.name}"


@dataclass(frozen=True)
class FeatureRef:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ConceptRef:
    name: str

    def __str__(self) -> str:
        return self.name


ElementRef = Union[ClassRef, FeatureRef, ConceptRef]


def check_rule_against_frame(rule: Rule, frame: Frame,
                             constants: Optional[dict[str, float]] = None) -> None:
    """Validate that a rule only touches the frame's declared features and
    that every division in a formula is guarded.

    Raises UnknownReference or UnguardedDivision; does not mutate anything.
    """
    declared = set(frame.declared_features())
    ante_side = set(frame.inputs) | set(frame.externals)
    cons_side = set(frame.outputs)
    if isinstance(rule, CategoricalRule):
        for f in rule.antecedent:
            if f not in ante_side:
                raise UnknownReference(
                    f"rule antecedent feature {f!r} is not an input/external of frame {frame.name!r}")
        for f in rule.consequent:
            if f not in cons_side:
                raise UnknownReference(
                    f"rule consequent feature {f!r} is not an output of frame {frame.name!r}")
        if not rule.antecedent or not rule.consequent:
            raise UnknownReference(f"rule in frame {frame.name!r} has an empty side")
        return

    if rule.target not in cons_side:
        raise UnknownReference(
            f"rule target {rule.target!r} is not an output of frame {frame.name!r}")
    for g in rule.guards:
        if g.kind == "given" and g.feature not in declared:
            raise UnknownReference(
                f"guard names feature {g.feature!r} outside frame {frame.name!r}")
    consts = xp.CONSTANTS if constants is None else constants
    known = declared | set(consts)
    for var in xp.variables(rule.formula):
        if var not in known:
            raise UnknownReference(
                f"formula variable {var!r} is neither a feature of frame "
                f"{frame.name!r} nor a known constant")
    guard_exprs = [g.expr for g in rule.nonzero_guards()]
    for g in rule.nonzero_guards():
        for var in xp.variables(g.expr):
            if var not in known:
                raise UnknownReference(
                    f"guard variable {var!r} is neither a feature of frame "
                    f"{frame.name!r} nor a known constant")
    for divisor in xp.divisors(rule.formula):
        for factor in xp.factors(divisor):
            if xp.is_nonzero_literal(factor, consts):
                continue
            if any(factor == ge for ge in guard_exprs):
                continue
            raise UnguardedDivision(
                f"divisor factor {xp.render(factor)} in frame {frame.name!r} "
                f"has no nonzero(...) guard")


def reciprocity_conflict(rules: Iterable[Rule]) -> Optional[str]:
    """Check that reciprocal rules are functional in both directions.

    Returns a human-readable description of the first conflict, or None.
    Antecedents and consequents are compared as whole assignments.
    """
    seen_ante: dict[tuple, tuple] = {}
    seen_cons: dict[tuple, tuple] = {}
    for rule in rules:
        if not isinstance(rule, CategoricalRule) or not rule.reciprocal:
            continue
        ante = tuple(sorted(rule.antecedent.items()))
        cons = tuple(sorted(rule.consequent.items()))
        if ante in seen_ante and seen_ante[ante] != cons:
            return f"two reciprocal rules share antecedent {dict(ante)!r} with different consequents"
        if cons in seen_cons and seen_cons[cons] != ante:
            return f"two reciprocal rules share consequent {dict(cons)!r} with different antecedents"
        seen_ante[ante] = cons
        seen_cons[cons] = ante
    return None
