"""Frame evaluation and chained inference.

Everything here is read-only over a knowledge-base snapshot.

Forward evaluation fires every rule whose antecedent (and guards) hold and
merges the outputs; backward evaluation runs biconditional rules from
consequent to antecedent. `query` chains rule firings breadth-first across
frames, in both directions, and returns the shortest justifying derivation.

Query semantics for actionable goals: when the goal feature is a root
input -- something no frame derives, only the outside world sets, like
"Owns glasses" -- a question about it is read as advice-seeking, not
diagnosis. The engine first diagnoses along the causal chain, then
recommends the goal value whose own consequences contradict the reported
observation (the value that would change the situation). The final
derivation step is marked `remedial` and uses the biconditional rule for
the recommended value. Plain causal readings are served by
`explain_cause`, which enumerates logical backward chains only.

Conflicts are never resolved by preference: two firings that bind one
feature differently raise Inconsistent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping, Optional, Sequence, Union

from . import expressions as xp
from .errors import (
    GuardError,
    Inconsistent,
    MissingExternal,
    NoCause,
    NonInvertible,
    Unbound,
    UnknownFeature,
    UnknownValue,
)
from .facts import FactSet, values_equal
from .kb import KnowledgeBase
from .model import CategoricalRule, Frame, QuantitativeRule

DEFAULT_DEPTH = 8
MAX_COMPLETIONS = 4096

Direction = Literal["forward", "backward"]


@dataclass(frozen=True)
class Step:
    """One rule firing inside a derivation."""
    frame: str
    rule_index: int
    direction: Direction
    consumed: tuple[tuple[str, object], ...]
    produced: tuple[tuple[str, object], ...]
    kind: Literal["logical", "remedial"] = "logical"

    def consumed_dict(self) -> dict[str, object]:
        return dict(self.consumed)

    def produced_dict(self) -> dict[str, object]:
        return dict(self.produced)


@dataclass
class Derivation:
    """Ordered chain of rule firings justifying a conclusion."""
    steps: list[Step]
    conclusion: dict[str, object]

    def frames(self) -> list[str]:
        return [s.frame for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


Status = Literal["exact", "approximate", "unknown"]


@dataclass
class Answer:
    status: Status
    value: object = None
    candidates: set = field(default_factory=set)
    missing: list[str] = field(default_factory=list)
    derivations: list[Derivation] = field(default_factory=list)


# -- single-frame evaluation ---------------------------------------------------


def _check_domains(kb: KnowledgeBase, frame: Frame, facts: FactSet) -> None:
    for name in facts:
        if name in kb.features and name in frame.declared_features():
            defn = kb.features[name]
            if not defn.accepts(facts.value(name)):
                raise UnknownValue(
                    f"{facts.value(name)!r} is not in the domain of {name!r}")


def _resolve(kb: KnowledgeBase, frame: Union[Frame, str]) -> Frame:
    return kb.frame(frame) if isinstance(frame, str) else frame


def _merge_output(outputs: FactSet, facts: FactSet, feature: str, value: object) -> None:
    if feature in facts and not values_equal(facts.value(feature), value):
        raise Inconsistent(
            f"derived {feature}={value!r} contradicts given {feature}={facts.value(feature)!r}")
    outputs.bind(feature, value, given=False)


def _fire_quantitative(kb: KnowledgeBase, frame: Frame, rule: QuantitativeRule,
                       facts: FactSet) -> Optional[dict[str, object]]:
    """Produce the rule's target binding, or None when its givens are absent."""
    for feat in rule.given_features():
        if feat not in facts:
            return None
    needed = xp.variables(rule.formula)
    for guard in rule.nonzero_guards():
        needed |= xp.variables(guard.expr)
    absent = [e for e in frame.externals if e in needed and e not in facts]
    if absent:
        raise MissingExternal(
            f"frame {frame.name!r} needs external {absent[0]!r} to activate")
    bindings = {name: facts.value(name) for name in needed if name in facts}
    for guard in rule.nonzero_guards():
        if xp.evaluate(guard.expr, bindings, kb.constants) == 0.0:
            raise GuardError(f"guard {guard} failed in frame {frame.name!r}")
    value = xp.evaluate(rule.formula, bindings, kb.constants)
    return {rule.target: value}


def _fire_categorical(rule: CategoricalRule, facts: FactSet,
                      direction: Direction) -> Optional[dict[str, object]]:
    pattern = rule.antecedent if direction == "forward" else rule.consequent
    result = rule.consequent if direction == "forward" else rule.antecedent
    for feat, value in pattern.items():
        if feat not in facts or not values_equal(facts.value(feat), value):
            return None
    return dict(result)


def eval_forward(kb: KnowledgeBase, frame: Union[Frame, str], facts: FactSet) -> FactSet:
    """Fire every applicable rule of one frame on the given facts and
    return the merged output bindings."""
    frame = _resolve(kb, frame)
    _check_domains(kb, frame, facts)
    outputs = FactSet()
    for rule in frame.rules:
        if isinstance(rule, CategoricalRule):
            produced = _fire_categorical(rule, facts, "forward")
        else:
            produced = _fire_quantitative(kb, frame, rule, facts)
        if produced:
            for feat, value in produced.items():
                _merge_output(outputs, facts, feat, value)
    return outputs


def eval_backward(kb: KnowledgeBase, frame: Union[Frame, str], facts: FactSet) -> FactSet:
    """Run biconditional rules consequent-to-antecedent. Raises
    NonInvertible when only one-sided rules matched the given outputs."""
    frame = _resolve(kb, frame)
    _check_domains(kb, frame, facts)
    inputs = FactSet()
    one_sided_hit = False
    fired = False
    for rule in frame.rules:
        if isinstance(rule, QuantitativeRule):
            if rule.target in facts:
                one_sided_hit = True
            continue
        if not rule.reciprocal:
            if _fire_categorical(rule, facts, "backward") is not None:
                one_sided_hit = True
            continue
        produced = _fire_categorical(rule, facts, "backward")
        if produced:
            fired = True
            for feat, value in produced.items():
                _merge_output(inputs, facts, feat, value)
    if not fired and one_sided_hit:
        raise NonInvertible(
            f"frame {frame.name!r} only matches one-sided rules for these outputs")
    return inputs


def eval_expression(expr: xp.Expression,
                    bindings: Union[Mapping[str, float], FactSet],
                    constants: Optional[Mapping[str, float]] = None) -> float:
    """Evaluate a formula against bindings; Unbound/GuardError on failure."""
    if isinstance(bindings, FactSet):
        bindings = {k: bindings.value(k) for k in bindings}
    return xp.evaluate(expr, bindings, constants)


# -- chained inference -----------------------------------------------------------


def _rule_transitions(kb: KnowledgeBase, facts: FactSet):
    """Every single-rule firing applicable to `facts`, deterministic order.

    Yields (step, produced) pairs; only firings that add new bindings count.
    Quantitative firings that merely miss inputs are skipped silently, but
    guard failures and missing externals stay loud.
    """
    for name in sorted(kb.frames):
        frame = kb.frames[name]
        for index, rule in enumerate(frame.rules):
            directions: tuple[Direction, ...]
            if isinstance(rule, QuantitativeRule):
                directions = ("forward",)
            elif rule.reciprocal:
                directions = ("forward", "backward")
            else:
                directions = ("forward",)
            for direction in directions:
                if isinstance(rule, QuantitativeRule):
                    produced = _fire_quantitative(kb, frame, rule, facts)
                    consumed = {f: facts.value(f) for f in rule.given_features()} \
                        if produced else {}
                else:
                    produced = _fire_categorical(rule, facts, direction)
                    pattern = rule.antecedent if direction == "forward" else rule.consequent
                    consumed = {f: facts.value(f) for f in pattern} if produced else {}
                if not produced:
                    continue
                news = {f: v for f, v in produced.items()
                        if f not in facts or not values_equal(facts.value(f), v)}
                for feat, value in produced.items():
                    if feat in facts and not values_equal(facts.value(feat), value):
                        raise Inconsistent(
                            f"{feat}={value!r} from frame {name!r} contradicts "
                            f"{feat}={facts.value(feat)!r}")
                if not news:
                    continue
                yield Step(frame=name, rule_index=index, direction=direction,
                           consumed=tuple(sorted(consumed.items())),
                           produced=tuple(sorted(produced.items()))), produced


def _state_key(facts: FactSet) -> frozenset:
    return frozenset(facts.as_dict().items())


def _chain_to_goal(kb: KnowledgeBase, facts: FactSet, goal: str,
                   depth: int) -> Optional[tuple[object, list[Step]]]:
    """Breadth-first chaining; returns the goal's value and the shortest
    step sequence that binds it, or None."""
    if goal in facts:
        return facts.value(goal), []
    frontier: list[tuple[FactSet, list[Step]]] = [(facts, [])]
    visited = {_state_key(facts)}
    for _ in range(depth):
        next_frontier: list[tuple[FactSet, list[Step]]] = []
        for state, steps in frontier:
            for step, produced in _rule_transitions(kb, state):
                successor = state.copy()
                for feat, value in produced.items():
                    successor.bind(feat, value, given=False)
                key = _state_key(successor)
                if key in visited:
                    continue
                visited.add(key)
                path = [*steps, step]
                if goal in successor and goal not in state:
                    return successor.value(goal), path
                next_frontier.append((successor, path))
        if not next_frontier:
            break
        frontier = next_frontier
    return None


def _closure(kb: KnowledgeBase, facts: FactSet, depth: int) -> Optional[FactSet]:
    """All bindings derivable from `facts` in both directions, or None when
    the expansion runs into a conflict or a loud guard."""
    state = facts.copy()
    try:
        for _ in range(depth):
            grew = False
            for _, produced in _rule_transitions(kb, state):
                for feat, value in produced.items():
                    if feat not in state:
                        state.bind(feat, value, given=False)
                        grew = True
            if not grew:
                return state
        return state
    except (Inconsistent, GuardError, MissingExternal, Unbound):
        return None


def _is_root_input(kb: KnowledgeBase, feature: str) -> bool:
    an_input = any(feature in f.inputs for f in kb.frames.values())
    an_output = any(feature in f.outputs for f in kb.frames.values())
    return an_input and not an_output


def _remedial_value(kb: KnowledgeBase, facts: FactSet, goal: str,
                    depth: int) -> Optional[object]:
    """The goal value whose own consequences contradict a given fact --
    i.e. the value that would change the reported situation. None unless
    exactly one domain value qualifies."""
    defn = kb.features.get(goal)
    if defn is None or defn.kind == "numeric":
        return None
    candidates = []
    for value in defn.values:
        trial = FactSet({goal: value})
        closed = _closure(kb, trial, depth)
        if closed is None:
            continue
        contradicts = any(
            name in closed and not values_equal(closed.value(name), facts.value(name))
            for name in facts.given_features())
        if contradicts:
            candidates.append(value)
    if len(candidates) == 1:
        return candidates[0]
    return None


def _remedial_step(kb: KnowledgeBase, last: Step, goal: str,
                   value: object) -> Optional[Step]:
    """Swap the final diagnostic step for the biconditional rule that
    yields the recommended goal value."""
    frame = kb.frames[last.frame]
    for index, rule in enumerate(frame.rules):
        if not isinstance(rule, CategoricalRule) or not rule.reciprocal:
            continue
        if rule.antecedent.get(goal) != value:
            continue
        return Step(frame=frame.name, rule_index=index, direction="backward",
                    consumed=last.consumed,
                    produced=tuple(sorted(rule.antecedent.items())),
                    kind="remedial")
    return None


def _relevant_missing(kb: KnowledgeBase, facts: FactSet, goal: str,
                      depth: int) -> list[str]:
    """Unbound categorical/ordinal features that could chain to the goal."""
    relevant = {goal}
    for _ in range(depth):
        grew = False
        for frame in kb.frames.values():
            if set(frame.outputs) & relevant:
                for feat in (*frame.inputs, *frame.externals):
                    if feat not in relevant:
                        relevant.add(feat)
                        grew = True
            if frame.reciprocal_rules() and set(frame.inputs) & relevant:
                for feat in frame.outputs:
                    if feat not in relevant:
                        relevant.add(feat)
                        grew = True
        if not grew:
            break
    missing = [name for name in sorted(relevant)
               if name != goal and name not in facts
               and kb.features[name].kind != "numeric"]
    return missing


def query(kb: KnowledgeBase, facts: FactSet, goal: str,
          depth: int = DEFAULT_DEPTH) -> Answer:
    """Answer a question about `goal` from the given facts.

    Exact answers carry the shortest derivation. When nothing binds the
    goal, every completion of the relevant missing categorical features is
    tried; the values those completions reach become an approximate
    answer. With no candidates at all the answer is unknown.
    """
    if goal not in kb.features:
        raise UnknownFeature(f"no feature named {goal!r}")
    for name in facts:
        defn = kb.features.get(name)
        if defn is None:
            raise UnknownFeature(f"no feature named {name!r}")
        if not defn.accepts(facts.value(name)):
            raise UnknownValue(f"{facts.value(name)!r} not in domain of {name!r}")

    found = _chain_to_goal(kb, facts, goal, depth)
    if found is not None:
        value, steps = found
        if steps and _is_root_input(kb, goal):
            advised = _remedial_value(kb, facts, goal, depth)
            if advised is not None and advised != value:
                swapped = _remedial_step(kb, steps[-1], goal, advised)
                if swapped is not None:
                    steps = [*steps[:-1], swapped]
                    value = advised
        return Answer(status="exact", value=value,
                      derivations=[Derivation(steps=steps, conclusion={goal: value})])

    missing = _relevant_missing(kb, facts, goal, depth)
    candidates = set()
    if missing:
        domains = [kb.features[name].values for name in missing]
        combos = itertools.islice(itertools.product(*domains), MAX_COMPLETIONS)
        for combo in combos:
            trial = facts.copy()
            try:
                for name, value in zip(missing, combo):
                    trial.bind(name, value)
                outcome = _chain_to_goal(kb, trial, goal, depth)
            except (Inconsistent, GuardError, MissingExternal, Unbound):
                continue
            if outcome is not None:
                candidates.add(outcome[0])
    if candidates:
        return Answer(status="approximate", candidates=candidates, missing=missing)
    return Answer(status="unknown", missing=missing)


def explain_cause(kb: KnowledgeBase, observation: Union[FactSet, tuple[str, object]],
                  depth: int = DEFAULT_DEPTH) -> list[Derivation]:
    """Every backward chain from one observed fact to frame inputs,
    shortest first. Each prefix of a longer chain is its own explanation."""
    if isinstance(observation, FactSet):
        if len(observation) != 1:
            raise UnknownValue("explain_cause takes exactly one observed fact")
        feature = next(iter(observation))
        value = observation.value(feature)
    else:
        feature, value = observation
    if feature not in kb.features:
        raise UnknownFeature(f"no feature named {feature!r}")
    if not any(feature in f.outputs for f in kb.frames.values()):
        raise NoCause(f"no frame produces {feature!r}")

    chains: list[Derivation] = []
    start = FactSet({feature: value})

    def extend(state: FactSet, steps: list[Step], seen: frozenset) -> None:
        if len(steps) >= depth:
            return
        for name in sorted(kb.frames):
            frame = kb.frames[name]
            for index, rule in enumerate(frame.rules):
                if not isinstance(rule, CategoricalRule) or not rule.reciprocal:
                    continue
                produced = _fire_categorical(rule, state, "backward")
                if not produced:
                    continue
                news = {f: v for f, v in produced.items() if f not in state}
                if not news:
                    continue
                key = frozenset(news.items())
                if key in seen:
                    continue
                consumed = {f: state.value(f) for f in rule.consequent}
                step = Step(frame=name, rule_index=index, direction="backward",
                            consumed=tuple(sorted(consumed.items())),
                            produced=tuple(sorted(produced.items())))
                successor = state.copy()
                for f, v in news.items():
                    successor.bind(f, v, given=False)
                path = [*steps, step]
                chains.append(Derivation(steps=path, conclusion=dict(produced)))
                extend(successor, path, seen | {key})

    extend(start, [], frozenset())
    chains.sort(key=lambda d: (len(d.steps), [s.frame for s in d.steps]))
    return chains


def replay_derivation(kb: KnowledgeBase, facts: FactSet,
                      derivation: Derivation) -> dict[str, object]:
    """Re-run a derivation against the knowledge base and return its
    conclusion. Raises Inconsistent when any step no longer holds, which
    makes derivations self-validating."""
    available = facts.copy()
    for step in derivation.steps:
        frame = kb.frame(step.frame)
        try:
            rule = frame.rules[step.rule_index]
        except IndexError:
            raise Inconsistent(f"frame {step.frame!r} lost rule {step.rule_index}") from None
        for feat, value in step.consumed:
            if feat not in available or not values_equal(available.value(feat), value):
                raise Inconsistent(f"step consumes unavailable {feat}={value!r}")
        produced = dict(step.produced)
        if step.kind == "remedial":
            if not isinstance(rule, CategoricalRule) or not rule.reciprocal:
                raise Inconsistent("remedial step must use a biconditional rule")
            if dict(rule.antecedent) != produced:
                raise Inconsistent("remedial step does not match its rule's antecedent")
            shared = [f for f, _ in step.consumed if f in rule.consequent]
            if not any(rule.consequent[f] != dict(step.consumed)[f] for f in shared):
                raise Inconsistent("remedial step recommends the status quo")
            # The recommendation opens a hypothetical world: later steps (and
            # the conclusion) read from the advised bindings only.
            available = FactSet()
            for feat, value in produced.items():
                available.bind(feat, value, given=False)
            continue
        if isinstance(rule, CategoricalRule):
            fired = _fire_categorical(rule, available, step.direction)
        else:
            fired = _fire_quantitative(kb, frame, rule, available)
        if fired is None or set(fired) != set(produced) \
                or not all(values_equal(fired[f], produced[f]) for f in fired):
            raise Inconsistent(
                f"step {step.frame!r}[{step.rule_index}] no longer fires the same way")
        for feat, value in fired.items():
            available.bind(feat, value, given=False)
    for feat, value in derivation.conclusion.items():
        if feat not in available or not values_equal(available.value(feat), value):
            raise Inconsistent(f"conclusion {feat}={value!r} not reproduced")
    return dict(derivation.conclusion)
