"""Knowledge base container and every schema mutation.

The base owns four spaces -- concepts, features, classifiers, frames --
plus the three dictionaries (unique descriptors, concept names, feature
definitions) that index them. Mutations are serialized through one writer
lock, validate all preconditions before touching anything (a rejected
operation leaves the base bit-identical), and bump a monotone revision
counter exactly once when they commit.

The classifier space mirrors the feature space at all times: creating a
feature creates and binds a fresh classifier, suppressing the feature
removes it, and domain growth widens its histogram axis.
"""

from __future__ import annotations

import threading
from copy import deepcopy
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from . import expressions as xp
from .classifiers import HistogramClassifier
from .errors import (
    ConceptKitError,
    DuplicateClass,
    DuplicateConcept,
    DuplicateFeature,
    DuplicateFrame,
    DuplicateValue,
    InUse,
    ReciprocityConflict,
    SeedError,
    SubconceptCycle,
    UnknownConcept,
    UnknownFeature,
    UnknownFrame,
    UnknownReference,
)
from .model import (
    CategoricalRule,
    ClassRef,
    Concept,
    ConceptClass,
    ConceptRef,
    ElementRef,
    FeatureDef,
    FeatureRef,
    Frame,
    QuantitativeRule,
    Rule,
    check_rule_against_frame,
    reciprocity_conflict,
)


@dataclass
class Dictionaries:
    """The three lookup tables a trainer's words resolve through."""
    u_concepts: dict[str, str] = field(default_factory=dict)   # descriptor -> feature
    concepts: dict[str, str] = field(default_factory=dict)     # name -> concept id
    features: dict[str, list[str]] = field(default_factory=dict)  # feature -> values


@dataclass
class Violation:
    element: str
    invariant: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.element}: {self.invariant}"
        return f"{text} ({self.detail})" if self.detail else text


class KnowledgeBase:
    """Mutable store of concepts, features, classifiers, and frames."""

    def __init__(self, constants: Optional[dict[str, float]] = None):
        self.concepts: dict[str, Concept] = {}
        self.features: dict[str, FeatureDef] = {}
        self.classifiers: dict[str, HistogramClassifier] = {}
        self.frames: dict[str, Frame] = {}
        self.dictionaries = Dictionaries()
        self.constants: dict[str, float] = dict(xp.CONSTANTS if constants is None else constants)
        self.revision = 0
        self._lock = threading.RLock()

    # -- lookups --------------------------------------------------------------

    def concept(self, name: str) -> Concept:
        try:
            return self.concepts[name]
        except KeyError:
            raise UnknownConcept(f"no concept named {name!r}") from None

    def feature(self, name: str) -> FeatureDef:
        try:
            return self.features[name]
        except KeyError:
            raise UnknownFeature(f"no feature named {name!r}") from None

    def classifier(self, feature: str) -> HistogramClassifier:
        try:
            return self.classifiers[feature]
        except KeyError:
            raise UnknownFeature(f"no classifier bound to {feature!r}") from None

    def frame(self, name: str) -> Frame:
        try:
            return self.frames[name]
        except KeyError:
            raise UnknownFrame(f"no frame named {name!r}") from None

    def concept_count(self) -> int:
        return len(self.concepts)

    def feature_count(self) -> int:
        return len(self.features)

    def classifier_count(self) -> int:
        return len(self.classifiers)

    def class_count(self, concept: str) -> int:
        return len(self.concept(concept).classes)

    def snapshot(self) -> "KnowledgeBase":
        """Deep copy taken at a revision boundary; safe to read concurrently."""
        with self._lock:
            return deepcopy(self)

    def __deepcopy__(self, memo):
        clone = KnowledgeBase.__new__(KnowledgeBase)
        memo[id(self)] = clone
        for key, value in self.__dict__.items():
            if key == "_lock":
                clone._lock = threading.RLock()
            else:
                setattr(clone, key, deepcopy(value, memo))
        return clone

    def _bump(self) -> None:
        self.revision += 1

    # -- mutations --------------------------------------------------------------

    def add_concept(self, name: str) -> Concept:
        with self._lock:
            if name in self.concepts:
                raise DuplicateConcept(f"concept {name!r} already exists")
            concept = Concept(name=name)
            self.concepts[name] = concept
            self.dictionaries.concepts[name] = name
            self._bump()
            return concept

    def add_class(self, concept: str, name: str) -> ClassRef:
        with self._lock:
            owner = self.concept(concept)
            if name in owner.classes:
                raise DuplicateClass(f"class {name!r} already exists in {concept!r}")
            owner.classes[name] = ConceptClass(name=name)
            for clf in self.classifiers.values():
                if clf.mode == "supervised" and clf.concept == concept:
                    clf.add_class(name)
            self._bump()
            return ClassRef(concept, name)

    def add_feature(self, defn: FeatureDef, owner: Optional[str] = None) -> FeatureDef:
        """Create a feature plus its bound classifier, in one step.

        `owner` names a concept: the feature is attached to it and its
        classifier runs supervised over that concept's classes. Without an
        owner the feature is global and the classifier unsupervised.
        """
        with self._lock:
            if defn.name in self.features:
                raise DuplicateFeature(f"feature {defn.name!r} already exists")
            owner_concept = self.concept(owner) if owner is not None else None
            if owner_concept is None:
                clf = HistogramClassifier(defn)
            else:
                clf = HistogramClassifier(defn, mode="supervised", concept=owner,
                                          classes=owner_concept.class_names())
            self.features[defn.name] = defn
            self.classifiers[defn.name] = clf
            if owner_concept is not None:
                owner_concept.features.append(defn.name)
            self.dictionaries.u_concepts[defn.name] = defn.name
            self.dictionaries.features[defn.name] = list(defn.values)
            self._bump()
            return defn

    def extend_feature_domain(self, feature: str, value: str) -> FeatureDef:
        with self._lock:
            defn = self.feature(feature)
            if defn.kind == "numeric":
                raise ConceptKitError(f"numeric feature {feature!r} has no label domain to extend")
            if value in defn.values:
                raise DuplicateValue(f"{value!r} already in domain of {feature!r}")
            defn.values.append(value)
            self.dictionaries.features[feature].append(value)
            self.classifier(feature).grow_bin()
            self._bump()
            return defn

    def add_frame(self, name: str, source: str, target: str,
                  inputs: Iterable[str], outputs: Iterable[str],
                  externals: Iterable[str] = ()) -> Frame:
        with self._lock:
            if name in self.frames:
                raise DuplicateFrame(f"frame {name!r} already exists")
            for endpoint in (source, target):
                if endpoint not in self.concepts:
                    raise UnknownReference(f"frame endpoint {endpoint!r} is not a concept")
            frame = Frame(name=name, source=source, target=target,
                          inputs=list(inputs), outputs=list(outputs),
                          externals=list(externals))
            for feat in frame.declared_features():
                if feat not in self.features:
                    raise UnknownReference(f"frame {name!r} declares unknown feature {feat!r}")
            self.frames[name] = frame
            self._bump()
            return frame

    def add_rule(self, frame: str, rule: Rule) -> None:
        with self._lock:
            owner = self.frame(frame)
            check_rule_against_frame(rule, owner, self.constants)
            if isinstance(rule, CategoricalRule):
                for feat, value in {**rule.antecedent, **rule.consequent}.items():
                    defn = self.feature(feat)
                    if not defn.accepts(value):
                        raise UnknownReference(
                            f"{value!r} is not in the domain of {feat!r}")
            else:
                touched = {rule.target, *xp.variables(rule.formula)}
                for guard in rule.nonzero_guards():
                    touched |= xp.variables(guard.expr)
                for name in sorted(touched):
                    if name in self.features and self.features[name].kind != "numeric":
                        raise UnknownReference(
                            f"formula feature {name!r} is {self.features[name].kind}, "
                            f"not numeric")
            conflict = reciprocity_conflict([*owner.rules, rule])
            if conflict is not None:
                raise ReciprocityConflict(f"frame {frame!r}: {conflict}")
            owner.rules.append(rule)
            self._bump()

    def add_subconcept_link(self, parent: str, child: str) -> None:
        """Record that `child` composes `parent` (e.g. Glasses -> Material).
        Distinct from frames: no verb, no rules, no causality."""
        with self._lock:
            parent_concept = self.concept(parent)
            self.concept(child)
            if child in parent_concept.subconcepts:
                return
            if self._reaches(child, parent):
                raise SubconceptCycle(f"{parent!r} -> {child!r} would close a cycle")
            parent_concept.subconcepts.append(child)
            self._bump()

    def _reaches(self, start: str, needle: str) -> bool:
        stack, seen = [start], set()
        while stack:
            current = stack.pop()
            if current == needle:
                return True
            if current in seen:
                continue
            seen.add(current)
            node = self.concepts.get(current)
            if node is not None:
                stack.extend(node.subconcepts)
        return False

    def observe(self, feature: str, value: object, cls: Optional[str] = None) -> None:
        """Feed one observed value into the feature's classifier; in
        supervised mode the labelled class gains one support."""
        with self._lock:
            clf = self.classifier(feature)
            clf.observe(value, cls)
            if clf.mode == "supervised" and cls is not None:
                self.concept(clf.concept).classes[cls].support += 1
            self._bump()

    def set_constant(self, name: str, value: float) -> None:
        with self._lock:
            self.constants[name] = float(value)
            self._bump()

    # -- suppression ------------------------------------------------------------

    def suppress(self, element: ElementRef, cascade: bool = False) -> None:
        if isinstance(element, ClassRef):
            self.suppress_class(element.concept, element.name)
        elif isinstance(element, FeatureRef):
            self.suppress_feature(element.name, cascade=cascade)
        elif isinstance(element, ConceptRef):
            self.suppress_concept(element.name, cascade=cascade)
        else:
            raise UnknownReference(f"cannot suppress {element!r}")

    def suppress_class(self, concept: str, name: str) -> None:
        with self._lock:
            owner = self.concept(concept)
            if name not in owner.classes:
                raise UnknownReference(f"no class {name!r} in concept {concept!r}")
            del owner.classes[name]
            for clf in self.classifiers.values():
                if clf.mode == "supervised" and clf.concept == concept:
                    clf.remove_class(name)
            self._bump()

    def _rules_referencing(self, feature: str) -> list[tuple[str, Rule]]:
        hits = []
        for frame in self.frames.values():
            for rule in frame.rules:
                if isinstance(rule, CategoricalRule):
                    touched = set(rule.antecedent) | set(rule.consequent)
                else:
                    touched = {rule.target, *rule.given_features()}
                    touched |= xp.variables(rule.formula)
                    for g in rule.nonzero_guards():
                        touched |= xp.variables(g.expr)
                if feature in touched:
                    hits.append((frame.name, rule))
        return hits

    def suppress_feature(self, name: str, cascade: bool = False) -> None:
        with self._lock:
            self.feature(name)
            dependents = self._rules_referencing(name)
            if dependents and not cascade:
                frames = sorted({f for f, _ in dependents})
                raise InUse(f"feature {name!r} is referenced by rules of {frames}")
            self._drop_feature(name)
            self._bump()

    def _drop_feature(self, name: str) -> None:
        for frame in self.frames.values():
            kept = []
            for rule in frame.rules:
                if isinstance(rule, CategoricalRule):
                    touched = set(rule.antecedent) | set(rule.consequent)
                else:
                    touched = {rule.target, *rule.given_features()}
                    touched |= xp.variables(rule.formula)
                    for g in rule.nonzero_guards():
                        touched |= xp.variables(g.expr)
                if name not in touched:
                    kept.append(rule)
            frame.rules = kept
            frame.inputs = [f for f in frame.inputs if f != name]
            frame.outputs = [f for f in frame.outputs if f != name]
            frame.externals = [f for f in frame.externals if f != name]
        for concept in self.concepts.values():
            concept.features = [f for f in concept.features if f != name]
        del self.features[name]
        del self.classifiers[name]
        self.dictionaries.u_concepts.pop(name, None)
        self.dictionaries.features.pop(name, None)

    def suppress_concept(self, name: str, cascade: bool = False) -> None:
        with self._lock:
            doomed = self.concept(name)
            touching_frames = [f.name for f in self.frames.values()
                               if name in (f.source, f.target)]
            linked = [c.name for c in self.concepts.values() if name in c.subconcepts]
            attached = [clf.feature.name for clf in self.classifiers.values()
                        if clf.concept == name]
            if (touching_frames or linked or doomed.subconcepts or attached) and not cascade:
                raise InUse(
                    f"concept {name!r} still has frames {sorted(touching_frames)}, "
                    f"links, or attached features {sorted(attached)}")
            for frame_name in touching_frames:
                del self.frames[frame_name]
            for other in self.concepts.values():
                other.subconcepts = [c for c in other.subconcepts if c != name]
            for feat in attached:
                self._drop_feature(feat)
            del self.concepts[name]
            self.dictionaries.concepts.pop(name, None)
            self._bump()

    # -- validation ------------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Check every structural invariant; violations are data, not errors."""
        out: list[Violation] = []
        feature_names = set(self.features)
        classifier_names = set(self.classifiers)
        for name in sorted(feature_names - classifier_names):
            out.append(Violation(name, "classifier/feature bijection",
                                 "feature has no classifier"))
        for name in sorted(classifier_names - feature_names):
            out.append(Violation(name, "classifier/feature bijection",
                                 "classifier bound to no feature"))
        for name, defn in self.features.items():
            if defn.kind != "numeric" and len(set(defn.values)) != len(defn.values):
                out.append(Violation(name, "domain labels unique"))
            clf = self.classifiers.get(name)
            if clf is None:
                continue
            if clf.feature is not defn:
                out.append(Violation(name, "classifier bound to its feature"))
            expected = clf.bin_count()
            if clf.mode == "supervised":
                owner = self.concepts.get(clf.concept or "")
                if owner is None:
                    out.append(Violation(name, "classifier concept resolves",
                                         f"concept {clf.concept!r} missing"))
                elif set(clf.class_counts) != set(owner.classes):
                    out.append(Violation(name, "supervised histograms track class set"))
                histograms = clf.class_counts.values()
            else:
                histograms = [clf.counts_for()]
            for counts in histograms:
                if len(counts) != expected:
                    out.append(Violation(name, "histogram axis matches domain"))
                if any(c < 0 for c in counts):
                    out.append(Violation(name, "counts nonnegative"))
        for cname, concept in self.concepts.items():
            for cls in concept.classes.values():
                if cls.support < 0:
                    out.append(Violation(f"{cname}::{cls.name}", "support nonnegative"))
            for feat in concept.features:
                if feat not in self.features:
                    out.append(Violation(cname, "concept feature refs resolve",
                                         f"unknown feature {feat!r}"))
            for sub in concept.subconcepts:
                if sub not in self.concepts:
                    out.append(Violation(cname, "subconcept links resolve",
                                         f"unknown concept {sub!r}"))
        out.extend(self._validate_subconcept_acyclicity())
        for fname, frame in self.frames.items():
            for endpoint in (frame.source, frame.target):
                if endpoint not in self.concepts:
                    out.append(Violation(fname, "frame endpoints exist",
                                         f"unknown concept {endpoint!r}"))
            for feat in frame.declared_features():
                if feat not in self.features:
                    out.append(Violation(fname, "frame features exist",
                                         f"unknown feature {feat!r}"))
            for rule in frame.rules:
                try:
                    check_rule_against_frame(rule, frame, self.constants)
                except ConceptKitError as exc:
                    out.append(Violation(fname, "rules stay inside their frame", str(exc)))
            conflict = reciprocity_conflict(frame.rules)
            if conflict is not None:
                out.append(Violation(fname, "reciprocal rules functional both ways", conflict))
        for word, target in self.dictionaries.concepts.items():
            if target not in self.concepts:
                out.append(Violation(word, "concept dictionary resolves"))
        for word, target in self.dictionaries.u_concepts.items():
            if target not in self.features:
                out.append(Violation(word, "u-concept dictionary resolves"))
        for word, values in self.dictionaries.features.items():
            defn = self.features.get(word)
            if defn is None:
                out.append(Violation(word, "feature dictionary resolves"))
            elif defn.kind != "numeric" and values != defn.values:
                out.append(Violation(word, "feature dictionary matches domain"))
        return out

    def _validate_subconcept_acyclicity(self) -> list[Violation]:
        state: dict[str, int] = {}

        def visit(name: str) -> bool:
            if state.get(name) == 1:
                return True
            if state.get(name) == 2:
                return False
            state[name] = 1
            node = self.concepts.get(name)
            cyclic = any(visit(sub) for sub in node.subconcepts) if node else False
            state[name] = 2
            return cyclic

        for name in sorted(self.concepts):
            if state.get(name) is None and visit(name):
                return [Violation(name, "subconcept links acyclic")]
        return []


def new_kb(seed: Union[None, str, dict] = None) -> KnowledgeBase:
    """Create a knowledge base, optionally from a seed fragment.

    The seed is a (possibly partial) persisted document -- a dict, a JSON
    string, or a path to a JSON file. Anything malformed or dangling is a
    SeedError. A seeded base still starts at revision 0.
    """
    if seed is None:
        return KnowledgeBase()
    from . import persist  # local import: persist depends on this module

    try:
        doc = persist.coerce_document(seed)
        kb = persist.build_kb(doc, fragment=True)
    except ConceptKitError as exc:
        raise SeedError(f"bad seed: {exc}") from exc
    except (KeyError, TypeError, ValueError, OSError) as exc:
        raise SeedError(f"bad seed: {exc}") from exc
    violations = kb.validate()
    if violations:
        raise SeedError("; ".join(str(v) for v in violations))
    kb.revision = 0
    return kb
