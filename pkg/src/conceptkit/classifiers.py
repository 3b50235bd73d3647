"""Per-feature histogram classifiers.

Every feature in the knowledge base is bound to exactly one classifier.
Unsupervised classifiers keep a single count histogram over the feature's
domain; supervised classifiers keep one histogram per class of the concept
they are attached to and can turn observed values into class posteriors.

Posteriors use Laplace-smoothed relative frequencies weighted by class
priors, and independent per-feature posteriors combine by a log-space
product. Entropy of the count histograms drives drift detection, and a
posterior spread below a novelty threshold proposes a new class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping, Optional, Sequence, Union

from .errors import (
    ClassSetMismatch,
    MissingBounds,
    MissingLabel,
    ModeError,
    NoEvidence,
    NotOrdinal,
    Unbound,
    UnknownValue,
)
from .facts import FactSet
from .model import FeatureDef

DEFAULT_NUMERIC_BINS = 16
DEFAULT_SMOOTHING = 1.0
DEFAULT_DRIFT_THRESHOLD = 0.25  # bits
DEFAULT_NOVELTY_THRESHOLD = 0.5

Mode = Literal["unsupervised", "supervised"]


@dataclass
class Posterior:
    """Class probabilities for one observation. `uniform_fallback` marks a
    posterior produced without any evidence; combine() treats those as
    identity factors (numerically they already are)."""
    probs: dict[str, float]
    uniform_fallback: bool = False

    def top(self) -> tuple[str, float]:
        name = max(self.probs, key=lambda c: (self.probs[c], c))
        return name, self.probs[name]


@dataclass
class NewClassProposal:
    """Emitted when no existing class explains an observation well."""
    max_class: str
    max_prob: float
    threshold: float


class HistogramClassifier:
    """Count histogram(s) over one feature's domain.

    The bin axis mirrors the feature's current domain: categorical and
    ordinal features use their labels, numeric features use `num_bins`
    equal-width bins over the declared bounds.
    """

    def __init__(self, feature: FeatureDef, mode: Mode = "unsupervised",
                 concept: Optional[str] = None,
                 classes: Iterable[str] = (),
                 alpha: float = DEFAULT_SMOOTHING,
                 num_bins: int = DEFAULT_NUMERIC_BINS):
        if mode == "supervised" and concept is None:
            raise ModeError("supervised classifier needs the concept it discriminates")
        self.feature = feature
        self.mode: Mode = mode
        self.concept = concept
        self.alpha = alpha
        self.num_bins = num_bins
        self.class_counts: dict[str, list[int]] = {}
        self._counts: list[int] = [0] * self.bin_count()
        if mode == "supervised":
            for name in classes:
                self.add_class(name)

    # -- bins ---------------------------------------------------------------

    def bin_count(self) -> int:
        if self.feature.kind == "numeric":
            return self.num_bins
        return len(self.feature.values)

    def bin_labels(self) -> list[str]:
        if self.feature.kind != "numeric":
            return list(self.feature.values)
        if self.feature.bounds is None:
            return [f"bin{i}" for i in range(self.num_bins)]
        lo, hi = self.feature.bounds
        width = (hi - lo) / self.num_bins
        return [f"[{lo + i * width:g},{lo + (i + 1) * width:g})"
                for i in range(self.num_bins)]

    def bin_index(self, value: object) -> int:
        if self.feature.kind == "numeric":
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise UnknownValue(f"{self.feature.name!r} takes numbers, got {value!r}")
            if self.feature.bounds is None:
                raise MissingBounds(
                    f"numeric feature {self.feature.name!r} has no bounds to bin over")
            lo, hi = self.feature.bounds
            if value <= lo:
                return 0
            if value >= hi:
                return self.num_bins - 1
            return int((value - lo) / (hi - lo) * self.num_bins)
        try:
            return self.feature.values.index(value)
        except ValueError:
            raise UnknownValue(
                f"{value!r} is not in the domain of {self.feature.name!r}") from None

    def grow_bin(self) -> None:
        """Called after the feature's domain gained a label; new bin counts 0."""
        self._counts.append(0)
        for counts in self.class_counts.values():
            counts.append(0)

    # -- class bookkeeping (supervised) --------------------------------------

    def add_class(self, name: str) -> None:
        if self.mode != "supervised":
            raise ModeError(f"classifier for {self.feature.name!r} is unsupervised")
        self.class_counts.setdefault(name, [0] * self.bin_count())

    def remove_class(self, name: str) -> None:
        self.class_counts.pop(name, None)

    def classes(self) -> list[str]:
        return list(self.class_counts)

    # -- counts ---------------------------------------------------------------

    def observe(self, value: object, cls: Optional[str] = None) -> None:
        index = self.bin_index(value)
        if self.mode == "supervised":
            if cls is None:
                raise MissingLabel(
                    f"supervised classifier for {self.feature.name!r} needs a class label")
            if cls not in self.class_counts:
                raise UnknownValue(
                    f"{cls!r} is not a class of concept {self.concept!r}")
            self.class_counts[cls][index] += 1
        else:
            if cls is not None:
                raise ModeError("unsupervised classifier takes no class label")
            self._counts[index] += 1

    def counts_for(self, cls: Optional[str] = None) -> list[int]:
        if self.mode == "supervised":
            if cls is None:
                raise MissingLabel("which class?")
            return list(self.class_counts[cls])
        return list(self._counts)

    def pooled_counts(self) -> list[int]:
        """Counts summed over classes (the lifetime distribution)."""
        if self.mode != "supervised":
            return list(self._counts)
        pooled = [0] * self.bin_count()
        for counts in self.class_counts.values():
            for i, c in enumerate(counts):
                pooled[i] += c
        return pooled

    def total(self, cls: Optional[str] = None) -> int:
        if cls is not None:
            return sum(self.class_counts[cls])
        return sum(self.pooled_counts())

    # -- classification --------------------------------------------------------

    def classify(self, value: object,
                 supports: Optional[Mapping[str, int]] = None) -> Posterior:
        """Posterior over classes for one observed value.

        score(c) = (count(c, value) + alpha) / (total(c) + alpha * bins)
                   * prior(c), with prior(c) = support(c) / sum(supports).
        Supports default to the per-class observation totals of this
        classifier; pass the concept's instance supports to override.
        With no evidence at all the posterior is uniform and flagged.
        """
        if self.mode != "supervised":
            raise ModeError(f"classifier for {self.feature.name!r} is unsupervised")
        if not self.class_counts:
            raise ModeError(
                f"classifier for {self.feature.name!r} has no classes to discriminate")
        index = self.bin_index(value)
        names = list(self.class_counts)
        if supports is None:
            supports = {c: sum(self.class_counts[c]) for c in names}
        support_sum = sum(supports.get(c, 0) for c in names)
        if support_sum == 0:
            share = 1.0 / len(names)
            return Posterior({c: share for c in names}, uniform_fallback=True)
        bins = self.bin_count()
        scores = {}
        for c in names:
            total = sum(self.class_counts[c])
            likelihood = (self.class_counts[c][index] + self.alpha) / (total + self.alpha * bins)
            scores[c] = likelihood * (supports.get(c, 0) / support_sum)
        norm = sum(scores.values())
        return Posterior({c: s / norm for c, s in scores.items()})

    # -- information ------------------------------------------------------------

    def entropy(self) -> float:
        return entropy(self.pooled_counts())

    def window_counts(self, window: Sequence[object]) -> list[int]:
        counts = [0] * self.bin_count()
        for value in window:
            counts[self.bin_index(value)] += 1
        return counts


# -- module-level operations -------------------------------------------------

def observe(classifier: HistogramClassifier, value: object,
            cls: Optional[str] = None) -> None:
    classifier.observe(value, cls)


def classify(classifier: HistogramClassifier, value: object,
             supports: Optional[Mapping[str, int]] = None) -> Posterior:
    return classifier.classify(value, supports)


def combine(posteriors: Sequence[Posterior]) -> Posterior:
    """Product-of-experts combination: combined(c) ~ exp(sum log p_i(c)).

    Features whose values are unknown are simply not in the list, and a
    uniform factor drops out of the product, so missing evidence never
    skews the result. All posteriors must share one class set.
    """
    if not posteriors:
        raise NoEvidence("no posteriors to combine")
    names = sorted(posteriors[0].probs)
    for p in posteriors[1:]:
        if sorted(p.probs) != names:
            raise ClassSetMismatch(
                f"class sets differ: {names} vs {sorted(p.probs)}")
    log_scores = {c: 0.0 for c in names}
    for p in posteriors:
        for c in names:
            value = p.probs[c]
            log_scores[c] = -math.inf if value <= 0.0 else log_scores[c] + math.log(value)
    peak = max(log_scores.values())
    if peak == -math.inf:
        share = 1.0 / len(names)
        return Posterior({c: share for c in names}, uniform_fallback=True)
    scores = {c: math.exp(s - peak) for c, s in log_scores.items()}
    norm = sum(scores.values())
    fallback = all(p.uniform_fallback for p in posteriors)
    return Posterior({c: s / norm for c, s in scores.items()}, uniform_fallback=fallback)


def entropy(source: Union[HistogramClassifier, Mapping[str, int], Sequence[int]]) -> float:
    """Shannon entropy of a count histogram, in bits. Empty histograms
    have entropy 0 by convention."""
    if isinstance(source, HistogramClassifier):
        counts = source.pooled_counts()
    elif isinstance(source, Mapping):
        counts = list(source.values())
    else:
        counts = list(source)
    total = sum(counts)
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def drift_detect(classifier: HistogramClassifier, window: Sequence[object],
                 threshold: float = DEFAULT_DRIFT_THRESHOLD) -> bool:
    """True when the recent window's entropy differs from the lifetime
    distribution's by more than `threshold` bits."""
    if not window:
        raise NoEvidence("drift detection needs a nonempty window")
    window_h = entropy(classifier.window_counts(window))
    return abs(window_h - classifier.entropy()) > threshold


def propose_new_class(posterior: Posterior,
                      threshold: float = DEFAULT_NOVELTY_THRESHOLD) -> Optional[NewClassProposal]:
    """Propose creating a class when no existing one is convincing
    (max posterior below the novelty threshold)."""
    if not posterior.probs:
        return None
    name, prob = posterior.top()
    if prob < threshold:
        return NewClassProposal(max_class=name, max_prob=prob, threshold=threshold)
    return None


def suppress_low_support(kb, concept: str, min_support: int) -> list[str]:
    """Remove every class of `concept` whose support is below `min_support`.

    Goes through the knowledge base's suppress operation so the supervised
    histograms shrink along with the class set. Returns suppressed names.
    """
    target = kb.concept(concept)
    doomed = [name for name, cls in target.classes.items() if cls.support < min_support]
    for name in doomed:
        kb.suppress_class(concept, name)
    return doomed


Ordering = Literal["less", "equal", "greater"]


def compare_ordinal(feature: FeatureDef, a: FactSet, b: FactSet) -> Ordering:
    """Compare two fact sets on an ordinal feature; order is the domain
    list position (later = greater)."""
    if feature.kind != "ordinal":
        raise NotOrdinal(f"{feature.name!r} is {feature.kind}, not ordinal")
    for facts, side in ((a, "first"), (b, "second")):
        if feature.name not in facts:
            raise Unbound(f"{side} fact set does not bind {feature.name!r}")
        if not feature.accepts(facts.value(feature.name)):
            raise UnknownValue(
                f"{facts.value(feature.name)!r} not in domain of {feature.name!r}")
    ra = feature.rank(a.value(feature.name))
    rb = feature.rank(b.value(feature.name))
    if ra < rb:
        return "less"
    if ra > rb:
        return "greater"
    return "equal"
