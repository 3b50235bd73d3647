"""Exception hierarchy for conceptkit.

Every domain failure derives from ConceptKitError so callers (CLI, HTTP
service) can map the whole family to exit codes / status codes in one place.
Rejected operations never leave partial state behind: all preconditions are
checked before anything is mutated.
"""


class ConceptKitError(Exception):
    """Base class for all domain errors."""


# -- knowledge base schema -------------------------------------------------

class SeedError(ConceptKitError):
    """Seed document is malformed or references undeclared elements."""


class DuplicateConcept(ConceptKitError):
    pass


class DuplicateClass(ConceptKitError):
    pass


class DuplicateFeature(ConceptKitError):
    pass


class DuplicateValue(ConceptKitError):
    pass


class DuplicateFrame(ConceptKitError):
    pass


class UnknownConcept(ConceptKitError):
    pass


class UnknownFeature(ConceptKitError):
    pass


class UnknownFrame(ConceptKitError):
    pass


class UnknownReference(ConceptKitError):
    """A frame or rule names a concept/feature that does not exist."""


class ReciprocityConflict(ConceptKitError):
    """Two bidirectional rules in one frame map the same antecedent to
    different consequents, or the same consequent to different antecedents."""


class SubconceptCycle(ConceptKitError):
    """Adding the composition link would make the subconcept graph cyclic."""


class InUse(ConceptKitError):
    """Element still referenced by rules/frames and cascade was not requested."""


class UnguardedDivision(ConceptKitError):
    """A formula divides by an expression no guard protects."""


# -- evaluation ------------------------------------------------------------

class MissingExternal(ConceptKitError):
    """A rule needs side information (e.g. a temperature) that was not given."""


class GuardError(ConceptKitError):
    """A nonzero guard failed, or a division hit a zero divisor."""


class Inconsistent(ConceptKitError):
    """Two fired rules (or a rule and a given fact) bind one feature to
    different values."""


class NonInvertible(ConceptKitError):
    """Backward evaluation matched only one-sided rules."""


class Unbound(ConceptKitError):
    """An expression variable has no value."""


class UnknownValue(ConceptKitError):
    """A fact or observation lies outside the feature's domain."""


class NoCause(ConceptKitError):
    """The observed feature is not produced by any frame."""


class NotOrdinal(ConceptKitError):
    pass


# -- classifiers -----------------------------------------------------------

class ModeError(ConceptKitError):
    """Operation requires the other classifier mode (supervised/unsupervised)."""


class MissingLabel(ConceptKitError):
    """Supervised observation without a class label."""


class MissingBounds(ConceptKitError):
    """Numeric feature has no declared bounds, so values cannot be binned."""


class NoEvidence(ConceptKitError):
    """combine() was called with no posteriors."""


class ClassSetMismatch(ConceptKitError):
    """combine() was given posteriors over different class sets."""


# -- teaching / io ---------------------------------------------------------

class ParseError(ConceptKitError):
    """Teaching-DSL syntax error with position and expectation info."""

    def __init__(self, message: str, line: int = 1, column: int = 1,
                 expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.line = line
        self.column = column
        self.expected = expected

    def __str__(self) -> str:
        base = super().__str__()
        loc = f" (line {self.line}, column {self.column})"
        if self.expected:
            return f"{base}{loc}; expected one of: {', '.join(self.expected)}"
        return base + loc


class ProtocolError(ConceptKitError):
    """Session protocol violation (e.g. a confirmation with nothing pending)."""


class ScriptError(ConceptKitError):
    """A teaching script failed; carries the 1-based line number."""

    def __init__(self, line: int, cause: Exception):
        super().__init__(f"line {line}: {cause}")
        self.line = line
        self.cause = cause


class FormatError(ConceptKitError):
    """Persisted document cannot be decoded; carries a path to the element."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(message)
        self.path = path

    def __str__(self) -> str:
        return f"{super().__str__()} (at {self.path})"


class InvalidDocument(FormatError):
    """Document decoded but its knowledge base breaks invariants; the load
    is refused and the violations are attached."""

    def __init__(self, violations):
        super().__init__("document violates invariants: "
                         + "; ".join(str(v) for v in violations))
        self.violations = list(violations)


class IoError(ConceptKitError):
    """Filesystem or network-level failure."""
