"""Trainer sessions: the dialogue loop that grows the knowledge base.

The word-class mapping drives every mutation: an unknown noun becomes a
class of the current concept (after the machine asks and the trainer
confirms) or a fresh concept (trainer answers no, or names it with
`under`); a verb becomes a frame; an adjective becomes a feature plus its
bound classifier; facts are routed to classifiers and the session's fact
set; ask runs the inference engine.

Sessions keep a current-concept register (the most recently mentioned
concept), at most one pending question, and a transcript in which every
knowledge-base revision is attributable to exactly one trainer line.
Replaying the same script over the same seed is deterministic down to the
serialized bytes.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional, Union

from . import engine, persist
from .dsl import (
    Ask,
    Command,
    Confirm,
    DeclareAdjective,
    DeclareNoun,
    DeclareRule,
    DeclareVerb,
    StateFact,
    parse_statement,
)
from .errors import (
    ConceptKitError,
    ParseError,
    ProtocolError,
    ScriptError,
    UnknownValue,
)
from .facts import FactSet
from .kb import KnowledgeBase
from .model import FeatureDef

UtteranceKind = Literal["clarification", "acknowledgment", "question_back", "answer"]


@dataclass
class MachineUtterance:
    kind: UtteranceKind
    text: str
    payload: dict = field(default_factory=dict)


@dataclass
class PendingQuestion:
    """A clarification waiting for yes/no; carries the proposed mutation."""
    kind: Literal["noun_class", "noun_concept"]
    name: str
    concept: Optional[str] = None

    def proposal(self) -> dict:
        if self.kind == "noun_class":
            return {"action": "add_class", "concept": self.concept, "name": self.name}
        return {"action": "add_concept", "name": self.name}


@dataclass
class TranscriptEntry:
    speaker: Literal["trainer", "machine"]
    text: str
    revision: int


class Session:
    """One trainer's live dialogue over a knowledge base."""

    def __init__(self, kb: KnowledgeBase, session_id: Optional[str] = None,
                 current_concept: Optional[str] = None):
        self.id = session_id or uuid.uuid4().hex[:12]
        self.kb = kb
        self.current_concept = current_concept
        self.pending: Optional[PendingQuestion] = None
        self.facts = FactSet()
        self.transcript: list[TranscriptEntry] = []

    def submit(self, text: str) -> MachineUtterance:
        """Strict step: parse errors and domain errors raise; used by the
        HTTP service and by script replay."""
        command = parse_statement(text)
        reply = apply_command(self, command)
        self._record(text, reply)
        return reply

    def _record(self, trainer_text: str, reply: MachineUtterance) -> None:
        revision = self.kb.revision
        self.transcript.append(TranscriptEntry("trainer", trainer_text, revision))
        self.transcript.append(TranscriptEntry("machine", reply.text, revision))


def apply_command(session: Session, command: Command) -> MachineUtterance:
    """Apply one parsed command to the session's knowledge base."""
    kb = session.kb

    if session.pending is not None and not isinstance(command, Confirm):
        question = _pending_text(session.pending)
        return MachineUtterance(
            "clarification",
            f"Please answer the open question first: {question}",
            {"proposal": session.pending.proposal()})

    if isinstance(command, Confirm):
        return _resolve_pending(session, command.answer)

    if isinstance(command, DeclareNoun):
        return _declare_noun(session, command)

    if isinstance(command, DeclareVerb):
        kb.add_frame(command.name, command.source, command.target,
                     inputs=command.inputs, outputs=command.outputs,
                     externals=command.externals)
        session.current_concept = command.target
        return MachineUtterance(
            "acknowledgment",
            f'New frame "{command.name}" from "{command.source}" to "{command.target}".')

    if isinstance(command, DeclareAdjective):
        if command.name in kb.features:
            added = [v for v in command.values
                     if v not in kb.features[command.name].values]
            for value in added:
                kb.extend_feature_domain(command.name, value)
            if added:
                return MachineUtterance(
                    "acknowledgment",
                    f'Feature "{command.name}" extended with {", ".join(added)}.')
            return MachineUtterance(
                "acknowledgment", f'"{command.name}" exists: no operation.')
        kb.add_feature(FeatureDef(name=command.name, values=list(command.values)))
        return MachineUtterance(
            "acknowledgment",
            f'New feature "{command.name}": {", ".join(command.values)}.')

    if isinstance(command, DeclareRule):
        kb.add_rule(command.frame, command.rule)
        return MachineUtterance(
            "acknowledgment",
            f'Rule added to "{command.frame}": {command.rule.render()}')

    if isinstance(command, StateFact):
        defn = kb.feature(command.feature)
        if not defn.accepts(command.value):
            raise UnknownValue(
                f"{command.value!r} is not in the domain of {command.feature!r}")
        session.facts.bind(command.feature, command.value, given=True)
        clf = kb.classifier(command.feature)
        if clf.mode == "unsupervised":
            kb.observe(command.feature, command.value)
            note = "noted and learned"
        else:
            note = "noted"  # supervised counts need a class label
        return MachineUtterance(
            "acknowledgment", f"{command.feature} = {command.value}, {note}.")

    if isinstance(command, Ask):
        merged = session.facts.copy()
        for feature, value in command.given.items():
            merged.bind(feature, value, given=True)
        answer = engine.query(kb, merged, command.goal)
        payload = {"answer": engine_answer_to_obj(kb, answer)}
        if answer.status == "exact":
            via = " then ".join(answer.derivations[0].frames()) or "given facts"
            return MachineUtterance(
                "answer", f"{command.goal} = {answer.value} (via {via}).", payload)
        if answer.status == "approximate":
            options = ", ".join(sorted(str(c) for c in answer.candidates))
            hint = ", ".join(answer.missing)
            return MachineUtterance(
                "question_back",
                f"It depends ({options}). Can you tell me: {hint}?", payload)
        return MachineUtterance(
            "answer", f"I cannot deduce {command.goal} yet.", payload)

    raise ProtocolError(f"unsupported command {command!r}")


def _declare_noun(session: Session, command: DeclareNoun) -> MachineUtterance:
    kb = session.kb
    name = command.name
    if command.under is not None:
        kb.concept(command.under)  # must exist
        created = name not in kb.concepts
        if created:
            kb.add_concept(name)
        kb.add_subconcept_link(command.under, name)
        session.current_concept = name
        verb = "created under" if created else "linked under"
        return MachineUtterance(
            "acknowledgment", f'"{name}" {verb} "{command.under}".')
    if name in kb.concepts:
        session.current_concept = name
        return MachineUtterance("acknowledgment", f'"{name}" exists: no operation.')
    current = session.current_concept
    if current is not None and name in kb.concepts[current].classes:
        return MachineUtterance("acknowledgment", f'"{name}" exists: no operation.')
    if current is None:
        session.pending = PendingQuestion("noun_concept", name)
    else:
        session.pending = PendingQuestion("noun_class", name, concept=current)
    return MachineUtterance("clarification", _pending_text(session.pending),
                            {"proposal": session.pending.proposal()})


def _pending_text(pending: PendingQuestion) -> str:
    if pending.kind == "noun_class":
        return f'Your {pending.name}? New class of "{pending.concept}"? (yes/no)'
    return f'"{pending.name}"? New concept? (yes/no)'


def _resolve_pending(session: Session, answer: bool) -> MachineUtterance:
    pending = session.pending
    if pending is None:
        raise ProtocolError("nothing was asked; yes/no is out of place")
    session.pending = None
    kb = session.kb
    if pending.kind == "noun_class":
        if answer:
            ref = kb.add_class(pending.concept, pending.name)
            return MachineUtterance(
                "acknowledgment",
                f'New class "{pending.name}" of concept "{pending.concept}".',
                {"applied": {"action": "add_class", "ref": str(ref)}})
        kb.add_concept(pending.name)
        session.current_concept = pending.name
        return MachineUtterance(
            "acknowledgment", f'New concept: "{pending.name}".',
            {"applied": {"action": "add_concept", "name": pending.name}})
    if answer:
        kb.add_concept(pending.name)
        session.current_concept = pending.name
        return MachineUtterance(
            "acknowledgment", f'New concept: "{pending.name}".',
            {"applied": {"action": "add_concept", "name": pending.name}})
    return MachineUtterance("acknowledgment", f'"{pending.name}" dropped.')


def run_session_step(session: Session, text: str) -> MachineUtterance:
    """REPL-friendly step: blank lines acknowledge without mutating, and
    syntax errors come back as clarifications with the expected tokens."""
    stripped = text.strip()
    if not stripped or stripped.startswith("#"):
        return MachineUtterance("acknowledgment", "")
    try:
        return session.submit(stripped)
    except ParseError as exc:
        return MachineUtterance(
            "clarification",
            f"I did not understand that: {exc}",
            {"column": exc.column, "expected": list(exc.expected)})


@dataclass
class ReplayResult:
    kb: KnowledgeBase
    session: Session
    snapshots: list[tuple[str, dict]]


def replay_script(kb: KnowledgeBase, script: Union[str, Path],
                  current_concept: Optional[str] = None) -> ReplayResult:
    """Feed a script line by line; abort on the first failing line.

    `@snapshot <name>` records the graph view at that point. Comments
    (`#`) and blank lines are skipped.
    """
    if isinstance(script, Path) or (isinstance(script, str) and "\n" not in script
                                    and script.endswith(".col")):
        text = Path(script).read_text(encoding="utf-8")
    else:
        text = script
    session = Session(kb, current_concept=current_concept)
    snapshots: list[tuple[str, dict]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@snapshot"):
            name = line[len("@snapshot"):].strip() or f"line{lineno}"
            snapshots.append((name, persist.to_graph(kb)))
            continue
        try:
            session.submit(line)
        except ConceptKitError as exc:
            if isinstance(exc, ParseError):
                exc.line = lineno
            raise ScriptError(lineno, exc) from exc
    return ReplayResult(kb=kb, session=session, snapshots=snapshots)


def engine_answer_to_obj(kb: KnowledgeBase, answer: engine.Answer) -> dict:
    """JSON-friendly answer, with rules rendered for display."""
    def step_obj(step: engine.Step) -> dict:
        frame = kb.frames[step.frame]
        return {
            "frame": step.frame,
            "direction": step.direction,
            "kind": step.kind,
            "rule": frame.rules[step.rule_index].render(),
            "consumed": dict(step.consumed),
            "produced": dict(step.produced),
        }

    obj: dict = {"status": answer.status}
    if answer.status == "exact":
        obj["value"] = answer.value
        obj["derivation"] = [step_obj(s) for s in answer.derivations[0].steps]
    elif answer.status == "approximate":
        obj["candidates"] = sorted(str(c) for c in answer.candidates)
        obj["missing"] = list(answer.missing)
    else:
        obj["missing"] = list(answer.missing)
    return obj


# -- canonical case-study assets -------------------------------------------------

def case_study_seed() -> dict:
    """Starting point: the machine already knows two concepts."""
    return {"concepts": ["Humans", "Breakable"]}


def case_study_script() -> str:
    path = Path(__file__).parent / "data" / "case_study.col"
    return path.read_text(encoding="utf-8")
