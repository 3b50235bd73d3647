"""conceptkit: a teachable concept-graph knowledge base.

Concepts and their classes form a directed graph whose arcs (frames) carry
bidirectional categorical rules and guarded formulas. Each feature owns a
histogram classifier. A controlled teaching dialogue grows the base live;
queries chain rules across frames and justify every answer with a
derivation.
"""

from . import classifiers, engine, expressions, persist, samples, teaching
from .engine import Answer, Derivation, Step, eval_backward, eval_expression, eval_forward, explain_cause, query
from .errors import ConceptKitError
from .facts import FactSet
from .kb import KnowledgeBase, Violation, new_kb
from .model import (
    CategoricalRule,
    ClassRef,
    Concept,
    ConceptClass,
    ConceptRef,
    FeatureDef,
    FeatureRef,
    Frame,
    Guard,
    QuantitativeRule,
)
from .persist import export_dot, frame_table, load_kb, save_kb, to_graph
from .teaching import MachineUtterance, Session, apply_command, replay_script, run_session_step

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "CategoricalRule",
    "ClassRef",
    "Concept",
    "ConceptClass",
    "ConceptKitError",
    "ConceptRef",
    "Derivation",
    "FactSet",
    "FeatureDef",
    "FeatureRef",
    "Frame",
    "Guard",
    "KnowledgeBase",
    "MachineUtterance",
    "QuantitativeRule",
    "Session",
    "Step",
    "Violation",
    "apply_command",
    "classifiers",
    "engine",
    "eval_backward",
    "eval_expression",
    "eval_forward",
    "expressions",
    "explain_cause",
    "export_dot",
    "frame_table",
    "load_kb",
    "new_kb",
    "persist",
    "query",
    "replay_script",
    "run_session_step",
    "samples",
    "save_kb",
    "teaching",
    "to_graph",
]
