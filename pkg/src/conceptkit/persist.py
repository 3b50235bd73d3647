"""Persistence, graph export, and table views.

The on-disk format is canonical JSON tagged "col/1": UTF-8, two-space
indent, keys sorted, lists ordered lexicographically wherever order has no
meaning (value domains and rule lists keep their declaration order, which
does). Canonical form makes save -> load -> save byte-identical, so
knowledge bases diff cleanly under version control.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

from . import expressions as xp
from .classifiers import HistogramClassifier
from .errors import FormatError, InvalidDocument, IoError, UnknownFrame
from .kb import KnowledgeBase
from .model import CategoricalRule, FeatureDef, Frame, Guard, QuantitativeRule, Rule

FORMAT_VERSION = "col/1"


# -- element codecs -----------------------------------------------------------

def rule_to_obj(rule: Rule) -> dict:
    if isinstance(rule, CategoricalRule):
        return {
            "type": "categorical",
            "antecedent": dict(rule.antecedent),
            "consequent": dict(rule.consequent),
            "reciprocal": rule.reciprocal,
        }
    guards = []
    for g in rule.guards:
        if g.kind == "given":
            guards.append({"given": g.feature})
        else:
            guards.append({"nonzero": xp.to_obj(g.expr)})
    return {
        "type": "quantitative",
        "target": rule.target,
        "formula": xp.to_obj(rule.formula),
        "guards": guards,
    }


def rule_from_obj(obj: dict) -> Rule:
    kind = obj.get("type")
    if kind == "categorical":
        return CategoricalRule(
            antecedent={str(k): str(v) for k, v in obj["antecedent"].items()},
            consequent={str(k): str(v) for k, v in obj["consequent"].items()},
            reciprocal=bool(obj.get("reciprocal", True)),
        )
    if kind == "quantitative":
        guards = []
        for g in obj.get("guards", []):
            if "given" in g:
                guards.append(Guard(kind="given", feature=str(g["given"])))
            elif "nonzero" in g:
                guards.append(Guard(kind="nonzero", expr=xp.from_obj(g["nonzero"])))
            else:
                raise ValueError(f"unknown guard {g!r}")
        return QuantitativeRule(target=str(obj["target"]),
                                formula=xp.from_obj(obj["formula"]),
                                guards=guards)
    raise ValueError(f"unknown rule type {kind!r}")


def feature_to_obj(defn: FeatureDef) -> dict:
    obj = {"name": defn.name, "kind": defn.kind}
    if defn.kind == "numeric":
        obj["unit"] = defn.unit
        obj["bounds"] = list(defn.bounds) if defn.bounds else None
    else:
        obj["values"] = list(defn.values)
    return obj


def feature_from_obj(obj: Union[dict, str]) -> FeatureDef:
    if isinstance(obj, str):
        return FeatureDef(name=obj)
    kind = obj.get("kind", "categorical")
    if kind == "numeric":
        bounds = obj.get("bounds")
        return FeatureDef(name=str(obj["name"]), kind="numeric",
                          unit=str(obj.get("unit", "")),
                          bounds=tuple(bounds) if bounds else None)
    return FeatureDef(name=str(obj["name"]), kind=kind,
                      values=[str(v) for v in obj.get("values", [])])


# -- whole-document codec -------------------------------------------------------

def to_document(kb: KnowledgeBase) -> dict:
    concepts = []
    for name in sorted(kb.concepts):
        concept = kb.concepts[name]
        concepts.append({
            "name": name,
            "classes": [{"name": c.name, "support": c.support}
                        for c in sorted(concept.classes.values(), key=lambda c: c.name)],
            "features": sorted(concept.features),
            "subconcepts": sorted(concept.subconcepts),
        })
    features = [feature_to_obj(kb.features[name]) for name in sorted(kb.features)]
    classifiers = []
    for name in sorted(kb.classifiers):
        clf = kb.classifiers[name]
        obj = {
            "feature": name,
            "mode": clf.mode,
            "alpha": clf.alpha,
            "num_bins": clf.num_bins,
        }
        if clf.mode == "supervised":
            obj["concept"] = clf.concept
            obj["counts"] = {c: list(v) for c, v in sorted(clf.class_counts.items())}
        else:
            obj["counts"] = clf.counts_for()
        classifiers.append(obj)
    frames = []
    for name in sorted(kb.frames):
        frame = kb.frames[name]
        frames.append({
            "name": name,
            "source": frame.source,
            "target": frame.target,
            "inputs": list(frame.inputs),
            "outputs": list(frame.outputs),
            "externals": list(frame.externals),
            "rules": [rule_to_obj(r) for r in frame.rules],
        })
    return {
        "version": FORMAT_VERSION,
        "revision": kb.revision,
        "constants": dict(sorted(kb.constants.items())),
        "concepts": concepts,
        "features": features,
        "classifiers": classifiers,
        "frames": frames,
        "dictionaries": {
            "u_concepts": dict(sorted(kb.dictionaries.u_concepts.items())),
            "concepts": dict(sorted(kb.dictionaries.concepts.items())),
            "features": {k: list(v) for k, v in sorted(kb.dictionaries.features.items())},
        },
    }


def document_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def kb_bytes(kb: KnowledgeBase) -> bytes:
    return document_bytes(to_document(kb))


def coerce_document(source: Union[str, dict, Path]) -> dict:
    """Accept a dict, a JSON string, or a path to a JSON file."""
    if isinstance(source, dict):
        return source
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise FormatError("document is not a JSON object")
    return doc


def build_kb(doc: dict, fragment: bool = False) -> KnowledgeBase:
    """Reconstruct a knowledge base from a document.

    Fragments (seeds) may omit sections and classifier state; full
    documents must carry the version tag and restore counts and revision.
    """
    if not fragment:
        version = doc.get("version")
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported version {version!r}", path="$.version")
    kb = KnowledgeBase(constants=doc.get("constants"))

    for entry in doc.get("concepts", []):
        if isinstance(entry, str):
            kb.add_concept(entry)
            continue
        concept = kb.add_concept(str(entry["name"]))
        for cls in entry.get("classes", []):
            if isinstance(cls, str):
                kb.add_class(concept.name, cls)
            else:
                ref = kb.add_class(concept.name, str(cls["name"]))
                concept.classes[ref.name].support = int(cls.get("support", 0))
    for entry in doc.get("features", []):
        defn = feature_from_obj(entry)
        owner = entry.get("owner") if isinstance(entry, dict) else None
        kb.add_feature(defn, owner=owner)
    # concept -> feature attachments and subconcept links need both sides
    for entry in doc.get("concepts", []):
        if isinstance(entry, str):
            continue
        concept = kb.concepts[str(entry["name"])]
        for feat in entry.get("features", []):
            if feat not in kb.features:
                raise FormatError(f"concept {concept.name!r} references unknown "
                                  f"feature {feat!r}", path="$.concepts")
            if feat not in concept.features:
                concept.features.append(feat)
        for sub in entry.get("subconcepts", []):
            kb.add_subconcept_link(concept.name, sub)
    for entry in doc.get("frames", []):
        kb.add_frame(str(entry["name"]), str(entry["source"]), str(entry["target"]),
                     inputs=[str(f) for f in entry.get("inputs", [])],
                     outputs=[str(f) for f in entry.get("outputs", [])],
                     externals=[str(f) for f in entry.get("externals", [])])
        for robj in entry.get("rules", []):
            kb.add_rule(str(entry["name"]), rule_from_obj(robj))
    for entry in doc.get("classifiers", []):
        name = str(entry["feature"])
        if name not in kb.classifiers:
            raise FormatError(f"classifier for unknown feature {name!r}",
                              path="$.classifiers")
        stored = entry.get("counts")
        current = kb.classifiers[name]
        mode = entry.get("mode", "unsupervised")
        rebuilt = HistogramClassifier(
            kb.features[name], mode=mode,
            concept=entry.get("concept"),
            alpha=float(entry.get("alpha", current.alpha)),
            num_bins=int(entry.get("num_bins", current.num_bins)))
        if mode == "supervised":
            for cls, counts in (stored or {}).items():
                rebuilt.class_counts[cls] = [int(c) for c in counts]
        elif stored is not None:
            rebuilt._counts = [int(c) for c in stored]
        kb.classifiers[name] = rebuilt
    if not fragment and "classifiers" in doc:
        # full documents own the classifier space: a feature the document
        # binds no classifier to stays unbound, and validation refuses it
        listed = {str(entry["feature"]) for entry in doc["classifiers"]}
        for name in [n for n in kb.classifiers if n not in listed]:
            del kb.classifiers[name]
    if "dictionaries" in doc:
        dicts = doc["dictionaries"]
        kb.dictionaries.u_concepts = {str(k): str(v)
                                      for k, v in dicts.get("u_concepts", {}).items()}
        kb.dictionaries.concepts = {str(k): str(v)
                                    for k, v in dicts.get("concepts", {}).items()}
        kb.dictionaries.features = {str(k): [str(x) for x in v]
                                    for k, v in dicts.get("features", {}).items()}
    kb.revision = int(doc.get("revision", 0))
    return kb


def save_kb(kb: KnowledgeBase, destination: Union[str, Path]) -> dict:
    """Write the canonical document; returns the document dict."""
    doc = to_document(kb)
    try:
        Path(destination).write_bytes(document_bytes(doc))
    except OSError as exc:
        raise IoError(f"cannot write {destination}: {exc}") from exc
    return doc


def load_kb(source: Union[str, Path, dict]) -> KnowledgeBase:
    """Read a document and rebuild the base; refuses anything that does
    not validate cleanly."""
    try:
        doc = coerce_document(source)
    except OSError as exc:
        raise IoError(f"cannot read {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    try:
        kb = build_kb(doc)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(str(exc)) from exc
    violations = kb.validate()
    if violations:
        raise InvalidDocument(violations)
    return kb


# -- graph & table views ----------------------------------------------------------

def to_graph(kb: KnowledgeBase) -> dict:
    """Nodes are concepts and classes; edges are frames (verb-labelled) and
    subconcept links. Class membership travels as a node attribute."""
    nodes = []
    for name in sorted(kb.concepts):
        nodes.append({"id": name, "label": name, "kind": "concept"})
        concept = kb.concepts[name]
        for cls in sorted(concept.classes):
            nodes.append({"id": f"{name}::{cls}", "label": cls,
                          "kind": "class", "parent": name})
    edges = []
    for name in sorted(kb.frames):
        frame = kb.frames[name]
        edges.append({"source": frame.source, "target": frame.target,
                      "label": name, "kind": "frame"})
    for cname in sorted(kb.concepts):
        for sub in sorted(kb.concepts[cname].subconcepts):
            edges.append({"source": cname, "target": sub,
                          "label": "", "kind": "subconcept"})
    return {"revision": kb.revision, "nodes": nodes, "edges": edges}


def export_dot(kb: KnowledgeBase) -> str:
    """GraphViz digraph of the concept graph, stable across runs."""
    def quote(name: str) -> str:
        return '"' + name.replace('"', '\\"') + '"'

    lines = ["digraph concepts {", "  rankdir=LR;"]
    for name in sorted(kb.concepts):
        lines.append(f"  {quote(name)} [shape=ellipse];")
        for cls in sorted(kb.concepts[name].classes):
            node = f"{name}::{cls}"
            lines.append(f"  {quote(node)} [shape=box, label={quote(cls)}];")
            lines.append(f"  {quote(name)} -> {quote(node)} [style=dotted, arrowhead=none];")
    for name in sorted(kb.frames):
        frame = kb.frames[name]
        lines.append(f"  {quote(frame.source)} -> {quote(frame.target)} "
                     f"[label={quote(name)}];")
    for cname in sorted(kb.concepts):
        for sub in sorted(kb.concepts[cname].subconcepts):
            lines.append(f"  {quote(cname)} -> {quote(sub)} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def frame_table(kb: KnowledgeBase, name: str) -> dict:
    """Input / Rules / Output view of one frame."""
    if name not in kb.frames:
        raise UnknownFrame(f"no frame named {name!r}")
    frame = kb.frames[name]

    def column(feature_names: list[str]) -> list[dict]:
        out = []
        for feat in feature_names:
            defn = kb.features.get(feat)
            if defn is None:
                out.append({"feature": feat, "values": []})
            elif defn.kind == "numeric":
                out.append({"feature": feat, "values": [],
                            "unit": defn.unit, "kind": "numeric"})
            else:
                out.append({"feature": feat, "values": list(defn.values)})
        return out

    return {
        "name": name,
        "source": frame.source,
        "target": frame.target,
        "inputs": column(frame.inputs),
        "rules": [r.render() for r in frame.rules],
        "outputs": column(frame.outputs),
        "externals": column(frame.externals),
    }
