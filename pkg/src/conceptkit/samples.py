"""Ready-made knowledge-base fixtures.

`add_evaporation_frame` builds the canonical quantitative frame: a Liquid
-> Gas transformer whose three one-sided rules rearrange P*V = n*R*T, each
direction guarded by its own divisor check, all activated only when the
external temperature is given.
"""

from __future__ import annotations

from . import expressions as xp
from .kb import KnowledgeBase
from .model import FeatureDef, Guard, QuantitativeRule


def add_evaporation_frame(kb: KnowledgeBase) -> None:
    for concept in ("Liquid", "Gas"):
        if concept not in kb.concepts:
            kb.add_concept(concept)
    for name, unit in (("n", "mol"), ("P", "Pa"), ("V", "m3"), ("T", "K")):
        if name not in kb.features:
            kb.add_feature(FeatureDef(name=name, kind="numeric", unit=unit))
    kb.add_frame("Evaporation", "Liquid", "Gas",
                 inputs=["n", "P", "V"], outputs=["P", "V", "n"],
                 externals=["T"])
    n, p, v, t, r = xp.Var("n"), xp.Var("P"), xp.Var("V"), xp.Var("T"), xp.NamedConst("R")
    kb.add_rule("Evaporation", QuantitativeRule(
        target="P",
        formula=xp.BinOp("/", xp.BinOp("*", xp.BinOp("*", n, r), t), v),
        guards=[Guard("given", "n"), Guard("given", "V"), Guard("nonzero", expr=v)]))
    kb.add_rule("Evaporation", QuantitativeRule(
        target="V",
        formula=xp.BinOp("/", xp.BinOp("*", xp.BinOp("*", n, r), t), p),
        guards=[Guard("given", "n"), Guard("given", "P"), Guard("nonzero", expr=p)]))
    kb.add_rule("Evaporation", QuantitativeRule(
        target="n",
        formula=xp.BinOp("/", xp.BinOp("*", p, v), xp.BinOp("*", r, t)),
        guards=[Guard("given", "P"), Guard("given", "V"),
                Guard("nonzero", expr=r), Guard("nonzero", expr=t)]))
