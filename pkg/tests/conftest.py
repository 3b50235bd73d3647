"""Shared fixtures and generators for the test suite."""

from __future__ import annotations

import random

import pytest

from conceptkit import FeatureDef, new_kb, replay_script, samples, teaching
from conceptkit.kb import KnowledgeBase
from conceptkit.model import CategoricalRule


@pytest.fixture
def case_kb() -> KnowledgeBase:
    """The canonical case-study base, replayed from the shipped script."""
    kb = new_kb(teaching.case_study_seed())
    replay_script(kb, teaching.case_study_script())
    return kb


@pytest.fixture
def gas_kb() -> KnowledgeBase:
    kb = new_kb()
    samples.add_evaporation_frame(kb)
    return kb


def make_reciprocal_frame(rng: random.Random, kb: KnowledgeBase, index: int,
                          total: bool = True) -> tuple[str, list[CategoricalRule]]:
    """Build one frame whose reciprocal rules map antecedent assignments to
    consequent assignments injectively.

    With `total`, every complete antecedent assignment is covered. Returns
    the frame name and its rules.
    """
    n_inputs = rng.randint(1, 2)
    n_outputs = rng.randint(1, 2)
    src = f"C{index}a"
    dst = f"C{index}b"
    kb.add_concept(src)
    kb.add_concept(dst)

    def fresh_features(count: int, tag: str) -> list[str]:
        names = []
        for k in range(count):
            name = f"f{index}{tag}{k}"
            size = rng.randint(2, 4)
            kb.add_feature(FeatureDef(name=name,
                                      values=[f"v{j}" for j in range(size)]))
            names.append(name)
        return names

    inputs = fresh_features(n_inputs, "i")
    outputs = fresh_features(n_outputs, "o")

    def assignments(names: list[str]) -> list[dict[str, str]]:
        combos = [{}]
        for name in names:
            values = kb.features[name].values
            combos = [{**c, name: v} for c in combos for v in values]
        return combos

    ante = assignments(inputs)
    cons = assignments(outputs)
    while len(cons) < len(ante):
        # widen the first output domain until an injection exists
        feat = outputs[0]
        kb.extend_feature_domain(feat, f"v{len(kb.features[feat].values)}")
        cons = assignments(outputs)
    rng.shuffle(cons)
    chosen = ante if total else rng.sample(ante, rng.randint(1, len(ante)))
    name = f"F{index}"
    kb.add_frame(name, src, dst, inputs=inputs, outputs=outputs)
    rules = []
    for a, c in zip(chosen, cons):
        rule = CategoricalRule(antecedent=dict(a), consequent=dict(c), reciprocal=True)
        kb.add_rule(name, rule)
        rules.append(rule)
    return name, rules


def complete_assignments(kb: KnowledgeBase, names: list[str]) -> list[dict[str, str]]:
    combos = [{}]
    for name in names:
        values = kb.features[name].values
        combos = [{**c, name: v} for c in combos for v in values]
    return combos
