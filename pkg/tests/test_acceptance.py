"""Acceptance suite: one test per shipping criterion, at its stated
tolerance. Run with `pytest tests/test_acceptance.py -v -s` to see one
PASS line per criterion."""

import itertools
import json
import random
import time

import pytest
from fastapi.testclient import TestClient

from conceptkit import (
    FactSet,
    FeatureDef,
    classifiers as cl,
    eval_backward,
    eval_forward,
    new_kb,
    persist,
    query,
    replay_script,
    samples,
    teaching,
)
from conceptkit.classifiers import HistogramClassifier, Posterior
from conceptkit.errors import GuardError, MissingExternal
from conceptkit.server import create_app

from conftest import complete_assignments, make_reciprocal_frame
from test_kb import run_random_mutations


def report(line: str) -> None:
    print(f"PASS  {line}")


def build_case_kb():
    kb = new_kb(teaching.case_study_seed())
    result = replay_script(kb, teaching.case_study_script())
    return kb, result


# -- criterion: canonical-script replay ---------------------------------------------

FIGURE_TABLES = {
    "TO SEE": {
        "source": "Humans",
        "target": "See well",
        "inputs": [("Owns glasses", {"Yes", "No"})],
        "rules": ["If Owns glasses=Yes ⇔ Quality vision=Good",
                  "If Owns glasses=No ⇔ Quality vision=Bad"],
        "outputs": [("Quality vision", {"Good", "Bad"})],
    },
    "TO LET FALL": {
        "source": "Humans",
        "target": "Breakable",
        "inputs": [("Type of material", {"Mineral", "Synthetic"})],
        "rules": ["If Type of material=Mineral ⇔ Breakable=Yes",
                  "If Type of material=Synthetic ⇔ Breakable=No"],
        "outputs": [("Breakable", {"Yes", "No"})],
    },
    "TO USE": {
        "source": "See well",
        "target": "Pain at eyes",
        "inputs": [("Quality vision", {"Bad", "Good"})],
        "rules": ["If Quality vision=Good ⇔ Pain at eyes=No",
                  "If Quality vision=Bad ⇔ Pain at eyes=Yes"],
        "outputs": [("Pain at eyes", {"No", "Yes"})],
    },
}


def test_canonical_script_replay():
    started = time.perf_counter()
    kb, _ = build_case_kb()
    elapsed = time.perf_counter() - started

    assert set(kb.concepts) == {"Humans", "See well", "Breakable", "Pain at eyes"}
    assert set(kb.concepts["Humans"].classes) == {"Glasses"}
    assert set(kb.frames) == {"TO SEE", "TO LET FALL", "TO USE"}
    for name, expected in FIGURE_TABLES.items():
        table = persist.frame_table(kb, name)
        assert table["source"] == expected["source"]
        assert table["target"] == expected["target"]
        assert [(c["feature"], set(c["values"])) for c in table["inputs"]] == \
            expected["inputs"]
        assert [(c["feature"], set(c["values"])) for c in table["outputs"]] == \
            expected["outputs"]
        assert table["rules"] == expected["rules"]
    assert elapsed < 1.0, f"replay took {elapsed:.3f}s"
    report(f"canonical-script replay: frames and rule tables match ({elapsed*1000:.0f} ms)")


# -- criterion: staged snapshots ------------------------------------------------------

FIGURE_GRAPHS = {
    "stage2": ({("concept", "Humans"), ("concept", "Breakable"),
                ("class", "Humans::Glasses")},
               set()),
    "stage4": ({("concept", "Humans"), ("concept", "Breakable"),
                ("class", "Humans::Glasses"), ("concept", "See well")},
               {("TO SEE", "Humans", "See well")}),
    "stage6": ({("concept", "Humans"), ("concept", "Breakable"),
                ("class", "Humans::Glasses"), ("concept", "See well")},
               {("TO SEE", "Humans", "See well"),
                ("TO LET FALL", "Humans", "Breakable")}),
    "final": ({("concept", "Humans"), ("concept", "Breakable"),
               ("class", "Humans::Glasses"), ("concept", "See well"),
               ("concept", "Pain at eyes")},
              {("TO SEE", "Humans", "See well"),
               ("TO LET FALL", "Humans", "Breakable"),
               ("TO USE", "See well", "Pain at eyes")}),
}


def test_staged_snapshots_match_figures():
    _, result = build_case_kb()
    snapshots = dict(result.snapshots)
    assert list(snapshots) == ["stage2", "stage4", "stage6", "final"]
    for stage, (want_nodes, want_edges) in FIGURE_GRAPHS.items():
        graph = snapshots[stage]
        nodes = {(n["kind"], n["id"]) for n in graph["nodes"]}
        edges = {(e["label"], e["source"], e["target"]) for e in graph["edges"]}
        assert nodes == want_nodes, stage
        assert edges == want_edges, stage
    report("staged snapshots: stage 2/4/6/final node and edge sets match")


# -- criterion: test dialogue ----------------------------------------------------------


def test_dialogue_deductions():
    kb, _ = build_case_kb()
    first = query(kb, FactSet({"Pain at eyes": "Yes"}), "Quality vision")
    assert first.status == "exact" and first.value == "Bad"
    assert first.derivations[0].frames() == ["TO USE"]
    assert len(first.derivations[0]) == 1

    second = query(kb, FactSet({"Pain at eyes": "Yes"}), "Owns glasses")
    assert second.status == "exact" and second.value == "Yes"
    assert second.derivations[0].frames() == ["TO USE", "TO SEE"]
    assert len(second.derivations[0]) == 2
    report("test dialogue: bad vision deduced, wearing glasses recommended")


# -- criterion: gas-law frame -----------------------------------------------------------


def test_gas_law_frame():
    kb = new_kb()
    samples.add_evaporation_frame(kb)

    # oracle: direct arithmetic, written out independently
    r = 8.314
    pressure = eval_forward(kb, "Evaporation",
                            FactSet({"n": 1.0, "V": 0.0224, "T": 300.0}))
    assert abs(pressure.value("P") - (1.0 * r * 300.0) / 0.0224) \
        <= 1e-6 * abs((1.0 * r * 300.0) / 0.0224)

    volume = eval_forward(kb, "Evaporation",
                          FactSet({"n": 1.0, "P": 101325.0, "T": 300.0}))
    assert volume.value("V") == pytest.approx((1.0 * r * 300.0) / 101325.0, rel=1e-6)

    moles = eval_forward(kb, "Evaporation",
                         FactSet({"P": 101325.0, "V": 0.0224, "T": 300.0}))
    assert moles.value("n") == pytest.approx((101325.0 * 0.0224) / (r * 300.0), rel=1e-6)

    with pytest.raises(GuardError):
        eval_forward(kb, "Evaporation", FactSet({"n": 1.0, "V": 0.0, "T": 300.0}))
    with pytest.raises(MissingExternal):
        eval_forward(kb, "Evaporation", FactSet({"n": 1.0, "V": 0.0224}))
    report("gas-law frame: all three directions match the arithmetic oracle; "
           "guards and externals fail loudly")


# -- criterion: reciprocity property suite ------------------------------------------------


def test_reciprocity_round_trip_thousand_frames():
    started = time.perf_counter()
    rng = random.Random(193)
    frames = 0
    assignments_checked = 0
    while frames < 1000:
        kb = new_kb()
        for index in range(4):
            name, _ = make_reciprocal_frame(rng, kb, index)
            frame = kb.frames[name]
            for assignment in complete_assignments(kb, frame.inputs):
                facts = FactSet(assignment)
                outputs = eval_forward(kb, name, facts)
                recovered = eval_backward(kb, name, outputs)
                for feat, value in assignment.items():
                    assert recovered.value(feat) == value
                assignments_checked += 1
            frames += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    report(f"reciprocity: backward(forward(x)) recovered x on {frames} frames, "
           f"{assignments_checked} assignments, {elapsed:.1f}s")


# -- criterion: classifier oracle equivalence ----------------------------------------------


def bayes_oracle(class_counts, index, alpha, bins):
    supports = {c: sum(v) for c, v in class_counts.items()}
    total = sum(supports.values())
    if total == 0:
        return {c: 1.0 / len(class_counts) for c in class_counts}
    scores = {}
    for c, counts in class_counts.items():
        scores[c] = (counts[index] + alpha) / (sum(counts) + alpha * bins) \
            * supports[c] / total
    norm = sum(scores.values())
    return {c: s / norm for c, s in scores.items()}


def histogram_profiles(max_total, classes):
    per_class = [(c, t) for t in range(max_total + 1) for c in range(t + 1)]
    for combo in itertools.product(per_class, repeat=classes):
        if sum(t for _, t in combo) <= max_total:
            yield combo


def test_classifier_oracle_equivalence():
    import math
    checked = 0
    for bins in (2, 3, 4):
        feature = FeatureDef(name="f", values=[f"v{i}" for i in range(bins)])
        for n_classes in (1, 2, 3):
            names = [f"c{i}" for i in range(n_classes)]
            for profile in histogram_profiles(10, n_classes):
                for query_bin in range(bins):
                    clf = HistogramClassifier(feature, mode="supervised",
                                              concept="X", classes=names)
                    for name, (at_bin, total) in zip(names, profile):
                        counts = [0] * bins
                        counts[query_bin] = at_bin
                        counts[(query_bin + 1) % bins] += total - at_bin
                        clf.class_counts[name] = counts
                    got = clf.classify(f"v{query_bin}")
                    want = bayes_oracle(clf.class_counts, query_bin, 1.0, bins)
                    assert abs(sum(got.probs.values()) - 1.0) <= 1e-9
                    for name in names:
                        assert got.probs[name] == pytest.approx(want[name], abs=1e-9)
                    h = cl.entropy(clf)
                    assert 0.0 <= h <= math.log2(bins) + 1e-12
                    checked += 1

    rng = random.Random(11)
    for _ in range(300):
        k = rng.randint(2, 4)
        weights = [[rng.uniform(0.05, 1.0) for _ in range(3)] for _ in range(k)]
        posteriors = [Posterior({c: w / sum(ws) for c, w in zip("ABC", ws)})
                      for ws in weights]
        base = cl.combine(posteriors)
        shuffled = list(posteriors)
        rng.shuffle(shuffled)
        permuted = cl.combine(shuffled)
        for c in "ABC":
            assert abs(base.probs[c] - permuted.probs[c]) < 1e-12
        fallback = Posterior({c: 1 / 3 for c in "ABC"}, uniform_fallback=True)
        padded = cl.combine([*posteriors, fallback])
        for c in "ABC":
            assert abs(base.probs[c] - padded.probs[c]) < 1e-12
    report(f"classifiers: {checked} histograms equal the Bayes oracle; "
           "posteriors normalized; entropy bounded; combine permutation-safe")


# -- criterion: space bookkeeping -------------------------------------------------------


def test_space_bookkeeping_random_sequences():
    finals = []
    for seed in range(8):
        finals.append(run_random_mutations(seed, steps=150))
    for kb in finals:
        assert kb.classifier_count() == kb.feature_count()
        assert kb.validate() == []
    report("space bookkeeping: classifier/feature bijection held through "
           "8 randomized mutation runs; rejected ops left bytes identical")


# -- criterion: persistence -------------------------------------------------------------


def drive_statements_over_http(tmp_path):
    kb = new_kb(teaching.case_study_seed())
    app = create_app(kb, kb_path=tmp_path / "kb.json")
    with TestClient(app) as client:
        sid = client.post("/sessions").json()["session_id"]
        for line in teaching.case_study_script().splitlines():
            text = line.strip()
            if not text or text.startswith(("#", "@")):
                continue
            response = client.post(f"/sessions/{sid}/statements", json={"text": text})
            assert response.status_code == 200, (text, response.text)
    return kb


def test_persistence_round_trips_and_path_parity(tmp_path):
    from conceptkit.cli import main as cli_main

    produced = []
    produced.append(new_kb())
    produced.append(new_kb(teaching.case_study_seed()))
    case_kb, _ = build_case_kb()
    produced.append(case_kb)
    gas = new_kb()
    samples.add_evaporation_frame(gas)
    produced.append(gas)
    produced.append(run_random_mutations(3, steps=80))
    for index, kb in enumerate(produced):
        first = tmp_path / f"kb{index}a.json"
        second = tmp_path / f"kb{index}b.json"
        persist.save_kb(kb, first)
        persist.save_kb(persist.load_kb(first), second)
        assert first.read_bytes() == second.read_bytes(), f"kb #{index}"

    seed_path = tmp_path / "seed.json"
    seed_path.write_text(json.dumps(teaching.case_study_seed()), encoding="utf-8")
    script_path = tmp_path / "case.col"
    script_path.write_text(teaching.case_study_script(), encoding="utf-8")
    cli_kb = tmp_path / "cli_kb.json"
    assert cli_main(["init", "--seed", str(seed_path), "--out", str(cli_kb)]) == 0
    assert cli_main(["teach", str(script_path), "--kb", str(cli_kb),
                     "--out", str(cli_kb)]) == 0
    via_cli = cli_kb.read_bytes()

    via_http = persist.kb_bytes(drive_statements_over_http(tmp_path))
    assert via_cli == via_http
    report("persistence: save/load/save byte-identical on every produced base; "
           "CLI and HTTP replays serialize identically")
