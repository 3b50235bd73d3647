"""HTTP API: endpoints, payloads, and error mapping."""

import pytest
from fastapi.testclient import TestClient

from conceptkit import new_kb, persist, replay_script, teaching
from conceptkit.server import create_app


@pytest.fixture
def client(tmp_path):
    kb = new_kb(teaching.case_study_seed())
    app = create_app(kb, kb_path=tmp_path / "kb.json")
    with TestClient(app) as c:
        c.kb = kb
        yield c


def statement_lines():
    return [line.strip() for line in teaching.case_study_script().splitlines()
            if line.strip() and not line.strip().startswith(("#", "@"))]


def drive_canonical(client):
    sid = client.post("/sessions").json()["session_id"]
    for line in statement_lines():
        response = client.post(f"/sessions/{sid}/statements", json={"text": line})
        assert response.status_code == 200, (line, response.text)
    return sid


def test_open_session(client):
    response = client.post("/sessions")
    assert response.status_code == 200
    assert response.json()["session_id"]


def test_statement_reports_delta_and_revision(client):
    sid = client.post("/sessions").json()["session_id"]
    response = client.post(f"/sessions/{sid}/statements",
                           json={"text": "adj Breakable : No, Yes"})
    body = response.json()
    assert body["machine_reply"]["kind"] == "acknowledgment"
    assert body["kb_delta"]["features_added"] == ["Breakable"]
    assert body["revision"] == 1


def test_statement_unknown_session(client):
    response = client.post("/sessions/nope/statements", json={"text": "noun X"})
    assert response.status_code == 404


def test_parse_error_is_400_with_column(client):
    sid = client.post("/sessions").json()["session_id"]
    response = client.post(f"/sessions/{sid}/statements",
                           json={"text": "adj Breakable No Yes"})
    assert response.status_code == 400
    body = response.json()
    assert body["error"] == "ParseError"
    assert body["column"] == 15
    assert body["expected"] == [":"]


def test_conflict_is_409(client):
    drive_canonical(client)
    sid = client.post("/sessions").json()["session_id"]
    response = client.post(
        f"/sessions/{sid}/statements",
        json={"text": 'rule "TO SEE" : "Owns glasses"=Yes <=> "Quality vision"=Bad'})
    assert response.status_code == 409
    assert response.json()["error"] == "ReciprocityConflict"


def test_unknown_element_is_404(client):
    sid = client.post("/sessions").json()["session_id"]
    response = client.post(f"/sessions/{sid}/statements",
                           json={"text": "verb F from Humans to Nowhere in() out()"})
    assert response.status_code == 404
    assert client.get("/kb/frames/NOPE").status_code == 404


def test_protocol_error_is_400(client):
    sid = client.post("/sessions").json()["session_id"]
    response = client.post(f"/sessions/{sid}/statements", json={"text": "yes"})
    assert response.status_code == 400
    assert response.json()["error"] == "ProtocolError"


def test_graph_matches_dot_export(client):
    drive_canonical(client)
    graph = client.get("/kb/graph").json()
    dot = persist.export_dot(client.kb)
    for edge in graph["edges"]:
        if edge["kind"] == "frame":
            line = '"{}" -> "{}" [label="{}"];'.format(
                edge["source"], edge["target"], edge["label"])
            assert line in dot
    assert len([e for e in graph["edges"] if e["kind"] == "frame"]) == dot.count(" [label=")


def test_query_endpoint_answers_with_derivation(client):
    drive_canonical(client)
    response = client.post("/kb/query", json={
        "facts": {"Pain at eyes": "Yes"}, "goal": "Owns glasses"})
    body = response.json()
    assert body["status"] == "exact"
    assert body["value"] == "Yes"
    steps = [(s["frame"], s["direction"]) for s in body["derivation"]]
    assert steps == [("TO USE", "backward"), ("TO SEE", "backward")]


def test_query_unknown_goal_is_404(client):
    assert client.post("/kb/query", json={"facts": {}, "goal": "Nope"}).status_code == 404


def test_frame_table_endpoint(client):
    drive_canonical(client)
    table = client.get("/kb/frames/TO SEE").json()
    assert table["rules"][0] == "If Owns glasses=Yes ⇔ Quality vision=Good"
    assert table["inputs"] == [{"feature": "Owns glasses", "values": ["Yes", "No"]}]


def test_save_endpoint_persists(client, tmp_path):
    drive_canonical(client)
    response = client.post("/kb/save")
    assert response.status_code == 200
    saved = persist.load_kb(response.json()["path"])
    assert sorted(saved.frames) == ["TO LET FALL", "TO SEE", "TO USE"]


def test_http_and_cli_paths_produce_identical_kbs(client):
    drive_canonical(client)
    via_http = persist.kb_bytes(client.kb)
    kb = new_kb(teaching.case_study_seed())
    replay_script(kb, teaching.case_study_script())
    via_library = persist.kb_bytes(kb)
    assert via_http == via_library
