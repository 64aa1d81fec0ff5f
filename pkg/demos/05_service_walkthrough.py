"""
Driving the HTTP service end to end
===================================

The service wraps the builder, the generation pipeline, and the judge behind
a small REST API so a canvas front end can edit frames with PATCH ops and
ask for stories. This script boots a real server on a random port with
scripted backends, then walks the whole loop over HTTP.

For a live deployment, run `storyframe serve --config config.ini` instead.
"""

import json
import tempfile
import threading

import httpx
import uvicorn

from storyframe import MockChatClient
from storyframe.persistence import SessionStore
from storyframe.service import create_app

dims = (
    "functionality", "technicality", "innovativeness", "readability",
    "thoughtfulness", "emotional_authenticity", "clarity_of_perspective",
)
scorecard = json.dumps({d: 4 for d in dims})

llm = MockChatClient(script=[
    "The lamp died at midnight, and a small lantern brought the boat home.",
])
# three scoring runs plus one free-form improvement suggestion
judge = MockChatClient(script=[scorecard, scorecard, scorecard, "Give the storm a sound."])

store = SessionStore(tempfile.mkdtemp(prefix="sessions_"))
app = create_app(llm_client=llm, judge_clients=[judge], store=store)

# port 0 lets the OS pick; read the real port back off the socket
server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    pass
port = server.servers[0].sockets[0].getsockname()[1]
base = f"http://127.0.0.1:{port}"

with httpx.Client(base_url=base) as http:
    # a new frame starts empty (and invalid: nothing is filled in yet)
    created = http.post("/frames", json={}).json()
    fid = created["frame_id"]
    print("created", fid, "valid:", created["validation"]["ok"])

    # edits are batched builder calls; the whole batch persists or none of it
    ops = [
        {"op": "create_entity", "args": {"name": "Lena", "identity": "keeper",
                                         "motivation": "keep the lamp lit", "traits": ["steadfast"]}},
        {"op": "create_event", "args": {"time": "midnight", "location": "headland",
                                        "details": "The lamp goes dark.", "importance": "high"}},
        {"op": "create_event", "args": {"time": "dawn", "location": "harbor",
                                        "details": "The boat ties up safely.", "importance": "medium"}},
        {"op": "attach_entity", "args": {"entity_id": "entity_1", "event_id": "event_1"}},
        {"op": "attach_entity", "args": {"entity_id": "entity_1", "event_id": "event_2"}},
        {"op": "link_events", "args": {"earlier": "event_1", "later": "event_2"}},
        {"op": "assign_stage", "args": {"event_id": "event_1", "stage": "beginning"}},
        {"op": "assign_stage", "args": {"event_id": "event_2", "stage": "ending"}},
        {"op": "set_outline", "args": {"title": "The Dark Lamp",
                                       "description": "One lamp, one night."}},
    ]
    patched = http.patch(f"/frames/{fid}", json={"ops": ops}).json()
    print("after", len(ops), "ops, valid:", patched["validation"]["ok"])

    # bad edits never half-apply: the cycle is rejected, the frame unchanged
    bad = http.patch(f"/frames/{fid}", json={"ops": [
        {"op": "link_events", "args": {"earlier": "event_2", "later": "event_1"}},
    ]})
    print("linking backwards ->", bad.status_code, bad.json()["error"]["type"])

    # generation commits the frame, writes the story, and scores it
    produced = http.post(f"/frames/{fid}/generate", json={}).json()
    print("story:", produced["story"])
    print("scores:", {k: v for k, v in sorted(produced["report"]["dimensions"].items())[:3]}, "...")
    print("suggestion:", produced["report"]["suggestion"])

    # export bundles story, canonical frame, diagram, and latest report
    bundle = http.get(f"/frames/{fid}/export").json()
    print("export keys:", sorted(bundle))

server.should_exit = True
thread.join(timeout=5)
print("server stopped")
