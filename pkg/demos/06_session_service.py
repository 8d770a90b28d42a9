"""Drive the session service the way the weight studio does.

Uses the in-process test client so no port is needed; the HTTP flow is the
same one `fairpia serve` exposes: create a session, paint weights with a
range spec, step, run, then read the comb and the trace.
"""

import warnings

from fastapi.testclient import TestClient

from fairpia import NoiseSpec, add_noise, make_spiral_model
from fairpia.modelio import model_document
from fairpia.service import create_app

# painted weights above the stability bound get clamped with a warning each;
# that is the behavior being demonstrated, so keep the console clean here
warnings.filterwarnings("ignore")

client = TestClient(create_app())
doc = model_document(add_noise(make_spiral_model(), NoiseSpec(variance=0.02, seed=3)))

sid = client.post("/sessions", json={"model": doc}).json()["sessionId"]
print("session:", sid)

client.put(f"/sessions/{sid}/weights", json={"rangeSpec": "10-20:1e-5,default:1e-7"})
print("weights painted via range spec")

ranking = client.post(f"/sessions/{sid}/autoselect", json={"m": 5}).json()["ranking"]
print("top-5 ranked points:", [(row["index"], round(row["z"], 3)) for row in ranking])

for _ in range(3):
    r = client.post(f"/sessions/{sid}/fair", json={"mode": "step"})
print("after 3 steps:", r.json())

r = client.post(f"/sessions/{sid}/fair", json={"mode": "run", "maxIter": 200})
print("run:", r.json()["status"], "iterations:", r.json()["iterations"])

trace = client.get(f"/sessions/{sid}/trace").json()["trace"]
print(f"trace rows: {len(trace)}, final relative energy: {trace[-1]['eRel']:.4f}")

comb = client.get(f"/sessions/{sid}/comb", params={"samples": 8}).json()
print("comb sample 0: point", comb["points"][0], "tip", comb["tips"][0])

client.post(f"/sessions/{sid}/reset")
print("reset ->", client.get(f"/sessions/{sid}/trace").json())
