"""Run the CLI and check its reports, and the samples, against schemas/."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

cli, root = sys.argv[1], Path(sys.argv[2])
schemas = {p.name.split(".")[0]: json.loads(p.read_text()) for p in (root / "schemas").glob("*.schema.json")}
registry = Registry().with_resources((s["$id"], Resource.from_contents(s)) for s in schemas.values())
failures = []


def check(kind, doc, where):
    try:
        jsonschema.Draft202012Validator(schemas[kind], registry=registry).validate(doc)
    except jsonschema.ValidationError as e:
        failures.append(f"{where}: {e.message}")


def run(*args, code):
    with tempfile.TemporaryDirectory() as d:
        out = Path(d) / "r.json"
        p = subprocess.run([cli, *args, "--out", str(out)], capture_output=True, text=True)
        if p.returncode != code:
            failures.append(f"{' '.join(args)}: exit {p.returncode}, wanted {code}")
        return json.loads(out.read_text())


reports = {
    "t32": run("verify-t32", code=0),
    "t32-mutant": run("verify-t32", "--mutate", "drop-edge", code=1),
    "tnk": run("verify-tnk", "--n", "3", "--k", "2", "--levels", "2", code=0),
    "tnk-bad": run("verify-tnk", "--n", "2", "--k", "2", code=2),
    "tnk-budget": run("verify-tnk", "--n", "3", "--k", "2", "--levels", "9", code=3),
    "circle": run("check-circle", "--context", str(root / "samples" / "linear3.json"), code=0),
    "trg": run("trg-superstable", "--patterns", "5", "--max-i1", "2", "--i0-bound", "0", code=0),
}
for name, r in reports.items():
    check("report", r, name)

check("certificate", reports["tnk"]["verdict"]["certificate"], "tnk certificate")
w = reports["circle"]["verdict"]["sweep"][0]["witness"]
check("circle_witness", w, "circle witness")
for pt in w["E1"] + w["E2"] + w["F"]:
    check("qf_type", pt["type"], "witness pair type")

for s in ("linear3", "cnk32"):
    check("context", json.loads((root / "samples" / f"{s}.json").read_text()), f"samples/{s}.json")
check("circle_witness", json.loads((root / "samples" / "linear_witness.json").read_text()), "samples/linear_witness.json")
check("certificate", json.loads((root / "samples" / "t32_certificate.json").read_text()), "samples/t32_certificate.json")
check("report", json.loads((root / "samples" / "t32_report.json").read_text()), "samples/t32_report.json")

for f in failures:
    print("FAIL", f)
print(f"{len(reports)} reports and 5 samples checked, {len(failures)} failures")
sys.exit(1 if failures else 0)
