"""Runs the CLI and validates its documents against docs/schemas."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())

runs = [
    ("count.schema.json", ["count", "--curve", "circle", "--Q", "80", "--psi", "const:0.02"]),
    ("count.schema.json", ["count", "--curve", "parabola", "--series", "2^5..2^7", "--psi", "pow:0.6"]),
    ("theorem4.schema.json", ["ubiquity", "theorem4", "--curve", "parabola", "--psi", "pow:0.6", "--Q", "2^8..2^9"]),
    ("theorem-a.schema.json", ["sieve", "theoremA", "--Q", "2^7,300.5"]),
    ("cantor-build.schema.json", ["cantor", "build", "--depth", "2"]),
    ("quadric-wm.schema.json", ["quadric", "wm", "--kind", "circle", "--m", "4..5"]),
    ("dimension-classify.schema.json", ["dimension", "classify", "--kind", "jarnik", "--psi", "pow:0.75", "--s", "0.7"]),
]

failures = 0
with tempfile.TemporaryDirectory() as tmp:
    for i, (schema, args) in enumerate(runs):
        out = pathlib.Path(tmp) / f"run{i}.json"
        man = pathlib.Path(tmp) / f"run{i}.manifest.json"
        extra = ["--json", str(out), "--manifest", str(man)]
        if args[:2] == ["cantor", "build"]:
            extra += ["--jsonl", str(pathlib.Path(tmp) / f"run{i}.jsonl")]
        rc = subprocess.run([cli, "--no-cache", *args, *extra], capture_output=True, text=True)
        if rc.returncode != 0:
            print(f"FAIL {' '.join(args)}: exit {rc.returncode}\n{rc.stderr}")
            failures += 1
            continue
        checks = [(schema, json.loads(out.read_text())), ("manifest.schema.json", json.loads(man.read_text()))]
        jl = pathlib.Path(tmp) / f"run{i}.jsonl"
        if jl.exists():
            checks += [("cantor-node.schema.json", json.loads(line)) for line in jl.read_text().splitlines()]
        bad = 0
        for name, inst in checks:
            v = jsonschema.Draft202012Validator(schemas[name], registry=registry)
            errs = list(v.iter_errors(inst))
            if errs:
                bad += 1
                print(f"FAIL {' '.join(args)} against {name}: {errs[0].message} at {list(errs[0].path)}")
        failures += bad
        if not bad:
            print(f"ok   {' '.join(args)} ({len(checks)} documents)")

sys.exit(1 if failures else 0)
