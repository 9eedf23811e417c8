"""Validate `oobc analyze --json` output for every corpus program against the export schema."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    oobc, schema_path, corpus, predicates = sys.argv[1:5]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    runs = [
        [],
        ["--k", "1"],
        ["--k", "1", "--no-widen", "--gc"],
        ["--predicates", predicates],
        ["--cutoff", "0"],
    ]
    failures = 0
    checked = 0
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp) / "export.json"
        for program in sorted(pathlib.Path(corpus).glob("*.oobc")):
            for extra in runs:
                proc = subprocess.run([oobc, "analyze", str(program), "--json", str(out), *extra],
                                      capture_output=True, text=True)
                if proc.returncode not in (0, 2):
                    print(f"{program.name} {extra}: exit {proc.returncode}\n{proc.stderr}")
                    failures += 1
                    continue
                doc = json.loads(out.read_text())
                errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
                for e in errors[:3]:
                    print(f"{program.name} {extra}: {list(e.path)}: {e.message}")
                failures += bool(errors)
                ids = {n["id"] for n in doc["nodes"]}
                dangling = [e for e in doc["edges"] if e["from"] not in ids or e["to"] not in ids]
                if dangling:
                    print(f"{program.name} {extra}: edge to unknown node {dangling[0]}")
                    failures += 1
                checked += 1
    print(f"validated {checked} exports, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
