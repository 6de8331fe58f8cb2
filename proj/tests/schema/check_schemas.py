"""Validates library/CLI JSON output against the shipped schemas."""
import json
import pathlib
import sys

import jsonschema

SCHEMAS = {
    "request_": "predict-request.schema.json",
    "report_": "diagnostic-report.schema.json",
    "error_": "error.schema.json",
    "health": "health.schema.json",
    "eval_": "metrics-report.schema.json",
}


def load(path):
    return json.loads(pathlib.Path(path).read_text())


def main(schema_dir, sample_dir):
    schema_dir, sample_dir = pathlib.Path(schema_dir), pathlib.Path(sample_dir)
    validators = {}
    for name in sorted(set(SCHEMAS.values())):
        schema = load(schema_dir / name)
        jsonschema.Draft202012Validator.check_schema(schema)
        validators[name] = jsonschema.Draft202012Validator(schema)

    failures, seen = 0, {name: 0 for name in validators}
    for sample in sorted(sample_dir.glob("*.json")):
        schema = next((s for p, s in SCHEMAS.items() if sample.name.startswith(p)), None)
        if schema is None:
            continue
        errors = list(validators[schema].iter_errors(load(sample)))
        seen[schema] += 1
        status = "ok" if not errors else "INVALID"
        print(f"{sample.name:32} {schema:36} {status}")
        for e in errors:
            print(f"    {list(e.absolute_path)}: {e.message}")
        failures += bool(errors)

    # The schemas must reject obviously wrong documents too.
    report = load(sample_dir / "report_0.json")
    negatives = [
        ("diagnostic-report.schema.json", {k: v for k, v in report.items() if k != "detection"}),
        ("diagnostic-report.schema.json", {**report, "task": "segment"}),
        ("diagnostic-report.schema.json", {**report, "timestamp": "yesterday"}),
        ("error.schema.json", {"error": {"code": "nope", "message": ""}}),
        ("predict-request.schema.json", {"task": "full"}),
        ("predict-request.schema.json", {"image": "", "pixel_spacing_mm": 0}),
    ]
    for schema, doc in negatives:
        if validators[schema].is_valid(doc):
            print(f"negative sample unexpectedly valid under {schema}: {json.dumps(doc)[:80]}")
            failures += 1

    missing = [s for s, n in seen.items() if n == 0]
    if missing:
        print("no samples for", missing)
        failures += 1
    print("FAILED" if failures else "all samples valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
