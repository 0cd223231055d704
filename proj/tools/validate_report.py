"""Validate a jtwist JSON report against the shipped schema."""
import argparse
import json
import sys

import jsonschema


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("schema")
    parser.add_argument("report")
    args = parser.parse_args()
    with open(args.schema) as f:
        schema = json.load(f)
    with open(args.report) as f:
        report = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(report), key=lambda e: list(e.path))
    for e in errors:
        print(f"{'/'.join(map(str, e.path))}: {e.message}", file=sys.stderr)
    summary = report["summary"]
    counted = summary["pass"] + summary["fail"] + summary["erratum_suspected"] + summary["info"]
    if counted != summary["total"] or summary["total"] != len(report["records"]):
        print("summary counts disagree with records", file=sys.stderr)
        return 1
    print(f"{args.report}: {len(report['records'])} records valid")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
