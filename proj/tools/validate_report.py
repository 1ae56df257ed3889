#!/usr/bin/env python3
"""Validate weylcheck JSON reports against report.schema.json.

Usage: validate_report.py SCHEMA [REPORT...]   (reads stdin when no report is given)
"""
import json
import sys

import jsonschema


def main(argv):
    if len(argv) < 2:
        print(__doc__, file=sys.stderr)
        return 2
    with open(argv[1]) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    sources = argv[2:] or ["-"]
    failed = 0
    for path in sources:
        text = sys.stdin.read() if path == "-" else open(path).read()
        errors = list(validator.iter_errors(json.loads(text)))
        for e in errors:
            print(f"{path}: {'/'.join(map(str, e.path)) or '<root>'}: {e.message}", file=sys.stderr)
        failed += bool(errors)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
