"""Runs the CLI commands that emit reports and validates each against the shipped schema."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    cli, schema_path, data = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    validator = jsonschema.Draft202012Validator(schema)
    runs = {
        "lemma1e": ["verify", "--identity", "lemma1e", "--measure", data / "gauss.json", "--beta", "1"],
        "cor5": ["verify", "--identity", "cor5", "--measure", data / "poisson.json", "--beta", "2"],
        "cor3": ["verify", "--identity", "cor3", "--measure", data / "gamma.json", "--mc.n", "5000"],
        "exponent": ["exponent", "--measure", data / "mixed_2d.json"],
        "map": ["map", "--measure", data / "gamma.json", "--map", "i"],
        "factor": ["factor", "--measure", data / "gamma.json", "--beta", "0.5"],
        "simulate": ["simulate", "--measure", data / "gamma.json", "--kernel", "i", "--mc.n", "2000"],
        "levy-area": ["levy-area", "--u", "0.5"],
    }
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, args in runs.items():
            out = Path(tmp) / f"{name}.json"
            proc = subprocess.run([cli, *map(str, args), "--out", str(out)], capture_output=True, text=True)
            if proc.returncode not in (0, 1):
                print(f"{name}: exit {proc.returncode}\n{proc.stderr}")
                failures += 1
                continue
            errors = list(validator.iter_errors(json.loads(out.read_text())))
            for e in errors:
                print(f"{name}: {e.message} at {list(e.absolute_path)}")
            failures += bool(errors)
            print(f"{name}: {'ok' if not errors else 'INVALID'}")
        bad = {"identity": "x", "pass": "yes"}
        if validator.is_valid(bad):
            print("schema accepted a malformed report")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
