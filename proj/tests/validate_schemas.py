"""Run the CLI with --json and validate every report against docs/schemas."""
import json
import pathlib
import subprocess
import sys

import jsonschema

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {}
for path in schema_dir.glob("*.v1.json"):
    s = json.loads(path.read_text())
    jsonschema.Draft202012Validator.check_schema(s)
    schemas[s["$id"]] = s

cases = [
    ["classify", "R x Z(3)", "--witness"],
    ["classify", "R^2", "--mode", "numeral"],
    ["classify", "R x ("],
    ["dual", "Z(4) x R"],
    ["dual", "BohrZ"],
    ["structure", "R x T x Z(2)"],
    ["witness", "Q"],
    ["witness", "R x Zp(2)"],
    ["lab", "limit", "--group", "RxZ(3)", "--seq", "zn", "--target", "full", "--rho", "5", "--eps", "1/10", "--nmax", "200", "--dual"],
    ["lab", "limit", "--group", "R", "--seq", "alternating", "--target", "trivial", "--rho", "10", "--eps", "1/10", "--nmax", "40"],
    ["lab", "limit", "--group", "R", "--seq", "inv-lattice", "--rho", "10", "--eps", "0.1", "--nmax", "5"],
    ["lab", "probe", "--group", "RxZ(3)", "--rho", "3", "--eps", "1/4", "--denom-bound", "12"],
    ["lab", "probe", "--group", "RxZ(2)^2", "--rho", "3", "--eps", "1/4", "--denom-bound", "24"],
    ["lab", "duality", "--finite", "Z(2)xZ(4)"],
    ["nets", "demo-corollary", "--imax", "4"],
    ["frobnicate"],
]
failed = 0
for args in cases:
    proc = subprocess.run([cli, "--json", *args], capture_output=True, text=True)
    try:
        report = json.loads(proc.stdout)
        jsonschema.validate(report, schemas[report["schema"]])
    except Exception as e:  # noqa: BLE001
        failed += 1
        print(f"FAIL {args}: {e}\n{proc.stdout}{proc.stderr}")
        continue
    print(f"ok   {report['schema']:<22} {' '.join(args)}")
sys.exit(1 if failed else 0)
