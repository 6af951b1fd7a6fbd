"""Run every shipped demo and input document through the CLI.

Prints the verb, the exit code and the failing checks, if any. Exit codes
are compared against the expected ones recorded below.
"""

import json
import sys
from pathlib import Path

from click.testing import CliRunner

from pvpatch.cli import main

HERE = Path(__file__).parent / "inputs"

RUNS = [
    (["demo", "sl2"], 0),
    (["demo", "sl2-literal"], 1),  # literal atoms: trivial torsor, new constants
    (["demo", "borel-ebp"], 0),
    (["demo", "gm-inverse"], 0),
    (["factorize", HERE / "identity_matrix.json"], 0),
    (["factorize", HERE / "f_matrix.json"], 0),
    (["factorize", "--random", "3"], 0),
    (["patch", HERE / "sl2_problem.json"], 0),
    (["verify", HERE / "verify_zero_A.json"], 1),
    (["solve-ebp", HERE / "borel_ebp.json"], 0),
    (["solve-ebp", HERE / "non_split.json"], 2),
    (["invariants", HERE / "sl2_invariants.json"], 0),
    (["invariants", HERE / "quotient_borel.json"], 0),
    (["invariants", HERE / "quotient_non_normal.json"], 2),
    (["invariants", HERE / "induce_torus.json"], 0),
    (["invariants", HERE / "ind_identities.json"], 0),
]


def main_():
    runner = CliRunner()
    bad = 0
    for args, want in RUNS:
        args = [str(a) for a in args]
        res = runner.invoke(main, args)
        rep = json.loads(res.output)
        failing = [c["name"] for c in rep["checks"] if c["verdict"] != "pass"]
        err = rep.get("error", {}).get("type", "")
        mark = "ok " if res.exit_code == want else "BAD"
        bad += res.exit_code != want
        shown = " ".join(Path(a).name if "/" in a else a for a in args)
        print(f"{mark} exit={res.exit_code} {shown:<40} {err} {'; '.join(failing)}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main_())
