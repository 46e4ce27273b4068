import os
import subprocess
import sys
from pathlib import Path

import pytest

PRIMARY_SRC = Path(__file__).resolve().parents[2] / "src"

TRACE_HEADER = "r,ws_size,supp_size,e_size,tau_next,objective,inner_iters,cum_seconds"


def write_trace(path, rows):
    lines = [TRACE_HEADER]
    for row in rows:
        lines.append(",".join(str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
    return Path(path)


def make_rows(count, objective_start=1.0, decay=0.5, ws=50):
    rows = []
    obj = objective_start
    for r in range(1, count + 1):
        rows.append((r, ws, 5 + r, max(20 - 4 * r, 0), 8, f"{obj:.17g}", 30,
                     f"{0.01 * r:.17g}"))
        obj *= decay
    return rows


def run_solver_cli(*argv, cwd=None):
    """Invoke the solver package through its command-line interface."""
    env = dict(os.environ)
    env["PYTHONPATH"] = str(PRIMARY_SRC) + os.pathsep + env.get("PYTHONPATH", "")
    return subprocess.run(
        [sys.executable, "-m", "dwslasso", *map(str, argv)],
        capture_output=True, text=True, env=env, cwd=cwd)


@pytest.fixture(scope="session")
def solver_cli_available():
    probe = run_solver_cli("--help")
    if probe.returncode != 0:
        pytest.skip("solver command line not importable")
    return True
