"""Figure construction from solver trace CSVs.

Three figure families over the trace schema
``r,ws_size,supp_size,e_size,tau_next,objective,inner_iters,cum_seconds``:
suboptimality against running time (log scale), support size against
iteration, and working-set size against iteration.  The module reads CSVs
only; it never invokes the solver, so it stays independently testable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

KINDS = ("suboptimality", "support", "working_set")

REQUIRED_COLUMNS = {
    "suboptimality": ("cum_seconds", "objective"),
    "support": ("r", "supp_size"),
    "working_set": ("r", "ws_size"),
}

# floor applied before log scaling so exact optima stay plottable
SUBOPT_FLOOR = 1e-12

AXIS_LABELS = {
    "suboptimality": ("seconds", "suboptimality"),
    "support": ("iteration", "support size"),
    "working_set": ("iteration", "working set size"),
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure: a kind, input traces, an output path, optional log y."""

    kind: str
    inputs: tuple
    output: Path | str
    log_scale: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


@dataclass
class Series:
    """One rendered curve."""

    label: str
    x: list = field(default_factory=list)
    y: list = field(default_factory=list)


def read_trace(path) -> dict[str, list[float]]:
    """Parse a trace CSV into columns; errors name the offending piece."""
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty CSV")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    columns: dict[str, list[float]] = {name: [] for name in reader.fieldnames}
    for row in rows:
        for name in reader.fieldnames:
            value = row.get(name)
            if value is None or value == "":
                raise ValueError(f"{path}: missing value in column {name!r}")
            columns[name].append(float(value))
    return columns


def _require(columns, names, path):
    for name in names:
        if name not in columns:
            raise ValueError(f"{path}: missing column {name!r}")


def suboptimality_series(traces: dict[str, dict]) -> list[Series]:
    """Objective minus the best value seen across all inputs, floored.

    The reference optimum is the global minimum over every row of every
    input, mirroring how multi-solver benchmarks anchor their curves.
    """
    floor = min(min(cols["objective"]) for cols in traces.values())
    out = []
    for label, cols in traces.items():
        y = [max(v - floor, SUBOPT_FLOOR) for v in cols["objective"]]
        out.append(Series(label=label, x=list(cols["cum_seconds"]), y=y))
    return out


def _load(spec: FigureSpec) -> dict[str, dict]:
    traces = {}
    for path in spec.inputs:
        cols = read_trace(path)
        _require(cols, REQUIRED_COLUMNS[spec.kind], path)
        traces[Path(path).stem] = cols
    return traces


def build_series(spec: FigureSpec) -> list[Series]:
    traces = _load(spec)
    if spec.kind == "suboptimality":
        return suboptimality_series(traces)
    xcol, ycol = REQUIRED_COLUMNS[spec.kind]
    return [Series(label=label, x=list(cols[xcol]), y=list(cols[ycol]))
            for label, cols in traces.items()]


def build_figure(spec: FigureSpec):
    """Figure with one curve per input and the termination point circled."""
    series = build_series(spec)
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    for run in series:
        (line,) = ax.plot(run.x, run.y, marker=".", label=run.label)
        ax.scatter([run.x[-1]], [run.y[-1]], s=140, marker="o",
                   facecolors="none", edgecolors=line.get_color(),
                   linewidths=1.5, zorder=3)
    if spec.kind == "suboptimality" or spec.log_scale:
        ax.set_yscale("log")
    xlabel, ylabel = AXIS_LABELS[spec.kind]
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(loc="best")
    fig.tight_layout()
    return fig, series


def render(spec: FigureSpec) -> list[Series]:
    """Write the figure for ``spec``; returns the plotted series."""
    fig, series = build_figure(spec)
    try:
        fig.savefig(spec.output)
    finally:
        plt.close(fig)
    return series
