"""One renderer per figure family; all numbers come straight from the table."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

from .schema import SchemaError, Table, read_table  # noqa: E402


@dataclass(frozen=True)
class FigureJob:
    inputs: tuple
    family: str
    output: str
    log_y: bool | None = None
    title: str = ""


@dataclass
class RenderResult:
    output: str
    n_curves: int
    series: dict = field(default_factory=dict)
    atom_height: float | None = None


def _finite(x, y):
    mask = np.isfinite(x) & np.isfinite(y)
    return x[mask], y[mask]


def _save(fig, job: FigureJob):
    Path(job.output).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(job.output, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_wc_outage(table: Table, job: FigureJob) -> RenderResult:
    table.require("delta_c", "upper_simple", "upper_lattice", "ml_exact", "ifsic_emp")
    x = table.column("delta_c")
    complement = table.metadata.get("complement", "0") == "1"
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    result = RenderResult(output=job.output, n_curves=0)
    envelopes = [("upper_simple", "--"), ("upper_lattice", "-.")]
    for name, style in envelopes:
        xs, ys = _finite(x, table.column(name))
        ax.plot(xs, ys, style, label=name)
        result.series[name] = (xs, ys)
        result.n_curves += 1
    xs, ys = _finite(x, table.column("ml_exact"))
    ax.plot(xs, ys, "-", label="ml_exact")
    result.series["ml_exact"] = (xs, ys)
    result.n_curves += 1
    xs, ys = _finite(x, table.column("ifsic_emp"))
    err = 3.0 * table.column("ifsic_stderr")[np.isfinite(x) & np.isfinite(table.column("ifsic_emp"))]
    ax.errorbar(xs, ys, yerr=err, fmt="o", ms=3.5, capsize=2, label="ifsic_emp")
    result.series["ifsic_emp"] = (xs, ys)
    result.n_curves += 1
    if job.log_y if job.log_y is not None else not complement:
        ax.set_yscale("log")
    ax.set_xlabel("gap to capacity [bits]")
    ax.set_ylabel("1 - worst-case outage" if complement else "worst-case outage")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    ax.set_title(job.title or f"c={table.metadata.get('c', '?')}")
    _save(fig, job)
    return result


def render_efficiency(table: Table, job: FigureJob) -> RenderResult:
    table.require("c")
    x = table.column("c")
    schemes = [name for name in table.columns if name.startswith("eta_")]
    if not schemes:
        raise SchemaError("missing column 'eta_*'")
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    result = RenderResult(output=job.output, n_curves=len(schemes))
    if len(x) == 1:
        heights = [table.column(s)[0] for s in schemes]
        ax.bar(range(len(schemes)), heights)
        ax.set_xticks(range(len(schemes)))
        ax.set_xticklabels([s[4:] for s in schemes], rotation=30, ha="right")
        for s, h in zip(schemes, heights):
            result.series[s] = (x, np.asarray([h]))
    else:
        for s in schemes:
            xs, ys = _finite(x, table.column(s))
            ax.plot(xs, ys, "o-", label=s[4:])
            result.series[s] = (xs, ys)
        ax.legend()
        ax.set_xlabel("mutual information [bits]")
    ax.set_ylabel("guaranteed efficiency")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.set_title(job.title or f"epsilon={table.metadata.get('epsilon', '?')}")
    _save(fig, job)
    return result


def render_mac_pdf(table: Table, job: FigureJob) -> RenderResult:
    table.require("r_lo", "r_hi", "density", "atom")
    lo = table.column("r_lo")
    hi = table.column("r_hi")
    density = table.column("density")
    atom = float(table.column("atom")[0])
    c_value = hi[-1]
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.bar(0.5 * (lo + hi), density, width=hi - lo, alpha=0.6, label="density")
    # the point mass sits at the sum capacity
    ax.plot([c_value], [atom], "r^", ms=10, label="atom")
    ax.vlines(c_value, 0.0, atom, colors="r", linestyles=":")
    ax.set_xlabel("symmetric-rate capacity [bits]")
    ax.set_ylabel("conditional density / mass")
    ax.legend()
    ax.grid(True, alpha=0.3)
    ax.set_title(job.title or f"c={table.metadata.get('c', '?')}")
    _save(fig, job)
    return RenderResult(
        output=job.output,
        n_curves=2,
        series={"density": (0.5 * (lo + hi), density), "atom": (np.asarray([c_value]), np.asarray([atom]))},
        atom_height=atom,
    )


def render_mac_bounds(table: Table, job: FigureJob) -> RenderResult:
    table.require("r", "lower", "upper")
    x = table.column("r")
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    result = RenderResult(output=job.output, n_curves=2)
    ax.fill_between(x, table.column("lower"), table.column("upper"), alpha=0.2, label="bracket")
    ax.plot(x, table.column("lower"), "-", label="lower")
    ax.plot(x, table.column("upper"), "-", label="upper")
    result.series["lower"] = (x, table.column("lower"))
    result.series["upper"] = (x, table.column("upper"))
    if "empirical" in table.columns:
        err = 3.0 * table.column("stderr") if "stderr" in table.columns else None
        ax.errorbar(x, table.column("empirical"), yerr=err, fmt="o", ms=3.5, capsize=2,
                    label="empirical")
        result.series["empirical"] = (x, table.column("empirical"))
        result.n_curves += 1
    ax.set_xlabel("target rate [bits]")
    ax.set_ylabel("conditional outage")
    ax.legend()
    ax.grid(True, alpha=0.3)
    ax.set_title(job.title or f"n_t={table.metadata.get('n_t', '?')}, c={table.metadata.get('c', '?')}")
    _save(fig, job)
    return result


def render_mac_outage(table: Table, job: FigureJob) -> RenderResult:
    table.require("r", "ml_exact")
    x = table.column("r")
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    result = RenderResult(output=job.output, n_curves=0)
    xs, ys = _finite(x, table.column("ml_exact"))
    ax.plot(xs, ys, "k-", label="ml_exact")
    result.series["ml_exact"] = (xs, ys)
    result.n_curves += 1
    for name in table.columns:
        if name.startswith("p_"):
            xs, ys = _finite(x, table.column(name))
            ax.plot(xs, ys, "o-", ms=3.5, label=name)
            result.series[name] = (xs, ys)
            result.n_curves += 1
    if job.log_y is None or job.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("target rate [bits]")
    ax.set_ylabel("conditional outage")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    ax.set_title(job.title or f"c={table.metadata.get('c', '?')}")
    _save(fig, job)
    return result


def render_mac_ergodic(table: Table, job: FigureJob) -> RenderResult:
    table.require("c_sum")
    x = table.column("c_sum")
    schemes = [name for name in table.columns if name.startswith("frac_")]
    if not schemes:
        raise SchemaError("missing column 'frac_*'")
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    result = RenderResult(output=job.output, n_curves=len(schemes))
    for s in schemes:
        xs, ys = _finite(x, table.column(s))
        ax.plot(xs, ys, "o-", label=s[5:])
        result.series[s] = (xs, ys)
    ax.set_xlabel("sum capacity [bits]")
    ax.set_ylabel("fraction of conditional ergodic capacity")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.3)
    ax.set_title(job.title)
    _save(fig, job)
    return result


FAMILIES = {
    "wc-outage": render_wc_outage,
    "efficiency": render_efficiency,
    "mac-pdf": render_mac_pdf,
    "mac-bounds": render_mac_bounds,
    "mac-outage": render_mac_outage,
    "mac-ergodic": render_mac_ergodic,
}


def render(job: FigureJob) -> RenderResult:
    """Validate the input table against the job's family and draw it."""
    if job.family not in FAMILIES:
        raise SchemaError(f"unknown figure family {job.family!r}")
    if len(job.inputs) != 1:
        raise SchemaError("each figure family renders exactly one table")
    table = read_table(job.inputs[0])
    actual = table.metadata.get("family")
    if actual != job.family:
        raise SchemaError(f"table family {actual!r} does not match job {job.family!r}")
    return FAMILIES[job.family](table, job)
