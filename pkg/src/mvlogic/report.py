"""Report rendering: delimited summaries plus figures saved to files.

Pipeline runs can be written out as a CSV summary, a JSON report, and one
figure per visualizable stage (attack graphs for argumentation stages,
fluent timelines for plan traces).  Matplotlib is imported lazily so the
reasoning path never pays for it.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .argumentation import ArgFramework
from .modal import Trace
from .orchestrator import PipelineResult, report_to_jsonable


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_af_graph(af: ArgFramework, path, highlight=frozenset()) -> Path:
    """Draw the attack graph; highlighted arguments (an extension) are
    filled darker."""
    import networkx as nx

    plt = _plt()
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(af.args))
    graph.add_edges_from(sorted(af.attacks))
    pos = nx.circular_layout(graph)
    colors = ["#2c7fb8" if a in highlight else "#c7e9b4" for a in graph.nodes]
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    nx.draw_networkx(
        graph,
        pos,
        ax=ax,
        node_color=colors,
        node_size=900,
        arrowsize=18,
        font_size=10,
    )
    ax.set_axis_off()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_trace_timeline(trace: Trace, path) -> Path:
    """Fluent presence across trace steps as a boolean grid."""
    plt = _plt()
    fluents = sorted({str(a) for state in trace.states for a in state})
    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(trace), 0.8 + 0.35 * len(fluents)))
    for row, name in enumerate(fluents):
        for col, state in enumerate(trace.states):
            present = any(str(a) == name for a in state)
            ax.scatter(
                col,
                row,
                marker="s",
                s=160,
                color="#2c7fb8" if present else "#eeeeee",
                edgecolors="#999999",
                linewidths=0.5,
            )
    ax.set_xticks(range(len(trace)))
    ax.set_xlabel("step")
    ax.set_yticks(range(len(fluents)))
    ax.set_yticklabels(fluents, fontsize=8)
    ax.set_xlim(-0.5, len(trace) - 0.5)
    ax.set_ylim(-0.5, len(fluents) - 0.5)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_pipeline_report(result: PipelineResult, out_dir) -> list[Path]:
    """Write report.json, report.csv, and stage figures; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    json_path = out_dir / "report.json"
    with open(json_path, "w", encoding="utf-8") as handle:
        json.dump(
            [report_to_jsonable(r) for r in result.reports], handle, indent=2
        )
        handle.write("\n")
    written.append(json_path)

    csv_path = out_dir / "report.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "stage", "status", "summary"])
        for i, report in enumerate(result.reports):
            status = "error" if report.error else "ok"
            writer.writerow([i, report.stage, status, report.error or report.summary])
    written.append(csv_path)

    for i, report in enumerate(result.reports):
        framework = report.outputs.get("_framework")
        if framework is not None:
            members = set()
            for ext in report.outputs.get("extensions", []):
                members.update(ext)
            written.append(
                render_af_graph(
                    framework, out_dir / f"stage{i}_{report.stage}.png", frozenset(members)
                )
            )
        trace = report.outputs.get("_trace")
        if trace is not None:
            written.append(
                render_trace_timeline(trace, out_dir / f"stage{i}_{report.stage}.png")
            )
    return written
