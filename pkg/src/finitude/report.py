"""Delimited and figure output for verification reports."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def write_counts_csv(path: str | Path, rows) -> Path:
    """Write (bound, count) rows as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bound", "count"])
        for bound, count in rows:
            writer.writerow([bound, count])
    return path


def plot_count_growth(path: str | Path, rows, title: str) -> Path:
    """Render solution count against window bound."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    bounds = [b for b, _ in rows]
    counts = [c for _, c in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(bounds, counts, "o-", color="tab:blue")
    if len(bounds) > 1 and min(bounds) > 0 and max(bounds) / min(bounds) >= 10:
        ax.set_xscale("log")
        if min(counts) > 0 and max(counts) / max(min(counts), 1) >= 10:
            ax.set_yscale("log")
    ax.set_xlabel("window bound")
    ax.set_ylabel("solutions in window")
    ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def write_axioms_csv(path: str | Path, report) -> Path:
    """Summarize an axiom spot-check report as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "checked", "passed"])
        writer.writerow(["window-hit", report.hit_checked, report.hit_passed])
        writer.writerow(["residue-sweep", report.sweep_checked, report.sweep_passed])
        writer.writerow(["trapped-set", report.trap_checked, report.trap_passed])
    return path


def plot_axioms_summary(path: str | Path, report) -> Path:
    """Render checked-vs-passed bars for the three axiom spot checks."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = ["window-hit", "residue-sweep", "trapped-set"]
    checked = [report.hit_checked, report.sweep_checked, report.trap_checked]
    passed = [report.hit_passed, report.sweep_passed, report.trap_passed]
    xs = range(len(labels))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar([x - 0.2 for x in xs], checked, width=0.4, label="checked", color="tab:gray")
    ax.bar([x + 0.2 for x in xs], passed, width=0.4, label="passed", color="tab:green")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_ylabel("instances")
    ax.set_title(f"axiom spot checks: {report.oracle}", fontsize=10)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
