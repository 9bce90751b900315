"""Figure rendering for experiment reports: macro-F1 learning curves with
confidence bands, and the density/acceptance audit of the selection scan.

Rendering targets files only (Agg backend); the CSV/JSON report remains the
machine-readable boundary and figures are derived views of it.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be set first

from .harness import ExperimentReport

__all__ = ["plot_report"]


def _curve_figure(report: ExperimentReport, out_dir: Path) -> Path:
    budgets = sorted({a.budget for a in report.aggregates})
    configs = []
    for a in report.aggregates:
        label = "%s -> %s" % (a.selection_repr, a.classification_repr)
        if label not in configs:
            configs.append(label)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label in configs:
        xs, ys, los, his = [], [], [], []
        for a in report.aggregates:
            if "%s -> %s" % (a.selection_repr, a.classification_repr) != label:
                continue
            if a.mean is None:
                continue
            xs.append(a.budget)
            ys.append(a.mean)
            los.append(a.ci_low if a.ci_low is not None else a.mean)
            his.append(a.ci_high if a.ci_high is not None else a.mean)
        if not xs:
            continue
        ax.plot(xs, ys, marker="o", label=label)
        ax.fill_between(xs, los, his, alpha=0.2)
    ax.set_xlabel("budget (labeled instances)")
    ax.set_ylabel("macro-F1")
    ax.set_title("%s: macro-F1 vs budget (mean with 95%% CI)" % report.dataset)
    if len(budgets) > 1 and max(budgets) / max(1, min(budgets)) >= 8:
        ax.set_xscale("log", base=2)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    out = out_dir / "macro_f1_vs_budget.png"
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def _audit_figure(report: ExperimentReport, out_dir: Path) -> Path | None:
    first_fold = min((s.fold for s in report.selections), default=None)
    if first_fold is None:
        return None
    traces = [s for s in report.selections if s.fold == first_fold]
    fig, axes = plt.subplots(
        1, len(traces), figsize=(4.0 * len(traces), 3.6), squeeze=False
    )
    for ax, trace in zip(axes[0], traces):
        accepted = [a for a in trace.audit if a["accepted"]]
        rejected = [a for a in trace.audit if not a["accepted"]]
        if rejected:
            ax.scatter(
                [a["density"] for a in rejected],
                [a["diversity"] for a in rejected],
                s=12, alpha=0.5, label="rejected",
            )
        if accepted:
            ax.scatter(
                [a["density"] for a in accepted],
                [a["diversity"] for a in accepted],
                s=18, marker="^", label="accepted",
            )
        ax.axhline(trace.dist_min, linestyle="--", linewidth=1)
        ax.set_xlabel("density")
        ax.set_ylabel("diversity at decision")
        ax.set_title("%s (fold %d)" % (trace.selection_repr, trace.fold), fontsize=9)
        ax.legend(fontsize=7)
    out = out_dir / "selection_audit.png"
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def plot_report(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    """Render report figures into out_dir; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [_curve_figure(report, out_dir)]
    audit = _audit_figure(report, out_dir)
    if audit is not None:
        written.append(audit)
    return written
