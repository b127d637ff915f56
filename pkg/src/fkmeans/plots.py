"""Figure rendering for the report-producing CLI paths.

All functions write PNG files and never open interactive windows (the Agg
backend is forced on import).  Misclassified objects are drawn in black,
after matching fitted labels to the ground truth with the best relabeling.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]
_MAX_MATCH_K = 8


def best_relabeling(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Relabel ``pred`` to maximize agreement with ``truth`` (both 1-based).

    Brute-force over permutations; falls back to the identity when the
    label count exceeds a small bound.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    k = int(max(pred.max(), truth.max()))
    if k > _MAX_MATCH_K:
        return pred
    best, best_hits = pred, -1
    for perm in itertools.permutations(range(1, k + 1)):
        mapped = np.array(perm)[pred - 1]
        hits = int((mapped == truth).sum())
        if hits > best_hits:
            best, best_hits = mapped, hits
    return best


def _scatter(ax, scores: np.ndarray, labels: np.ndarray, truth=None) -> None:
    scores = np.asarray(scores, dtype=float)
    if scores.shape[1] == 1:
        scores = np.column_stack([scores[:, 0], np.zeros(len(scores))])
    labels = np.asarray(labels)
    wrong = np.zeros(len(labels), dtype=bool)
    if truth is not None:
        wrong = best_relabeling(labels, np.asarray(truth)) != np.asarray(truth)
    for j in np.unique(labels):
        mask = (labels == j) & ~wrong
        ax.scatter(scores[mask, 0], scores[mask, 1], s=14,
                   color=_COLORS[(j - 1) % len(_COLORS)], label=f"cluster {j}")
    if wrong.any():
        ax.scatter(scores[wrong, 0], scores[wrong, 1], s=18, color="black",
                   label="misclassified")
    ax.set_xlabel("component 1")
    ax.set_ylabel("component 2")
    ax.legend(loc="best", fontsize=8)


def save_subspace_scatter(path, scores, labels, truth=None, title: str = "") -> Path:
    """Scatter of objects in a fitted 2-d (or 1-d) subspace, colored by cluster."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    _scatter(ax, scores, labels, truth)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_compare_figures(figdir, data: np.ndarray, results: dict,
                         truth=None) -> list[Path]:
    """One subspace scatter per method from a ``compare`` run.

    ``results`` maps method name to a dict with ``labels`` (1-based list)
    and optionally ``loading`` / ``scores``; methods without a subspace are
    drawn on the first two principal axes of the data.
    """
    figdir = Path(figdir)
    figdir.mkdir(parents=True, exist_ok=True)
    centered = data - data.mean(axis=0)
    written = []
    for method, res in results.items():
        if res.get("scores") is not None:
            scores = np.asarray(res["scores"])
        elif res.get("loading") is not None:
            scores = centered @ np.asarray(res["loading"])
        else:
            # No subspace of its own: project onto the top-2 principal axes.
            _, _, vt = np.linalg.svd(centered, full_matrices=False)
            scores = centered @ vt[:2].T
        written.append(save_subspace_scatter(
            figdir / f"{method}_subspace.png", scores[:, :2],
            np.asarray(res["labels"]), truth,
            title=f"{method} clustering in its fitted subspace"))
    return written


def save_consistency_figure(figdir, report) -> Path:
    """Loss and aligned-distance trends versus sample size."""
    figdir = Path(figdir)
    figdir.mkdir(parents=True, exist_ok=True)
    ns = [row.sample_size for row in report.rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.errorbar(ns, [r.distance_mean for r in report.rows],
                 yerr=[r.distance_sd for r in report.rows], marker="o")
    ax1.set_xscale("log")
    ax1.set_xlabel("sample size n")
    ax1.set_ylabel("aligned distance to reference fit")
    ax2.errorbar(ns, [r.loss_mean for r in report.rows],
                 yerr=[r.loss_sd for r in report.rows], marker="o", label="mean loss")
    ax2.axhline(report.reference_loss, ls="--", color="gray",
                label=f"reference (n={report.reference_n})")
    ax2.set_xscale("log")
    ax2.set_xlabel("sample size n")
    ax2.set_ylabel("best loss")
    ax2.legend(fontsize=8)
    fig.suptitle("Consistency trends")
    fig.tight_layout()
    path = figdir / "consistency_trends.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_slln_figure(figdir, table) -> Path:
    """Log-log decay of the uniform risk gap, with the fitted slope."""
    figdir = Path(figdir)
    figdir.mkdir(parents=True, exist_ok=True)
    ns = np.array([n for n, _ in table], dtype=float)
    gaps = np.array([g for _, g in table], dtype=float)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    ax.loglog(ns, gaps, marker="o")
    if len(ns) > 1 and (gaps > 0).all():
        slope = np.polyfit(np.log(ns), np.log(gaps), 1)[0]
        ax.set_title(f"sup gap decay (log-log slope {slope:.2f})")
    else:
        ax.set_title("sup gap decay")
    ax.set_xlabel("sample size n")
    ax.set_ylabel("sup |empirical - population risk|")
    fig.tight_layout()
    path = figdir / "slln_decay.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
