"""Report figures written to files (Agg backend, no display needed)."""
from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 3.6),
    "figure.dpi": 120,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


def _save(fig, out: Path) -> Path:
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(out, metadata={"Software": None})
    plt.close(fig)
    return out


def bar_counts(counts: Mapping[str, int], title: str, ylabel: str, out: Path,
               log: bool = False) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        labels = list(counts)
        ax.bar(labels, [counts[k] for k in labels], color="#4C72B0")
        if log:
            ax.set_yscale("log")
        ax.set_title(title)
        ax.set_ylabel(ylabel)
        for i, k in enumerate(labels):
            ax.annotate(str(counts[k]), (i, counts[k]), ha="center", va="bottom", fontsize=7)
        return _save(fig, out)


def length_distribution(label: str, lengths: Sequence[int], out: Path) -> Path:
    """Number of Weyl group elements of each length."""
    c = Counter(int(x) for x in lengths)
    xs = sorted(c)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(xs, [c[x] for x in xs], color="#55A868")
        ax.set_xlabel("length")
        ax.set_ylabel("elements")
        ax.set_title(f"{label}: elements by length")
        return _save(fig, out)


def kernel_dimensions(records: Sequence[dict], out: Path) -> Path:
    """Stacked histogram of kernel dimensions per case tag."""
    cases = sorted({r["case"] for r in records})
    dims = sorted({r["kernel_dim"] for r in records})
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        bottom = [0] * len(dims)
        for case in cases:
            c = Counter(r["kernel_dim"] for r in records if r["case"] == case)
            vals = [c[d] for d in dims]
            ax.bar([str(d) for d in dims], vals, bottom=bottom, label=case)
            bottom = [a + b for a, b in zip(bottom, vals)]
        ax.set_xlabel("dim ker M")
        ax.set_ylabel("matrices")
        ax.legend(frameon=False)
        return _save(fig, out)


def check_matrix(rows: Mapping[str, Mapping[str, tuple[int, int]]], out: Path) -> Path:
    """Grid of pass fractions: ``rows[type][check] = (failures, total)``."""
    types = list(rows)
    checks = sorted({c for r in rows.values() for c in r})
    data = [[(1 - rows[t][c][0] / rows[t][c][1]) if c in rows[t] and rows[t][c][1] else float("nan")
             for c in checks] for t in types]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        im = ax.imshow(data, vmin=0, vmax=1, cmap="RdYlGn", aspect="auto")
        ax.set_xticks(range(len(checks)), checks, rotation=30, ha="right")
        ax.set_yticks(range(len(types)), types)
        ax.grid(False)
        fig.colorbar(im, ax=ax, label="pass fraction")
        return _save(fig, out)
