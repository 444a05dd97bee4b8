"""Figure rendering for report outputs.

The report path writes matplotlib figures to files next to the
delimited tables; nothing here is interactive.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_tag_histogram(histogram: dict[str, tuple[int, int]], path,
                       label_a: str = "a", label_b: str = "b") -> None:
    """Grouped per-tag count bars for two corpora, written to an image file."""
    tags = list(histogram)
    counts_a = [histogram[t][0] for t in tags]
    counts_b = [histogram[t][1] for t in tags]
    x = np.arange(len(tags))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6.0, 0.42 * len(tags)), 4.0))
    ax.bar(x - width / 2, counts_a, width, label=label_a)
    ax.bar(x + width / 2, counts_b, width, label=label_b)
    ax.set_xticks(x)
    ax.set_xticklabels(tags, rotation=90, fontsize=8)
    ax.set_ylabel("tag count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
