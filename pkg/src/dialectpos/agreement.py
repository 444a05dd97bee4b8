"""Krippendorff's alpha for nominal labels over annotator-by-item tables.

Missing entries are allowed; items carrying fewer than two labels are
skipped (they contribute no pairable values).
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from dialectpos.corpus import Tagset


@dataclass(frozen=True)
class AgreementTable:
    """Sparse label matrix: (annotator_id, item_id) -> label."""

    items: tuple[str, ...]
    labels: dict[tuple[str, str], str]
    tagset: Tagset | None = None

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "labels", dict(self.labels))
        annotators = {a for a, _ in self.labels}
        if len(annotators) < 2:
            raise ValueError("agreement needs at least 2 annotators")
        known = set(self.items)
        for (annotator, item), label in self.labels.items():
            if item not in known:
                raise ValueError(f"label for unknown item {item!r}")
            if self.tagset is not None and label not in self.tagset:
                raise ValueError(f"label {label!r} not in inventory")

    def annotators(self) -> tuple[str, ...]:
        return tuple(sorted({a for a, _ in self.labels}))

    def item_labels(self, item: str) -> list[str]:
        return [lab for (_, it), lab in self.labels.items() if it == item]


def read_agreement_tsv(path, tagset: Tagset | None = None) -> AgreementTable:
    """Load ``annotator_id<TAB>item_id<TAB>label`` triples."""
    labels = {}
    items = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"line {line_no}: expected 3 fields, got {len(fields)}")
            annotator, item, label = fields
            if item not in seen:
                seen.add(item)
                items.append(item)
            labels[(annotator, item)] = label
    return AgreementTable(tuple(items), labels, tagset)


@dataclass(frozen=True)
class CoincidenceMatrix:
    """Symmetric label-by-label coincidence counts."""

    labels: tuple[str, ...]
    counts: np.ndarray

    def total_mass(self) -> float:
        return float(self.counts.sum())


def coincidence_matrix(table: AgreementTable) -> CoincidenceMatrix:
    """Build the coincidence matrix over pairable items.

    Each item with m >= 2 labels contributes 1/(m-1) for every ordered
    pair of labels from distinct annotators, so its total mass is m.
    """
    per_item = {}
    for (annotator, item), label in table.labels.items():
        per_item.setdefault(item, []).append(label)
    pairable = {it: labs for it, labs in per_item.items() if len(labs) >= 2}
    if not pairable:
        raise ValueError("no items with two or more labels")

    label_order = tuple(sorted({lab for labs in pairable.values() for lab in labs}))
    index = {lab: i for i, lab in enumerate(label_order)}
    counts = np.zeros((len(label_order), len(label_order)))
    for labs in pairable.values():
        w = 1.0 / (len(labs) - 1)
        for i, a in enumerate(labs):
            for j, b in enumerate(labs):
                if i != j:
                    counts[index[a], index[b]] += w
    return CoincidenceMatrix(label_order, counts)


def krippendorff_alpha(table: AgreementTable) -> float:
    """Nominal-distance Krippendorff's alpha, 1 - D_o/D_e.

    Returns a value in (-inf, 1].  When every pairable label falls in a
    single category the expected disagreement is zero; that degenerate
    case is reported as perfect agreement (1.0) with a warning.
    """
    coin = coincidence_matrix(table)
    n = coin.total_mass()
    counts = coin.counts
    marginals = counts.sum(axis=1)
    observed = float(n - np.trace(counts))  # off-diagonal mass
    expected = float((n * n - np.sum(marginals ** 2)) / (n - 1)) if n > 1 else 0.0
    if expected <= 0.0:
        warnings.warn(
            "all pairable labels fall in one category; "
            "alpha is degenerate and reported as 1.0",
            stacklevel=2,
        )
        return 1.0
    return 1.0 - observed / expected
