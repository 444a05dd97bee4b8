"""Per-tag precision/recall/F1, token accuracy, dataset comparison,
tag-count histograms, and a k-fold cross-validation harness.

Accuracy is token-level throughout; per-tag metrics are one-vs-rest
with the 0/0 -> 0 convention, and tags with neither gold nor predicted
instances are tracked separately so reports can render them as "---"
instead of a misleading 0.00.
"""

from __future__ import annotations

from dataclasses import dataclass

from dialectpos.corpus import Corpus, Tagset, kfold


@dataclass(frozen=True)
class TagMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    tagset: Tagset
    per_tag: dict[str, TagMetrics]
    token_accuracy: float
    absent_tags: frozenset[str]

    def to_tsv(self) -> str:
        """Per-tag table plus an accuracy row; absent tags render as ---."""
        lines = ["tag\tprecision\trecall\tf1\tsupport"]
        for tag in self.tagset.tags:
            if tag in self.absent_tags:
                lines.append(f"{tag}\t---\t---\t---\t0")
            else:
                m = self.per_tag[tag]
                lines.append(
                    f"{tag}\t{m.precision:.2f}\t{m.recall:.2f}\t{m.f1:.2f}\t{m.support}"
                )
        lines.append(f"accuracy\t{100.0 * self.token_accuracy:.2f}")
        return "\n".join(lines)


def _check_aligned(gold: Corpus, pred: Corpus) -> None:
    if gold.tagset != pred.tagset:
        raise ValueError("corpora use different tag inventories")
    if len(gold) != len(pred):
        raise ValueError(f"sentence counts differ: {len(gold)} vs {len(pred)}")
    for i, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise ValueError(f"sentence {i}: token counts differ")
        if g.gold_tags is None:
            raise ValueError(f"sentence {i}: missing gold tags")
        if p.pred_tags is None:
            raise ValueError(f"sentence {i}: missing predicted tags")


def _counts(gold: Corpus, pred: Corpus):
    tp = {t: 0 for t in gold.tagset}
    fp = {t: 0 for t in gold.tagset}
    fn = {t: 0 for t in gold.tagset}
    correct = total = 0
    for g, p in zip(gold, pred):
        for gt, pt in zip(g.gold_tags, p.pred_tags):
            total += 1
            if gt == pt:
                correct += 1
                tp[gt] += 1
            else:
                fn[gt] += 1
                fp[pt] += 1
    return tp, fp, fn, correct, total


def _report_from_counts(tagset: Tagset, tp, fp, fn, correct, total) -> EvalReport:
    per_tag = {}
    absent = set()
    for tag in tagset:
        support = tp[tag] + fn[tag]
        predicted = tp[tag] + fp[tag]
        if support == 0 and predicted == 0:
            absent.add(tag)
        precision = tp[tag] / predicted if predicted else 0.0
        recall = tp[tag] / support if support else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall else 0.0)
        per_tag[tag] = TagMetrics(precision, recall, f1, support)
    accuracy = correct / total if total else 0.0
    return EvalReport(tagset, per_tag, accuracy, frozenset(absent))


def score(gold: Corpus, pred: Corpus) -> EvalReport:
    """Score aligned corpora: per-tag one-vs-rest P/R/F1 and token accuracy."""
    _check_aligned(gold, pred)
    return _report_from_counts(gold.tagset, *_counts(gold, pred))


@dataclass(frozen=True)
class DifferenceTable:
    """Signed performance difference between two reports (b minus a)."""

    accuracy_a: float
    accuracy_b: float
    per_tag_f1_delta: dict[str, float]

    @property
    def accuracy_delta(self) -> float:
        return self.accuracy_b - self.accuracy_a

    def to_tsv(self) -> str:
        lines = [
            f"accuracy_a\t{100.0 * self.accuracy_a:.2f}",
            f"accuracy_b\t{100.0 * self.accuracy_b:.2f}",
            f"diff\t{100.0 * self.accuracy_delta:+.2f}",
        ]
        for tag, delta in self.per_tag_f1_delta.items():
            lines.append(f"f1_diff[{tag}]\t{delta:+.2f}")
        return "\n".join(lines)


def compare(report_a: EvalReport, report_b: EvalReport) -> DifferenceTable:
    """Accuracy delta and per-tag F1 deltas, signed (b minus a)."""
    if report_a.tagset != report_b.tagset:
        raise ValueError("reports use different tag inventories")
    deltas = {
        tag: report_b.per_tag[tag].f1 - report_a.per_tag[tag].f1
        for tag in report_a.tagset
    }
    return DifferenceTable(report_a.token_accuracy, report_b.token_accuracy, deltas)


def tag_histogram(corpus_a: Corpus, corpus_b: Corpus,
                  use_pred: bool = False) -> dict[str, tuple[int, int]]:
    """Per-tag (count_a, count_b) pairs from the selected tag channel."""
    if corpus_a.tagset != corpus_b.tagset:
        raise ValueError("corpora use different tag inventories")

    def count(corpus):
        counts = {t: 0 for t in corpus.tagset}
        for sentence in corpus:
            tags = sentence.pred_tags if use_pred else sentence.gold_tags
            if tags is None:
                channel = "pred" if use_pred else "gold"
                raise ValueError(f"sentence {sentence.source_id!r} has no {channel} tags")
            for tag in tags:
                counts[tag] += 1
        return counts

    a, b = count(corpus_a), count(corpus_b)
    return {tag: (a[tag], b[tag]) for tag in corpus_a.tagset}


def histogram_tsv(histogram: dict[str, tuple[int, int]],
                  label_a: str = "a", label_b: str = "b") -> str:
    lines = [f"tag\t{label_a}\t{label_b}"]
    for tag, (ca, cb) in histogram.items():
        lines.append(f"{tag}\t{ca}\t{cb}")
    return "\n".join(lines)


@dataclass(frozen=True)
class CrossValReport:
    aggregate: EvalReport
    folds: tuple[EvalReport, ...]

    def fold_accuracies(self) -> tuple[float, ...]:
        return tuple(r.token_accuracy for r in self.folds)


class FoldError(RuntimeError):
    """Trainer failure annotated with the fold it occurred in."""


def cross_validate(corpus: Corpus, trainer, k: int = 5, seed: int = 0) -> CrossValReport:
    """Train on each fold complement and score on the fold.

    ``trainer(train_corpus)`` must return a tagging function mapping a
    corpus to the same corpus with pred_tags filled.  The aggregate
    report pools token counts across folds (micro average).
    """
    folds = kfold(corpus, k, seed)
    reports = []
    tagset = corpus.tagset
    tp = {t: 0 for t in tagset}
    fp = {t: 0 for t in tagset}
    fn = {t: 0 for t in tagset}
    correct = total = 0
    for fold_no, (train_part, val_part) in enumerate(folds):
        try:
            tagger = trainer(train_part)
            predicted = tagger(val_part)
        except Exception as exc:
            raise FoldError(f"fold {fold_no}: {exc}") from exc
        _check_aligned(val_part, predicted)
        ftp, ffp, ffn, fcorrect, ftotal = _counts(val_part, predicted)
        reports.append(_report_from_counts(tagset, ftp, ffp, ffn, fcorrect, ftotal))
        for t in tagset:
            tp[t] += ftp[t]
            fp[t] += ffp[t]
            fn[t] += ffn[t]
        correct += fcorrect
        total += ftotal
    aggregate = _report_from_counts(tagset, tp, fp, fn, correct, total)
    return CrossValReport(aggregate, tuple(reports))
