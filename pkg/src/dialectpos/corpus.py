"""Data model and file I/O for tagged and untagged tweet corpora.

A corpus is an ordered list of sentences (one tweet each); the on-disk
format is tab-separated CoNLL style: one ``token<TAB>tag`` or bare
``token`` line per token, blank line after each sentence, UTF-8, LF.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

# The 28-tag default inventory: a Penn-Treebank subset observed on
# tweet corpora.  Order matters: it is the deterministic tie-break
# order used by the taggers.
DEFAULT_TAGS = (
    "CC", "CD", "DT", "EX", "IN", "JJ", "JJS", "MD", "NN", "NNP",
    "NNS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "TO", "UH", "VB",
    "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WRB",
)


class CoNLLFormatError(ValueError):
    """Malformed corpus file; carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class Tagset:
    """Ordered inventory of admissible tag names."""

    def __init__(self, tags=DEFAULT_TAGS):
        tags = tuple(tags)
        if len(set(tags)) != len(tags):
            raise ValueError("duplicate tags in inventory")
        if not tags:
            raise ValueError("empty tag inventory")
        self.tags = tags
        self._index = {t: i for i, t in enumerate(tags)}

    def __contains__(self, tag):
        return tag in self._index

    def __len__(self):
        return len(self.tags)

    def __iter__(self):
        return iter(self.tags)

    def __eq__(self, other):
        return isinstance(other, Tagset) and self.tags == other.tags

    def __hash__(self):
        return hash(self.tags)

    def __repr__(self):
        return f"Tagset({list(self.tags)!r})"

    def index(self, tag: str) -> int:
        try:
            return self._index[tag]
        except KeyError:
            raise ValueError(f"tag {tag!r} not in inventory") from None


DEFAULT_TAGSET = Tagset()


@dataclass(frozen=True)
class TaggedSentence:
    """One tweet: an ordered token sequence with optional gold/predicted tags."""

    tokens: tuple[str, ...]
    gold_tags: tuple[str, ...] | None = None
    pred_tags: tuple[str, ...] | None = None
    source_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("sentence has no tokens")
        if any(t == "" for t in self.tokens):
            raise ValueError("empty token in sentence")
        for name in ("gold_tags", "pred_tags"):
            tags = getattr(self, name)
            if tags is not None:
                tags = tuple(tags)
                object.__setattr__(self, name, tags)
                if len(tags) != len(self.tokens):
                    raise ValueError(
                        f"{name} has {len(tags)} entries for {len(self.tokens)} tokens"
                    )

    def __len__(self):
        return len(self.tokens)

    def with_pred(self, pred_tags) -> "TaggedSentence":
        return TaggedSentence(self.tokens, self.gold_tags, tuple(pred_tags), self.source_id)


@dataclass(frozen=True)
class Corpus:
    """Ordered sentence collection plus the tag inventory in force."""

    sentences: tuple[TaggedSentence, ...]
    tagset: Tagset = field(default_factory=lambda: DEFAULT_TAGSET)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for sent in self.sentences:
            for tags in (sent.gold_tags, sent.pred_tags):
                if tags is None:
                    continue
                for tag in tags:
                    if tag not in self.tagset:
                        raise ValueError(
                            f"tag {tag!r} (sentence {sent.source_id!r}) not in inventory"
                        )

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def num_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def fully_gold_tagged(self) -> bool:
        return all(s.gold_tags is not None for s in self.sentences)


def read_conll(path, tagset: Tagset = DEFAULT_TAGSET) -> Corpus:
    """Parse a CoNLL-style TSV file into a Corpus.

    Each non-blank line is ``token<TAB>tag`` or a bare ``token``; a blank
    line ends the current sentence.  Mixing tagged and untagged tokens
    within one sentence is an error, as is any tag outside the inventory.
    An empty file yields an empty corpus.
    """
    sentences = []
    tokens: list[str] = []
    tags: list[str | None] = []
    first_line = 0

    def flush(line_no):
        if not tokens:
            return
        tagged = [t is not None for t in tags]
        if any(tagged) and not all(tagged):
            raise CoNLLFormatError(
                "sentence mixes tagged and untagged tokens", first_line
            )
        gold = tuple(tags) if all(tagged) else None
        sentences.append(
            TaggedSentence(tuple(tokens), gold, source_id=f"s{len(sentences)}")
        )
        tokens.clear()
        tags.clear()

    with open(path, encoding="utf-8") as fh:
        line_no = 0
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line == "":
                flush(line_no)
                continue
            if not tokens:
                first_line = line_no
            fields = line.split("\t")
            if len(fields) == 1:
                token, tag = fields[0], None
            elif len(fields) == 2:
                token, tag = fields
                if tag == "":
                    raise CoNLLFormatError("empty tag field", line_no)
                if tag not in tagset:
                    raise CoNLLFormatError(f"tag {tag!r} not in inventory", line_no)
            else:
                raise CoNLLFormatError(
                    f"expected 1 or 2 tab-separated fields, got {len(fields)}", line_no
                )
            if token == "":
                raise CoNLLFormatError("empty token", line_no)
            tokens.append(token)
            tags.append(tag)
        flush(line_no + 1)

    return Corpus(tuple(sentences), tagset)


def write_conll(corpus: Corpus, path) -> None:
    """Write a corpus in the exact format accepted by read_conll.

    Gold tags are written when present, otherwise token-only lines; every
    sentence is followed by one blank line.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sent in corpus.sentences:
            if sent.gold_tags is not None:
                for token, tag in zip(sent.tokens, sent.gold_tags):
                    fh.write(f"{token}\t{tag}\n")
            else:
                for token in sent.tokens:
                    fh.write(f"{token}\n")
            fh.write("\n")


def split_holdout(corpus: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Deterministically shuffle and split into (train, heldout) parts.

    The train part receives round(train_fraction * N) sentences, rounding
    half away from zero; the parts are disjoint and jointly exhaustive.
    """
    n = len(corpus)
    if n < 2:
        raise ValueError("need at least 2 sentences to split")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    n_train = int(train_fraction * n + 0.5)
    train_idx, test_idx = order[:n_train], order[n_train:]
    pick = lambda idx: Corpus(tuple(corpus.sentences[i] for i in idx), corpus.tagset)
    return pick(train_idx), pick(test_idx)


def kfold(corpus: Corpus, k: int, seed: int) -> list[tuple[Corpus, Corpus]]:
    """Deterministic k-fold split: list of (train, validation) corpus pairs.

    Every sentence appears in exactly one validation fold; fold sizes
    differ by at most one.
    """
    n = len(corpus)
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise ValueError(f"corpus has {n} sentences, fewer than k={k}")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    base, extra = divmod(n, k)
    folds = []
    start = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        val_idx = set(order[start:start + size])
        start += size
        train = tuple(s for i, s in enumerate(corpus.sentences) if i not in val_idx)
        val = tuple(s for i, s in enumerate(corpus.sentences) if i in val_idx)
        folds.append((Corpus(train, corpus.tagset), Corpus(val, corpus.tagset)))
    return folds
