"""Linear-chain CRF tagger with hand-crafted features.

State features fire per (feature, tag) pair; transitions are a dense
TxT matrix over the tag inventory, so unseen tag bigrams also receive
learned (typically negative) weights.  Training is full-batch gradient
descent on the regularized negative log-likelihood with a proximal
soft-threshold step for the L1 penalty.  All chain computations run in
log space with the max-shift trick.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dialectpos import modelio
from dialectpos.corpus import Corpus, TaggedSentence, Tagset

FeatureVector = dict[str, float]


def extract_features(sentence: TaggedSentence, position: int) -> FeatureVector:
    """Feature template for one token position.

    Lowercased identity, prefixes/suffixes of length 1-3, shape flags,
    lowercased neighbor identities, and BOS/EOS boundary markers.
    """
    tokens = sentence.tokens
    if not 0 <= position < len(tokens):
        raise IndexError(f"position {position} out of range for {len(tokens)} tokens")
    token = tokens[position]
    low = token.lower()
    feats: FeatureVector = {f"w[0]={low}": 1.0}
    for k in (1, 2, 3):
        if len(low) >= k:
            feats[f"prefix{k}={low[:k]}"] = 1.0
            feats[f"suffix{k}={low[-k:]}"] = 1.0
    if token.isupper():
        feats["is_upper"] = 1.0
    if token.istitle():
        feats["is_title"] = 1.0
    if token.isdigit():
        feats["is_digit"] = 1.0
    if position == 0:
        feats["BOS"] = 1.0
    else:
        feats[f"w[-1]={tokens[position - 1].lower()}"] = 1.0
    if position == len(tokens) - 1:
        feats["EOS"] = 1.0
    else:
        feats[f"w[+1]={tokens[position + 1].lower()}"] = 1.0
    return feats


@dataclass
class CrfModel:
    """Tag inventory, sparse state weights, and a dense transition matrix."""

    tagset: Tagset
    feature_ids: tuple[str, ...]
    state: np.ndarray        # (num_features, T)
    transitions: np.ndarray  # (T, T), row = from-tag, column = to-tag
    l1: float = 0.25
    l2: float = 0.3

    def __post_init__(self):
        T = len(self.tagset)
        if self.transitions.shape != (T, T):
            raise ValueError("transition matrix must be TxT over the tag inventory")
        if self.state.shape != (len(self.feature_ids), T):
            raise ValueError("state weight matrix shape does not match feature ids")
        if self.l1 < 0 or self.l2 < 0:
            raise ValueError("regularization strengths must be non-negative")
        self.feature_index = {f: i for i, f in enumerate(self.feature_ids)}

    @classmethod
    def zeros(cls, tagset: Tagset, feature_ids, l1: float = 0.25, l2: float = 0.3):
        feature_ids = tuple(feature_ids)
        T = len(tagset)
        return cls(tagset, feature_ids, np.zeros((len(feature_ids), T)),
                   np.zeros((T, T)), l1, l2)

    def state_weight(self, feature_id: str, tag: str) -> float:
        i = self.feature_index.get(feature_id)
        if i is None:
            return 0.0
        return float(self.state[i, self.tagset.index(tag)])

    def state_weights_sparse(self) -> dict[tuple[str, str], float]:
        out = {}
        rows, cols = np.nonzero(self.state)
        for r, c in zip(rows, cols):
            out[(self.feature_ids[r], self.tagset.tags[c])] = float(self.state[r, c])
        return out


@dataclass
class CrfGradient:
    state: np.ndarray
    transitions: np.ndarray


def _logsumexp(x: np.ndarray, axis: int) -> np.ndarray:
    m = np.max(x, axis=axis, keepdims=True)
    return np.squeeze(m, axis=axis) + np.log(np.sum(np.exp(x - m), axis=axis))


def _feature_indices(model: CrfModel, sentence: TaggedSentence) -> list[np.ndarray]:
    """Per-position arrays of known feature indices (unknown features score 0)."""
    idx = model.feature_index
    out = []
    for pos in range(len(sentence)):
        known = [idx[f] for f in extract_features(sentence, pos) if f in idx]
        out.append(np.array(known, dtype=np.intp))
    return out


def _emissions(model: CrfModel, fidx: list[np.ndarray]) -> np.ndarray:
    T = len(model.tagset)
    emit = np.zeros((len(fidx), T))
    for i, rows in enumerate(fidx):
        if len(rows):
            emit[i] = model.state[rows].sum(axis=0)
    return emit


def _forward(emit: np.ndarray, trans: np.ndarray) -> np.ndarray:
    alpha = np.empty_like(emit)
    alpha[0] = emit[0]
    for i in range(1, len(emit)):
        alpha[i] = emit[i] + _logsumexp(alpha[i - 1][:, None] + trans, axis=0)
    return alpha


def _backward(emit: np.ndarray, trans: np.ndarray) -> np.ndarray:
    beta = np.zeros_like(emit)
    for i in range(len(emit) - 2, -1, -1):
        beta[i] = _logsumexp(trans + (emit[i + 1] + beta[i + 1])[None, :], axis=1)
    return beta


def log_partition(model: CrfModel, sentence: TaggedSentence) -> float:
    """log Z(x): log-sum over all T^n tag paths of exp(path score)."""
    if len(sentence) == 0:
        raise ValueError("empty sentence")
    emit = _emissions(model, _feature_indices(model, sentence))
    alpha = _forward(emit, model.transitions)
    return float(_logsumexp(alpha[-1], axis=0))


def viterbi(model: CrfModel, sentence: TaggedSentence) -> tuple[list[str], float]:
    """Maximum-score tag path and its score.

    Ties break toward the lower tag index, applied at the final position
    and at every backpointer.
    """
    emit = _emissions(model, _feature_indices(model, sentence))
    trans = model.transitions
    n, T = emit.shape
    trellis = np.empty((n, T))
    back = np.zeros((n, T), dtype=np.intp)
    trellis[0] = emit[0]
    for i in range(1, n):
        scores = trellis[i - 1][:, None] + trans
        back[i] = np.argmax(scores, axis=0)
        trellis[i] = emit[i] + np.max(scores, axis=0)
    last = int(np.argmax(trellis[-1]))
    path = [last]
    for i in range(n - 1, 0, -1):
        path.append(int(back[i, path[-1]]))
    path.reverse()
    tags = [model.tagset.tags[t] for t in path]
    return tags, float(trellis[-1, last])


def _encode_gold(model: CrfModel, sentence: TaggedSentence) -> np.ndarray:
    return np.array([model.tagset.index(t) for t in sentence.gold_tags], dtype=np.intp)


def nll_and_gradient(model: CrfModel, batch: Corpus) -> tuple[float, CrfGradient]:
    """Regularized negative log-likelihood of the batch and its gradient.

    loss = sum over sentences of [log Z(x) - score(gold path)] plus
    l2 * ||w||^2; the gradient is expected minus empirical feature counts
    plus 2 * l2 * w.  The L1 penalty is handled by the optimizer's
    proximal step, not here.
    """
    if not batch.fully_gold_tagged():
        raise ValueError("nll_and_gradient requires a fully gold-tagged batch")
    encoded = [(_feature_indices(model, s), _encode_gold(model, s)) for s in batch]
    return _nll_grad_encoded(model, encoded)


def _nll_grad_encoded(model: CrfModel, encoded) -> tuple[float, CrfGradient]:
    trans = model.transitions
    grad_state = np.zeros_like(model.state)
    grad_trans = np.zeros_like(trans)
    loss = 0.0
    for fidx, gold in encoded:
        emit = _emissions(model, fidx)
        n, T = emit.shape
        alpha = _forward(emit, trans)
        beta = _backward(emit, trans)
        log_z = float(_logsumexp(alpha[-1], axis=0))

        gold_score = float(emit[np.arange(n), gold].sum())
        if n > 1:
            gold_score += float(trans[gold[:-1], gold[1:]].sum())
        loss += log_z - gold_score

        marginals = np.exp(alpha + beta - log_z)      # (n, T)
        delta = marginals
        delta[np.arange(n), gold] -= 1.0              # expected - empirical
        for i, rows in enumerate(fidx):
            if len(rows):
                grad_state[rows] += delta[i]
        for i in range(1, n):
            pair = np.exp(alpha[i - 1][:, None] + trans
                          + (emit[i] + beta[i])[None, :] - log_z)
            grad_trans += pair
            grad_trans[gold[i - 1], gold[i]] -= 1.0

    loss += model.l2 * (float(np.sum(model.state ** 2))
                        + float(np.sum(trans ** 2)))
    grad_state += 2.0 * model.l2 * model.state
    grad_trans += 2.0 * model.l2 * trans
    return loss, CrfGradient(grad_state, grad_trans)


def _soft_threshold(w: np.ndarray, amount: float) -> None:
    # Proximal L1 step; shrinks toward zero and never crosses it.
    w[:] = np.sign(w) * np.maximum(np.abs(w) - amount, 0.0)


def corpus_feature_ids(corpus: Corpus) -> tuple[str, ...]:
    """All feature ids occurring in the corpus, in first-seen order."""
    seen: dict[str, None] = {}
    for sentence in corpus:
        for pos in range(len(sentence)):
            for fid in extract_features(sentence, pos):
                seen.setdefault(fid)
    return tuple(seen)


def train(corpus: Corpus, *, l1: float = 0.25, l2: float = 0.3, epochs: int = 40,
          step_size: float = 0.5, seed: int = 0) -> CrfModel:
    """Full-batch gradient descent with a proximal soft-threshold L1 step.

    The batch gradient is averaged over sentences so step_size is
    corpus-size independent; this rescales the objective by a constant
    and leaves its minimizer unchanged.  Weights start at zero, so the
    run is deterministic (the seed is accepted for interface symmetry
    with the recurrent tagger).
    """
    del seed  # training is deterministic from zero initialization
    if len(corpus) == 0:
        raise ValueError("cannot train on an empty corpus")
    if not corpus.fully_gold_tagged():
        raise ValueError("training corpus must be fully gold-tagged")
    model = CrfModel.zeros(corpus.tagset, corpus_feature_ids(corpus), l1, l2)
    encoded = [(_feature_indices(model, s), _encode_gold(model, s)) for s in corpus]
    step = step_size / len(corpus)
    for _ in range(epochs):
        _, grad = _nll_grad_encoded(model, encoded)
        model.state -= step * grad.state
        model.transitions -= step * grad.transitions
        _soft_threshold(model.state, step * l1)
        _soft_threshold(model.transitions, step * l1)
    return model


def predict(model: CrfModel, corpus: Corpus) -> Corpus:
    """Fill pred_tags of every sentence by Viterbi decoding; gold untouched."""
    tagged = tuple(s.with_pred(viterbi(model, s)[0]) for s in corpus)
    return Corpus(tagged, corpus.tagset)


@dataclass(frozen=True)
class TransitionReport:
    """Ranked likely/unlikely tag transitions with their learned weights."""

    positive: tuple[tuple[str, str, float], ...]  # descending by weight
    negative: tuple[tuple[str, str, float], ...]  # ascending by weight

    def format(self, decimals: int = 3) -> str:
        lines = [f"top {len(self.positive)} likely transitions:"]
        lines += [f"{a} -> {b}\t{w:.{decimals}f}" for a, b, w in self.positive]
        lines.append(f"top {len(self.negative)} unlikely transitions:")
        lines += [f"{a} -> {b}\t{w:.{decimals}f}" for a, b, w in self.negative]
        return "\n".join(lines)


def top_transitions(model: CrfModel, k: int) -> TransitionReport:
    """The k highest-weight and k lowest-weight tag transitions."""
    T = len(model.tagset)
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > T * T:
        raise ValueError(f"k={k} exceeds the {T * T} transitions in the matrix")
    tags = model.tagset.tags
    entries = [
        (tags[a], tags[b], float(model.transitions[a, b]))
        for a in range(T)
        for b in range(T)
    ]
    by_weight = sorted(entries, key=lambda e: (-e[2], tags.index(e[0]), tags.index(e[1])))
    positive = tuple(by_weight[:k])
    negative = tuple(sorted(by_weight[-k:], key=lambda e: (e[2], tags.index(e[0]),
                                                           tags.index(e[1]))))
    return TransitionReport(positive, negative)


def save(model: CrfModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(modelio.MAGIC + "\n")
        fh.write("type\tcrf\n")
        fh.write("tags\t" + "\t".join(model.tagset.tags) + "\n")
        fh.write(f"l1\t{float(model.l1)!r}\n")
        fh.write(f"l2\t{float(model.l2)!r}\n")
        modelio.write_matrix(fh, "transitions", model.transitions)
        weights = []
        rows, cols = np.nonzero(model.state)
        for r, c in zip(rows, cols):
            weights.append(
                f"{model.feature_ids[r]}\t{model.tagset.tags[c]}"
                f"\t{float(model.state[r, c])!r}"
            )
        modelio.write_lines(fh, "state_weights", weights)
        fh.write("end\n")


def load(path) -> CrfModel:
    reader = modelio.ModelReader(path)
    if reader.header("type")[0] != "crf":
        raise ValueError(f"{path}: not a crf model")
    tagset = Tagset(reader.header("tags"))
    l1 = float(reader.header("l1")[0])
    l2 = float(reader.header("l2")[0])
    transitions = reader.matrix("transitions")
    entries = []
    for row in reader.section("state_weights"):
        fid, tag, weight = row.split("\t")
        entries.append((fid, tag, float(weight)))
    feature_ids = tuple(dict.fromkeys(fid for fid, _, _ in entries))
    model = CrfModel.zeros(tagset, feature_ids, l1, l2)
    model.transitions = transitions
    for fid, tag, weight in entries:
        model.state[model.feature_index[fid], tagset.index(tag)] = weight
    return model
