"""Bidirectional LSTM tagger with hand-derived backpropagation and Adam.

Kept deliberately minimal: word embeddings trained from scratch, one
recurrent layer per direction, per-sentence (batch size 1) updates, no
dropout or gradient clipping.  Each direction's four gate matrices are
stored stacked as one (E+H) x 4H array in gate order input, forget,
output, candidate; per-gate views are exposed as properties.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from dialectpos import modelio
from dialectpos.corpus import Corpus, TaggedSentence, Tagset

UNK = "<unk>"


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass
class LstmCell:
    """One direction's recurrent parameters, gates stacked column-wise."""

    w: np.ndarray  # (E + H, 4H)
    b: np.ndarray  # (4H,)

    @property
    def hidden_size(self) -> int:
        return self.w.shape[1] // 4

    def gate(self, name: str) -> np.ndarray:
        i = ("input", "forget", "output", "candidate").index(name)
        h = self.hidden_size
        return self.w[:, i * h:(i + 1) * h]


@dataclass
class BiLstmModel:
    vocab: dict[str, int]  # token -> embedding row; contains UNK
    embed: np.ndarray      # (V, E)
    forward_cell: LstmCell
    backward_cell: LstmCell
    out_proj: np.ndarray   # (2H, T)
    out_bias: np.ndarray   # (T,)
    tagset: Tagset

    def __post_init__(self):
        if UNK not in self.vocab:
            raise ValueError("vocabulary must contain the unknown token")
        for arr in self.parameters().values():
            if not np.all(np.isfinite(arr)):
                raise ValueError("model parameters must be finite")

    @property
    def embed_size(self) -> int:
        return self.embed.shape[1]

    @property
    def hidden_size(self) -> int:
        return self.forward_cell.hidden_size

    def parameters(self) -> dict[str, np.ndarray]:
        return {
            "embed": self.embed,
            "fwd_w": self.forward_cell.w,
            "fwd_b": self.forward_cell.b,
            "bwd_w": self.backward_cell.w,
            "bwd_b": self.backward_cell.b,
            "proj": self.out_proj,
            "proj_b": self.out_bias,
        }

    def token_ids(self, tokens) -> np.ndarray:
        unk = self.vocab[UNK]
        return np.array([self.vocab.get(t, unk) for t in tokens], dtype=np.intp)


def init_model(vocab_tokens, tagset: Tagset, embed_size: int = 32,
               hidden_size: int = 32, seed: int = 0) -> BiLstmModel:
    """Uniform(-0.1, 0.1) initialization of all parameters under seed."""
    rng = np.random.default_rng(seed)
    vocab = {UNK: 0}
    for token in vocab_tokens:
        vocab.setdefault(token, len(vocab))
    E, H, T = embed_size, hidden_size, len(tagset)
    u = lambda *shape: rng.uniform(-0.1, 0.1, shape)
    return BiLstmModel(
        vocab=vocab,
        embed=u(len(vocab), E),
        forward_cell=LstmCell(u(E + H, 4 * H), u(4 * H)),
        backward_cell=LstmCell(u(E + H, 4 * H), u(4 * H)),
        out_proj=u(2 * H, T),
        out_bias=u(T),
        tagset=tagset,
    )


def _run_direction(cell: LstmCell, xs: np.ndarray, reverse: bool):
    """One direction's recurrence; returns hidden states plus the cache
    needed for backpropagation (gate activations and cell states).

    The input contribution to all four gates is one batched product;
    only the hidden-to-hidden part is inherently sequential.
    """
    n, E = xs.shape
    H = cell.hidden_size
    order = range(n - 1, -1, -1) if reverse else range(n)
    xw = xs @ cell.w[:E] + cell.b
    wh = cell.w[E:]
    hs = np.zeros((n, H))
    gates = np.empty((n, 4 * H))
    c_prevs = np.empty((n, H))
    tanh_cs = np.empty((n, H))
    h_prevs = np.empty((n, H))
    h = np.zeros(H)
    c = np.zeros(H)
    for t in order:
        a = xw[t] + h @ wh
        sig = _sigmoid(a[:3 * H])
        g = np.tanh(a[3 * H:])
        i, f, o = sig[:H], sig[H:2 * H], sig[2 * H:]
        h_prevs[t] = h
        c_prevs[t] = c
        c = f * c + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        hs[t] = h
        gates[t, :3 * H] = sig
        gates[t, 3 * H:] = g
        tanh_cs[t] = tanh_c
    return hs, (gates, c_prevs, tanh_cs, h_prevs)


def _backprop_direction(cell: LstmCell, xs: np.ndarray, cache, dhs: np.ndarray,
                        reverse: bool):
    """BPTT through one direction; returns (dw, db, dxs)."""
    n, E = xs.shape
    H = cell.hidden_size
    gates, c_prevs, tanh_cs, h_prevs = cache
    wh = cell.w[E:]
    das = np.empty((n, 4 * H))
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    order = range(n) if reverse else range(n - 1, -1, -1)
    for t in order:
        i = gates[t, :H]
        f = gates[t, H:2 * H]
        o = gates[t, 2 * H:3 * H]
        g = gates[t, 3 * H:]
        tanh_c = tanh_cs[t]
        dh = dhs[t] + dh_next
        do = dh * tanh_c
        dc = dh * o * (1.0 - tanh_c ** 2) + dc_next
        da = das[t]
        da[:H] = dc * g * i * (1.0 - i)
        da[H:2 * H] = dc * c_prevs[t] * f * (1.0 - f)
        da[2 * H:3 * H] = do * o * (1.0 - o)
        da[3 * H:] = dc * i * (1.0 - g ** 2)
        dc_next = dc * f
        dh_next = wh @ da
    # Weight and input gradients batch over the whole sentence.
    dw = np.empty_like(cell.w)
    dw[:E] = xs.T @ das
    dw[E:] = h_prevs.T @ das
    db = das.sum(axis=0)
    dxs = das @ cell.w[:E].T
    return dw, db, dxs


def _hidden_states(model: BiLstmModel, tokens):
    xs = model.embed[model.token_ids(tokens)]
    h_fwd, _ = _run_direction(model.forward_cell, xs, reverse=False)
    h_bwd, _ = _run_direction(model.backward_cell, xs, reverse=True)
    return h_fwd, h_bwd


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def forward(model: BiLstmModel, tokens) -> np.ndarray:
    """Per-token tag probability rows (n x T); each row sums to one."""
    if not tokens:
        raise ValueError("empty token sequence")
    h_fwd, h_bwd = _hidden_states(model, tokens)
    logits = np.hstack([h_fwd, h_bwd]) @ model.out_proj + model.out_bias
    return _softmax_rows(logits)


def loss_and_gradients(model: BiLstmModel,
                       sentence: TaggedSentence) -> tuple[float, dict[str, np.ndarray]]:
    """Mean token cross-entropy and full-BPTT gradients for every parameter."""
    if sentence.gold_tags is None:
        raise ValueError("loss_and_gradients requires gold tags")
    ids = model.token_ids(sentence.tokens)
    xs = model.embed[ids]
    h_fwd, cache_f = _run_direction(model.forward_cell, xs, reverse=False)
    h_bwd, cache_b = _run_direction(model.backward_cell, xs, reverse=True)
    hidden = np.hstack([h_fwd, h_bwd])
    logits = hidden @ model.out_proj + model.out_bias
    probs = _softmax_rows(logits)

    n = len(ids)
    gold = np.array([model.tagset.index(t) for t in sentence.gold_tags])
    loss = float(-np.mean(np.log(probs[np.arange(n), gold])))

    dlogits = probs.copy()
    dlogits[np.arange(n), gold] -= 1.0
    dlogits /= n
    dproj = hidden.T @ dlogits
    dproj_b = dlogits.sum(axis=0)
    dhidden = dlogits @ model.out_proj.T
    H = model.hidden_size
    dw_f, db_f, dxs_f = _backprop_direction(
        model.forward_cell, xs, cache_f, dhidden[:, :H], reverse=False)
    dw_b, db_b, dxs_b = _backprop_direction(
        model.backward_cell, xs, cache_b, dhidden[:, H:], reverse=True)

    dembed = np.zeros_like(model.embed)
    np.add.at(dembed, ids, dxs_f + dxs_b)
    return loss, {
        "embed": dembed,
        "fwd_w": dw_f,
        "fwd_b": db_f,
        "bwd_w": dw_b,
        "bwd_b": db_b,
        "proj": dproj,
        "proj_b": dproj_b,
    }


@dataclass
class AdamState:
    """Bias-corrected first/second moment accumulators per parameter."""

    shapes: dict[str, tuple]
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for name, shape in self.shapes.items():
            self.m.setdefault(name, np.zeros(shape))
            self.v.setdefault(name, np.zeros(shape))

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.step_count += 1
        b1c = 1.0 - self.beta1 ** self.step_count
        b2c = 1.0 - self.beta2 ** self.step_count
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            params[name] -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


def train(corpus: Corpus, *, epochs: int = 40, lr: float = 0.001, seed: int = 0,
          embed_size: int = 32, hidden_size: int = 32) -> BiLstmModel:
    """Per-sentence Adam updates; deterministic under seed.

    The vocabulary is every token of the training corpus (min count 1)
    plus the unknown token; sentence order is reshuffled each epoch from
    the same seeded generator.
    """
    if len(corpus) == 0:
        raise ValueError("cannot train on an empty corpus")
    if not corpus.fully_gold_tagged():
        raise ValueError("training corpus must be fully gold-tagged")
    tokens = [t for s in corpus for t in s.tokens]
    model = init_model(tokens, corpus.tagset, embed_size, hidden_size, seed)
    params = model.parameters()
    adam = AdamState({name: p.shape for name, p in params.items()}, lr=lr)
    rng = np.random.default_rng(seed + 1)
    sentences = list(corpus.sentences)
    for _ in range(epochs):
        order = rng.permutation(len(sentences))
        for idx in order:
            _, grads = loss_and_gradients(model, sentences[idx])
            adam.step(params, grads)
    return model


def predict(model: BiLstmModel, corpus: Corpus) -> Corpus:
    """Per-token argmax of forward; ties break toward the lower tag index."""
    tagged = []
    for sentence in corpus:
        probs = forward(model, sentence.tokens)
        tags = [model.tagset.tags[int(i)] for i in np.argmax(probs, axis=1)]
        tagged.append(sentence.with_pred(tags))
    return Corpus(tuple(tagged), corpus.tagset)


def save(model: BiLstmModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(modelio.MAGIC + "\n")
        fh.write("type\tbilstm\n")
        fh.write("tags\t" + "\t".join(model.tagset.tags) + "\n")
        fh.write(f"dims\t{model.embed_size}\t{model.hidden_size}\n")
        by_index = sorted(model.vocab, key=model.vocab.get)
        modelio.write_lines(fh, "vocab", by_index)
        modelio.write_matrix(fh, "embed", model.embed)
        modelio.write_matrix(fh, "fwd_w", model.forward_cell.w)
        modelio.write_matrix(fh, "fwd_b", model.forward_cell.b)
        modelio.write_matrix(fh, "bwd_w", model.backward_cell.w)
        modelio.write_matrix(fh, "bwd_b", model.backward_cell.b)
        modelio.write_matrix(fh, "proj", model.out_proj)
        modelio.write_matrix(fh, "proj_b", model.out_bias)
        fh.write("end\n")


def load(path) -> BiLstmModel:
    reader = modelio.ModelReader(path)
    if reader.header("type")[0] != "bilstm":
        raise ValueError(f"{path}: not a bilstm model")
    tagset = Tagset(reader.header("tags"))
    _, _ = reader.header("dims")  # dims are recoverable from the arrays
    vocab = {token: i for i, token in enumerate(reader.section("vocab"))}
    embed = reader.matrix("embed")
    fwd = LstmCell(reader.matrix("fwd_w"), reader.matrix("fwd_b")[0])
    bwd = LstmCell(reader.matrix("bwd_w"), reader.matrix("bwd_b")[0])
    proj = reader.matrix("proj")
    proj_b = reader.matrix("proj_b")[0]
    return BiLstmModel(vocab, embed, fwd, bwd, proj, proj_b, tagset)
