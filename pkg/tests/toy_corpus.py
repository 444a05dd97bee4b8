"""Deterministic toy corpus generators for training and acceptance runs.

Sentences come from fixed templates over small word pools.  The main
grammar produces gold-tagged MAE tweets dense in dialect-rule targets;
the transition grammar produces a corpus in which pronouns are always
followed by present-tense verbs and several surfaces are tag-ambiguous,
so transition weights have to carry real signal.
"""

from __future__ import annotations

import random

from dialectpos.corpus import Corpus, DEFAULT_TAGSET, TaggedSentence, Tagset

POOLS = {
    "NN": ["dog", "day", "food", "man", "woman", "car", "house", "phone",
           "game", "plan", "story", "money", "way", "block"],
    "NNS": ["dogs", "days", "games", "shoes", "apples", "books"],
    "NNP": ["John", "Mary", "Tasha", "Darnell", "Chicago", "Atlanta"],
    "JJ": ["good", "bad", "real", "fine", "hot", "cool", "smart", "right"],
    "VBP": ["like", "want", "know", "see", "need", "play", "wait", "look"],
    "VBZ": ["likes", "wants", "knows", "sees", "needs", "plays"],
    "VBZ_MOTION": ["runs", "walks", "moves"],
    "VBD": ["liked", "played", "saw", "made", "told"],
    "VBG": ["sleeping", "getting", "playing", "running", "talking"],
    "VB": ["sleep", "go", "play", "run", "eat", "win"],
    "MD": ["can", "will", "must", "should"],
    "DT": ["the", "this", "that", "a", "every"],
    "PRP_PL": ["they", "you", "we"],
    "PRP_SG": ["he", "she"],
    "PRP_OBJ": ["them", "it", "her"],
    "PRP$": ["his", "her", "my", "their"],
    "IN": ["for", "in", "on", "at", "with", "than"],
    "RB": ["just", "never", "really", "always"],
    "RBR": ["better", "more", "faster", "harder"],
    "CC": ["and", "but", "though"],
    "RP": ["about", "through"],
    "CD": ["two", "three", "four", "five"],
}

# Each template is a sequence of slots; a slot is either (pool, tag) or a
# fixed (word, tag) literal marked by a leading '='.
TEMPLATES = [
    [("PRP_PL", "PRP"), ("VBP", "VBP"), ("DT", "DT"), ("JJ", "JJ"), ("NN", "NN")],
    [("DT", "DT"), ("NN", "NN"), ("=is", "VBZ"), ("JJ", "JJ")],
    [("PRP_PL", "PRP"), ("=are", "VBP"), ("VBG", "VBG")],
    [("PRP_PL", "PRP"), ("MD", "MD"), ("VB", "VB"), ("DT", "DT"), ("NN", "NN")],
    [("PRP_PL", "PRP"), ("RB", "RB"), ("VBD", "VBD"), ("DT", "DT"), ("NN", "NN")],
    [("PRP_PL", "PRP"), ("VBP", "VBP"), ("=for", "IN"), ("DT", "DT"), ("NN", "NN")],
    [("DT", "DT"), ("NN", "NN"), ("=is", "VBZ"), ("IN", "IN"), ("DT", "DT"), ("NN", "NN")],
    [("PRP_PL", "PRP"), ("VBP", "VBP"), ("RBR", "RBR"), ("=than", "IN"), ("PRP_OBJ", "PRP")],
    [("DT", "DT"), ("NN", "NN"), ("=that", "WDT"), ("PRP_PL", "PRP"), ("VBP", "VBP")],
    [("PRP_PL", "PRP"), ("VBP", "VBP"), ("=to", "TO"), ("VB", "VB")],
    [("PRP_SG", "PRP"), ("=has", "VBZ"), ("=a", "DT"), ("NN", "NN")],
    [("PRP_SG", "PRP"), ("=already", "RB"), ("=did", "VBD"), ("DT", "DT"), ("NN", "NN")],
    [("PRP_PL", "PRP"), ("=have", "VBP"), ("=already", "RB"), ("=done", "VBN"), ("DT", "DT"), ("NN", "NN")],
    [("PRP_SG", "PRP"), ("=is", "VBZ"), ("=on", "IN"), ("=her", "PRP$"), ("=way", "NN")],
    [("PRP_SG", "PRP"), ("=doesn't", "VBZ"), ("VB", "VB")],
    [("=you're", "PRP"), ("JJ", "JJ")],
    [("=how", "WRB"), ("JJ", "JJ"), ("=is", "VBZ"), ("DT", "DT"), ("NN", "NN")],
    [("=there", "EX"), ("=is", "VBZ"), ("=a", "DT"), ("NN", "NN")],
    [("PRP_PL", "PRP"), ("=are", "VBP"), ("VBG", "VBG"), ("DT", "DT"), ("NN", "NN")],
    [("DT", "DT"), ("NN", "NN"), ("=and", "CC"), ("DT", "DT"), ("NN", "NN"), ("VBP", "VBP")],
    [("NNP", "NNP"), ("VBZ", "VBZ"), ("CD", "CD"), ("NNS", "NNS")],
    [("PRP_SG", "PRP"), ("VBZ_MOTION", "VBZ"), ("RP", "RP")],
    [("=what's", "UH"), ("=up", "UH"), ("NN", "NN")],
    [("=because", "IN"), ("PRP_PL", "PRP"), ("VBP", "VBP"), ("DT", "DT"), ("NN", "NN")],
    [("=but", "CC"), ("PRP_PL", "PRP"), ("VBP", "VBP"), ("PRP_OBJ", "PRP")],
    [("=this", "DT"), ("NN", "NN"), ("=is", "VBZ"), ("RB", "RB"), ("JJ", "JJ")],
    [("=that", "DT"), ("NN", "NN"), ("=is", "VBZ"), ("JJ", "JJ")],
    [("PRP_PL", "PRP"), ("VBP", "VBP"), ("DT", "DT"), ("NNS", "NNS")],
]


def _fill(template, rng) -> TaggedSentence:
    tokens, tags = [], []
    for slot, tag in template:
        if slot.startswith("="):
            tokens.append(slot[1:])
        else:
            tokens.append(rng.choice(POOLS[slot]))
        tags.append(tag)
    return TaggedSentence(tuple(tokens), tuple(tags))


def generate_mae_corpus(n_sentences: int, seed: int = 0) -> Corpus:
    rng = random.Random(seed)
    sentences = []
    for i in range(n_sentences):
        sent = _fill(rng.choice(TEMPLATES), rng)
        sentences.append(TaggedSentence(sent.tokens, sent.gold_tags, source_id=f"s{i}"))
    return Corpus(tuple(sentences), DEFAULT_TAGSET)


AMBIGUOUS = ["run", "play", "move", "work", "look"]


def generate_transition_corpus(n_sentences: int, seed: int = 0,
                               pronoun_share: float = 0.7) -> Corpus:
    """Corpus in which pronouns are always followed by present-tense verbs.

    The verb surfaces double as nouns after determiners, so identity
    features cannot separate VBP from NN and the transition weights must
    carry the signal; pronoun sentences dominate, while determiner
    contexts are split across several continuations.
    """
    tagset = Tagset(("PRP", "VBP", "DT", "NN", "VBD", "JJ"))
    rng = random.Random(seed)
    sentences = []
    plains = ["day", "game", "car", "house"]
    adjs = ["cool", "real", "bad"]
    for i in range(n_sentences):
        verb = rng.choice(AMBIGUOUS)
        noun = rng.choice(AMBIGUOUS)
        plain = rng.choice(plains)
        adj = rng.choice(adjs)
        prp = rng.choice(["they", "you", "we"])
        kind = rng.random()
        if rng.random() < pronoun_share:
            if kind < 0.4:
                words, tags = f"{prp} {verb}", "PRP VBP"
            elif kind < 0.7:
                words, tags = f"{prp} {verb} the {plain}", "PRP VBP DT NN"
            else:
                words, tags = f"{prp} {verb} the {adj} {plain}", "PRP VBP DT JJ NN"
        else:
            if kind < 0.4:
                words, tags = f"the {noun} played", "DT NN VBD"
            elif kind < 0.7:
                words, tags = f"the {adj} {noun}", "DT JJ NN"
            else:
                words, tags = f"the {plain} played the {noun}", "DT NN VBD DT NN"
        sentences.append(
            TaggedSentence(tuple(words.split()), tuple(tags.split()),
                           source_id=f"t{i}")
        )
    return Corpus(tuple(sentences), tagset)
