"""Dialect-aware part-of-speech tagging toolkit.

Provides corpus I/O, tweet preprocessing, a rule-based MAE/AAE
transformation engine, linear-chain CRF and Bi-LSTM taggers, per-tag
evaluation, Krippendorff's alpha, and a human-in-the-loop annotation
service with an HTTP API.
"""

from dialectpos.corpus import Corpus, TaggedSentence, Tagset, DEFAULT_TAGSET

__version__ = "0.1.0"

__all__ = ["Corpus", "TaggedSentence", "Tagset", "DEFAULT_TAGSET", "__version__"]
