"""Tweet denoising and tokenization.

Normalization shortens exaggerated letter runs, drops @-handles whole,
strips punctuation and emoji, and collapses whitespace, so that only
non-standard spellings and lexical items reach the taggers.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

# Apostrophes survive punctuation stripping when flanked by letters or
# digits: they are lexical in forms like "what's".
APOSTROPHES = frozenset({"'", "’"})

# Unicode block ranges treated as emoji: emoticons, pictographs,
# transport, supplemental symbols, flags, plus the joiners/selectors
# that glue emoji sequences together.
DEFAULT_EMOJI_RANGES = (
    (0x1F300, 0x1F5FF),  # misc symbols and pictographs
    (0x1F600, 0x1F64F),  # emoticons
    (0x1F680, 0x1F6FF),  # transport and map symbols
    (0x1F900, 0x1F9FF),  # supplemental symbols and pictographs
    (0x1FA70, 0x1FAFF),  # symbols and pictographs extended-A
    (0x1F1E6, 0x1F1FF),  # regional indicators (flags)
    (0x2600, 0x26FF),    # miscellaneous symbols
    (0x2700, 0x27BF),    # dingbats
    (0xFE00, 0xFE0F),    # variation selectors
    (0x200D, 0x200D),    # zero-width joiner
)

_RUN_RE = re.compile(r"(.)\1+")


@dataclass(frozen=True)
class PreprocessConfig:
    max_letter_run: int = 3
    strip_handles: bool = True
    strip_punct: bool = True
    strip_emoji: bool = True
    lowercase: bool = False
    emoji_ranges: tuple[tuple[int, int], ...] = DEFAULT_EMOJI_RANGES

    def __post_init__(self):
        if self.max_letter_run < 1:
            raise ValueError("max_letter_run must be >= 1")


def _is_emoji(ch: str, ranges) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in ranges)


def _strip_punct(text: str) -> str:
    out = []
    for i, ch in enumerate(text):
        if unicodedata.category(ch).startswith("P"):
            if ch in APOSTROPHES:
                prev_ok = i > 0 and text[i - 1].isalnum()
                next_ok = i + 1 < len(text) and text[i + 1].isalnum()
                if prev_ok and next_ok:
                    out.append(ch)
            continue
        out.append(ch)
    return "".join(out)


def _shorten_runs(text: str, max_run: int) -> str:
    def repl(m):
        ch = m.group(1)
        if ch.isalpha() and len(m.group(0)) > max_run:
            return ch * max_run
        return m.group(0)

    return _RUN_RE.sub(repl, text)


def normalize(text: str, cfg: PreprocessConfig = PreprocessConfig()) -> str:
    """Denoise one tweet; total on valid UTF-8 and idempotent.

    Pipeline order matters: emoji removal runs first so a handle hiding
    behind a leading emoji is still dropped whole, handle removal sees
    the raw '@' before punctuation stripping would erase it, and
    case-folding precedes run shortening so that "AAaa" cannot re-grow a
    long run on a second pass.
    """
    if cfg.strip_emoji:
        text = "".join(ch for ch in text if not _is_emoji(ch, cfg.emoji_ranges))
    if cfg.strip_handles:
        text = " ".join(t for t in text.split() if not t.startswith("@"))
    if cfg.strip_punct:
        text = _strip_punct(text)
    if cfg.lowercase:
        text = text.casefold()
    text = _shorten_runs(text, cfg.max_letter_run)
    return " ".join(text.split())


def tokenize(cleaned: str) -> list[str]:
    """Whitespace tokenization of already-normalized text; never yields empty tokens."""
    return cleaned.split()
