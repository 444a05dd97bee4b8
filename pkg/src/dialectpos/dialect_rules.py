"""Deterministic MAE/AAE transformation engine.

Rules are word maps and pattern rewrites (interdental replacement,
copula deletion, phrase reduction, remote-past "been" constructions,
...).  The forward direction (to_aae) is tag-guided and stochastic per
rule occurrence; the reverse direction (to_mae) applies only inverses of
invertible rules and reports untranslatable forms as residue.

Catalog files are tab-separated, one rule per line, '#' comments:
``rule_id  kind  mae_pattern  aae_form  tag_category  invertible``
where multi-token patterns join tokens with '+' and an empty aae_form
means the matched token is deleted (copula deletion).  File order is
the application priority order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources

from dialectpos.corpus import Corpus, DEFAULT_TAGSET, TaggedSentence, Tagset

RULE_KINDS = frozenset({
    "lexical_map",
    "consonant_deletion",
    "fricative_replacement",
    "copula_deletion",
    "contraction_loss",
    "phrase_reduction",
    "fragment_deletion",
    "fragment_replacement",
    "been_construction",
    "possession_replacement",
    "pronoun_replacement",
    "homophone_replacement",
    "auxiliary_replacement",
})


@dataclass(frozen=True)
class DialectRule:
    rule_id: str
    kind: str
    mae_pattern: tuple[str, ...]
    aae_form: tuple[str, ...]
    tag_category: str
    invertible: bool

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ValueError(f"rule {self.rule_id}: unknown kind {self.kind!r}")
        if not self.mae_pattern:
            raise ValueError(f"rule {self.rule_id}: empty mae_pattern")
        if not self.aae_form and self.kind != "copula_deletion":
            raise ValueError(f"rule {self.rule_id}: only copula_deletion rules may delete")
        if self.invertible and not self.aae_form:
            raise ValueError(f"rule {self.rule_id}: deletion rules cannot be invertible")

    @property
    def tag_sensitive(self) -> bool:
        # Single-token rules fire only where the gold tag matches the
        # rule's category; the negative-auxiliary rewrite is the one
        # surface-matched exception because it changes the tag
        # (doesn't/VBZ becomes don't/VBP).  Multi-token patterns match
        # on surface alone.
        return len(self.mae_pattern) == 1 and self.kind != "auxiliary_replacement"


@dataclass(frozen=True)
class RuleCatalog:
    rules: tuple[DialectRule, ...]
    application_order: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        ids = [r.rule_id for r in self.rules]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate rule ids: {', '.join(dupes)}")
        order = self.application_order or tuple(ids)
        object.__setattr__(self, "application_order", tuple(order))
        if sorted(order) != sorted(ids):
            raise ValueError("application_order is not a permutation of rule ids")
        _check_invertible_bijection(self.rules)

    def __len__(self):
        return len(self.rules)

    def by_id(self, rule_id: str) -> DialectRule:
        for rule in self.rules:
            if rule.rule_id == rule_id:
                return rule
        raise KeyError(rule_id)

    def ordered_rules(self) -> list[DialectRule]:
        by_id = {r.rule_id: r for r in self.rules}
        return [by_id[rid] for rid in self.application_order]

    def subset(self, rule_ids=None, kinds=None) -> "RuleCatalog":
        """Catalog restricted to the given rule ids and/or kinds, order preserved."""
        keep = []
        for rule in self.ordered_rules():
            if rule_ids is not None and rule.rule_id not in rule_ids:
                continue
            if kinds is not None and rule.kind not in kinds:
                continue
            keep.append(rule)
        return RuleCatalog(tuple(keep))


def _check_invertible_bijection(rules):
    # Invertible rules must form a one-to-one mae<->aae correspondence:
    # every invertible aae form maps back to a single mae pattern and
    # vice versa (identical pairs may repeat under different tags).
    by_aae: dict[tuple, tuple] = {}
    by_mae: dict[tuple, tuple] = {}
    for rule in rules:
        if not rule.invertible:
            continue
        if by_aae.setdefault(rule.aae_form, rule.mae_pattern) != rule.mae_pattern:
            raise ValueError(
                f"rule {rule.rule_id}: aae form {'+'.join(rule.aae_form)!r} "
                "inverts to more than one pattern"
            )
        if by_mae.setdefault(rule.mae_pattern, rule.aae_form) != rule.aae_form:
            raise ValueError(
                f"rule {rule.rule_id}: pattern {'+'.join(rule.mae_pattern)!r} "
                "maps to more than one invertible form"
            )


def load_catalog(path, tagset: Tagset = DEFAULT_TAGSET) -> RuleCatalog:
    """Load and validate a rule catalog file; file order is priority order."""
    rules = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 6:
                raise ValueError(f"line {line_no}: expected 6 fields, got {len(fields)}")
            rule_id, kind, mae, aae, tag, invertible = fields
            if tag not in tagset:
                raise ValueError(f"line {line_no}: tag {tag!r} not in inventory")
            if invertible.lower() not in ("true", "false"):
                raise ValueError(f"line {line_no}: invertible must be true or false")
            rules.append(
                DialectRule(
                    rule_id=rule_id,
                    kind=kind,
                    mae_pattern=tuple(mae.lower().split("+")) if mae else (),
                    aae_form=tuple(aae.lower().split("+")) if aae else (),
                    tag_category=tag,
                    invertible=invertible.lower() == "true",
                )
            )
    return RuleCatalog(tuple(rules))


def default_catalog() -> RuleCatalog:
    """The built-in catalog covering the documented word maps and rewrite families."""
    with resources.as_file(
        resources.files("dialectpos").joinpath("data/default_rules.tsv")
    ) as path:
        return load_catalog(path)


def _match(rule, tokens_lower, gold_tags, i):
    L = len(rule.mae_pattern)
    if tokens_lower[i:i + L] != rule.mae_pattern:
        return False
    if rule.tag_sensitive and gold_tags[i] != rule.tag_category:
        return False
    return True


def to_aae(sentence: TaggedSentence, catalog: RuleCatalog, apply_prob: float,
           seed: int) -> TaggedSentence:
    """Rewrite one gold-tagged sentence toward AAE surface forms.

    Scans left to right; at each position each matching rule fires
    independently with probability apply_prob (deterministic under
    seed), the first firing rule wins and the scan advances past the
    replaced span.  Replacement tokens carry the rule's tag category;
    deletion rules drop the token and its tag slot together.
    """
    if sentence.gold_tags is None:
        raise ValueError("to_aae requires gold tags")
    if not 0.0 <= apply_prob <= 1.0:
        raise ValueError("apply_prob must lie in [0, 1]")
    rng = random.Random(seed)
    rules = catalog.ordered_rules()
    tokens_lower = tuple(t.lower() for t in sentence.tokens)
    gold = sentence.gold_tags
    out_tokens: list[str] = []
    out_tags: list[str] = []
    i = 0
    n = len(sentence)
    while i < n:
        fired = None
        for rule in rules:
            if _match(rule, tokens_lower, gold, i) and rng.random() < apply_prob:
                fired = rule
                break
        if fired is None:
            out_tokens.append(sentence.tokens[i])
            out_tags.append(gold[i])
            i += 1
        else:
            out_tokens.extend(fired.aae_form)
            out_tags.extend(fired.tag_category for _ in fired.aae_form)
            i += len(fired.mae_pattern)
    if not out_tokens:
        # A transformation may not empty a sentence (all-copula input).
        return sentence
    return TaggedSentence(tuple(out_tokens), tuple(out_tags),
                          source_id=sentence.source_id)


@dataclass(frozen=True)
class ResidueHit:
    """A non-invertible AAE surface form left untouched by to_mae."""

    position: int
    surface: str
    rule_id: str


@dataclass(frozen=True)
class MaeTranslation:
    sentence: TaggedSentence
    residue: tuple[ResidueHit, ...]


def to_mae(sentence, catalog: RuleCatalog) -> MaeTranslation:
    """Map AAE surface forms back to MAE where the mapping is unambiguous.

    Operates lexically (tags optional and not reconstructed: a single
    AAE token can expand to several MAE tokens whose tags would have to
    be guessed).  Forms produced only by non-invertible rules are left
    untouched and reported as residue; deletions (dropped copulas) leave
    no surface trace and cannot be detected.
    """
    if isinstance(sentence, TaggedSentence):
        tokens = sentence.tokens
        source_id = sentence.source_id
    else:
        tokens = tuple(sentence)
        source_id = ""
    inverse = {}
    residue_forms = {}
    for rule in catalog.ordered_rules():
        if rule.invertible:
            inverse.setdefault(rule.aae_form, rule.mae_pattern)
        elif rule.aae_form:
            residue_forms.setdefault(rule.aae_form, rule.rule_id)
    # Longest surface match first so multi-token forms are not shadowed.
    inv_order = sorted(inverse, key=len, reverse=True)
    res_order = sorted(residue_forms, key=len, reverse=True)

    tokens_lower = tuple(t.lower() for t in tokens)
    out: list[str] = []
    residue: list[ResidueHit] = []
    i = 0
    while i < len(tokens):
        matched = False
        for form in inv_order:
            if tokens_lower[i:i + len(form)] == form:
                out.extend(inverse[form])
                i += len(form)
                matched = True
                break
        if matched:
            continue
        for form in res_order:
            if tokens_lower[i:i + len(form)] == form:
                residue.append(
                    ResidueHit(i, " ".join(tokens[i:i + len(form)]), residue_forms[form])
                )
                out.extend(tokens[i:i + len(form)])
                i += len(form)
                matched = True
                break
        if not matched:
            out.append(tokens[i])
            i += 1
    return MaeTranslation(
        TaggedSentence(tuple(out), source_id=source_id), tuple(residue)
    )


def synthesize_parallel(corpus: Corpus, catalog: RuleCatalog, apply_prob: float,
                        seed: int) -> tuple[Corpus, Corpus]:
    """Build a sentence-aligned (mae, aae) corpus pair.

    The input plays the MAE role; each sentence is rewritten with a
    per-sentence seed derived from the master seed, so the AAE side
    carries correct gold tags by construction.
    """
    if not corpus.fully_gold_tagged():
        raise ValueError("synthesize_parallel requires a fully gold-tagged corpus")
    master = random.Random(seed)
    aae_sentences = tuple(
        to_aae(sent, catalog, apply_prob, master.randrange(2 ** 63))
        for sent in corpus.sentences
    )
    return corpus, Corpus(aae_sentences, corpus.tagset)
