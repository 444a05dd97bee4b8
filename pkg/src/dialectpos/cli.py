"""Command-line entry point wiring the toolkit's workflows together.

Every subcommand is deterministic given its flags and seed; errors exit
nonzero with a one-line diagnostic.  A ``key=value`` config file can
supply any long flag's value; explicit flags win.
"""

from __future__ import annotations

import functools
import sys

import click

from dialectpos import bilstm, crf, dialect_rules, evaluation, modelio
from dialectpos.corpus import (
    Corpus, DEFAULT_TAGSET, TaggedSentence, Tagset, read_conll, write_conll,
)
from dialectpos.preprocess import PreprocessConfig, normalize, tokenize


def _read_config(path) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {line_no}: expected key=value")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(ctx_params: dict, config_path, casts: dict) -> dict:
    """Fill None-valued params from the config file, then from defaults."""
    merged = dict(ctx_params)
    config = _read_config(config_path) if config_path else {}
    for key, (cast, default) in casts.items():
        if merged.get(key) is None:
            raw = config.get(key)
            merged[key] = cast(raw) if raw is not None else default
    return merged


def fail_cleanly(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as exc:  # one-line diagnostic, never a stack dump
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load_tagset(path) -> Tagset:
    if path is None:
        return DEFAULT_TAGSET
    with open(path, encoding="utf-8") as fh:
        tags = [line.strip() for line in fh if line.strip()]
    return Tagset(tags)


def _load_rules(path):
    if path is None:
        return dialect_rules.default_catalog()
    return dialect_rules.load_catalog(path)


_bool_flag = lambda raw: str(raw).lower() in ("1", "true", "yes", "on")


@click.group()
def main():
    """Dialect-aware part-of-speech tagging toolkit."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--max-letter-run", type=int, default=None)
@click.option("--lowercase", is_flag=True, default=None)
@click.option("--keep-handles", is_flag=True, default=None)
@click.option("--keep-punct", is_flag=True, default=None)
@click.option("--keep-emoji", is_flag=True, default=None)
@fail_cleanly
def preprocess(input_path, output_path, config_path, **flags):
    """Normalize raw tweets (one per line) into an untagged token file."""
    params = _apply_config(flags, config_path, {
        "max_letter_run": (int, 3),
        "lowercase": (_bool_flag, False),
        "keep_handles": (_bool_flag, False),
        "keep_punct": (_bool_flag, False),
        "keep_emoji": (_bool_flag, False),
    })
    cfg = PreprocessConfig(
        max_letter_run=params["max_letter_run"],
        strip_handles=not params["keep_handles"],
        strip_punct=not params["keep_punct"],
        strip_emoji=not params["keep_emoji"],
        lowercase=params["lowercase"],
    )
    sentences = []
    with open(input_path, encoding="utf-8") as fh:
        for line in fh:
            tokens = tokenize(normalize(line.rstrip("\n"), cfg))
            if tokens:
                sentences.append(TaggedSentence(tuple(tokens)))
    write_conll(Corpus(tuple(sentences)), output_path)
    click.echo(f"wrote {len(sentences)} sentences to {output_path}")


@main.command()
@click.option("--direction", type=click.Choice(["to-aae", "to-mae"]), required=True)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--rules", "rules_path", type=click.Path(exists=True))
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@click.option("--apply-prob", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@fail_cleanly
def translate(direction, input_path, output_path, rules_path, tagset_path,
              apply_prob, seed):
    """Rewrite a corpus across the dialect boundary."""
    tagset = _load_tagset(tagset_path)
    catalog = _load_rules(rules_path)
    corpus = read_conll(input_path, tagset)
    if direction == "to-aae":
        _, out = dialect_rules.synthesize_parallel(corpus, catalog, apply_prob, seed)
        write_conll(out, output_path)
    else:
        sentences = []
        n_residue = 0
        for sentence in corpus:
            result = dialect_rules.to_mae(sentence, catalog)
            sentences.append(result.sentence)
            for hit in result.residue:
                n_residue += 1
                click.echo(
                    f"residue\t{sentence.source_id}\t{hit.position}"
                    f"\t{hit.surface}\t{hit.rule_id}",
                    err=True,
                )
        write_conll(Corpus(tuple(sentences), tagset), output_path)
        if n_residue:
            click.echo(f"{n_residue} untranslatable forms left untouched", err=True)
    click.echo(f"wrote {output_path}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output-mae", required=True, type=click.Path())
@click.option("--output-aae", required=True, type=click.Path())
@click.option("--rules", "rules_path", type=click.Path(exists=True))
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@click.option("--apply-prob", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@fail_cleanly
def synthesize(input_path, output_mae, output_aae, rules_path, tagset_path,
               apply_prob, seed):
    """Build a sentence-aligned parallel corpus pair from gold-tagged input."""
    corpus = read_conll(input_path, _load_tagset(tagset_path))
    catalog = _load_rules(rules_path)
    mae, aae = dialect_rules.synthesize_parallel(corpus, catalog, apply_prob, seed)
    write_conll(mae, output_mae)
    write_conll(aae, output_aae)
    click.echo(f"wrote {output_mae} and {output_aae} ({len(mae)} sentences each)")


@main.command()
@click.option("--model", "model_kind", type=click.Choice(["crf", "bilstm"]),
              default="crf", show_default=True)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--model-path", required=True, type=click.Path())
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--l1", type=float, default=None, help="[default: 0.25]")
@click.option("--l2", type=float, default=None, help="[default: 0.3]")
@click.option("--epochs", type=int, default=None, help="[default: 40]")
@click.option("--lr", type=float, default=None,
              help="learning rate (bilstm, default 0.001) or gradient step "
                   "size (crf, default 0.5)")
@click.option("--seed", type=int, default=None, help="[default: 0]")
@click.option("--embed-dim", type=int, default=None, help="[default: 32]")
@click.option("--hidden-dim", type=int, default=None, help="[default: 32]")
@fail_cleanly
def train(model_kind, input_path, model_path, tagset_path, config_path, **flags):
    """Train a tagger on a gold-tagged corpus and save the model document."""
    params = _apply_config(flags, config_path, {
        "l1": (float, 0.25),
        "l2": (float, 0.3),
        "epochs": (int, 40),
        "lr": (float, 0.001 if model_kind == "bilstm" else 0.5),
        "seed": (int, 0),
        "embed_dim": (int, 32),
        "hidden_dim": (int, 32),
    })
    corpus = read_conll(input_path, _load_tagset(tagset_path))
    if model_kind == "crf":
        model = crf.train(corpus, l1=params["l1"], l2=params["l2"],
                          epochs=params["epochs"], step_size=params["lr"],
                          seed=params["seed"])
        crf.save(model, model_path)
    else:
        model = bilstm.train(corpus, epochs=params["epochs"], lr=params["lr"],
                             seed=params["seed"], embed_size=params["embed_dim"],
                             hidden_size=params["hidden_dim"])
        bilstm.save(model, model_path)
    click.echo(f"trained {model_kind} on {len(corpus)} sentences -> {model_path}")


def _predict_with(model_path: str, corpus: Corpus) -> Corpus:
    model = modelio.load_model(model_path)
    if isinstance(model, crf.CrfModel):
        return crf.predict(model, corpus)
    return bilstm.predict(model, corpus)


@main.command()
@click.option("--model-path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@fail_cleanly
def tag(model_path, input_path, output_path, tagset_path):
    """Tag a corpus; predictions become the tag column of the output file."""
    corpus = read_conll(input_path, _load_tagset(tagset_path))
    predicted = _predict_with(model_path, corpus)
    as_gold = tuple(
        TaggedSentence(s.tokens, s.pred_tags, source_id=s.source_id)
        for s in predicted
    )
    write_conll(Corpus(as_gold, predicted.tagset), output_path)
    click.echo(f"tagged {len(corpus)} sentences -> {output_path}")


def _aligned_reports(gold_path, pred_paths, tagset):
    gold = read_conll(gold_path, tagset)
    reports = []
    for path in pred_paths:
        pred = read_conll(path, tagset)
        as_pred = Corpus(
            tuple(
                TaggedSentence(s.tokens, None, s.gold_tags, s.source_id)
                for s in pred
            ),
            tagset,
        )
        reports.append(evaluation.score(gold, as_pred))
    return reports


@main.command("eval")
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@click.option("--output", "output_path", type=click.Path())
@fail_cleanly
def eval_cmd(gold_path, pred_path, tagset_path, output_path):
    """Per-tag P/R/F1 table and token accuracy of predictions against gold."""
    report = _aligned_reports(gold_path, [pred_path], _load_tagset(tagset_path))[0]
    text = report.to_tsv()
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    click.echo(text)


@main.command()
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--pred-a", required=True, type=click.Path(exists=True))
@click.option("--pred-b", required=True, type=click.Path(exists=True))
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@fail_cleanly
def compare(gold_path, pred_a, pred_b, tagset_path):
    """Accuracy and per-tag F1 differences between two prediction files."""
    report_a, report_b = _aligned_reports(gold_path, [pred_a, pred_b],
                                          _load_tagset(tagset_path))
    click.echo(evaluation.compare(report_a, report_b).to_tsv())


@main.command()
@click.option("--model-path", required=True, type=click.Path(exists=True))
@click.option("--top-k", type=int, default=5, show_default=True)
@fail_cleanly
def transitions(model_path, top_k):
    """Most likely and most unlikely learned tag transitions."""
    model = modelio.load_model(model_path)
    if not isinstance(model, crf.CrfModel):
        raise ValueError("transition analysis requires a crf model")
    click.echo(crf.top_transitions(model, top_k).format())


@main.command()
@click.option("--input-a", required=True, type=click.Path(exists=True))
@click.option("--input-b", required=True, type=click.Path(exists=True))
@click.option("--channel", type=click.Choice(["gold", "pred"]), default="gold",
              show_default=True)
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--figure", "figure_path", type=click.Path(),
              help="[default: <output>.png]")
@click.option("--label-a", default="a", show_default=True)
@click.option("--label-b", default="b", show_default=True)
@fail_cleanly
def histogram(input_a, input_b, channel, tagset_path, output_path, figure_path,
              label_a, label_b):
    """Per-tag count table for two corpora plus a grouped-bar figure."""
    from dialectpos import plots

    tagset = _load_tagset(tagset_path)
    corpus_a = read_conll(input_a, tagset)
    corpus_b = read_conll(input_b, tagset)
    counts = evaluation.tag_histogram(corpus_a, corpus_b, use_pred=channel == "pred")
    text = evaluation.histogram_tsv(counts, label_a, label_b)
    with open(output_path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    figure_path = figure_path or f"{output_path}.png"
    plots.save_tag_histogram(counts, figure_path, label_a, label_b)
    click.echo(text)
    click.echo(f"figure -> {figure_path}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@fail_cleanly
def agreement(input_path, tagset_path):
    """Krippendorff's alpha over annotator/item/label triples."""
    from dialectpos.agreement import krippendorff_alpha, read_agreement_tsv

    table = read_agreement_tsv(input_path, _load_tagset(tagset_path))
    click.echo(f"alpha\t{krippendorff_alpha(table):.4f}")


@main.command()
@click.option("--model", "model_kind", type=click.Choice(["crf", "bilstm"]),
              default="crf", show_default=True)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--tagset", "tagset_path", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--l1", type=float, default=None, help="[default: 0.25]")
@click.option("--l2", type=float, default=None, help="[default: 0.3]")
@click.option("--epochs", type=int, default=None, help="[default: 40]")
@click.option("--lr", type=float, default=None)
@click.option("--seed", type=int, default=None, help="[default: 0]")
@fail_cleanly
def cv(model_kind, input_path, tagset_path, config_path, k, **flags):
    """k-fold cross-validated accuracy with a pooled aggregate report."""
    params = _apply_config(flags, config_path, {
        "l1": (float, 0.25),
        "l2": (float, 0.3),
        "epochs": (int, 40),
        "lr": (float, 0.001 if model_kind == "bilstm" else 0.5),
        "seed": (int, 0),
    })
    corpus = read_conll(input_path, _load_tagset(tagset_path))

    def trainer(train_part):
        if model_kind == "crf":
            model = crf.train(train_part, l1=params["l1"], l2=params["l2"],
                              epochs=params["epochs"], step_size=params["lr"],
                              seed=params["seed"])
            return lambda part: crf.predict(model, part)
        model = bilstm.train(train_part, epochs=params["epochs"], lr=params["lr"],
                             seed=params["seed"])
        return lambda part: bilstm.predict(model, part)

    result = evaluation.cross_validate(corpus, trainer, k=k, seed=params["seed"])
    for i, accuracy in enumerate(result.fold_accuracies()):
        click.echo(f"fold {i}\t{100.0 * accuracy:.2f}")
    click.echo(f"pooled\t{100.0 * result.aggregate.token_accuracy:.2f}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--journal-dir", default="journals", show_default=True,
              type=click.Path())
@fail_cleanly
def serve(port, host, journal_dir):
    """Start the human-in-the-loop annotation service."""
    import uvicorn

    from dialectpos.service import SessionStore, create_app

    app = create_app(SessionStore(journal_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
