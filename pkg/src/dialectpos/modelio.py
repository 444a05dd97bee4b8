"""Versioned structured-text model documents.

Both tagger types share one container format so a single loader can
dispatch on the ``type`` header.  Floats are written with repr(), which
round-trips exactly, so a saved and reloaded model reproduces its
predictions bit for bit.
"""

from __future__ import annotations

import numpy as np

MAGIC = "dialectpos-model v1"


def fmt_row(values) -> str:
    return "\t".join(repr(float(v)) for v in values)


def write_matrix(fh, name: str, matrix: np.ndarray) -> None:
    matrix = np.atleast_2d(matrix)
    fh.write(f"section {name}\t{matrix.shape[0]}\n")
    for row in matrix:
        fh.write(fmt_row(row) + "\n")


def write_lines(fh, name: str, lines) -> None:
    lines = list(lines)
    fh.write(f"section {name}\t{len(lines)}\n")
    for line in lines:
        fh.write(f"{line}\n")


class ModelReader:
    """Sequential reader over a model document."""

    def __init__(self, path):
        with open(path, encoding="utf-8") as fh:
            self.lines = fh.read().split("\n")
        self.pos = 0
        if self.next_line() != MAGIC:
            raise ValueError(f"{path}: not a model document")

    def next_line(self) -> str:
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def header(self, key: str) -> list[str]:
        fields = self.next_line().split("\t")
        if fields[0] != key:
            raise ValueError(f"expected header {key!r}, found {fields[0]!r}")
        return fields[1:]

    def section(self, name: str) -> list[str]:
        fields = self.next_line().split("\t")
        if fields[0] != f"section {name}":
            raise ValueError(f"expected section {name!r}, found {fields[0]!r}")
        count = int(fields[1])
        rows = [self.next_line() for _ in range(count)]
        return rows

    def matrix(self, name: str) -> np.ndarray:
        rows = self.section(name)
        return np.array([[float(v) for v in row.split("\t")] for row in rows])


def model_type(path) -> str:
    """Peek at the ``type`` header without loading the full model."""
    reader = ModelReader(path)
    return reader.header("type")[0]


def load_model(path):
    """Load either tagger type; returns a model with a predict-compatible API."""
    kind = model_type(path)
    if kind == "crf":
        from dialectpos import crf

        return crf.load(path)
    if kind == "bilstm":
        from dialectpos import bilstm

        return bilstm.load(path)
    raise ValueError(f"unknown model type {kind!r}")
