"""Strict reader for the spiderbench trace CSV schema.

The trace files are the only interface to the optimizer package: eight fixed
columns, empty cells for diagnostics that were disabled. Anything else is a
schema error, reported by column so a stale producer is easy to spot.
"""

import csv
import os
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

EXPECTED_HEADER = ["k", "sfo", "po", "vnorm", "gradnorm", "loss", "gnorm_eta",
                   "wall_ms"]
_INT_COLUMNS = ("k", "sfo", "po")


class SchemaError(ValueError):
    """The file does not follow the trace CSV schema."""


class UsageError(ValueError):
    """Valid inputs combined in an unsupported way (e.g. epochs without n)."""


def _check_header(row: List[str], path: str):
    if len(row) != len(EXPECTED_HEADER):
        raise SchemaError(f"{path}: expected {len(EXPECTED_HEADER)} columns "
                          f"{EXPECTED_HEADER}, got {len(row)}")
    for i, (got, expected) in enumerate(zip(row, EXPECTED_HEADER)):
        if got != expected:
            raise SchemaError(f"{path}: header column {i + 1} must be "
                              f"{expected!r}, got {got!r}")


def split_label(stem: str):
    """solver_seed7 -> ("solver", 7); anything else groups under itself."""
    head, sep, tail = stem.rpartition("_seed")
    if sep and tail.isdigit():
        return head, int(tail)
    return stem, None


@dataclass
class TraceFrame:
    """One parsed trace: column arrays (NaN where the cell was empty)."""

    path: str
    label: str
    group: str
    seed: int
    columns: Dict[str, np.ndarray] = field(repr=False)

    @classmethod
    def load(cls, path: str, label: str = None) -> "TraceFrame":
        try:
            with open(path, newline="") as fh:
                reader = csv.reader(fh)
                try:
                    header = next(reader)
                except StopIteration:
                    raise SchemaError(f"{path}: empty file") from None
                _check_header(header, path)
                raw = [[] for _ in EXPECTED_HEADER]
                for lineno, row in enumerate(reader, start=2):
                    if len(row) != len(EXPECTED_HEADER):
                        raise SchemaError(f"{path}: line {lineno} has "
                                          f"{len(row)} cells, expected "
                                          f"{len(EXPECTED_HEADER)}")
                    for cell, bucket in zip(row, raw):
                        bucket.append(cell)
        except OSError as exc:
            raise SchemaError(f"cannot read {path}: {exc}") from exc

        columns = {}
        for name, cells in zip(EXPECTED_HEADER, raw):
            values = np.array([float(c) if c != "" else np.nan for c in cells])
            if name in _INT_COLUMNS and np.isnan(values).any():
                raise SchemaError(f"{path}: column {name!r} has empty cells")
            columns[name] = values

        stem = os.path.splitext(os.path.basename(path))[0]
        group, seed = split_label(stem)
        if label is None:
            label = stem if seed is None else f"{group} seed {seed}"
        return cls(path=path, label=label, group=group, seed=seed,
                   columns=columns)

    def __len__(self) -> int:
        return len(self.columns["k"])

    def has_metric(self, name: str) -> bool:
        return bool(np.isfinite(self.columns[name]).any())
