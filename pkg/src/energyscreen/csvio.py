"""Reading and writing labelled two-class CSV files.

Format: a header row, one column named ``label`` holding 1 or 2, every other
column numeric. Floats are written with ``repr`` so that a written file reads
back to identical arrays.
"""

import csv
import math

import numpy as np

from .data import TwoClassSample
from .exceptions import CsvParseError, DataError

LABEL = "label"


def read_labeled_csv(path) -> TwoClassSample:
    """Parse ``path`` into a :class:`TwoClassSample`.

    Raises
    ------
    CsvParseError
        For malformed content, with the offending line and column.
    DataError
        When the labels do not cover exactly the two classes 1 and 2.
    OSError
        When the file cannot be opened.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError(path, 1, 1, "file is empty") from None
        header = [h.strip() for h in header]
        if LABEL not in header:
            raise CsvParseError(path, 1, 1, f"no '{LABEL}' column in header")
        if header.count(LABEL) > 1:
            second = header.index(LABEL, header.index(LABEL) + 1)
            raise CsvParseError(path, 1, second + 1, f"duplicate '{LABEL}' column")
        lab_col = header.index(LABEL)
        names = [h for k, h in enumerate(header) if k != lab_col]
        if not names:
            raise CsvParseError(path, 1, 1, "no feature columns")
        rows, labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise CsvParseError(path, line_no, min(len(row), len(header)) + 1,
                                    f"expected {len(header)} fields, found {len(row)}")
            values = []
            for col, cell in enumerate(row):
                text = cell.strip()
                try:
                    v = float(text)
                except ValueError:
                    raise CsvParseError(path, line_no, col + 1,
                                        f"cannot parse {text!r} as a number") from None
                if not math.isfinite(v):
                    raise CsvParseError(path, line_no, col + 1, f"non-finite value {text!r}")
                if col == lab_col:
                    if v not in (1.0, 2.0):
                        raise CsvParseError(path, line_no, col + 1,
                                            f"label must be 1 or 2, got {text!r}")
                    labels.append(int(v))
                else:
                    values.append(v)
            rows.append(values)
    if not rows:
        raise CsvParseError(path, 2, 1, "no data rows")
    labels = np.array(labels)
    present = sorted(set(labels.tolist()))
    if present != [1, 2]:
        raise DataError(f"{path}: labels must contain both classes 1 and 2, found {present}")
    z = np.array(rows, dtype=np.float64)
    if (labels == 1).sum() < 2 or (labels == 2).sum() < 2:
        raise DataError(f"{path}: each class needs at least 2 rows")
    return TwoClassSample.from_labeled(z, labels, names)


def write_labeled_csv(path, sample: TwoClassSample):
    """Write class 1 rows then class 2 rows, labelled, with exact float text."""
    names = sample.feature_names or [f"x{k + 1}" for k in range(sample.d)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([LABEL] + list(names))
        for label, block in ((1, sample.class1), (2, sample.class2)):
            for row in block:
                w.writerow([label] + [repr(float(v)) for v in row])


def write_rows(path, rows, fieldnames, comments=()):
    """Write dict rows as CSV, preceded by ``#`` comment lines."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        w = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n",
                           extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


__all__ = ["read_labeled_csv", "write_labeled_csv", "write_rows", "LABEL"]
