"""Logistic regression data: container, CSV ingestion and a synthetic generator."""

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import LabelError, ParseError, RaggedRows

PRIOR_VARIANCE = 10.0


@dataclass(frozen=True, eq=False)
class LogisticRegressionData:
    """Labels in {-1, +1}, an ``(n, d)`` feature matrix and the prior variance."""

    labels: np.ndarray
    features: np.ndarray
    prior_variance: float = PRIOR_VARIANCE

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.float64).reshape(-1)
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise ValueError("features must be a non-empty (n, d) matrix")
        if labels.shape[0] != features.shape[0]:
            raise ValueError("labels and features disagree on n")
        if not np.all(np.abs(labels) == 1.0):
            raise LabelError("labels must be -1 or +1")
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite values")
        if not self.prior_variance > 0:
            raise ValueError("prior_variance must be positive")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", features)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]


def synthetic_logistic_data(n, d, seed):
    """Features and coefficients i.i.d. N(0, 1); labels drawn from the model.

    Returns ``(data, true_coefficients)``.
    """
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal(d)
    features = rng.standard_normal((n, d))
    p = expit(features @ coef)
    labels = np.where(rng.random(n) < p, 1.0, -1.0)
    return LogisticRegressionData(labels, features), coef


def _parse_rows(text, has_header):
    rows = list(csv.reader(io.StringIO(text)))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    start = 1 if has_header else 0
    if len(rows) <= start:
        raise ParseError("no data rows")
    width = len(rows[start])
    values = np.empty((len(rows) - start, width))
    for r in range(start, len(rows)):
        row = rows[r]
        if len(row) != width:
            raise RaggedRows(f"expected {width} columns, found {len(row)}", row=r)
        for c, cell in enumerate(row):
            try:
                values[r - start, c] = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric cell {cell!r}", row=r, column=c) from None
    return values, start


def load_logistic_csv(path, labels_first_column=True, has_header=False, add_intercept=False):
    """Read a numeric CSV of labels and features.

    Labels in {0, 1} map to {-1, +1}; labels already in {-1, +1} pass
    through. With ``add_intercept`` a leading column of ones is added to the
    features.

    Raises
    ------
    ParseError
        Non-numeric cell, with its 0-based row and column in the file.
    RaggedRows
        A row with a different number of columns than the first data row.
    LabelError
        A label outside {0, 1, -1, +1}.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    values, start = _parse_rows(text, has_header)
    if values.shape[1] < 2:
        raise ParseError("need a label column and at least one feature column")
    label_col = 0 if labels_first_column else values.shape[1] - 1
    raw = values[:, label_col]
    features = np.delete(values, label_col, axis=1)
    bad = ~np.isin(raw, (0.0, 1.0, -1.0))
    if bad.any():
        r = int(np.flatnonzero(bad)[0])
        raise LabelError(f"label {raw[r]!r} is not one of 0, 1, -1, +1", row=r + start, column=label_col)
    labels = np.where(raw == 0.0, -1.0, raw)
    if not np.all(np.isfinite(features)):
        r, c = np.argwhere(~np.isfinite(features))[0]
        raise ParseError("non-finite feature value", row=int(r) + start)
    if add_intercept:
        features = np.column_stack([np.ones(features.shape[0]), features])
    return LogisticRegressionData(labels, features)


def write_logistic_csv(path, data, header=False):
    """Write labels (first column, as -1/+1) and features with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header:
            fh.write(",".join(["label"] + [f"a{j}" for j in range(data.d)]) + "\n")
        for y, row in zip(data.labels, data.features):
            fh.write(",".join(f"{v:.17g}" for v in (y, *row)) + "\n")
