"""Decision systems: loading, validation, min-max normalisation and the
per-attribute similarity ``1 - |a(x) - a(y)|``."""

import csv
import io
import logging
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DataError

logger = logging.getLogger(__name__)

__all__ = [
    "DecisionSystem",
    "MinMaxNormalizer",
    "load_decision_system",
    "write_decision_system",
    "normalize_attributes",
    "per_attribute_similarity",
    "load_flu_example",
]


@dataclass(frozen=True, eq=False)
class DecisionSystem:
    """Instances with real-valued conditional attributes and a crisp label.

    ``values`` has one row per instance and one column per conditional
    attribute. Arrays are made read-only on construction.
    """

    values: np.ndarray
    labels: np.ndarray
    attribute_names: tuple
    instance_ids: tuple = None
    decision_name: str = "d"
    _label_codes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2:
            raise DataError("values must be a 2-d array")
        n_inst, n_attr = values.shape
        if n_attr < 1:
            raise DataError("need at least 1 conditional attribute")
        if n_inst < 2:
            raise DataError(f"need at least 2 instances (got n_samples={n_inst})")
        if not np.all(np.isfinite(values)):
            raise DataError("values must be finite")
        labels = np.asarray(self.labels, dtype=object)
        if labels.shape != (n_inst,):
            raise DataError(f"expected {n_inst} labels, got shape {labels.shape}")
        names = tuple(str(a) for a in self.attribute_names)
        if len(names) != n_attr:
            raise DataError(f"expected {n_attr} attribute names, got {len(names)}")
        if len(set(names)) != n_attr:
            raise DataError("attribute names must be unique")
        ids = self.instance_ids
        ids = tuple(f"x{i + 1}" for i in range(n_inst)) if ids is None else tuple(str(i) for i in ids)
        if len(ids) != n_inst:
            raise DataError(f"expected {n_inst} instance ids, got {len(ids)}")
        values.setflags(write=False)
        labels.setflags(write=False)
        _, codes = np.unique(labels.astype(str), return_inverse=True)
        codes.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "attribute_names", names)
        object.__setattr__(self, "instance_ids", ids)
        object.__setattr__(self, "_label_codes", codes)

    @property
    def n_instances(self):
        return self.values.shape[0]

    @property
    def n_attributes(self):
        return self.values.shape[1]

    @property
    def classes(self):
        return sorted(set(self.labels.tolist()), key=str)

    @property
    def label_codes(self):
        """Integer code per instance; equal codes iff equal labels."""
        return self._label_codes

    def same_class(self):
        """Crisp decision relation as a boolean |X| x |X| matrix."""
        c = self._label_codes
        return c[:, None] == c[None, :]

    def is_unit_range(self):
        return bool(np.all((self.values >= 0.0) & (self.values <= 1.0)))

    def attribute_index(self, name):
        try:
            return self.attribute_names.index(str(name))
        except ValueError:
            raise DataError(f"unknown attribute {name!r}") from None

    def subset(self, rows):
        rows = np.asarray(rows)
        return DecisionSystem(
            self.values[rows],
            self.labels[rows],
            self.attribute_names,
            tuple(np.asarray(self.instance_ids, dtype=object)[rows]),
            self.decision_name,
        )

    def with_values(self, values):
        return DecisionSystem(values, self.labels, self.attribute_names, self.instance_ids, self.decision_name)


def _parse_label(text):
    # "1" and "1.0" should be the same class; other labels stay strings
    try:
        num = float(text)
    except ValueError:
        return text
    if math.isfinite(num) and num.is_integer() and "e" not in text.lower():
        return int(num)
    return text


def load_decision_system(source, label=None, delimiter=",", id_column=None):
    """Read a delimiter-separated table with a header row.

    Parameters
    ----------
    source : path or text stream
    label : str, optional
        Name of the decision column; defaults to the last column.
    delimiter : str
    id_column : str, optional
        Column holding instance identifiers (excluded from the attributes).

    Returns
    -------
    DecisionSystem
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            return load_decision_system(fh, label=label, delimiter=delimiter, id_column=id_column)

    rows = [r for r in csv.reader(source, delimiter=delimiter) if any(c.strip() for c in r)]
    if not rows:
        raise DataError("empty input: a header row is required")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if label is None:
        label = header[-1]
    if label not in header:
        raise DataError(f"decision column {label!r} not found in header {header}")
    if id_column is not None and id_column not in header:
        raise DataError(f"id column {id_column!r} not found in header {header}")
    if len(body) < 2:
        raise DataError(f"need at least 2 instances, got {len(body)}")

    label_idx = header.index(label)
    id_idx = header.index(id_column) if id_column is not None else None
    attr_idx = [i for i in range(len(header)) if i not in (label_idx, id_idx)]
    if not attr_idx:
        raise DataError("need at least 1 conditional attribute")

    values = np.empty((len(body), len(attr_idx)))
    labels = []
    ids = [] if id_idx is not None else None
    for r, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"line {r}: expected {len(header)} fields, got {len(row)}")
        for j, c in enumerate(attr_idx):
            cell = row[c].strip()
            if cell == "":
                raise DataError(f"line {r}, column {header[c]!r}: missing value")
            try:
                values[r - 2, j] = float(cell)
            except ValueError:
                raise DataError(f"line {r}, column {header[c]!r}: cannot parse {cell!r} as a number") from None
            if not math.isfinite(values[r - 2, j]):
                raise DataError(f"line {r}, column {header[c]!r}: non-finite value {cell!r}")
        cell = row[label_idx].strip()
        if cell == "":
            raise DataError(f"line {r}, column {label!r}: missing value")
        labels.append(_parse_label(cell))
        if ids is not None:
            ids.append(row[id_idx].strip())

    labels_arr = np.empty(len(labels), dtype=object)
    labels_arr[:] = labels
    return DecisionSystem(values, labels_arr, [header[c] for c in attr_idx], ids, label)


def write_decision_system(ds, target, delimiter=","):
    """Write ``ds`` as CSV at full (round-trip) precision."""
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            return write_decision_system(ds, fh, delimiter)
    w = csv.writer(target, delimiter=delimiter, lineterminator="\n")
    w.writerow(list(ds.attribute_names) + [ds.decision_name])
    for row, lab in zip(ds.values, ds.labels):
        w.writerow([repr(float(v)) for v in row] + [lab])


def load_flu_example():
    """The four-patient flu table bundled with the package."""
    from importlib.resources import files

    text = files("frchoquet").joinpath("data/flu.csv").read_text(encoding="utf-8")
    return load_decision_system(io.StringIO(text))


class MinMaxNormalizer(TransformerMixin, BaseEstimator):
    """Min-max scaling to [0, 1] that maps constant columns to 0.

    Unlike ``sklearn.preprocessing.MinMaxScaler(clip=True)`` this warns when
    transformed values had to be clamped.
    """

    def __init__(self, clip=True):
        self.clip = clip

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.data_min_ = X.min(axis=0)
        self.data_range_ = X.max(axis=0) - self.data_min_
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "data_min_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DataError(f"X has {X.shape[1]} features, but {type(self).__name__} "
                            f"is expecting {self.n_features_in_} features as input")
        scale = np.where(self.data_range_ > 0, self.data_range_, 1.0)
        out = (X - self.data_min_) / scale
        out[:, self.data_range_ == 0] = 0.0
        if self.clip:
            outside = (out < 0.0) | (out > 1.0)
            if outside.any():
                msg = f"{int(outside.sum())} value(s) outside the training range were clamped to [0, 1]"
                warnings.warn(msg, stacklevel=2)
                logger.warning(msg)
                np.clip(out, 0.0, 1.0, out=out)
        return out


def normalize_attributes(ds, method="minmax"):
    """Rescale every conditional attribute of ``ds`` affinely onto [0, 1]."""
    if method != "minmax":
        raise ValueError(f"unsupported normalisation {method!r}")
    return ds.with_values(MinMaxNormalizer(clip=False).fit_transform(ds.values))


def per_attribute_similarity(ds, a, i, j):
    """``1 - |a(x_i) - a(x_j)|`` for attribute index ``a``."""
    n, m = ds.values.shape
    if not (0 <= a < m):
        raise IndexError(f"attribute index {a} out of range")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"instance index out of range: ({i}, {j})")
    return 1.0 - abs(float(ds.values[i, a]) - float(ds.values[j, a]))


def attribute_similarities(values):
    """Per-attribute similarity tensor of shape (n_attributes, |X|, |X|)."""
    v = np.asarray(values, dtype=float)
    return 1.0 - np.abs(v.T[:, :, None] - v.T[:, None, :])


def attribute_differences(values):
    """Per-attribute ``|a(x) - a(y)|`` tensor of shape (n_attributes, |X|, |X|)."""
    v = np.asarray(values, dtype=float)
    return np.abs(v.T[:, :, None] - v.T[:, None, :])
