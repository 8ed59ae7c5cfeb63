"""Set functions on attribute subsets: fuzzy-rough dependency degrees,
monotonisation, audits and the simple reference measures."""

import json
import math
import os
from collections import namedtuple
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import subsets
from ._cache import WriteOnceCache
from .connectives import ConnectiveConfig, _implicator
from .dataset import attribute_differences
from .exceptions import DataError, MeasureError
from .fuzzy_rough import TNormFamily, crisp_positive_region

__all__ = [
    "AttributeMeasure",
    "BaseDistanceFamily",
    "Violation",
    "gamma_positive",
    "delta_positive",
    "gamma_distance",
    "delta_distance",
    "monotonize_measure",
    "audit_monotonicity",
    "explicit_measure",
    "counting_measure",
    "additive_measure",
    "measure_to_json",
    "measure_from_json",
    "load_measure",
]

MONOTONICITY_TOL = 1e-9
MAX_TABULATE = 20


class AttributeMeasure:
    """A set function on subsets of ``n_attributes`` attributes.

    Values are computed on demand by ``evaluator(mask)`` and memoised, so a
    Choquet integral only ever touches the subsets on its sorting chain.

    Parameters
    ----------
    n_attributes : int
    evaluator : callable
        Maps an integer subset mask to a non-negative float.
    kind : str
        Informational tag; ``"counting"`` enables the infinite-exponent
        limits of the Choquet p-distance.
    known_monotone, known_normalized : bool
        Flags describing guarantees of the construction.
    """

    def __init__(self, n_attributes, evaluator, kind="custom", known_monotone=False,
                 known_normalized=False, attribute_names=None):
        if n_attributes < 1:
            raise ValueError("a measure needs at least one attribute")
        self.n_attributes = int(n_attributes)
        self._evaluator = evaluator
        self.kind = kind
        self.known_monotone = known_monotone
        self.known_normalized = known_normalized
        self.attribute_names = (
            tuple(attribute_names) if attribute_names is not None
            else tuple(f"a{i + 1}" for i in range(self.n_attributes))
        )
        self._cache = WriteOnceCache()

    def __call__(self, subset):
        mask = subsets.to_mask(subset, self.n_attributes)
        return self._cache.get_or_compute(mask, lambda: float(self._evaluator(mask)))

    def __repr__(self):
        return f"AttributeMeasure(kind={self.kind!r}, n_attributes={self.n_attributes})"

    @property
    def full_mask(self):
        return subsets.full_mask(self.n_attributes)

    @property
    def is_counting(self):
        return self.kind == "counting"

    @property
    def n_cached(self):
        return len(self._cache)

    def tabulate(self):
        """Values for all ``2**n`` subsets, indexed by mask."""
        if self.n_attributes > MAX_TABULATE:
            raise MeasureError(f"refusing to tabulate 2**{self.n_attributes} subsets")
        return np.array([self(m) for m in range(1 << self.n_attributes)])

    def warm(self):
        """Precompute singletons and the full set."""
        for i in range(self.n_attributes):
            self(1 << i)
        self(self.full_mask)
        return self


# --- reference measures -----------------------------------------------------

def _cardinality(denom, mask):
    return subsets.size(mask) / denom


def counting_measure(n, normalized=False, attribute_names=None):
    """``|B|`` (or ``|B| / n`` when ``normalized``)."""
    denom = float(n) if normalized else 1.0
    return AttributeMeasure(
        n, partial(_cardinality, denom), kind="counting",
        known_monotone=True, known_normalized=normalized, attribute_names=attribute_names,
    )


def _weight_sum(weights, mask):
    return float(sum(weights[i] for i in subsets.members(mask)))


def additive_measure(weights, attribute_names=None):
    """``sum_{a in B} w(a)`` for non-negative per-attribute weights."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise DataError("weights must be a non-empty 1-d sequence")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DataError("weights must be finite and non-negative")
    return AttributeMeasure(
        w.size, partial(_weight_sum, tuple(w.tolist())), kind="additive", known_monotone=True,
        known_normalized=math.isclose(w.sum(), 1.0, rel_tol=0, abs_tol=1e-12),
        attribute_names=attribute_names,
    )


class _TableLookup:
    def __init__(self, table, default):
        self.table = table
        self.default = None if default is None else float(default)

    def __call__(self, mask):
        if mask in self.table:
            return self.table[mask]
        if self.default is None:
            raise MeasureError(f"explicit measure has no value for subset {subsets.members(mask)}")
        return self.default


def explicit_measure(entries, n, default=None, attribute_names=None):
    """Measure given by a table of ``(subset, value)`` pairs.

    The empty set maps to 0 unless listed. Subsets that are not listed take
    ``default``; with no default, querying them raises ``MeasureError``.
    """
    table = {}
    for subset, value in entries:
        mask = subsets.to_mask(subset, n)
        if mask in table:
            raise DataError(f"duplicate subset {subsets.members(mask)} in explicit measure")
        value = float(value)
        if not math.isfinite(value) or value < 0:
            raise DataError(f"measure value {value} must be finite and non-negative")
        table[mask] = value
    table.setdefault(0, 0.0)
    full = subsets.full_mask(n)
    normalized = table.get(full, default) == 1.0
    return AttributeMeasure(n, _TableLookup(table, default), kind="explicit", known_normalized=normalized,
                            attribute_names=attribute_names)


# --- fuzzy-rough dependency degrees ----------------------------------------

class _PositiveRegionRatio:
    def __init__(self, family, same_class, implicator, reduce, denom=None):
        self.family = family
        self.same_class = same_class
        self.implicator = implicator
        self.reduce = reduce
        self.denom = denom

    def region(self, mask):
        return crisp_positive_region(self.family(mask), self.same_class, self.implicator)

    def __call__(self, mask):
        return self.reduce(self.region(mask)) / self.denom


def _positive_measure(ds, cfg, family, reduce, kind, zero_msg):
    cfg = cfg or ConnectiveConfig()
    if family is None:
        family = TNormFamily(ds.values, cfg.t_norm)
    ratio = _PositiveRegionRatio(family, ds.same_class(), cfg.implicator, reduce)
    denom = reduce(ratio.region(family.full_mask))
    if not denom > 0:
        raise MeasureError(zero_msg)
    ratio.denom = denom
    return AttributeMeasure(
        ds.n_attributes, ratio, kind=kind,
        known_monotone=family.monotone, known_normalized=True,
        attribute_names=ds.attribute_names,
    )


def gamma_positive(ds, cfg=None, family=None):
    """Degree of dependency: ``sum_y POS_B(y) / sum_y POS_A(y)``.

    Parameters
    ----------
    ds : DecisionSystem
        Attribute values must lie in [0, 1].
    cfg : ConnectiveConfig, optional
    family : RelationFamily, optional
        Relation family to use instead of the t-norm construction.
    """
    return _positive_measure(ds, cfg, family, np.sum, "gamma_positive",
                             "full-attribute positive region vanishes")


def delta_positive(ds, cfg=None, family=None):
    """Worst-case dependency: ``min_y POS_B(y) / min_y POS_A(y)``."""
    return _positive_measure(
        ds, cfg, family, np.min, "delta_positive",
        "delta undefined: an instance lies fully outside the full-attribute positive region",
    )


@dataclass(frozen=True)
class BaseDistanceFamily:
    """Per-subset instance distances ``d_B`` feeding the distance-form measures.

    ``kind="minkowski"`` gives ``(sum_{a in B} |a(x) - a(y)|**q) ** (1/q)``
    (``q=inf`` is the max). ``kind="negated_similarity"`` gives
    ``N(R_B(x, y))`` with the relation and negator taken from ``connectives``.
    Both are monotone in ``B``.
    """

    kind: str = "minkowski"
    q: float = 1.0
    connectives: ConnectiveConfig = None

    def __post_init__(self):
        if self.kind not in ("minkowski", "negated_similarity"):
            raise ValueError(f"unknown base distance kind {self.kind!r}")
        if self.kind == "minkowski" and not (self.q >= 1):
            raise ValueError("Minkowski exponent q must be >= 1")

    @classmethod
    def parse(cls, name, connectives=None):
        name = str(name).lower()
        presets = {"manhattan": 1.0, "euclidean": 2.0, "chebyshev": math.inf}
        if name in presets:
            return cls("minkowski", presets[name])
        if name.startswith("minkowski"):
            q = name.partition(":")[2] or "1"
            return cls("minkowski", float(q))
        if name in ("negated_similarity", "negated-similarity", "similarity"):
            return cls("negated_similarity", connectives=connectives or ConnectiveConfig())
        raise ValueError(f"unknown base distance {name!r}")

    def bind(self, values):
        """Return ``mask -> (|X|, |X|) distance matrix`` for ``values``."""
        values = np.asarray(values, dtype=float)
        if self.kind == "negated_similarity":
            cfg = self.connectives or ConnectiveConfig()
            return _NegatedSimilarity(TNormFamily(values, cfg.t_norm), cfg.implicator)
        return _MinkowskiSum(attribute_differences(values), self.q)


class _NegatedSimilarity:
    def __init__(self, family, implicator):
        self.family = family
        self.implicator = implicator

    def __call__(self, mask):
        R = self.family(mask)
        return _implicator(self.implicator, R, np.zeros_like(R))


class _MinkowskiSum:
    def __init__(self, diffs, q):
        self.q = q
        self.n = diffs.shape[1]
        self.diffs = diffs if q in (1, math.inf) else diffs ** q

    def __call__(self, mask):
        idx = subsets.members(mask)
        if not idx:
            return np.zeros((self.n, self.n))
        if math.isinf(self.q):
            return self.diffs[idx].max(axis=0)
        s = self.diffs[idx].sum(axis=0)
        return s if self.q == 1 else s ** (1.0 / self.q)


class _NearestOtherRatio:
    def __init__(self, dist, same_class, reduce, denom=None):
        self.dist = dist
        self.same_class = same_class
        self.reduce = reduce
        self.denom = denom

    def nearest_other(self, mask):
        return np.where(self.same_class, np.inf, self.dist(mask)).min(axis=1)

    def __call__(self, mask):
        return self.reduce(self.nearest_other(mask)) / self.denom


def _distance_measure(ds, base, reduce, kind, zero_msg):
    base = base or BaseDistanceFamily()
    same = ds.same_class()
    if same.all(axis=1).any():
        raise MeasureError("measure undefined: some instance has no out-of-class instance")
    ratio = _NearestOtherRatio(base.bind(ds.values), same, reduce)
    denom = reduce(ratio.nearest_other(subsets.full_mask(ds.n_attributes)))
    if not denom > 0:
        raise MeasureError(zero_msg)
    ratio.denom = denom
    return AttributeMeasure(
        ds.n_attributes, ratio, kind=kind,
        known_monotone=True, known_normalized=True, attribute_names=ds.attribute_names,
    )


def gamma_distance(ds, base=None):
    """Normalised mean distance to the nearest out-of-class instance under ``d_B``.

    ``base`` defaults to the Manhattan family, whose values are used raw:
    any rescaling cancels in the ratio.
    """
    return _distance_measure(ds, base, np.sum, "gamma_distance",
                             "dataset has duplicate instances across classes under d_A")


def delta_distance(ds, base=None):
    """Like :func:`gamma_distance` with the worst case (min) instead of the sum."""
    return _distance_measure(
        ds, base, np.min, "delta_distance",
        "dataset has duplicate instances across classes under d_A "
        "(some instance is at distance 0 from another class)",
    )


# --- monotonisation and audits ---------------------------------------------

def monotonize_measure(raw, n, attribute_names=None):
    """``mu_m(B) = max_{S <= B} raw(S) / max_S raw(S)``.

    ``raw`` is any non-negative set function on masks that vanishes at the
    empty set. Evaluation is lazy: the unnormalised maximum for ``B`` is the
    larger of ``raw(B)`` and the memoised values of its one-smaller subsets.
    """
    if float(raw(0)) != 0.0:
        raise MeasureError("set function must vanish at the empty set")
    upper = _SubsetMaximum(raw)
    top = upper(subsets.full_mask(n))
    if not top > 0:
        raise MeasureError("cannot normalize zero measure")
    upper.top = top
    return AttributeMeasure(n, upper.normalized, kind="monotonized",
                            known_monotone=True, known_normalized=True,
                            attribute_names=attribute_names)


class _SubsetMaximum:
    """Memoised ``max_{S <= B} raw(S)``."""

    def __init__(self, raw):
        self.raw = raw
        self.cache = WriteOnceCache()
        self.top = None

    def __call__(self, mask):
        return self.cache.get_or_compute(mask, lambda: self._compute(mask))

    def _compute(self, mask):
        v = float(self.raw(mask))
        if v < 0 or math.isnan(v):
            raise MeasureError(f"set function is negative at {subsets.members(mask)}")
        for sub in subsets.immediate_submasks(mask):
            v = max(v, self(sub))
        return v

    def normalized(self, mask):
        return self(mask) / self.top


Violation = namedtuple("Violation", "smaller larger excess")


def audit_monotonicity(m, tol=MONOTONICITY_TOL, n_samples=10000, seed=0):
    """Witnessed violations ``A < B`` with ``m(A) > m(B) + tol``.

    Up to 20 attributes every covering pair ``(B minus {a}, B)`` is checked,
    which is exhaustive. Larger arities check ``n_samples`` random covering
    pairs. Subsets in the result are 0-based index tuples.
    """
    n = m.n_attributes
    out = []

    def check(mask, sub):
        excess = m(sub) - m(mask)
        if excess > tol:
            out.append(Violation(tuple(subsets.members(sub)), tuple(subsets.members(mask)), excess))

    if n <= MAX_TABULATE:
        for mask in range(1, 1 << n):
            for sub in subsets.immediate_submasks(mask):
                check(mask, sub)
    else:
        rng = np.random.default_rng(seed)
        for _ in range(n_samples):
            bits = rng.random(n) < 0.5
            if not bits.any():
                continue
            mask = subsets.to_mask(np.flatnonzero(bits))
            drop = int(rng.choice(np.flatnonzero(bits)))
            check(mask, mask ^ (1 << drop))
    return out


# --- JSON exchange format --------------------------------------------------

def measure_to_json(m, subset_masks=None):
    """Document ``{"attributes", "entries", "default"}`` for ``m``.

    ``subset_masks`` defaults to every subset (size-then-lexicographic order).
    """
    names = list(m.attribute_names)
    masks = subsets.iter_all(m.n_attributes) if subset_masks is None else subset_masks
    entries = [
        {"subset": [names[i] for i in subsets.members(mask)], "value": m(mask)}
        for mask in masks
    ]
    return {"attributes": names, "entries": entries, "default": None}


def measure_from_json(doc, attribute_names=None):
    """Build an explicit measure from a parsed JSON document.

    When ``attribute_names`` is given, the document's attributes must be the
    same set; values are remapped to that order.
    """
    try:
        file_names = [str(a) for a in doc["attributes"]]
        raw_entries = doc["entries"]
    except (KeyError, TypeError):
        raise DataError("measure document needs 'attributes' and 'entries'") from None
    names = list(attribute_names) if attribute_names is not None else file_names
    if sorted(file_names) != sorted(names) or len(set(file_names)) != len(file_names):
        raise DataError(f"measure attributes {file_names} do not match dataset attributes {names}")
    index = {a: i for i, a in enumerate(names)}
    entries = []
    for e in raw_entries:
        try:
            members = [index[str(a)] for a in e["subset"]]
        except KeyError as err:
            raise DataError(f"unknown attribute {err.args[0]!r} in measure entry") from None
        if len(set(members)) != len(members):
            raise DataError(f"repeated attribute in subset {e['subset']}")
        entries.append((members, e["value"]))
    return explicit_measure(entries, len(names), default=doc.get("default"), attribute_names=names)


def load_measure(source, attribute_names=None):
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    return measure_from_json(doc, attribute_names)
