"""Similarity relations, fuzzy-rough approximations and positive regions."""

import numpy as np

from . import subsets
from ._cache import WriteOnceCache
from .connectives import (
    ConnectiveConfig,
    Implicator,
    TNorm,
    _implicator,
    _tnorm,
    _unit,
    t_norm_fold,
)
from .dataset import attribute_similarities
from .exceptions import DataError, MeasureError

__all__ = [
    "RelationFamily",
    "TNormFamily",
    "similarity_relation",
    "lower_approximation",
    "upper_approximation",
    "crisp_positive_region",
    "positive_region",
    "positive_region_general",
    "monotonize_relation_family",
]


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class RelationFamily:
    """Lazily evaluated, memoised map from attribute subsets to relations.

    Parameters
    ----------
    n_attributes : int
    builder : callable
        ``builder(mask) -> (|X|, |X|) array``.
    monotone : bool
        Declares ``A <= B  =>  R_B <= R_A`` (used as a fast path).
    """

    def __init__(self, n_attributes, builder, monotone=False):
        self.n_attributes = n_attributes
        self._builder = builder
        self.monotone = monotone
        self._cache = WriteOnceCache()

    def __call__(self, subset):
        mask = subsets.to_mask(subset, self.n_attributes)
        return self._cache.get_or_compute(mask, lambda: _readonly(self._builder(mask)))

    @property
    def full_mask(self):
        return subsets.full_mask(self.n_attributes)


class TNormFamily(RelationFamily):
    """``R_B(x, y) = T_{a in B} (1 - |a(x) - a(y)|)``; ``R_empty`` is all ones.

    Always a monotone family.
    """

    def __init__(self, values, t_norm=TNorm.MINIMUM):
        values = np.asarray(values, dtype=float)
        _unit(values, "attribute values")
        self.t_norm = TNorm.parse(t_norm)
        self._sims = attribute_similarities(values)
        super().__init__(values.shape[1], self._build, monotone=True)

    def _build(self, mask):
        return t_norm_fold(self.t_norm, self._sims[subsets.members(mask)], axis=0)


def similarity_relation(ds, subset, t_norm=TNorm.MINIMUM):
    """Relation on the instances of ``ds`` induced by an attribute subset."""
    mask = subsets.to_mask(subset, ds.n_attributes)
    sims = attribute_similarities(ds.values)
    _unit(sims, "attribute similarities")
    return t_norm_fold(t_norm, sims[subsets.members(mask)], axis=0)


def _check_pair(R, A):
    R = _unit(R, "relation")
    A = _unit(A, "membership")
    if R.ndim != 2 or R.shape[0] != R.shape[1] or A.shape != (R.shape[0],):
        raise DataError(f"dimension mismatch: relation {R.shape}, fuzzy set {A.shape}")
    return R, A


def lower_approximation(R, A, implicator=Implicator.LUKASIEWICZ):
    """``(apr_R A)(x) = min_y I(R(x, y), A(y))``."""
    R, A = _check_pair(R, A)
    kind = Implicator.parse(implicator)
    return _implicator(kind, R, A[None, :]).min(axis=1)


def upper_approximation(R, A, conjunctor=TNorm.MINIMUM):
    """``max_y C(R(x, y), A(y))`` with a t-norm as conjunctor."""
    R, A = _check_pair(R, A)
    kind = TNorm.parse(conjunctor)
    return _tnorm(kind, R, A[None, :]).max(axis=1)


def crisp_positive_region(R, same_class, implicator=Implicator.LUKASIEWICZ):
    """Positive region for a crisp decision relation.

    ``POS(y) = min_{z not in class(y)} N(R(y, z))`` where ``N`` is the
    negator induced by ``implicator``.
    """
    R = _unit(R, "relation")
    same_class = np.asarray(same_class, dtype=bool)
    if R.shape != same_class.shape:
        raise DataError(f"dimension mismatch: relation {R.shape}, decision relation {same_class.shape}")
    if same_class.all(axis=1).any():
        raise MeasureError("positive region undefined: no out-of-class instances")
    kind = Implicator.parse(implicator)
    neg = _implicator(kind, R, np.zeros_like(R))
    return np.where(same_class, np.inf, neg).min(axis=1)


def positive_region(ds, subset, cfg=None, family=None):
    """B-positive region of ``ds`` via the crisp-decision shortcut.

    ``family`` overrides the default t-norm relation family.
    """
    cfg = cfg or ConnectiveConfig()
    if family is None:
        R = similarity_relation(ds, subset, cfg.t_norm)
    else:
        R = family(subset)
    return crisp_positive_region(R, ds.same_class(), cfg.implicator)


def positive_region_general(ds, subset, cfg=None, decision_relation=None, family=None):
    """Positive region as the union over x of ``apr_{R_B}(R_d x)``.

    No crisp shortcut is taken; ``decision_relation`` may be any fuzzy
    relation (defaults to label equality).
    """
    cfg = cfg or ConnectiveConfig()
    R = similarity_relation(ds, subset, cfg.t_norm) if family is None else family(subset)
    Rd = ds.same_class().astype(float) if decision_relation is None else decision_relation
    Rd = _unit(Rd, "decision relation")
    if Rd.shape != R.shape:
        raise DataError(f"dimension mismatch: relation {R.shape}, decision relation {Rd.shape}")
    pos = np.zeros(R.shape[0])
    for x in range(R.shape[0]):
        pos = np.maximum(pos, lower_approximation(R, Rd[x], cfg.implicator))
    return pos


def monotonize_relation_family(family):
    """``R^m_A = min_{S subset of A} R_S``, lazily evaluated and memoised.

    Families already declared monotone are returned unchanged, since the
    minimum is then attained at ``S = A``.
    """
    if family.monotone:
        return family
    mono = RelationFamily(family.n_attributes, None, monotone=True)
    mono._builder = _SubsetMinimum(family, mono)
    return mono


class _SubsetMinimum:
    # R^m_A = min(R_A, R^m_{A minus a} for each a): every proper subset sits below some A minus a
    def __init__(self, family, memo):
        self.family = family
        self.memo = memo

    def __call__(self, mask):
        rel = self.family(mask)
        for sub in subsets.immediate_submasks(mask):
            rel = np.minimum(rel, self.memo(sub))
        return rel
