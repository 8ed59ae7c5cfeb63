"""Fuzzy logic connectives: t-norms, implicators and induced negators.

Every function accepts scalars or numpy arrays (broadcast elementwise) and
returns a float for scalar input.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DomainError

__all__ = [
    "TNorm",
    "Implicator",
    "ConnectiveConfig",
    "t_norm_apply",
    "t_norm_fold",
    "implicator_apply",
    "induced_negator",
    "conjunctor_apply",
]


class _ParsableEnum(str, Enum):
    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if key == member.value or key in member.aliases:
                return member
        names = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown {cls.__name__} {value!r}; expected one of {names}")

    @property
    def aliases(self):
        return self._aliases.get(self.value, ())


class TNorm(_ParsableEnum):
    MINIMUM = "minimum"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"


TNorm._aliases = {"minimum": ("min",), "product": ("prod",), "lukasiewicz": ("luk",)}


class Implicator(_ParsableEnum):
    LUKASIEWICZ = "lukasiewicz"
    KLEENE_DIENES = "kleene_dienes"
    GODEL = "godel"


Implicator._aliases = {
    "lukasiewicz": ("luk",),
    "kleene_dienes": ("kd", "kleene-dienes"),
    "godel": ("goedel", "gödel"),
}


def _unit(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def _tnorm(kind, a, b):
    if kind is TNorm.MINIMUM:
        return np.minimum(a, b)
    if kind is TNorm.PRODUCT:
        return a * b
    # neutral element handled explicitly so T(1, x) == x holds bit for bit
    return np.where(a == 1.0, b, np.where(b == 1.0, a, np.maximum(0.0, a + b - 1.0)))


def t_norm_apply(kind, a, b):
    """Apply the t-norm ``kind`` to ``a`` and ``b``."""
    kind = TNorm.parse(kind)
    return _out(_tnorm(kind, _unit(a, "a"), _unit(b, "b")))


def conjunctor_apply(kind, a, b):
    # every t-norm is a conjunctor
    return t_norm_apply(kind, a, b)


def t_norm_fold(kind, values, axis=0):
    """Fold a t-norm over ``values`` along ``axis``.

    The empty fold returns the neutral element 1. For arrays, ``axis`` picks
    the dimension being reduced.
    """
    kind = TNorm.parse(kind)
    arr = _unit(values, "values")
    if arr.ndim == 0:
        return float(arr)
    if arr.shape[axis] == 0:
        shape = arr.shape[:axis] + arr.shape[axis + 1:]
        return _out(np.ones(shape))
    if kind is TNorm.MINIMUM:
        res = arr.min(axis=axis)
    elif kind is TNorm.PRODUCT:
        res = arr.prod(axis=axis)
    else:
        parts = np.moveaxis(arr, axis, 0)
        res = parts[0]
        for part in parts[1:]:
            res = _tnorm(kind, res, part)
    return _out(res)


def _implicator(kind, a, b):
    if kind is Implicator.LUKASIEWICZ:
        return np.minimum(1.0, 1.0 - a + b)
    if kind is Implicator.KLEENE_DIENES:
        return np.maximum(1.0 - a, b)
    return np.where(a <= b, 1.0, b)


def implicator_apply(kind, a, b):
    """Apply the implicator ``kind`` to antecedent ``a`` and consequent ``b``."""
    kind = Implicator.parse(kind)
    return _out(_implicator(kind, _unit(a, "a"), _unit(b, "b")))


def induced_negator(kind, x):
    """The negator ``x -> I(x, 0)`` induced by the implicator ``kind``."""
    kind = Implicator.parse(kind)
    x = _unit(x, "x")
    return _out(_implicator(kind, x, np.zeros_like(x)))


@dataclass(frozen=True)
class ConnectiveConfig:
    """T-norm (also used as conjunctor) and implicator for the approximations.

    Defaults are the minimum t-norm with the Lukasiewicz implicator, whose
    induced negator is ``1 - x``.
    """

    t_norm: TNorm = TNorm.MINIMUM
    implicator: Implicator = Implicator.LUKASIEWICZ

    def __post_init__(self):
        object.__setattr__(self, "t_norm", TNorm.parse(self.t_norm))
        object.__setattr__(self, "implicator", Implicator.parse(self.implicator))

    @property
    def conjunctor(self):
        return self.t_norm
