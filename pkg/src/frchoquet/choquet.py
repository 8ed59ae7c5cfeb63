"""Choquet integral over attribute scores and the Choquet p-distance."""

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .exceptions import DataError, MeasureError

__all__ = [
    "parse_p",
    "choquet_integral",
    "choquet_p_distance",
    "distance_matrix",
    "cross_distances",
    "write_matrix_csv",
    "matrix_to_json",
]


def parse_p(p):
    """Validate an exponent: a positive integer, ``inf`` or ``-inf``."""
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("inf", "+inf", "infinity", "+infinity", "max"):
            return math.inf
        if key in ("-inf", "-infinity", "min"):
            return -math.inf
        try:
            p = int(key)
        except ValueError:
            raise ValueError(f"invalid exponent {p!r}") from None
    if isinstance(p, float) and math.isinf(p):
        return p
    if isinstance(p, (bool, np.bool_)) or not float(p).is_integer() or p < 1:
        raise ValueError(f"exponent must be a positive integer or +/-inf, got {p!r}")
    return int(p)


def _chain_integral(f, m, order):
    # Abel form: sum_i (f_(i) - f_(i-1)) * m({f >= f_(i)}), f_(0) = 0.
    # Tied scores contribute an exact 0 term, so any tie order gives the same bits.
    total = 0.0
    prev = 0.0
    mask = m.full_mask
    for i in order:
        total += (f[i] - prev) * m(mask)
        prev = f[i]
        mask ^= 1 << int(i)
    return total


def choquet_integral(f, m):
    """Discrete Choquet integral of scores ``f`` with respect to measure ``m``.

    Scores are sorted ascending (ties broken by attribute index) and
    integrated along the chain of upper sets.
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size != m.n_attributes:
        raise DataError(f"score vector of length {f.size} does not match measure arity {m.n_attributes}")
    if not np.all(np.isfinite(f)):
        raise DataError("scores must be finite")
    order = np.argsort(f, kind="stable")
    return _chain_integral(f, m, order)


def choquet_p_distance(x, y, m, p=1):
    """``(integral |x - y|**p dm) ** (1/p)``.

    ``p = inf`` and ``p = -inf`` give the max and min coordinate difference
    and are only accepted for counting measures.
    """
    p = parse_p(p)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"instance shapes differ: {x.shape} vs {y.shape}")
    diff = np.abs(x - y)
    if math.isinf(p):
        if not m.is_counting:
            raise MeasureError("limit semantics defined only for the counting measure")
        if diff.size != m.n_attributes:
            raise DataError(f"instance of length {diff.size} does not match measure arity {m.n_attributes}")
        return float(diff.max() if p > 0 else diff.min())
    val = choquet_integral(diff if p == 1 else diff ** p, m)
    if p == 1:
        return val
    if val < 0:
        raise MeasureError("negative Choquet integral: the measure is not monotone")
    return val ** (1.0 / p)


def _rows(X, Y, m, p, rows, symmetric):
    out = []
    for i in rows:
        start = i + 1 if symmetric else 0
        out.append((i, [choquet_p_distance(X[i], Y[j], m, p) for j in range(start, len(Y))]))
    return out


def cross_distances(X, Y, m, p=1, n_jobs=None):
    """Distances from every row of ``X`` to every row of ``Y``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    D = np.zeros((len(X), len(Y)))
    for i, row in _run(X, Y, m, p, n_jobs, symmetric=False):
        D[i, :] = row
    return D


def distance_matrix(X, m, p=1, n_jobs=None):
    """Symmetric matrix of pairwise Choquet p-distances with a zero diagonal.

    Rows are computed on up to ``n_jobs`` threads; results do not depend on
    the number of workers. ``X`` may be a DecisionSystem or an array.
    """
    X = np.asarray(getattr(X, "values", X), dtype=float)
    n = len(X)
    D = np.zeros((n, n))
    for i, row in _run(X, X, m, p, n_jobs, symmetric=True):
        D[i, i + 1:] = row
        D[i + 1:, i] = row
    return D


def _run(X, Y, m, p, n_jobs, symmetric):
    p = parse_p(p)
    n_jobs = default_workers() if n_jobs is None else max(1, int(n_jobs))
    rows = list(range(len(X)))
    if n_jobs == 1 or len(rows) < 2:
        return _rows(X, Y, m, p, rows, symmetric)
    chunks = [rows[k::n_jobs] for k in range(n_jobs) if rows[k::n_jobs]]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = pool.map(lambda c: _rows(X, Y, m, p, c, symmetric), chunks)
        return [r for part in parts for r in part]


def default_workers():
    env = os.environ.get("FRCHOQUET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def write_matrix_csv(D, ids, target, decimals=None):
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            return write_matrix_csv(D, ids, fh, decimals)
    w = csv.writer(target, lineterminator="\n")
    w.writerow([""] + list(ids))
    for name, row in zip(ids, D):
        w.writerow([name] + [_fmt(v, decimals) for v in row])


def _fmt(v, decimals):
    v = float(v)
    return repr(v) if decimals is None else f"{round(v, decimals):.{decimals}f}"


def matrix_to_json(D, ids, decimals=None):
    rows = [[float(v) if decimals is None else round(float(v), decimals) for v in r] for r in D]
    return {"ids": list(ids), "matrix": rows}
