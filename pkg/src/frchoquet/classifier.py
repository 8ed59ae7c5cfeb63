"""k-nearest-neighbour classification with a fitted Choquet p-distance.

The estimator follows the scikit-learn API: ``fit`` builds the attribute
measure from the training labels, ``predict`` runs k-NN under the induced
Choquet distance.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, clone
from sklearn.model_selection import KFold, StratifiedKFold
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .choquet import cross_distances, parse_p
from .connectives import ConnectiveConfig
from .dataset import DecisionSystem, MinMaxNormalizer
from .exceptions import DataError, MeasureError
from .measures import (
    AttributeMeasure,
    BaseDistanceFamily,
    additive_measure,
    counting_measure,
    delta_distance,
    delta_positive,
    gamma_distance,
    gamma_positive,
    load_measure,
    measure_from_json,
    measure_to_json,
    monotonize_measure,
)

__all__ = ["ChoquetKNNClassifier", "evaluate_loo", "evaluate_kfold", "MEASURE_KINDS"]

MEASURE_KINDS = (
    "gamma_distance",
    "delta_distance",
    "gamma_positive",
    "delta_positive",
    "counting",
    "additive",
    "explicit",
)
WEIGHT_EPS = 1e-9


class ChoquetKNNClassifier(ClassifierMixin, BaseEstimator):
    """k-NN classifier under a Choquet p-distance.

    Parameters
    ----------
    measure : str or AttributeMeasure, default="gamma_distance"
        One of ``MEASURE_KINDS`` or a ready-made measure. Label-dependent
        kinds are refit on every call to ``fit``.
    base : str, default="manhattan"
        Base distance family for the distance-form measures
        (``manhattan``, ``euclidean``, ``chebyshev``, ``minkowski:q`` or
        ``negated_similarity``).
    t_norm, implicator : str
        Connectives for the positive-region measures and the
        ``negated_similarity`` base.
    p : int or float, default=1
        Choquet exponent; ``inf``/``-inf`` only with ``measure="counting"``.
    n_neighbors : int, default=1
    vote : {"majority", "distance"}
        ``"distance"`` weights each neighbour by ``1 / (d + 1e-9)``.
    normalize : bool, default=True
        Min-max scale with training parameters. Out-of-range query values
        are clamped with a warning. When False, values must lie in [0, 1].
    normalized_counting : bool, default=True
        Use ``|B| / n`` rather than ``|B|`` for ``measure="counting"``.
    weights : sequence of float, optional
        Per-attribute weights for ``measure="additive"``.
    measure_source : path or dict, optional
        JSON measure document for ``measure="explicit"``.
    monotonize : bool, default=False
        Replace the fitted set function by its monotonisation.
    n_jobs : int, optional
        Threads used for distance computation.
    """

    def __init__(self, measure="gamma_distance", base="manhattan", t_norm="minimum",
                 implicator="lukasiewicz", p=1, n_neighbors=1, vote="majority",
                 normalize=True, normalized_counting=True, weights=None,
                 measure_source=None, monotonize=False, n_jobs=None):
        self.measure = measure
        self.base = base
        self.t_norm = t_norm
        self.implicator = implicator
        self.p = p
        self.n_neighbors = n_neighbors
        self.vote = vote
        self.normalize = normalize
        self.normalized_counting = normalized_counting
        self.weights = weights
        self.measure_source = measure_source
        self.monotonize = monotonize
        self.n_jobs = n_jobs

    def _validate_params(self):
        if not isinstance(self.measure, AttributeMeasure) and self.measure not in MEASURE_KINDS:
            raise ValueError(f"unknown measure {self.measure!r}; expected one of {MEASURE_KINDS}")
        if int(self.n_neighbors) != self.n_neighbors or self.n_neighbors < 1:
            raise ValueError("n_neighbors must be a positive integer")
        if self.vote not in ("majority", "distance"):
            raise ValueError(f"unknown vote rule {self.vote!r}")
        parse_p(self.p)

    def _connectives(self):
        return ConnectiveConfig(self.t_norm, self.implicator)

    def _build_measure(self, ds):
        kind = self.measure
        names = ds.attribute_names
        if isinstance(kind, AttributeMeasure):
            if kind.n_attributes != ds.n_attributes:
                raise DataError(f"measure arity {kind.n_attributes} != {ds.n_attributes} attributes")
            return kind
        if kind == "gamma_distance":
            return gamma_distance(ds, BaseDistanceFamily.parse(self.base, self._connectives()))
        if kind == "delta_distance":
            return delta_distance(ds, BaseDistanceFamily.parse(self.base, self._connectives()))
        if kind == "gamma_positive":
            return gamma_positive(ds, self._connectives())
        if kind == "delta_positive":
            return delta_positive(ds, self._connectives())
        if kind == "counting":
            return counting_measure(ds.n_attributes, self.normalized_counting, names)
        if kind == "additive":
            if self.weights is None:
                raise ValueError("measure='additive' requires weights")
            if len(self.weights) != ds.n_attributes:
                raise DataError(f"expected {ds.n_attributes} weights, got {len(self.weights)}")
            return additive_measure(self.weights, names)
        if self.measure_source is None:
            raise ValueError("measure='explicit' requires measure_source")
        if isinstance(self.measure_source, dict):
            return measure_from_json(self.measure_source, names)
        return load_measure(self.measure_source, names)

    def fit(self, X, y, instance_ids=None, attribute_names=None):
        """Fit the attribute measure on ``(X, y)``.

        ``instance_ids`` and ``attribute_names`` only label neighbour
        reports and measure dumps.
        """
        self._validate_params()
        if getattr(y, "dtype", None) == object:
            # label arrays from DecisionSystem are object-typed; recover int/str dtype
            y = np.asarray(list(y))
        X, y = check_X_y(X, y, dtype=float, y_numeric=False)
        check_classification_targets(y)
        if self.normalize:
            self.normalizer_ = MinMaxNormalizer().fit(X)
            X = self.normalizer_.transform(X)
        else:
            self.normalizer_ = None
            _require_unit(X)
        names = attribute_names if attribute_names is not None else [f"a{i + 1}" for i in range(X.shape[1])]
        self.train_ = DecisionSystem(X, y, names, instance_ids)
        self.classes_ = np.unique(y)
        self.n_features_in_ = X.shape[1]
        raw = self._build_measure(self.train_)
        self.measure_ = monotonize_measure(raw, raw.n_attributes, names) if self.monotonize else raw
        self.measure_.warm()
        return self

    def _transform(self, X):
        check_is_fitted(self, "measure_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DataError(f"X has {X.shape[1]} features, but {type(self).__name__} "
                            f"is expecting {self.n_features_in_} features as input")
        if self.normalizer_ is not None:
            return self.normalizer_.transform(X)
        _require_unit(X)
        return X

    def kneighbors(self, X, n_neighbors=None, return_distance=True):
        """Indices (and distances) of the nearest training instances.

        Equal distances are ordered by training index.
        """
        k = self.n_neighbors if n_neighbors is None else n_neighbors
        Xq = self._transform(X)
        n_train = self.train_.n_instances
        if k > n_train:
            raise DataError(f"n_neighbors={k} exceeds the training size {n_train}")
        D = cross_distances(Xq, self.train_.values, self.measure_, self.p, self.n_jobs)
        ind = np.argsort(D, axis=1, kind="stable")[:, :k]
        dist = np.take_along_axis(D, ind, axis=1)
        return (dist, ind) if return_distance else ind

    def _vote(self, dist_row, ind_row):
        labels = self.train_.labels
        tallies = {}
        first_seen = {}
        for rank, (d, j) in enumerate(zip(dist_row, ind_row)):
            lab = labels[j]
            w = 1.0 if self.vote == "majority" else 1.0 / (d + WEIGHT_EPS)
            tallies[lab] = tallies.get(lab, 0.0) + w
            first_seen.setdefault(lab, rank)
        # ties go to the class holding the nearest (then lowest-index) neighbour
        winner = max(tallies, key=lambda lab: (tallies[lab], -first_seen[lab]))
        return winner, tallies

    def predict(self, X):
        dist, ind = self.kneighbors(X)
        return np.array([self._vote(d, i)[0] for d, i in zip(dist, ind)], dtype=self.classes_.dtype)

    def predict_report(self, X):
        """Per-query neighbour list, vote tallies and winning label."""
        dist, ind = self.kneighbors(X)
        out = []
        for d_row, i_row in zip(dist, ind):
            winner, tallies = self._vote(d_row, i_row)
            out.append({
                "neighbours": [
                    {"index": int(j), "id": self.train_.instance_ids[j],
                     "distance": float(d), "label": _jsonable(self.train_.labels[j])}
                    for d, j in zip(d_row, i_row)
                ],
                "winner": _jsonable(winner),
                "votes": {str(k): float(v) for k, v in tallies.items()},
            })
        return out

    def measure_report(self):
        check_is_fitted(self, "measure_")
        if self.measure_.n_attributes <= 20:
            return measure_to_json(self.measure_)
        return measure_to_json(self.measure_, [1 << i for i in range(self.measure_.n_attributes)])


def _require_unit(X):
    if np.any(X < 0.0) or np.any(X > 1.0):
        raise DataError("attribute values must lie in [0, 1] when normalisation is disabled")


def _jsonable(v):
    return v.item() if isinstance(v, np.generic) else v


def _run_fold(ds, estimator, train_idx, test_idx, with_measures):
    train = ds.subset(train_idx)
    if len(set(train.label_codes.tolist())) < 2:
        return {"error": "training fold has a single class", "test": list(map(int, test_idx))}
    model = clone(estimator)
    try:
        model.fit(train.values, train.labels, instance_ids=train.instance_ids,
                  attribute_names=ds.attribute_names)
        reports = model.predict_report(ds.values[test_idx])
    except MeasureError as err:
        return {"error": str(err), "test": list(map(int, test_idx))}
    rows = []
    for t, rep in zip(test_idx, reports):
        for nb in rep["neighbours"]:
            nb["index"] = int(train_idx[nb["index"]])
        truth = _jsonable(ds.labels[t])
        rows.append({
            "index": int(t), "id": ds.instance_ids[t], "label": truth,
            "predicted": rep["winner"], "correct": rep["winner"] == truth,
            "neighbours": rep["neighbours"], "votes": rep["votes"],
        })
    fold = {"test": list(map(int, test_idx)), "rows": rows}
    if with_measures:
        fold["measure"] = model.measure_report()
    return fold


def _evaluate(ds, estimator, splits, with_measures, n_jobs):
    splits = [(np.asarray(tr), np.asarray(te)) for tr, te in splits]

    def job(s):
        return _run_fold(ds, estimator, s[0], s[1], with_measures)

    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            folds = list(pool.map(job, splits))
    else:
        folds = [job(s) for s in splits]

    rows, errors, measures = [], [], []
    for f in folds:
        if "error" in f:
            errors.append({"test": f["test"], "error": f["error"]})
            continue
        rows.extend(f["rows"])
        if with_measures:
            measures.append({"test": f["test"], "measure": f["measure"]})
    rows.sort(key=lambda r: r["index"])
    n_correct = sum(r["correct"] for r in rows)
    report = {
        "accuracy": n_correct / len(rows) if rows else None,
        "n_correct": n_correct,
        "n_evaluated": len(rows),
        "n_instances": ds.n_instances,
        "fold_errors": errors,
        "predictions": rows,
    }
    if with_measures:
        report["fold_measures"] = measures
    return report


def evaluate_loo(ds, estimator, return_measures=False, n_jobs=None):
    """Leave-one-out accuracy of ``estimator`` on ``ds``, refitting per fold.

    Folds whose training part has a single class (or whose measure cannot be
    built) are listed in ``fold_errors`` and excluded from the accuracy.
    """
    n = ds.n_instances
    if n < 3:
        raise DataError("leave-one-out needs at least 3 instances")
    idx = np.arange(n)
    splits = [(np.delete(idx, i), np.array([i])) for i in range(n)]
    return _evaluate(ds, estimator, splits, return_measures, n_jobs)


def evaluate_kfold(ds, estimator, folds=5, seed=42, return_measures=False, n_jobs=None):
    """Seeded k-fold accuracy, stratified when every class has ``folds`` members."""
    n = ds.n_instances
    if folds < 2:
        raise DataError("need at least 2 folds")
    if folds > n:
        raise DataError(f"cannot split {n} instances into {folds} folds")
    codes = ds.label_codes
    if np.bincount(codes).min() >= folds:
        splitter = StratifiedKFold(folds, shuffle=True, random_state=seed)
        splits = list(splitter.split(ds.values, codes))
    else:
        splits = list(KFold(folds, shuffle=True, random_state=seed).split(ds.values))
    report = _evaluate(ds, estimator, splits, return_measures, n_jobs)
    report["folds"] = [sorted(map(int, te)) for _, te in splits]
    report["seed"] = seed
    return report
