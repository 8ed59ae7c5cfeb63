"""Command-line interface: ``frchoquet {measure,distmat,classify,eval,demo}``.

Exit codes: 0 success, 1 reproduction check failed (demo), 2 usage or
validation error, 3 computation error.
"""

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import subsets
from .choquet import distance_matrix, matrix_to_json, parse_p, write_matrix_csv
from .classifier import ChoquetKNNClassifier, evaluate_kfold, evaluate_loo
from .connectives import Implicator, TNorm
from .dataset import load_decision_system, normalize_attributes
from .demo import format_demo, run_demo
from .exceptions import DataError, DomainError, MeasureError
from .measures import (
    AttributeMeasure,
    BaseDistanceFamily,
    additive_measure,
    audit_monotonicity,
    counting_measure,
    load_measure,
    measure_to_json,
    monotonize_measure,
)

logger = logging.getLogger("frchoquet")

EXIT_OK, EXIT_REPRO, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3

KINDS = {
    "gamma-d": "gamma_distance",
    "delta-d": "delta_distance",
    "gamma-pos": "gamma_positive",
    "delta-pos": "delta_positive",
    "counting": "counting",
    "additive": "additive",
    "explicit": "explicit",
}


def _dump(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(text, output):
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_data_args(p, required=True, name="--input"):
    p.add_argument(name, required=required, help="CSV file with a header row")
    p.add_argument("--label", help="decision column (default: last column)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--id-column", help="column holding instance identifiers")
    p.add_argument("--no-normalize", action="store_true",
                   help="data is already in [0, 1]; skip min-max scaling")


def _add_measure_args(p):
    p.add_argument("--kind", choices=sorted(KINDS), default="gamma-d")
    p.add_argument("--base", default="manhattan",
                   help="manhattan | euclidean | chebyshev | minkowski:q | negated-similarity")
    p.add_argument("--tnorm", default="min", choices=["min", "prod", "luk"])
    p.add_argument("--implicator", default="luk", choices=["luk", "kd", "godel"])
    p.add_argument("--normalized", action="store_true", help="counting measure divided by n")
    p.add_argument("--weights", help="comma-separated per-attribute weights (additive kind)")
    p.add_argument("--measure-file", help="JSON measure document (explicit kind)")
    p.add_argument("--monotonize", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="frchoquet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="evaluate an attribute measure")
    _add_data_args(p, required=False)
    _add_measure_args(p)
    p.add_argument("--n-attributes", type=int, help="arity when no --input is given")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true", help="every subset (n <= 20)")
    g.add_argument("--subset", action="append", help="comma-separated attribute names; repeatable")
    p.add_argument("--audit", action="store_true", help="append a monotonicity audit")
    p.add_argument("--output")

    p = sub.add_parser("distmat", help="pairwise Choquet p-distances")
    _add_data_args(p)
    _add_measure_args(p)
    p.add_argument("--p", default="1")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--round", type=int, dest="decimals")
    p.add_argument("--threads", type=int)
    p.add_argument("--output")

    for name, helptext in (("classify", "predict labels for a query file"),
                           ("eval", "leave-one-out or k-fold accuracy")):
        p = sub.add_parser(name, help=helptext)
        _add_data_args(p, name="--train" if name == "classify" else "--input")
        _add_measure_args(p)
        p.add_argument("--p", default="1")
        p.add_argument("--k", type=int, default=1)
        p.add_argument("--vote", choices=["majority", "distance"], default="majority")
        p.add_argument("--threads", type=int)
        p.add_argument("--output")
        if name == "classify":
            p.add_argument("--query", required=True)
        else:
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--loo", action="store_true")
            g.add_argument("--kfold", type=int)
            p.add_argument("--seed", type=int, default=42)
            p.add_argument("--measures", action="store_true", help="include fold measures")

    p = sub.add_parser("demo", help="reproduce the bundled flu example")
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true", help="fail on the known asymmetric cell too")
    p.add_argument("--output")
    return parser


def _load(args, path):
    ds = load_decision_system(path, label=args.label, delimiter=args.delimiter, id_column=args.id_column)
    if args.no_normalize:
        if not ds.is_unit_range():
            raise DataError("--no-normalize given but some attribute values lie outside [0, 1]")
        return ds
    return normalize_attributes(ds)


def _weights(text):
    try:
        return [float(w) for w in text.split(",")]
    except ValueError:
        raise DataError(f"cannot parse weights {text!r}") from None


def _estimator(args, **extra):
    return ChoquetKNNClassifier(
        measure=KINDS[args.kind], base=args.base, t_norm=TNorm.parse(args.tnorm).value,
        implicator=Implicator.parse(args.implicator).value, normalized_counting=args.normalized,
        weights=_weights(args.weights) if args.weights else None,
        measure_source=args.measure_file, monotonize=args.monotonize, **extra,
    )


def _fit_measure(args, ds):
    # normalisation already happened at load time
    est = _estimator(args, normalize=False)
    est.fit(ds.values, ds.labels, ds.instance_ids, ds.attribute_names)
    return est.measure_


def _measure_without_data(args):
    n = args.n_attributes
    names = [f"a{i + 1}" for i in range(n)] if n else None
    if args.kind == "counting" and n:
        return counting_measure(n, args.normalized, names)
    if args.kind == "additive" and args.weights:
        w = _weights(args.weights)
        return additive_measure(w, [f"a{i + 1}" for i in range(len(w))])
    if args.kind == "explicit" and args.measure_file:
        return load_measure(args.measure_file)
    raise DataError(f"--input is required for measure kind {args.kind!r}")


def cmd_measure(args):
    if args.input:
        m = _fit_measure(args, _load(args, args.input))
    else:
        m = _measure_without_data(args)
        if args.monotonize:
            m = monotonize_measure(m, m.n_attributes, m.attribute_names)
    if args.all:
        if m.n_attributes > 20:
            raise DataError("--all supports at most 20 attributes")
        masks = None
    else:
        index = {a: i for i, a in enumerate(m.attribute_names)}
        masks = []
        for spec in args.subset:
            names = [s.strip() for s in spec.split(",") if s.strip()]
            try:
                masks.append(subsets.to_mask(index[a] for a in names))
            except KeyError as err:
                raise DataError(f"unknown attribute {err.args[0]!r}") from None
    doc = measure_to_json(m, masks)
    doc["kind"] = m.kind
    if args.audit:
        doc["audit"] = [
            {"smaller": [m.attribute_names[i] for i in v.smaller],
             "larger": [m.attribute_names[i] for i in v.larger], "excess": v.excess}
            for v in audit_monotonicity(m)
        ]
    _emit(_dump(doc), args.output)
    return EXIT_OK


def cmd_distmat(args):
    ds = _load(args, args.input)
    m = _fit_measure(args, ds)
    D = distance_matrix(ds, m, parse_p(args.p), n_jobs=args.threads)
    if args.format == "json":
        text = _dump(matrix_to_json(D, ds.instance_ids, args.decimals))
    else:
        buf = io.StringIO()
        write_matrix_csv(D, ds.instance_ids, buf, args.decimals)
        text = buf.getvalue()
    _emit(text, args.output)
    return EXIT_OK


def _read_queries(path, args, attribute_names):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh, delimiter=args.delimiter) if any(c.strip() for c in r)]
    if not rows:
        raise DataError("empty query file")
    header = [h.strip() for h in rows[0]]
    missing = [a for a in attribute_names if a not in header]
    if missing:
        raise DataError(f"query file lacks attributes {missing}")
    extra = [h for h in header if h not in attribute_names and h not in (args.label, args.id_column)]
    label_col = args.label or (extra[-1] if len(extra) == 1 else None)
    if len(extra) > (1 if label_col in extra else 0):
        raise DataError(f"query file has unexpected columns {extra}")
    cols = [header.index(a) for a in attribute_names]
    X, labels, ids = [], [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"query line {r}: expected {len(header)} fields, got {len(row)}")
        try:
            X.append([float(row[c]) for c in cols])
        except ValueError:
            raise DataError(f"query line {r}: non-numeric attribute value") from None
        if label_col in header:
            labels.append(row[header.index(label_col)].strip())
        ids.append(row[header.index(args.id_column)].strip() if args.id_column in header else f"q{r - 1}")
    if not X:
        raise DataError("query file has no rows")
    return np.array(X), (labels or None), ids


def cmd_classify(args):
    train = load_decision_system(args.train, label=args.label, delimiter=args.delimiter, id_column=args.id_column)
    if args.no_normalize and not train.is_unit_range():
        raise DataError("--no-normalize given but some attribute values lie outside [0, 1]")
    Xq, truth, qids = _read_queries(args.query, args, train.attribute_names)
    est = _estimator(args, p=parse_p(args.p), n_neighbors=args.k, vote=args.vote,
                     normalize=not args.no_normalize, n_jobs=args.threads)
    est.fit(train.values, train.labels, train.instance_ids, train.attribute_names)
    reports = est.predict_report(Xq)
    for qid, rep in zip(qids, reports):
        rep["id"] = qid
    doc = {"predictions": reports}
    if truth is not None:
        correct = sum(str(r["winner"]) == t or _same_label(r["winner"], t) for r, t in zip(reports, truth))
        doc["accuracy"] = correct / len(truth)
    summary = "\n".join(f"{r['id']}: {r['winner']} (nearest {r['neighbours'][0]['id']} "
                        f"at {r['neighbours'][0]['distance']:.4f})" for r in reports)
    _report(doc, summary, args.output)
    return EXIT_OK


def _same_label(a, b):
    try:
        return float(a) == float(b)
    except (TypeError, ValueError):
        return False


def cmd_eval(args):
    ds = load_decision_system(args.input, label=args.label, delimiter=args.delimiter, id_column=args.id_column)
    if args.no_normalize and not ds.is_unit_range():
        raise DataError("--no-normalize given but some attribute values lie outside [0, 1]")
    est = _estimator(args, p=parse_p(args.p), n_neighbors=args.k, vote=args.vote,
                     normalize=not args.no_normalize)
    if args.loo:
        report = evaluate_loo(ds, est, return_measures=args.measures, n_jobs=args.threads)
        mode = "leave-one-out"
    else:
        report = evaluate_kfold(ds, est, args.kfold, args.seed, return_measures=args.measures,
                                n_jobs=args.threads)
        mode = f"{args.kfold}-fold (seed {args.seed})"
    acc = report["accuracy"]
    summary = (f"{mode}: accuracy {acc:.4f} ({report['n_correct']}/{report['n_evaluated']})"
               if acc is not None else f"{mode}: no fold could be evaluated")
    if report["fold_errors"]:
        summary += f"; {len(report['fold_errors'])} fold(s) skipped"
    _report(report, summary, args.output)
    return EXIT_OK


def _report(doc, summary, output):
    if output:
        _emit(_dump(doc), output)
        print(summary)
    else:
        sys.stdout.write(_dump(doc))
        print(summary, file=sys.stderr)


def cmd_demo(args):
    report = run_demo(strict=args.strict)
    _emit(_dump(report) if args.json else format_demo(report), args.output)
    return EXIT_OK if report["passed"] else EXIT_REPRO


COMMANDS = {"measure": cmd_measure, "distmat": cmd_distmat, "classify": cmd_classify,
            "eval": cmd_eval, "demo": cmd_demo}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)
    try:
        return COMMANDS[args.command](args)
    except MeasureError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_COMPUTE
    except (DataError, DomainError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
