import io
import json

import numpy as np
import pytest

from conftest import random_system
from frchoquet import subsets
from frchoquet.connectives import ConnectiveConfig
from frchoquet.dataset import DecisionSystem
from frchoquet.exceptions import DataError, MeasureError
from frchoquet.fuzzy_rough import RelationFamily, monotonize_relation_family
from frchoquet.measures import (
    AttributeMeasure,
    BaseDistanceFamily,
    additive_measure,
    audit_monotonicity,
    counting_measure,
    delta_distance,
    delta_positive,
    explicit_measure,
    gamma_distance,
    gamma_positive,
    load_measure,
    measure_from_json,
    measure_to_json,
    monotonize_measure,
)


def brute_nearest_other(ds, subset, q=1):
    X, y = ds.values, list(ds.labels)
    out = []
    for i in range(len(X)):
        out.append(min(
            sum(abs(X[z][a] - X[i][a]) ** q for a in subset) ** (1 / q)
            for z in range(len(X)) if y[z] != y[i]
        ))
    return out


def brute_gamma_d(ds, subset, q=1):
    full = range(ds.n_attributes)
    return sum(brute_nearest_other(ds, subset, q)) / sum(brute_nearest_other(ds, full, q))


def brute_delta_d(ds, subset, q=1):
    full = range(ds.n_attributes)
    return min(brute_nearest_other(ds, subset, q)) / min(brute_nearest_other(ds, full, q))


def test_gamma_positive_examples(flu):
    g = gamma_positive(flu)
    assert g(0b111) == 1.0
    assert g(0) == 0.0
    # POS_{a3} = (0.9, 0.95, 0.9, 0.9) equals POS_A by brute force
    assert g(0b100) == pytest.approx((0.9 + 0.95 + 0.9 + 0.9) / (0.9 + 0.95 + 0.9 + 0.9))


def test_delta_positive_examples(flu):
    d = delta_positive(flu)
    assert d(0b111) == 1.0
    assert d(0) == 0.0
    assert d(0b010) == pytest.approx(0.05 / 0.9)


def test_gamma_distance_published_values(flu):
    g = gamma_distance(flu)
    assert g(0b010) == pytest.approx(0.19, abs=0.005)
    assert g(0b110) == pytest.approx(0.83, abs=0.005)
    assert g(0b001) == 0.0
    for s in subsets.iter_all(3):
        assert g(s) == pytest.approx(brute_gamma_d(flu, subsets.members(s)), abs=1e-12)


def test_delta_distance_examples(flu):
    d = delta_distance(flu)
    assert d(0b111) == 1.0
    assert d(0b010) == pytest.approx(0.05)
    assert d(0b001) == 0.0


@pytest.mark.parametrize("q", [1, 2, 3])
def test_distance_measures_match_brute_force(q):
    rng = np.random.default_rng(40 + q)
    base = BaseDistanceFamily("minkowski", q)
    for _ in range(10):
        ds = random_system(rng, n_attr=int(rng.integers(1, 5)))
        g, d = gamma_distance(ds, base), delta_distance(ds, base)
        for s in subsets.iter_all(ds.n_attributes):
            idx = subsets.members(s)
            assert g(s) == pytest.approx(brute_gamma_d(ds, idx, q), abs=1e-12)
            assert d(s) == pytest.approx(brute_delta_d(ds, idx, q), abs=1e-12)


def test_chebyshev_base():
    ds = DecisionSystem([[0.0, 0.2], [0.5, 0.9], [0.1, 0.0]], [0, 1, 0], ["a", "b"])
    g = gamma_distance(ds, BaseDistanceFamily.parse("chebyshev"))
    # nearest out-of-class Chebyshev distances: full (0.7, 0.7, 0.9); {a}: (0.5, 0.4, 0.4)
    assert g(0b01) == pytest.approx(1.3 / 2.3)


def test_distance_measure_errors():
    dup = DecisionSystem([[0.1, 0.2], [0.1, 0.2], [0.5, 0.5]], [0, 1, 1], ["a", "b"])
    with pytest.raises(MeasureError, match="duplicate"):
        delta_distance(dup)
    one = DecisionSystem([[0.1], [0.2]], [1, 1], ["a"])
    with pytest.raises(MeasureError):
        gamma_distance(one)
    with pytest.raises(MeasureError):
        gamma_positive(one)


def test_delta_positive_zero_denominator():
    dup = DecisionSystem([[0.1, 0.2], [0.1, 0.2], [0.5, 0.5]], [0, 1, 1], ["a", "b"])
    with pytest.raises(MeasureError, match="delta undefined"):
        delta_positive(dup)


def test_measures_are_lazy(flu):
    g = gamma_distance(flu)
    g(0b011)
    assert g.n_cached == 1
    g.warm()
    assert g.n_cached == 5


def test_all_dependency_measures_bounded_and_monotone():
    rng = np.random.default_rng(2024)
    cfg = ConnectiveConfig()
    for _ in range(50):
        ds = random_system(rng)
        full = subsets.full_mask(ds.n_attributes)
        for build in (gamma_positive, delta_positive):
            m = build(ds, cfg)
            assert m(0) == 0.0 and m(full) == 1.0
            assert audit_monotonicity(m) == []
        for build in (gamma_distance, delta_distance):
            m = build(ds, BaseDistanceFamily())
            assert m(0) == 0.0 and m(full) == 1.0
            assert audit_monotonicity(m) == []


@pytest.mark.parametrize("tnorm", ["min", "prod", "luk"])
def test_negated_similarity_gamma_equals_positive_region_gamma(tnorm):
    rng = np.random.default_rng(77)
    cfg = ConnectiveConfig(tnorm, "luk")
    for _ in range(20):
        ds = random_system(rng)
        a = gamma_distance(ds, BaseDistanceFamily("negated_similarity", connectives=cfg))
        b = gamma_positive(ds, cfg)
        for s in subsets.iter_all(ds.n_attributes):
            assert abs(a(s) - b(s)) <= 1e-12


def separated_family(rng, ds):
    """Non-monotone random relation family whose full-attribute relation
    separates the classes completely (so POS_A is identically 1)."""
    n, k = ds.n_instances, ds.n_attributes
    same = ds.same_class()
    table = {0: np.ones((n, n))}
    for mask in range(1, 1 << k):
        R = rng.random((n, n))
        R = np.minimum(R, R.T)
        np.fill_diagonal(R, 1.0)
        table[mask] = R
    table[(1 << k) - 1] = np.where(same, table[(1 << k) - 1], 0.0)
    return RelationFamily(k, table.__getitem__)


def test_monotonization_inequalities_on_separated_systems():
    rng = np.random.default_rng(99)
    cfg = ConnectiveConfig()
    for _ in range(30):
        ds = random_system(rng, n_attr=int(rng.integers(1, 6)))
        fam = separated_family(rng, ds)
        mono_fam = monotonize_relation_family(fam)
        n = ds.n_attributes
        g_raw, d_raw = gamma_positive(ds, cfg, fam), delta_positive(ds, cfg, fam)
        g_m, d_m = monotonize_measure(g_raw, n), monotonize_measure(d_raw, n)
        g_fam, d_fam = gamma_positive(ds, cfg, mono_fam), delta_positive(ds, cfg, mono_fam)
        for s in range(1 << n):
            assert d_raw(s) <= g_raw(s) + 1e-12
            assert d_fam(s) <= g_fam(s) + 1e-12
            assert g_m(s) <= g_fam(s) + 1e-12
            assert d_m(s) <= d_fam(s) + 1e-12


def test_monotonize_examples(flu_mu):
    m = monotonize_measure(flu_mu, 3)
    for s in range(8):
        assert m(s) == flu_mu(s)
    raw = {0: 0.0, 1: 0.5, 2: 0.2, 3: 0.3}
    m = monotonize_measure(raw.__getitem__, 2)
    assert (m(1), m(2), m(3)) == (1.0, 0.4, 1.0)
    m = monotonize_measure(lambda s: 2.0 if s == 7 else 0.0, 3)
    assert [m(s) for s in range(8)] == [0.0] * 7 + [1.0]


def test_monotonize_errors():
    with pytest.raises(MeasureError, match="zero measure"):
        monotonize_measure(lambda s: 0.0, 3)
    with pytest.raises(MeasureError):
        monotonize_measure(lambda s: 1.0, 2)


def test_monotonize_matches_definition_and_passes_audit():
    rng = np.random.default_rng(6)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        vals = rng.random(1 << n)
        vals[0] = 0.0
        m = monotonize_measure(vals.__getitem__, n)
        top = vals.max()
        for s in range(1 << n):
            assert m(s) == max(vals[t] for t in subsets.iter_submasks(s)) / top
        assert m(subsets.full_mask(n)) == 1.0
        assert audit_monotonicity(m) == []


def test_audit_examples(flu):
    assert audit_monotonicity(gamma_distance(flu)) == []
    raw = explicit_measure([((0,), 0.5), ((1,), 0.2), ((0, 1), 0.3)], 2)
    found = [(v.smaller, v.larger) for v in audit_monotonicity(raw)]
    assert ((0,), (0, 1)) in found
    assert audit_monotonicity(counting_measure(5)) == []


def test_audit_sampling_mode():
    assert audit_monotonicity(counting_measure(25), n_samples=500) == []
    shrinking = AttributeMeasure(25, lambda s: 1.0 / subsets.size(s) if s else 0.0)
    found = audit_monotonicity(shrinking, n_samples=200)
    assert found and all(len(v.larger) == len(v.smaller) + 1 for v in found)


def test_reference_measures():
    w = additive_measure([0.2, 0.4, 0.4])
    assert w((1, 2)) == pytest.approx(0.8)
    assert counting_measure(3, normalized=True)((0,)) == pytest.approx(1 / 3)
    assert counting_measure(3)((0, 2)) == 2
    with pytest.raises(DataError):
        additive_measure([0.5, -0.1])


def test_explicit_measure(flu_mu):
    assert flu_mu((1, 2)) == 0.8
    assert flu_mu(0) == 0.0
    partial = explicit_measure([((0,), 0.3)], 2)
    with pytest.raises(MeasureError, match="no value"):
        partial((1,))
    assert explicit_measure([((0,), 0.3)], 2, default=0.7)((1,)) == 0.7
    with pytest.raises(DataError, match="duplicate"):
        explicit_measure([((0,), 0.3), ((0,), 0.4)], 2)


def test_json_round_trip(flu):
    g = gamma_distance(flu)
    doc = json.loads(json.dumps(measure_to_json(g)))
    assert doc["attributes"] == ["a1", "a2", "a3"]
    assert len(doc["entries"]) == 8
    back = load_measure(io.StringIO(json.dumps(doc)), flu.attribute_names)
    for s in range(8):
        assert back(s) == g(s)


def test_json_attribute_remap_and_errors():
    doc = {"attributes": ["b", "a"], "entries": [{"subset": ["a"], "value": 0.25}], "default": 0.5}
    m = measure_from_json(doc, ["a", "b"])
    assert m((0,)) == 0.25 and m((1,)) == 0.5
    with pytest.raises(DataError):
        measure_from_json(doc, ["a", "c"])
    dup = {"attributes": ["a"], "entries": [{"subset": ["a"], "value": 1}, {"subset": ["a"], "value": 1}]}
    with pytest.raises(DataError, match="duplicate"):
        measure_from_json(dup)
