import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frchoquet.connectives import (
    ConnectiveConfig,
    Implicator,
    TNorm,
    implicator_apply,
    induced_negator,
    t_norm_apply,
    t_norm_fold,
)
from frchoquet.exceptions import DomainError

unit = st.floats(0.0, 1.0)


def test_tnorm_examples():
    assert t_norm_apply("minimum", 0.3, 0.7) == 0.3
    assert t_norm_apply("lukasiewicz", 1.0, 0.4) == 0.4
    assert t_norm_apply("lukasiewicz", 0.5, 0.4) == 0.0
    assert t_norm_apply("product", 0.5, 0.4) == pytest.approx(0.2)


def test_fold_examples():
    assert t_norm_fold("min", []) == 1.0
    assert t_norm_fold("min", [1.0, 0.9, 0.1]) == 0.1
    assert t_norm_fold("prod", [0.5, 0.5, 0.5]) == 0.125
    for kind in TNorm:
        assert t_norm_fold(kind, [0.37]) == 0.37


def test_fold_along_axis_of_empty_stack_is_ones():
    out = t_norm_fold("luk", np.empty((0, 3, 3)), axis=0)
    assert out.shape == (3, 3) and np.all(out == 1.0)


def test_implicator_examples():
    for kind in Implicator:
        assert implicator_apply(kind, 0, 0) == 1.0
        assert implicator_apply(kind, 0, 1) == 1.0
        assert implicator_apply(kind, 1, 1) == 1.0
        assert implicator_apply(kind, 1, 0) == 0.0
    assert implicator_apply("lukasiewicz", 0.7, 0.4) == pytest.approx(0.7)
    assert implicator_apply("kleene_dienes", 0.7, 0.4) == 0.4


def test_negator_examples():
    assert induced_negator("luk", 0.0) == 1.0
    assert induced_negator("luk", 0.1) == 0.9
    assert induced_negator("godel", 0.1) == 0.0
    for kind in Implicator:
        assert induced_negator(kind, 0.0) == 1.0
        assert induced_negator(kind, 1.0) == 0.0


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        t_norm_apply("min", bad, 0.5)
    with pytest.raises(DomainError):
        implicator_apply("luk", 0.5, bad)
    with pytest.raises(DomainError):
        induced_negator("kd", bad)
    with pytest.raises(DomainError):
        t_norm_fold("prod", [0.2, bad])


def test_parse_cli_aliases():
    assert TNorm.parse("min") is TNorm.MINIMUM
    assert TNorm.parse("prod") is TNorm.PRODUCT
    assert TNorm.parse("luk") is TNorm.LUKASIEWICZ
    assert Implicator.parse("kd") is Implicator.KLEENE_DIENES
    assert Implicator.parse("godel") is Implicator.GODEL
    with pytest.raises(ValueError):
        TNorm.parse("frank")


def test_config_defaults():
    cfg = ConnectiveConfig()
    assert cfg.t_norm is TNorm.MINIMUM
    assert cfg.implicator is Implicator.LUKASIEWICZ
    assert cfg.conjunctor is TNorm.MINIMUM
    assert ConnectiveConfig("prod", "kd").implicator is Implicator.KLEENE_DIENES


@pytest.mark.parametrize("kind", list(TNorm))
@given(a=unit, b=unit, c=unit)
def test_tnorm_axioms(kind, a, b, c):
    assert t_norm_apply(kind, a, b) == t_norm_apply(kind, b, a)
    assert t_norm_apply(kind, 1.0, a) == a
    assert 0.0 <= t_norm_apply(kind, a, b) <= 1.0
    nested = t_norm_apply(kind, a, t_norm_apply(kind, b, c))
    assert abs(t_norm_fold(kind, [a, b, c]) - nested) <= 1e-12
    # order independence of the fold
    assert abs(t_norm_fold(kind, [c, a, b]) - t_norm_fold(kind, [a, b, c])) <= 1e-12


@pytest.mark.parametrize("kind", list(Implicator))
def test_implicator_monotonicity_random(kind):
    rng = np.random.default_rng(11)
    a1, a2, b = rng.random((3, 1000))
    lo, hi = np.minimum(a1, a2), np.maximum(a1, a2)
    assert np.all(implicator_apply(kind, lo, b) >= implicator_apply(kind, hi, b))
    b1, b2, a = rng.random((3, 1000))
    lo, hi = np.minimum(b1, b2), np.maximum(b1, b2)
    assert np.all(implicator_apply(kind, a, lo) <= implicator_apply(kind, a, hi))


@given(x=unit)
def test_lukasiewicz_negator_is_one_minus(x):
    assert induced_negator("luk", x) == 1.0 - x


@pytest.mark.parametrize("kind", list(Implicator))
@given(x=unit, y=unit)
def test_negator_matches_implicator_and_is_nonincreasing(kind, x, y):
    assert induced_negator(kind, x) == implicator_apply(kind, x, 0.0)
    lo, hi = min(x, y), max(x, y)
    assert induced_negator(kind, lo) >= induced_negator(kind, hi)
