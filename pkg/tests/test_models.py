import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from chi2corr.corrections import compute_constants
from chi2corr.errors import IdempotencyError, ModelError, SchemaError, SymmetryError
from chi2corr.models import (
    MultinomialSpec,
    load_model,
    model_to_dict,
    multinomial_model,
    save_model,
)
from chi2corr.spectral import split_idempotent
from chi2corr.tensors import rotate, validate_symmetry


def test_two_cells():
    model = multinomial_model(MultinomialSpec((0.5, 0.5), 4))
    np.testing.assert_allclose(model.v0, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)
    assert split_idempotent(model.v0).k == 1


@pytest.mark.parametrize("probs", [(0.5, 0.5), (0.2, 0.3, 0.5), (0.1, 0.2, 0.3, 0.4)])
def test_exact_mean_and_variance(probs):
    model = multinomial_model(MultinomialSpec(probs, 5))
    mean, cov = oracles.standardized_moments(probs, 5)
    np.testing.assert_allclose(mean, model.mu1, atol=1e-13)
    # Cov X = v0 exactly, so v1 = 0
    np.testing.assert_allclose(cov, model.v0 + model.v1 / 5, atol=1e-13)
    assert not model.mu1.any() and not model.v1.any()


@pytest.mark.parametrize("probs", [(0.25,) * 4, (0.5, 0.5), (0.2, 0.3, 0.5), (0.1, 0.2, 0.3, 0.4)])
def test_cumulants_match_enumeration(probs):
    k3, k4 = oracles.multinomial_cumulant_coefficients(probs, n=6)
    model = multinomial_model(MultinomialSpec(probs, 6))
    np.testing.assert_allclose(model.k3, k3, rtol=0, atol=1e-6)
    np.testing.assert_allclose(model.k4, k4, rtol=0, atol=1e-6)


def test_leading_coefficients_do_not_depend_on_n():
    a = multinomial_model(MultinomialSpec((0.2, 0.3, 0.5), 3))
    b = multinomial_model(MultinomialSpec((0.2, 0.3, 0.5), 300))
    np.testing.assert_array_equal(a.k3, b.k3)
    np.testing.assert_array_equal(a.k4, b.k4)


@pytest.mark.parametrize("probs", [(0.6, 0.3), (1.0,), (0.5, 0.6), (0.5, -0.1, 0.6)])
def test_invalid_probabilities(probs):
    with pytest.raises(ModelError):
        MultinomialSpec(probs, 10)


def test_invalid_n():
    with pytest.raises(ModelError):
        MultinomialSpec((0.5, 0.5), 0)


@settings(max_examples=100, deadline=None)
@given(w=st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6), n=st.integers(1, 500))
def test_random_multinomials_are_valid(w, n):
    probs = np.array(w) / np.sum(w)
    probs[-1] = 1.0 - np.sum(probs[:-1])
    model = multinomial_model(MultinomialSpec(tuple(probs), n))
    assert validate_symmetry(model.k3).passed and validate_symmetry(model.k4).passed
    split = split_idempotent(model.v0)
    assert split.k == len(w) - 1
    r = split.r
    k = split.k
    assert np.max(np.abs(rotate(model.k3, r)[k:, :, :])) < 1e-10
    assert np.max(np.abs(rotate(model.k4, r)[k:, :, :, :])) < 1e-10
    cs = compute_constants(model, split)
    assert cs.a == 0.0 and cs.d == 0.0


def test_round_trip(tmp_path):
    model = multinomial_model(MultinomialSpec((0.1, 0.2, 0.3, 0.4), 17))
    path = tmp_path / "m.json"
    save_model(model, path)
    again = load_model(path)
    assert again == model
    for name in ("mu1", "v0", "v1", "k3", "k4"):
        assert np.array_equal(getattr(again, name), getattr(model, name))


def _write(tmp_path, doc):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    return path


def _doc():
    return model_to_dict(multinomial_model(MultinomialSpec((0.5, 0.25, 0.25), 4)))


def test_missing_field(tmp_path):
    doc = _doc()
    del doc["k4"]
    with pytest.raises(SchemaError, match="k4"):
        load_model(_write(tmp_path, doc))


def test_wrong_dimension(tmp_path):
    doc = _doc()
    doc["v1"] = [[0.0, 0.0], [0.0, 0.0]]
    with pytest.raises(SchemaError, match="v1"):
        load_model(_write(tmp_path, doc))


def test_asymmetric_k3_names_indices(tmp_path):
    doc = _doc()
    doc["k3"][0][0][1] += 0.5
    with pytest.raises(SymmetryError) as exc:
        load_model(_write(tmp_path, doc))
    assert "k3" in str(exc.value)
    assert exc.value.index is not None and exc.value.partner is not None
    assert sorted(exc.value.index) == sorted(exc.value.partner) == [0, 0, 1]


def test_non_idempotent_v0(tmp_path):
    doc = {
        "n": 3, "p": 2, "mu1": [0, 0], "v0": [[1, 0], [0, 0.5]], "v1": [[0, 0], [0, 0]],
        "k3": np.zeros((2,) * 3).tolist(), "k4": np.zeros((2,) * 4).tolist(),
    }
    with pytest.raises(IdempotencyError) as exc:
        load_model(_write(tmp_path, doc))
    assert str(tmp_path) in str(exc.value)


def test_bad_json(tmp_path):
    path = tmp_path / "m.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError, match="line 1"):
        load_model(path)
