import json

import numpy as np
import pytest

import amatch


def test_flops_reference_values():
    assert amatch.flops_amatformer(1000, 128, 128) == 73924608
    assert amatch.flops_sgmnet(1000, 128, 128) == 156237824
    assert amatch.flops_superglue(1000, 128) == 449536000


def test_sinkhorn_marginals():
    rng = np.random.default_rng(0)
    scores = amatch.augment_dustbin(rng.uniform(-5, 5, size=(6, 9)), 0.0)
    assert scores.shape == (7, 10)
    plan = amatch.sinkhorn(scores, 100)
    np.testing.assert_allclose(plan[:6].sum(axis=1), 1.0, atol=1e-6)
    np.testing.assert_allclose(plan[:, :9].sum(axis=0), 1.0, atol=1e-6)


def test_extract_matches():
    plan = np.zeros((4, 4))
    plan[:3, :3] = 0.9 * np.eye(3)
    assert [(i, j) for i, j, _ in amatch.extract_matches(plan)] == [(0, 0), (1, 1), (2, 2)]


def test_problem_and_baseline(tmp_path):
    p = amatch.generate_problem(3)
    assert (p.n, p.m) == (64, 64)
    assert p.source_descriptors.shape == (64, 32)
    assert len(p.matches) == 48
    pred = amatch.nn_baseline(p)
    assert 0.0 <= amatch.precision(pred, p) <= 1.0
    assert amatch.precision(p.matches, p) == 1.0

    p.save(str(tmp_path / "problem"))
    back = amatch.Problem.load(str(tmp_path / "problem"))
    assert back.matches == p.matches
    np.testing.assert_allclose(back.source_xy, p.source_xy, atol=1e-4)


def test_model_round_trip(tmp_path):
    model = amatch.Model.init(json.dumps({"steps": 0}), seed=7)
    assert model.num_parameters > 0
    p = amatch.generate_problem(4)
    plan = model.plan(p)
    assert plan.shape == (p.n + 1, p.m + 1)
    matches = model.match(p)

    path = str(tmp_path / "m.ckpt")
    model.save(path)
    again = amatch.Model.load(path)
    assert again.tensor_names == model.tensor_names
    assert json.loads(again.config_json)["anchors"] == 16
    assert [(i, j) for i, j, _ in again.match(p)] == [(i, j) for i, j, _ in matches]


def test_short_training_run():
    model, precision = amatch.train(json.dumps({"eval_problems": 2}), steps=5)
    assert 0.0 <= precision <= 1.0
    assert isinstance(model, amatch.Model)


def test_errors_are_value_errors(tmp_path):
    with pytest.raises(amatch.Error):
        amatch.Model.load(str(tmp_path / "missing.ckpt"))
    with pytest.raises(ValueError):
        amatch.Model.init(json.dumps({"no_such_key": 1}))
