import warnings

import numpy as np
import pytest

from batchbandit.envs.pricing import pricing_env_new, pricing_fit_reference, pricing_load, PricingDataset
from batchbandit.envs.synthetic import lowrank_env_new, sparse_env_new
from batchbandit.envs.warfarin import WarfarinEnv, dose_bucket, warfarin_load, warfarin_reward
from batchbandit.errors import InvalidConfig, ParseError, SchemaError, SingularDesignWarning


def test_sparse_parameters():
    env = sparse_env_new(3, 20, 4, 0.01, 0)
    assert env.beta.shape == (3, 20)
    assert np.all((env.beta != 0).sum(axis=1) == 4)
    assert np.all((env.beta >= 0) & (env.beta <= 1))
    dense = sparse_env_new(2, 6, 6, 0.0, 0)
    assert np.all(dense.beta != 0)
    with pytest.raises(InvalidConfig):
        sparse_env_new(2, 5, 6, 0.0, 0)
    with pytest.raises(InvalidConfig):
        sparse_env_new(2, 5, 2, -1.0, 0)


def test_sparse_noiseless_rewards_and_covariates():
    env = sparse_env_new(2, 8, 3, 0.0, 1)
    ep = env.episode(300, 1)
    for t in (1, 150, 300):
        rd = ep.round(t)
        assert np.all(np.abs(rd.context) <= 1.0)
        for k in range(2):
            assert rd.reward(k) == float(rd.context @ env.beta[k])
        assert rd.regret(rd.best_action()) == 0.0


def test_noise_clt():
    env = sparse_env_new(2, 5, 2, 0.5, 2)
    eps = env.episode(20_000, 2).noise
    assert abs(eps.mean()) < 4 * 0.5 / np.sqrt(20_000)
    assert abs(eps.std() - 0.5) < 0.02


def test_lowrank_parameters():
    env = lowrank_env_new(2, 6, 3, 0.01, 0)
    for k in range(2):
        assert np.linalg.matrix_rank(env.theta[k]) == 3
        assert np.count_nonzero(env.theta[k] - np.diag(np.diag(env.theta[k]))) == 0
    ep = env.episode(10, 0)
    rd = ep.round(4)
    assert rd.context.shape == (6, 6)
    assert rd.means[1] == pytest.approx(np.sum(rd.context * env.theta[1]))
    with pytest.raises(InvalidConfig):
        lowrank_env_new(2, 3, 4, 0.0, 0)


def test_same_seed_same_contexts():
    env = sparse_env_new(2, 5, 2, 0.1, 3)
    a, b = env.episode(50, 3), env.episode(50, 3)
    np.testing.assert_array_equal(a.contexts, b.contexts)
    np.testing.assert_array_equal(a.noise, b.noise)
    c = env.episode(50, 4)
    assert not np.allclose(a.contexts, c.contexts)


def test_dose_buckets():
    assert [dose_bucket(v) for v in (0, 20.99, 21, 49, 49.01, 100)] == [0, 0, 1, 1, 2, 2]


def test_warfarin_loader(data_dir):
    ds = warfarin_load(data_dir / "warfarin_toy.csv")
    assert ds.n == 3 and ds.d == 93
    assert ds.dropped == 1 and ds.imputed == 1
    assert list(ds.correct_dose) == [0, 1, 2]
    assert ds.features[2, 92] == 0.0
    assert warfarin_reward(ds, 0, 0) == 0.0
    assert warfarin_reward(ds, 0, 2) == -1.0
    with pytest.raises(ValueError):
        warfarin_reward(ds, 0, 3)


def test_warfarin_schema_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(SchemaError):
        warfarin_load(empty)
    short = tmp_path / "short.csv"
    short.write_text("dose_mg_week,f1\n3,1\n")
    with pytest.raises(SchemaError) as info:
        warfarin_load(short)
    assert "f2" in info.value.missing


def test_warfarin_parse_error_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("dose_mg_week,f1,f2\n30,1,2\n40,x,2\n")
    with pytest.raises(ParseError) as info:
        warfarin_load(p, n_features=2)
    assert info.value.line == 3


def _random_warfarin(tmp_path, n=3000, seed=0):
    rng = np.random.default_rng(seed)
    p = tmp_path / "w.csv"
    doses = rng.uniform(0, 70, n)
    lines = ["dose_mg_week,f1,f2"] + [f"{float(d)!r},{rng.random()!r},{rng.random()!r}" for d in doses]
    p.write_text("\n".join(lines) + "\n")
    return warfarin_load(p, n_features=2)


def test_warfarin_random_policy_and_regret(tmp_path):
    ds = _random_warfarin(tmp_path)
    ep = WarfarinEnv(ds).episode(None, 0)
    rng = np.random.default_rng(1)
    wrong = 0
    regret = 0.0
    for t in range(1, ep.T + 1):
        rd = ep.round(t)
        a = int(rng.integers(3))
        wrong += rd.reward(a) == -1.0
        regret += rd.regret(a)
    assert abs(wrong / ep.T - 2 / 3) < 0.03
    assert regret == wrong
    with pytest.raises(InvalidConfig):
        WarfarinEnv(ds).episode(ds.n + 1, 0)


def test_warfarin_shuffle_is_a_permutation(tmp_path):
    ds = _random_warfarin(tmp_path, n=200)
    ep = WarfarinEnv(ds).episode(None, 5)
    assert sorted(ep.order) == list(range(200))
    assert list(ep.order) != list(range(200))


def test_pricing_loader_and_exact_reference(data_dir):
    ds = pricing_load(data_dir / "pricing_toy.csv", n_features=2)
    assert ds.n == 8 and ds.d == 3
    np.testing.assert_array_equal(ds.contexts[:, 0], 1.0)
    assert ds.feature_names == ("intercept", "f1", "f2")
    ref = pricing_fit_reference(ds)
    np.testing.assert_allclose(ref.beta0, [50.0, 3.0, -2.0], atol=1e-8)
    np.testing.assert_allclose(ref.beta1, [-0.1, 0.01, 0.02], atol=1e-8)
    assert ref.residual_std < 1e-8
    assert not ref.singular


def test_pricing_oracle_has_zero_regret(data_dir):
    env = pricing_env_new(pricing_load(data_dir / "pricing_toy.csv", n_features=2), sigma=0.0)
    ep = env.episode(None, 0)
    total = sum(ep.round(t).regret(ep.round(t).best_action()) for t in range(1, ep.T + 1))
    assert abs(total) < 1e-6
    rd = ep.round(1)
    assert rd.revenue(1e6) == 0.0  # negative demand clamps to zero
    assert rd.reward(200.0) == pytest.approx(39.0)


def test_pricing_singular_design_warns():
    X = np.column_stack([np.ones(6), np.arange(6.0)])
    ds = PricingDataset(X, np.full(6, 300.0), np.arange(6.0) + 1)
    with pytest.warns(SingularDesignWarning):
        ref = pricing_fit_reference(ds)
    assert ref.singular


def test_pricing_schema_and_parse_errors(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("checkout_price,f1\n1,2\n")
    with pytest.raises(SchemaError):
        pricing_load(p, n_features=1)
    p.write_text("checkout_price,demand,f1\n1,2,3\n1,nan,3\n")
    with pytest.raises(ParseError) as info:
        pricing_load(p, n_features=1)
    assert info.value.line == 3
    p.write_text("checkout_price,demand,f1,f2\n1,2,3,4\n")
    with pytest.raises(SchemaError):
        pricing_load(p, n_features=1)


def test_pricing_horizon_checked(data_dir):
    env = pricing_env_new(pricing_load(data_dir / "pricing_toy.csv", n_features=2))
    with pytest.raises(InvalidConfig):
        env.episode(9, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert env.episode(4, 0).T == 4
