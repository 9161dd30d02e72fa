"""Classifier suite tests: contracts, oracles, determinism, serialization."""

import json
import math

import numpy as np
import pytest

from agcdetect import ml
from agcdetect.ml import _tree
from agcdetect.ml.boosting import log_loss, softmax, softmax_gradients


def toy_multiclass(seed=7, n=120, d=8):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = np.zeros(n, dtype=int)
    y[X[:, 0] > 0.4] = 1
    y[X[:, 1] > 0.7] = 2
    y[X[:, 2] > 1.0] = 3
    return X, y


# ---------------------------------------------------------------- gini

class TestGini:
    def test_pure_node(self):
        assert ml.gini([10, 0, 0, 0]) == 0.0

    def test_even_two_class(self):
        assert ml.gini([5, 5, 0, 0]) == pytest.approx(0.5)

    def test_uniform_four_class(self):
        assert ml.gini([1, 1, 1, 1]) == pytest.approx(0.75)

    def test_empty_node_raises(self):
        with pytest.raises(ml.EmptyNode):
            ml.gini([0, 0, 0, 0])


# ---------------------------------------------------------------- decision tree

class TestDecisionTree:
    def test_one_feature_perfect_split(self):
        X = np.array([[0.0], [1.0], [10.0], [11.0]])
        y = np.array([0, 0, 1, 1])
        m = ml.train_decision_tree(X, y)
        assert np.array_equal(m.predict(X), y)

    def test_duplicate_x_conflicting_y_majority(self):
        X = np.array([[1.0], [1.0], [2.0], [2.0], [2.0]])
        y = np.array([0, 1, 2, 2, 3])
        m = ml.train_decision_tree(X, y)
        # first leaf has a 1-1 tie -> lowest class id
        assert np.array_equal(m.predict(X), [0, 0, 2, 2, 2])

    def test_distinct_rows_shattered(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(200, 6))
        assert len(np.unique(X, axis=0)) == len(X)
        y = rng.integers(0, 4, size=200)
        m = ml.train_decision_tree(X, y)
        assert np.mean(m.predict(X) == y) == 1.0

    def test_tie_breaks_lowest_feature_then_threshold(self):
        # features 1 and 0 both split perfectly; feature 0 must win
        X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        y = np.array([0, 0, 1, 1])
        m = ml.train_decision_tree(X, y)
        assert m.root.feature == 0
        assert m.root.threshold == pytest.approx(1.5)

    def test_lowest_threshold_among_equal_gains(self):
        # alternating labels: every boundary has equal (zero) gain; the
        # root must pick the first midpoint of the lowest feature
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0, 1, 0, 1])
        m = ml.train_decision_tree(X, y)
        assert m.root.feature == 0
        assert m.root.threshold == pytest.approx(0.5)
        assert np.array_equal(m.predict(X), y)  # still shatters below

    def test_scores_are_leaf_fractions(self):
        X = np.array([[1.0], [1.0], [1.0], [5.0]])
        y = np.array([0, 1, 1, 3])
        m = ml.train_decision_tree(X, y)
        s = m.predict_scores(np.array([[1.0], [5.0]]))
        assert np.allclose(s[0], [1 / 3, 2 / 3, 0, 0])
        assert np.allclose(s[1], [0, 0, 0, 1])

    def test_dimension_mismatch(self):
        X, y = toy_multiclass()
        m = ml.train_decision_tree(X, y)
        with pytest.raises(ml.DimensionMismatch):
            m.predict(X[:, :-1])


# ---------------------------------------------------------------- random forest

class TestRandomForest:
    def test_single_tree_no_bootstrap_equals_cart(self):
        X, y = toy_multiclass(seed=11)
        cfg = ml.RandomForestConfig(n_trees=1, bootstrap=False,
                                    features_per_split=X.shape[1])
        rf = ml.train_random_forest(X, y, cfg, seed=5)
        dt = ml.train_decision_tree(X, y)
        probe = np.random.default_rng(0).normal(size=(300, X.shape[1]))
        assert np.array_equal(rf.predict(probe), dt.predict(probe))

    def test_fixed_seed_reproducible(self):
        X, y = toy_multiclass(seed=2, n=80)
        cfg = ml.RandomForestConfig(n_trees=12)
        a = ml.train_random_forest(X, y, cfg, seed=9)
        b = ml.train_random_forest(X, y, cfg, seed=9)
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
        probe = np.random.default_rng(1).normal(size=(50, X.shape[1]))
        assert np.array_equal(a.predict(probe), b.predict(probe))

    def test_votes_are_tree_fractions(self):
        X, y = toy_multiclass(seed=4, n=60)
        cfg = ml.RandomForestConfig(n_trees=10)
        m = ml.train_random_forest(X, y, cfg, seed=1)
        s = m.predict_scores(X[:7])
        assert np.all(s * 10 == np.round(s * 10))   # counts out of 10 trees
        assert np.allclose(s.sum(axis=1), 1.0)


# ---------------------------------------------------------------- naive Bayes

class TestGaussianNB:
    def test_boundary_matches_analytic_point(self):
        rng = np.random.default_rng(17)
        mu0, s0, mu1, s1 = 0.0, 1.0, 3.0, 1.5
        n = 60000
        X = np.concatenate([rng.normal(mu0, s0, n),
                            rng.normal(mu1, s1, n)])[:, None]
        y = np.array([0] * n + [1] * n)
        m = ml.train_gaussian_nb(X, y)

        def logpdf(x, mu, s):
            return -0.5 * math.log(2 * math.pi * s * s) \
                - (x - mu) ** 2 / (2 * s * s)

        # analytic equal-likelihood point between the means
        lo, hi = mu0, mu1
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if logpdf(mid, mu0, s0) > logpdf(mid, mu1, s1):
                lo = mid
            else:
                hi = mid
        analytic = 0.5 * (lo + hi)

        lo, hi = mu0, mu1
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if m.predict(np.array([[mid]]))[0] == 0:
                lo = mid
            else:
                hi = mid
        fitted = 0.5 * (lo + hi)
        assert abs(fitted - analytic) <= 0.05 * abs(analytic)

    def test_identical_class_stats_predict_lowest(self):
        X = np.array([[0.0], [1.0], [0.0], [1.0]])
        y = np.array([0, 0, 1, 1])
        m = ml.train_gaussian_nb(X, y)
        s = m.predict_scores(np.array([[0.3]]))
        assert s[0, 0] == s[0, 1]
        assert m.predict(np.array([[0.3], [0.9]])).tolist() == [0, 0]

    def test_zero_variance_feature_smoothed(self):
        X = np.column_stack([np.ones(40), np.linspace(0, 1, 40)])
        y = np.array([0] * 20 + [1] * 20)
        m = ml.train_gaussian_nb(X, y)
        s = m.predict_scores(X)
        assert np.all(np.isfinite(s[:, :2]))

    def test_log_domain_survives_underflow(self):
        # densities underflow to 0 in linear space; log space must not care
        rng = np.random.default_rng(5)
        d = 60
        X0 = rng.normal(-40.0, 1.0, size=(30, d))
        X1 = rng.normal(40.0, 1.0, size=(30, d))
        X = np.vstack([X0, X1])
        y = np.array([0] * 30 + [1] * 30)
        m = ml.train_gaussian_nb(X, y)
        assert np.mean(m.predict(X) == y) == 1.0

    def test_equal_priors_override_frequency(self):
        # class 1 is 9x more frequent; at the symmetric midpoint the
        # likelihoods decide alone, so scores stay (near) symmetric
        rng = np.random.default_rng(8)
        X = np.concatenate([rng.normal(-1, 1, 50), rng.normal(1, 1, 450)])[:, None]
        y = np.array([0] * 50 + [1] * 450)
        m = ml.train_gaussian_nb(X, y)
        s = m.predict_scores(np.array([[0.0]]))[0]
        assert abs(s[0] - s[1]) < 0.5   # no log(9) prior tilt (~2.2)


# ---------------------------------------------------------------- KNN

def knn_oracle(Xtr, ytr, Xq, k):
    mean, std = Xtr.mean(axis=0), Xtr.std(axis=0)
    kept = std > 0

    def z(rows):
        out = np.zeros_like(rows, dtype=float)
        out[:, kept] = (rows[:, kept] - mean[kept]) / std[kept]
        return out

    Ztr = z(Xtr)
    preds = []
    for q in z(Xq):
        d2 = ((Ztr - q) ** 2).sum(axis=1)
        order = sorted(range(len(d2)), key=lambda i: (d2[i], i))[:k]
        votes = [0, 0, 0, 0]
        for i in order:
            votes[ytr[i]] += 1
        preds.append(max(range(4), key=lambda c: (votes[c], -c)))
    return np.array(preds)


class TestKnn:
    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(23)
        Xtr = rng.normal(size=(90, 2))
        ytr = rng.integers(0, 3, size=90)
        Xq = rng.normal(size=(200, 2))
        m = ml.train_knn(Xtr, ytr)
        assert np.array_equal(m.predict(Xq), knn_oracle(Xtr, ytr, Xq, k=5))

    def test_k1_training_accuracy(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(40, 3))
        y = rng.integers(0, 4, size=40)
        m = ml.train_knn(X, y, ml.KnnConfig(k=1))
        assert np.mean(m.predict(X) == y) == 1.0

    def test_query_on_training_point(self):
        X = np.array([[0.0, 0.0], [4.0, 4.0], [9.0, 1.0]])
        y = np.array([2, 0, 1])
        m = ml.train_knn(X, y, ml.KnnConfig(k=1))
        assert m.predict(X[1:2])[0] == 0

    def test_distance_tie_lowest_index(self):
        # rows 0 and 1 are mirror images, both equidistant from the origin
        X = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 8.0]])
        y = np.array([3, 1, 2])
        m = ml.train_knn(X, y, ml.KnnConfig(k=1))
        assert m.predict(np.array([[0.0, 0.0]]))[0] == 3

    def test_vote_tie_lowest_class(self):
        X = np.array([[0.0], [1.0], [10.0], [11.0]])
        y = np.array([2, 2, 1, 1])
        m = ml.train_knn(X, y, ml.KnnConfig(k=4))
        assert m.predict(np.array([[5.0]]))[0] == 1

    def test_zero_variance_feature_ignored(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(50, 3))
        y = rng.integers(0, 4, size=50)
        Xc = X.copy()
        Xc[:, 1] = 7.7                      # constant column
        Xq = rng.normal(size=(30, 3))
        ma = ml.train_knn(Xc, y)
        Xq2 = Xq.copy()
        Xq2[:, 1] = -3.0                    # wildly different constant value
        assert np.array_equal(ma.predict(Xq), ma.predict(Xq2))

    def test_needs_k_rows(self):
        with pytest.raises(ValueError):
            ml.train_knn(np.zeros((3, 2)), np.array([0, 1, 2]))

    def test_scale_by_ten_invariant(self):
        X, y = toy_multiclass(seed=31, n=80, d=4)
        Xq = np.random.default_rng(2).normal(size=(60, 4))
        a = ml.train_knn(X, y)
        b = ml.train_knn(X * 10.0, y)
        assert np.array_equal(a.predict(Xq), b.predict(Xq * 10.0))


# ---------------------------------------------------------------- linear SVM

class TestLinearSvm:
    def test_separable_two_class(self):
        rng = np.random.default_rng(13)
        X0 = rng.normal(size=(30, 2)) + [-4.0, 0.0]
        X1 = rng.normal(size=(30, 2)) + [4.0, 0.0]
        X = np.vstack([X0, X1])
        y = np.array([0] * 30 + [1] * 30)
        m = ml.train_linear_svm(X, y, ml.LinearSvmConfig(c_grid=(1e2,)))
        assert np.mean(m.predict(X) == y) == 1.0

    def test_cv_folds_reproducible_and_stratified(self):
        y = np.random.default_rng(4).integers(0, 4, size=90)
        f1 = ml.stratified_kfold(y, 3, seed=21)
        f2 = ml.stratified_kfold(y, 3, seed=21)
        assert all(np.array_equal(a, b) for a, b in zip(f1, f2))
        assert sorted(np.concatenate(f1).tolist()) == list(range(90))
        for cls in range(4):
            per_fold = [int(np.sum(y[f] == cls)) for f in f1]
            assert max(per_fold) - min(per_fold) <= 1

    def test_accuracy_tie_prefers_smaller_c(self):
        rng = np.random.default_rng(6)
        X = np.vstack([rng.normal(size=(24, 2)) + [-8, 0],
                       rng.normal(size=(24, 2)) + [8, 0]])
        y = np.array([0] * 24 + [1] * 24)
        m = ml.train_linear_svm(X, y, ml.LinearSvmConfig(c_grid=(0.5, 1.0, 2.0)))
        accs = set(m.cv_accuracy.values())
        assert accs == {1.0}            # every C separates this set
        assert m.chosen_c == 0.5

    def test_deterministic(self):
        X, y = toy_multiclass(seed=19, n=72, d=5)
        a = ml.train_linear_svm(X, y, seed=3)
        b = ml.train_linear_svm(X, y, seed=3)
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())

    def test_scale_by_ten_invariant(self):
        rng = np.random.default_rng(41)
        X = np.vstack([rng.normal(size=(24, 3)) + [-5, 2, 0],
                       rng.normal(size=(24, 3)) + [5, -2, 1]])
        y = np.array([0] * 24 + [1] * 24)
        Xq = rng.normal(size=(40, 3)) * 4.0
        a = ml.train_linear_svm(X, y)
        b = ml.train_linear_svm(X * 10.0, y)
        assert np.array_equal(a.predict(Xq), b.predict(Xq * 10.0))

    def test_needs_six_rows(self):
        with pytest.raises(ValueError):
            ml.train_linear_svm(np.zeros((5, 2)), np.array([0, 1, 0, 1, 0]))


# ---------------------------------------------------------------- GBT

class TestGbt:
    def test_zero_rounds_predicts_lowest(self):
        X, y = toy_multiclass(seed=1, n=30)
        m = ml.train_gbt(X, y, ml.GbtConfig(n_rounds=0))
        assert np.all(m.predict(X) == 0)
        assert np.all(m.predict_scores(X) == 0.0)

    def test_round_zero_gradient(self):
        F = np.zeros((5, 4))
        y = np.array([2, 0, 3, 1, 2])
        g, h = softmax_gradients(F, y)
        expected = np.full((5, 4), 0.25)
        expected[np.arange(5), y] -= 1.0
        assert np.array_equal(g, expected)
        assert np.allclose(h, 0.25 * 0.75)

    def test_softmax_gradient_finite_difference(self):
        rng = np.random.default_rng(12)
        F = rng.normal(size=(10, 4))
        y = rng.integers(0, 4, size=10)
        g, h = softmax_gradients(F, y)
        eps = 1e-5
        n = len(y)
        for i in range(10):
            for k in range(4):
                Fp, Fm = F.copy(), F.copy()
                Fp[i, k] += eps
                Fm[i, k] -= eps
                num = (log_loss(Fp, y) - log_loss(Fm, y)) / (2 * eps)
                assert abs(num - g[i, k] / n) < 1e-6

    def test_softmax_hessian_finite_difference(self):
        rng = np.random.default_rng(15)
        F = rng.normal(size=(6, 4))
        y = rng.integers(0, 4, size=6)
        _, h = softmax_gradients(F, y)
        eps = 1e-4
        n = len(y)
        for i in range(6):
            for k in range(4):
                Fp, Fm = F.copy(), F.copy()
                Fp[i, k] += eps
                Fm[i, k] -= eps
                num = (log_loss(Fp, y) - 2 * log_loss(F, y)
                       + log_loss(Fm, y)) / eps ** 2
                assert abs(num - h[i, k] / n) < 5e-5

    def test_training_loss_non_increasing(self):
        X, y = toy_multiclass(seed=29, n=80, d=6)
        cfg = ml.GbtConfig(n_rounds=25, learning_rate=0.3,
                           subsample=1.0, colsample=1.0)
        m = ml.train_gbt(X, y, cfg, seed=2)
        F = np.zeros((len(y), 4))
        losses = [log_loss(F, y)]
        for trees in m.rounds:
            for k in range(4):
                F[:, k] += _tree.tree_values(trees[k], X)
            losses.append(log_loss(F, y))
        diffs = np.diff(losses)
        assert np.all(diffs <= 1e-12)
        assert losses[-1] < losses[0]

    def test_deterministic(self):
        X, y = toy_multiclass(seed=37, n=60, d=5)
        cfg = ml.GbtConfig(n_rounds=12)
        a = ml.train_gbt(X, y, cfg, seed=8)
        b = ml.train_gbt(X, y, cfg, seed=8)
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())

    def test_min_child_weight_blocks_tiny_splits(self):
        # Hessian mass at round 0 is 0.1875/row: 6 rows per child needed
        # for min_child_weight 1.2, so 8 rows cannot split legally
        X = np.arange(8, dtype=float)[:, None]
        y = np.array([0, 1, 0, 1, 0, 1, 0, 1])
        cfg = ml.GbtConfig(n_rounds=1, subsample=1.0, colsample=1.0)
        m = ml.train_gbt(X, y, cfg, seed=0)
        assert all(t.is_leaf for t in m.rounds[0])


# ---------------------------------------------------------------- cross-variant

ALL_TAGS = list(ml.CLASSIFIER_TAGS)


def small_fit(tag, seed=5):
    X, y = toy_multiclass(seed=13, n=64, d=5)
    config = None
    if tag == "rf":
        config = ml.RandomForestConfig(n_trees=8)
    if tag == "gbt":
        config = ml.GbtConfig(n_rounds=6)
    if tag == "svm":
        config = ml.LinearSvmConfig(epochs=60)
    return ml.train_classifier(tag, X, y, config=config, seed=seed), X, y


class TestCrossVariant:
    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_predict_matches_scores_argmax(self, tag):
        m, X, y = small_fit(tag)
        probe = np.random.default_rng(44).normal(size=(80, X.shape[1]))
        scores = m.predict_scores(probe)
        assert np.array_equal(m.predict(probe), np.argmax(scores, axis=1))

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_constant_score_shift_keeps_predictions(self, tag):
        m, X, y = small_fit(tag)
        probe = np.random.default_rng(45).normal(size=(40, X.shape[1]))
        scores = m.predict_scores(probe)
        assert np.array_equal(np.argmax(scores + 4.0, axis=1),
                              np.argmax(scores, axis=1))

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_training_deterministic_byte_identical(self, tag):
        a, X, y = small_fit(tag, seed=6)
        b, _, _ = small_fit(tag, seed=6)
        assert json.dumps(ml.model_to_dict(a), sort_keys=True) == \
            json.dumps(ml.model_to_dict(b), sort_keys=True)

    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_dimension_mismatch(self, tag):
        m, X, y = small_fit(tag)
        with pytest.raises(ml.DimensionMismatch):
            m.predict(X[:, :-1])

    def test_exact_tie_scores_label_zero(self):
        scores = np.array([[0.25, 0.25, 0.25, 0.25]])
        assert np.argmax(scores, axis=1)[0] == 0
        assert np.argmax(np.array([[0.1, 0.7, 0.1, 0.1]]), axis=1)[0] == 1

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            ml.train_classifier("mlp", np.zeros((4, 2)), np.zeros(4, dtype=int))


# ---------------------------------------------------------------- serialization

class TestSerialization:
    @pytest.mark.parametrize("tag", ALL_TAGS)
    def test_round_trip_exact(self, tag, tmp_path):
        m, X, y = small_fit(tag)
        path = tmp_path / f"{tag}.json"
        ml.save_model(m, path)
        loaded = ml.load_model(path)
        probe = np.random.default_rng(46).normal(size=(30, X.shape[1]))
        assert np.array_equal(m.predict_scores(probe),
                              loaded.predict_scores(probe))
        assert json.dumps(ml.model_to_dict(m), sort_keys=True) == \
            json.dumps(ml.model_to_dict(loaded), sort_keys=True)

    def test_rejects_bad_version(self, tmp_path):
        m, _, _ = small_fit("dt")
        payload = ml.model_to_dict(m)
        payload["format_version"] = 99
        with pytest.raises(ml.UnknownModelFormat):
            ml.model_from_dict(payload)

    def test_rejects_unknown_variant(self):
        with pytest.raises(ml.UnknownModelFormat):
            ml.model_from_dict({"format_version": 1, "variant": "lstm",
                                "model": {}})

    def test_rejects_non_json(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("not json at all {")
        with pytest.raises(ml.UnknownModelFormat):
            ml.load_model(path)
