import json

import numpy as np
import pytest

from src.config import GridConfig
from src.core.exceptions import DimensionMismatchError, ModelFormatError, NonFiniteFeatureError, SingleClassError
from src.modules.classifiers import (
    MlpClassifier,
    MlpModel,
    SvmClassifier,
    TrainedClassifier,
    grid_search_svm,
    init_mlp,
    kkt_violations,
    load_model,
    mlp_gradients,
    mlp_loss,
    mlp_predict,
    mlp_train,
    predict_labels,
    save_model,
    svm_predict,
    svm_train,
)
from src.modules.features import apply_pca, apply_standardizer, fit_pca_95, fit_standardizer

TIGHT = dict(tol=1e-10, max_passes=500)


def blobs(rng, n=40, centre=3.0, spread=0.5):
    X = np.vstack([rng.normal(-centre, spread, (n, 2)), rng.normal(centre, spread, (n, 2))])
    y = np.concatenate([-np.ones(n), np.ones(n)])
    return X, y


def xor_clusters(rng, n=50):
    corners = np.array([[1, 1], [-1, -1], [1, -1], [-1, 1]], dtype=np.float64)
    X = np.vstack([c + rng.normal(0, 0.2, (n, 2)) for c in corners])
    y = np.repeat([1.0, 1.0, -1.0, -1.0], n)
    return X, y


def rings(rng, n):
    angles = rng.uniform(0, 2 * np.pi, 2 * n)
    radii = np.concatenate([np.full(n, 1.0), np.full(n, 3.0)]) + rng.normal(0, 0.1, 2 * n)
    X = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    y = np.concatenate([np.ones(n), -np.ones(n)])
    return X, y


class TestSvm:
    def test_separable_blobs(self, rng):
        X, y = blobs(rng)
        model = svm_train(X, y, C=10.0, gamma=0.1)
        assert np.all(np.where(model.decision_function(X) >= 0, 1, -1) == y)
        assert model.converged
        assert kkt_violations(model, X, y, tol=1e-2) == 0

    def test_dual_feasibility(self, rng):
        X, y = xor_clusters(rng)
        model = svm_train(X, y, C=10.0, gamma=1.0)
        assert np.all(model.alphas > 0) and np.all(model.alphas <= model.C)
        assert abs(np.sum(model.dual_coef)) < 1e-6

    def test_xor_is_learned(self, rng):
        X, y = xor_clusters(rng)
        model = svm_train(X, y, C=10.0, gamma=1.0)
        assert np.mean(np.where(model.decision_function(X) >= 0, 1, -1) == y) >= 0.95

    def test_free_support_vectors_sit_on_the_margin(self, rng):
        X, y = xor_clusters(rng)
        model = svm_train(X, y, C=10.0, gamma=1.0)
        free = model.alphas < model.C
        assert np.any(free)
        values = model.decision_function(model.support_vectors[free])
        np.testing.assert_allclose(np.abs(values), 1.0, atol=1e-2)

    def test_duplicating_training_points_keeps_the_decision_function(self, rng):
        X, y = blobs(rng, n=20)
        queries = rng.uniform(-5, 5, (30, 2))
        single = svm_train(X, y, C=10.0, gamma=0.1, **TIGHT)
        doubled = svm_train(np.vstack([X, X]), np.concatenate([y, y]), C=10.0, gamma=0.1, **TIGHT)
        np.testing.assert_allclose(single.decision_function(queries), doubled.decision_function(queries), atol=1e-6)

    def test_mirrored_labels_negate_the_decision_function(self, rng):
        X, y = blobs(rng, n=20)
        queries = rng.uniform(-5, 5, (30, 2))
        model = svm_train(X, y, C=10.0, gamma=0.1, **TIGHT)
        mirrored = svm_train(X, -y, C=10.0, gamma=0.1, **TIGHT)
        np.testing.assert_allclose(model.decision_function(queries), -mirrored.decision_function(queries), atol=1e-6)

    def test_far_points_fall_back_to_bias(self, rng):
        X, y = blobs(rng, n=10)
        model = svm_train(X, y, C=10.0, gamma=0.1)
        label, value = svm_predict(model, np.array([1e3, 1e3]))
        assert value == pytest.approx(model.bias, abs=1e-6)
        assert label == (1 if model.bias >= 0 else -1)

    def test_training_errors(self, rng):
        X, y = blobs(rng, n=5)
        with pytest.raises(SingleClassError):
            svm_train(X, np.ones(10), C=10.0, gamma=0.1)
        bad = X.copy()
        bad[0, 0] = np.inf
        with pytest.raises(NonFiniteFeatureError):
            svm_train(bad, y, C=10.0, gamma=0.1)
        model = svm_train(X, y, C=10.0, gamma=0.1)
        with pytest.raises(DimensionMismatchError):
            svm_predict(model, np.ones(3))

    def test_sklearn_estimator_maps_labels(self, rng):
        X, y = blobs(rng, n=15)
        labels = np.where(y > 0, "B", "A")
        clf = SvmClassifier(C=10.0, gamma=0.1).fit(X, labels)
        assert list(clf.predict(X)) == list(labels)


class TestGridSearch:
    def test_visits_the_four_protocol_cells(self, rng):
        X, y = blobs(rng, n=15)
        result = grid_search_svm(X, y, X, y)
        assert sorted(result.accuracies) == [(10.0, 1e-4), (10.0, 0.1), (1e4, 1e-4), (1e4, 0.1)]
        assert result.best_accuracy == max(result.accuracies.values())
        assert len(result.to_dict()["cells"]) == 4

    def test_records_convergence_of_every_cell(self, rng):
        X, y = xor_clusters(rng, n=20)
        grid = GridConfig(max_passes=1)
        result = grid_search_svm(X, y, X, y, grid)
        for (c_value, gamma), converged in result.converged.items():
            assert converged == svm_train(X, y, c_value, gamma, tol=grid.tol, max_passes=1).converged
        cells = result.to_dict()["cells"]
        assert result.n_unconverged == sum(not cell["converged"] for cell in cells)

    def test_ties_go_to_smallest_c_then_gamma(self, rng):
        X, y = blobs(rng, n=15)
        # every point appears with both labels, so each cell scores exactly 0.5
        points = rng.normal(0, 3, (5, 2))
        X_val = np.vstack([points, points])
        y_val = np.concatenate([np.ones(5), -np.ones(5)])
        result = grid_search_svm(X, y, X_val, y_val)
        assert set(result.accuracies.values()) == {0.5}
        assert (result.best_c, result.best_gamma) == (10.0, 1e-4)

    def test_selects_the_width_that_separates_rings(self, rng):
        X, y = rings(rng, 50)
        X_val, y_val = rings(rng, 20)
        result = grid_search_svm(X, y, X_val, y_val, GridConfig())
        assert result.best_gamma == 0.1
        assert result.best_accuracy >= 0.95
        assert result.model.gamma == 0.1


def random_small_net(rng, input_dim=3, hidden=4):
    return MlpModel(
        w1=rng.normal(0, 1, (input_dim, hidden)),
        b1=rng.normal(0, 1, hidden),
        w2=rng.normal(0, 1, (hidden, 2)),
        b2=rng.normal(0, 1, 2),
    )


class TestMlp:
    def test_gradients_match_central_differences(self, rng):
        model = random_small_net(rng)
        X = rng.normal(0, 1, (6, 3))
        y = np.array([0, 1, 1, 0, 1, 0])
        analytic = mlp_gradients(model, X, y)
        eps = 1e-6
        for name, value in model.params().items():
            numeric = np.zeros_like(value)
            for index in np.ndindex(value.shape):
                shifted = {k: v.copy() for k, v in model.params().items()}
                shifted[name][index] += eps
                upper = mlp_loss(MlpModel(**shifted), X, y)
                shifted[name][index] -= 2 * eps
                lower = mlp_loss(MlpModel(**shifted), X, y)
                numeric[index] = (upper - lower) / (2 * eps)
            error = np.linalg.norm(analytic[name] - numeric) / (np.linalg.norm(analytic[name]) + np.linalg.norm(numeric))
            assert error < 1e-4, name

    def test_learns_separable_data(self, rng):
        X, y = blobs(rng, n=100)
        labels = (y > 0).astype(int)
        model = mlp_train(X, labels, seed=3, batch=32)
        assert np.mean(predict_labels(model, X) == labels) >= 0.99

    def test_same_seed_is_bit_identical(self, rng):
        X, y = blobs(rng, n=30)
        labels = (y > 0).astype(int)
        first = mlp_train(X, labels, seed=11, epochs=5, hidden_units=16)
        second = mlp_train(X, labels, seed=11, epochs=5, hidden_units=16)
        for name, value in first.params().items():
            np.testing.assert_array_equal(value, second.params()[name])

    def test_first_epoch_reduces_loss(self, rng):
        X, y = blobs(rng, n=100, centre=1.0, spread=1.0)
        labels = (y > 0).astype(int)
        initial = init_mlp(2, seed=5)
        trained = mlp_train(X, labels, seed=5, epochs=1, batch=16)
        assert mlp_loss(trained, X, labels) < mlp_loss(initial, X, labels)

    def test_single_class_is_rejected(self, rng):
        with pytest.raises(SingleClassError):
            mlp_train(rng.normal(size=(10, 2)), np.zeros(10, dtype=int), seed=0)

    def test_prediction_probabilities_and_tie(self, rng):
        model = random_small_net(rng)
        x = rng.normal(size=3)
        _, probs = mlp_predict(model, x)
        assert probs.sum() == pytest.approx(1.0, abs=1e-9)

        shifted = MlpModel(model.w1, model.b1, model.w2, model.b2 + 7.5)
        np.testing.assert_allclose(mlp_predict(shifted, x)[1], probs, atol=1e-9)

        zero = MlpModel(np.zeros((3, 4)), np.zeros(4), np.zeros((4, 2)), np.zeros(2))
        label, probs = mlp_predict(zero, x)
        assert label == 1
        np.testing.assert_allclose(probs, [0.5, 0.5])

    def test_sklearn_estimator_keeps_class_labels(self, rng):
        X, y = blobs(rng, n=40)
        labels = np.where(y > 0, "target", "other")
        clf = MlpClassifier(hidden_units=32, epochs=50, batch_size=16, random_state=1).fit(X, labels)
        assert set(clf.predict(X)) <= {"target", "other"}
        assert np.mean(clf.predict(X) == labels) >= 0.95


class TestPersistence:
    def test_svm_round_trip_with_preprocessing(self, tmp_path, rng):
        X, y = blobs(rng, n=20)
        standardizer = fit_standardizer(X)
        pca = fit_pca_95(apply_standardizer(standardizer, X))
        prepared = apply_pca(pca, apply_standardizer(standardizer, X))
        trained = TrainedClassifier(svm_train(prepared, y, C=10.0, gamma=0.1), standardizer=standardizer, pca=pca)
        path = str(tmp_path / "svm.json")
        save_model(trained, path)
        loaded = load_model(path)
        assert loaded.kind == "svm"
        np.testing.assert_array_equal(loaded.scores(X), trained.scores(X))
        np.testing.assert_array_equal(loaded.predict(X), trained.predict(X))

    def test_mlp_round_trip(self, tmp_path, rng):
        model = random_small_net(rng)
        path = str(tmp_path / "mlp.json")
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == "mlp"
        X = rng.normal(size=(5, 3))
        np.testing.assert_array_equal(loaded.predict(X), predict_labels(model, X))

    @pytest.mark.parametrize("mutate", [
        lambda p: p.update(format="other"),
        lambda p: p.update(version=99),
        lambda p: p.update(kind="forest"),
        lambda p: p["model"].pop("w1"),
    ])
    def test_bad_containers_are_rejected(self, mutate, tmp_path, rng):
        path = tmp_path / "model.json"
        save_model(random_small_net(rng), str(path))
        payload = json.loads(path.read_text(encoding="utf-8"))
        mutate(payload)
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_invalid_json_is_rejected(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))
