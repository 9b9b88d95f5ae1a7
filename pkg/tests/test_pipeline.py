"""Fold construction, bagging, metrics, stacking, voting, cross-validation."""

import json
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cattlevoc.corpus import LabeledCorpus
from cattlevoc.errors import (
    BadKError,
    ClassTooSmallError,
    DegenerateBagError,
    EmptyMetricsError,
    FeatureMismatchError,
    InfeasibleCoverageError,
)
from cattlevoc.pipeline import (
    CVConfig,
    EnsembleModel,
    TaskSpec,
    confusion_matrix,
    cross_validate,
    holdout_split,
    load_model,
    macro_f1,
    predict,
    predict_batch,
    save_model,
    selection_loss,
    stratified_folds,
    subsample_bags,
    train_base_learners,
    train_ensemble,
    train_stacked,
)
from cattlevoc.pipeline.metrics import FoldMetrics
from cattlevoc.synth import blobs_corpus

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "..", "docs", "cvreport.schema.json")


# -- stratified folds ---------------------------------------------------------


def test_fold_counts_stay_proportional():
    labels = ["HF"] * 952 + ["LF"] * 192
    folds = stratified_folds(labels, 5, seed=1)
    labels = np.array(labels)
    for j in range(5):
        in_fold = folds == j
        assert int(np.sum(in_fold & (labels == "HF"))) in (190, 191)
        assert int(np.sum(in_fold & (labels == "LF"))) in (38, 39)


@given(
    st.lists(st.sampled_from(["a", "b", "c"]), min_size=12, max_size=300),
    st.integers(2, 4),
    st.integers(0, 2**31),
)
@settings(max_examples=60, deadline=None)
def test_every_class_deviates_at_most_one_from_proportion(labels, k, seed):
    classes, counts = np.unique(labels, return_counts=True)
    if counts.min() < k:
        return
    folds = stratified_folds(labels, k, seed)
    labels = np.array(labels)
    assert set(folds) == set(range(k))
    for cls, total in zip(classes, counts):
        per_fold = np.bincount(folds[labels == cls], minlength=k)
        assert per_fold.max() - per_fold.min() <= 1
        assert abs(per_fold.max() - total / k) < 1.0 + 1e-9


def test_every_class_in_train_and_test_of_every_fold():
    rng = np.random.default_rng(0)
    labels = [f"cow{i:02d}" for i in range(20) for _ in range(33 + int(rng.integers(0, 58)))]
    folds = stratified_folds(labels, 5, seed=3)
    labels = np.array(labels)
    for j in range(5):
        test_classes = set(labels[folds == j])
        train_classes = set(labels[folds != j])
        assert test_classes == train_classes == set(labels)


def test_small_class_is_named_in_the_error():
    labels = ["big"] * 50 + ["tiny"] * 3
    with pytest.raises(ClassTooSmallError, match="tiny"):
        stratified_folds(labels, 5, seed=0)


def test_k_below_two_rejected():
    with pytest.raises(BadKError):
        stratified_folds(["a"] * 10 + ["b"] * 10, 1, seed=0)


def test_fold_assignment_is_seed_deterministic():
    labels = ["x"] * 40 + ["y"] * 25
    a = stratified_folds(labels, 4, seed=9)
    b = stratified_folds(labels, 4, seed=9)
    c = stratified_folds(labels, 4, seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_holdout_is_a_stratified_partition():
    labels = ["HF"] * 952 + ["LF"] * 192
    train, test = holdout_split(labels, seed=2)
    assert len(train) + len(test) == 1144
    assert len(set(train) & set(test)) == 0
    labels = np.array(labels)
    assert int(np.sum(labels[test] == "HF")) in (190, 191)
    assert int(np.sum(labels[test] == "LF")) in (38, 39)


# -- bagging ------------------------------------------------------------------


def test_bag_sizes_and_coverage_at_default_protocol():
    idx = np.arange(915)
    bags = subsample_bags(idx, 50, 0.9, 25, seed=4)
    assert len(bags) == 50
    coverage = np.zeros(915, dtype=int)
    for bag in bags:
        assert len(bag) in (823, 824)
        assert len(np.unique(bag)) == len(bag)
        coverage[bag] += 1
    assert coverage.min() >= 25
    assert abs(coverage.mean() - 45.0) < 1.0  # 0.9 of 50 draws on average


def test_single_bag_reduces_to_plain_subsampling():
    bags = subsample_bags(np.arange(100), 1, 0.9, 0, seed=0)
    assert len(bags) == 1
    assert len(bags[0]) == 90


def test_impossible_coverage_is_rejected():
    with pytest.raises(InfeasibleCoverageError):
        subsample_bags(np.arange(100), 2, 0.5, 2, seed=0)


def test_bags_are_seed_deterministic():
    a = subsample_bags(np.arange(200), 10, 0.9, 5, seed=7)
    b = subsample_bags(np.arange(200), 10, 0.9, 5, seed=7)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


# -- metrics ------------------------------------------------------------------


def test_selection_loss_arithmetic():
    perfect = [FoldMetrics(i, 1.0, 1.0) for i in range(5)]
    assert selection_loss(perfect) == 1.0
    mixed = [FoldMetrics(0, 0.8, 0.7), FoldMetrics(1, 0.6, 0.5)]
    assert selection_loss(mixed) == pytest.approx(0.65)
    zero = [FoldMetrics(0, 0.0, 0.0)]
    assert selection_loss(zero) == 0.0
    with pytest.raises(EmptyMetricsError):
        selection_loss([])


@given(
    st.lists(
        st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 1.0)), min_size=1, max_size=10
    ),
    st.integers(0, 9),
    st.floats(0.001, 0.5),
)
@settings(max_examples=100, deadline=None)
def test_selection_loss_bounds_and_monotonicity(pairs, bump_at, bump):
    fms = [FoldMetrics(i, a, f) for i, (a, f) in enumerate(pairs)]
    base = selection_loss(fms)
    assert 0.0 <= base <= 1.0
    i = bump_at % len(pairs)
    a, f = pairs[i]
    if a + bump <= 1.0:
        bumped = list(fms)
        bumped[i] = FoldMetrics(i, a + bump, f)
        assert selection_loss(bumped) > base


def test_macro_f1_exact_cases():
    perfect = np.diag([30, 12, 9])
    assert macro_f1(perfect) == 1.0
    # always predicts class 0 on balanced two-class data
    collapsed = np.array([[50, 0], [50, 0]])
    assert macro_f1(collapsed) == pytest.approx(1.0 / 3.0)


def test_confusion_matrix_matches_brute_force():
    rng = np.random.default_rng(5)
    y_true = rng.integers(0, 4, size=200)
    y_pred = rng.integers(0, 4, size=200)
    conf = confusion_matrix(y_true, y_pred, 4)
    for t in range(4):
        for p in range(4):
            assert conf[t, p] == int(np.sum((y_true == t) & (y_pred == p)))
    assert conf.sum() == 200


# -- stacking -----------------------------------------------------------------


def _two_blobs(n_per=30, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(2 * n_per, 4))
    y = np.repeat(np.arange(2), n_per)
    x[y == 1, 0] += 6.0
    return x, y


def test_single_class_bag_rejected():
    x = np.zeros((10, 3))
    with pytest.raises(DegenerateBagError):
        train_base_learners(x, np.zeros(10, dtype=int), 2, seed=0)


def test_meta_feature_width_is_three_learners_by_classes():
    x, y = _two_blobs()
    stack = train_stacked(x, y, 2, seed=1)
    assert stack.meta_features(x).shape == (len(y), 6)

    rng = np.random.default_rng(2)
    x20 = rng.normal(size=(100, 3))
    y20 = np.arange(100) % 20
    x20[np.arange(100), np.zeros(100, dtype=int)] += y20 * 3.0
    learners = train_base_learners(x20, y20, 20, seed=3)
    width = sum(l.predict_proba(x20[:5]).shape[1] for l in learners)
    assert width == 60


def test_stacking_does_not_undercut_its_base_learners():
    x, y = _two_blobs(n_per=40, seed=3)
    stack = train_stacked(x, y, 2, seed=2)
    best = max(stack.grid_scores.values())
    for name, score in stack.base_scores.items():
        if np.isfinite(score):
            assert best >= score - 0.02, name


# -- ensembles and voting -------------------------------------------------------


class _FixedProba:
    """Stands in for a trained instance; returns a constant probability row."""

    def __init__(self, row):
        self.row = np.asarray(row, dtype=np.float64)

    def predict_proba(self, x):
        return np.tile(self.row, (x.shape[0], 1))


def _stub_ensemble(rows):
    return EnsembleModel(
        classes=("A", "B"),
        feature_names=("f1", "f2"),
        instances=tuple(_FixedProba(r) for r in rows),
    )


def test_plurality_wins():
    model = _stub_ensemble([(0.9, 0.1), (0.6, 0.4), (0.2, 0.8)])
    assert predict(model, np.zeros(2)) == "A"


def test_vote_tie_falls_to_summed_probability():
    model = _stub_ensemble([(0.9, 0.1), (0.4, 0.6)])  # one vote each; sums 1.3 vs 0.7
    assert predict(model, np.zeros(2)) == "A"
    flipped = _stub_ensemble([(0.1, 0.9), (0.6, 0.4)])
    assert predict(flipped, np.zeros(2)) == "B"


def test_full_tie_falls_to_class_order():
    model = _stub_ensemble([(0.7, 0.3), (0.3, 0.7)])  # votes 1:1, sums 1.0:1.0
    assert predict(model, np.zeros(2)) == "A"


def test_winner_always_has_a_maximal_vote_count():
    rng = np.random.default_rng(11)
    for _ in range(20):
        rows = rng.dirichlet(np.ones(2), size=5)
        model = _stub_ensemble(rows)
        votes, _ = model.vote_matrix(np.zeros((1, 2)))
        label = predict(model, np.zeros(2))
        assert votes[0, model.classes.index(label)] == votes[0].max()


def test_prediction_is_keyed_by_feature_name(small_ensemble, blobs120):
    x = blobs120.x[:10]
    names = list(blobs120.feature_names)
    direct = predict_batch(small_ensemble, x, names)
    perm = np.random.default_rng(0).permutation(len(names))
    shuffled = predict_batch(small_ensemble, x[:, perm], [names[j] for j in perm])
    assert direct == shuffled
    with pytest.raises(FeatureMismatchError):
        predict_batch(small_ensemble, x, ["bogus"] + names[1:])


def test_single_bag_ensemble_equals_its_stacked_model(blobs120):
    model = train_ensemble(
        blobs120.x,
        blobs120.cow_ids,
        sorted(set(blobs120.cow_ids)),
        blobs120.feature_names,
        r=1,
        seed=6,
    )
    assert model.r == 1
    votes = predict_batch(model, blobs120.x, blobs120.feature_names)
    inst = model.instances[0]
    order = sorted(range(23), key=lambda j: blobs120.feature_names[j])
    proba = inst.predict_proba(blobs120.x[:, order])
    direct = [model.classes[i] for i in proba.argmax(axis=1)]
    assert votes == direct


def test_same_seed_same_predictions(blobs120):
    kwargs = dict(
        labels=blobs120.cow_ids,
        classes=sorted(set(blobs120.cow_ids)),
        feature_names=blobs120.feature_names,
        r=2,
        seed=13,
    )
    a = train_ensemble(blobs120.x, **kwargs)
    b = train_ensemble(blobs120.x, **kwargs)
    assert predict_batch(a, blobs120.x, blobs120.feature_names) == predict_batch(
        b, blobs120.x, blobs120.feature_names
    )


def test_saved_model_round_trips(tmp_path, small_ensemble, blobs120):
    path = tmp_path / "model.bin"
    save_model(small_ensemble, path)
    clone = load_model(path)
    assert clone.classes == small_ensemble.classes
    assert clone.feature_names == small_ensemble.feature_names
    assert predict_batch(clone, blobs120.x, blobs120.feature_names) == predict_batch(
        small_ensemble, blobs120.x, blobs120.feature_names
    )
    again = tmp_path / "model2.bin"
    save_model(small_ensemble, again)
    assert path.read_bytes() == again.read_bytes()


# -- cross-validation -----------------------------------------------------------


def test_blobs_cross_validation_is_nearly_perfect(blobs_cv_report):
    assert blobs_cv_report.test_accuracy[0] >= 0.95


def test_report_folds_align_with_corpus(blobs_cv_report, blobs120):
    assert list(blobs_cv_report.source_ids) == list(blobs120.source_ids)
    assert set(blobs_cv_report.fold_assignment) == {0, 1, 2}
    assert len(blobs_cv_report.test_metrics) == 3
    assert len(blobs_cv_report.confusions) == 3


def test_report_serializes_against_the_schema(blobs_cv_report):
    jsonschema = pytest.importorskip("jsonschema")
    with open(SCHEMA_PATH) as fh:
        schema = json.load(fh)
    payload = blobs_cv_report.to_dict()
    jsonschema.validate(payload, schema)
    # round trip through text keeps it valid
    jsonschema.validate(json.loads(json.dumps(payload)), schema)


def test_report_std_is_sample_deviation(blobs_cv_report):
    accs = [fm.accuracy for fm in blobs_cv_report.test_metrics]
    _, std = blobs_cv_report.test_accuracy
    assert std == pytest.approx(float(np.std(accs, ddof=1)))


def test_shuffled_labels_collapse_to_the_majority_baseline(shuffled_labels_cv):
    report, majority = shuffled_labels_cv
    assert report.test_accuracy[0] <= majority + 0.03


def test_subset_restriction_only_for_cow_task():
    with pytest.raises(ValueError):
        TaskSpec(target="calltype", subset="hf")
    TaskSpec(target="cowid", subset="hf")  # allowed
