from __future__ import annotations

import math

import numpy as np
import pytest

from paragcn.metrics import (THRESHOLDS, EvalReport, classification_pr, greedy_match, map_fixed_range,
                             match_paragraphs, variable_iou_threshold)


def rect(x0, y0, x1, y1):
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], float)


def test_variable_threshold_values():
    assert variable_iou_threshold(1) == 0.5
    assert abs(variable_iou_threshold(5) - 0.8333333333333334) <= 1e-9
    assert variable_iou_threshold(19) == 0.95
    assert variable_iou_threshold(1000) == 0.95
    with pytest.raises(ValueError):
        variable_iou_threshold(0)


def test_identical_predictions_are_perfect():
    gts = [(rect(0, 0, 10, 3), 1), (rect(0, 5, 10, 20), 5)]
    r = match_paragraphs([g for g, _ in gts], gts)
    assert (r.precision, r.recall, r.f1) == (1.0, 1.0, 1.0)


def test_single_line_iou_06_matches_only_in_variable_mode():
    gt = rect(0, 0, 10, 1)
    pred = rect(0, 0, 6, 1)   # IoU 0.6
    assert match_paragraphs([pred], [(gt, 1)]).f1 == 1.0
    assert match_paragraphs([pred], [(gt, 1)], mode=0.75).f1 == 0.0


def test_one_pred_over_two_gts_matches_once():
    gts = [(rect(0, 0, 10, 10), 1), (rect(0, 10.5, 10, 20.5), 1)]
    pred = rect(0, 0, 10, 15)
    r = match_paragraphs([pred], gts, mode=0.5)
    assert len(r.matches) <= 1


def test_greedy_prefers_higher_iou():
    ious = np.array([[0.9, 0.8], [0.85, 0.0]])
    assert greedy_match(ious, np.array([0.5, 0.5])) == [(0, 0, 0.9)]


def test_map_perfect_and_empty():
    gts = [(rect(0, 0, 10, 3), 1)]
    assert map_fixed_range([gts[0][0]], gts) == 1.0
    assert map_fixed_range([rect(0, 0, 3, 3)], gts) == 0.0  # IoU 0.3


def test_map_uniform_precision_recall():
    # 36 exact hits, 4 spurious predictions, 9 missed paragraphs: P 0.9, R 0.8
    gts = [(rect(20 * i, 0, 20 * i + 10, 5), 1) for i in range(45)]
    preds = [g for g, _ in gts[:36]] + [rect(20 * i, 100, 20 * i + 10, 105) for i in range(4)]
    assert map_fixed_range(preds, gts) == pytest.approx(0.72, abs=1e-12)


def test_dont_care_predictions_excluded():
    gts = [(rect(0, 0, 10, 3), 1)]
    dc = [rect(0, 50, 30, 80)]
    preds = [rect(0, 0, 10, 3), rect(1, 51, 29, 79)]
    r = match_paragraphs(preds, gts, dont_care=dc)
    assert r.n_pred == 1 and r.precision == 1.0


@pytest.mark.parametrize("probs,labels,weights,want", [
    ([0.9, 0.1, 0.8], [1, 0, 1], [1, 1, 1], (1.0, 1.0)),
    ([0.9, 0.8, 0.1, 0.7], [1, 1, 1, 0], [1, 1, 1, 1], (2 / 3, 2 / 3)),
])
def test_classification_pr(probs, labels, weights, want):
    pr = classification_pr(np.array(probs), np.array(labels), np.array(weights))
    assert pr.defined
    assert (pr.precision, pr.recall) == pytest.approx(want)


def test_classification_all_dont_care_undefined():
    pr = classification_pr(np.array([0.9, 0.2]), np.array([1, 0]), np.zeros(2))
    assert not pr.defined and math.isnan(pr.recall)


def test_eval_report_aggregates_pages():
    rep = EvalReport()
    g1 = [(rect(0, 0, 10, 3), 1)]
    rep.add([g1[0][0]], g1, page_id="a")
    rep.add([], [(rect(0, 0, 10, 3), 2)], page_id="b")
    s = rep.summary()
    assert s["pages"] == 2 and s["n_gt"] == 2 and s["n_pred"] == 1
    assert s["precision_var"] == 1.0 and s["recall_var"] == 0.5
    assert s["f1_var"] == pytest.approx(2 / 3)
    assert set(f"precision@{t:.2f}" for t in THRESHOLDS) <= set(s)


def test_eval_report_fixed_only_uses_half():
    rep = EvalReport()
    gt = rect(0, 0, 10, 10)
    pred = rect(0, 0, 10, 6)   # IoU 0.6 on a 10-line paragraph
    rep.add([pred], [(gt, 10)], fixed_only=True)
    assert rep.summary()["f1_var"] == 1.0
    rep2 = EvalReport()
    rep2.add([pred], [(gt, 10)])
    assert rep2.summary()["f1_var"] == 0.0


def test_empty_page_scores_perfectly():
    assert match_paragraphs([], []).f1 == 1.0
