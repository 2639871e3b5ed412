from __future__ import annotations

import numpy as np
import pytest

from paragcn.datagen import StyleSpec, derive_cluster_labels, generate_page, simulate_ocr, split_by_labels
from paragcn.datagen.ocr import OcrSpec
from paragcn.features import PageStats, word_node_features
from paragcn.graphnet import GcnConfig, init_model
from paragcn.pipeline import cluster_lines, extract_paragraphs, make_lines, skeleton, split_lines
from paragcn.prepare import PreparedPage, synthesize_page
from paragcn.unionfind import connected_components

PLAIN = dict(list_item_probability=0.0, title_probability=0.0)


def box(x, y, w, h=10.0):
    return np.array([[x, y], [x + w, y], [x + w, y + h], [x, y + h]], float)


def constant_model(head: str, logit: float, seed: int = 0):
    width = 29 if head == "node_binary_pair" else 30
    m = init_model(GcnConfig(steps=1, hidden_width=8, heads=2, head_type=head, input_width=width), seed)
    m.params["out.W"][:] = 0
    m.params["out.b"][:] = logit
    return m


SPLIT_NONE = constant_model("node_binary_pair", -20.0)
SPLIT_ALL = constant_model("node_binary_pair", 20.0)
JOIN_NONE = constant_model("edge_binary", -20.0)
JOIN_ALL = constant_model("edge_binary", 20.0)


# --- features ---------------------------------------------------------------

def test_axis_aligned_features():
    words = np.array([box(0, 0, 20), box(30, 5, 10)])
    f = word_node_features(words, PageStats((0.0, 0.0), 1.0))
    assert f.shape == (2, 29)
    np.testing.assert_allclose(f[:, 2:5], [[0, 1, 0], [0, 1, 0]], atol=1e-15)
    for k in range(4):
        x, y = words[0, k]
        np.testing.assert_allclose(f[0, 5 + 6 * k:11 + 6 * k], [x, x, 0, y, y, 0], atol=1e-12)


def test_rotation_shifts_angle_uniformly():
    words = np.array([box(0, 0, 20), box(30, 5, 10), box(5, 40, 15)])
    th = 0.4
    r = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    a0 = word_node_features(words)[:, 2]
    a1 = word_node_features(words @ r.T)[:, 2]
    np.testing.assert_allclose(a1 - a0, th, atol=1e-12)


def test_feature_length():
    assert word_node_features(np.array([box(0, 0, 5)])).shape == (1, 29)


# --- split ------------------------------------------------------------------

def _two_column_page(seed=1):
    st = StyleSpec(column_count=2, alignment="justified", column_width_fraction=0.985, **PLAIN)
    return simulate_ocr(generate_page(st, seed), seed, OcrSpec(p_merge=1.0, p_break=0.0))


def test_all_negative_split_keeps_raw_lines():
    page = _two_column_page()
    lines = split_lines(page.words, page.raw_lines, SPLIT_NONE)
    assert sorted(sorted(ln.words) for ln in lines) == sorted(sorted(r) for r in page.raw_lines)


def test_single_word_line_never_cut():
    words = np.array([box(0, 0, 10)])
    lines = split_lines(words, [[0]], SPLIT_ALL)
    assert [ln.words for ln in lines] == [[0]]


def test_all_positive_split_gives_single_words():
    words = np.array([box(0, 0, 10), box(15, 0, 10), box(30, 0, 10)])
    lines = split_lines(words, [[0, 1, 2]], SPLIT_ALL)
    assert [ln.words for ln in lines] == [[0], [1], [2]]


def test_split_with_exact_labels_cuts_at_column_gap():
    page = _two_column_page()
    lab = PreparedPage(page).split_labels
    probs = lab[:, :2] * (lab[:, 2:] > 0)
    lines = split_lines(page.words, page.raw_lines, None, probs=probs)
    want = sorted(sorted(np.flatnonzero(page.word_line == li).tolist()) for li in range(len(page.gt_lines)))
    assert sorted(sorted(ln.words) for ln in lines) == want


def test_uncovered_words_become_singletons(caplog):
    words = np.array([box(0, 0, 10), box(15, 0, 10), box(0, 20, 10)])
    lines = split_lines(words, [[0, 1], []], SPLIT_NONE)
    assert sorted(ln.words for ln in lines) == [[0, 1], [2]]
    assert "empty raw line" in caplog.text


def test_split_rejects_edge_model():
    with pytest.raises(ValueError, match="split model"):
        split_lines(np.array([box(0, 0, 10)]), [[0]], JOIN_ALL)


# --- cluster ----------------------------------------------------------------

def _stack_lines(k=4):
    words = np.array([box(0, 14 * i, 40) for i in range(k)])
    return words, make_lines(words, [[i] for i in range(k)])


def test_all_edges_negative_every_line_alone():
    words, lines = _stack_lines()
    paras = cluster_lines(lines, JOIN_NONE, words)
    assert sorted(p.lines for p in paras) == [[0], [1], [2], [3]]


def test_chain_of_positive_edges_is_one_paragraph():
    words, lines = _stack_lines(5)
    paras = cluster_lines(lines, JOIN_ALL, words)
    assert [p.lines for p in paras] == [[0, 1, 2, 3, 4]]


def test_indented_page_label_edges_reproduce_gt_grouping():
    st = StyleSpec(column_count=1, paragraph_separator="indent", alignment="left", **PLAIN)
    page = simulate_ocr(generate_page(st, 2), 2, OcrSpec(jitter=0.0, p_merge=0.0, p_break=0.0))
    groups = split_by_labels(page)
    lines = make_lines(page.words, groups)
    boxes = np.array([ln.box for ln in lines])
    g = skeleton(boxes)
    lab = derive_cluster_labels(page, [ln.words for ln in lines], g, boxes)
    comps = connected_components(len(lines), g.edges[lab.labels > 0])
    got = sorted(sorted(lab.line_to_gt[c].tolist()) for c in comps)
    assert got == sorted(sorted(p) for p in page.gt_paragraphs)


def test_cluster_rejects_node_model():
    words, lines = _stack_lines()
    with pytest.raises(ValueError, match="cluster model"):
        cluster_lines(lines, SPLIT_ALL, words)


# --- end to end -------------------------------------------------------------

def test_one_word_page():
    ex = extract_paragraphs(np.array([box(0, 0, 10)]), [[0]], SPLIT_NONE, JOIN_ALL)
    assert len(ex.lines) == 1 and [p.lines for p in ex.paragraphs] == [[0]]


def test_empty_page():
    ex = extract_paragraphs(np.zeros((0, 4, 2)), [], SPLIT_NONE, JOIN_ALL)
    assert ex.lines == [] and ex.paragraphs == []


def test_partition_property_on_random_pages():
    split = init_model(GcnConfig(steps=2, hidden_width=8, heads=2), 1)
    join = init_model(GcnConfig(steps=2, hidden_width=8, heads=2, head_type="edge_binary", input_width=30), 2)
    for i in range(100):
        page = synthesize_page(17, i, augment=i % 2 == 1)
        ex = extract_paragraphs(page.words, page.raw_lines, split, join)
        flat = sorted(k for p in ex.paragraphs for k in p.lines)
        assert flat == list(range(len(ex.lines)))
        words = sorted(w for ln in ex.lines for w in ln.words)
        assert words == list(range(len(page.words)))
