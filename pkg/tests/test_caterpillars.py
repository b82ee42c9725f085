"""Tests for spanning caterpillars, their labelings, and window checks."""
from __future__ import annotations

import pytest

from gridcube.caterpillars import (
    Caterpillar,
    SearchExhausted,
    best_labeling,
    caterpillar_for,
    double_caterpillar,
    gray_label,
    label_from_caterpillar,
    load_caterpillar,
    save_caterpillar,
    search_caterpillar,
    verify_window,
)
from gridcube.caterpillars import _MEMO


@pytest.fixture(scope="module")
def cat3():
    return caterpillar_for(3, 1)


@pytest.fixture(scope="module")
def cat6():
    return caterpillar_for(6, 3)


def test_parameter_rejections():
    with pytest.raises(ValueError, match="must be positive"):
        search_caterpillar(0, 1)
    with pytest.raises(ValueError, match="odd"):
        search_caterpillar(3, 2)
    with pytest.raises(ValueError, match="power of two"):
        search_caterpillar(4, 5)
    with pytest.raises(ValueError, match="below 3"):
        search_caterpillar(3, 3)
    with pytest.raises(ValueError, match="below 3"):
        search_caterpillar(2, 1)
    with pytest.raises(ValueError, match="exceeds cube degree"):
        search_caterpillar(4, 3)
    with pytest.raises(ValueError, match="does not tile"):
        search_caterpillar(2, 7)
    with pytest.raises(ValueError, match="search cap"):
        search_caterpillar(9, 1)


def test_search_exhaustion_is_distinct_from_rejection():
    # 32 = 8 * 4 tiles and the degree fits, yet no spanning caterpillar
    # with three leaves per spine vertex exists in a 5-cube.
    with pytest.raises(SearchExhausted):
        search_caterpillar(5, 3)


def test_golden_base_caterpillar(cat3):
    assert cat3.t == 3
    assert cat3.spine == (0, 1, 3, 2)
    assert cat3.leaves == ((4,), (5,), (7,), (6,))
    assert cat3.spine_length == 4
    assert cat3.leaf_degree == 1
    assert cat3.window == 3
    cat3.validate()


def test_golden_degree_three_caterpillar(cat6):
    assert cat6.t == 6
    assert cat6.spine_length == 16
    assert cat6.leaf_degree == 3
    assert cat6.window == 5
    assert cat6.spine == (
        0, 1, 3, 7, 15, 31, 29, 61, 53, 52, 54, 50, 58, 42, 40, 8,
    )
    cat6.validate()


def test_validate_catches_breaks(cat6):
    with pytest.raises(ValueError, match="spine break"):
        Caterpillar(3, (0, 1, 2, 3), ((4,), (5,), (7,), (6,))).validate()
    with pytest.raises(ValueError, match="not adjacent"):
        Caterpillar(3, (0, 1, 3, 2), ((5,), (4,), (7,), (6,))).validate()
    # Duplicate a leaf within one spine vertex's own list: adjacency still
    # holds, so only the exact-coverage check can catch it.
    rows = list(cat6.leaves)
    rows[0] = (rows[0][0], rows[0][0], rows[0][2])
    with pytest.raises(ValueError, match="covered exactly once"):
        Caterpillar(cat6.t, cat6.spine, tuple(rows)).validate()


def test_labeling_block_structure(cat3):
    lab = label_from_caterpillar(cat3)
    assert lab.order == (4, 0, 5, 1, 7, 3, 6, 2)
    assert lab.window == 3
    for i, v in enumerate(cat3.spine, start=1):
        assert lab.label_of(v) == 2 * i
    for c in range(1, 9):
        assert lab.label_of(lab.vertex_of(c)) == c
    with pytest.raises(ValueError, match="out of range"):
        lab.vertex_of(0)
    with pytest.raises(ValueError, match="out of range"):
        lab.vertex_of(9)


def test_window_property_holds(cat3, cat6):
    assert verify_window(label_from_caterpillar(cat3), 3, 3) is None
    assert verify_window(label_from_caterpillar(cat6), 5, 3) is None


def test_window_tightness_counterexample(cat6):
    lab = label_from_caterpillar(cat6)
    hit = verify_window(lab, 6, 3)
    assert hit == (3, 9, 4)
    assert lab.cyclic_distance(3, 9) == 6
    # The doubled labelings inherit the same counterexample.
    lab7 = label_from_caterpillar(double_caterpillar(cat6))
    assert verify_window(lab7, 6, 3) == (3, 9, 4)


def test_single_leaf_family_has_no_tight_pair(cat3):
    # With one leaf per spine vertex the window-4 scan stays clean: in the
    # 3-cube distance 4 exceeds the diameter, and the doubled labeling in
    # the 4-cube happens to keep every distance-4 pair within Hamming 3.
    assert verify_window(label_from_caterpillar(cat3), 4, 3) is None
    lab4 = label_from_caterpillar(double_caterpillar(cat3))
    assert verify_window(lab4, 4, 3) is None


def test_doubling_preserves_structure(cat3, cat6):
    d4 = double_caterpillar(cat3)
    assert d4.t == 4
    assert d4.spine_length == 8
    assert d4.leaf_degree == 1
    assert d4.spine[:4] == cat3.spine
    assert d4.spine[4:] == tuple(8 | v for v in reversed(cat3.spine))
    d5 = double_caterpillar(d4)
    assert d5.t == 5 and d5.spine_length == 16
    assert verify_window(label_from_caterpillar(d5), 3, 3) is None
    d8 = double_caterpillar(double_caterpillar(cat6))
    assert d8.t == 8 and d8.spine_length == 64 and d8.leaf_degree == 3
    lab8 = label_from_caterpillar(d8)
    assert verify_window(lab8, 5, 3) is None
    assert verify_window(lab8, 6, 3) == (3, 9, 4)


def test_gray_labelings():
    g2 = gray_label(2)
    assert g2.order == (0, 1, 3, 2)
    assert g2.window == 0
    assert gray_label(1).order == (0, 1)
    for t in range(1, 6):
        assert verify_window(gray_label(t), 1, 1) is None
    with pytest.raises(ValueError, match="must be positive"):
        gray_label(0)


def test_hamming_bound_values(cat6):
    lab = label_from_caterpillar(cat6)
    assert lab.hamming_bound(0) == 0
    assert all(lab.hamming_bound(d) == 3 for d in range(1, 6))
    assert lab.hamming_bound(6) == 6
    gray = gray_label(4)
    assert gray.hamming_bound(0) == 0
    assert gray.hamming_bound(1) == 1
    assert gray.hamming_bound(7) == 7


def test_save_load_roundtrip(cat3, cat6):
    for cat in (cat3, cat6):
        assert load_caterpillar(save_caterpillar(cat)) == cat
    text = save_caterpillar(cat3)
    assert text.splitlines()[0] == "CAT 3 0 4"
    with pytest.raises(ValueError, match="missing CAT header"):
        load_caterpillar("001\n010\n")
    with pytest.raises(ValueError, match="header must read"):
        load_caterpillar("CAT 3 0\n")
    with pytest.raises(ValueError, match="body lines"):
        load_caterpillar("\n".join(text.splitlines()[:-1]))
    with pytest.raises(ValueError, match="disagrees"):
        load_caterpillar(text.replace("CAT 3 0 4", "CAT 3 1 4"))


def test_disk_cache_roundtrip(tmp_path, cat3):
    _MEMO.clear()
    try:
        first = caterpillar_for(3, 1, cache_dir=tmp_path)
        cache = tmp_path / "cat_t3_r0.txt"
        assert cache.is_file()
        _MEMO.clear()
        again = caterpillar_for(3, 1, cache_dir=tmp_path)
        assert again == first == cat3
        # A cache file holding the wrong dimension is rejected, not used.
        cache.write_text(save_caterpillar(double_caterpillar(cat3)))
        _MEMO.clear()
        with pytest.raises(ValueError, match="wrong caterpillar"):
            caterpillar_for(3, 1, cache_dir=tmp_path)
    finally:
        _MEMO.clear()


def test_memo_hit_still_persists(tmp_path, cat3):
    # cat3 is memoized by the fixture; a later call naming a cache dir
    # must still leave the file behind for other processes.
    caterpillar_for(3, 1, cache_dir=tmp_path)
    assert (tmp_path / "cat_t3_r0.txt").is_file()


def test_caterpillar_for_rejections():
    with pytest.raises(ValueError, match="no feasible base dimension"):
        caterpillar_for(6, 5)
    with pytest.raises(ValueError, match="needs dimension >= 3"):
        caterpillar_for(2, 1)
    with pytest.raises(ValueError, match="needs dimension >= 6"):
        caterpillar_for(4, 3)


def test_best_labeling_selection():
    assert best_labeling(1).window == 0
    assert best_labeling(2).window == 0
    for t in (3, 4, 5):
        lab = best_labeling(t)
        assert lab.t == t and lab.window == 3
    for t in (6, 7):
        lab = best_labeling(t)
        assert lab.t == t and lab.window == 5


def test_threaded_verification_matches_serial(cat6):
    lab8 = label_from_caterpillar(
        double_caterpillar(double_caterpillar(cat6))
    )
    assert verify_window(lab8, 5, 3, threads=4) is None
    assert verify_window(lab8, 6, 3, threads=4) == verify_window(lab8, 6, 3)
