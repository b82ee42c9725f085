from __future__ import annotations

import itertools

import pytest

from gridcube.grids import (
    GridSpec,
    GridVertex,
    LevelAddress,
    compute_exponents,
    kappa,
    level_budget,
    page_index,
)


def test_exponents_golden():
    assert compute_exponents([3, 7, 4]) == (0, 2, 5, 7)
    assert compute_exponents([2, 2, 2]) == (0, 1, 2, 3)
    assert compute_exponents([5, 9]) == (0, 3, 6)
    assert compute_exponents([3, 7, 4, 3]) == (0, 2, 5, 7, 8)


def test_exponents_rejects_bad_dims():
    with pytest.raises(ValueError):
        compute_exponents([])
    with pytest.raises(ValueError):
        compute_exponents([3, 1, 4])
    with pytest.raises(ValueError):
        compute_exponents([0])


def test_exponents_match_doubling_oracle():
    # ceil(log2 p) == smallest e with 2^e >= p, found by repeated doubling
    def doubling(p):
        e, pow2 = 0, 1
        while pow2 < p:
            e += 1
            pow2 *= 2
        return e

    for dims in [(3, 7, 4), (5, 9), (64, 64), (2, 3, 5, 7, 11), (9, 9, 9, 9)]:
        exps = compute_exponents(dims)
        prod = 1
        for i, a in enumerate(dims, start=1):
            prod *= a
            assert exps[i] == doubling(prod)


def test_spec_rejects_tiny_and_huge():
    with pytest.raises(ValueError):
        GridSpec((5,))
    with pytest.raises(ValueError):
        GridSpec((3, 1, 4))
    with pytest.raises(ValueError):
        GridSpec((1 << 13, 1 << 14))  # 2^27 vertices, above the default cap
    GridSpec((1 << 13, 1 << 13))  # exactly at the cap is fine


def test_rank_is_reversed_lex_bijection():
    spec = GridSpec((3, 4, 2))
    seen = set()
    for coords in itertools.product(range(1, 4), range(1, 5), range(1, 3)):
        r = spec.rank_of(coords)
        assert spec.coords_of(r) == coords
        seen.add(r)
    assert seen == set(range(spec.size))
    # last coordinate most significant
    assert spec.rank_of((1, 1, 2)) > spec.rank_of((3, 4, 1))
    assert spec.rank_of((2, 1, 1)) == 1


def test_vertex_roundtrip_and_bounds():
    spec = GridSpec((3, 7, 4))
    v = spec.vertex(2, 4, 3)
    assert v.coords == (2, 4, 3)
    assert v.coords0 == (1, 3, 2)
    assert GridVertex(spec, v.rank) == v
    with pytest.raises(ValueError):
        spec.vertex(4, 1, 1)
    with pytest.raises(ValueError):
        GridVertex(spec, spec.size)


def test_kappa_golden():
    assert kappa(GridSpec((3, 7)).vertex(2, 5)) == (2, 5)
    assert kappa(GridSpec((3, 7, 4)).vertex(2, 4, 3)) == (2, 18)
    assert kappa(GridSpec((3, 7, 4, 3)).vertex(1, 1, 1, 1)) == (1, 1)
    # plain tuples work when the spec is supplied
    assert kappa((2, 4, 3), GridSpec((3, 7, 4))) == (2, 18)


def test_kappa_bijective_and_page_intervals():
    spec = GridSpec((3, 5, 4, 2))
    seen = set()
    for v in spec.vertices():
        x1, y = kappa(v)
        assert 1 <= x1 <= 3 and 1 <= y <= spec.page_count(1)
        seen.add((x1, y))
    assert len(seen) == spec.size
    # the chains of i-page j fold onto one consecutive y-interval
    for i in (2, 3):
        block = spec.prefix_product(i) // spec.dims[0]  # a_2 ... a_i
        for v in spec.vertices():
            j = page_index(v, i)
            _, y = kappa(v)
            assert (j - 1) * block + 1 <= y <= j * block


def test_page_index_golden():
    spec = GridSpec((3, 7, 4, 3))
    assert page_index(spec.vertex(2, 4, 2, 2), 2) == 6
    assert page_index(spec.vertex(2, 4, 1, 1), 2) == 1
    assert page_index(spec.vertex(3, 7, 1, 1), 2) == 1
    assert page_index(spec.vertex(1, 1, 1, 1), 3) == 1
    with pytest.raises(ValueError):
        page_index(spec.vertex(1, 1, 1, 1), 4)
    with pytest.raises(ValueError):
        page_index(spec.vertex(1, 1, 1, 1), 0)


def test_page_refinement():
    spec = GridSpec((3, 4, 3, 2))
    for i in (2, 3):
        for v, w in itertools.product(list(spec.vertices())[::7], repeat=2):
            if page_index(v, i) != page_index(w, i):
                if page_index(v, i - 1) < page_index(w, i - 1):
                    assert page_index(v, i) <= page_index(w, i)


def test_level_budget_golden():
    g = GridSpec((3, 7, 4, 3))
    assert level_budget(g, 2) == 63
    assert level_budget(g, 3) == 8
    assert level_budget(g, 4) == 2
    assert level_budget(GridSpec((4, 8)), 2) == 8
    assert level_budget(GridSpec((3, 7, 4)), 2) == 21
    assert level_budget(GridSpec((3, 7, 4)), 3) == 3
    with pytest.raises(ValueError):
        level_budget(g, 1)
    with pytest.raises(ValueError):
        level_budget(g, 5)


def test_level_address_decomposition():
    spec = GridSpec((3, 7, 4, 3))
    # stage 3 sections are 4 levels wide (e_3 - e_2 = 2)
    addr = LevelAddress.of(spec, 3, 11)
    assert addr.width == 4
    assert (addr.section, addr.offset) == (3, 3)
    for c in range(1, 33):
        a = LevelAddress.of(spec, 3, c)
        assert (a.section - 1) * a.width + a.offset == c
        assert 1 <= a.offset <= a.width
    with pytest.raises(ValueError):
        LevelAddress.of(spec, 3, 0)
