"""Spanning cyclic caterpillars of hypercubes and the labelings they induce.

A caterpillar here is a spanning subgraph of the t-cube whose core is a
cycle (the spine) with the same number of pendant vertices (leaves) hanging
off every spine vertex.  Numbering the vertices block by block along the
spine gives a labeling in which close labels mean close cube vertices: any
two labels within a window of leaf_degree + 2 (cyclically) are at Hamming
distance at most 3.  A reflected-Gray ordering serves as the fallback for
cubes too small to host any caterpillar.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .rounding import _Dinic


class SearchExhausted(RuntimeError):
    """Raised when an exhaustive spine search finds no caterpillar."""


def _check_params(t: int, leaf_degree: int) -> int:
    """Validate (t, leaf_degree) and return the spine length."""
    if t < 1:
        raise ValueError(f"cube dimension {t} must be positive")
    d = leaf_degree
    if d < 1 or d % 2 == 0 or (d + 1) & d:
        raise ValueError(
            f"leaf degree {d} must be odd with {d} + 1 a power of two"
        )
    if (1 << t) % (d + 1):
        raise ValueError(f"leaf degree {d} does not tile a {t}-cube")
    e = (1 << t) // (d + 1)
    if e < 3:
        raise ValueError(f"spine length {e} below 3; no cycle exists")
    if d + 2 > t:
        raise ValueError(
            f"spine degree {d + 2} exceeds cube degree {t}; infeasible"
        )
    return e


@dataclass(frozen=True)
class Caterpillar:
    """Spine cycle plus per-spine leaf lists covering a whole t-cube."""

    t: int
    spine: tuple[int, ...]
    leaves: tuple[tuple[int, ...], ...]

    @property
    def spine_length(self) -> int:
        return len(self.spine)

    @property
    def leaf_degree(self) -> int:
        return len(self.leaves[0])

    @property
    def window(self) -> int:
        """Cyclic label window within which Hamming distance stays <= 3."""
        return self.leaf_degree + 2

    def validate(self) -> None:
        e = len(self.spine)
        if e < 3:
            raise ValueError("spine shorter than a cycle")
        if len(self.leaves) != e:
            raise ValueError("one leaf list per spine vertex required")
        d = len(self.leaves[0])
        if any(len(row) != d for row in self.leaves):
            raise ValueError("leaf degree not uniform")
        if e * (d + 1) != 1 << self.t:
            raise ValueError("spine and leaves do not tile the cube")
        for idx in range(e):
            step = self.spine[idx] ^ self.spine[(idx + 1) % e]
            if step.bit_count() != 1:
                raise ValueError(f"spine break after position {idx}")
            for leaf in self.leaves[idx]:
                if (leaf ^ self.spine[idx]).bit_count() != 1:
                    raise ValueError(f"leaf {leaf} not adjacent to its spine vertex")
        everything = sorted(
            list(self.spine) + [x for row in self.leaves for x in row]
        )
        if everything != list(range(1 << self.t)):
            raise ValueError("vertices not covered exactly once")


def _assign_leaves(
    t: int, spine: list[int], leaf_degree: int
) -> tuple[tuple[int, ...], ...] | None:
    """Match non-spine vertices to adjacent spine vertices, leaf_degree each."""
    n = 1 << t
    spine_pos = {v: i for i, v in enumerate(spine)}
    others = [v for v in range(n) if v not in spine_pos]
    adjacency = []
    for v in others:
        hits = [spine_pos[v ^ (1 << b)] for b in range(t) if v ^ (1 << b) in spine_pos]
        if not hits:
            return None
        adjacency.append(hits)
    e = len(spine)
    # node ids: 0 source, 1..len(others) leaves, then spine slots, then sink
    spine_base = 1 + len(others)
    sink = spine_base + e
    net = _Dinic(sink + 1)
    leaf_edges = []
    for idx, hits in enumerate(adjacency):
        net.add_edge(0, 1 + idx)
        leaf_edges.append([(net.add_edge(1 + idx, spine_base + i), i) for i in hits])
    for i in range(e):
        net.add_edge(spine_base + i, sink, leaf_degree)
    if net.max_flow(0, sink) != len(others):
        return None
    buckets: list[list[int]] = [[] for _ in range(e)]
    for idx, edges in enumerate(leaf_edges):
        for eid, i in edges:
            if net.cap[eid] == 0:
                buckets[i].append(others[idx])
                break
    return tuple(tuple(sorted(b)) for b in buckets)


def search_caterpillar(
    t: int, leaf_degree: int, *, search_cap: int = 8
) -> Caterpillar:
    """Exhaustive deterministic search for a spanning caterpillar of Q_t.

    The spine is grown depth-first from the fixed edge 0-1, introducing new
    coordinate bits in first-use order (sound for existence: any caterpillar
    can be translated and bit-permuted into such a form).  Fresh bits are
    tried before old ones so space-filling spines are reached early.  Raises
    SearchExhausted when the full canonical space holds no solution, which
    is distinct from parameter rejection (ValueError).
    """
    e = _check_params(t, leaf_degree)
    if t > search_cap:
        raise ValueError(
            f"dimension {t} above the search cap {search_cap}; "
            "search a smaller cube and double up"
        )
    spine = [0, 1]
    used = bytearray(1 << t)
    used[0] = used[1] = 1
    result: list[Caterpillar] = []

    def dfs(bits_used: int) -> bool:
        cur = spine[-1]
        depth = len(spine)
        if depth == e:
            if cur.bit_count() == 1:
                leaves = _assign_leaves(t, spine, leaf_degree)
                if leaves is not None:
                    result.append(Caterpillar(t, tuple(spine), leaves))
                    return True
            return False
        slack = e - depth + 1  # edges still to place, closing edge included
        dist = cur.bit_count()
        if dist > slack or (slack - dist) % 2:
            return False
        candidates = ([bits_used] if bits_used < t else []) + list(range(bits_used))
        for b in candidates:
            nxt = cur ^ (1 << b)
            if used[nxt]:
                continue
            used[nxt] = 1
            spine.append(nxt)
            if dfs(bits_used + (b == bits_used)):
                return True
            spine.pop()
            used[nxt] = 0
        return False

    if not dfs(1):
        raise SearchExhausted(
            f"no spanning caterpillar with leaf degree {leaf_degree} in a "
            f"{t}-cube"
        )
    cat = result[0]
    cat.validate()
    return cat


def double_caterpillar(cat: Caterpillar) -> Caterpillar:
    """Lift a caterpillar one dimension up, doubling the spine length.

    The new spine walks copy 0 forward, crosses on the new top bit, walks
    copy 1 backward and crosses back; every spine vertex keeps its own
    leaves inside its copy, so the leaf degree is unchanged.
    """
    cat.validate()
    hi = 1 << cat.t
    spine = list(cat.spine) + [hi | v for v in reversed(cat.spine)]
    leaves = list(cat.leaves) + [
        tuple(hi | x for x in row) for row in reversed(cat.leaves)
    ]
    doubled = Caterpillar(cat.t + 1, tuple(spine), tuple(leaves))
    doubled.validate()
    return doubled


@dataclass(frozen=True)
class CubeLabeling:
    """Bijection between cube vertices and labels 1..2^t.

    `order[c-1]` is the vertex holding label c.  `window` > 0 promises that
    cyclic label distance <= window implies Hamming distance <= 3 (and label
    distance bounds Hamming distance beyond the window, via the spine walk);
    window == 0 marks a Gray-style labeling where Hamming distance is at
    most the cyclic label distance, for every distance.
    """

    t: int
    order: tuple[int, ...]
    window: int
    label: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = 1 << self.t
        if sorted(self.order) != list(range(n)):
            raise ValueError("labeling order is not a bijection on the cube")
        label = [0] * n
        for pos, v in enumerate(self.order):
            label[v] = pos + 1
        object.__setattr__(self, "label", tuple(label))

    def vertex_of(self, c: int) -> int:
        if not 1 <= c <= len(self.order):
            raise ValueError(f"label {c} out of range")
        return self.order[c - 1]

    def label_of(self, v: int) -> int:
        return self.label[v]

    def cyclic_distance(self, c1: int, c2: int) -> int:
        n = len(self.order)
        d = (c1 - c2) % n
        return min(d, n - d)

    def hamming_bound(self, delta: int) -> int:
        """Guaranteed Hamming bound for a cyclic label distance."""
        if delta == 0:
            return 0
        if self.window and delta <= self.window:
            return 3
        return delta


def label_from_caterpillar(cat: Caterpillar) -> CubeLabeling:
    """Block labeling: spine vertex i takes (d+1)i, its j-th leaf (d+1)(i-1)+j."""
    cat.validate()
    order: list[int] = []
    for i in range(cat.spine_length):
        order.extend(cat.leaves[i])
        order.append(cat.spine[i])
    return CubeLabeling(cat.t, tuple(order), cat.window)


def gray_label(t: int) -> CubeLabeling:
    """Reflected-Gray fallback: consecutive labels differ in one bit."""
    if t < 1:
        raise ValueError(f"cube dimension {t} must be positive")
    order = tuple(c ^ (c >> 1) for c in range(1 << t))
    return CubeLabeling(t, order, 0)


def verify_window(
    lab: CubeLabeling, w: int, dbound: int, threads: int = 1
) -> tuple[int, int, int] | None:
    """Scan all pairs within a cyclic label window for a distance breach.

    Returns None when every pair at cyclic label distance 1..w has Hamming
    distance <= dbound, else the first violation as (label_a, label_b,
    distance) in label scan order.  The scan partitions the label range
    across threads when asked; results stay deterministic.
    """
    n = 1 << lab.t
    order = lab.order

    def scan(lo: int, hi: int) -> tuple[int, int, int] | None:
        for c in range(lo, hi):
            x = order[c]
            for delta in range(1, w + 1):
                pos = c + delta
                y = order[pos - n if pos >= n else pos]
                dist = (x ^ y).bit_count()
                if dist > dbound:
                    return (c + 1, (pos % n) + 1, dist)
        return None

    if threads <= 1 or n < 4 * threads:
        return scan(0, n)
    step = -(-n // threads)
    chunks = [(lo, min(lo + step, n)) for lo in range(0, n, step)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for hit in pool.map(lambda c: scan(*c), chunks):
            if hit is not None:
                return hit
    return None


def save_caterpillar(cat: Caterpillar) -> str:
    """Serialize: "CAT t r e" header, spine lines, then leaf-list lines."""
    r = (cat.leaf_degree - 1) // 2
    width = cat.t
    lines = [f"CAT {cat.t} {r} {cat.spine_length}"]
    lines += [format(v, f"0{width}b") for v in cat.spine]
    lines += [
        " ".join(format(x, f"0{width}b") for x in row) for row in cat.leaves
    ]
    return "\n".join(lines) + "\n"


def load_caterpillar(text: str) -> Caterpillar:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("CAT "):
        raise ValueError("missing CAT header")
    parts = lines[0].split()
    if len(parts) != 4:
        raise ValueError("header must read: CAT t r e")
    t, r, e = (int(p) for p in parts[1:])
    if len(lines) != 1 + 2 * e:
        raise ValueError(f"expected {2 * e} body lines, got {len(lines) - 1}")
    spine = tuple(int(ln, 2) for ln in lines[1 : 1 + e])
    leaves = tuple(
        tuple(int(tok, 2) for tok in ln.split()) for ln in lines[1 + e :]
    )
    cat = Caterpillar(t, spine, leaves)
    cat.validate()
    if cat.leaf_degree != 2 * r + 1:
        raise ValueError("header leaf degree disagrees with leaf lists")
    return cat


_BASE_DIMENSION = {1: 3, 3: 6}
_MEMO: dict[tuple[int, int], Caterpillar] = {}


def caterpillar_for(
    t: int, leaf_degree: int, cache_dir: str | Path | None = None
) -> Caterpillar:
    """Caterpillar at dimension t: cached, loaded, or searched-and-doubled.

    The base dimension for each leaf degree is searched exhaustively; larger
    dimensions are reached by repeated doubling.  With a cache directory the
    result of each dimension is persisted as its own file.
    """
    if leaf_degree not in _BASE_DIMENSION:
        raise ValueError(
            f"leaf degree {leaf_degree} has no feasible base dimension "
            f"within the search cap; supported: {sorted(_BASE_DIMENSION)}"
        )
    base = _BASE_DIMENSION[leaf_degree]
    if t < base:
        raise ValueError(
            f"leaf degree {leaf_degree} needs dimension >= {base}, got {t}"
        )
    key = (t, leaf_degree)
    path = None
    if cache_dir is not None:
        r = (leaf_degree - 1) // 2
        path = Path(cache_dir) / f"cat_t{t}_r{r}.txt"
    if key in _MEMO:
        cat = _MEMO[key]
        if path is not None and not path.is_file():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(save_caterpillar(cat))
        return cat
    if path is not None:
        if path.is_file():
            cat = load_caterpillar(path.read_text())
            if cat.t != t or cat.leaf_degree != leaf_degree:
                raise ValueError(f"cache file {path} holds the wrong caterpillar")
            _MEMO[key] = cat
            return cat
    if t == base:
        cat = search_caterpillar(base, leaf_degree)
    else:
        cat = double_caterpillar(caterpillar_for(t - 1, leaf_degree, cache_dir))
    _MEMO[key] = cat
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(save_caterpillar(cat))
    return cat


def best_labeling(t: int, cache_dir: str | Path | None = None) -> CubeLabeling:
    """Widest-window labeling available at dimension t; Gray when t < 3."""
    if t >= 6:
        return label_from_caterpillar(caterpillar_for(t, 3, cache_dir))
    if t >= 3:
        return label_from_caterpillar(caterpillar_for(t, 1, cache_dir))
    return gray_label(t)
