"""Consistent roundings: two-way sequence rounding, matrix rounding, F^X.

All arithmetic is exact (fractions.Fraction), so the strict "< 1" rounding
contracts are decidable at the boundary.  The two-way rounding solver is a
deterministic unit-capacity flow over prefix windows: the v-th one placed in
each scan order must land where that order's fractional prefix sum crosses
(v-1, v], and a perfect assignment of ones to both orders' windows is exactly
a valid rounding.  Scan order is fixed (ascending node index), so identical
inputs give identical outputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass exact rationals")
    return Fraction(x)


@dataclass(frozen=True)
class RealSequence:
    """A sequence of exact rationals in [0, 1]."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(_frac(v) for v in self.values)
        for v in vals:
            if not 0 <= v <= 1:
                raise ValueError(f"value {v} outside [0, 1]")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class BinaryMatrix:
    """An m x n 0/1 matrix with cached per-row population counts."""

    rows: tuple[tuple[int, ...], ...]
    row_counts: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        rows = tuple(tuple(int(b) for b in row) for row in self.rows)
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise ValueError("ragged rows")
            for b in row:
                if b not in (0, 1):
                    raise ValueError("entries must be bits")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "row_counts", tuple(sum(r) for r in rows))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    def entry(self, r: int, c: int) -> int:
        """1-based accessor."""
        return self.rows[r - 1][c - 1]

    def row(self, r: int) -> tuple[int, ...]:
        return self.rows[r - 1]

    def ones_in_row(self, r: int) -> int:
        return self.row_counts[r - 1]

    def zeros_in_row(self, r: int) -> int:
        return self.n - self.row_counts[r - 1]

    def zero_columns(self, r: int) -> tuple[int, ...]:
        """1-based column indices of the zeros in row r, left to right."""
        return tuple(j + 1 for j, b in enumerate(self.rows[r - 1]) if b == 0)

    def validate(self) -> None:
        for cached, row in zip(self.row_counts, self.rows):
            if cached != sum(row):
                raise AssertionError("cached row count out of sync")


@dataclass(frozen=True)
class RoundingSpec:
    """Row-sum sequence X = (s_1..s_m) with values in {kappa, kappa+1}, and n."""

    X: tuple[int, ...]
    n: int

    def __post_init__(self):
        X = tuple(int(s) for s in self.X)
        object.__setattr__(self, "X", X)
        if not X:
            raise ValueError("X must be nonempty")
        if self.n < 1:
            raise ValueError("column count must be positive")
        if min(X) < 0:
            raise ValueError("row sums must be nonnegative")
        if max(X) - min(X) > 1:
            raise ValueError("row sums must take at most two consecutive values")
        if self.kappa + 1 > self.n:
            raise ValueError(f"kappa+1 = {self.kappa + 1} exceeds n = {self.n}")

    @property
    def m(self) -> int:
        return len(self.X)

    @property
    def kappa(self) -> int:
        return min(self.X)

    @property
    def c(self) -> Fraction:
        return Fraction(self.kappa + 1, self.n)

    @property
    def supports_window_queries(self) -> bool:
        """Whether the zero-window bounds apply (kappa+1 <= n/2)."""
        return 2 * (self.kappa + 1) <= self.n


# ---------------------------------------------------------------------------
# Two-way rounding core
# ---------------------------------------------------------------------------


class _Dinic:
    """Unit-capacity max flow with fixed (ascending) adjacency order."""

    def __init__(self, size: int):
        self.size = size
        self.head: list[list[int]] = [[] for _ in range(size)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int = 1) -> int:
        i = len(self.to)
        self.head[u].append(i)
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(i + 1)
        self.to.append(u)
        self.cap.append(0)
        return i

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = [-1] * self.size
            level[s] = 0
            queue = [s]
            for u in queue:
                for ei in self.head[u]:
                    v = self.to[ei]
                    if self.cap[ei] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return flow
            it = [0] * self.size

            def dfs(u: int) -> bool:
                if u == t:
                    return True
                while it[u] < len(self.head[u]):
                    ei = self.head[u][it[u]]
                    v = self.to[ei]
                    if self.cap[ei] > 0 and level[v] == level[u] + 1 and dfs(v):
                        self.cap[ei] -= 1
                        self.cap[ei ^ 1] += 1
                        return True
                    it[u] += 1
                return False

            while dfs(s):
                flow += 1


def _prefix_windows(order: list[int], fracs: list[Fraction], total_ones: int):
    """For each fractional item, the slots it may serve in the given order.

    Slot v (v-th one placed, 1-based) must land at a position k where the
    fractional prefix sum G satisfies G_{k-1} < v <= ceil(G_k); equivalently
    item at position k serves slots floor(G_{k-1}) < v <= ceil(G_k).  Window
    size is at most 2 because each fraction is below 1.
    """
    serve: dict[int, list[int]] = {}
    g = Fraction(0)
    for pos in order:
        f = fracs[pos]
        if f == 0:
            continue
        lo = floor(g) + 1
        g += f
        hi = min(ceil(g), total_ones)
        if lo <= hi:
            serve[pos] = list(range(lo, hi + 1))
        else:
            serve[pos] = []
    return serve


def _try_round(fracs: list[Fraction], order_b: list[int], total_ones: int):
    n = len(fracs)
    items = [i for i in range(n) if fracs[i] != 0]
    if total_ones == 0:
        return [0] * n
    order_a = list(range(n))
    serve_a = _prefix_windows(order_a, fracs, total_ones)
    serve_b = _prefix_windows(order_b, fracs, total_ones)

    # a position can host at most one unit, so each item is an in/out node
    # pair joined by a single unit edge
    item_in = {k: total_ones + 1 + 2 * idx for idx, k in enumerate(items)}
    b_base = total_ones + 1 + 2 * len(items)
    sink = b_base + total_ones + 1
    net = _Dinic(sink + 1)
    for v in range(1, total_ones + 1):
        net.add_edge(0, v)
    item_edge: dict[int, int] = {}
    for k in items:
        for v in serve_a[k]:
            net.add_edge(v, item_in[k])
        item_edge[k] = net.add_edge(item_in[k], item_in[k] + 1)
        for v in serve_b[k]:
            net.add_edge(item_in[k] + 1, b_base + v)
    for v in range(1, total_ones + 1):
        net.add_edge(b_base + v, sink)
    if net.max_flow(0, sink) != total_ones:
        return None
    return [
        1 if k in item_edge and net.cap[item_edge[k]] == 0 else 0
        for k in range(n)
    ]


def _two_way_round_core(values: list[Fraction], order_b: list[int]) -> list[int]:
    """Round arbitrary nonnegative rationals consistently in two scan orders.

    order_b lists 0-based positions in the second scan order; the first order
    is the list order.  Returns integers x with x_i in {floor, ceil} of
    values[i] and all prefix sums (both orders) within the floor/ceil of the
    exact prefix sums.
    """
    floors = [floor(v) for v in values]
    fracs = [v - f for v, f in zip(values, floors)]
    total = sum(fracs, Fraction(0))
    candidates = [int(total)] if total.denominator == 1 else [floor(total), ceil(total)]
    for b in candidates:
        bits = _try_round(fracs, order_b, b)
        if bits is not None:
            return [f + o for f, o in zip(floors, bits)]
    raise RuntimeError(
        "two-way rounding solver found no feasible rounding; this is a bug"
    )


def two_way_round(seq, perm) -> list[int]:
    """Round each value to floor or ceil, consistently in two prefix orders.

    `seq` is a RealSequence (or iterable of exact rationals in [0, 1]);
    `perm` is a bijection on 1..n giving the second scan order.  Every prefix
    sum of the output, in the original order and in the permuted order, stays
    within the floor/ceil of the corresponding exact prefix sum.  Existence is
    guaranteed; an infeasible flow indicates an internal bug and raises.
    """
    if not isinstance(seq, RealSequence):
        seq = RealSequence(tuple(seq))
    values = list(seq.values)
    n = len(values)
    order = [int(p) - 1 for p in perm]
    if sorted(order) != list(range(n)):
        raise ValueError("perm must be a bijection on 1..n")
    return _two_way_round_core(values, order)


# ---------------------------------------------------------------------------
# Matrix rounding
# ---------------------------------------------------------------------------


def round_matrix(T) -> BinaryMatrix:
    """Round a rational matrix with entries in [0,1] to bits, consistently.

    Every initial row segment, initial column segment, and the grand total of
    the output differ from the exact sums by strictly less than 1.  The
    construction appends a slack column (per-row ceiling defect), a slack row
    (per-column ceiling defect) and a corner entry holding the full grand
    total, two-way rounds the extended matrix in row-major versus column-major
    order, and truncates.  Full rows and columns of the extended matrix then
    have integral sums, which collapses the prefix windows at their ends and
    yields the strict bounds on the truncated part.
    """
    rows = [[_frac(x) for x in row] for row in T]
    if not rows or not rows[0]:
        raise ValueError("matrix must be nonempty")
    n = len(rows[0])
    for row in rows:
        if len(row) != n:
            raise ValueError("ragged rows")
        for x in row:
            if not 0 <= x <= 1:
                raise ValueError(f"entry {x} outside [0, 1]")
    m = len(rows)
    row_sums = [sum(row, Fraction(0)) for row in rows]
    col_sums = [sum(row[j] for row in rows) for j in range(n)]
    grand = sum(row_sums, Fraction(0))
    ext = [row + [ceil(row_sums[i]) - row_sums[i]] for i, row in enumerate(rows)]
    ext.append([ceil(c) - c for c in col_sums] + [grand])
    values = [x for row in ext for x in row]
    order_b = [i * (n + 1) + j for j in range(n + 1) for i in range(m + 1)]
    rounded = _two_way_round_core(values, order_b)
    out = [
        tuple(rounded[i * (n + 1) + j] for j in range(n)) for i in range(m)
    ]
    return BinaryMatrix(tuple(out))


def build_FX(spec: RoundingSpec) -> BinaryMatrix:
    """Designation matrix for near-constant row sums X: round T^X = X[i]/n.

    Row i of the output sums to exactly X[i]; initial column sums of equal
    depth differ by at most 1 and initial row sums of equal width by at most
    2.  The all-zero X short-circuits to the zero matrix without the solver.
    """
    if all(s == 0 for s in spec.X):
        return BinaryMatrix(tuple(tuple(0 for _ in range(spec.n)) for _ in spec.X))
    T = [[Fraction(s, spec.n)] * spec.n for s in spec.X]
    F = round_matrix(T)
    for i, s in enumerate(spec.X):
        if F.row_counts[i] != s:
            raise RuntimeError("row sum drifted from its exact target; bug")
    return F


# ---------------------------------------------------------------------------
# Zero-position queries
# ---------------------------------------------------------------------------


def zero_index(F: BinaryMatrix, r: int, d: int) -> int:
    """Column of the d-th zero of row r, counting cyclically across rows.

    For 1 <= d <= (zeros in row r) this is min{b : b = d + sum_{j<=b} f_rj}.
    Larger d continues into rows r+1, r+2, ... (wrapping past the last row);
    d <= 0 walks backward into earlier rows, so e.g. the 0-th zero of row r+1
    is the last zero of row r.  Rejects matrices with no zeros at all.
    """
    if not 1 <= r <= F.m:
        raise ValueError("row out of range")
    if sum(F.row_counts) == F.m * F.n:
        raise ValueError("matrix has no zeros")
    row = r
    while not 1 <= d <= F.zeros_in_row(row):
        if d <= 0:
            row = (row - 2) % F.m + 1
            d += F.zeros_in_row(row)
        else:
            d -= F.zeros_in_row(row)
            row = row % F.m + 1
    return F.zero_columns(row)[d - 1]


def check_forward(F: BinaryMatrix, T, r: int, h: int) -> str:
    """Classify position (r, h): 'forward' if the rounded prefix of row r
    meets the ceiling of the exact prefix, 'backward' if it is one below.

    Any other discrepancy means F is not a consistent rounding of T here.
    """
    frow = F.row(r)
    trow = [_frac(x) for x in T[r - 1]]
    fsum = sum(frow[:h])
    tsum = sum(trow[:h], Fraction(0))
    c = ceil(tsum)
    if fsum == c:
        return "forward"
    if fsum == c - 1:
        return "backward"
    raise ValueError(f"prefix ({r},{h}) is not consistently rounded")


# ---------------------------------------------------------------------------
# Dump format
# ---------------------------------------------------------------------------


# ---------------------------------------------------------------------------
# Validators
# ---------------------------------------------------------------------------


def matrix_rounding_violations(T, F: BinaryMatrix) -> list[str]:
    """Check that F is a consistent rounding of T (strict error bounds).

    Every initial row segment, every initial column segment, and the grand
    total of F must differ from the corresponding exact sum of T by strictly
    less than 1.  Arithmetic is exact, so equality with 1 is a reported
    violation, not a tolerance call.  Returns human-readable violation
    strings; an empty list means F passes.
    """
    rows = [[_frac(x) for x in row] for row in T]
    if len(rows) != F.m or len(rows[0]) != F.n:
        raise ValueError("matrix shapes disagree")
    out = []
    for i, trow in enumerate(rows, start=1):
        diff = Fraction(0)
        for b, (t, f) in enumerate(zip(trow, F.row(i)), start=1):
            diff += t - f
            if not -1 < diff < 1:
                out.append(f"row {i} prefix {b}: discrepancy {diff}")
    for j in range(1, F.n + 1):
        diff = Fraction(0)
        for b in range(1, F.m + 1):
            diff += rows[b - 1][j - 1] - F.entry(b, j)
            if not -1 < diff < 1:
                out.append(f"column {j} prefix {b}: discrepancy {diff}")
    grand = sum((x for trow in rows for x in trow), Fraction(0)) - sum(
        F.row_counts
    )
    if not -1 < grand < 1:
        out.append(f"grand total: discrepancy {grand}")
    return out


def balance_violations(F: BinaryMatrix, X) -> list[str]:
    """Check the balance contract of a designation matrix against row sums X.

    Requires: row r of F sums to exactly X[r]; initial column segments of
    equal depth have counts within 1 of each other; initial row segments of
    equal width have counts within 2.  Returns violation strings (empty list
    means F passes).
    """
    import numpy as np

    X = tuple(int(s) for s in X)
    if len(X) != F.m:
        raise ValueError("row-sum sequence length disagrees with matrix")
    out = []
    for i, (got, want) in enumerate(zip(F.row_counts, X), start=1):
        if got != want:
            out.append(f"row {i} sums to {got}, expected {want}")
    arr = np.array(F.rows, dtype=np.int64)
    colpref = arr.cumsum(axis=0)
    spread = colpref.max(axis=1) - colpref.min(axis=1)
    for d in np.nonzero(spread > 1)[0]:
        out.append(f"column prefixes of depth {d + 1} spread {spread[d]} > 1")
    rowpref = arr.cumsum(axis=1)
    spread = rowpref.max(axis=0) - rowpref.min(axis=0)
    for h in np.nonzero(spread > 2)[0]:
        out.append(f"row prefixes of width {h + 1} spread {spread[h]} > 2")
    return out


def window_violations(spec: RoundingSpec, F: BinaryMatrix) -> list[str]:
    """Check the zero-spacing windows of a designation matrix for ``spec``.

    Applies when kappa+1 <= n/2.  With every window fully inside its row
    (positions stay in 1..n, zero indices stay within the row's zero count):

    * a forward position h of row i has at most e ones in columns
      h+1..h+2e, so the e zeros after a forward zero arrive within 2e
      columns;
    * a backward position allows one extra one (e+1), and the e zeros after
      a backward zero arrive within 2e+2 columns;
    * across any two rows r, s, the (d+e)-th zero of row r is at most
      2e+4 columns past the d-th zero of row s.

    Returns violation strings; an empty list means F passes.
    """
    import numpy as np

    if not spec.supports_window_queries:
        raise ValueError("window bounds require kappa+1 <= n/2")
    if F.m != spec.m or F.n != spec.n:
        raise ValueError("matrix shape disagrees with its row-sum sequence")
    n = spec.n
    out = []
    # Per-row window sums.  With g[h] = 2*(ones in columns 1..h) - h, the
    # bound "at most e ones in columns h+1..h+2e for all in-range e" is
    # exactly "g never rises above g[h] at same-parity positions >= h"
    # (and "at most e+1" allows a rise of 2), so one suffix maximum per
    # parity class settles every window at once.
    for i in range(1, F.m + 1):
        s = spec.X[i - 1]
        fpref = np.concatenate([[0], np.cumsum(F.row(i))])
        h_idx = np.arange(n + 1)
        ceil_t = -(-h_idx * s // n)
        forward = fpref == ceil_t
        backward = fpref == ceil_t - 1
        for h in np.nonzero(~forward & ~backward)[0]:
            out.append(f"row {i} prefix {h}: not a consistent rounding")
        g = 2 * fpref - h_idx
        suffmax = np.empty(n + 1, dtype=np.int64)
        for parity in (0, 1):
            vals = g[parity::2]
            suffmax[parity::2] = np.maximum.accumulate(vals[::-1])[::-1]
        allow = np.where(forward, 0, 2)
        bad = np.nonzero((suffmax - g > allow) & (forward | backward))[0]
        for h in bad:
            kind = "forward" if forward[h] else "backward"
            out.append(
                f"row {i} {kind} position {h}: a window holds too many ones"
            )
        # Zero-gap form: with A[x] = (column of x-th zero) - 2x, the gap
        # bound after the d-th zero is a suffix-maximum condition on A.
        zeros = np.array(F.zero_columns(i), dtype=np.int64)
        a = zeros - 2 * np.arange(1, len(zeros) + 1)
        asuffmax = np.maximum.accumulate(a[::-1])[::-1]
        zallow = np.where(forward[zeros], 0, 2)
        for d in np.nonzero(asuffmax - a > zallow)[0]:
            kind = "forward" if forward[zeros[d]] else "backward"
            out.append(
                f"row {i} {kind} zero {d + 1}: later zeros arrive too late"
            )
    # Cross-row zero gaps: N_r(d+e) - N_s(d) <= 2e+4 for in-range d >= 1,
    # e >= 0.  Writing x = d+e and A_r[x] = N_r(x) - 2x, the bound reads
    # A_r[x] <= 4 + min(A_s[1..min(x, zeros in s)]), so per-row prefix
    # minima (extended flat past each row's last zero) settle all pairs.
    qmax = max(F.zeros_in_row(i) for i in range(1, F.m + 1))
    lowest = np.full((F.m, qmax), np.iinfo(np.int64).min, dtype=np.int64)
    prefmin = np.empty((F.m, qmax), dtype=np.int64)
    for i in range(1, F.m + 1):
        zeros = np.array(F.zero_columns(i), dtype=np.int64)
        a = zeros - 2 * np.arange(1, len(zeros) + 1)
        lowest[i - 1, : len(a)] = a
        padded = np.concatenate([a, np.full(qmax - len(a), a[-1])])
        prefmin[i - 1] = np.minimum.accumulate(padded)
    amax = lowest.max(axis=0)
    mmin = prefmin.min(axis=0)
    for x in np.nonzero(amax > mmin + 4)[0]:
        r = int(lowest[:, x].argmax()) + 1
        s = int(prefmin[:, x].argmin()) + 1
        out.append(
            f"zero {x + 1} of row {r} trails a zero of row {s} by more "
            f"than the cross-row window allows"
        )
    return out


# ---------------------------------------------------------------------------
# Dump format
# ---------------------------------------------------------------------------


def dump_matrix(F: BinaryMatrix) -> str:
    """Render as the matrix dump format: header "m n", then '0'/'1' rows."""
    lines = [f"{F.m} {F.n}"]
    lines.extend("".join(str(b) for b in row) for row in F.rows)
    return "\n".join(lines) + "\n"


def _parse_one(lines: list[str], at: int) -> tuple[BinaryMatrix, int]:
    header = lines[at].split()
    if len(header) != 2:
        raise ValueError(f"bad matrix header: {lines[at]!r}")
    m, n = int(header[0]), int(header[1])
    rows = []
    for i in range(m):
        text = lines[at + 1 + i].strip()
        if len(text) != n or set(text) - {"0", "1"}:
            raise ValueError(f"bad matrix row: {text!r}")
        rows.append(tuple(int(ch) for ch in text))
    return BinaryMatrix(tuple(rows)), at + 1 + m


def parse_matrix(text: str) -> BinaryMatrix:
    """Parse a single matrix dump."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    mat, used = _parse_one(lines, 0)
    if used != len(lines):
        raise ValueError("trailing content after matrix")
    return mat


def parse_matrices(text: str) -> list[BinaryMatrix]:
    """Parse a concatenation of matrix dumps (e.g. a CLI seed file)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    out = []
    at = 0
    while at < len(lines):
        mat, at = _parse_one(lines, at)
        out.append(mat)
    return out
