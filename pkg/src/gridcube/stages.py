"""The inductive lift: blank levels, designation matrices, inflate and stack.

Each stage i map sends the grid into a box of levels; the next stage spreads
those levels across sections of 2^{e_i - e_{i-1}} slots (skipping the slots a
designation matrix marks blank) and then collapses each section onto a shared
residue axis, recording how many earlier sections already claimed the same
residue slot.  The composition of all stages yields coordinates bounded by
the block widths, i.e. an embedding into the optimal hypercube's coordinate
box.

Sections, pages, offsets and heights are 1-based at this API surface.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .base2d import Embedding2D, build_f2
from .grids import GridSpec, level_budget
from .rounding import BinaryMatrix, RoundingSpec, build_FX


def s_sequence(spec: GridSpec, i: int) -> tuple[int, ...]:
    """Blanks per section at stage i: s_i(j) for j = 1..P_i.

    s_i(j) = w - ceil(A/h) + floor(j phi) - floor((j-1) phi) where
    w = 2^{e_i - e_{i-1}}, A = a_1...a_i, h = 2^{e_{i-1}}, and
    phi = ceil(A/h) - A/h.  Evaluated in exact integer arithmetic.  Before
    returning, the budget identity (nonblank slots in every section prefix
    exactly hold the ceil(r A / h) levels needed) and the two-value range
    with s_i(j) <= w/2 are asserted.
    """
    if not 2 <= i <= spec.k - 1:
        raise ValueError(f"stage {i} outside [2, {spec.k - 1}]")
    width = 1 << spec.block_width(i)
    half = 1 << spec.exponents[i - 1]
    prefix = spec.prefix_product(i)
    pages = spec.page_count(i)
    lead = -(-prefix // half)
    base = width - lead
    phi_num = lead * half - prefix  # phi = phi_num / half, in [0, 1)
    s = []
    prev = 0
    for j in range(1, pages + 1):
        cur = (j * phi_num) // half
        s.append(base + cur - prev)
        prev = cur
    total = 0
    for r, val in enumerate(s, start=1):
        if val not in (base, base + 1):
            raise AssertionError(f"blank count {val} outside {{{base}, {base + 1}}}")
        if 2 * val > width:
            raise AssertionError(f"blank count {val} above half the section width")
        total += val
        if -(-r * prefix // half) + total != r * width:
            raise AssertionError(f"budget identity fails at section prefix {r}")
    return tuple(s)


@dataclass(frozen=True)
class BlankPlan:
    """Designation of blank levels at stage i: F rows = sections, cols = slots.

    Entry (r, d) = 1 marks slot d of section r blank; zeros are the nonblank
    levels, in row-major order the global level sequence the inflation step
    maps onto.
    """

    spec: GridSpec
    stage: int
    s: tuple[int, ...]
    F: BinaryMatrix
    zero_cols: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    nonblank_levels: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        zero_cols = tuple(self.F.zero_columns(r) for r in range(1, self.F.m + 1))
        object.__setattr__(self, "zero_cols", zero_cols)
        width = self.width
        levels = []
        for r, cols in enumerate(zero_cols):
            levels.extend(r * width + c for c in cols)
        object.__setattr__(self, "nonblank_levels", tuple(levels))

    @property
    def width(self) -> int:
        return 1 << self.spec.block_width(self.stage)

    @property
    def pages(self) -> int:
        return self.spec.page_count(self.stage)

    @property
    def zeros_per_row(self) -> tuple[int, ...]:
        """Nonblank levels per section (the paper-side m_r)."""
        return tuple(self.width - c for c in self.F.row_counts)

    def inflate_level(self, c: int) -> int:
        """Global index of the c-th nonblank level."""
        if not 1 <= c <= len(self.nonblank_levels):
            raise ValueError(
                f"level ordinal {c} outside the {len(self.nonblank_levels)} "
                "nonblank levels"
            )
        return self.nonblank_levels[c - 1]

    def section_of(self, level: int) -> int:
        return (level - 1) // self.width + 1

    def offset_of(self, level: int) -> int:
        return (level - 1) % self.width + 1

    def nu_of(self, level: int) -> int:
        """Ordinal of a nonblank level among its own section's nonblanks."""
        r = self.section_of(level)
        cols = self.zero_cols[r - 1]
        off = self.offset_of(level)
        idx = bisect_right(cols, off)
        if idx == 0 or cols[idx - 1] != off:
            raise ValueError(f"level {level} is blank")
        return idx

    def violations(self) -> list[str]:
        """Contract check: exact row sums, balanced column and row prefixes."""
        bad = []
        F, width = self.F, self.width
        if F.m != self.pages or F.n != width:
            bad.append(
                f"shape {F.m}x{F.n}, want {self.pages}x{width}"
            )
            return bad
        for r, want in enumerate(self.s, start=1):
            if F.row_counts[r - 1] != want:
                bad.append(f"section {r} has {F.row_counts[r - 1]} blanks, want {want}")
        cols = np.array(F.rows, dtype=np.int64)
        depth = np.cumsum(cols, axis=0)
        for t in range(F.m):
            spread = int(depth[t].max() - depth[t].min())
            if spread > 1:
                bad.append(f"column prefixes at depth {t + 1} spread {spread}")
        across = np.cumsum(cols, axis=1)
        for w in range(F.n):
            spread = int(across[:, w].max() - across[:, w].min())
            if spread > 2:
                bad.append(f"row prefixes at width {w + 1} spread {spread}")
        return bad


def build_blank_plan(
    spec: GridSpec, i: int, matrix: BinaryMatrix | None = None
) -> BlankPlan:
    """Blank designation for stage i, generated or externally seeded.

    With no matrix, rounds the constant-row target s_i(j)/width; an external
    matrix (e.g. a published worked example) is accepted only if it passes
    the same contracts the generated one must.
    """
    s = s_sequence(spec, i)
    width = 1 << spec.block_width(i)
    if matrix is None:
        matrix = build_FX(RoundingSpec(s, width))
    plan = BlankPlan(spec, i, s, matrix)
    bad = plan.violations()
    if bad:
        raise ValueError(
            f"stage {i} designation matrix rejected: " + "; ".join(bad)
        )
    return plan


@dataclass(frozen=True)
class StageEmbedding:
    """Per-vertex coordinates at one stage, plus the transition that made it.

    `coords[rank]` is the stage-i image tuple of the vertex with that rank
    (row-major int array, 1-based values).  For stages above 2, the inflated
    level each vertex passed through, its section and its ordinal among the
    section's nonblank levels are retained, along with the previous stage.
    """

    spec: GridSpec
    stage: int
    coords: np.ndarray
    plan: BlankPlan | None = None
    source_level: np.ndarray | None = None
    source_section: np.ndarray | None = None
    source_nu: np.ndarray | None = None
    prev: "StageEmbedding | None" = None
    base: Embedding2D | None = None

    def __post_init__(self):
        if self.coords.shape != (self.spec.size, self.stage):
            raise ValueError("coordinate array shape mismatch")

    def f(self, v) -> tuple[int, ...]:
        """Stage image of a vertex (GridVertex, rank, or coordinate tuple)."""
        rank = v if isinstance(v, (int, np.integer)) else getattr(v, "rank", None)
        if rank is None:
            rank = self.spec.rank_of(tuple(v))
        return tuple(int(c) for c in self.coords[rank])

    def is_injective(self) -> bool:
        return len(np.unique(self.coords, axis=0)) == self.spec.size

    def stage_chain(self) -> "list[StageEmbedding]":
        """This stage and all retained predecessors, earliest first."""
        chain = []
        emb: StageEmbedding | None = self
        while emb is not None:
            chain.append(emb)
            emb = emb.prev
        return chain[::-1]


@dataclass(frozen=True)
class InflatedStage:
    """Coordinates after inflation: stage-i levels pushed to global levels."""

    prev: StageEmbedding
    plan: BlankPlan
    levels: np.ndarray


def inflate(prev: StageEmbedding, plan: BlankPlan) -> InflatedStage:
    """Replace each stage-i coordinate by its nonblank global level.

    Order-preserving, hence injective; a coordinate beyond the nonblank
    supply would contradict the budget identity and raises as a defect.
    """
    if plan.stage != prev.stage:
        raise ValueError("plan stage does not match embedding stage")
    table = np.asarray(plan.nonblank_levels, dtype=np.int64)
    idx = prev.coords[:, prev.stage - 1].astype(np.int64) - 1
    if idx.min() < 0 or idx.max() >= len(table):
        raise RuntimeError(
            "stage coordinate beyond the nonblank level supply; "
            "budget identity violated"
        )
    return InflatedStage(prev, plan, table[idx])


def stack(inflated: InflatedStage, plan: BlankPlan) -> StageEmbedding:
    """Collapse sections onto the residue axis, recording stack heights.

    A point in section r at slot offset b becomes (address..., b, n) where n
    counts the points of sections 1..r (this one included) sharing both the
    address and the offset.  Within one section no two points share that key,
    so heights are the 1-based rank of the section among the key's sections.
    """
    if plan is not inflated.plan:
        raise ValueError("stack must use the plan that produced the inflation")
    prev = inflated.prev
    i = prev.stage
    width = plan.width
    levels = inflated.levels
    sections = (levels - 1) // width + 1
    offsets = (levels - 1) % width + 1
    address = prev.coords[:, : i - 1].astype(np.int64)
    keys = [offsets] + [address[:, t] for t in range(i - 1)]
    order = np.lexsort([sections] + keys)
    key_mat = np.column_stack(keys)[order]
    sec_sorted = sections[order]
    new_group = np.ones(len(order), dtype=bool)
    new_group[1:] = (key_mat[1:] != key_mat[:-1]).any(axis=1)
    if not (new_group[1:] | (sec_sorted[1:] > sec_sorted[:-1])).all():
        raise AssertionError("two same-section points share an address and slot")
    group_ids = np.cumsum(new_group) - 1
    starts = np.flatnonzero(new_group)
    heights_sorted = np.arange(len(order)) - starts[group_ids] + 1
    heights = np.empty(len(order), dtype=np.int64)
    heights[order] = heights_sorted
    coords = np.column_stack([address, offsets, heights]).astype(np.int32)
    nu_lookup = np.zeros(plan.pages * width + 1, dtype=np.int64)
    for g in plan.nonblank_levels:
        nu_lookup[g] = plan.nu_of(g)
    return StageEmbedding(
        prev.spec,
        i + 1,
        coords,
        plan=plan,
        source_level=levels,
        source_section=sections.astype(np.int32),
        source_nu=nu_lookup[levels].astype(np.int32),
        prev=prev,
    )


def _stage2(spec: GridSpec, base: Embedding2D) -> StageEmbedding:
    a1 = spec.dims[0]
    per_chain = spec.page_count(1)
    table = np.zeros((a1, per_chain, 2), dtype=np.int32)
    for i in range(a1):
        chain = base.chains[i][:per_chain]
        table[i, :, 0] = [row for row, _ in chain]
        table[i, :, 1] = [col for _, col in chain]
    ranks = np.arange(spec.size)
    coords = table[ranks % a1, ranks // a1]
    return StageEmbedding(spec, 2, coords, base=base)


def build_fk(
    spec: GridSpec, seed_matrices: list[BinaryMatrix] | None = None
) -> StageEmbedding:
    """Compose all stages; the result retains the full stage chain.

    `seed_matrices` optionally supplies the designation matrix for each stage
    2..k-1 in order (k-2 matrices); each must pass the stage's contracts.
    For k = 2 the base map is returned unchanged.
    """
    if seed_matrices is not None and len(seed_matrices) != spec.k - 2:
        raise ValueError(
            f"need {spec.k - 2} seed matrices for stages 2..{spec.k - 1}, "
            f"got {len(seed_matrices)}"
        )
    emb = _stage2(spec, build_f2(spec))
    for i in range(2, spec.k):
        matrix = seed_matrices[i - 2] if seed_matrices is not None else None
        plan = build_blank_plan(spec, i, matrix=matrix)
        emb = stack(inflate(emb, plan), plan)
    return emb


def _height_table(emb: StageEmbedding, mask) -> dict[tuple[int, ...], int]:
    spec = emb.spec
    i = emb.stage - 1
    box = [range(1, (1 << spec.block_width(j)) + 1) for j in range(1, i + 1)]
    table = {addr: 0 for addr in product(*box)}
    addrs = emb.coords[mask][:, :i]
    if len(addrs):
        uniq, counts = np.unique(addrs, axis=0, return_counts=True)
        for row, cnt in zip(uniq, counts):
            table[tuple(int(x) for x in row)] = int(cnt)
    return table


def stack_heights(emb: StageEmbedding, r: int) -> dict[tuple[int, ...], int]:
    """Height of every stack address after sections 1..r, r < P_i.

    Keys run over the whole address box (heights 0 where nothing landed).
    When every grid side is at least 5 the two-value contract
    height in {ceil(r A / 2^{e_i}), same - 1} is asserted; for smaller sides
    it is left to the caller to inspect (observed but not guaranteed).
    """
    if emb.stage < 3 or emb.source_section is None:
        raise ValueError("stack heights need a stacked stage (3 or above)")
    i = emb.stage - 1
    pages = emb.spec.page_count(i)
    if not 1 <= r < pages:
        raise ValueError(f"section prefix {r} outside [1, {pages - 1}]")
    table = _height_table(emb, emb.source_section <= r)
    if min(emb.spec.dims) >= 5:
        target = -(-r * emb.spec.prefix_product(i) // (1 << emb.spec.exponents[i]))
        got = set(table.values())
        if not got <= {target, target - 1}:
            raise AssertionError(
                f"stack heights {sorted(got)} not within "
                f"{{{target - 1}, {target}}} at prefix {r}"
            )
    return table


def full_stack_heights(emb: StageEmbedding) -> dict[tuple[int, ...], int]:
    """Heights over the whole address box after every section."""
    if emb.stage < 3 or emb.source_section is None:
        raise ValueError("stack heights need a stacked stage (3 or above)")
    return _height_table(emb, np.ones(emb.spec.size, dtype=bool))


def nu_distance(plan: BlankPlan, sec1: int, nu1: int, sec2: int, nu2: int) -> int:
    """Cyclic-style distance between nonblank ordinals of two sections.

    For z' the nu1-th nonblank of section sec1 and z'' the nu2-th of sec2:
    min(|nu2 - nu1|, m_sec1 - nu1 + nu2, m_sec2 - nu2 + nu1), the three-way
    minimum over direct difference and the two wraparound readings.
    """
    zeros = plan.zeros_per_row
    m1, m2 = zeros[sec1 - 1], zeros[sec2 - 1]
    return min(abs(nu2 - nu1), m1 - nu1 + nu2, m2 - nu2 + nu1)


def dump_stage(emb: StageEmbedding) -> str:
    """Stage dump: header "STAGE i u_i", then "rank: (c_1,...,c_i)" lines."""
    u = level_budget(emb.spec, emb.stage)
    lines = [f"STAGE {emb.stage} {u}"]
    for rank in range(emb.spec.size):
        tup = ", ".join(str(int(c)) for c in emb.coords[rank])
        lines.append(f"{rank}: ({tup})")
    return "\n".join(lines) + "\n"
