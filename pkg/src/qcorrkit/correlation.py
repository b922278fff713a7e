"""Bipartite correlation tables and operations that build, split, and compare them.

The central object is :class:`Correlation`: the full conditional probability
table p(a, b | x, y) over finite question sets (sizes ``m``, ``n``) and answer
sets (sizes ``r``, ``s``).  Correlations compose by weighted direct sums over
disjoint answer blocks, restrict to question subsets, and compare under a
max-total-variation or Euclidean metric.  Values are immutable after
construction and all operations are pure, so they are safe to share across
threads.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

__all__ = [
    "Correlation",
    "CorrelationTable",
    "BlockSpec",
    "BlockCheckFailure",
    "BlockCheckResult",
    "CorrelationError",
    "direct_sum",
    "block_structure_check",
    "restrict",
    "distance",
    "permute_answers",
    "NEGATIVE_CLAMP",
    "DEFAULT_NORM_TOL",
]

# Entries slightly below zero are float noise from inner products; anything
# worse than this is treated as a genuine invariant violation.
NEGATIVE_CLAMP = 1e-14
DEFAULT_NORM_TOL = 1e-12

Metric = Literal["max_tv", "l2"]


class CorrelationError(ValueError):
    """A probability table violates a correlation invariant."""


def _clean_probabilities(arr: np.ndarray, norm_tol: float, what: str) -> np.ndarray:
    """Clamp tiny negatives to zero and check per-table normalization."""
    if np.any(arr < -NEGATIVE_CLAMP):
        idx = np.unravel_index(int(np.argmin(arr)), arr.shape)
        raise CorrelationError(
            f"{what} has negative entry {arr[idx]:.3e} at index {idx}"
        )
    arr = np.where(arr < 0.0, 0.0, arr)
    sums = arr.sum(axis=(-2, -1))
    worst = float(np.max(np.abs(sums - 1.0)))
    if worst > norm_tol:
        raise CorrelationError(
            f"{what} is not normalized: max |sum - 1| = {worst:.3e} > {norm_tol:.1e}"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Correlation:
    """Conditional distribution p(a, b | x, y) stored as an (m, n, r, s) array.

    Each (x, y) slice is a probability table over answer pairs: entries are
    nonnegative (values within ``NEGATIVE_CLAMP`` of zero are clamped at
    construction) and sum to one within ``norm_tol``.
    """

    table: np.ndarray
    norm_tol: float = DEFAULT_NORM_TOL

    def __post_init__(self) -> None:
        arr = np.array(self.table, dtype=float)
        if arr.ndim != 4:
            raise CorrelationError(
                f"correlation table must be 4-dimensional, got shape {arr.shape}"
            )
        if min(arr.shape) < 1:
            raise CorrelationError(f"empty question or answer axis: {arr.shape}")
        arr = _clean_probabilities(arr, self.norm_tol, "correlation table")
        object.__setattr__(self, "table", arr)

    @property
    def m(self) -> int:
        return self.table.shape[0]

    @property
    def n(self) -> int:
        return self.table.shape[1]

    @property
    def r(self) -> int:
        return self.table.shape[2]

    @property
    def s(self) -> int:
        return self.table.shape[3]

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.table.shape  # type: ignore[return-value]

    def table_at(self, x: int, y: int) -> "CorrelationTable":
        """Return the single probability table for question pair (x, y)."""
        if not (0 <= x < self.m and 0 <= y < self.n):
            raise CorrelationError(f"question pair ({x}, {y}) out of range")
        return CorrelationTable(x=x, y=y, entries=self.table[x, y])

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "s": self.s,
            "table": self.table.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict, norm_tol: float = DEFAULT_NORM_TOL) -> "Correlation":
        arr = np.asarray(data["table"], dtype=float)
        expected = (data["m"], data["n"], data["r"], data["s"])
        if arr.shape != expected:
            raise CorrelationError(
                f"table shape {arr.shape} disagrees with header {expected}"
            )
        return cls(arr, norm_tol=norm_tol)

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @classmethod
    def from_json(cls, text: str, norm_tol: float = DEFAULT_NORM_TOL) -> "Correlation":
        return cls.from_dict(json.loads(text), norm_tol=norm_tol)

    def to_csv(self) -> str:
        """One row per (x, y, a, b, value), header included."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "a", "b", "p"])
        for x in range(self.m):
            for y in range(self.n):
                for a in range(self.r):
                    for b in range(self.s):
                        writer.writerow([x, y, a, b, repr(float(self.table[x, y, a, b]))])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """A single r x s probability table attached to a question pair."""

    x: int
    y: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2:
            raise CorrelationError(f"table entries must be a matrix, got {arr.shape}")
        arr = _clean_probabilities(arr, DEFAULT_NORM_TOL, f"table ({self.x},{self.y})")
        object.__setattr__(self, "entries", arr)


def _normalize_partition(partition: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    classes = []
    seen: set[int] = set()
    for cls in partition:
        members = tuple(sorted(int(a) for a in cls))
        if not members:
            raise CorrelationError("partition classes must be nonempty")
        if len(set(members)) != len(members) or seen & set(members):
            raise CorrelationError("partition classes must be disjoint")
        seen.update(members)
        classes.append(members)
    return tuple(classes)


@dataclass(frozen=True)
class BlockSpec:
    """Answer-set partitions (and optional block weights) for a direct sum.

    The partitions must have the same number of classes on both sides; whether
    they cover the answer sets of a particular correlation is checked at the
    point of use.
    """

    alice_partition: tuple[tuple[int, ...], ...]
    bob_partition: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        ap = _normalize_partition(self.alice_partition)
        bp = _normalize_partition(self.bob_partition)
        if len(ap) != len(bp):
            raise CorrelationError(
                f"partitions must have the same block count: {len(ap)} != {len(bp)}"
            )
        object.__setattr__(self, "alice_partition", ap)
        object.__setattr__(self, "bob_partition", bp)
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if len(w) != len(ap):
                raise CorrelationError("one weight per block required")
            if any(v < 0.0 for v in w):
                raise CorrelationError("block weights must be nonnegative")
            if abs(sum(w) - 1.0) > DEFAULT_NORM_TOL:
                raise CorrelationError(
                    f"block weights must sum to 1, got {sum(w)!r}"
                )
            object.__setattr__(self, "weights", w)

    @property
    def num_blocks(self) -> int:
        return len(self.alice_partition)


def _check_partition_covers(partition: tuple[tuple[int, ...], ...], size: int, side: str) -> None:
    flat = sorted(a for cls in partition for a in cls)
    if flat != list(range(size)):
        raise CorrelationError(
            f"{side} partition {partition} is not a partition of range({size})"
        )


def direct_sum(blocks: Sequence[tuple[float, Correlation]]) -> Correlation:
    """Assemble a correlation whose answer sets split into weighted diagonal blocks.

    All blocks must share the question counts (m, n).  Block answers occupy
    contiguous index ranges in declaration order; the result satisfies
    p(a, b | x, y) = w_i * p_i(a, b | x, y) when (a, b) lie in block i and is
    zero across blocks.
    """
    if not blocks:
        raise CorrelationError("direct_sum requires at least one block")
    weights = np.array([w for w, _ in blocks], dtype=float)
    parts = [q for _, q in blocks]
    if np.any(weights < 0.0):
        raise CorrelationError("block weights must be nonnegative")
    if abs(weights.sum() - 1.0) > DEFAULT_NORM_TOL:
        raise CorrelationError(f"block weights must sum to 1, got {weights.sum()!r}")
    m, n = parts[0].m, parts[0].n
    for q in parts[1:]:
        if (q.m, q.n) != (m, n):
            raise CorrelationError(
                f"blocks must share question counts: ({q.m},{q.n}) != ({m},{n})"
            )
    r_tot = sum(q.r for q in parts)
    s_tot = sum(q.s for q in parts)
    table = np.zeros((m, n, r_tot, s_tot))
    ra = sa = 0
    for w, q in zip(weights, parts):
        table[:, :, ra : ra + q.r, sa : sa + q.s] = w * q.table
        ra += q.r
        sa += q.s
    return Correlation(table)


@dataclass(frozen=True)
class BlockCheckFailure:
    """Identifies the first entry or weight that breaks the block structure."""

    kind: str  # "cross_block_mass" | "weight_variation" | "weight_mismatch"
    x: int
    y: int
    a: int | None
    b: int | None
    value: float
    detail: str


@dataclass(frozen=True, eq=False)
class BlockCheckResult:
    ok: bool
    weights: tuple[float, ...] | None
    blocks: tuple[Correlation | None, ...] | None
    failure: BlockCheckFailure | None

    def to_block_spec(self, spec: BlockSpec) -> BlockSpec:
        if not self.ok or self.weights is None:
            raise CorrelationError("cannot build a BlockSpec from a failed check")
        return BlockSpec(spec.alice_partition, spec.bob_partition, self.weights)


def block_structure_check(p: Correlation, spec: BlockSpec, tol: float = 1e-9) -> BlockCheckResult:
    """Test whether ``p`` is a direct sum over the given answer partitions.

    On success, recovers the block weights (the in-block mass, which must be
    constant over question pairs within ``tol``) and the normalized
    sub-correlations.  Blocks with weight <= tol carry no sub-correlation.
    On failure, returns the offending entry instead.
    """
    _check_partition_covers(spec.alice_partition, p.r, "alice")
    _check_partition_covers(spec.bob_partition, p.s, "bob")
    l = spec.num_blocks

    for i, a_cls in enumerate(spec.alice_partition):
        for j, b_cls in enumerate(spec.bob_partition):
            if i == j:
                continue
            sub = p.table[:, :, list(a_cls)][:, :, :, list(b_cls)]
            worst = float(sub.max(initial=0.0))
            if worst > tol:
                x, y, ia, ib = np.unravel_index(int(np.argmax(sub)), sub.shape)
                fail = BlockCheckFailure(
                    kind="cross_block_mass",
                    x=int(x),
                    y=int(y),
                    a=a_cls[ia],
                    b=b_cls[ib],
                    value=worst,
                    detail=(
                        f"cross-block entry p({a_cls[ia]},{b_cls[ib]}|{x},{y}) = "
                        f"{worst!r} exceeds tol {tol!r}"
                    ),
                )
                return BlockCheckResult(False, None, None, fail)

    masses = np.empty((l, p.m, p.n))
    for i in range(l):
        a_cls = list(spec.alice_partition[i])
        b_cls = list(spec.bob_partition[i])
        masses[i] = p.table[:, :, a_cls][:, :, :, b_cls].sum(axis=(2, 3))
    weights = masses.mean(axis=(1, 2))
    dev = np.abs(masses - weights[:, None, None])
    if float(dev.max()) > tol:
        i, x, y = np.unravel_index(int(np.argmax(dev)), dev.shape)
        fail = BlockCheckFailure(
            kind="weight_variation",
            x=int(x),
            y=int(y),
            a=None,
            b=None,
            value=float(masses[i, x, y]),
            detail=(
                f"block {i} weight {masses[i, x, y]!r} at questions ({x},{y}) "
                f"deviates from mean {weights[i]!r} beyond tol {tol!r}"
            ),
        )
        return BlockCheckResult(False, None, None, fail)

    if spec.weights is not None:
        gap = np.abs(np.asarray(spec.weights) - weights)
        if float(gap.max()) > tol:
            i = int(np.argmax(gap))
            fail = BlockCheckFailure(
                kind="weight_mismatch",
                x=-1,
                y=-1,
                a=None,
                b=None,
                value=float(weights[i]),
                detail=(
                    f"recovered weight {weights[i]!r} for block {i} disagrees "
                    f"with declared {spec.weights[i]!r}"
                ),
            )
            return BlockCheckResult(False, None, None, fail)

    blocks: list[Correlation | None] = []
    for i in range(l):
        if weights[i] <= tol:
            blocks.append(None)
            continue
        a_cls = list(spec.alice_partition[i])
        b_cls = list(spec.bob_partition[i])
        sub = p.table[:, :, a_cls][:, :, :, b_cls] / weights[i]
        # Per-table mass may differ from the mean weight by up to tol.
        sub_tol = max(DEFAULT_NORM_TOL, 4.0 * tol / weights[i])
        blocks.append(Correlation(sub, norm_tol=sub_tol))
    return BlockCheckResult(True, tuple(float(w) for w in weights), tuple(blocks), None)


def _check_question_subset(subset: Sequence[int], size: int, side: str) -> list[int]:
    xs = [int(v) for v in subset]
    if not xs:
        raise CorrelationError(f"{side} question subset must be nonempty")
    if len(set(xs)) != len(xs):
        raise CorrelationError(f"{side} question subset has duplicates: {xs}")
    if any(not (0 <= v < size) for v in xs):
        raise CorrelationError(f"{side} question subset {xs} out of range({size})")
    return xs


def restrict(p: Correlation, xs: Sequence[int], ys: Sequence[int]) -> Correlation:
    """Keep only the given questions on each side; answer sets are unchanged."""
    xs = _check_question_subset(xs, p.m, "alice")
    ys = _check_question_subset(ys, p.n, "bob")
    return Correlation(p.table[np.ix_(xs, ys)], norm_tol=p.norm_tol)


def distance(p: Correlation, q: Correlation, metric: Metric = "max_tv") -> float:
    """Distance between two correlations of identical shape.

    ``max_tv``: the largest total-variation distance over question pairs.
    ``l2``: the Euclidean norm of the entrywise difference across all tables.
    """
    if p.shape != q.shape:
        raise CorrelationError(f"shape mismatch: {p.shape} != {q.shape}")
    diff = p.table - q.table
    if metric == "max_tv":
        return float(0.5 * np.abs(diff).sum(axis=(2, 3)).max())
    if metric == "l2":
        return float(np.sqrt((diff**2).sum()))
    raise CorrelationError(f"unknown metric {metric!r}")


def _check_permutation(perm: Sequence[int], size: int, side: str) -> np.ndarray:
    arr = np.asarray([int(v) for v in perm])
    if sorted(arr.tolist()) != list(range(size)):
        raise CorrelationError(f"{side} answer permutation {perm} is not a permutation of range({size})")
    return arr


def permute_answers(
    p: Correlation,
    alice_perm: Sequence[int] | None = None,
    bob_perm: Sequence[int] | None = None,
) -> Correlation:
    """Relabel answers: old answer ``a`` becomes ``alice_perm[a]`` (same for Bob)."""
    pa = _check_permutation(alice_perm, p.r, "alice") if alice_perm is not None else np.arange(p.r)
    pb = _check_permutation(bob_perm, p.s, "bob") if bob_perm is not None else np.arange(p.s)
    inv_a = np.argsort(pa)
    inv_b = np.argsort(pb)
    return Correlation(p.table[:, :, inv_a][:, :, :, inv_b], norm_tol=p.norm_tol)
