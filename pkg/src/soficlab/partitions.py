"""Almost-invariant partition analysis and coset-structure recovery.

A partition of a finite group that is nearly preserved by translations
should be close to the left cosets of a subgroup.  The tools here measure
that directly: the invariance defect of a partition under a permutation
(with matched blocks), the quadratic overlap functional whose value is 1
exactly on block-permuting maps, and a residual-minimizing fit of a
partition to the cosets of a candidate subgroup.

On the large product domain the relevant partitions are cylinders: fibers
of the projection onto a subset of the index factors (vector part, matrix
part, second factor).  Each candidate normal subgroup of the product has
cosets that are themselves cylinders, so every overlap is a product of
factor sizes and residuals come out exactly without materializing the
domain.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .perms import ExactPerm

FACTOR_ORDER = ("a", "h", "y")


class LabeledPartition:
    """Explicit partition of 0..N-1: a block id per point."""

    def __init__(self, block_ids):
        self.block_ids = np.asarray(block_ids, dtype=np.int64)
        self.n_blocks = int(self.block_ids.max()) + 1 if len(self.block_ids) else 0
        self.sizes = np.bincount(self.block_ids, minlength=self.n_blocks)
        if np.any(self.sizes == 0):
            raise ValueError("every block id up to the maximum must be nonempty")

    @property
    def size(self):
        return len(self.block_ids)

    def __eq__(self, other):
        return isinstance(other, LabeledPartition) and np.array_equal(
            self.block_ids, other.block_ids
        )


def _pair_counts(a: np.ndarray, b: np.ndarray, width: int):
    """Sparse joint counts of (a[i], b[i]) pairs."""
    key = a * width + b
    uniq, counts = np.unique(key, return_counts=True)
    return uniq // width, uniq % width, counts


def invariance_defect(partition: LabeledPartition, sigma: ExactPerm,
                      matching="greedy") -> dict:
    """(1/N) sum over blocks of |sigma(X_k) symdiff X_m(k)| for a matched
    block permutation m; 'optimal' solves the assignment problem exactly,
    'greedy' pairs blocks by descending overlap."""
    ids = partition.block_ids
    n = partition.size
    b = partition.n_blocks
    rows, cols, counts = _pair_counts(ids, ids[sigma.images], b)
    if matching == "optimal":
        if b > 1000:
            raise ValueError("optimal matching is quadratic; use greedy above 10^3 blocks")
        from scipy.optimize import linear_sum_assignment

        dense = np.zeros((b, b), dtype=np.int64)
        dense[rows, cols] = counts
        ri, ci = linear_sum_assignment(-dense)
        match = dict(zip(ri.tolist(), ci.tolist()))
        total = int(dense[ri, ci].sum())
    elif matching == "greedy":
        order = np.argsort(-counts, kind="stable")
        match = {}
        used = set()
        total = 0
        for idx in order:
            k, l = int(rows[idx]), int(cols[idx])
            if k in match or l in used:
                continue
            match[k] = l
            used.add(l)
            total += int(counts[idx])
        free_targets = [l for l in range(b) if l not in used]
        lookup = {(int(r), int(c)): int(v) for r, c, v in zip(rows, cols, counts)}
        for k in range(b):
            if k not in match:
                l = free_targets.pop()
                match[k] = l
                total += lookup.get((k, l), 0)
    else:
        raise ValueError(f"unknown matching strategy {matching!r}")
    defect = Fraction(2 * n - 2 * total, n)
    return {"defect": defect, "matching": match}


def eta_overlap(partition: LabeledPartition, sigma: ExactPerm) -> float:
    """(1/N) sum over block pairs of |sigma(X_k) meet X_l|^2 /
    sqrt(|X_k| |X_l|); equals 1 exactly when sigma permutes the blocks."""
    ids = partition.block_ids
    rows, cols, counts = _pair_counts(ids, ids[sigma.images], partition.n_blocks)
    s = partition.sizes
    terms = counts.astype(float) ** 2 / np.sqrt(s[rows].astype(float) * s[cols].astype(float))
    return float(terms.sum()) / partition.size


@dataclass
class CosetHypothesis:
    subgroup: str
    subgroup_order: int
    assignment: dict  # block id -> coset id, one-to-one
    residual: Fraction
    coverage: Fraction  # |N| * |claimed| / |domain|


def coset_fit(partition: LabeledPartition, coset_ids, subgroup="N",
              subgroup_order=None) -> CosetHypothesis:
    """Fit the partition to the cosets described by a coset-id array.

    Each block proposes its majority coset; blocks claim cosets in order
    of decreasing overlap (ties to the lower block id), a claim needs
    strictly more than half the block and an unclaimed coset.  The
    residual charges claimed blocks their symmetric difference and
    unclaimed blocks their full size.
    """
    coset_ids = np.asarray(coset_ids, dtype=np.int64)
    n = partition.size
    coset_sizes = np.bincount(coset_ids)
    if subgroup_order is None:
        subgroup_order = int(coset_sizes[0])
    n_cosets = int(coset_ids.max()) + 1
    rows, cols, counts = _pair_counts(partition.block_ids, coset_ids, n_cosets)
    order = np.lexsort((rows, -counts))
    assignment = {}
    claimed_cosets = set()
    gain = 0
    for idx in order:
        k, c, ov = int(rows[idx]), int(cols[idx]), int(counts[idx])
        if k in assignment or c in claimed_cosets:
            continue
        if 2 * ov <= int(partition.sizes[k]):
            continue
        assignment[k] = c
        claimed_cosets.add(c)
        gain += 2 * ov - int(coset_sizes[c])
    # residual = sum_claimed (|X_k| + |cN| - 2 ov) + sum_unclaimed |X_k|
    #          = N - sum_claimed (2 ov - |cN|)
    residual = Fraction(n - gain, n)
    coverage = Fraction(subgroup_order * len(assignment), n)
    return CosetHypothesis(subgroup, subgroup_order, assignment, residual, coverage)


# -- cylinder partitions on the three-factor product domain -----------------

@dataclass(frozen=True)
class CylinderPartition:
    """Fibers of the projection of a product domain onto some factors.

    The domain is indexed by FACTOR_ORDER = (vector part, matrix part,
    second factor) with the flat index ((a * nh) + h) * ny + y.
    """

    sizes: tuple  # (na, nh, ny)
    key_dims: frozenset

    @property
    def size(self):
        na, nh, ny = self.sizes
        return na * nh * ny

    def block_count(self):
        return _prod_over(self.sizes, self.key_dims)

    def block_size(self):
        return _prod_over(self.sizes, set(FACTOR_ORDER) - self.key_dims)


def _prod_over(sizes, dims):
    out = 1
    for name, s in zip(FACTOR_ORDER, sizes):
        if name in dims:
            out *= s
    return out


CANDIDATE_KEY_DIMS = {
    "trivial": frozenset({"a", "h", "y"}),
    "k-factor": frozenset({"a", "h"}),
    "a-times-k": frozenset({"h"}),
    "full": frozenset(),
    "g-factor": frozenset({"y"}),
    "a-factor": frozenset({"h", "y"}),
}


def candidate_subgroup_order(name: str, sizes) -> int:
    total = sizes[0] * sizes[1] * sizes[2]
    return total // _prod_over(sizes, CANDIDATE_KEY_DIMS[name])


def cylinder_coset_fit(partition: CylinderPartition, candidate: str) -> CosetHypothesis:
    """Exact coset fit of a cylinder partition against a candidate whose
    cosets are cylinders over CANDIDATE_KEY_DIMS[candidate].

    A block meets every coset compatible with it on the shared factors in
    the same number of points, so a strict majority exists only when the
    coset keys are a subset of the block keys; in that case each coset is
    claimed by exactly one of the r blocks it contains and the residual is
    2(1 - 1/r)."""
    coset_dims = CANDIDATE_KEY_DIMS[candidate]
    order = candidate_subgroup_order(candidate, partition.sizes)
    if coset_dims <= partition.key_dims:
        r = _prod_over(partition.sizes, partition.key_dims - coset_dims)
        residual = Fraction(2 * (r - 1), r)
        claimed = _prod_over(partition.sizes, coset_dims)
        coverage = Fraction(order * claimed, partition.size)
        assignment = {"claimed_blocks": claimed, "blocks_per_coset": r}
    else:
        residual = Fraction(1)
        coverage = Fraction(0)
        assignment = {"claimed_blocks": 0}
    return CosetHypothesis(candidate, order, assignment, residual, coverage)


def classify_candidates(partition, sizes=None):
    """Rank the six candidate normal subgroups of the product by their
    coset-fit residual against the given partition.

    Cylinder partitions are classified exactly in closed form; explicit
    partitions need the factor sizes to build each candidate's coset ids.
    Returns a residual-sorted list of CosetHypothesis.
    """
    results = []
    if isinstance(partition, CylinderPartition):
        for name in CANDIDATE_KEY_DIMS:
            results.append(cylinder_coset_fit(partition, name))
    else:
        if sizes is None:
            raise ValueError("explicit classification needs the factor sizes")
        for name in CANDIDATE_KEY_DIMS:
            ids = candidate_coset_ids(name, sizes)
            results.append(
                coset_fit(partition, ids, subgroup=name,
                          subgroup_order=candidate_subgroup_order(name, sizes))
            )
    results.sort(key=lambda h: (h.residual, h.subgroup))
    return results


def product_point_factors(sizes):
    """(a, h, y) index arrays for the flat product domain."""
    na, nh, ny = sizes
    idx = np.arange(na * nh * ny, dtype=np.int64)
    y = idx % ny
    gh = idx // ny
    return gh // nh, gh % nh, y


def coset_ids_by_dims(dims, sizes) -> np.ndarray:
    a, h, y = product_point_factors(sizes)
    parts = {"a": a, "h": h, "y": y}
    ids = np.zeros(len(a), dtype=np.int64)
    for d in FACTOR_ORDER:
        if d in dims:
            ids = ids * sizes[FACTOR_ORDER.index(d)] + parts[d]
    return ids


def candidate_coset_ids(name: str, sizes) -> np.ndarray:
    return coset_ids_by_dims(CANDIDATE_KEY_DIMS[name], sizes)


def cylinder_block_ids(partition: CylinderPartition) -> np.ndarray:
    return coset_ids_by_dims(partition.key_dims, partition.sizes)


# -- planted partitions and noise -------------------------------------------

def planted_coset_partition(coset_ids) -> LabeledPartition:
    return LabeledPartition(np.asarray(coset_ids, dtype=np.int64))


def relabel_noise(partition: LabeledPartition, epsilon: float, rng) -> LabeledPartition:
    """Move floor(epsilon N) distinct points to uniformly chosen other
    blocks; the relabeled partition keeps every block nonempty."""
    n = partition.size
    b = partition.n_blocks
    ids = partition.block_ids.copy()
    n_move = int(epsilon * n)
    movable = rng.permutation(n)[: n_move + b]  # spares in case a block empties
    moved = 0
    for x in movable:
        if moved >= n_move:
            break
        k = ids[x]
        if np.count_nonzero(ids == k) == 1:
            continue
        new = int(rng.integers(0, b - 1))
        if new >= k:
            new += 1
        ids[x] = new
        moved += 1
    return LabeledPartition(ids)


# -- partition exchange format ----------------------------------------------

PARTITION_MAGIC = b"SPRT"
PARTITION_VERSION = 1


def write_partition(path, partition: LabeledPartition, sidecar: dict = None):
    ids = np.ascontiguousarray(partition.block_ids, dtype="<u4")
    with open(path, "wb") as fh:
        fh.write(
            struct.pack(
                "<4sIQQ", PARTITION_MAGIC, PARTITION_VERSION,
                partition.size, partition.n_blocks,
            )
        )
        fh.write(ids.tobytes())
    if sidecar is not None:
        with open(str(path) + ".json", "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_partition(path) -> LabeledPartition:
    with open(path, "rb") as fh:
        magic, version, n, blocks = struct.unpack("<4sIQQ", fh.read(24))
        if magic != PARTITION_MAGIC:
            raise ValueError("not a partition file")
        if version != PARTITION_VERSION:
            raise ValueError(f"unsupported partition format version {version}")
        ids = np.frombuffer(fh.read(4 * n), dtype="<u4")
        if len(ids) != n:
            raise ValueError("truncated partition file")
    part = LabeledPartition(ids.astype(np.int64))
    if part.n_blocks != blocks:
        raise ValueError("block count in header does not match the data")
    return part
