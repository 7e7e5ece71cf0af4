"""Zero-sum vectors over F_3 indexed by the projective line.

The abelian group here is A(p) = {x in F_3^(p+1) : sum x_i = 0}, carrying
the coordinate-permutation action of PSL2(F_p) through a fixed bijection
between positions and P^1(F_p): position j is the residue j for j < p and
position p is the point at infinity.

S(p) is the subset of vectors whose count of 1-entries exceeds both other
counts by more than 2.  It is invariant under every coordinate permutation,
which makes exact counting of S(p) and of its shifts a matter of summing
multinomials over type-count triples; those sums are polynomial in p, so
they stay exact far beyond the range where 3^p is enumerable.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .algebra import PSL2Element, moebius_act, projective_line, is_prime

_POW3 = [3**i for i in range(64)]


def _check_p(p: int):
    if not is_prime(p) or p % 3 != 1:
        raise ValueError(f"p = {p} is not a prime congruent to 1 mod 3")


def multinomial(n: int, a: int, b: int, c: int) -> int:
    if a + b + c != n or min(a, b, c) < 0:
        return 0
    return comb(n, a) * comb(n - a, b)


@dataclass(frozen=True)
class TypeCount:
    """Counts (n0, n1, n2) of the three residues in a vector."""

    n0: int
    n1: int
    n2: int

    @property
    def length(self):
        return self.n0 + self.n1 + self.n2

    def is_zero_sum(self) -> bool:
        return (self.n1 + 2 * self.n2) % 3 == 0

    def in_sp(self) -> bool:
        return self.n1 > self.n0 + 2 and self.n1 > self.n2 + 2

    @staticmethod
    def of(coords) -> "TypeCount":
        n0 = n1 = n2 = 0
        for v in coords:
            if v == 0:
                n0 += 1
            elif v == 1:
                n1 += 1
            else:
                n2 += 1
        return TypeCount(n0, n1, n2)


class ApVector:
    """A zero-sum vector in F_3^(p+1), packed 2 bits per coordinate.

    The first p coordinates are free and determine the index in [0, 3^p);
    the last coordinate is redundant but stored, so validation is a cheap
    sum instead of a recomputation.
    """

    __slots__ = ("p", "bits")

    def __init__(self, p: int, coords):
        coords = tuple(int(v) % 3 for v in coords)
        if len(coords) != p + 1:
            raise ValueError(f"expected {p + 1} coordinates, got {len(coords)}")
        if sum(coords) % 3 != 0:
            raise ValueError("coordinates do not sum to 0 mod 3")
        bits = 0
        for i, v in enumerate(coords):
            bits |= v << (2 * i)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, *_):
        raise AttributeError("ApVector is immutable")

    @property
    def coords(self):
        return tuple((self.bits >> (2 * i)) & 3 for i in range(self.p + 1))

    @staticmethod
    def zero(p: int) -> "ApVector":
        return ApVector(p, (0,) * (p + 1))

    @staticmethod
    def from_index(i: int, p: int) -> "ApVector":
        return ap_unindex(i, p)

    def is_zero(self) -> bool:
        return self.bits == 0

    def __add__(self, other: "ApVector") -> "ApVector":
        if self.p != other.p:
            raise ValueError("parameter mismatch")
        a, b = self.coords, other.coords
        return ApVector(self.p, tuple((x + y) % 3 for x, y in zip(a, b)))

    def __neg__(self) -> "ApVector":
        return ApVector(self.p, tuple((-v) % 3 for v in self.coords))

    def __sub__(self, other: "ApVector") -> "ApVector":
        return self + (-other)

    def __eq__(self, other):
        return (
            isinstance(other, ApVector) and self.p == other.p and self.bits == other.bits
        )

    def __hash__(self):
        return hash((self.p, self.bits))

    def __repr__(self):
        return f"ApVector{self.coords}"

    def type_count(self) -> TypeCount:
        return TypeCount.of(self.coords)

    def support(self):
        return tuple(i for i, v in enumerate(self.coords) if v != 0)


def ap_index(x: ApVector) -> int:
    """Index of x in [0, 3^p): base-3 value of the first p coordinates."""
    c = x.coords
    return sum(c[i] * _POW3[i] for i in range(x.p))


def ap_unindex(i: int, p: int) -> ApVector:
    if not 0 <= i < 3**p:
        raise ValueError(f"index {i} out of range for p = {p}")
    coords = []
    for _ in range(p):
        coords.append(i % 3)
        i //= 3
    coords.append((-sum(coords)) % 3)
    return ApVector(p, coords)


# -- standard vectors ---------------------------------------------------

def v_vector(p: int) -> ApVector:
    """(1, -1, 0, ..., 0)."""
    return ApVector(p, (1, 2) + (0,) * (p - 1))


def v1_vector(p: int) -> ApVector:
    """Default aperiodic seed (1, -1, 0, ..., 0); overridable upstream."""
    return v_vector(p)


def v2_vector(p: int) -> ApVector:
    """Default second seed (1, 1, 1, 0, ..., 0, -1, -1, -1)."""
    if p + 1 < 6:
        raise ValueError("p too small for the default second seed")
    return ApVector(p, (1, 1, 1) + (0,) * (p - 5) + (2, 2, 2))


def a_shift_vector(p: int) -> ApVector:
    """(0, 0, 1, ..., 1); zero-sum exactly when p = 1 mod 3."""
    _check_p(p)
    return ApVector(p, (0, 0) + (1,) * (p - 1))


# -- coordinate action of PSL2(F_p) -------------------------------------

def position_of_point(pt, p: int) -> int:
    """Position of a projective point under the fixed bijection."""
    if pt.is_infinity():
        return p
    return pt.value


def h_position_perm(h: PSL2Element):
    """src[i] = position read from when h acts: (h.x)_i = x_(h^{-1}.i)."""
    p = h.q
    hinv = h.inverse()
    line = projective_line(p)
    return tuple(position_of_point(moebius_act(hinv, line[i]), p) for i in range(p + 1))


def h_act(h: PSL2Element, x: ApVector) -> ApVector:
    src = h_position_perm(h)
    c = x.coords
    return ApVector(x.p, tuple(c[s] for s in src))


def sp_membership(x: ApVector) -> bool:
    """True iff the 1-count beats both other counts by more than 2."""
    return x.type_count().in_sp()


# -- exact counting ------------------------------------------------------

def sp_count_exact(p: int) -> int:
    """|S(p)| as an exact integer: sum of multinomials over admissible
    type-count triples of length p+1."""
    _check_p(p)
    n = p + 1
    total = 0
    for n1 in range(n + 1):
        for n2 in range(n + 1 - n1):
            n0 = n - n1 - n2
            if (n1 + 2 * n2) % 3 != 0:
                continue
            if n1 > n0 + 2 and n1 > n2 + 2:
                total += multinomial(n, n0, n1, n2)
    return total


def _group_triples(size: int):
    for u1 in range(size + 1):
        for u2 in range(size + 1 - u1):
            yield (size - u1 - u2, u1, u2)


def shift_overlap_counts(p: int, w: ApVector):
    """Joint counts of (x in S, x - w in S) over x in A(p), exactly.

    Coordinates are grouped by the value of w there; within a group the
    shift subtracts a constant, so the type counts of x and of x - w are
    both functions of the per-group type counts of x.  The total work is
    polynomial in p (at most a product of per-group triple counts).

    Returns a dict with keys 'both', 'only_s', 'only_shift', 's'.
    """
    if w.p != p:
        raise ValueError("parameter mismatch")
    sizes = [0, 0, 0]
    for v in w.coords:
        sizes[v] += 1
    groups = [(sizes[delta], delta) for delta in (0, 1, 2) if sizes[delta] > 0]

    # accumulate over per-group type-count triples
    both = only_s = only_shift = s_total = 0
    # each partial state: (count_x = (n0,n1,n2), count_shift = (m0,m1,m2), weight)
    states = [((0, 0, 0), (0, 0, 0), 1)]
    for size, delta in groups:
        new_states = []
        for u in _group_triples(size):
            weight = multinomial(size, *u)
            # value j of x contributes to value (j - delta) of x - w
            shifted = [0, 0, 0]
            for j in range(3):
                shifted[(j - delta) % 3] = u[j]
            for (nx, nm, wgt) in states:
                new_states.append(
                    (
                        (nx[0] + u[0], nx[1] + u[1], nx[2] + u[2]),
                        (nm[0] + shifted[0], nm[1] + shifted[1], nm[2] + shifted[2]),
                        wgt * weight,
                    )
                )
        states = new_states
    for (nx, nm, wgt) in states:
        if (nx[1] + 2 * nx[2]) % 3 != 0:
            continue
        in_s = nx[1] > nx[0] + 2 and nx[1] > nx[2] + 2
        in_shift = nm[1] > nm[0] + 2 and nm[1] > nm[2] + 2
        if in_s:
            s_total += wgt
        if in_s and in_shift:
            both += wgt
        elif in_s:
            only_s += wgt
        elif in_shift:
            only_shift += wgt
    return {"both": both, "only_s": only_s, "only_shift": only_shift, "s": s_total}


def sp_shift_diff_exact(p: int, w: ApVector) -> int:
    """Exact |S(p) symdiff (w + S(p))| for a shift w of small support."""
    if len(w.support()) > 4:
        raise ValueError(
            "shift support exceeds 4 coordinates; use sampling or "
            "shift_overlap_counts directly"
        )
    counts = shift_overlap_counts(p, w)
    return counts["only_s"] + counts["only_shift"]


def disjointness_check_ap_shift(p: int) -> bool:
    """True iff (a(p) + S(p)) and S(p) are disjoint, exactly."""
    counts = shift_overlap_counts(p, a_shift_vector(p))
    return counts["both"] == 0


# -- invariant closure ---------------------------------------------------

def _standard_h_generators(p: int):
    return [PSL2Element(1, 1, 0, 1, p), PSL2Element(0, -1, 1, 0, p)]


def _reduce_against(basis, vec):
    """Reduce vec (list mod 3) against an echelon basis [(pivot, vector)]."""
    v = list(vec)
    for pivot, b in basis:
        if v[pivot] != 0:
            coef = v[pivot] * pow(b[pivot], -1, 3) % 3
            v = [(x - coef * y) % 3 for x, y in zip(v, b)]
    return v


def invariant_closure_dim(x: ApVector, generators=None) -> int:
    """Dimension over F_3 of the smallest subgroup of A(p) containing x
    that is stable under the coordinate action of PSL2(F_p).

    Alternates orbit expansion (apply generator actions to the current
    basis) with linear-span closure until nothing new appears.
    """
    p = x.p
    if x.is_zero():
        return 0
    gens = generators if generators is not None else _standard_h_generators(p)
    perms = [h_position_perm(g) for g in gens]
    basis = []  # list of (pivot, vector) in echelon form

    def insert(vec):
        v = _reduce_against(basis, vec)
        for i, val in enumerate(v):
            if val != 0:
                basis.append((i, v))
                return True
        return False

    insert(list(x.coords))
    changed = True
    while changed:
        changed = False
        for _, b in list(basis):
            for src in perms:
                if insert([b[s] for s in src]):
                    changed = True
    return len(basis)


# -- vectorized helpers for enumerable p ---------------------------------

def decode_indices(idx: np.ndarray, p: int) -> np.ndarray:
    """Coordinate rows (n, p+1) for a batch of A(p) indices."""
    idx = np.asarray(idx, dtype=np.int64)
    out = np.empty((len(idx), p + 1), dtype=np.uint8)
    rem = idx
    for i in range(p):
        out[:, i] = rem % 3
        rem = rem // 3
    out[:, p] = (-out[:, :p].sum(axis=1, dtype=np.int64)) % 3
    return out


def coords_matrix(p: int) -> np.ndarray:
    """(3^p, p+1) uint8 matrix of all A(p) vectors in index order."""
    n = 3**p
    if n > 5_000_000:
        raise ValueError(f"3^{p} is too large to materialize")
    return decode_indices(np.arange(n, dtype=np.int64), p)


def encode_coords(mat: np.ndarray) -> np.ndarray:
    """Indices of rows of a (n, p+1) coordinate matrix."""
    p = mat.shape[1] - 1
    weights = np.array(_POW3[:p], dtype=np.int64)
    return mat[:, :p].astype(np.int64) @ weights


def sp_mask(coords: np.ndarray) -> np.ndarray:
    """Boolean S(p) membership for each row of a coordinate matrix."""
    n1 = np.count_nonzero(coords == 1, axis=1)
    n0 = np.count_nonzero(coords == 0, axis=1)
    n2 = coords.shape[1] - n0 - n1
    return (n1 > n0 + 2) & (n1 > n2 + 2)


def shifted_index_map(coords: np.ndarray, w: ApVector) -> np.ndarray:
    """Index map a -> index(a + w) over all rows of a coordinate matrix."""
    wv = np.array(w.coords, dtype=np.uint8)
    return encode_coords((coords + wv) % 3)


def permuted_index_map(coords: np.ndarray, src) -> np.ndarray:
    """Index map a -> index(h . a) for a position permutation src."""
    return encode_coords(coords[:, np.array(src)])
