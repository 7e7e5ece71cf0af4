import random
from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from soficlab.algebra import PSL2Element, psl2_enumerate
from soficlab.f3vectors import (
    ApVector,
    TypeCount,
    a_shift_vector,
    ap_index,
    ap_unindex,
    coords_matrix,
    disjointness_check_ap_shift,
    encode_coords,
    h_act,
    invariant_closure_dim,
    shift_overlap_counts,
    shifted_index_map,
    sp_count_exact,
    sp_mask,
    sp_membership,
    sp_shift_diff_exact,
    v1_vector,
    v2_vector,
    v_vector,
)

PRIMES = (7, 13, 19, 31, 37)


def brute_force_sp_indices(p):
    """Independent oracle: S(p) membership by enumerating all of A(p)."""
    mask = sp_mask(coords_matrix(p))
    return mask


def test_zero_sum_enforced():
    with pytest.raises(ValueError):
        ApVector(7, (1, 0, 0, 0, 0, 0, 0, 0))


def test_index_round_trip_zero():
    z = ApVector.zero(7)
    assert ap_index(z) == 0
    assert ap_unindex(0, 7) == z


def test_index_round_trip_random_p13():
    rng = random.Random(5)
    for _ in range(100_000):
        i = rng.randrange(3**13)
        assert ap_index(ap_unindex(i, 13)) == i


def test_index_round_trip_exhaustive_p7():
    for i in range(3**7):
        assert ap_index(ap_unindex(i, 7)) == i


def test_index_out_of_range():
    with pytest.raises(ValueError):
        ap_unindex(3**7, 7)


def test_addition_preserves_zero_sum():
    rng = random.Random(6)
    for _ in range(200):
        x = ap_unindex(rng.randrange(3**7), 7)
        y = ap_unindex(rng.randrange(3**7), 7)
        assert sum((x + y).coords) % 3 == 0
        assert (x + (-x)).is_zero()


def test_identity_action_fixes_vectors():
    e = PSL2Element.identity(7)
    rng = random.Random(7)
    for _ in range(50):
        x = ap_unindex(rng.randrange(3**7), 7)
        assert h_act(e, x) == x


def test_action_preserves_type_counts():
    rng = random.Random(8)
    elems = psl2_enumerate(7)
    for _ in range(200):
        h = rng.choice(elems)
        x = ap_unindex(rng.randrange(3**7), 7)
        assert h_act(h, x).type_count() == x.type_count()


def test_action_is_compatible_with_products():
    rng = random.Random(9)
    gens = [PSL2Element(1, 1, 0, 1, 7), PSL2Element(0, -1, 1, 0, 7)]
    elems = psl2_enumerate(7)
    for _ in range(100):
        g = rng.choice(gens)
        h = rng.choice(elems)
        x = ap_unindex(rng.randrange(3**7), 7)
        assert h_act(g, h_act(h, x)) == h_act(g * h, x)


def test_membership_examples():
    # counts (2, 6, 0) on 8 coordinates: 6 > 4 and 6 > 2
    x = ApVector(7, (1, 1, 1, 1, 1, 1, 0, 0))
    assert sp_membership(x)
    assert not sp_membership(ApVector.zero(7))
    # counts (3, 4, 1): 4 is not greater than 3 + 2
    y = ApVector(7, (1, 1, 1, 1, 2, 0, 0, 0))
    assert TypeCount.of(y.coords) == TypeCount(3, 4, 1)
    assert not sp_membership(y)


def test_membership_invariant_under_action():
    rng = random.Random(10)
    elems7 = psl2_enumerate(7)
    for _ in range(1000):
        h = rng.choice(elems7)
        x = ap_unindex(rng.randrange(3**7), 7)
        assert sp_membership(h_act(h, x)) == sp_membership(x)
    elems13 = psl2_enumerate(13)
    for _ in range(1000):
        h = rng.choice(elems13)
        x = ap_unindex(rng.randrange(3**13), 13)
        assert sp_membership(h_act(h, x)) == sp_membership(x)


def test_count_exact_matches_exhaustive_p7():
    assert sp_count_exact(7) == int(brute_force_sp_indices(7).sum()) == 204


@pytest.mark.parametrize("p", PRIMES)
def test_count_ratio_bounds(p):
    ratio = Fraction(sp_count_exact(p), 3**p)
    assert Fraction(1, 243) <= ratio <= Fraction(1, 3)


def test_count_matches_monte_carlo_p13():
    rng = np.random.default_rng(11)
    n = 1_000_000
    idx = rng.integers(0, 3**13, size=n, dtype=np.int64)
    coords = np.empty((n, 14), dtype=np.uint8)
    rem = idx
    for i in range(13):
        coords[:, i] = rem % 3
        rem = rem // 3
    coords[:, 13] = (-coords[:, :13].sum(axis=1, dtype=np.int64)) % 3
    hits = int(sp_mask(coords).sum())
    p_hat = hits / n
    truth = sp_count_exact(13) / 3**13
    sd = sqrt(truth * (1 - truth) / n)
    assert abs(p_hat - truth) <= 3 * sd


def test_shift_diff_zero_shift():
    assert sp_shift_diff_exact(7, ApVector.zero(7)) == 0


def test_shift_diff_matches_exhaustive_p7():
    mask = brute_force_sp_indices(7)
    shifted = np.zeros(3**7, dtype=bool)
    shifted[shifted_index_map(coords_matrix(7), v_vector(7))[mask]] = True
    assert sp_shift_diff_exact(7, v_vector(7)) == int((mask ^ shifted).sum()) == 240


def test_shift_diff_support_limit():
    with pytest.raises(ValueError):
        sp_shift_diff_exact(7, a_shift_vector(7))


def test_shift_ratio_decays_with_fitted_constant():
    ratios = [Fraction(sp_shift_diff_exact(p, v_vector(p)), 3**p) for p in PRIMES]
    c = max(float(r) * sqrt(p) for r, p in zip(ratios, PRIMES))
    for r, p in zip(ratios, PRIMES):
        assert float(r) <= c / sqrt(p) + 1e-15
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_disjointness_exhaustive_p7():
    mask = brute_force_sp_indices(7)
    shifted = np.zeros(3**7, dtype=bool)
    shifted[shifted_index_map(coords_matrix(7), a_shift_vector(7))[mask]] = True
    assert not np.any(mask & shifted)
    assert disjointness_check_ap_shift(7)


def test_disjointness_conditioned_count_p13():
    assert disjointness_check_ap_shift(13)


def test_zero_shift_overlaps_everything():
    counts = shift_overlap_counts(7, ApVector.zero(7))
    assert counts["both"] == counts["s"] == 204
    assert counts["only_s"] == counts["only_shift"] == 0


def test_closure_dim_zero_vector():
    assert invariant_closure_dim(ApVector.zero(7)) == 0


def test_closure_dim_standard_vectors():
    assert invariant_closure_dim(v_vector(7)) == 7
    assert invariant_closure_dim(v1_vector(7)) == 7
    assert invariant_closure_dim(v2_vector(7)) == 7


def test_closure_dim_random_nonzero():
    rng = random.Random(12)
    for _ in range(100):
        x = ap_unindex(rng.randrange(1, 3**7), 7)
        assert invariant_closure_dim(x) == 7


def test_encode_decode_consistency():
    mat = coords_matrix(7)
    assert np.array_equal(encode_coords(mat), np.arange(3**7))
