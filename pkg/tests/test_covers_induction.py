import random

import numpy as np
import pytest

from soficlab.perms import ExactPerm, d_hamming
from soficlab.sofic import (
    BranchedCover,
    SchreierSystem,
    WordMap,
    cocycle_reconstruct,
    extract_almost_cocycle,
    induce_approximation,
    lift_branched_cover,
    random_cover,
)
from soficlab.words import ReducedWord, random_reduced_word


def test_cover_build_validates_fibers():
    with pytest.raises(ValueError):
        BranchedCover.build([0, 0, 1])  # 2-to-1 and 1-to-1 mixed
    cover = BranchedCover.build([1, 0, 1, 0])
    assert cover.fiber_size == 2
    assert cover.fibers.tolist() == [[1, 3], [0, 2]]


def test_lift_postconditions_random_instances():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n_base = int(rng.integers(5, 120))
        d = int(rng.integers(1, 12))
        cover = random_cover(rng, n_base, d)
        n = n_base * d
        sigma = ExactPerm(rng.permutation(n).astype(np.int64))
        tau = ExactPerm(rng.permutation(n_base).astype(np.int64))
        lifted = lift_branched_cover(sigma, tau, cover)
        assert np.array_equal(cover.theta[lifted.images], tau.images[cover.theta])
        budget = (cover.theta[sigma.images] != tau.images[cover.theta]).mean()
        assert float(d_hamming(lifted, sigma).value) <= budget + 1e-12
        assert (1 - lifted.fixed_fraction()) >= (1 - tau.fixed_fraction())


def test_lift_keeps_commuting_permutation():
    rng = np.random.default_rng(1)
    cover = random_cover(rng, 40, 4)
    tau = ExactPerm(rng.permutation(40).astype(np.int64))
    rows = np.stack([rng.permutation(4) for _ in range(40)]).astype(np.int64)
    sigma = cocycle_reconstruct(rows, tau, cover)
    assert np.array_equal(lift_branched_cover(sigma, tau, cover).images, sigma.images)


def test_extract_requires_exact_commutation():
    rng = np.random.default_rng(2)
    cover = random_cover(rng, 30, 3)
    sigma = ExactPerm(rng.permutation(90).astype(np.int64))
    tau = ExactPerm(rng.permutation(30).astype(np.int64))
    with pytest.raises(ValueError):
        extract_almost_cocycle({"g": sigma}, {"g": tau}, cover)


def test_extract_round_trip():
    rng = np.random.default_rng(3)
    cover = random_cover(rng, 50, 5)
    tau = ExactPerm(rng.permutation(50).astype(np.int64))
    rows = np.stack([rng.permutation(5) for _ in range(50)]).astype(np.int64)
    sigma = cocycle_reconstruct(rows, tau, cover)
    out = extract_almost_cocycle({"g": sigma}, {"g": tau}, cover)
    assert np.array_equal(out["c"]["g"], rows)
    rebuilt = cocycle_reconstruct(out["c"]["g"], tau, cover)
    assert np.array_equal(rebuilt.images, sigma.images)


def test_true_cocycle_has_zero_defect():
    rng = np.random.default_rng(4)
    cover = random_cover(rng, 60, 4)
    tg = ExactPerm(rng.permutation(60).astype(np.int64))
    th = ExactPerm(rng.permutation(60).astype(np.int64))
    cg = np.stack([rng.permutation(4) for _ in range(60)]).astype(np.int64)
    ch = np.stack([rng.permutation(4) for _ in range(60)]).astype(np.int64)
    cgh = cg[th.images][np.arange(60)[:, None], ch]
    sig = {
        "g": cocycle_reconstruct(cg, tg, cover),
        "h": cocycle_reconstruct(ch, th, cover),
        "gh": cocycle_reconstruct(cgh, tg.compose(th), cover),
    }
    tau = {"g": tg, "h": th, "gh": tg.compose(th)}
    out = extract_almost_cocycle(sig, tau, cover, pairs=[("g", "h", "gh")])
    assert out["cocycle_defect"][("g", "h", "gh")] == 0


def test_broken_cocycle_has_positive_defect():
    rng = np.random.default_rng(5)
    cover = random_cover(rng, 60, 4)
    tg = ExactPerm(rng.permutation(60).astype(np.int64))
    th = ExactPerm(rng.permutation(60).astype(np.int64))
    cg = np.stack([rng.permutation(4) for _ in range(60)]).astype(np.int64)
    ch = np.stack([rng.permutation(4) for _ in range(60)]).astype(np.int64)
    broken = np.stack([rng.permutation(4) for _ in range(60)]).astype(np.int64)
    sig = {
        "g": cocycle_reconstruct(cg, tg, cover),
        "h": cocycle_reconstruct(ch, th, cover),
        "gh": cocycle_reconstruct(broken, tg.compose(th), cover),
    }
    tau = {"g": tg, "h": th, "gh": tg.compose(th)}
    out = extract_almost_cocycle(sig, tau, cover, pairs=[("g", "h", "gh")])
    assert out["cocycle_defect"][("g", "h", "gh")] > 0


# -- induction ---------------------------------------------------------------

ACTION4 = {"x": [1, 2, 3, 0], "y": [1, 0, 3, 2]}


def test_schreier_rank_matches_index_formula():
    schreier = SchreierSystem(ACTION4)
    assert len(schreier.schreier_generators()) == 1 + 4 * (2 - 1)


def test_schreier_requires_transitivity():
    with pytest.raises(ValueError):
        SchreierSystem({"x": [0, 1], "y": [0, 1]})  # both letters act trivially


def test_schreier_section_validation():
    schreier = SchreierSystem(ACTION4)
    SchreierSystem(ACTION4, section=schreier.section)  # the tree section passes
    bad = list(schreier.section)
    bad[0] = ReducedWord.gen("x")
    with pytest.raises(ValueError):
        SchreierSystem(ACTION4, section=bad)


def test_cocycle_identity_random_triples():
    schreier = SchreierSystem(ACTION4)
    rng = random.Random(0)
    for _ in range(1000):
        u = random_reduced_word(rng, ("x", "y"), rng.randint(0, 6))
        v = random_reduced_word(rng, ("x", "y"), rng.randint(0, 6))
        i = rng.randrange(4)
        assert schreier.cocycle(u * v, i) == (
            schreier.cocycle(u, schreier.act(v, i)) * schreier.cocycle(v, i)
        )


def test_cocycle_matches_ambient_value(family7):
    # the rewritten word, evaluated in any group, equals the ambient value
    schreier = SchreierSystem(ACTION4)
    rng = random.Random(1)
    from soficlab.groups import HomSpec, hom_eval
    from soficlab.algebra import psl2_table

    table = psl2_table(11)
    x, y = table[5], table[17]
    ambient = HomSpec("amb", ("x", "y"), (x, y), "K11")
    images = {}
    for name in schreier.schreier_generators():
        images[name] = hom_eval(ambient, schreier.cocycle_in_ambient(
            ReducedWord.gen(name.split("|")[0]), int(name.split("|")[1])))
    sub = HomSpec("sub", tuple(images), tuple(images.values()), "K11")
    for _ in range(200):
        w = random_reduced_word(rng, ("x", "y"), rng.randint(0, 6))
        i = rng.randrange(4)
        assert hom_eval(sub, schreier.cocycle(w, i)) == hom_eval(
            ambient, schreier.cocycle_in_ambient(w, i)
        )


def test_induced_homomorphism_has_zero_defect():
    rng = np.random.default_rng(6)
    pyrng = random.Random(6)
    schreier = SchreierSystem(ACTION4)
    images = {g: ExactPerm(rng.permutation(50).astype(np.int64))
              for g in schreier.schreier_generators()}
    induced = induce_approximation(ACTION4, images)
    for _ in range(30):
        u = random_reduced_word(pyrng, ("x", "y"), pyrng.randint(0, 5))
        v = random_reduced_word(pyrng, ("x", "y"), pyrng.randint(0, 5))
        d = d_hamming(induced.eval(u).compose(induced.eval(v)), induced.eval(u * v))
        assert d.value == 0


def test_induced_restriction_is_subgroup_model():
    rng = np.random.default_rng(7)
    pyrng = random.Random(7)
    schreier = SchreierSystem(ACTION4)
    images = {g: ExactPerm(rng.permutation(50).astype(np.int64))
              for g in schreier.schreier_generators()}
    induced = induce_approximation(ACTION4, images)
    for _ in range(20):
        w = random_reduced_word(pyrng, ("x", "y"), pyrng.randint(0, 6))
        w_sub = schreier.cocycle_in_ambient(w, 0)
        block = induced.restriction_to_trivial_coset(w_sub)
        expected = induced.sigma0.eval(schreier.cocycle(w_sub, 0))
        assert np.array_equal(block.images, expected.images)


def test_induce_missing_images_named():
    with pytest.raises(KeyError):
        induce_approximation(ACTION4, {})


def test_index_one_induction_is_identity():
    rng = np.random.default_rng(8)
    pyrng = random.Random(8)
    action = {"x": [0], "y": [0]}
    schreier = SchreierSystem(action)
    images = {g: ExactPerm(rng.permutation(35).astype(np.int64))
              for g in schreier.schreier_generators()}
    induced = induce_approximation(action, images)
    for _ in range(20):
        w = random_reduced_word(pyrng, ("x", "y"), pyrng.randint(0, 6))
        renamed = ReducedWord(tuple((f"{g}|0", s) for g, s in w.letters))
        assert np.array_equal(induced.eval(w).images,
                              WordMap(images).eval(renamed).images)
