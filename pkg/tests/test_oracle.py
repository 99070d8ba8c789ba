import io
import math
import os

import numpy as np
import pytest

from perctree import (EnumerationTooLargeError, RegularParams, SplitTree,
                      complete_regular_tree, dump_mask_table,
                      exact_ranked_law, exact_regular_law,
                      exact_root_cluster_law, tau_survival_exact,
                      total_vertices)
from perctree.oracle import FIXTURE_NAMES, fixture_tree

import support

FIXTURES_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def test_single_edge_law():
    tree = fixture_tree("edge")
    for p in (0.0, 0.3, 0.75, 1.0):
        law = exact_root_cluster_law(tree, p)
        assert math.isclose(law.prob(2), p, abs_tol=1e-15)
        assert math.isclose(law.prob(1), 1.0 - p, abs_tol=1e-15)


def test_keep_all_is_point_mass():
    tree = fixture_tree("full7")
    law = exact_root_cluster_law(tree, 1.0)
    assert law.probs == {7: 1.0}
    ranked = exact_ranked_law(tree, 1.0)
    assert ranked.probs == {(7,): 1.0}


def test_remove_all_is_per_vertex_tuple():
    tree = fixture_tree("mixed7")  # balls (2,1,1,3,1,1,2)
    ranked = exact_ranked_law(tree, 0.0)
    assert ranked.probs == {(2, 3, 2, 1, 1, 1, 1): 1.0}


def test_path3_hand_enumeration_pmf():
    # 8 masks by hand; all values multiples of 1/8 at p = 1/2
    tree = fixture_tree("path3")
    law = exact_root_cluster_law(tree, 0.5)
    assert {k: round(v * 8) for k, v in law.probs.items()} == \
        {1: 4, 2: 2, 3: 1, 4: 1}


def test_path3_mask_table_matches_committed_fixture():
    # mask bits and outcome keys must match the hand enumeration exactly;
    # probabilities within the 1e-13 budget of the log-space products
    tree = fixture_tree("path3")
    buf = io.StringIO()
    dump_mask_table(tree, 0.5, buf)
    got = [line.split("\t") for line in buf.getvalue().strip().split("\n")]
    with open(os.path.join(FIXTURES_DIR, "path3_hand_enumeration.txt")) as fh:
        expected = [line.split("\t") for line in fh.read().strip().split("\n")]
    assert len(got) == len(expected) == 8
    for (g_bits, g_key, g_prob), (e_bits, e_key, e_prob) in zip(got, expected):
        assert g_bits == e_bits
        assert g_key == e_key
        assert abs(float(g_prob) - float(e_prob)) <= 1e-13


def test_star3_hand_enumeration():
    # root + 3 leaves: C0 = 4 - |removed|, detached clusters all singletons
    tree = fixture_tree("star3")
    ranked = exact_ranked_law(tree, 0.5)
    expected = {(4,): 1 / 8, (3, 1): 3 / 8, (2, 1, 1): 3 / 8,
                (1, 1, 1, 1): 1 / 8}
    assert set(ranked.probs) == set(expected)
    for key, prob in expected.items():
        assert math.isclose(ranked.prob(key), prob, abs_tol=1e-12)


def test_total_probability_one():
    for name in FIXTURE_NAMES:
        tree = fixture_tree(name)
        for p in (0.2, 0.5, 0.9):
            law = exact_ranked_law(tree, p)
            assert abs(math.fsum(law.probs.values()) - 1.0) <= 1e-12


def test_vertices_flag_differs_on_uneven_balls():
    tree = fixture_tree("mixed7")
    by_balls = exact_root_cluster_law(tree, 0.5, by="balls")
    by_verts = exact_root_cluster_law(tree, 0.5, by="vertices")
    assert by_balls.probs != by_verts.probs
    assert max(by_verts.support()) == 7
    assert max(by_balls.support()) == 11


def test_reverse_enumeration_is_identical():
    tree = fixture_tree("full7")
    fwd = exact_ranked_law(tree, 0.37)
    rev = exact_ranked_law(tree, 0.37, reverse=True)
    assert set(fwd.probs) == set(rev.probs)
    for key in fwd.probs:
        assert math.isclose(fwd.prob(key), rev.prob(key), abs_tol=1e-14)


def test_mirror_tree_symmetry():
    # relabeling children left-right leaves every exact law unchanged
    tree = fixture_tree("mixed7")
    mirror = SplitTree.from_parents([-1, 0, 0, 1, 1, 2, 2],
                                    [2, 1, 1, 1, 3, 2, 1])
    for p in (0.3, 0.6):
        a = exact_ranked_law(tree, p)
        b = exact_ranked_law(mirror, p)
        assert set(a.probs) == set(b.probs)
        for key in a.probs:
            assert math.isclose(a.prob(key), b.prob(key), abs_tol=1e-14)


def test_too_many_edges_guard(rng):
    from perctree import bst_params, generate
    tree = generate(bst_params(30), rng)
    with pytest.raises(EnumerationTooLargeError):
        exact_root_cluster_law(tree, 0.5)


def test_complete_regular_tree_structure():
    tree = complete_regular_tree(2, 3)
    assert tree.n_vertices == total_vertices(2, 3) == 15
    assert int(tree.depth.max()) == 3
    assert np.all(tree.ball_count == 1)
    degrees = tree.child_hi - tree.child_lo
    assert set(degrees[tree.depth < 3]) == {2}
    assert set(degrees[tree.depth == 3]) == {0}


def test_regular_exact_tau_matches_closed_form():
    # 4-mask enumeration at d=2, h=1: P(tau_1 > 1) = P(no removal) = q^2
    for q in (0.3, 0.9):
        law = exact_regular_law(2, 1, q)
        assert math.isclose(law.tau1.prob(0), q * q, abs_tol=1e-12)
        params = RegularParams(2, 1, (1.0 - q) * 1)
        assert math.isclose(law.tau1.prob(0), tau_survival_exact(params, 1),
                            abs_tol=1e-12)


def test_regular_exact_keep_all():
    law = exact_regular_law(2, 2, 1.0)
    assert law.joint.probs == {(7, 0): 1.0}
    assert law.tau1.probs == {0: 1.0}


def test_regular_exact_survival_curve_h2():
    # 64-mask enumeration: P(tau_1 > i) from the pmf equals the closed form
    q = 0.5
    law = exact_regular_law(2, 2, q)
    params = RegularParams(2, 2, (1.0 - q) * 2)
    for i in (1, 2):
        survival = sum(law.tau1.prob(k) for k in law.tau1.support()
                       if k == 0 or k > i)
        assert math.isclose(survival, tau_survival_exact(params, i),
                            abs_tol=1e-12)


def test_monte_carlo_matches_exact_split():
    bad = support.mc_vs_exact_split(fixture_tree("full7"), 0.6,
                                    n_samples=20_000, seed=31337)
    assert not bad, bad


def test_monte_carlo_matches_exact_regular():
    bad = support.mc_vs_exact_regular(2, 2, 0.7, n_samples=20_000, seed=4242)
    assert not bad, bad
