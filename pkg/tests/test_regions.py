"""Tests for linear-region enumeration, counting and the grid oracle."""

import numpy as np
import pytest

from spikec import (
    Box,
    InvalidParameterError,
    count_feasible,
    empirical_region_count,
    enumerate_regions,
    single_neuron_network,
    stabilized_region_count,
)
from spikec.regions import halfspaces_feasible


def random_nondegenerate_weights(rng, d):
    """Weights whose subset sums stay away from zero.

    Keeps the region structure stable under the grid oracle's finite
    differences: a subset sum very close to zero makes firing times blow up
    near a region's appearance threshold.
    """
    while True:
        w = rng.uniform(-1.5, 1.5, d)
        sums = [abs(w[list(s)].sum()) for s in _subsets(d)]
        if min(sums) > 0.05:
            return w


def _subsets(d):
    from itertools import combinations

    for r in range(1, d + 1):
        yield from combinations(range(d), r)


def test_worked_two_input_example():
    box = Box.cube(-5, 5, 2)
    descs = enumerate_regions([1.0, 1.0], [2.0, 1.0], 1.0, box)
    assert len(descs) == 3
    by_subset = {tuple(sorted(r.subset)): r for r in descs}
    r0 = by_subset[(0,)]
    assert np.allclose(r0.gradient, [1, 0]) and r0.offset == pytest.approx(3.0)
    r1 = by_subset[(1,)]
    assert np.allclose(r1.gradient, [0, 1]) and r1.offset == pytest.approx(2.0)
    r01 = by_subset[(0, 1)]
    assert np.allclose(r01.gradient, [0.5, 0.5]) and r01.offset == pytest.approx(2.0)
    assert all(r.feasible_in_box for r in descs)
    assert count_feasible(descs, box) == 3


def test_two_input_facets_have_unit_difference_normals():
    # Every region boundary of a two-input neuron is a line of the form
    # t2 = t1 + constant.
    descs = enumerate_regions([1.0, 1.0], [2.0, 1.0], 1.0, Box.cube(-5, 5, 2))
    for r in descs:
        for h in r.halfspaces:
            n = h.normal
            if np.max(np.abs(n)) < 1e-12:
                continue
            assert abs(n[0] + n[1]) < 1e-12


def test_three_positive_inputs_give_seven_regions():
    box = Box.cube(-10, 10, 3)
    descs = enumerate_regions(np.ones(3), np.zeros(3), 1.0, box)
    assert count_feasible(descs, box) == 7


def test_nonpositive_subsets_are_omitted():
    box = Box.cube(-10, 10, 2)
    descs = enumerate_regions([1.0, -2.0], [0.0, 0.0], 1.0, box)
    assert {tuple(sorted(r.subset)) for r in descs} == {(0,)}
    assert count_feasible(descs, box) == 1


def test_gradients_sum_to_one():
    rng = np.random.default_rng(17)
    box = Box.cube(-8, 8, 3)
    descs = enumerate_regions(rng.uniform(-1, 1, 3), rng.uniform(0, 2, 3), 1.2, box)
    for r in descs:
        assert r.gradient.sum() == pytest.approx(1.0, abs=1e-12)


def test_count_bound_holds():
    rng = np.random.default_rng(23)
    for _ in range(20):
        d = int(rng.integers(1, 5))
        w = rng.uniform(-2, 2, d)
        delays = rng.uniform(0, 2, d)
        box = Box.cube(-20, 20, d)
        descs = enumerate_regions(w, delays, 1.0, box)
        assert count_feasible(descs, box) <= 2**d - 1


def test_stabilized_count_attains_bound_for_positive_weights():
    rng = np.random.default_rng(29)
    for d in (2, 3, 4):
        w = rng.uniform(0.2, 2.0, d)
        delays = rng.uniform(0.0, 3.0, d)
        assert stabilized_region_count(w, delays, 1.0) == 2**d - 1


def test_dimension_cap():
    with pytest.raises(InvalidParameterError):
        enumerate_regions(np.ones(25), np.zeros(25), 1.0, Box.cube(-1, 1, 25))


def test_empirical_matches_worked_example():
    net = single_neuron_network([1.0, 1.0], [2.0, 1.0], 1.0)
    res = empirical_region_count(net, Box.cube(-5, 5, 2), 200)
    assert res.count == 3
    assert res.no_fire_points == 0


def test_empirical_single_input_is_one_region():
    net = single_neuron_network([1.0], [0.7], 1.0)
    res = empirical_region_count(net, Box.cube(-4, 4, 1), 500)
    assert res.count == 1


def test_empirical_counts_no_fire_points():
    net = single_neuron_network([-1.0], [0.0], 1.0)
    res = empirical_region_count(net, Box.cube(-1, 1, 1), 50)
    assert res.count == 0
    assert res.no_fire_points == 50


def test_empirical_agrees_with_analytic_on_random_neurons():
    rng = np.random.default_rng(41)
    for _ in range(10):
        d = int(rng.integers(2, 4))
        w = random_nondegenerate_weights(rng, d)
        delays = rng.uniform(0.0, 1.5, d)
        theta = float(rng.uniform(0.3, 2.0))
        box = Box.cube(-6, 6, d)
        descs = enumerate_regions(w, delays, theta, box)
        analytic = count_feasible(descs, box)
        net = single_neuron_network(w, delays, theta)
        emp = empirical_region_count(net, box, 60 if d == 2 else 25)
        assert emp.count == analytic


def test_adjacent_region_maps_agree_on_shared_facets():
    # Continuity: where two regions meet, their affine maps coincide.
    w = np.array([1.0, 1.0])
    delays = np.array([2.0, 1.0])
    theta = 1.0
    descs = {tuple(sorted(r.subset)): r for r in enumerate_regions(w, delays, theta, Box.cube(-5, 5, 2))}
    rng = np.random.default_rng(53)
    # Facet between {0} and {0,1}: t2 = t1 + 2; between {1} and {0,1}: t2 = t1.
    for (sa, sb, shift) in (((0,), (0, 1), 2.0), ((1,), (0, 1), 0.0)):
        for _ in range(10):
            t1 = float(rng.uniform(-5, 5))
            p = np.array([t1, t1 + shift])
            va = descs[sa].gradient @ p + descs[sa].offset
            vb = descs[sb].gradient @ p + descs[sb].offset
            assert abs(va - vb) <= 1e-9


def test_strict_halfspace_shrink_excludes_degenerate_regions():
    # A region whose interior is a single line outside the box must not be
    # counted; the epsilon shrink of strict inequalities handles this.
    box = Box.cube(0.0, 1.0, 2)
    descs = enumerate_regions([1.0, 1.0], [5.0, 0.0], 1.0, box)
    # With delay 5 on input 1, the set where input 1 contributes lies far
    # from the unit box.
    feas = {tuple(sorted(r.subset)) for r in descs if halfspaces_feasible(r.halfspaces, box)}
    assert (1,) in feas
    assert (0,) not in feas
