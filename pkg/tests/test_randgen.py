import math

import numpy as np
import pytest

from entspec.hermitian import rand_spectrum
from entspec.majorize import majorizes, pushforward
from entspec.randgen import (
    MapSynthesisReport,
    brute_force_optimal,
    convergence_experiment,
    synthesize_map,
)
from entspec.spectra import IID, BudgetExceededError, MaxEnt, Spectrum, iid_spectrum


def _probs(*xs):
    return Spectrum.from_probs(list(xs))


def test_uniform_four_to_two_is_exact():
    r = synthesize_map(_probs(0.25, 0.25, 0.25, 0.25), _probs(0.5, 0.5))
    assert r.achieved_distance == 0.0
    assert r.pushforward.atoms == ((0.5, 2),)
    assert r.map is not None


def test_greedy_three_to_two():
    r = synthesize_map(_probs(0.4, 0.3, 0.3), _probs(0.5, 0.5))
    assert abs(r.achieved_distance - 0.2) < 1e-12
    got = [(a.target_prob, a.assigned_mass) for a in r.assignments]
    assert got == [(0.5, 0.4), (0.5, 0.6)]


def test_point_mass_to_uniform():
    r = synthesize_map(_probs(1.0), _probs(0.5, 0.5))
    assert r.achieved_distance == 1.0
    assert [(a.target_prob, a.assigned_mass) for a in r.assignments] == [(0.5, 1.0), (0.5, 0.0)]


def test_brute_force_matches_greedy_on_three_to_two():
    b = brute_force_optimal(_probs(0.4, 0.3, 0.3), _probs(0.5, 0.5))
    assert abs(b.achieved_distance - 0.2) < 1e-12


def test_uniform_pair_to_skewed_target():
    r = synthesize_map(_probs(0.5, 0.5), _probs(0.8, 0.2))
    assert abs(r.achieved_distance - 0.4) < 1e-12
    assert r.pushforward.atoms == ((1.0, 1),)
    # greedy stacks both halves on the heavy label; brute force agrees
    b = brute_force_optimal(_probs(0.5, 0.5), _probs(0.8, 0.2))
    assert abs(b.achieved_distance - 0.4) < 1e-12


def test_label_pairing_survives_order_inversion():
    # the heavy source atom overfills the second-heaviest target label, so
    # assigned masses come out non-monotone; the per-label pairing must not
    # be re-sorted before the distance is taken
    r = synthesize_map(_probs(0.39, 0.21, 0.2, 0.2), _probs(0.4, 0.38, 0.22))
    got = [(a.target_prob, a.assigned_mass, a.count) for a in r.assignments]
    assert len(got) == 3
    assert got[0] == (0.4, 0.39, 1)
    assert abs(got[1][1] - 0.41) < 1e-12 and got[1][0] == 0.38
    assert got[2] == (0.22, 0.2, 1)
    assert abs(r.achieved_distance - 0.06) < 1e-12


def test_brute_force_cap():
    p = iid_spectrum(_probs(0.9, 0.1), 5)
    q = _probs(0.5, 0.5)
    with pytest.raises(BudgetExceededError):
        brute_force_optimal(p, q, cap=100)


def test_fiber_budget():
    p = iid_spectrum(_probs(0.9, 0.1), 50)
    with pytest.raises(BudgetExceededError):
        synthesize_map(p, _probs(0.5, 0.5), max_fibers=10)


def test_greedy_never_beats_brute_force():
    rng = np.random.default_rng(31)
    for _ in range(60):
        p = rand_spectrum(rng, 5)
        q = rand_spectrum(rng, 3)
        g = synthesize_map(p, q)
        b = brute_force_optimal(p, q)
        assert g.achieved_distance >= b.achieved_distance - 1e-12


def test_materialized_map_reproduces_pushforward():
    rng = np.random.default_rng(8)
    for _ in range(40):
        p = rand_spectrum(rng, 8)
        q = rand_spectrum(rng, 4)
        r = synthesize_map(p, q)
        assert r.map is not None
        assert pushforward(p, r.map).atoms == r.pushforward.atoms


def test_pushforward_always_majorizes_source():
    rng = np.random.default_rng(19)
    for _ in range(60):
        p = rand_spectrum(rng, 8)
        q = rand_spectrum(rng, 4)
        r = synthesize_map(p, q)
        assert majorizes(p, r.pushforward)


def test_compressed_map_without_materialization():
    p = iid_spectrum(_probs(0.9, 0.1), 60)
    q = Spectrum.from_atoms([(2.0 ** -12, 2 ** 12)])
    r = synthesize_map(p, q, max_expanded_dim=2 ** 11)
    assert r.map is None
    assert 0.0 <= r.achieved_distance <= 2.0
    assert sum(a.count for a in r.assignments) == 2 ** 12


def test_report_validation():
    with pytest.raises(ValueError):
        MapSynthesisReport(
            target=_probs(0.5, 0.5),
            pushforward=_probs(1.0),
            achieved_distance=0.5,  # inconsistent with assignments
            assignments=(),
            map=None,
        )


def test_convergence_below_entropy_rate():
    out = convergence_experiment(IID(_probs(0.9, 0.1)), MaxEnt(0.2), (50, 100, 200))
    dists = [d for _, d in out]
    assert all(b < a for a, b in zip(dists, dists[1:]))
    assert dists[-1] < 0.1


def test_convergence_above_entropy_rate():
    out = convergence_experiment(IID(_probs(0.9, 0.1)), MaxEnt(0.45), (100, 200))
    assert all(d >= 0.5 for _, d in out)


def test_convergence_flat_self_is_exact():
    out = convergence_experiment(MaxEnt(math.log(2.0)), MaxEnt(math.log(2.0)), (10, 60))
    assert out == [(10, 0.0), (60, 0.0)]


def test_convergence_improves_with_block_length():
    out = convergence_experiment(IID(_probs(0.9, 0.1)), MaxEnt(0.2), (25, 50, 100, 200))
    dists = [d for _, d in out]
    assert all(b <= a + 0.05 for a, b in zip(dists, dists[1:]))
