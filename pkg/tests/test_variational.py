import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paretopolymer.oracles import phi_oracle, simplex_grid
from paretopolymer.point_process import PointMeasure
from paretopolymer.variational import (
    SOLVER_CAP,
    SolverResult,
    WeightedMeasure,
    build_multisupport_config,
    d0,
    d0_bruteforce,
    d0_subset_table,
    energy,
    has_short_k_path,
    k_star,
    multisupport_region_of,
    multisupport_regions,
    phi_k,
    psi,
    solve_xi,
    xi_d1_screening,
)


# --- D0 -------------------------------------------------------------------


def test_d0_examples():
    assert d0(np.zeros((0, 1))).cost == 0.0
    r = d0([[-1.0], [2.0]])
    assert r.cost == 4.0 and r.order == (0, 1)
    assert d0([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).cost == 3.0


def test_d0_interval_structure_d1():
    # visiting [-x, z] costs (x + z) + min(x, z)
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = rng.uniform(-5, 5, size=rng.integers(1, 8))
        x, z = max(0.0, -y.min()), max(0.0, y.max())
        assert math.isclose(d0(y[:, None]).cost, x + z + min(x, z), rel_tol=1e-12, abs_tol=1e-12)


@pytest.mark.parametrize("n", [1, 3, 6, 7, 8, 9])
def test_d0_matches_bruteforce(n):
    rng = np.random.default_rng(n)
    for d in (1, 2, 3):
        Y = rng.uniform(-1, 1, size=(n, d))
        fast, slow = d0(Y), d0_bruteforce(Y)
        assert math.isclose(fast.cost, slow.cost, rel_tol=1e-12, abs_tol=1e-12)
        order = np.asarray(fast.order)
        assert sorted(order) == list(range(n))
        path = np.vstack([np.zeros((1, d)), Y[order]])
        assert math.isclose(np.abs(np.diff(path, axis=0)).sum(), fast.cost, rel_tol=1e-12)


def test_d0_subset_table_agrees():
    Y = np.random.default_rng(1).uniform(-1, 1, size=(7, 2))
    table = d0_subset_table(Y)
    for mask in (1, 5, 33, 127, 100):
        idx = [i for i in range(7) if mask >> i & 1]
        assert math.isclose(table[mask], d0(Y[idx]).cost, rel_tol=1e-12)


def test_d0_above_cap_is_flagged():
    Y = np.random.default_rng(2).uniform(-1, 1, size=(20, 2))
    r = d0(Y)
    assert r.exact is False and sorted(r.order) == list(range(20))
    assert d0(Y[:10]).exact


@settings(max_examples=60, deadline=None)
@given(
    pts=st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=7, unique=True),
    extra=st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
    seed=st.integers(0, 1000),
)
def test_d0_permutation_and_monotone(pts, extra, seed):
    Y = np.asarray(pts, dtype=float)
    base = d0(Y).cost
    perm = np.random.default_rng(seed).permutation(len(Y))
    assert math.isclose(d0(Y[perm]).cost, base, rel_tol=1e-12, abs_tol=1e-12)
    assert d0(np.vstack([Y, [extra]])).cost >= base - 1e-12


def test_has_short_k_path():
    Y = np.array([[0.1], [0.2], [0.9]])
    assert has_short_k_path(Y, 2, 0.3)
    assert not has_short_k_path(Y, 3, 0.5)


# --- phi_k ----------------------------------------------------------------


def test_k_star_examples():
    assert k_star([4.0, 3.0], 1.0) == 2
    assert k_star([10.0, 1.0, 1.0], 1.0) == 1
    assert k_star([2.0], 1.0) == 1
    with pytest.raises(ValueError):
        k_star([3.0, 4.0], 1.0)
    with pytest.raises(ValueError):
        k_star([0.5, 0.5], 1.0)


@pytest.mark.parametrize(
    "f,value,weights",
    [((4.0, 3.0), 3.125, (0.75, 0.25)), ((10.0, 1.0, 1.0), 9.0, (1.0, 0.0, 0.0)), ((1.0, 0.5), 0.3125, (0.5, 0.25)), ((2.0,), 1.0, (1.0,))],
)
def test_phi_k_examples(f, value, weights):
    r = phi_k(f, 1.0)
    assert math.isclose(r.value, value, rel_tol=1e-14)
    np.testing.assert_allclose(r.weights, weights, atol=1e-15)
    oracle, _ = phi_oracle(np.asarray(f), 1.0)
    assert abs(oracle - value) < 1e-9


def test_phi_k_boundary_both_cases_agree():
    # sum f = 2 theta: both closed forms give the same value
    f = np.array([1.2, 0.8])
    r = phi_k(f, 1.0)
    assert r.saturated
    assert math.isclose(r.value, (f**2).sum() / 4, rel_tol=1e-14)


def test_strict_lower_bracket_can_fail():
    # f=(3,2), theta=1: k_star=2 and phi=2.125, below f_1^2/(4 theta)=2.25
    r = phi_k([3.0, 2.0], 1.0)
    assert r.k_star == 2 and math.isclose(r.value, 2.125)
    assert not 9.0 / 4 < r.value


def test_phi_k_keeps_caller_order():
    r = phi_k([1.0, 10.0, 1.0], 1.0)
    np.testing.assert_allclose(r.weights, [0.0, 1.0, 0.0])


def test_simplex_grid_counts():
    assert len(simplex_grid(3, 4)) == math.comb(7, 3)
    assert np.all(simplex_grid(4, 5).sum(axis=1) <= 1 + 1e-12)


marks = st.lists(st.floats(0.01, 20.0), min_size=1, max_size=6)


@settings(max_examples=150, deadline=None)
@given(f=marks, theta=st.sampled_from([0.1, 1.0, 10.0]))
def test_phi_k_certificates(f, theta):
    f = np.asarray(f)
    r = phi_k(f, theta)
    w = r.weights
    assert np.all(w >= 0)
    assert math.isclose(r.value, float(f @ w - theta * w @ w), rel_tol=1e-12, abs_tol=1e-12)
    if f.sum() >= 2 * theta:
        assert abs(w.sum() - 1) <= 1e-12
        top = np.argsort(-f, kind="stable")[: r.k_star]
        assert np.all(w[top] > 0)
        g = f[top] - 2 * theta * w[top]
        assert np.ptp(g) <= 1e-9 * max(1.0, f.max())
        fs = np.sort(f)[::-1] ** 2 / (4 * theta)
        assert r.value <= fs[: r.k_star].sum() * (1 + 1e-14)
        # what the stationarity conditions do give for the lowest active mark
        fsorted = np.sort(f)[::-1]
        assert fsorted[r.k_star - 1] > (fsorted[: r.k_star].sum() - 2 * theta) / r.k_star
    else:
        np.testing.assert_allclose(w, f / (2 * theta), rtol=1e-15)
        assert w.sum() < 1


@settings(max_examples=100, deadline=None)
@given(f=marks, g=st.floats(0.01, 20.0), theta=st.sampled_from([0.1, 1.0, 10.0]))
def test_phi_k_monotone_in_appended_mark(f, g, theta):
    assert phi_k(f + [g], theta).value >= phi_k(f, theta).value - 1e-12


# --- measures, psi, solver ------------------------------------------------


def single_point():
    return PointMeasure.from_points([(4.0, 2.0)], 1)


def test_psi_examples():
    P = single_point()
    assert psi(P, WeightedMeasure.zero(P), 0.5, 1.0) == 0.0
    mu = WeightedMeasure.from_weights(P, [0], [1.0])
    assert psi(P, mu, 0.5, 1.0) == 2.0
    other = PointMeasure.from_points([(4.0, 3.0)], 1)
    alien = WeightedMeasure.from_weights(other, [0], [1.0])
    assert psi(P, alien, 0.5, 1.0) == -math.inf
    assert energy(P, alien, 1.0) == -math.inf


def test_weighted_measure_validation():
    P = PointMeasure.from_points([(1.0, 0.0), (2.0, 1.0)], 1)
    with pytest.raises(ValueError):
        WeightedMeasure(P, np.array([0, 1]), np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        WeightedMeasure(P, np.array([0, 0]), np.array([0.2, 0.2]))
    mu = WeightedMeasure.from_weights(P, [0, 1], [0.0, 0.5])
    assert len(mu) == 1 and mu.total_mass == 0.5


def test_solve_xi_examples():
    empty = solve_xi(PointMeasure.empty(1), 0.5, 1.0)
    assert empty.xi_value == 0.0 and empty.support_size == 0
    r = solve_xi(single_point(), 0.5, 1.0)
    assert r.xi_value == 2.0 and r.support_size == 1
    np.testing.assert_allclose(r.maximizer.weights, [1.0])


def test_solve_xi_cap():
    rng = np.random.default_rng(0)
    P = PointMeasure(rng.uniform(50, 60, SOLVER_CAP + 1), rng.uniform(-0.1, 0.1, (SOLVER_CAP + 1, 1)), 1)
    with pytest.raises(ValueError):
        solve_xi(P, 0.5, 1.0)


def brute_xi(P, q, theta):
    best = 0.0
    for r in range(1, len(P) + 1):
        for S in itertools.combinations(range(len(P)), r):
            S = list(S)
            best = max(best, phi_k(P.marks[S], theta).value - q * d0(P.locations[S]).cost)
    return best


@pytest.mark.parametrize("seed", range(12))
def test_solve_xi_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(1, 9)), int(rng.integers(1, 3))
    P = PointMeasure(rng.uniform(0.1, 3.0, n), rng.uniform(-2, 2, (n, d)), d)
    r = solve_xi(P, 0.5, 1.0)
    assert r.xi_value >= 0
    assert math.isclose(r.xi_value, brute_xi(P, 0.5, 1.0), rel_tol=1e-12, abs_tol=1e-12)
    if r.support_size:
        assert math.isclose(r.xi_value, r.phi_value - 0.5 * r.d0_cost, rel_tol=1e-12, abs_tol=1e-12)
        assert math.isclose(psi(P, r.maximizer, 0.5, 1.0), r.xi_value, rel_tol=1e-12, abs_tol=1e-12)
    else:
        assert r.xi_value == 0.0


def test_solver_ties_and_determinism():
    # two mirror-image points: equal optima, lowest index wins
    P = PointMeasure.from_points([(3.0, -1.0), (3.0, 1.0)], 1)
    r1, r2 = solve_xi(P, 1.0, 1.0), solve_xi(P, 1.0, 1.0)
    assert r1.to_json() == r2.to_json()
    assert list(r1.maximizer.support) == [0]
    assert len(r1.ties) >= 1


def test_solver_json():
    r = solve_xi(PointMeasure.from_points([(4.0, 2.0), (1.0, -1.0)], 1), 0.5, 1.0)
    doc = SolverResult.read_json(r.to_json())
    assert doc["schema"] == "solver/1" and doc["xi"] == r.xi_value
    assert json.loads(r.to_json())["weights"] == r.maximizer.weights.tolist()
    with pytest.raises(ValueError):
        SolverResult.read_json('{"schema": "x"}')


def test_solver_xi_zero_iff_empty():
    far = PointMeasure.from_points([(1.0, 50.0)], 1)
    r = solve_xi(far, 0.5, 1.0)
    assert r.xi_value == 0.0 and r.support_size == 0


# --- d = 1 reduction and multisupport -------------------------------------


def test_d1_screening_examples():
    assert xi_d1_screening(PointMeasure.empty(1), 0.5, 1.0) == 0.0
    P = PointMeasure.from_points([(4.0, 2.0)], 1)
    assert xi_d1_screening(P, 0.5, 1.0) == solve_xi(P, 0.5, 1.0).xi_value
    with pytest.raises(ValueError):
        xi_d1_screening(PointMeasure.empty(2), 0.5, 1.0)


def test_multisupport_regions_values():
    reg = multisupport_regions(2, 0.5, 1.0)
    assert reg.eps == 1 / 32
    assert reg.mark_high - reg.mark_low == 1.0
    assert reg.L == 2 + 1.5 / 32 + 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_multisupport_construction(k):
    rng = np.random.default_rng(k)
    reg = multisupport_regions(k, 0.5, 1.0)
    for d in (1, 2):
        P = build_multisupport_config(k, 0.5, 1.0, rng, d)
        assert len(P) == k
        assert all(multisupport_region_of(f, y, reg, 1.0) == "G" for f, y in P)
        assert np.all(np.abs(P.locations).sum(axis=1) <= reg.eps)
        assert solve_xi(P, 0.5, 1.0).support_size == k
