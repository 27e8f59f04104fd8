import math

import pytest

import extremal as ex


def test_generators_are_deterministic():
    a = ex.erdos_renyi(100, 3.0, seed=4)
    b = ex.erdos_renyi(100, 3.0, seed=4)
    assert a.edges() == b.edges()
    assert a.n == 100
    g = ex.parse_instance(a.to_text())
    assert g.edges() == a.edges()


def test_eo_finds_cycle_optimum():
    g = ex.Graph(8, [(i, (i + 1) % 8) for i in range(8)])
    p = ex.Bipartition(g)
    r = ex.run_eo(p, tau=1.4, steps=2000, seed=1)
    assert r["best_cost"] == 2
    assert p.cost(r["best_states"]) == 2
    assert sum(r["best_states"]) == 4


def test_eo_matches_brute_force_on_small_coloring():
    p = ex.Coloring(ex.erdos_renyi(10, 4.5, seed=3), colors=3)
    best, optima = ex.brute_force(p)
    r = ex.run_eo(p, tau=1.4, steps=20000, seed=2)
    assert r["best_cost"] == best
    assert p.canonical(r["best_states"]) in optima


def test_spin_glass_and_annealing():
    p = ex.SpinGlassProblem(ex.pm_j_cubic(3, seed=1))
    eo = ex.run_eo(p, tau=1.15, steps=5315, restarts=2, seed=5)
    sa = ex.run_sa(p, trials=27 * 64 * 20, seed=5)
    assert eo["best_cost"] == p.cost(eo["best_states"])
    assert sa["best_cost"] == p.cost(sa["best_states"])
    assert -81 <= eo["best_cost"] < 0


def test_ground_states_and_backbone():
    tri = ex.Coloring(ex.Graph(3, [(0, 1), (1, 2), (0, 2)]))
    gs = ex.ground_states(tri, runs=10, steps=200, seed=1)
    assert gs["optimal_cost"] == 0
    assert len(gs["states"]) == 1
    assert gs["backbone"] == 1.0


def test_fit_convergence_recovers_exponent():
    t = [10 ** (k / 10) for k in range(41)]
    c = [5 + 2 * x ** -0.4 for x in t]
    fit = ex.fit_convergence(t, c)
    assert fit["exponent"] == pytest.approx(0.4, abs=0.03)
    with pytest.raises(ex.FitDegenerate):
        ex.fit_convergence([1, 10, 100], [3, 3, 3])


def test_jam_model():
    q = ex.jam_selection_probabilities((0.5, 0.3, 0.2), 100, 0.0)
    assert q == pytest.approx([0.5, 0.3, 0.2])
    sweep = ex.jam_tau_sweep(1000, [1 + 0.1 * k for k in range(31)])
    taus = [t for t, _ in sweep]
    costs = [c for _, c in sweep]
    best = taus[costs.index(min(costs))]
    assert 1.0 < best < 4.0
    assert ex.predict_tau_opt(10000, 4) == pytest.approx(1 + 4 / math.log(10000))


def test_bak_sneppen():
    chain = ex.BsChain(50, seed=2)
    chain.run(1000)
    assert chain.steps == 1000
    assert all(0.0 <= f <= 1.0 for f in chain.fitness)


def test_errors_map_to_exceptions():
    with pytest.raises(ex.TooLarge):
        ex.brute_force(ex.Bipartition(ex.erdos_renyi(64, 2.0, seed=1)), limit=1000)
    with pytest.raises(ex.ParseError):
        ex.parse_instance("garbage\n")
