import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphcodes import bipartite as bp
from graphcodes.errors import ParameterError, ParseError, PreconditionError, SizeError
from graphcodes.gf2core import BitMatrix, entropy, nullspace_enumerate, rate_and_redundancy


def graph(rows):
    return bp.BipartiteGraph.from_matrix(BitMatrix.from_rows(rows))


def params(**kw):
    base = dict(n=24, epsilon=0.7, p=0.25, delta=0.125, gamma=0.3)
    base.update(kw)
    return bp.ModelParams(**base)


def binomial_even_sum(g, p):
    return sum(math.comb(g, k) * p**k * (1 - p) ** (g - k) for k in range(0, g + 1, 2))


# --- sampling and code construction -------------------------------------------------


def test_sample_degenerate_probabilities():
    g0 = bp.sample_bipartite(params(n=6, epsilon=0.5, p=0.0), 1)
    g1 = bp.sample_bipartite(params(n=6, epsilon=0.5, p=1.0), 1)
    assert g0.n_right == 3 and g1.n_right == 3
    assert g0.biadjacency.to_array().sum() == 0
    assert g1.biadjacency.to_array().sum() == 18


def test_sample_is_seed_deterministic():
    a = bp.sample_bipartite(params(), 42)
    b = bp.sample_bipartite(params(), 42)
    c = bp.sample_bipartite(params(), 43)
    assert a == b
    assert a != c
    assert bp.sample_bipartite(params(), (42, 3)) == bp.sample_bipartite(params(), (42, 3))


def test_m_uses_ceiling():
    assert params(n=24, epsilon=0.7).m == 17
    assert params(n=100, epsilon=0.6).m == 60
    assert params(n=10, epsilon=0.25).m == 3


def test_sample_edge_frequency():
    arr = np.array([bp.sample_bipartite(params(n=20, epsilon=1.0, p=0.3), s).biadjacency.to_array()
                    for s in range(200)])
    assert arr.mean() == pytest.approx(0.3, abs=0.01)


def test_forced_edges_are_present():
    forced = bp.ConstraintSpec("hn").forced_edges(24, 17)
    g = bp.sample_bipartite(params(p=0.0), 5, forced)
    assert bp.check_constraint(g, bp.ConstraintSpec("hn"))
    assert g.biadjacency.to_array().sum() == len(forced) == 6


def test_code_from_graph_examples():
    empty = bp.code_from_graph(graph([[0, 0, 0]]))
    assert len(empty.codewords()) == 8
    even = bp.code_from_graph(graph([[1, 1, 1, 1]]))
    assert all(w.weight % 2 == 0 for w in even.codewords()) and even.size == 8
    rep = bp.code_from_graph(graph([[1, 1, 0], [0, 1, 1]]))
    assert {str(w) for w in rep.codewords()} == {"000", "111"}


@pytest.mark.parametrize("seed", range(20))
def test_codewords_satisfy_every_parity_check(seed):
    g = bp.sample_bipartite(params(n=14, epsilon=0.5, p=0.3), seed)
    for w in nullspace_enumerate(g.biadjacency):
        for j in range(g.n_right):
            parity = 0
            for i in g.right_neighbours(j):
                parity ^= w.bits[i]
            assert parity == 0


@pytest.mark.parametrize("seed", range(30))
def test_rate_at_least_one_minus_m_over_n(seed):
    g = bp.sample_bipartite(params(n=20, epsilon=0.6, p=0.2), seed)
    rate, _ = rate_and_redundancy(bp.code_from_graph(g))
    assert rate >= 1 - g.n_right / g.n_left


def test_neighbourhoods():
    g = graph([[1, 0, 1], [0, 1, 1]])
    assert g.right_neighbours(0) == {0, 2}
    assert g.left_neighbours(2) == {0, 1}
    assert g.has_edge(1, 1) and not g.has_edge(1, 0)


# --- diversity -------------------------------------------------------------------------


def test_diversity_examples():
    assert bp.diversity_index(graph([[1, 1, 0, 0], [0, 0, 1, 1]])) == 1.0
    assert bp.diversity_index(graph([[1, 0, 0], [1, 1, 0]])) == 0.0
    # R_1 = {a1,a2,a3}, R_2 = {a3,a4}: min(2/3, 1/2)
    assert bp.diversity_index(graph([[1, 1, 1, 0], [0, 0, 1, 1]])) == 0.5


def test_diversity_skips_empty_neighbourhoods():
    assert bp.diversity_index(graph([[0, 0, 0], [0, 0, 0]])) == 1.0
    assert bp.diversity_index(graph([[0, 0, 0], [1, 1, 0]])) == 1.0


def test_diversity_needs_two_parity_nodes():
    with pytest.raises(PreconditionError):
        bp.diversity_index(graph([[1, 1]]))


@pytest.mark.parametrize("seed", range(100))
def test_diversity_matches_naive_double_loop(seed):
    g = bp.sample_bipartite(params(n=12, epsilon=0.5, p=0.3), seed)
    assert bp.diversity_index(g) == pytest.approx(bp.naive_diversity_index(g), abs=1e-15)


# --- constraints ------------------------------------------------------------------------


def test_hn_examples():
    hn = bp.ConstraintSpec("hn")
    full = bp.BipartiteGraph.from_matrix(BitMatrix.from_array(np.ones((5, 16), dtype=np.uint8)))
    empty = bp.BipartiteGraph.from_matrix(BitMatrix.zeros(5, 16))
    assert bp.check_constraint(full, hn)
    assert not bp.check_constraint(empty, hn)
    arr = np.zeros((5, 16), dtype=np.uint8)
    for i in (2, 3, 4):  # a_i ~ b_{i-1}, b_{i+1} in 1-based names
        arr[i - 2, i - 1] = 1
        arr[i, i - 1] = 1
    g = bp.BipartiteGraph.from_matrix(BitMatrix.from_array(arr))
    assert bp.check_constraint(g, hn) and bp.naive_hn(g)
    arr[3, 2] = 0  # drop (a_3, b_4)
    assert not bp.check_constraint(bp.BipartiteGraph.from_matrix(BitMatrix.from_array(arr)), hn)


def test_hn_needs_enough_right_nodes():
    with pytest.raises(PreconditionError):
        bp.check_constraint(bp.BipartiteGraph.from_matrix(BitMatrix.zeros(4, 16)), bp.ConstraintSpec("hn"))


def test_constraint_conjunction_and_predicates():
    @bp.register_predicate("has_edges")
    def _has_edges(g):
        return any(g.biadjacency.data)

    spec = bp.ConstraintSpec.parse('{"kind": "and", "of": [{"kind": "always"}, '
                                   '{"kind": "predicate", "name": "has_edges"}]}')
    assert bp.check_constraint(graph([[1, 0], [0, 0]]), spec)
    assert not bp.check_constraint(graph([[0, 0], [0, 0]]), spec)
    assert spec.forced_edges(2, 2) is None
    with pytest.raises(ParameterError):
        bp.check_constraint(graph([[1]]), bp.ConstraintSpec("predicate", name="nope"))


def test_constraint_serialisation_round_trip(tmp_path):
    spec = bp.ConstraintSpec("and", (bp.ConstraintSpec("hn"), bp.ConstraintSpec("always")))
    assert bp.ConstraintSpec.parse(spec.to_json()) == spec
    path = tmp_path / "c.json"
    path.write_text(spec.to_json())
    assert bp.ConstraintSpec.parse(str(path)) == spec
    assert bp.ConstraintSpec.parse("hn") == bp.ConstraintSpec("hn")
    with pytest.raises(ParseError):
        bp.ConstraintSpec.parse('{"kind": "bogus"}')
    with pytest.raises(ParseError):
        bp.ConstraintSpec.parse("not-a-file")


def test_forced_edges_of_conjunction():
    spec = bp.ConstraintSpec("and", (bp.ConstraintSpec("hn"), bp.ConstraintSpec("always")))
    assert spec.forced_edges(16, 5) == bp.ConstraintSpec("hn").forced_edges(16, 5)


# --- closed forms -------------------------------------------------------------------------


def test_hn_exact_probability():
    # i in {2,3,4}, two edges each
    assert bp.hn_exact_probability(16, 0.5) == pytest.approx(1 / 64)
    assert bp.hn_exact_probability(30, 1.0) == 1.0
    assert bp.hn_exact_probability(30, 0.0) == 0.0
    with pytest.raises(PreconditionError):
        bp.hn_exact_probability(3, 0.5)


@pytest.mark.parametrize("n", [4, 9, 16, 24, 50, 100])
def test_hn_exact_probability_counts_distinct_edges(n):
    edges = bp.ConstraintSpec("hn").forced_edges(n, math.isqrt(n) + 1)
    assert bp.hn_exact_probability(n, 0.3) == pytest.approx(0.3 ** len(edges))
    assert bp.hn_exact_probability(n, 0.3) >= 0.3 ** (2 * math.sqrt(n))


def test_parity_even_prob_examples():
    assert bp.parity_even_prob(1, 0.3) == pytest.approx(0.7)
    assert bp.parity_even_prob(2, 0.25) == pytest.approx(0.625)
    assert bp.parity_even_prob(17, 0.5) == 0.5


@pytest.mark.parametrize("g", range(1, 31))
def test_parity_even_prob_matches_binomial_sum(g):
    for p in np.linspace(0, 0.5, 6):
        assert abs(bp.parity_even_prob(g, p) - binomial_even_sum(g, p)) < 1e-12


def test_step1_gamma():
    assert bp.step1_gamma(1e-9, 1e-9) == pytest.approx(1.0, abs=1e-8)
    assert bp.step1_gamma(0.1, 0.25) == pytest.approx(0.568181818181818, abs=1e-12)
    assert bp.step1_gamma(0.2, 0.4) == pytest.approx(0.266666666666667, abs=1e-12)


def test_bound_e_div():
    assert bp.bound_e_div(params(n=50, epsilon=0.5, p=0.2, theta=0.1)) == 0.0
    assert bp.bound_e_div_raw(params(n=50, epsilon=0.5, p=0.2, theta=0.1)) < 0
    # choose theta so that theta^2 n p^2 / 4 = ln(8 m^2): bound is 1 - 1/2
    pr = params(n=100000, epsilon=0.01, p=0.4)
    theta = math.sqrt(4 * math.log(8 * pr.m**2) / (pr.n * pr.p**2))
    pr = params(n=100000, epsilon=0.01, p=0.4, theta=theta)
    assert bp.bound_e_div(pr) == pytest.approx(0.5, abs=1e-12)
    assert bp.bound_e_div(params(n=10**9, epsilon=0.01, p=0.4)) == pytest.approx(1.0, abs=1e-9)


def test_bound_delta0():
    pr = params(n=100, epsilon=0.6, p=0.2, t=1)
    assert bp.bound_delta0(pr) == pytest.approx(60 * 0.2 - math.log(100 * math.e))
    # 60*0.2*0.8^2 - 3 ln(100e/3) - 2 ln 3, evaluated at 30 digits
    assert bp.bound_delta0(params(n=100, epsilon=0.6, p=0.2, t=3)) == pytest.approx(
        -8.036898269296164, abs=1e-12)
    vals = [bp.bound_delta0(params(n=1000, epsilon=0.6, p=0.2, t=t)) for t in range(1, 11)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(PreconditionError):
        bp.bound_delta0(params(n=10, t=5))


def test_bound_e_up():
    pr = params(n=100, epsilon=0.6, delta=0.1, eta=0.1)
    assert bp.gv_exponent(pr) == pytest.approx(0.0710044064107188, abs=1e-12)
    assert bp.bound_e_up(pr) == pytest.approx(0.00728709421570236, rel=1e-10)
    doubled = params(n=200, epsilon=0.6, delta=0.1, eta=0.1)
    assert bp.bound_e_up(doubled) == pytest.approx(bp.bound_e_up(pr) ** 2, rel=1e-10)
    # beta * n = 1 gives 1/2
    eps = (entropy(0.1) + 1 / 100) / (1 - 0.1)
    assert bp.bound_e_up(params(n=100, epsilon=eps, delta=0.1, eta=0.1)) == pytest.approx(0.5)
    with pytest.raises(ParameterError):
        bp.bound_e_up(params(n=100, epsilon=0.4, delta=0.1, eta=0.1))


def test_choose_t():
    assert bp.choose_t(0.25, 0.2) == 2
    assert bp.choose_t(0.4999999, 0.01) == 1
    with pytest.raises(ParameterError):
        bp.choose_t(0.5, 0.1)


def test_choose_t_is_minimal_and_monotone():
    for p in (0.05, 0.1, 0.2, 0.3, 0.45):
        ts = []
        for eta in np.linspace(0.01, 0.49, 25):
            t = bp.choose_t(p, eta)
            target = 2 ** (-(1 - eta))
            assert bp.parity_even_prob(t + 1, p) <= target
            assert t == 1 or bp.parity_even_prob(t, p) > target
            ts.append(t)
        assert all(a >= b for a, b in zip(ts, ts[1:]))


# --- search -----------------------------------------------------------------------------


def test_search_with_vacuous_targets_accepts_first_nontrivial_code():
    res = bp.rejection_search(params(n=10, epsilon=0.5, p=0.3, delta=0.0, gamma=0.0),
                              bp.ConstraintSpec(), seed=3, max_attempts=5)
    assert res.ok and res.attempts == 1 and res.verified


def test_search_with_p_zero_never_accepts():
    res = bp.rejection_search(params(n=12, epsilon=0.5, p=0.0, delta=0.1, gamma=0.0),
                              bp.ConstraintSpec(), seed=0, max_attempts=20)
    assert not res.ok
    assert res.attempts == 20
    assert res.metrics.min_distance == 1
    assert res.satisfied["distance"] is False


def test_search_desk_scale_example():
    res = bp.rejection_search(params(), bp.ConstraintSpec(), seed=11, max_attempts=500)
    assert res.ok
    g = res.graph
    assert bp.naive_min_distance(g) >= 4
    assert bp.naive_diversity_index(g) >= 0.3
    assert res.metrics.rate >= 1 - g.n_right / g.n_left


def test_search_is_reproducible():
    a = bp.rejection_search(params(), bp.ConstraintSpec("hn"), seed=5, max_attempts=300)
    b = bp.rejection_search(params(), bp.ConstraintSpec("hn"), seed=5, max_attempts=300)
    assert a == b
    assert a.to_record() == b.to_record()


def test_search_unconditioned_runs_plain_rejection():
    res = bp.rejection_search(params(), bp.ConstraintSpec("hn"), seed=5, max_attempts=30,
                              condition=False)
    assert not res.conditioned
    assert res.attempts <= 30


def test_search_parameter_checks():
    with pytest.raises(ParameterError):
        bp.rejection_search(params(epsilon=0.3, delta=0.2), bp.ConstraintSpec(), 0, 10)
    with pytest.raises(SizeError):
        bp.rejection_search(params(n=40, epsilon=0.2, delta=0.01), bp.ConstraintSpec(), 0, 10)


# --- Monte Carlo ---------------------------------------------------------------------------


def test_wilson_interval_reference_values():
    # z = 1.959964; 0/10 gives [0, z^2/(n+z^2)]
    lo, hi = bp.wilson_interval(0, 10)
    z2 = 1.959963984540054**2
    assert lo == 0.0 and hi == pytest.approx(z2 / (10 + z2))
    lo, hi = bp.wilson_interval(50, 100)
    assert (lo + hi) / 2 == pytest.approx(0.5)


def test_monte_carlo_always_constraint():
    res = bp.monte_carlo_event(params(n=10), "constraint", bp.ConstraintSpec(), 100, 1)
    assert res.estimate == 1.0 and res.ci_low <= 1.0 <= res.ci_high


def test_monte_carlo_diversity_zero_gamma():
    res = bp.monte_carlo_event(params(n=10, gamma=0.0), "diversity_ge_gamma", bp.ConstraintSpec(), 100, 1)
    assert res.estimate == 1.0


def test_monte_carlo_distance_event_matches_direct_count():
    pr = params(n=12, epsilon=0.5, p=0.3, delta=0.1)
    res = bp.monte_carlo_event(pr, "min_distance_ge_target", bp.ConstraintSpec(), 200, 9)
    direct = 0
    for i in range(200):
        d = bp.naive_min_distance(bp.sample_bipartite(pr, (9, i)))
        direct += d is None or d >= pr.distance_target
    assert res.successes == direct


def test_monte_carlo_rejects_small_runs():
    with pytest.raises(PreconditionError):
        bp.monte_carlo_event(params(), "constraint", bp.ConstraintSpec(), 99, 0)
    with pytest.raises(ParameterError):
        bp.monte_carlo_event(params(), "bogus", bp.ConstraintSpec(), 100, 0)


def test_monte_carlo_hn_is_deterministic():
    pr = params(n=16, epsilon=0.5, p=0.5)
    a = bp.monte_carlo_event(pr, "constraint", bp.ConstraintSpec("hn"), 500, 77)
    b = bp.monte_carlo_event(pr, "constraint", bp.ConstraintSpec("hn"), 500, 77)
    assert a == b


def test_monte_carlo_hn_concentrates_around_exact_value():
    pr = params(n=16, epsilon=0.5, p=0.5)
    exact = bp.hn_exact_probability(16, 0.5)
    trials = 1000
    half = 4 * math.sqrt(exact / trials)
    inside = sum(
        abs(bp.monte_carlo_event(pr, "constraint", bp.ConstraintSpec("hn"), trials, 10_000 + rep).estimate
            - exact) <= half
        for rep in range(100)
    )
    assert inside >= 95


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 14), st.floats(0.2, 1.0), st.floats(0.05, 0.45), st.integers(0, 2**31))
def test_sampled_graph_invariants(n, eps, p, seed):
    pr = bp.ModelParams(n=n, epsilon=eps, p=p)
    g = bp.sample_bipartite(pr, seed)
    assert g.n_right == math.ceil(round(eps * n, 9))
    arr = g.biadjacency.to_array()
    for j in range(g.n_right):
        assert g.right_neighbours(j) == {i for i in range(n) if arr[j, i]}
    if g.n_right >= 2:
        assert 0.0 <= bp.diversity_index(g) <= 1.0
