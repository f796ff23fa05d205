
import numpy as np
import pytest

from graphtunnel.errors import NotConstantDegree, NotSimplePotential, SeriesMayDiverge, ValidationError
from graphtunnel.fitting import fit_order
from graphtunnel.graph_core import build_graph, detect_wells, make_potential
from graphtunnel.hamiltonian import build_hamiltonian, dirichlet_restriction
from graphtunnel.tunneling import (
    decay_report, default_truncation, ground_quasimode, interaction_matrix_appendixA,
    interaction_matrix_leading, lowest_eigenvalues, psi_lambda_exact, psi_lambda_pathsum,
    simple_potential_specialize, solve_mu, tunneling_family, verify_order,
)

from conftest import NAMED_GRAPHS, c6, p3, p5, petersen_like, random_valid_graph
from oracles import p3_dirichlet_mu, p3_spectrum

GRID = [0.2, 0.1, 0.05, 0.025]


def isolated_well():
    g = build_graph(["j"], [])
    v = make_potential(g, [0])
    return g, v, detect_wells(g, v)


def test_default_truncation():
    assert default_truncation(2) == 10
    assert default_truncation(None) == 8


@pytest.mark.parametrize("hbar", [0.2, 0.1, 0.05])
def test_p3_mu_closed_form(hbar):
    g, v, w = p3()
    ev = solve_mu(g, v, w, "a", hbar)
    assert ev.mu == pytest.approx(p3_dirichlet_mu(hbar), abs=1e-15)
    assert ev.oracle_diff <= 1e-14
    assert ev.residual <= 1e-12 + ev.tail_bound
    assert ev.iterations < 10


def test_isolated_well_mu_is_zero():
    g, v, w = isolated_well()
    ev = solve_mu(g, v, w, "j", 0.3)
    assert ev.mu == 0.0 and ev.oracle_mu == 0.0


def test_mu_diverging_regime():
    g, v, w = p3()
    with pytest.raises(SeriesMayDiverge):
        solve_mu(g, v, w, "a", 10.0)


@pytest.mark.parametrize("name", sorted(NAMED_GRAPHS))
def test_mu_matches_dirichlet_oracle(name):
    g, v, w = NAMED_GRAPHS[name]()
    for h in (0.2, 0.1, 0.05):
        for j in w.wells:
            ev = solve_mu(g, v, w, j, h)
            assert ev.oracle_diff <= 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_mu_is_exact_dirichlet_eigenvalue(seed):
    g, v, w = random_valid_graph(seed)
    for j in w.wells:
        ev, psi = ground_quasimode(g, v, w, j, 0.15)
        hj = dirichlet_restriction(build_hamiltonian(g, v, 0.15), w, j)
        vec = np.array([psi.values[g.index[x]] for x in hj.index])
        assert np.linalg.norm(hj.entries @ vec - ev.mu * vec) <= 1e-10
        assert ev.mu <= 0.0


def test_mu_sign_and_leading_magnitude():
    g, v, w = p5()
    ev = solve_mu(g, v, w, "v0", 0.025)
    assert ev.mu < 0
    assert abs(ev.mu) / ev.leading_term == pytest.approx(1.0, rel=1e-2)
    d = ev.to_dict()
    assert d["mu_sign"] == "negative" and d["leading_term_positive_form"] > 0


def test_p3_psi_forms_agree():
    g, v, w = p3()
    for h in (0.2, 0.1):
        mu = p3_dirichlet_mu(h)
        ps = psi_lambda_pathsum(g, v, w, "a", mu, h, 6)
        ex = psi_lambda_exact(g, v, w, "a", mu, h)
        expected = [1.0, h ** 2 / (1 - mu), 0.0]
        np.testing.assert_allclose(ps.values, expected, rtol=1e-14)
        np.testing.assert_allclose(ex.values, expected, rtol=1e-14)


def test_isolated_well_psi():
    g, v, w = isolated_well()
    assert psi_lambda_pathsum(g, v, w, "j", -0.1, 0.2, 5).values.tolist() == [1.0]
    assert psi_lambda_exact(g, v, w, "j", -0.1, 0.2).values.tolist() == [1.0]


def test_psi_exact_hbar_zero_is_indicator():
    g, v, w = p5()
    assert psi_lambda_exact(g, v, w, "v4", 0.3, 0.0).values.tolist() == [0, 0, 0, 0, 1.0]


@pytest.mark.parametrize("name", sorted(NAMED_GRAPHS))
def test_pathsum_within_tail(name):
    g, v, w = NAMED_GRAPHS[name]()
    for h in (0.2, 0.1):
        for j in w.wells:
            mu = solve_mu(g, v, w, j, h).mu
            ps = psi_lambda_pathsum(g, v, w, j, mu, h, 8)
            ex = psi_lambda_exact(g, v, w, j, mu, h)
            assert np.max(np.abs(ps.values - ex.values)) <= ps.tail_bound + 1e-15


def test_decay_p3_and_p5():
    g, v, w = p3()
    psis = [ground_quasimode(g, v, w, "a", h)[1] for h in (0.1, 0.05, 0.025)]
    rows = {r["vertex"]: r for r in decay_report(psis, w, g)}
    assert rows["a"]["slope"] == 0.0
    assert rows["b"]["slope"] == pytest.approx(2.0, abs=0.01)
    assert rows["c"]["slope"] is None

    g, v, w = p5()
    psis = [ground_quasimode(g, v, w, "v0", h)[1] for h in (0.1, 0.05, 0.025)]
    rows = {r["vertex"]: r for r in decay_report(psis, w, g)}
    assert rows["v3"]["distance"] == 3
    assert rows["v3"]["slope"] == pytest.approx(6.0, abs=0.05)


def test_decay_needs_three():
    g, v, w = p3()
    with pytest.raises(ValidationError):
        decay_report([ground_quasimode(g, v, w, "a", 0.1)[1]] * 2, w, g)


def test_p3_leading_matrix():
    g, v, w = p3()
    h = 0.1
    im = interaction_matrix_leading(g, v, w, h)
    mu = p3_dirichlet_mu(h)
    # the closed form cancels digits, so compare absolutely
    np.testing.assert_allclose(im.matrix, [[mu, -h ** 4], [-h ** 4, mu]], rtol=0, atol=1e-16)
    exact = p3_spectrum(h)[:2]
    err = np.abs(im.eigenvalues() - exact)
    assert np.all(err <= 10 * h ** 8)


def test_c6_leading_offdiag():
    g, v, w = c6()
    im = interaction_matrix_leading(g, v, w, 0.1)
    h4 = 0.1 ** 4
    np.testing.assert_allclose(im.offdiag, [[0, -h4, -h4], [-h4, 0, -h4], [-h4, -h4, 0]], rtol=1e-15)
    assert np.array_equal(im.matrix, im.matrix.T)


def test_single_well_one_by_one():
    g = build_graph(["a", "b"], [("a", "b")])
    v = make_potential(g, [0, 2])
    im = interaction_matrix_leading(g, v, detect_wells(g, v), 0.1)
    assert im.matrix.shape == (1, 1) and im.S0 is None


def test_leading_warns_on_distant_pair():
    g, v, w = petersen_like()
    im = interaction_matrix_leading(g, v, w, 0.1)
    assert np.array_equal(im.matrix, im.matrix.T)
    far = [(a, b) for a in w.wells for b in w.wells if a < b and
           w.pairwise_distances[w.wells.index(a)][w.wells.index(b)] > w.S0]
    assert len(im.warnings) == len(far)


def test_verify_order_p3_p5():
    for make, S0 in ((p3, 2), (p5, 4)):
        g, v, w = make()
        rep = verify_order(g, v, w, GRID)
        assert rep.S0 == S0 and rep.all_passed
        assert rep.threshold == 2 * S0 + 2 - 0.25


def test_verify_order_needs_four_points():
    g, v, w = p3()
    with pytest.raises(ValidationError):
        verify_order(g, v, w, [0.1, 0.05, 0.025])


def test_verify_order_divergent_point():
    g, v, w = p3()
    with pytest.raises(SeriesMayDiverge) as info:
        verify_order(g, v, w, [5.0, 0.1, 0.05, 0.025])
    assert info.value.hbar == 5.0


def test_appendixA_not_worse_than_leading():
    g, v, w = p3()
    h = 0.1
    exact = lowest_eigenvalues(g, v, h, 2)
    lead, _ = interaction_matrix_leading(g, v, w, h), None
    app, rep, _ = interaction_matrix_appendixA(g, v, w, h)
    e_lead = np.abs(lead.eigenvalues() - exact)
    e_app = np.abs(app.eigenvalues() - exact)
    assert np.all(e_app <= e_lead + 1e-18)
    assert np.array_equal(app.matrix, app.matrix.T)


@pytest.mark.parametrize("make", [p3, p5])
def test_norm_is_one_plus_h4(make):
    g, v, w = make()
    hs = [0.2, 0.1, 0.05, 0.025]
    j = w.wells[0]
    dev = [np.linalg.norm(ground_quasimode(g, v, w, j, h)[1].values) - 1.0 for h in hs]
    assert fit_order(hs, dev).slope >= 4 - 0.1


@pytest.mark.parametrize("make, S0", [(p3, 2), (p5, 4)])
def test_residual_overlap_order(make, S0):
    g, v, w = make()
    hs = [0.2, 0.1, 0.05, 0.025]
    vals = []
    for h in hs:
        fam, _ = tunneling_family(g, v, w, h)
        vals.append(float(fam.residuals[:, 1] @ fam.psis[:, 0]))
    assert abs(fit_order(hs, vals).slope - 2 * S0) <= 0.1


def test_simple_potential_c6():
    g, v, w = c6()
    rep = simple_potential_specialize(g, v, w, 0.1)
    assert rep.degree == 2
    assert rep.loop_counts["v0"][2] == 2
    assert rep.offdiag[0, 1] == -(0.1 ** 4)
    assert rep.max_weight_mismatch == 0.0
    for j in w.wells:
        assert rep.mus[j] == pytest.approx(solve_mu(g, v, w, j, 0.1).mu, rel=1e-13)


def test_simple_potential_rejections():
    g, v, w = p3()
    with pytest.raises(NotConstantDegree):
        simple_potential_specialize(g, v, w, 0.1)
    g, v, w = c6()
    vv = make_potential(g, [0, 2, 0, 1, 0, 1])
    with pytest.raises(NotSimplePotential):
        simple_potential_specialize(g, vv, detect_wells(g, vv), 0.1)
