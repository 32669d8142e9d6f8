import json
import math
from fractions import Fraction as F

import pytest

from qproj.family import DomainError, Params, coeff_row, reparam, sign_flip
from qproj.measure import NegativeProduct, gauss_quadrature
from qproj.project import (
    atom_candidates,
    nu_measure,
    projection_check,
    projection_sweep,
    signed_functional_residuals,
    tower_check,
)

STD = Params(1, F(1, 2), F(3, 10), F(7, 10))
S, T = F(2, 5), F(1)


def test_s0_matches_reparameterized_mu():
    x, t = F(1, 3), F(3, 2)
    nu = nu_measure(STD, x, t, 0, 30)
    r = reparam(STD, x, t, 0)
    mu = gauss_quadrature(r.params.as_float(), float(r.t), 30)
    mapped = [float(r.map(F(y))) for y in nu.nodes]
    for a, b in zip(mapped, mu.nodes):
        assert abs(a - b) <= 1e-8 * (1 + abs(b))
    for a, b in zip(nu.weights, mu.weights):
        assert abs(float(a) - b) <= 1e-10


@pytest.mark.parametrize("x", [F(-1, 2), F(1, 3), F(2)])
def test_moments_of_nu(x):
    rep = projection_check(STD, x, T, S, 12, 40)
    assert rep.mean_err <= 1e-10
    assert rep.var_err <= 1e-9
    assert rep.residuals[0] <= 1e-12 and rep.normalization_error <= 1e-12
    assert rep.max_relative <= 1e-8
    assert rep.beta_defect == 0


def test_standard_sweep():
    rep = projection_sweep(STD, T, S, 12, 40)
    assert rep.ok, [(r.x, r.route, r.error) for r in rep.failures]
    assert rep.max_residual <= 1e-8
    assert len(rep.nodes) == 40


def test_tau0_slice():
    for p in (Params(1, F(1, 2), 0, F(1, 2)), Params(2, 0, 0, F(7, 10))):
        rep = projection_sweep(p, T, S, 12, 40)
        assert rep.ok and rep.max_residual <= 1e-8


def test_s_to_t_limit():
    x = F(1, 3)
    prev_var = math.inf
    for gap in (F(1, 10), F(1, 100), F(1, 1000)):
        rep = projection_check(STD, x, T, T - gap, 12, 40)
        assert rep.max_relative <= 1e-8
        nu = nu_measure(STD, x, T, T - gap, 40)
        var = sum(float(w) * (float(y) - float(x)) ** 2 for w, y in zip(nu.weights, nu.nodes))
        assert var < prev_var
        prev_var = var
    assert prev_var <= 2e-3


def test_decoupled_point_mass_chain():
    # x = -1/eta is x_0(s): nu is a point mass and the identity is exact
    s = S
    rep = projection_check(STD, -1, T, s, 12, 40)
    assert rep.finite
    assert all(r == 0 for r in rep.residuals)
    nu = nu_measure(STD, -1, T, s, 40)
    assert nu.nodes == (-1,) and nu.weights == (1,)
    from qproj.project import _pbar_values

    vals = _pbar_values(STD, s, F(-1), 12)
    prod = F(1)
    for n in range(13):
        assert vals[n] == (-1) ** n * prod
        prod *= coeff_row(STD, n, 0).a_n


def test_atoms_give_finite_exact_measures():
    s = F(40)
    for k, x in enumerate(atom_candidates(STD, s, 10)):
        rep = projection_check(STD, x, s + 1, s, 8, 20)
        assert rep.finite
        assert all(r == 0 for r in rep.residuals), k


def test_outside_support_raises():
    with pytest.raises(NegativeProduct):
        nu_measure(Params(1, 0, 0, F(1, 2)), F(-5), T, S, 10)


def test_check_domain():
    with pytest.raises(DomainError):
        projection_check(STD, 0, S, T, 4, 10)
    with pytest.raises(DomainError):
        projection_check(STD, 0, T, S, 30, 10)


def test_sign_flip_sweep():
    p = Params(1, F(1, 2), F(3, 10), F(1, 2))
    xs = list(gauss_quadrature(p, S, 20).nodes)[:8]
    a = projection_sweep(p, T, S, 8, 20, xs=xs)
    p2, _ = sign_flip(p, 0)
    b = projection_sweep(p2, T, S, 8, 20, xs=[-x for x in xs])
    for ra, rb in zip(a.nodes, b.nodes):
        assert ra.route == rb.route
        assert max(abs(u - v) for u, v in zip(ra.residuals, rb.residuals)) <= 1e-12
    assert a.ok and b.ok


def test_sweep_collects_errors():
    rep = projection_sweep(STD, T, S, 6, 20, xs=[F(-5), F(1, 3)])
    assert [r.route for r in rep.nodes] == ["outside-support", "node"]
    assert rep.nodes[0].error["type"] == "NegativeProduct"
    assert not rep.ok and len(rep.failures) == 1


def test_sweep_structured_error():
    rep = projection_sweep(STD, S, T, 6, 20)
    assert rep.nodes == [] and rep.error["type"] == "DomainError"
    assert not rep.ok and rep.max_residual == math.inf
    d = rep.to_dict()
    assert d["error"]["type"] == "DomainError"


def test_report_schema():
    rep = projection_sweep(STD, T, S, 6, 10)
    d = rep.to_dict()
    assert d["schema"] == "qproj.projection/1"
    for key in ("params", "t", "s", "N", "nodes", "max_residual"):
        assert key in d
    assert {"x", "residuals", "mean_err", "var_err"} <= set(d["nodes"][0])
    assert d["params"]["q"] == "7/10"


def test_parallel_sweep_matches_sequential():
    a = projection_sweep(STD, T, S, 6, 12, workers=1)
    b = projection_sweep(STD, T, S, 6, 12, workers=3)
    assert a.to_dict() == b.to_dict()


def test_tower_property():
    assert tower_check(STD, F(1, 3), F(1, 5), F(3, 5), F(1), n_max=8, N=20) <= 1e-7


def test_signed_functional():
    # inside the support it agrees with the quadrature; outside it still vanishes for n < N
    res = signed_functional_residuals(STD, F(1, 3), T, S, 10, 20)
    assert all(r == 0 for r in res)
    res = signed_functional_residuals(Params(1, 0, 0, 1), F(-5), T, S, 10, 20)
    assert all(r == 0 for r in res)
    with pytest.raises(DomainError):
        signed_functional_residuals(STD.as_float(), 0.0, 1.0, 0.4, 4, 10)
