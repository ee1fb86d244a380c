import math

import numpy as np
import pytest

from persistlab.dynsys import sample_orthant_points
from persistlab.errors import (NoBoundaryEquilibrium, NoInteriorPreyEquilibrium,
                               ParamOutOfRange, UnknownModel)
from persistlab.models import (AcklehParams, DinParams, FoodChainParams, REGISTRY,
                               ackleh_composite, ackleh_growth_rates,
                               din_bracket_predator_extinct, din_bracket_prey_extinct,
                               din_model, din_predator_only_map, din_prey_only_map,
                               din_thresholds, food_chain, food_chain_boundary_equilibria,
                               food_chain_invasion_conditions, get_family)


# --- seasonal composite -----------------------------------------------------

def test_growth_rates_hand_arithmetic():
    # s_n=0.5, b_max=2: r0 = 0.25 + 0.5*2 = 1.25; nbar solves 2/(1+n) = 1.5
    params = AcklehParams(kappa=3.0)
    rates = ackleh_growth_rates(params)
    assert rates.prey_rate == pytest.approx(1.25, abs=1e-15)
    assert rates.prey_equilibrium == pytest.approx(1.0 / 3.0, rel=1e-12)
    # s_p=0.5, kappa=3, f(0)=0.5: ri = 0.5 + 3*(1/3)*0.5 = 1.0 boundary case
    assert rates.invasion_rate == pytest.approx(1.0, rel=1e-12)


def test_default_kernels_satisfy_bounds():
    params = AcklehParams()
    rng = np.random.default_rng(7)
    for value in rng.uniform(0.0, 1e4, size=200):
        fp = params.predation(value)
        assert 0.0 < fp < 1.0
        assert fp * value < 1.0
    levels = params.fecundity(np.array(0.0)), params.fecundity(1.0), params.fecundity(50.0)
    assert levels[0] > levels[1] > levels[2] > 0.0


def test_predator_line_maps_into_itself():
    # f(0)*0 = 0 makes the mixed predator density vanish at n=0
    params = AcklehParams()
    model, _ = ackleh_composite(params)
    assert np.array_equal(model.rhs(np.zeros(2)), np.zeros(2))
    for p0 in (0.1, 1.0, 10.0):
        out = model.rhs(np.array([0.0, p0]))
        assert out[0] == 0.0


def test_prey_cocycle_at_origin_equals_inherent_rate():
    params = AcklehParams()
    model, decs = ackleh_composite(params)
    rates = ackleh_growth_rates(params)
    value = decs["n"].cocycle(np.array([0.0, 0.0]))[0, 0]
    assert value == pytest.approx(rates.prey_rate, rel=1e-14)


def test_composite_consistency_predator_cocycle():
    params = AcklehParams()
    model, decs = ackleh_composite(params)
    for z in sample_orthant_points(2, 1000, 20.0, seed=11):
        expected = model.rhs(z)[1]
        value = decs["p"].cocycle(z)[0, 0] * z[1]
        assert abs(value - expected) <= 1e-12 * (1.0 + abs(expected))


def test_no_interior_prey_equilibrium_when_subcritical():
    # r0 = 0.25 + 0.5*1.4 = 0.95 < 1: the prey-only map has no positive fixed point
    with pytest.raises(NoInteriorPreyEquilibrium):
        ackleh_growth_rates(AcklehParams(b_max=1.4))


def test_custom_kernel_equilibrium_by_bisection():
    params = AcklehParams(b_hat=lambda n: 2.0 / (1.0 + n))
    direct = ackleh_growth_rates(AcklehParams())
    custom = ackleh_growth_rates(params)
    assert custom.prey_equilibrium == pytest.approx(direct.prey_equilibrium, rel=1e-10)
    assert custom.invasion_rate == pytest.approx(direct.invasion_rate, rel=1e-10)


def test_ackleh_param_validation():
    with pytest.raises(ParamOutOfRange):
        AcklehParams(s_n=1.0)
    with pytest.raises(ParamOutOfRange):
        AcklehParams(kappa=-1.0)
    with pytest.raises(ParamOutOfRange):
        AcklehParams(f=lambda p: 1.5)


# --- Ricker-type pair -------------------------------------------------------

def test_din_thresholds_hand_arithmetic():
    th = din_thresholds(DinParams())
    assert th.prey_condition and th.prey_margin == pytest.approx(1.5 - 0.1, abs=1e-15)
    assert th.predator_condition and th.predator_margin == pytest.approx(0.5, abs=1e-15)
    assert not din_thresholds(DinParams(d=1.0)).predator_condition


def test_din_prey_extinct_bracket_composition():
    # a=c=1, d=0.5: g(y) = y e^{0.5-y}; g(1) = e^{-0.5}, g(g(1)) by hand.
    # The peak value (c/a)e^{-d} sits below c/a for every d > 0, so this map
    # is never overshooting and its positive orbits settle on the fixed
    # point; the bracket endpoints are still exposed as stated.
    params = DinParams()
    g1 = math.exp(-0.5)
    g2 = g1 * math.exp(0.5 - g1)
    lo, hi = din_bracket_prey_extinct(params)
    assert hi == pytest.approx(g1, rel=1e-14)
    assert lo == pytest.approx(g2, rel=1e-14)
    assert hi < params.c / params.a


def test_din_boundary_maps_match_reduced_dynamics():
    params = DinParams(r=2.0, d=0.7)
    model, decs = din_model(params)
    for v in (0.2, 1.0, 4.0):
        assert model.rhs(np.array([v, 0.0]))[0] == pytest.approx(
            din_prey_only_map(params, v), rel=1e-14)
        assert model.rhs(np.array([0.0, v]))[1] == pytest.approx(
            din_predator_only_map(params, v), rel=1e-14)


def test_din_predator_cocycle_log_growth_at_carrying_capacity():
    params = DinParams()
    _, decs = din_model(params)
    value = decs["y"].cocycle(np.array([params.K, 0.0]))[0, 0]
    assert math.log(value) == pytest.approx(1.0 - params.d, abs=1e-12)


def test_din_bracket_predator_extinct_traps_iterates():
    params = DinParams(r=2.3)
    lo, hi = din_bracket_predator_extinct(params)
    x = 0.05
    for _ in range(200):
        x = din_prey_only_map(params, x)
    for _ in range(500):
        x = din_prey_only_map(params, x)
        assert lo - 1e-9 <= x <= hi + 1e-9


# --- food chain ---------------------------------------------------------------

def test_food_chain_origin_is_equilibrium():
    model, _ = food_chain(FoodChainParams())
    assert np.array_equal(model.rhs(np.zeros(3)), np.zeros(3))


def test_food_chain_prey_line_is_logistic():
    model, _ = food_chain(FoodChainParams())
    for x in (0.1, 0.5, 0.9, 1.0):
        out = model.rhs(np.array([x, 0.0, 0.0]))
        assert out[0] == pytest.approx(x * (1.0 - x), rel=1e-14)
        assert out[1] == 0.0 and out[2] == 0.0


def test_food_chain_prey_cocycle_at_origin_is_one():
    # (1-x) - alpha*y/(1+h1*alpha*x) - beta*z/(1+h2*beta*x) at the origin is 1
    _, decs = food_chain(FoodChainParams())
    assert decs["x"].cocycle(np.zeros(3))[0, 0] == 1.0


def test_food_chain_kolmogorov_factorization():
    model, decs = food_chain(FoodChainParams())
    for z in sample_orthant_points(3, 300, 2.0, seed=5):
        field = model.rhs(z)
        for i, name in enumerate(("x", "y", "z")):
            factor = decs[name].cocycle(z)[0, 0]
            assert abs(field[i] - factor * z[i]) <= 1e-12 * (1.0 + abs(field[i]))


def _planar_equilibrium_oracle(params: FoodChainParams) -> tuple[float, float]:
    # bisection on the y=0 subsystem after eliminating z via the prey nullcline:
    # z(x) = (1-x)(1+h2 b x)/b, root of M2(x, z(x)) in (0, 1)
    def surviving(x):
        return (1.0 - x) * (1.0 + params.h2 * params.beta * x) / params.beta

    def rate(x):
        den = 1.0 + params.h2 * params.beta * x
        return -params.w + params.e2 * params.beta * (x - surviving(x)) / den

    lo, hi = 1e-9, 1.0 - 1e-12
    assert rate(lo) < 0.0 < rate(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if rate(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    x_hat = 0.5 * (lo + hi)
    return x_hat, surviving(x_hat)


def test_boundary_equilibria_match_bisection_oracle():
    params = FoodChainParams()
    eq = food_chain_boundary_equilibria(params)
    x_ref, z_ref = _planar_equilibrium_oracle(params)
    assert eq.x_hat == pytest.approx(x_ref, abs=1e-9)
    assert eq.z_hat == pytest.approx(z_ref, abs=1e-9)
    assert eq.residual_hat <= 1e-10
    assert eq.residual_tilde <= 1e-10
    assert 0.0 < eq.x_hat < 1.0 and 0.0 < eq.x_tilde < 1.0


def test_boundary_equilibria_degenerate_death_rate():
    # no positive surviving-predator level once w >= e2*beta/(1+h2*beta)
    params = FoodChainParams(w=4.0 / 1.8 + 0.01)
    with pytest.raises(NoBoundaryEquilibrium):
        food_chain_boundary_equilibria(params)


def test_invasion_margin_sign_matches_growth_rate():
    params = FoodChainParams()
    inv = food_chain_invasion_conditions(params)
    eq = inv.equilibria
    lam = (-params.u + params.e1 * params.alpha * eq.x_hat
           / (1.0 + params.h1 * params.alpha * eq.x_hat) - params.c1 * eq.z_hat)
    assert (lam > 0.0) == (inv.margin_y > 0.0)
    assert inv.cond_y and inv.cond_z


def test_invasion_margin_linear_in_conversion():
    params = FoodChainParams()
    inv1 = food_chain_invasion_conditions(params)
    inv2 = food_chain_invasion_conditions(FoodChainParams(e1=params.e1 + 0.5))
    assert inv2.margin_y == pytest.approx(inv1.margin_y + 0.5, rel=1e-10)


def test_growth_rate_vanishes_at_exact_invasion_bound():
    params = FoodChainParams()
    inv = food_chain_invasion_conditions(params)
    eq = inv.equilibria
    bound = params.e1 - inv.margin_y
    tuned = FoodChainParams(e1=bound)
    # the y=0 equilibrium does not involve e1, so it is unchanged
    eq2 = food_chain_boundary_equilibria(tuned)
    lam = (-tuned.u + tuned.e1 * tuned.alpha * eq2.x_hat
           / (1.0 + tuned.h1 * tuned.alpha * eq2.x_hat) - tuned.c1 * eq2.z_hat)
    assert abs(lam) <= 1e-12


# --- registry -----------------------------------------------------------------

def test_registry_contents():
    assert set(REGISTRY) == {"ackleh-composite", "din-predprey", "food-chain-2pred"}
    family = get_family("din-predprey")
    assert family.defaults()["r"] == 1.5


def test_unknown_model_lists_choices():
    with pytest.raises(UnknownModel) as err:
        get_family("lorenz")
    assert "din-predprey" in str(err.value)


def test_make_params_rejects_unknown_name():
    family = get_family("din-predprey")
    with pytest.raises(ParamOutOfRange):
        family.make_params({"sigma": 1.0})


def test_family_conditions_report_margins():
    family = get_family("ackleh-composite")
    checks = family.conditions(family.make_params({"kappa": 6.0}))
    by_label = {c.label: c for c in checks}
    assert by_label["r0>1"].holds and by_label["r0>1"].margin == pytest.approx(0.25)
    assert by_label["ri>1"].holds and by_label["ri>1"].margin == pytest.approx(0.5)
