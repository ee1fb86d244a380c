import math

import numpy as np
import pytest

from persistlab.errors import ConfigError
from persistlab.models import (AcklehParams, DinParams, ackleh_growth_rates, din_model,
                               get_family)
from persistlab.persist import (CERTIFIED, EXTINCTION, INCOMPLETE, CertifyConfig,
                                PersistenceFunction, VarySpec, certify_family,
                                empirical_liminf, log_uniform_grid, parameter_sweep,
                                sum_abs)


def fast_config(**overrides):
    base = dict(burn_in=1500, window=1000, ic_points_per_axis=2, state_bound=20.0,
                boundary_seeds=8, boundary_burn_in=2000, boundary_window=500,
                window_doubling_check=False)
    base.update(overrides)
    return CertifyConfig(**base)


# --- persistence functions ------------------------------------------------------

def test_sum_abs_vanishes_exactly_on_extinction_set():
    _, decs = din_model(DinParams())
    rho = sum_abs(decs["y"])
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = float(rng.uniform(0, 10))
        assert rho(np.array([x, 0.0])) == 0.0
        y = float(rng.uniform(1e-300, 10))
        assert rho(np.array([x, y])) > 0.0


def test_persistence_function_kinds():
    rho_min = PersistenceFunction("min_component", (0, 1))
    assert rho_min(np.array([2.0, 3.0])) == 2.0
    rho_one = PersistenceFunction("single_component", (0, 1), component=1)
    assert rho_one(np.array([2.0, 3.0])) == 3.0
    with pytest.raises(ValueError):
        PersistenceFunction("other", (0,))
    with pytest.raises(ValueError):
        PersistenceFunction("single_component", (0,), component=5)


# --- empirical floor -------------------------------------------------------------

def test_liminf_window_one_is_single_recorded_state():
    model, decs = din_model(DinParams())
    rho = sum_abs(decs["y"])
    ic = np.array([2.0, 1.0])
    result = empirical_liminf(model, decs["y"], rho, [ic], burn_in=10, window=1)
    z = ic.copy()
    for _ in range(11):
        z = model.rhs(z)
    assert result.eps_hat == pytest.approx(rho(z), rel=1e-12)


def test_liminf_rejects_extinction_set_initial_condition():
    model, decs = din_model(DinParams())
    rho = sum_abs(decs["y"])
    with pytest.raises(ConfigError):
        empirical_liminf(model, decs["y"], rho, [np.array([2.0, 0.0])], 10, 10)


def test_liminf_detects_prey_collapse():
    # r*gamma*a = 0.01 far below beta*c*(1-d) = 25: prey dies against a
    # persistent predator (simulation oracle)
    model, decs = din_model(DinParams(r=0.01, beta=50.0))
    rho = sum_abs(decs["x"])
    grid = log_uniform_grid(2, 1e-3, 20.0, 3)
    result = empirical_liminf(model, decs["x"], rho, grid, 3000, 3000, extinction_tol=1e-10)
    assert result.eps_hat < 1e-10
    assert result.extinction_ic is not None


def test_log_uniform_grid_shape_and_positivity():
    grid = log_uniform_grid(2, 1e-3, 20.0, 5)
    assert len(grid) == 25
    assert all(np.all(ic > 0) for ic in grid)
    assert grid[0][0] == 1e-3 and grid[-1][1] == 20.0
    with pytest.raises(ConfigError):
        log_uniform_grid(2, 0.0, 1.0, 3)


# --- certification ---------------------------------------------------------------

def test_certify_ackleh_defaults_both_focal_blocks():
    family = get_family("ackleh-composite")
    for focal in ("n", "p"):
        cert = certify_family(family, focal, fast_config(burn_in=3000))
        assert cert.verdict == CERTIFIED
        assert cert.evidence and all(ev.passes for ev in cert.evidence)
        assert cert.empirical.eps_hat > 1e-4


def test_certificate_soundness_is_assertable_from_record():
    cert = certify_family("din-predprey", "y", fast_config())
    assert cert.verdict == CERTIFIED
    assert all(ev.passes for ev in cert.evidence)
    assert cert.empirical.eps_hat > 1e-4
    assert all(ev.passes == (ev.value > ev.threshold) for ev in cert.evidence)


def test_certify_detects_predator_extinction():
    # d = 1.2 gives y(t+1) <= y(t) e^{-0.2}, geometric decay to zero
    cert = certify_family("din-predprey", "y", fast_config(), overrides={"d": 1.2})
    assert cert.verdict == EXTINCTION
    assert cert.empirical.extinction_ic is not None
    assert not all(ev.passes for ev in cert.evidence)


def test_certify_records_analytic_conditions():
    family = get_family("din-predprey")
    cert = certify_family(family, "y", fast_config())
    labels = {c.label for c in cert.analytic_conditions}
    assert labels == {"d<1", "r*gamma*a>beta*c*(1-d)"}


def test_boundary_equilibrium_evidence_values():
    # prey-focal evidence at the origin is the closed-form origin growth rate;
    # predator-focal evidence at the prey equilibrium is the product of the
    # two per-season multipliers (the second alone is the tabulated invasion
    # rate, which underestimates the composite multiplier).
    params = AcklehParams()
    rates = ackleh_growth_rates(params)
    cert_n = certify_family("ackleh-composite", "n", fast_config(burn_in=3000))
    assert len(cert_n.evidence) == 1
    assert cert_n.evidence[0].value == pytest.approx(rates.prey_rate, rel=1e-12)
    cert_p = certify_family("ackleh-composite", "p", fast_config(burn_in=3000))
    assert len(cert_p.evidence) == 1
    season_two = params.s_p + (params.kappa / params.s_n) * rates.prey_equilibrium \
        * params.predation(0.0)
    assert cert_p.evidence[0].value == pytest.approx(rates.invasion_rate * season_two,
                                                     rel=1e-12)


def test_certify_food_chain_prey_focal():
    # both predators decay on the prey-extinct plane; the origin repels the
    # prey direction with unit growth rate
    config = CertifyConfig(burn_in=80.0, window=40.0, ic_points_per_axis=2,
                           state_bound=2.0, dt=0.02, boundary_burn_in=120.0,
                           boundary_window=60.0, boundary_seeds=8,
                           window_doubling_check=False)
    cert = certify_family("food-chain-2pred", "x", config)
    assert cert.verdict == CERTIFIED
    assert len(cert.evidence) == 1
    evidence = cert.evidence[0]
    assert evidence.method == "lyapunov_exponent" and evidence.threshold == 0.0
    assert evidence.value == pytest.approx(1.0, abs=1e-12)
    assert any("checked empirically" in note for note in cert.notes)


def test_certify_rejects_decomposition_mismatch():
    family = get_family("din-predprey")
    with pytest.raises(ConfigError):
        certify_family(family, "q", fast_config())


# --- sweeps ----------------------------------------------------------------------

def test_din_agreement_across_theorem_margins():
    # comfortably inside the persistence region: all certified
    config = fast_config()
    inside = parameter_sweep("din-predprey", [VarySpec("d", 0.5, 0.8, 10)], "y", config)
    assert all(row[-1] == CERTIFIED for row in inside.rows)
    # well past the threshold: extinction everywhere
    outside = parameter_sweep("din-predprey", [VarySpec("d", 1.1, 1.5, 10)], "y", config)
    assert all(row[-1] == EXTINCTION for row in outside.rows)


def test_ackleh_kappa_sweep_flips_at_composite_threshold():
    # bisection oracle on the boundary-equilibrium multiplier
    params = AcklehParams()
    rates = ackleh_growth_rates(params)
    f0 = params.predation(0.0)

    def multiplier(kappa):
        return ((params.s_p + kappa / params.s_n * rates.prey_equilibrium * f0)
                * (params.s_p + kappa * rates.prey_equilibrium * f0))

    lo, hi = 0.5, 8.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if multiplier(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    kappa_star = 0.5 * (lo + hi)

    config = fast_config(burn_in=3000, window=1500)
    sweep = parameter_sweep("ackleh-composite", [VarySpec("kappa", 1.0, 4.0, 13)],
                            "p", config)
    extinct = [row[0] for row in sweep.rows if row[-1] == EXTINCTION]
    certified = [row[0] for row in sweep.rows if row[-1] == CERTIFIED]
    assert extinct and certified
    assert max(extinct) < kappa_star < min(certified)
    assert min(certified) - max(extinct) <= 0.25 + 1e-12


def test_sweep_empty_vary_gives_empty_table():
    result = parameter_sweep("din-predprey", [], "y", fast_config())
    assert result.rows == []
    assert result.columns[-2:] == ["eps_hat", "verdict"]


def test_sweep_cell_errors_become_incomplete_rows():
    # d <= 0 violates the parameter range inside the swept grid
    config = fast_config()
    result = parameter_sweep("din-predprey", [VarySpec("d", -0.2, 0.6, 3)], "y", config)
    assert result.rows[0][-1] == INCOMPLETE
    assert math.isnan(result.rows[0][-2])
    assert result.rows[2][-1] == CERTIFIED


def test_sweep_validation():
    with pytest.raises(ConfigError):
        parameter_sweep("din-predprey", [VarySpec("d", 0.5, 1.0, 1)], "y", fast_config())
    with pytest.raises(ConfigError):
        parameter_sweep("din-predprey", [VarySpec("zeta", 0.5, 1.0, 3)], "y", fast_config())
    too_many = [VarySpec("d", 0.5, 1.0, 3)] * 3
    with pytest.raises(ConfigError):
        parameter_sweep("din-predprey", too_many, "y", fast_config())


def test_sweep_thread_count_does_not_change_rows():
    config = fast_config(window=500)
    vary = [VarySpec("d", 0.7, 1.3, 4)]
    serial = parameter_sweep("din-predprey", vary, "y", config, threads=1)
    threaded = parameter_sweep("din-predprey", vary, "y", config, threads=3)
    assert serial.rows == threaded.rows
