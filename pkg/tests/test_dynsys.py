import math

import numpy as np
import pytest

from persistlab.dynsys import (CONTINUOUS, DISCRETE, FocalDecomposition, ModelSpec,
                               integrate_step, sample_orthant_points, semiflow, simulate,
                               step_discrete, validate_decomposition)
from persistlab.errors import (InconsistentDecomposition, NegativeState, NonFiniteState,
                               StepRejected)
from persistlab.models import (AcklehParams, DinParams, FoodChainParams, ackleh_composite,
                               din_model, food_chain)


def din():
    return din_model(DinParams())


def test_din_origin_fixed():
    model, dec = din()
    assert np.array_equal(step_discrete(model, [0.0, 0.0], dec["y"]), [0.0, 0.0])


def test_din_prey_only_step_hand_value():
    # hand evaluation with y=0: x * exp(r*(1 - x/K)) = exp(1.35) at x=1
    model, dec = din()
    out = step_discrete(model, [1.0, 0.0], dec["y"])
    assert out[1] == 0.0
    assert out[0] == pytest.approx(math.exp(1.35), rel=1e-14)


def test_ackleh_prey_extinct_line_is_squared_survival():
    params = AcklehParams()
    model, dec = ackleh_composite(params)
    for p0 in (0.5, 1.0, 7.3):
        out = step_discrete(model, [0.0, p0], dec["n"])
        assert out[0] == 0.0
        assert out[1] == pytest.approx(params.s_p ** 2 * p0, rel=1e-14)


def test_discrete_builtins_preserve_orthant():
    for model, decs in (din(), ackleh_composite(AcklehParams())):
        for z in sample_orthant_points(model.dim, 200, 20.0, seed=3):
            out = step_discrete(model, z)
            assert np.all(out >= 0.0)
            assert np.all(np.isfinite(out))


def test_boundary_invariance_discrete_bit_exact():
    model, dec = din()
    z = np.array([3.7, 0.0])
    out = semiflow(model, z, 1000, dec["y"])
    assert out[1] == 0.0
    model_a, dec_a = ackleh_composite(AcklehParams())
    out = semiflow(model_a, [0.0, 5.0], 1000, dec_a["n"])
    assert out[0] == 0.0


def test_boundary_invariance_continuous_exact():
    model, decs = food_chain(FoodChainParams())
    out = semiflow(model, [0.5, 0.0, 0.3], 2.0, decs["y"], dt=0.01)
    assert out[1] == 0.0
    assert 0.0 < out[0] <= 1.5


def test_structural_zero_beats_raw_rhs_noise():
    # rhs carries a harmless sub-tolerance perturbation off the focal axis;
    # routing the focal block through A(z)*y keeps the zero exact anyway.
    def rhs(z):
        x, y = float(z[0]), float(z[1])
        return np.array([0.5 * x, 0.9 * y + 1e-300 * x])

    model = ModelSpec("noisy", DISCRETE, 2, rhs, ("x", "y"))
    dec = FocalDecomposition((1,), (0,), lambda z: np.array([[0.9]]),
                             lambda z: np.array([0.5 * float(z[0])]))
    raw = step_discrete(model, [1.0, 0.0])
    routed = step_discrete(model, [1.0, 0.0], dec)
    assert raw[1] != 0.0
    assert routed[1] == 0.0


def test_semigroup_discrete_exact():
    model, dec = din()
    z0 = np.array([2.0, 1.5])
    lhs = semiflow(model, z0, 37, dec["y"])
    rhs = semiflow(model, semiflow(model, z0, 21, dec["y"]), 16, dec["y"])
    assert np.array_equal(lhs, rhs)


def test_semigroup_continuous_at_grid_multiples():
    model, decs = food_chain(FoodChainParams())
    z0 = np.array([0.4, 0.2, 0.1])
    dt = 0.01
    lhs = semiflow(model, z0, 3.0, decs["x"], dt=dt)
    rhs = semiflow(model, semiflow(model, z0, 1.75, decs["x"], dt=dt), 1.25, decs["x"], dt=dt)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * (1.0 + np.max(np.abs(lhs)))


@pytest.mark.parametrize("build,bound", [
    (lambda: din(), 20.0),
    (lambda: ackleh_composite(AcklehParams()), 20.0),
    (lambda: food_chain(FoodChainParams()), 2.0),
])
def test_decomposition_consistency_all_models(build, bound):
    model, decs = build()
    for dec in decs.values():
        validate_decomposition(model, dec, n_points=1000, bound=bound, tol=1e-12)


def test_validate_decomposition_rejects_wrong_cocycle():
    model, dec = din()
    broken = FocalDecomposition(dec["y"].focal_indices, dec["y"].complement_indices,
                                lambda z: np.array([[1.0]]), dec["y"].complement_map)
    with pytest.raises(InconsistentDecomposition):
        validate_decomposition(model, broken, n_points=50)


def test_rk4_matches_logistic_closed_form():
    # prey-only food chain line follows dx/dt = x(1-x) with known solution
    model, decs = food_chain(FoodChainParams())
    x0 = 0.5
    out = semiflow(model, [x0, 0.0, 0.0], 1.0, decs["y"], dt=0.01)
    exact = x0 / (x0 + (1.0 - x0) * math.exp(-1.0))
    assert abs(out[0] - exact) <= 1e-8
    assert out[1] == 0.0 and out[2] == 0.0


def test_food_chain_origin_stays_origin():
    model, decs = food_chain(FoodChainParams())
    out = semiflow(model, [0.0, 0.0, 0.0], 0.5, decs["x"], dt=0.01)
    assert np.array_equal(out, [0.0, 0.0, 0.0])


def test_semiflow_wraps_models_without_flat_evaluators():
    # plain array rhs, no tuple fast path: dx/dt = -x has solution x0 e^{-t}
    model = ModelSpec("decay", CONTINUOUS, 1, lambda z: -z, ("x",))
    out = semiflow(model, [2.0], 1.0, dt=0.01)
    assert out[0] == pytest.approx(2.0 * math.exp(-1.0), abs=1e-9)
    discrete = ModelSpec("half", DISCRETE, 1, lambda z: 0.5 * z, ("x",))
    assert semiflow(discrete, [8.0], 3)[0] == 1.0


def test_semiflow_time_zero_is_identity():
    model, dec = din()
    z0 = np.array([1.2, 3.4])
    assert np.array_equal(semiflow(model, z0, 0, dec["y"]), z0)


def test_din_carrying_capacity_is_exact_fixed_point():
    # x * exp(r*(1 - K/K)) = x * exp(0) = x, bit-exact
    model, dec = din()
    out = semiflow(model, [10.0, 0.0], 100, dec["y"])
    assert np.array_equal(out, [10.0, 0.0])


def test_din_prey_only_converges_to_carrying_capacity():
    # direct-iteration oracle: the prey-only map is a contraction near K for r=1.5
    model, dec = din()
    x = 4.0
    for _ in range(500):
        x = x * math.exp(1.5 * (1.0 - x / 10.0))
    assert abs(x - 10.0) <= 1e-6
    traj = simulate(model, [4.0, 0.0], 500, stride=1, decomposition=dec["y"])
    assert abs(traj.states[-1, 0] - 10.0) <= 1e-6


def test_simulate_row_counts_and_times():
    model, dec = din()
    traj = simulate(model, [1.0, 1.0], 100, stride=7, decomposition=dec["y"])
    assert traj.times[0] == 0
    assert traj.times[-1] >= 100
    assert np.all(np.diff(traj.times) == 7)
    assert len(traj.times) == len(traj.states)


def test_simulate_zero_horizon_single_entry():
    model, dec = din()
    traj = simulate(model, [1.0, 1.0], 0, stride=1)
    assert len(traj) == 1
    assert np.array_equal(traj.states[0], [1.0, 1.0])


def test_ackleh_zero_prey_stays_zero_along_simulation():
    model, dec = ackleh_composite(AcklehParams())
    traj = simulate(model, [0.0, 3.0], 200, stride=1, decomposition=dec["n"])
    assert np.all(traj.states[:, 0] == 0.0)


def test_non_finite_state_raises():
    model = ModelSpec("bad", DISCRETE, 1, lambda z: np.array([math.inf]), ("x",))
    with pytest.raises(NonFiniteState):
        step_discrete(model, [1.0])


def test_negative_state_policy():
    model = ModelSpec("neg", DISCRETE, 1, lambda z: np.array([float(z[0])]), ("x",))
    tiny = ModelSpec("tiny", DISCRETE, 1, lambda z: np.array([-1e-12]), ("x",))
    assert step_discrete(tiny, [1.0])[0] == 0.0
    big = ModelSpec("big", DISCRETE, 1, lambda z: np.array([-1e-6]), ("x",))
    with pytest.raises(NegativeState):
        step_discrete(big, [1.0])


def test_integrate_step_rejects_deep_undershoot():
    model = ModelSpec("down", CONTINUOUS, 1, lambda z: np.array([-100.0]), ("x",))
    with pytest.raises(StepRejected):
        integrate_step(model, [0.0001], 0.5)


def test_integrate_step_validates_dt():
    model, decs = food_chain(FoodChainParams())
    with pytest.raises(ValueError):
        integrate_step(model, [0.1, 0.1, 0.1], 0.9)
    with pytest.raises(ValueError):
        integrate_step(model, [0.1, 0.1, 0.1], 0.0)


def test_discrete_time_must_be_integral():
    model, dec = din()
    with pytest.raises(ValueError):
        semiflow(model, [1.0, 1.0], 2.5)
