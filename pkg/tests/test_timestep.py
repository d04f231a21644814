import math

import numpy as np
import pytest

from avalanche_dg import Discretization, Mesh, PhysicalParams, preset
from avalanche_dg.dg import project_initial
from avalanche_dg.runner import initial_depth
from avalanche_dg.timestep import CFLViolation, Stepper, TimeParams, cfl_check, cfl_number, ssp_rk3


def test_zero_operator_is_fixed_point(rng):
    u = rng.normal(size=(2, 3, 17))
    out = ssp_rk3(u, 0.37, lambda v: np.zeros_like(v))
    np.testing.assert_array_equal(out, u)


def test_third_order_on_decay():
    errs = []
    dts = [0.2, 0.1, 0.05, 0.025]
    for dt in dts:
        u1 = ssp_rk3(np.array(1.0), dt, lambda v: -v)
        errs.append(abs(float(u1) - math.exp(-dt)))
    ratios = [errs[i] / errs[i + 1] for i in range(3)]
    # local error is O(dt^4): halving dt divides it by about 16
    assert all(14.0 < r < 17.0 for r in ratios), ratios
    # leading term is dt^4 / 24
    assert errs[-1] == pytest.approx(dts[-1] ** 4 / 24.0, rel=0.05)


def test_linear_operator_reproduces_taylor_polynomial(rng):
    a = rng.normal(size=(4, 4))
    u = rng.normal(size=4)
    dt = 0.3
    out = ssp_rk3(u, dt, lambda v: a @ v)
    b = dt * a
    taylor = u + b @ u + b @ b @ u / 2.0 + b @ b @ b @ u / 6.0
    np.testing.assert_allclose(out, taylor, rtol=1e-13, atol=1e-13)


def test_shu_osher_weights():
    # explicit convex form on a nonlinear scalar ODE
    f = lambda v: np.sin(v) - v**2
    u, dt = np.array(0.4), 0.1
    u1 = u + dt * f(u)
    u2 = 0.75 * u + 0.25 * (u1 + dt * f(u1))
    u3 = u / 3.0 + 2.0 / 3.0 * (u2 + dt * f(u2))
    assert float(ssp_rk3(u, dt, f)) == pytest.approx(float(u3), abs=1e-15)


def test_post_applied_after_each_stage():
    calls = []
    ssp_rk3(np.array(1.0), 0.1, lambda v: v, post=lambda v: calls.append(float(v)) or v)
    assert len(calls) == 3


def _disc(**kw):
    return Discretization(Mesh(30.0, 256), PhysicalParams(**kw))


def test_cfl_vacuum():
    d = _disc()
    c, bad = cfl_check(np.zeros((2, 3, 256)), d, 0.001)
    assert c == 0.0 and not bad


def test_cfl_single_cell_violation():
    d = Discretization(Mesh(3.0, 3), PhysicalParams(zeta0=0.0, epsilon=0.0))
    field = np.zeros((2, 3, 3))
    field[0, 0, 1] = 1.0
    field[1, 0, 1] = 3.0  # |u| = 3 on a unit cell
    c, bad = cfl_check(field, d, 0.1)
    assert c == pytest.approx(0.3)
    assert bad
    c, bad = cfl_check(field, d, 0.05)
    assert not bad


def test_cfl_initial_pile_below_limit():
    d = _disc()
    field = project_initial(initial_depth(preset(1).initial), d.mesh)
    c = cfl_number(field, d, 0.001)
    k = 5.0 / 3.0
    expected = math.sqrt(1.85 / 30 * math.cos(math.radians(35)) * k * field[0, 0].max()) / d.mesh.dx * 0.001
    assert c == pytest.approx(expected, rel=1e-12)
    assert c < 0.2


def test_strict_cfl_raises():
    d = _disc()
    field = project_initial(initial_depth(preset(1).initial), d.mesh)
    st = Stepper(d, TimeParams(dt=0.1, strict_cfl=True))
    with pytest.raises(CFLViolation):
        st.step(field)


def test_loose_cfl_warns_once(caplog):
    d = _disc()
    field = project_initial(initial_depth(preset(1).initial), d.mesh)
    st = Stepper(d, TimeParams(dt=0.08))
    with caplog.at_level("WARNING"):
        for _ in range(3):
            field = st.step(field)
    assert caplog.text.count("CFL number") == 1


def test_time_params_validation():
    with pytest.raises(ValueError):
        TimeParams(dt=0.0)
    with pytest.raises(ValueError):
        TimeParams(cfl_limit=1.5)
    assert TimeParams().cfl_limit == pytest.approx(0.2)


def test_backends_agree_over_many_steps():
    d = _disc()
    field = project_initial(initial_depth(preset(2).initial), d.mesh)
    a = Stepper(d, backend="numpy")
    b = Stepper(d, backend="compiled")
    fa, fb = a.prepare(field.copy()), b.prepare(field.copy())
    for _ in range(300):
        fa, fb = a.step(fa), b.step(fb)
    np.testing.assert_allclose(fb, fa, rtol=0, atol=1e-13)
    np.testing.assert_array_equal(a.flags.m_stop, b.flags.m_stop)
    np.testing.assert_array_equal(a.flags.wetness, b.flags.wetness)


def test_unknown_backend():
    with pytest.raises(ValueError):
        Stepper(_disc(), backend="gpu")
