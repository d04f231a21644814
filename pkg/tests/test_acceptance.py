"""End-to-end acceptance checks, one PASS/FAIL line per criterion.

The four chute cases are run once per session at full resolution
(N = 256, dt = 0.001, t = 0..48), about 8 s each with the compiled kernels.
"""

import math

import numpy as np
import pytest

from avalanche_dg import Discretization, Mesh, PhysicalParams, Simulation, dg, preset
from avalanche_dg.geometry import to_physical
from avalanche_dg.limiter import LimiterParams, minmod
from avalanche_dg.physics import flux
from avalanche_dg.stopping import StoppingParams
from avalanche_dg.timestep import Stepper, TimeParams

from conftest import ACCEPTANCE_LINES

REST = 1e-3


def report(n, label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {label} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="session")
def cases():
    return {c: Simulation(preset(c)).run() for c in (1, 2, 3, 4)}


def _final(summary, series):
    assert summary.times[-1] == pytest.approx(48.0)
    return getattr(summary, series)[-1]


def _steady_by(summary, t):
    return all(s < REST for tt, s in zip(summary.times, summary.max_speed) if tt >= t)


def test_criterion_1_case_one_depth(cases):
    s = cases[1]
    h, u = _final(s, "max_depth"), _final(s, "max_speed")
    report(1, "case I max depth in [2.25, 2.75] and at rest at t=48",
           2.25 <= h <= 2.75 and u < REST, f"max h={h:.4f}, max|u|={u:.2e}")


def test_criterion_2_case_two(cases):
    s1, s2 = cases[1], cases[2]
    h = _final(s2, "max_depth")
    steady = _steady_by(s2, 24.0)
    f1, f2 = _final(s1, "front"), _final(s2, "front")
    report(2, "case II max depth in [1.6, 2.0], steady by t=24, run-out beyond case I",
           1.6 <= h <= 2.0 and steady and f2 > f1,
           f"max h={h:.4f}, steady since t={s2.steady_since()}, front {f2:.3f} vs {f1:.3f}")


def test_criterion_3_case_three_ordinal(cases):
    h1, h2, h3 = (_final(cases[c], "max_depth") for c in (1, 2, 3))
    report(3, "internal friction changes the deposit less than bed friction, and lowers it",
           abs(h3 - h1) < abs(h2 - h1) and h3 <= h1,
           f"|III-I|={abs(h3 - h1):.4f}, |II-I|={abs(h2 - h1):.4f}, III={h3:.4f}, I={h1:.4f}")


def test_criterion_4_case_four_ordinal(cases):
    s1, s4 = cases[1], cases[4]
    steady = _steady_by(s4, 24.0)
    f1, f4 = _final(s1, "front"), _final(s4, "front")
    h1, h4 = _final(s1, "max_depth"), _final(s4, "max_depth")
    report(4, "case IV steady by t=24, longer run-out and taller deposit than case I",
           steady and f4 > f1 and h4 > h1,
           f"steady since t={s4.steady_since()}, front {f4:.3f} vs {f1:.3f}, max h {h4:.4f} vs {h1:.4f}")


@pytest.mark.parametrize("case", [1, 2, 3, 4])
def test_criterion_5_mass(cases, case):
    s = cases[case]
    m0 = s.mass[0]
    drift = max(abs(m - m0) for m in s.mass)
    clamp = s.clamped_mass / m0
    ok = drift / m0 <= 1e-12 + clamp and clamp < 1e-10
    report(5, f"case {case} mass conserved", ok, f"max rel drift={drift / m0:.1e}, clamp={clamp:.1e}")


def _standing_pile(height, stopping, steps=10_000):
    p = PhysicalParams()
    mesh = Mesh(30.0, 256)
    disc = Discretization(mesh, p)
    pile = dg.project_initial(lambda x: height * np.clip(1.0 - ((x - 26.0) / 3.0) ** 2, 0.0, None), mesh)
    stepper = Stepper(disc, TimeParams(), LimiterParams(), stopping)
    field = stepper.prepare(pile)
    start = field.copy()
    wet = stepper.flags.wetness > 0
    assert np.all(stepper.flags.m_stop[wet] == 0), "pile must start in repose"
    assert mesh.centers[wet].min() > p.x_trans_end
    for _ in range(steps):
        field = stepper.step(field)
    dh = np.abs(field[0] - start[0]).max()
    return dh, np.abs(field[1]).max(), stepper.flags.m_stop.max()


def test_criterion_6_default_gate():
    # the default u_stop = 1e-6 gate admits piles whose one-stage speed stays below it
    dh, q, tags = _standing_pile(0.01, StoppingParams())
    report(6, "standing pile bit-identical for 10,000 steps (default repose gate, 1 cm pile)",
           dh == 0.0 and q == 0.0 and tags == 0, f"max|dh|={dh:.1e}, max|q|={q:.1e}")


def test_criterion_6_holding_resting_cells():
    dh, q, tags = _standing_pile(1.0, StoppingParams(hold_resting=True))
    report(6, "standing pile bit-identical for 10,000 steps (hold_resting, unit-height pile)",
           dh == 0.0 and q == 0.0 and tags == 0, f"max|dh|={dh:.1e}, max|q|={q:.1e}")


def _convergence(limiter):
    p = PhysicalParams(zeta0=0.0, phi=0.0, delta=0.0)
    t_end = 6.0
    runs = {}
    for n in (64, 128, 256):
        mesh = Mesh(30.0, n)
        dt = 0.15 * 64 / n  # CFL about 0.084 on every mesh
        st = Stepper(Discretization(mesh, p), TimeParams(dt=dt), limiter)
        f = st.prepare(dg.project_initial(lambda x: 1.0 + 0.1 * np.tanh((x - 15.0) / 3.0), mesh))
        for _ in range(int(round(t_end / dt))):
            f = st.step(f)
        runs[n] = (mesh, f[0, 0])

    def err(n):
        mesh, coarse = runs[n]
        fine = runs[2 * n][1].reshape(-1, 2).mean(axis=1)
        window = (mesh.centers > 8.0) & (mesh.centers < 22.0)
        return np.sum(np.abs(coarse - fine)[window]) * mesh.dx

    e1, e2 = err(64), err(128)
    return math.log2(e1 / e2), e1, e2


@pytest.mark.parametrize("label, limiter", [("limiter off", LimiterParams(enabled=False)), ("gamma=1", LimiterParams(gamma=1.0))])
def test_criterion_7_self_convergence(label, limiter):
    order, e1, e2 = _convergence(limiter)
    report(7, f"L1 self-convergence order >= 2.5 ({label})", order >= 2.5,
           f"order={order:.2f}, errors {e1:.2e} -> {e2:.2e}")


def test_criterion_8_unit_oracles():
    checks = {
        "minmod": minmod(1, 2, 3) == 1 and minmod(1, -2, 3) == 0 and minmod(-0.5, -2, -1) == -0.5,
        "gauss": np.allclose(dg.GAUSS_NODES, [-math.sqrt(0.6), 0, math.sqrt(0.6)], atol=1e-12, rtol=0)
        and np.allclose(dg.GAUSS_WEIGHTS, [5 / 18, 8 / 18, 5 / 18], atol=1e-12, rtol=0),
        "mass matrix": np.allclose(np.diag(dg.mass_matrix(2, 1.0)), [1, 1 / 3, 1 / 5], atol=1e-12, rtol=0),
        "basis ends": all(
            abs(dg.basis_eval(m, 1.0, 0.5, 1.0) - 1) < 1e-12 and abs(dg.basis_eval(m, 0.0, 0.5, 1.0) - (-1) ** m) < 1e-12
            for m in range(3)
        ),
        "llf": np.allclose(dg.llf_flux(1.3, 0.4, 1.3, 0.4, 0.2, 0.2), flux(1.3, 0.4, 0.2), atol=1e-12, rtol=0)
        and np.allclose(dg.llf_flux(1.0, 0.0, 0.0, 0.0, 1.0, 1.0), (0.5, 0.25), atol=1e-12, rtol=0),
    }
    p = PhysicalParams()
    seams = []
    for x in (17.5, 21.5):
        a, b = to_physical(np.nextafter(x, 0.0), 1.0, p), to_physical(x, 1.0, p)
        seams.append(max(abs(float(u) - float(v)) for u, v in zip(a, b)))
    checks["seams"] = max(seams) < 1e-12
    failed = [k for k, ok in checks.items() if not ok]
    report(8, "unit oracles", not failed, "all match" if not failed else f"failed: {failed}")


@pytest.mark.parametrize("case", [1, 2, 3, 4])
def test_front_does_not_retreat_before_steady_state(cases, case):
    s = cases[case]
    steady = s.steady_since() or s.times[-1]
    front = [f for t, f in zip(s.times, s.front) if t <= steady]
    assert np.all(np.diff(front) >= 0.0)
