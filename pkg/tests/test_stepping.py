import math

import numpy as np
import pytest

from corot2d import Regularization, SimConfig, cfl_dt, make_grid, rk4_step
from corot2d import stepping
from corot2d.fields import State, SymTensor2Field, VectorField2, l2sq, zero_state

from conftest import make_random_state


class TestRK4Step:
    def test_zero_state_fixed_point(self, grid32):
        st = zero_state(grid32)
        out = rk4_step(grid32, st, 1e-2, Regularization.none())
        assert np.max(np.abs(out.v.u1)) == 0.0
        assert np.max(np.abs(out.s.s11)) == 0.0
        assert out.t == 1e-2

    def test_integrating_factor_exact_on_linear_part(self, grid32):
        # v = 0 frozen: a single diffusing stress mode decays exactly
        x, _ = grid32.meshgrid()
        zero = np.zeros(grid32.shape, dtype=complex)
        s = SymTensor2Field(grid32.forward(np.sin(2 * x)), zero, zero.copy())
        st = State(VectorField2(zero.copy(), zero.copy()), s, 0.0)
        eps, dt = 0.9, 0.05
        out = rk4_step(grid32, st, dt, Regularization.diffusive(eps))
        want = s.s11 * math.exp(-eps * 4.0 * dt)  # |k|^2 = 4
        assert np.max(np.abs(out.s.s11 - want)) < 1e-13 * np.max(np.abs(want))
        assert np.max(np.abs(out.v.u1)) < 1e-13

    def test_step_doubling_order(self, grid16):
        # one big step vs two half steps: difference O(dt^5)
        from corot2d.mms import Manufactured
        reg = Regularization.diffusive(0.5)
        mms = Manufactured(grid16, reg, 1.0, 1.0, omega=3.0)
        st = mms.exact_state(0.0)
        errs = []
        for dt in (2e-2, 1e-2):
            big = rk4_step(grid16, st, dt, reg, forcing=mms.forcing)
            half = rk4_step(grid16, st, dt / 2, reg, forcing=mms.forcing)
            half = rk4_step(grid16, half, dt / 2, reg, forcing=mms.forcing)
            errs.append(l2sq(grid16, big.v + (-1.0) * half.v) ** 0.5
                        + l2sq(grid16, big.s + (-1.0) * half.s) ** 0.5)
        order = math.log(errs[0] / errs[1]) / math.log(2.0)
        assert order > 4.5  # local truncation difference scales like dt^5

    def test_explicit_vs_integrating_factor(self, grid16):
        st = make_random_state(grid16, seed=7)
        reg = Regularization.diffusive(0.2)
        dt = 1e-3
        a = b = st
        for _ in range(20):
            a = rk4_step(grid16, a, dt, reg)
            b = rk4_step(grid16, b, dt, reg, explicit_diffusion=True)
        diff = l2sq(grid16, a.s + (-1.0) * b.s) ** 0.5
        assert diff < 1e-9  # same trajectory up to the schemes' dt^4 gap


class TestCFL:
    def test_rest_state_returns_configured_dt(self, grid32):
        assert cfl_dt(grid32, zero_state(grid32), 0.5, 1e-3) == 1e-3

    def test_known_cap(self):
        g = make_grid(2 * math.pi, 2 * math.pi, 64, 64)
        _, y = g.meshgrid()
        v = VectorField2(g.forward(np.sin(y)), g.forward(np.zeros(g.shape)))
        st = State(v, zero_state(g).s, 0.0)
        got = cfl_dt(g, st, 0.5, 1.0)
        want = 0.5 * (2 * math.pi / 64) / 1.0
        assert abs(got - want) < 1e-3 * want

    def test_doubling_resolution_halves_cap(self):
        caps = []
        for n in (32, 64):
            g = make_grid(2 * math.pi, 2 * math.pi, n, n)
            _, y = g.meshgrid()
            v = VectorField2(g.forward(np.sin(y)), g.forward(np.zeros(g.shape)))
            caps.append(cfl_dt(g, State(v, zero_state(g).s, 0.0), 1.0, 10.0))
        assert abs(caps[0] / caps[1] - 2.0) < 1e-6


class TestRun:
    def test_zero_horizon_single_row(self, grid16):
        cfg = SimConfig(n1=16, n2=16, reg=Regularization.none(), t_final=0.0)
        traj = stepping.run(cfg, make_random_state(grid16, seed=1), grid=grid16)
        assert len(traj.rows) == 1
        assert traj.rows[0].t == 0.0
        assert traj.status == "completed"

    def test_rows_strictly_increasing_and_final_time(self, grid16):
        cfg = SimConfig(n1=16, n2=16, reg=Regularization.none(), dt=1e-3,
                        t_final=0.02, diag_every=3)
        traj = stepping.run(cfg, make_random_state(grid16, seed=2), grid=grid16)
        t = traj.column("t")
        assert np.all(np.diff(t) > 0)
        assert abs(t[-1] - 0.02) < 1e-12

    def test_energy_conserved_small_run(self, grid16):
        cfg = SimConfig(n1=16, n2=16, reg=Regularization.none(), dt=1e-3, t_final=0.1)
        traj = stepping.run(cfg, make_random_state(grid16, seed=3), grid=grid16)
        e = traj.column("energy")
        assert abs(e[-1] - e[0]) / e[0] < 1e-9

    def test_diffusive_energy_monotone(self, grid16):
        cfg = SimConfig(n1=16, n2=16, reg=Regularization.diffusive(0.5),
                        dt=1e-3, t_final=0.1, diag_every=10)
        traj = stepping.run(cfg, make_random_state(grid16, seed=4), grid=grid16)
        e = traj.column("energy")
        assert np.all(np.diff(e) <= 1e-12 * e[0])

    def test_determinism_bitwise(self, grid16):
        cfg = SimConfig(n1=16, n2=16, reg=Regularization.diffusive(0.3),
                        dt=1e-3, t_final=0.05, diag_every=5, seed=9)
        runs = []
        for _ in range(2):
            traj = stepping.run(cfg, make_random_state(grid16, seed=9), grid=grid16)
            runs.append([tuple(getattr(r, c) for c in r.__dataclass_fields__)
                         for r in traj.rows])
        assert runs[0] == runs[1]

    def test_blowup_reported_not_raised(self, grid16):
        # explicit treatment of stiff diffusion at a large step is unstable;
        # with the velocity frozen the advective step cap cannot shrink dt,
        # so the iteration overflows and trips the non-finite guard
        st = make_random_state(grid16, seed=5)
        cfg = SimConfig(n1=16, n2=16, reg=Regularization.diffusive(5.0), dt=0.2,
                        t_final=100.0, explicit_diffusion=True, diag_every=1,
                        freeze_velocity=True)
        traj = stepping.run(cfg, st, grid=grid16)
        assert traj.status == "blowup"
        assert traj.blowup_time is not None
        assert all(np.isfinite(r.energy) for r in traj.rows)
        assert traj.final_state is not None and traj.final_state.t == traj.blowup_time

    def test_wrong_grid_rejected(self, grid16, grid32):
        cfg = SimConfig(n1=32, n2=32, reg=Regularization.none())
        with pytest.raises(ValueError):
            stepping.run(cfg, make_random_state(grid16, seed=6), grid=grid32)

    def test_freeze_velocity(self, grid16):
        cfg = SimConfig(n1=16, n2=16, reg=Regularization.diffusive(1.0), dt=1e-3,
                        t_final=0.02, freeze_velocity=True)
        st = make_random_state(grid16, seed=8)
        traj = stepping.run(cfg, st, grid=grid16)
        assert abs(traj.column("v_l2sq")[-1] - traj.column("v_l2sq")[0]) < 1e-14


class TestSimConfigValidation:
    @pytest.mark.parametrize("kwargs", [
        {"dt": 0.0}, {"dt": -1e-3}, {"cfl_safety": 0.0}, {"cfl_safety": 1.5},
        {"diag_every": 0}, {"t_final": -1.0},
    ])
    def test_rejects(self, kwargs):
        base = dict(n1=16, n2=16, reg=Regularization.none())
        base.update(kwargs)
        with pytest.raises(ValueError):
            SimConfig(**base)
