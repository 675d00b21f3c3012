"""Manufactured-solution verification.

The exact pair

    v*(x, t) = g(t) (sin y, sin x)
    S*(x, t) = h(t) [[sin x, cos y], [cos y, -sin x]]

is divergence-free, symmetric and trace-free.  Substituting it into the
governing equations gives closed-form source terms (every spatial factor
is a low Fourier mode, so the Laplacian acts as -1 on each component):

    f_v1 = (g' + h) sin y + g^2 sin x cos y - h cos x
    f_v2 = g' sin x + g^2 sin y cos x
    f_s11 = (h' + r) sin x + g h sin y cos x + g h cos^2 y - g h cos x cos y
    f_s12 = (h' + r - g/2) cos y - g h sin x sin y - g h sin x cos y
            + g h sin x cos x - (g/2) cos x
    f_s22 = -f_s11

with r = eps*h for the diffusive regularization, r = eps*h' for the
time-derivative one and r = 0 otherwise.  Note f_s11 carries a nonzero
spatial mean (from cos^2 y): it cancels the mean the corotational term
produces, keeping S* mean-free.  The amplitude laws are
g(t) = amp_v cos(omega t), h(t) = amp_s sin(omega t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import stepping
from .dynamics import KIND_DIFFUSIVE, KIND_TIMEDERIV, Regularization
from .fields import State, SymTensor2Field, VectorField2, l2sq
from .grid import PeriodicGrid
from .stepping import SimConfig


def _require_two_pi(grid: PeriodicGrid) -> None:
    if not (math.isclose(grid.l1, 2 * math.pi) and math.isclose(grid.l2, 2 * math.pi)):
        raise ValueError("manufactured fields need the (0, 2*pi)^2 cell")


def _clean(spec: np.ndarray) -> np.ndarray:
    # the basis functions occupy a handful of exact modes; drop the
    # transform round-off everywhere else so it cannot act as forcing
    out = spec.copy()
    out[np.abs(out) < 1e-12 * np.max(np.abs(out))] = 0.0
    return out


@dataclass(frozen=True)
class Manufactured:
    """Exact fields, forcing and error measurement for one grid/regime."""

    grid: PeriodicGrid
    reg: Regularization
    amp_v: float = 1.0
    amp_s: float = 1.0
    omega: float = 8.0

    def __post_init__(self) -> None:
        _require_two_pi(self.grid)
        x, y = self.grid.meshgrid()
        basis = {
            "sin_x": np.sin(x), "sin_y": np.sin(y),
            "cos_x": np.cos(x), "cos_y": np.cos(y),
            "sinx_cosy": np.sin(x) * np.cos(y),
            "siny_cosx": np.sin(y) * np.cos(x),
            "sinx_siny": np.sin(x) * np.sin(y),
            "sinx_cosx": np.sin(x) * np.cos(x),
            "cosx_cosy": np.cos(x) * np.cos(y),
            "cosy_sq": np.cos(y) ** 2,
        }
        object.__setattr__(self, "_b", {k: _clean(self.grid.forward(v)) for k, v in basis.items()})

    def _gh(self, t: float) -> tuple[float, float, float, float]:
        w = self.omega
        g = self.amp_v * math.cos(w * t)
        h = self.amp_s * math.sin(w * t)
        return g, h, -self.amp_v * w * math.sin(w * t), self.amp_s * w * math.cos(w * t)

    def exact_state(self, t: float) -> State:
        g, h, _, _ = self._gh(t)
        b = self._b
        v = VectorField2(g * b["sin_y"], g * b["sin_x"])
        s = SymTensor2Field(h * b["sin_x"], h * b["cos_y"], -h * b["sin_x"])
        return State(v, s, t)

    def forcing(self, t: float):
        g, h, gp, hp = self._gh(t)
        b = self._b
        if self.reg.kind == KIND_DIFFUSIVE:
            r = self.reg.eps * h
        elif self.reg.kind == KIND_TIMEDERIV:
            r = self.reg.eps * hp
        else:
            r = 0.0
        fv1 = (gp + h) * b["sin_y"] + g * g * b["sinx_cosy"] - h * b["cos_x"]
        fv2 = gp * b["sin_x"] + g * g * b["siny_cosx"]
        fs11 = (
            (hp + r) * b["sin_x"] + g * h * b["siny_cosx"]
            + g * h * b["cosy_sq"] - g * h * b["cosx_cosy"]
        )
        fs12 = (
            (hp + r - 0.5 * g) * b["cos_y"] - g * h * b["sinx_siny"]
            - g * h * b["sinx_cosy"] + g * h * b["sinx_cosx"] - 0.5 * g * b["cos_x"]
        )
        return fv1, fv2, fs11, fs12, -fs11

    def errors(self, state: State) -> tuple[float, float]:
        exact = self.exact_state(state.t)
        ev = l2sq(self.grid, state.v + (-1.0) * exact.v) ** 0.5
        es = l2sq(self.grid, state.s + (-1.0) * exact.s) ** 0.5
        return ev, es


def manufactured_run(config: SimConfig, amp_v: float = 1.0, amp_s: float = 1.0,
                     omega: float = 8.0) -> dict:
    """Run the forced problem and report final-time L2 errors vs the exact
    fields."""
    grid = config.grid()
    mms = Manufactured(grid, config.reg, amp_v, amp_s, omega)
    traj = stepping.run(replace(config, forcing=True), mms.exact_state(0.0),
                        forcing=mms.forcing, grid=grid)
    ev, es = mms.errors(traj.final_state)
    return {
        "n1": config.n1, "n2": config.n2, "dt": config.dt, "t_final": config.t_final,
        "regime": config.reg.kind, "eps": config.reg.eps,
        "err_v": ev, "err_s": es, "err": math.hypot(ev, es),
        "status": traj.status,
    }


def spatial_ladder(reg: Regularization, sizes=(16, 32, 64), dt: float = 2e-4,
                   t_final: float = 0.05, amp_v: float = 1.0, amp_s: float = 1.0,
                   omega: float = 8.0) -> list[dict]:
    """Grid-refinement errors at a fixed small dt.  The exact fields are
    band-limited, so once the resolution retains their modes the error sits
    at the temporal/round-off floor."""
    rows = []
    for n in sizes:
        cfg = SimConfig(n1=n, n2=n, reg=reg, dt=dt, t_final=t_final)
        rows.append(manufactured_run(cfg, amp_v, amp_s, omega))
    for prev, cur in zip(rows, rows[1:]):
        cur["ratio"] = prev["err"] / cur["err"] if cur["err"] > 0 else math.inf
    return rows


def temporal_ladder(reg: Regularization, n: int = 32, dts=(2e-3, 1e-3, 5e-4),
                    t_final: float = 1.0, amp_v: float = 1.0, amp_s: float = 1.0,
                    omega: float = 8.0) -> list[dict]:
    """Step-refinement errors at fixed resolution, with observed orders."""
    rows = []
    for dt in dts:
        cfg = SimConfig(n1=n, n2=n, reg=reg, dt=dt, t_final=t_final)
        rows.append(manufactured_run(cfg, amp_v, amp_s, omega))
    for prev, cur in zip(rows, rows[1:]):
        if cur["err"] > 0 and prev["err"] > 0:
            cur["order"] = math.log(prev["err"] / cur["err"]) / math.log(prev["dt"] / cur["dt"])
        else:
            cur["order"] = math.nan
    return rows
