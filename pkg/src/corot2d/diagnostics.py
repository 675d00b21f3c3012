"""Monitored functionals: energies, a priori bound curves, the logarithmic
Sobolev inequality lab and the third-derivative coupling monitor.

A :class:`DiagRecord` is one sampled row of every monitored quantity; the
run loop emits them and :class:`Trajectory` collects them together with the
termination status.  Bound monitors (:func:`theorem_bounds`) compare the
recorded quantities X = ||grad v||^2 + ||grad S||^2 and
Y_e = e + X + ||lap S||^2 against the closed-form envelopes they are
expected to stay below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields as dc_fields

import numpy as np

from . import dynamics
from .dynamics import Regularization
from .fields import (
    State,
    SymTensor2Field,
    VectorField2,
    dksq,
    h1sq,
    h2sq,
    l2sq,
    linf,
    max_abs_trace,
    mean_components,
    vorticity,
)
from .grid import PeriodicGrid


@dataclass(frozen=True)
class DiagRecord:
    """One sampled row of all monitored functionals."""

    t: float
    v_l2sq: float
    s_l2sq: float
    grad_v_l2sq: float
    grad_s_l2sq: float
    lap_s_l2sq: float
    s_linf: float
    energy: float              # ||v||^2 + ||S||^2
    energy_i: float            # energy + eps*||grad S||^2
    energy_ii_residual: float  # energy + 2*eps*int ||grad S||^2 - energy(0)
    xi_integral: float
    x_grad: float              # ||grad v||^2 + ||grad S||^2
    y_e: float                 # e + x_grad + ||lap S||^2
    appendix_b: float
    d3v_l2: float
    d3s_l2: float
    mean_s11: float
    mean_s12: float
    mean_s22: float
    max_abs_trace_s: float
    dvdt_dual: float


DIAG_COLUMNS: tuple[str, ...] = tuple(f.name for f in dc_fields(DiagRecord))


@dataclass(frozen=True)
class SpectrumSample:
    """Spectral snapshot used by truncation-comparison studies."""

    t: float
    v1: np.ndarray
    v2: np.ndarray
    s11: np.ndarray
    s12: np.ndarray
    s22: np.ndarray


@dataclass
class Trajectory:
    rows: list[DiagRecord] = field(default_factory=list)
    status: str = "completed"          # completed | blowup
    blowup_time: float | None = None
    final_state: State | None = None
    spectra: list[SpectrumSample] | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


# -- scalar helpers ---------------------------------------------------------


def ln_plus(x: float) -> float:
    """1 below e, ln x from e on; continuous at e and >= 1 everywhere."""
    if x < 0:
        raise ValueError("ln_plus needs x >= 0")
    return 1.0 if x < math.e else math.log(x)


def dual_w12_norm(grid: PeriodicGrid, w1: np.ndarray, w2: np.ndarray) -> float:
    """Dual (W^{1,2})* norm of a mean-zero divergence-free field, exact in
    the Fourier basis: sup over the retained modes of <w, phi>/||phi||_W12."""
    mag = (np.abs(w1) ** 2 + np.abs(w2) ** 2) / (1.0 + grid.ksq)
    return float(np.sqrt(np.sum(mag) * grid.spec_weight))


# -- per-sample record -------------------------------------------------------


def compute_record(
    grid: PeriodicGrid,
    state: State,
    reg: Regularization,
    energy0: float | None,
    diss_integral: float = 0.0,
    dvdt_dual: float = 0.0,
    forcing=None,
    dealias: bool = True,
) -> DiagRecord:
    v, s = state.v, state.s
    v2 = l2sq(grid, v)
    s2 = l2sq(grid, s)
    gv2 = h1sq(grid, v)
    gs2 = h1sq(grid, s)
    ls2 = h2sq(grid, s)
    energy = v2 + s2
    if energy0 is None:
        energy0 = energy
    parts = dynamics.tendency_parts(grid, state, reg, forcing, dealias)
    _, xi_int = dynamics.dissipation_rate(grid, state, parts, dealias)
    b, d3v, d3s = appendix_monitor(grid, state)
    m11, m12, m22 = mean_components(grid, s)
    return DiagRecord(
        t=state.t,
        v_l2sq=v2,
        s_l2sq=s2,
        grad_v_l2sq=gv2,
        grad_s_l2sq=gs2,
        lap_s_l2sq=ls2,
        s_linf=linf(grid, s),
        energy=energy,
        energy_i=energy + reg.eps * gs2 if reg.kind == dynamics.KIND_TIMEDERIV else energy,
        energy_ii_residual=energy + diss_integral - energy0,
        xi_integral=xi_int,
        x_grad=gv2 + gs2,
        y_e=math.e + gv2 + gs2 + ls2,
        appendix_b=b,
        d3v_l2=d3v,
        d3s_l2=d3s,
        mean_s11=m11,
        mean_s12=m12,
        mean_s22=m22,
        max_abs_trace_s=max_abs_trace(grid, s),
        dvdt_dual=dvdt_dual,
    )


# -- logarithmic Sobolev lab --------------------------------------------------


def brezis_gallouet_ratio(grid: PeriodicGrid, spec: np.ndarray) -> float:
    """||f||_inf / (1 + ||grad f||_2 * sqrt(ln+ ||f||_W22))."""
    a = l2sq(grid, spec)
    b = h1sq(grid, spec)
    c = h2sq(grid, spec)
    w22 = (a + b + c) ** 0.5
    denom = 1.0 + b**0.5 * ln_plus(w22) ** 0.5
    return linf(grid, spec) / denom


def fourier_split_bound(grid: PeriodicGrid, spec: np.ndarray, radius: float) -> tuple[float, float]:
    """Split the coefficient l1-sum at |k| = radius.

    Returns (low, high) with low = sum_{|k|<R} |c_k| and
    high = sum_{|k|>=R} |c_k| over Fourier-series coefficients c_k; their
    total dominates ||f||_inf by the triangle inequality.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    coeff = np.abs(spec) / (grid.n1 * grid.n2)
    kmag = np.sqrt(grid.ksq)
    low = float(np.sum(coeff[kmag < radius]))
    high = float(np.sum(coeff[kmag >= radius]))
    return low, high


def fourier_split_certificate(grid: PeriodicGrid, spec: np.ndarray) -> dict:
    """Certified sup-norm bound via the split at R = ||f||_W22.

    Applies Cauchy-Schwarz on each half with the lattice weights
    (1+|k|)^-2 below R and (1+|k|^2)^-2 above, mirroring the mechanism
    that yields the logarithmic inequality; every quantity is a finite sum,
    so the chain ||f||_inf <= low+high <= cs_low+cs_high is checkable
    exactly.
    """
    a = l2sq(grid, spec)
    b = h1sq(grid, spec)
    c = h2sq(grid, spec)
    radius = (a + b + c) ** 0.5
    coeff = np.abs(spec) / (grid.n1 * grid.n2)
    kmag = np.sqrt(grid.ksq)
    lowm = kmag < radius
    highm = ~lowm
    cs_low = float(
        np.sqrt(np.sum(((1.0 + kmag[lowm]) * coeff[lowm]) ** 2))
        * np.sqrt(np.sum((1.0 + kmag[lowm]) ** -2.0))
    )
    cs_high = float(
        np.sqrt(np.sum(((1.0 + kmag[highm] ** 2) * coeff[highm]) ** 2))
        * np.sqrt(np.sum((1.0 + kmag[highm] ** 2) ** -2.0))
    )
    low, high = fourier_split_bound(grid, spec, radius)
    return {
        "radius": radius,
        "low": low,
        "high": high,
        "cs_low": cs_low,
        "cs_high": cs_high,
        "linf": linf(grid, spec),
    }


# -- third-derivative coupling monitor ----------------------------------------


def appendix_monitor(grid: PeriodicGrid, state: State, order: int = 3) -> tuple[float, float, float]:
    """B = (1/2) int (D^m omega) St : (D^m S) dx, all mixed derivatives of
    order m summed with multiplicity, St the rotated stress
    [[2 S12, S22 - S11], [S22 - S11, -2 S12]].

    Also returns ||D^m v||_2 and ||D^m S||_2.  B vanishes identically when
    S is a pointwise multiple of the identity or the flow is irrotational.
    """
    if not 1 <= order <= 3:
        raise ValueError("order must be in 1..3")
    s = state.s
    omega_h = vorticity(grid, state.v)
    st11 = 2.0 * s.s12
    st12 = s.s22 - s.s11
    # derivative stacks per multi-index (a1, a2), a1 + a2 = order
    specs: list[np.ndarray] = [st11, st12]
    multi = []
    for a1 in range(order, -1, -1):
        a2 = order - a1
        multi.append(math.comb(order, a1))
        for base in (omega_h, s.s11, s.s12, s.s22):
            d = base
            if a1:
                d = grid.derivative(d, 1, a1)
            if a2:
                d = grid.derivative(d, 2, a2)
            specs.append(d)
    phys = grid.to_phys_pad(np.stack(specs))
    pst11, pst12 = phys[0], phys[1]
    pst22 = -pst11
    total = 0.0
    for j, mult in enumerate(multi):
        dw, d11, d12, d22 = phys[2 + 4 * j: 6 + 4 * j]
        contraction = pst11 * d11 + 2.0 * pst12 * d12 + pst22 * d22
        total += mult * grid.integral_pad(dw * contraction)
    d3v = dksq(grid, state.v, order) ** 0.5
    d3s = dksq(grid, s, order) ** 0.5
    return 0.5 * total, d3v, d3s


# -- a priori bound monitors ---------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    which: str                 # thm1 | thm2
    c0: float | None
    x0: float
    y_e0: float
    horizon: float | None      # 1/(c0 X0), thm2 only
    small_data_ok: bool | None  # X0 < c0^(-1/2), thm2 only
    max_ratio: float           # worst observed/predicted over the samples
    satisfied: bool
    t: np.ndarray
    observed: np.ndarray
    curve: np.ndarray

    def __repr__(self) -> str:  # keep array fields out of reprs
        return (
            f"BoundReport(which={self.which!r}, c0={self.c0}, x0={self.x0:.6g}, "
            f"horizon={self.horizon}, small_data_ok={self.small_data_ok}, "
            f"max_ratio={self.max_ratio:.6g}, satisfied={self.satisfied})"
        )


def fit_riccati_constant(traj: Trajectory, floor: float = 1e-8) -> float:
    """Smallest c0 with dX/dt + ||lap S||^2 <= c0 X^2 along the samples.

    dX/dt uses centered differences on the diagnostic samples, one-sided
    at the endpoints.  Samples with negligible X are skipped; on pure-decay
    trajectories where every ratio is negative the floor is returned.
    """
    t = traj.column("t")
    x = traj.column("x_grad")
    y = traj.column("lap_s_l2sq")
    if len(t) < 2:
        return floor
    dxdt = np.gradient(x, t)
    scale = max(float(np.max(x)), 1.0)
    good = x**2 > (1e-14 * scale) ** 2
    if not np.any(good):
        return floor
    ratios = (dxdt[good] + y[good]) / x[good] ** 2
    return max(float(np.max(ratios)), floor)


def theorem_bounds(traj: Trajectory, which: str, c0: float | None = None) -> BoundReport:
    """Evaluate the a priori envelope for the matching regularized regime.

    thm1 (timederiv): Y_e(t) <= exp(ln(Y_e(0)) * exp(2t)).
    thm2 (diffusive): X(t) <= X(0)/(1 - c0 t X(0)) before the horizon
    1/(c0 X(0)); with small data additionally X(t) <= 2X(0)/(1 - c0 X(0)).
    c0 is fitted from the trajectory unless supplied.
    """
    t = traj.column("t")
    if which == "thm1":
        ye = traj.column("y_e")
        log_curve = math.log(ye[0]) * np.exp(2.0 * t)
        ratio = float(np.max(np.log(ye) / log_curve))
        curve = np.exp(np.minimum(log_curve, 700.0))
        return BoundReport(
            which="thm1", c0=None, x0=float(traj.column("x_grad")[0]), y_e0=float(ye[0]),
            horizon=None, small_data_ok=None, max_ratio=ratio,
            satisfied=bool(np.all(np.log(ye) <= log_curve * (1.0 + 1e-12))),
            t=t, observed=ye, curve=curve,
        )
    if which != "thm2":
        raise ValueError("which must be 'thm1' or 'thm2'")
    x = traj.column("x_grad")
    x0 = float(x[0])
    if c0 is None:
        c0 = fit_riccati_constant(traj)
    horizon = math.inf if c0 * x0 <= 0 else 1.0 / (c0 * x0)
    small = x0 < c0 ** (-0.5)
    denom = 1.0 - c0 * t * x0
    with np.errstate(divide="ignore"):
        curve = np.where(denom > 0, x0 / np.maximum(denom, 1e-300), np.inf)
    before = t < horizon
    obs_ratio = np.zeros_like(t)
    obs_ratio[before] = x[before] / np.maximum(curve[before], 1e-300)
    max_ratio = float(np.max(obs_ratio)) if np.any(before) else 0.0
    return BoundReport(
        which="thm2", c0=c0, x0=x0, y_e0=float(traj.column("y_e")[0]),
        horizon=horizon, small_data_ok=bool(small), max_ratio=max_ratio,
        satisfied=bool(max_ratio <= 1.0 + 1e-12),
        t=t, observed=x, curve=curve,
    )


def small_data_bound(traj: Trajectory, c0: float) -> tuple[float, float]:
    """(bound, max observed X) for the small-data envelope 2X(0)/(1-c0 X(0))."""
    x = traj.column("x_grad")
    x0 = float(x[0])
    if c0 * x0 >= 1.0:
        return math.inf, float(np.max(x))
    return 2.0 * x0 / (1.0 - c0 * x0), float(np.max(x))


# -- dual-norm surrogate -------------------------------------------------------


@dataclass(frozen=True)
class DualNormReport:
    a_priori_bound: float    # C sqrt(T) (max||v|| max||grad v|| + max||S||)
    fd_l2_in_time: float     # discrete L2-in-time of the sampled dual norms
    fd_max: float


def dual_norm_estimate(traj: Trajectory, constant: float = 1.0) -> DualNormReport:
    """Compare the trajectory-maxima bound for ||dv/dt|| in the dual space
    against the finite-difference, basis-restricted estimate recorded at
    the samples.  The two surrogates are reported side by side; no claim
    is made that they coincide."""
    if len(traj.rows) < 2:
        raise ValueError("need at least two samples")
    t = traj.column("t")
    horizon = float(t[-1] - t[0])
    vmax = float(np.max(np.sqrt(traj.column("v_l2sq"))))
    gvmax = float(np.max(np.sqrt(traj.column("grad_v_l2sq"))))
    smax = float(np.max(np.sqrt(traj.column("s_l2sq"))))
    bound = constant * horizon**0.5 * (vmax * gvmax + smax)
    duals = traj.column("dvdt_dual")[1:]
    dts = np.diff(t)
    fd_l2 = float(np.sqrt(np.sum(duals**2 * dts)))
    return DualNormReport(a_priori_bound=bound, fd_l2_in_time=fd_l2, fd_max=float(np.max(duals)))
