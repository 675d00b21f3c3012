"""Velocity / stress field containers, kinematic operators and norms.

Fields are stored as complex DFT coefficient arrays on a
:class:`~corot2d.grid.PeriodicGrid`; physical samples are produced on
demand.  Tensor quantities use the Frobenius pairing throughout, so the
off-diagonal component of a symmetric 2x2 tensor counts twice in every
norm and inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import PeriodicGrid


@dataclass(frozen=True)
class VectorField2:
    """Velocity field; components are spectral coefficient arrays."""

    u1: np.ndarray
    u2: np.ndarray

    def __add__(self, other: "VectorField2") -> "VectorField2":
        return VectorField2(self.u1 + other.u1, self.u2 + other.u2)

    def __mul__(self, a: float) -> "VectorField2":
        return VectorField2(self.u1 * a, self.u2 * a)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SymTensor2Field:
    """Symmetric 2x2 tensor field stored as three spectral components."""

    s11: np.ndarray
    s12: np.ndarray
    s22: np.ndarray

    def __add__(self, other: "SymTensor2Field") -> "SymTensor2Field":
        return SymTensor2Field(self.s11 + other.s11, self.s12 + other.s12, self.s22 + other.s22)

    def __mul__(self, a: float) -> "SymTensor2Field":
        return SymTensor2Field(self.s11 * a, self.s12 * a, self.s22 * a)

    __rmul__ = __mul__

    def trace(self) -> np.ndarray:
        return self.s11 + self.s22


@dataclass(frozen=True)
class State:
    """Snapshot (v, S, t) advanced by the integrator."""

    v: VectorField2
    s: SymTensor2Field
    t: float


def zero_state(grid: PeriodicGrid, t: float = 0.0) -> State:
    z = np.zeros(grid.shape, dtype=complex)
    return State(VectorField2(z.copy(), z.copy()), SymTensor2Field(z.copy(), z.copy(), z.copy()), t)


# -- kinematics ----------------------------------------------------------


def sym_grad(grid: PeriodicGrid, v: VectorField2) -> SymTensor2Field:
    """Symmetric velocity gradient D_ij = (d_j v_i + d_i v_j)/2."""
    d11 = grid.derivative(v.u1, 1)
    d22 = grid.derivative(v.u2, 2)
    d12 = 0.5 * (grid.derivative(v.u1, 2) + grid.derivative(v.u2, 1))
    return SymTensor2Field(d11, d12, d22)


def vorticity(grid: PeriodicGrid, v: VectorField2) -> np.ndarray:
    """omega = d v1/dx2 - d v2/dx1; the spin tensor is
    W = [[0, -omega/2], [omega/2, 0]]."""
    return grid.derivative(v.u1, 2) - grid.derivative(v.u2, 1)


def div_tensor(grid: PeriodicGrid, s: SymTensor2Field) -> VectorField2:
    f1 = grid.derivative(s.s11, 1) + grid.derivative(s.s12, 2)
    f2 = grid.derivative(s.s12, 1) + grid.derivative(s.s22, 2)
    return VectorField2(f1, f2)


# -- norms ----------------------------------------------------------------


@dataclass(frozen=True)
class FieldNorms:
    l2: float
    l4: float
    linf: float
    h1: float       # seminorm ||grad f||_2
    h2: float       # seminorm over all second derivatives
    w22: float      # (l2^2 + h1^2 + h2^2)^(1/2)


def _components(f) -> list[tuple[np.ndarray, float]]:
    """(spectral component, Frobenius multiplicity) pairs."""
    if isinstance(f, VectorField2):
        return [(f.u1, 1.0), (f.u2, 1.0)]
    if isinstance(f, SymTensor2Field):
        return [(f.s11, 1.0), (f.s12, 2.0), (f.s22, 1.0)]
    return [(f, 1.0)]


def l2sq(grid: PeriodicGrid, f) -> float:
    w = grid.spec_weight
    return float(sum(m * np.sum(np.abs(c) ** 2) for c, m in _components(f)) * w)


def h1sq(grid: PeriodicGrid, f) -> float:
    w = grid.spec_weight
    return float(sum(m * np.sum(grid.ksq * np.abs(c) ** 2) for c, m in _components(f)) * w)


def h2sq(grid: PeriodicGrid, f) -> float:
    # sum over all mixed second derivatives equals the |k|^4 multiplier
    w = grid.spec_weight
    return float(sum(m * np.sum(grid.ksq**2 * np.abs(c) ** 2) for c, m in _components(f)) * w)


def dksq(grid: PeriodicGrid, f, order: int) -> float:
    """Squared L2 norm of all order-th derivatives (|k|^(2*order) multiplier)."""
    w = grid.spec_weight
    return float(sum(m * np.sum(grid.ksq**order * np.abs(c) ** 2) for c, m in _components(f)) * w)


def pointwise_magnitude_pad(grid: PeriodicGrid, f) -> np.ndarray:
    """|f|(x) on the 3/2-padded physical grid (Frobenius for tensors)."""
    acc = None
    for c, m in _components(f):
        p = grid.to_phys_pad(c)
        acc = m * p * p if acc is None else acc + m * p * p
    return np.sqrt(acc)


def linf(grid: PeriodicGrid, f) -> float:
    return float(np.max(pointwise_magnitude_pad(grid, f)))


def l4(grid: PeriodicGrid, f) -> float:
    mag = pointwise_magnitude_pad(grid, f)
    return float(np.sum(mag**4) * grid.pad_cell_weight) ** 0.25


def norms(grid: PeriodicGrid, f) -> FieldNorms:
    """All norms used by the a priori estimates.

    L2/H1/H2 come from Parseval sums; L4 and Linf are sampled on the
    3/2-padded physical grid so the norms themselves are alias-free.
    """
    a = l2sq(grid, f)
    b = h1sq(grid, f)
    c = h2sq(grid, f)
    return FieldNorms(
        l2=a**0.5,
        l4=l4(grid, f),
        linf=linf(grid, f),
        h1=b**0.5,
        h2=c**0.5,
        w22=(a + b + c) ** 0.5,
    )


def mean_components(grid: PeriodicGrid, s: SymTensor2Field) -> tuple[float, float, float]:
    n = grid.n1 * grid.n2
    return (
        float(s.s11[0, 0].real) / n,
        float(s.s12[0, 0].real) / n,
        float(s.s22[0, 0].real) / n,
    )


def max_abs_trace(grid: PeriodicGrid, s: SymTensor2Field) -> float:
    return float(np.max(np.abs(grid.to_phys_pad(s.trace()))))


def project_state(grid: PeriodicGrid, state: State, dealias: bool = True) -> State:
    """Leray-project v, pin its mean to zero and band-limit all fields."""
    u1, u2 = grid.leray_project(state.v.u1, state.v.u2)
    comps = [u1, u2, state.s.s11, state.s.s12, state.s.s22]
    if dealias:
        comps = [grid.dealias(c) for c in comps]
    return State(VectorField2(comps[0], comps[1]), SymTensor2Field(comps[2], comps[3], comps[4]), state.t)
