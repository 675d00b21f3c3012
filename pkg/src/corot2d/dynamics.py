"""Right-hand sides of the coupled velocity / stress system.

The model is incompressible flow driven by the divergence of a symmetric
stress S, with S evolving by a corotational (Zaremba-Jaumann) rate:

    div v = 0
    dv/dt + (v.grad)v + grad p = div S
    dS/dt + (v.grad)S + S W - W S = D           (+ optional regularization)

with D and W the symmetric and antisymmetric parts of the velocity
gradient.  Two regularizations of the stress equation are supported:
``timederiv`` adds -eps*Laplacian(dS/dt), realized by a modewise mass
solve; ``diffusive`` adds -eps*Laplacian(S), which the integrator treats
with an exact integrating factor by default.

In 2D the corotational term reduces to a pointwise product with the
vorticity:  S W - W S = (omega/2) * St  where
St = [[2 S12, S22 - S11], [S22 - S11, -2 S12]].

Quadratic products are evaluated on the 3/2-padded physical grid and
truncated back, so the quadratic invariants of the semi-discrete system
(energy exchange, corotational orthogonality) hold to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import State, SymTensor2Field, VectorField2, sym_grad
from .grid import PeriodicGrid

KIND_NONE = "none"
KIND_TIMEDERIV = "timederiv"
KIND_DIFFUSIVE = "diffusive"
_KINDS = (KIND_NONE, KIND_TIMEDERIV, KIND_DIFFUSIVE)


@dataclass(frozen=True)
class Regularization:
    """One of none, timederiv(eps) or diffusive(eps), eps > 0."""

    kind: str
    eps: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown regularization kind {self.kind!r}")
        if self.kind == KIND_NONE and self.eps != 0.0:
            raise ValueError("eps must be 0 for the unregularized system")
        if self.kind != KIND_NONE and not self.eps > 0.0:
            raise ValueError(f"regularization {self.kind!r} requires eps > 0")

    @classmethod
    def none(cls) -> "Regularization":
        return cls(KIND_NONE, 0.0)

    @classmethod
    def time_derivative(cls, eps: float) -> "Regularization":
        return cls(KIND_TIMEDERIV, eps)

    @classmethod
    def diffusive(cls, eps: float) -> "Regularization":
        return cls(KIND_DIFFUSIVE, eps)


@dataclass(frozen=True)
class Tendency:
    dv: VectorField2
    ds: SymTensor2Field


@dataclass(frozen=True)
class TendencyParts:
    """Tendency plus the masked spectral intermediates diagnostics reuse."""

    tendency: Tendency
    adv_s: SymTensor2Field   # (v.grad)S
    corot: SymTensor2Field   # S W - W S
    strain: SymTensor2Field  # D


def _products(grid: PeriodicGrid, specs: list[np.ndarray], dealias: bool):
    """Return (physical fields, back-transform) honoring the dealias toggle."""
    if dealias:
        phys = grid.to_phys_pad(np.stack(specs))
        return list(phys), lambda arrs: grid.from_phys_pad(np.stack(arrs))
    phys = np.fft.ifft2(np.stack(specs)).real
    return list(phys), lambda arrs: np.fft.fft2(np.stack(arrs))


def corotational(grid: PeriodicGrid, s: SymTensor2Field, v: VectorField2,
                 dealias: bool = True) -> SymTensor2Field:
    """S W - W S, computed pointwise as (omega/2) * St.

    The result is symmetric by construction and pointwise trace-free.
    """
    omega_h = grid.derivative(v.u1, 2) - grid.derivative(v.u2, 1)
    phys, back = _products(grid, [omega_h, s.s11, s.s12, s.s22], dealias)
    omega, s11, s12, s22 = phys
    c11 = omega * s12
    c12 = 0.5 * omega * (s22 - s11)
    c11h, c12h = back([c11, c12])
    return SymTensor2Field(c11h, c12h, -c11h)


def tendency_parts(
    grid: PeriodicGrid,
    state: State,
    reg: Regularization,
    forcing=None,
    dealias: bool = True,
    split_diffusion: bool = False,
) -> TendencyParts:
    """Assemble dv/dt and dS/dt for the given regularization.

    ``forcing(t)`` may supply spectral source terms
    (f_v1, f_v2, f_s11, f_s12, f_s22); the velocity part is added before
    the Leray projection.  With ``split_diffusion`` the diffusive
    Laplacian is left out of dS/dt (the integrator applies it exactly).
    """
    v1h, v2h = state.v.u1, state.v.u2
    s = state.s
    d1v1 = grid.derivative(v1h, 1)
    d2v1 = grid.derivative(v1h, 2)
    d1v2 = grid.derivative(v2h, 1)
    d2v2 = grid.derivative(v2h, 2)
    specs = [
        v1h, v2h, d1v1, d2v1, d1v2, d2v2,
        s.s11, s.s12, s.s22,
        grid.derivative(s.s11, 1), grid.derivative(s.s11, 2),
        grid.derivative(s.s12, 1), grid.derivative(s.s12, 2),
        grid.derivative(s.s22, 1), grid.derivative(s.s22, 2),
    ]
    phys, back = _products(grid, specs, dealias)
    (v1, v2, p11, p21, p12, p22, s11, s12, s22,
     g11_1, g11_2, g12_1, g12_2, g22_1, g22_2) = phys

    omega = p21 - p12
    prods = back([
        v1 * p11 + v2 * p21,          # (v.grad)v1
        v1 * p12 + v2 * p22,          # (v.grad)v2
        v1 * g11_1 + v2 * g11_2,      # (v.grad)S11
        v1 * g12_1 + v2 * g12_2,      # (v.grad)S12
        v1 * g22_1 + v2 * g22_2,      # (v.grad)S22
        omega * s12,                  # corot 11
        0.5 * omega * (s22 - s11),    # corot 12
    ])
    adv_v1, adv_v2, a11, a12, a22, c11, c12 = prods
    adv_s = SymTensor2Field(a11, a12, a22)
    corot = SymTensor2Field(c11, c12, -c11)
    strain = SymTensor2Field(d1v1, 0.5 * (d2v1 + d1v2), d2v2)

    fv1 = fv2 = 0.0
    fs = (0.0, 0.0, 0.0)
    if forcing is not None:
        fv1, fv2, f11, f12, f22 = forcing(state.t)
        fs = (f11, f12, f22)

    m1 = -adv_v1 + grid.derivative(s.s11, 1) + grid.derivative(s.s12, 2) + fv1
    m2 = -adv_v2 + grid.derivative(s.s12, 1) + grid.derivative(s.s22, 2) + fv2
    dv1, dv2 = grid.leray_project(m1, m2)

    b11 = -a11 - c11 + strain.s11 + fs[0]
    b12 = -a12 - c12 + strain.s12 + fs[1]
    b22 = -a22 + c11 + strain.s22 + fs[2]
    if reg.kind == KIND_TIMEDERIV:
        b11 = grid.mass_solve(b11, reg.eps)
        b12 = grid.mass_solve(b12, reg.eps)
        b22 = grid.mass_solve(b22, reg.eps)
    elif reg.kind == KIND_DIFFUSIVE and not split_diffusion:
        b11 = b11 + reg.eps * grid.laplacian(s.s11)
        b12 = b12 + reg.eps * grid.laplacian(s.s12)
        b22 = b22 + reg.eps * grid.laplacian(s.s22)

    ds = SymTensor2Field(b11, b12, b22)
    return TendencyParts(Tendency(VectorField2(dv1, dv2), ds), adv_s, corot, strain)


def tendency(grid: PeriodicGrid, state: State, reg: Regularization,
             forcing=None, dealias: bool = True,
             split_diffusion: bool = False) -> Tendency:
    return tendency_parts(grid, state, reg, forcing, dealias, split_diffusion).tendency


def momentum_rhs(grid: PeriodicGrid, state: State, dealias: bool = True) -> VectorField2:
    """Leray projection of -(v.grad)v + div S; the pressure never appears."""
    return tendency_parts(grid, state, Regularization.none(), None, dealias).tendency.dv


def stress_rhs(grid: PeriodicGrid, state: State, reg: Regularization,
               dealias: bool = True, split_diffusion: bool = False) -> SymTensor2Field:
    """Full dS/dt for the given regularization (mass solve applied for
    timederiv; diffusion included unless split off for the integrator)."""
    return tendency_parts(grid, state, reg, None, dealias, split_diffusion).tendency.ds


def dissipation_rate(
    grid: PeriodicGrid,
    state: State,
    parts: TendencyParts,
    dealias: bool = True,
) -> tuple[np.ndarray, float]:
    """Pointwise rate xi = S : (D - S_dot - (S W - W S)) and its integral.

    S_dot is the material derivative built from the full tendency in
    ``parts``.  Returns xi sampled on the 3/2 product grid, where the
    integral is exact for the band-limited factors involved.
    """
    ds = parts.tendency.ds
    a11 = parts.strain.s11 - (ds.s11 + parts.adv_s.s11) - parts.corot.s11
    a12 = parts.strain.s12 - (ds.s12 + parts.adv_s.s12) - parts.corot.s12
    a22 = parts.strain.s22 - (ds.s22 + parts.adv_s.s22) - parts.corot.s22
    s = state.s
    stack = np.stack([s.s11, s.s12, s.s22, a11, a12, a22])
    if dealias:
        phys = grid.to_phys_pad(stack)
        weight = grid.pad_cell_weight
    else:
        phys = np.fft.ifft2(stack).real
        weight = grid.cell_weight
    ps11, ps12, ps22, pa11, pa12, pa22 = phys
    xi = ps11 * pa11 + 2.0 * ps12 * pa12 + ps22 * pa22
    return xi, float(np.sum(xi) * weight)
