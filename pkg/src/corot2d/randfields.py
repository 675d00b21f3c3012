"""Deterministic random band-limited fields.

Mode coefficients have magnitude ``amplitude * (1 + |k|)**(-decay)`` and a
uniformly random phase drawn from a splitmix64 stream keyed by
``(seed, tag, m, n)``.  Keying by integer mode index makes the ensembles
resolution-independent: the same mode receives the same coefficient on any
grid that retains it, which is what the truncation-refinement studies rely
on.
"""

from __future__ import annotations

import numpy as np

from .fields import State, SymTensor2Field, VectorField2
from .grid import PeriodicGrid

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One step of the splitmix64 sequence: returns (next_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return state, z


def _unit(seed: int, tag: int, m: int, n: int) -> float:
    """Uniform value in [0, 1) for one keyed mode."""
    key = (seed & _MASK) ^ ((tag & 0xFFFF) << 48) ^ ((m & 0xFFFFFF) << 24) ^ (n & 0xFFFFFF)
    s, _ = splitmix64(key)
    _, z = splitmix64(s)
    return z / 2.0**64


def random_scalar(
    grid: PeriodicGrid,
    seed: int,
    tag: int = 0,
    decay: float = 3.0,
    amplitude: float = 1.0,
    band: float = 1.0 / 3.0,
) -> np.ndarray:
    """Random real zero-mean scalar field, band-limited to |m_i| <= band*n_i.

    Amplitudes are Fourier-series coefficients, so the physical field size
    is O(amplitude) regardless of resolution.
    """
    spec = np.zeros(grid.shape, dtype=complex)
    b1 = int(np.floor(band * grid.n1))
    b2 = int(np.floor(band * grid.n2))
    scale = grid.n1 * grid.n2  # series coefficient -> DFT value
    for n in range(0, b2 + 1):
        for m in range(-b1, b1 + 1):
            if n == 0 and m <= 0:
                continue  # (0,0) stays zero; m<0 on the n=0 line come from symmetry
            k1 = 2.0 * np.pi * m / grid.l1
            k2 = 2.0 * np.pi * n / grid.l2
            mag = amplitude * (1.0 + np.hypot(k1, k2)) ** (-decay)
            phase = 2.0 * np.pi * _unit(seed, tag, m, n)
            c = mag * np.exp(1j * phase)
            spec[m % grid.n1, n % grid.n2] = c * scale
            spec[(-m) % grid.n1, (-n) % grid.n2] = np.conj(c) * scale
    return grid.dealias(spec)


def random_divfree_velocity(
    grid: PeriodicGrid,
    seed: int,
    decay: float = 3.0,
    amplitude: float = 1.0,
    band: float = 1.0 / 3.0,
) -> VectorField2:
    """Velocity from a random streamfunction: exactly divergence-free."""
    psi = random_scalar(grid, seed, tag=1, decay=decay, amplitude=amplitude, band=band)
    return VectorField2(grid.derivative(psi, 2), -grid.derivative(psi, 1))


def random_stress(
    grid: PeriodicGrid,
    seed: int,
    decay: float = 3.0,
    amplitude: float = 1.0,
    trace_free: bool = True,
    band: float = 1.0 / 3.0,
) -> SymTensor2Field:
    s11 = random_scalar(grid, seed, tag=2, decay=decay, amplitude=amplitude, band=band)
    s12 = random_scalar(grid, seed, tag=3, decay=decay, amplitude=amplitude, band=band)
    if trace_free:
        s22 = -s11
    else:
        s22 = random_scalar(grid, seed, tag=4, decay=decay, amplitude=amplitude, band=band)
    return SymTensor2Field(s11, s12, s22)


def random_state(
    grid: PeriodicGrid,
    seed: int,
    amp_v: float = 0.5,
    amp_s: float = 0.5,
    decay: float = 3.0,
    trace_free: bool = True,
    band: float = 1.0 / 3.0,
) -> State:
    v = random_divfree_velocity(grid, seed, decay=decay, amplitude=amp_v, band=band)
    s = random_stress(grid, seed, decay=decay, amplitude=amp_s, trace_free=trace_free, band=band)
    return State(v, s, 0.0)
