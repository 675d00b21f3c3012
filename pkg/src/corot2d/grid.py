"""Periodic grid bookkeeping and Fourier-space kernels.

Everything downstream (fields, dynamics, diagnostics) works with full
complex DFT coefficient arrays of shape ``(n1, n2)`` in numpy's standard
``fft2`` layout.  The grid object pre-computes wavenumber tables, the 2/3
dealiasing mask and the index maps used to embed coefficients into a
3/2-padded grid, on which all quadratic products are evaluated alias-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridConfigError(ValueError):
    """Raised for non-positive lengths or odd/too-small resolutions."""


def _wavenumbers(n: int, length: float) -> np.ndarray:
    # 2*pi*m/L for mode indices m in fft order [0..n/2-1, -n/2..-1]
    return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n) * 1.0


def _mode_indices(n: int) -> np.ndarray:
    return np.rint(np.fft.fftfreq(n) * n).astype(int)


@dataclass(frozen=True)
class PeriodicGrid:
    """Rectangle (0, l1) x (0, l2) sampled on an n1 x n2 uniform grid.

    Both resolutions must be even and at least 8; the 3/2-padded grid used
    for products then has integer dimensions.
    """

    l1: float
    l2: float
    n1: int
    n2: int
    _tables: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (self.l1 > 0 and self.l2 > 0):
            raise GridConfigError("cell side lengths must be positive")
        for n in (self.n1, self.n2):
            if n < 8 or n % 2 != 0:
                raise GridConfigError("resolutions must be even and >= 8")
        t = self._tables
        t["x1"] = np.arange(self.n1) * (self.l1 / self.n1)
        t["x2"] = np.arange(self.n2) * (self.l2 / self.n2)
        t["k1"] = _wavenumbers(self.n1, self.l1)[:, None]
        t["k2"] = _wavenumbers(self.n2, self.l2)[None, :]
        t["ksq"] = t["k1"] ** 2 + t["k2"] ** 2
        m1 = _mode_indices(self.n1)[:, None]
        m2 = _mode_indices(self.n2)[None, :]
        t["mode1"] = m1
        t["mode2"] = m2
        t["dealias_mask"] = (np.abs(m1) <= self.n1 / 3.0) & (np.abs(m2) <= self.n2 / 3.0)
        # 3/2-padded dimensions and the index map embedding fft-ordered
        # coefficients into the padded layout (Nyquist kept on the negative side).
        p1, p2 = 3 * self.n1 // 2, 3 * self.n2 // 2
        t["pad_shape"] = (p1, p2)
        rows = np.concatenate([np.arange(self.n1 // 2), np.arange(p1 - self.n1 // 2, p1)])
        cols = np.concatenate([np.arange(self.n2 // 2), np.arange(p2 - self.n2 // 2, p2)])
        t["pad_ix"] = np.ix_(rows, cols)

    # -- basic geometry -------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def x1(self) -> np.ndarray:
        return self._tables["x1"]

    @property
    def x2(self) -> np.ndarray:
        return self._tables["x2"]

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    @property
    def dx(self) -> tuple[float, float]:
        return (self.l1 / self.n1, self.l2 / self.n2)

    @property
    def k1(self) -> np.ndarray:
        return self._tables["k1"]

    @property
    def k2(self) -> np.ndarray:
        return self._tables["k2"]

    @property
    def ksq(self) -> np.ndarray:
        return self._tables["ksq"]

    @property
    def mode1(self) -> np.ndarray:
        return self._tables["mode1"]

    @property
    def mode2(self) -> np.ndarray:
        return self._tables["mode2"]

    @property
    def dealias_mask(self) -> np.ndarray:
        return self._tables["dealias_mask"]

    @property
    def area(self) -> float:
        return self.l1 * self.l2

    @property
    def cell_weight(self) -> float:
        """Quadrature weight of one physical sample."""
        return self.area / (self.n1 * self.n2)

    @property
    def spec_weight(self) -> float:
        """Parseval weight: ||f||_2^2 = spec_weight * sum |fhat|^2."""
        return self.area / (self.n1 * self.n2) ** 2

    # -- transforms ------------------------------------------------------

    def forward(self, phys: np.ndarray) -> np.ndarray:
        if phys.shape[-2:] != self.shape:
            raise ValueError(f"sample array {phys.shape} does not match grid {self.shape}")
        return np.fft.fft2(phys)

    def inverse(self, spec: np.ndarray) -> np.ndarray:
        if spec.shape[-2:] != self.shape:
            raise ValueError(f"coefficient array {spec.shape} does not match grid {self.shape}")
        return np.fft.ifft2(spec).real

    # -- spectral operators ----------------------------------------------

    def derivative(self, spec: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
        """Multiply by (i*k_axis)^order; the Nyquist line of the result is
        zeroed to keep derivatives of real fields conjugate-symmetric."""
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        if order < 1:
            raise ValueError("order must be >= 1")
        k = self.k1 if axis == 1 else self.k2
        out = spec * (1j * k) ** order
        if axis == 1:
            out[..., self.n1 // 2, :] = 0.0
        else:
            out[..., :, self.n2 // 2] = 0.0
        return out

    def gradient(self, spec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.derivative(spec, 1), self.derivative(spec, 2)

    def laplacian(self, spec: np.ndarray) -> np.ndarray:
        return -self.ksq * spec

    def dealias(self, spec: np.ndarray) -> np.ndarray:
        return spec * self.dealias_mask

    def leray_project(self, u1: np.ndarray, u2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Modewise (I - k k^T/|k|^2); the zero mode is pinned to 0."""
        ksq = self.ksq
        with np.errstate(divide="ignore", invalid="ignore"):
            kd = np.where(ksq > 0, (self.k1 * u1 + self.k2 * u2) / ksq, 0.0)
        p1 = u1 - self.k1 * kd
        p2 = u2 - self.k2 * kd
        p1[0, 0] = 0.0
        p2[0, 0] = 0.0
        return p1, p2

    def divergence(self, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
        # divergence uses the same k tables as leray_project so that the
        # projected field has exactly zero divergence in float arithmetic
        return 1j * self.k1 * u1 + 1j * self.k2 * u2

    def mass_solve(self, spec: np.ndarray, eps: float) -> np.ndarray:
        """Apply (I - eps*Laplacian)^-1, i.e. divide modes by 1 + eps|k|^2."""
        if eps < 0:
            raise ValueError("eps must be >= 0")
        return spec / (1.0 + eps * self.ksq)

    def heat_multiplier(self, eps: float, dt: float) -> np.ndarray:
        return np.exp(-eps * self.ksq * dt)

    def heat_factor(self, spec: np.ndarray, eps: float, dt: float) -> np.ndarray:
        """Exact diffusion over dt: modewise exp(-eps|k|^2 dt)."""
        return spec * self.heat_multiplier(eps, dt)

    # -- padded products ---------------------------------------------------

    def pad(self, spec: np.ndarray) -> np.ndarray:
        p1, p2 = self._tables["pad_shape"]
        out = np.zeros(spec.shape[:-2] + (p1, p2), dtype=complex)
        scale = (p1 * p2) / (self.n1 * self.n2)
        out[(..., *self._tables["pad_ix"])] = spec * scale
        return out

    def unpad(self, spec_pad: np.ndarray) -> np.ndarray:
        p1, p2 = self._tables["pad_shape"]
        scale = (self.n1 * self.n2) / (p1 * p2)
        return spec_pad[(..., *self._tables["pad_ix"])] * scale

    def to_phys_pad(self, spec: np.ndarray) -> np.ndarray:
        """Physical samples on the 3/2 grid (stacked fields supported)."""
        return np.fft.ifft2(self.pad(spec)).real

    def from_phys_pad(self, phys_pad: np.ndarray) -> np.ndarray:
        """Back to coefficients on this grid, dealiased."""
        return self.dealias(self.unpad(np.fft.fft2(phys_pad)))

    @property
    def pad_cell_weight(self) -> float:
        p1, p2 = self._tables["pad_shape"]
        return self.area / (p1 * p2)

    def integral_pad(self, phys_pad: np.ndarray) -> float:
        """Quadrature on the padded grid; exact for triple products of
        dealiased fields (their spectrum stays below the padded Nyquist)."""
        return float(np.sum(phys_pad) * self.pad_cell_weight)


def make_grid(l1: float, l2: float, n1: int, n2: int) -> PeriodicGrid:
    """Validate and build a :class:`PeriodicGrid`."""
    return PeriodicGrid(l1, l2, n1, n2)
