"""Mean-zero scalar fields on the periodic unit square.

The domain is the torus [0, 1)^2 sampled on a uniform n-by-n grid.
Fields are stored both as point samples and as discrete Fourier
coefficients with integer frequencies k = (k1, k2); the two views are
kept consistent, the Nyquist row and column are zeroed on every
transform, and the (0, 0) coefficient is zeroed at construction so a
field always represents the deviation from its spatial mean.

Array layout: ``values[j, i]`` is the sample at x1 = i/n, x2 = j/n
(axis 0 runs along x2, axis 1 along x1), and ``spectrum[a, b]`` is the
coefficient of exp(2*pi*i*(k1*x1 + k2*x2)) with k2 = freqs[a],
k1 = freqs[b] in FFT frequency order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft as _fft

__all__ = [
    "Grid",
    "ScalarField",
    "SobolevIndex",
    "l2_norm",
    "sobolev_norm",
    "grad_l2",
    "project_mean_zero",
    "project_zero_x1_average",
    "mode_field",
    "random_band_limited",
    "gaussian_packet",
    "read_snapshot",
    "write_snapshot",
]

SNAPSHOT_MAGIC = "MIXLAB-FIELD v1"

#: Largest admissible homogeneous Sobolev exponent magnitude.
MAX_SOBOLEV_INDEX = 8.0

SobolevIndex = float


@dataclass(frozen=True)
class Grid:
    """Uniform n-by-n sampling of the unit torus.

    Parameters
    ----------
    n : int
        Number of points per direction; must be even and at least 8.
        Grid spacing is 1/n and retained frequencies satisfy
        ``|k_i| <= n/2 - 1``.
    """

    n: int

    def __post_init__(self) -> None:
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 8, got {self.n}")
        freqs = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)
        k1 = freqs.reshape(1, self.n)
        k2 = freqs.reshape(self.n, 1)
        k_sq = (k1 * k1 + k2 * k2).astype(np.float64)
        half = self.n // 2
        nyquist = (np.abs(k1) == half) | (np.abs(k2) == half)
        cut = self.n // 3
        dealias = (np.abs(k1) <= cut) & (np.abs(k2) <= cut)
        x = np.arange(self.n) / self.n
        for name, arr in (
            ("freqs", freqs), ("k1", k1), ("k2", k2), ("k_sq", k_sq),
            ("nyquist_mask", nyquist), ("dealias_mask", dealias), ("x", x),
        ):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    @property
    def max_frequency(self) -> int:
        """Largest retained integer frequency, n/2 - 1."""
        return self.n // 2 - 1

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return broadcastable sample coordinates (x1 row, x2 column)."""
        return self.x.reshape(1, self.n), self.x.reshape(self.n, 1)


def _clean_spectrum(grid: Grid, spec: np.ndarray) -> np.ndarray:
    """Zero the Nyquist row/column and the mean mode, enforce Hermitian symmetry."""
    spec = np.array(spec, dtype=np.complex128)
    spec[grid.nyquist_mask] = 0.0
    spec[0, 0] = 0.0
    # A real field has spectrum(-k) = conj(spectrum(k)); average the two halves
    # so construction from an arbitrary complex array still yields a real field.
    flipped = np.conj(np.roll(spec[::-1, ::-1], (1, 1), axis=(0, 1)))
    spec = 0.5 * (spec + flipped)
    spec.setflags(write=False)
    return spec


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Immutable mean-zero scalar field on a :class:`Grid`.

    Use the classmethods to build instances; they project onto the
    representable space (Nyquist and mean modes zeroed), so stored
    values and spectrum round-trip through the FFT to 1e-12.
    """

    grid: Grid
    values: np.ndarray

    @classmethod
    def from_values(cls, grid: Grid, values: np.ndarray) -> "ScalarField":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.n, grid.n):
            raise ValueError(f"expected shape {(grid.n, grid.n)}, got {values.shape}")
        spec = _clean_spectrum(grid, _fft.fft2(values) / grid.n**2)
        return cls._from_clean_spectrum(grid, spec)

    @classmethod
    def from_spectrum(cls, grid: Grid, spectrum: np.ndarray) -> "ScalarField":
        if spectrum.shape != (grid.n, grid.n):
            raise ValueError(
                f"expected shape {(grid.n, grid.n)}, got {spectrum.shape}"
            )
        return cls._from_clean_spectrum(grid, _clean_spectrum(grid, spectrum))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "ScalarField":
        x1, x2 = grid.mesh()
        return cls.from_values(grid, np.broadcast_to(fn(x1, x2), (grid.n, grid.n)))

    @classmethod
    def _from_clean_spectrum(cls, grid: Grid, spec: np.ndarray) -> "ScalarField":
        values = np.ascontiguousarray(_fft.ifft2(spec * grid.n**2).real)
        values.setflags(write=False)
        field = cls(grid, values)
        object.__setattr__(field, "spectrum", spec)
        return field

    @cached_property
    def spectrum(self) -> np.ndarray:
        spec = _clean_spectrum(self.grid, _fft.fft2(self.values) / self.grid.n**2)
        return spec

    def evaluate_at(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        """Evaluate the trigonometric interpolant at arbitrary points.

        Sums over the non-negligible Fourier modes, so it is intended
        for band-limited fields (initial data, profiles), not for
        fully-developed spectra.
        """
        x1 = np.asarray(x1, dtype=np.float64)
        x2 = np.asarray(x2, dtype=np.float64)
        spec = self.spectrum
        mag = np.abs(spec)
        mask = mag > 1e-15 * max(mag.max(), 1e-300)
        rows, cols = np.nonzero(mask)
        coeff = spec[rows, cols]
        k1 = self.grid.freqs[cols].astype(np.float64)
        k2 = self.grid.freqs[rows].astype(np.float64)
        shape = x1.shape
        phase = np.multiply.outer(x1.ravel(), k1) + np.multiply.outer(x2.ravel(), k2)
        out = (np.exp(2j * np.pi * phase) @ coeff).real
        return out.reshape(shape)

    def __repr__(self) -> str:  # pragma: no cover
        return f"ScalarField(n={self.grid.n}, l2={l2_norm(self):.6g})"


def l2_norm(field: ScalarField) -> float:
    """Discrete L2 norm, computed spectrally (Parseval)."""
    spec = field.spectrum
    return float(np.sqrt(np.sum(np.abs(spec) ** 2)))


def sobolev_norm(field: ScalarField, s: SobolevIndex) -> float:
    """Homogeneous Sobolev norm of exponent ``s``.

    Defined as ``sqrt(sum_{k != 0} |k|^(2s) |coeff_k|^2)`` over integer
    frequencies; the mean mode never contributes. ``|s|`` is capped at
    8 to keep the weights within floating-point range.
    """
    if abs(s) > MAX_SOBOLEV_INDEX:
        raise ValueError(f"Sobolev exponent out of range [-8, 8]: {s}")
    spec = field.spectrum
    k_sq = field.grid.k_sq
    weight = np.zeros_like(k_sq)
    nz = k_sq > 0
    weight[nz] = k_sq[nz] ** s
    return float(np.sqrt(np.sum(weight * np.abs(spec) ** 2)))


def grad_l2(field: ScalarField) -> float:
    """L2 norm of the gradient: one derivative contributes 2*pi*|k| per mode."""
    return 2.0 * np.pi * sobolev_norm(field, 1.0)


def project_mean_zero(field: ScalarField) -> ScalarField:
    """Idempotent projection onto mean-zero fields (a no-op after construction)."""
    spec = np.array(field.spectrum)
    spec[0, 0] = 0.0
    return ScalarField.from_spectrum(field.grid, spec)


def project_zero_x1_average(field: ScalarField) -> ScalarField:
    """Remove all modes with k1 = 0, i.e. make averages along x1 vanish."""
    spec = np.array(field.spectrum)
    spec[:, 0] = 0.0
    return ScalarField.from_spectrum(field.grid, spec)


def mode_field(grid: Grid, k1: int, k2: int) -> ScalarField:
    """Unit-L2 cosine mode sqrt(2) * cos(2*pi*(k1*x1 + k2*x2))."""
    if (k1, k2) == (0, 0):
        raise ValueError("mode (0, 0) is not mean-zero")
    if max(abs(k1), abs(k2)) > grid.max_frequency:
        raise ValueError(f"mode ({k1}, {k2}) beyond grid Nyquist {grid.max_frequency}")
    x1, x2 = grid.mesh()
    return ScalarField.from_values(
        grid, np.sqrt(2.0) * np.cos(2.0 * np.pi * (k1 * x1 + k2 * x2))
    )


def random_band_limited(grid: Grid, seed: int, band: int = 8) -> ScalarField:
    """Seeded random field supported on ``|k1|, |k2| <= band``, unit L2 norm.

    Coefficients are drawn with the counter-based Philox generator on a
    grid-independent (2*band+1)^2 block, so the same seed yields the
    same field on any grid large enough to hold the band.
    """
    if band < 1 or band > grid.max_frequency:
        raise ValueError(f"band must be in [1, {grid.max_frequency}], got {band}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    size = 2 * band + 1
    block = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    spec = np.zeros((grid.n, grid.n), dtype=np.complex128)
    ks = np.arange(-band, band + 1)
    for a, kk2 in enumerate(ks):
        for b, kk1 in enumerate(ks):
            spec[kk2 % grid.n, kk1 % grid.n] = block[a, b]
    field = ScalarField.from_spectrum(grid, spec)
    norm = l2_norm(field)
    return ScalarField.from_spectrum(grid, field.spectrum / norm)


def gaussian_packet(
    grid: Grid, k1: int, center: float, sigma: float
) -> ScalarField:
    """Unit-L2 wave packet cos(2*pi*k1*x1) * periodic Gaussian in x2.

    Used as a dissipation-time probe localized near ``x2 = center``.
    """
    if k1 == 0:
        raise ValueError("packet carrier must have k1 != 0")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x1, x2 = grid.mesh()
    # Periodized Gaussian: sum over the nearest images is ample for sigma < 0.25.
    d = x2 - center
    envelope = np.zeros_like(d)
    for shift in (-2.0, -1.0, 0.0, 1.0, 2.0):
        envelope = envelope + np.exp(-((d + shift) ** 2) / (2.0 * sigma**2))
    field = ScalarField.from_values(grid, np.cos(2.0 * np.pi * k1 * x1) * envelope)
    return ScalarField.from_spectrum(field.grid, field.spectrum / l2_norm(field))


def write_snapshot(field: ScalarField, path) -> None:
    """Write ``MIXLAB-FIELD v1`` format: ASCII header, then row-major float64 LE."""
    with open(path, "wb") as fh:
        fh.write(f"{SNAPSHOT_MAGIC} n={field.grid.n}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_snapshot(path) -> ScalarField:
    """Read a ``MIXLAB-FIELD v1`` snapshot written by :func:`write_snapshot`."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", errors="replace").strip()
        parts = header.rsplit(" n=", 1)
        if len(parts) != 2 or parts[0] != SNAPSHOT_MAGIC:
            raise ValueError(f"not a {SNAPSHOT_MAGIC} snapshot: {header!r}")
        n = int(parts[1])
        data = fh.read(8 * n * n)
        if len(data) != 8 * n * n:
            raise ValueError(f"truncated snapshot: expected {n}x{n} float64 payload")
        values = np.frombuffer(data, dtype="<f8").reshape(n, n)
    return ScalarField.from_values(Grid(n), values)
