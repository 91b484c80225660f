"""Truncated Floquet Hamiltonian construction in the extended (Sambe) space.

A time-periodic Hamiltonian H(t) = sum_n H^(n) exp(i n w t) is lifted to a
time-independent block matrix whose entry at (level gamma, Fourier index k;
level beta, Fourier index m) is H^(k-m)_{gamma beta} + k w delta_km delta_gb.
The Fourier axis is truncated to |k| <= n_cut.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

HERMITICITY_TOL = 1e-12


class FloquetBuildError(ValueError):
    """Raised when a Floquet matrix cannot be assembled as requested."""


@dataclass(frozen=True)
class PeriodicHamiltonian:
    """An N-level time-periodic Hamiltonian specified by Fourier components.

    `fourier_component(n, params)` must return the N x N matrix multiplying
    exp(i n omega t); it must vanish for |n| > max_harmonic and satisfy
    H^(-n) = H^(n)^dagger so that H(t) is Hermitian.  The to-be-estimated
    parameters live in `params`; if the drive frequency itself is estimated
    it must appear there under the key "omega".
    """

    levels: int
    omega: float
    params: dict
    fourier_component: Callable[[int, Mapping[str, float]], np.ndarray]
    max_harmonic: int

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError(f"need at least 2 levels, got {self.levels}")
        if self.omega <= 0:
            raise ValueError(f"drive frequency must be positive, got {self.omega}")
        if self.max_harmonic < 0:
            raise ValueError("max_harmonic must be non-negative")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    def component(self, n: int) -> np.ndarray:
        """H^(n) as a complex array for the current parameter values."""
        h = np.asarray(self.fourier_component(n, self.params), dtype=complex)
        if h.shape != (self.levels, self.levels):
            raise ValueError(f"fourier_component({n}) has shape {h.shape}, "
                             f"expected {(self.levels, self.levels)}")
        return h

    def h_at(self, t: float) -> np.ndarray:
        """Reassemble H(t) from the Fourier components."""
        h = np.zeros((self.levels, self.levels), dtype=complex)
        for n in range(-self.max_harmonic, self.max_harmonic + 1):
            h += self.component(n) * np.exp(1j * n * self.omega * t)
        return h

    def with_params(self, **overrides: float) -> "PeriodicHamiltonian":
        """Copy of the model with some parameters shifted.

        Shifting "omega" also moves the drive frequency, so the k*omega
        ladder of a rebuilt Floquet matrix follows the shift.
        """
        unknown = set(overrides) - set(self.params)
        if unknown:
            raise KeyError(f"unknown parameters {sorted(unknown)}")
        params = dict(self.params)
        params.update(overrides)
        return PeriodicHamiltonian(
            levels=self.levels,
            omega=params.get("omega", self.omega),
            params=params,
            fourier_component=self.fourier_component,
            max_harmonic=self.max_harmonic,
        )

    def check_hermiticity(self, tol: float = HERMITICITY_TOL) -> None:
        for n in range(self.max_harmonic + 1):
            defect = np.max(np.abs(self.component(-n) - self.component(n).conj().T))
            if defect > tol:
                raise FloquetBuildError(
                    f"Fourier set is not Hermitian: |H(-{n}) - H({n})^dag| = {defect:.3e}")


@dataclass(frozen=True)
class SambeIndex:
    """Composite (level, Fourier sector) index into the truncated Sambe space."""

    level: int
    fourier: int

    def flat(self, levels: int, n_cut: int) -> int:
        return (self.fourier + n_cut) * levels + self.level


def flat_index(level: int, fourier: int, levels: int, n_cut: int) -> int:
    return (fourier + n_cut) * levels + level


def sambe_index(flat: int, levels: int, n_cut: int) -> SambeIndex:
    return SambeIndex(level=flat % levels, fourier=flat // levels - n_cut)


@dataclass
class FloquetMatrix:
    """Dense truncated Floquet Hamiltonian with sector bookkeeping."""

    n_cut: int
    levels: int
    omega: float
    data: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.levels * (2 * self.n_cut + 1)

    @property
    def sectors(self) -> np.ndarray:
        """Fourier indices of the truncated ladder, ascending."""
        return np.arange(-self.n_cut, self.n_cut + 1)

    def block(self, k: int, m: int) -> np.ndarray:
        """The (k, m) sector block as a view into the dense matrix."""
        n, nl = self.n_cut, self.levels
        return self.data[(k + n) * nl:(k + n + 1) * nl, (m + n) * nl:(m + n + 1) * nl]

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))


def build_floquet_matrix(model: PeriodicHamiltonian, n_cut: int) -> FloquetMatrix:
    """Assemble the truncated Sambe-space matrix for `model`.

    Block (k, m) is H^(k-m) plus the k*omega identity ladder on the diagonal
    blocks.  Rejects truncations that would drop nonzero couplings.
    """
    if n_cut < model.max_harmonic:
        raise FloquetBuildError(
            f"n_cut={n_cut} would drop couplings up to harmonic {model.max_harmonic}")
    model.check_hermiticity()

    nl = model.levels
    dim = nl * (2 * n_cut + 1)
    data = np.zeros((dim, dim), dtype=complex)
    components = {n: model.component(n) for n in
                  range(-model.max_harmonic, model.max_harmonic + 1)}
    eye = np.eye(nl)
    for k in range(-n_cut, n_cut + 1):
        row = (k + n_cut) * nl
        for m in range(max(-n_cut, k - model.max_harmonic),
                       min(n_cut, k + model.max_harmonic) + 1):
            col = (m + n_cut) * nl
            data[row:row + nl, col:col + nl] = components[k - m]
        data[row:row + nl, row:row + nl] += k * model.omega * eye
    return FloquetMatrix(n_cut=n_cut, levels=nl, omega=model.omega, data=data)


def fourier_components_from_timedomain(
    h_of_t: Callable[[float], np.ndarray],
    omega: float,
    max_harmonic: int,
    quad_points: int,
) -> dict[int, np.ndarray]:
    """Fourier components H^(n) = (1/T) int_0^T H(t) exp(-i n w t) dt.

    Uniform trapezoidal quadrature on the periodic grid (equivalent to the
    midpoint/rectangle rule here), so convergence is spectral for smooth H.
    """
    if quad_points < 4 * max_harmonic + 4:
        raise ValueError(
            f"quad_points={quad_points} below Nyquist requirement "
            f"{4 * max_harmonic + 4}")
    period = 2.0 * np.pi / omega
    ts = np.arange(quad_points) * (period / quad_points)
    samples = np.array([np.asarray(h_of_t(t), dtype=complex) for t in ts])
    components: dict[int, np.ndarray] = {}
    for n in range(-max_harmonic, max_harmonic + 1):
        weights = np.exp(-1j * n * omega * ts) / quad_points
        components[n] = np.tensordot(weights, samples, axes=(0, 0))
    # symmetrize away residual quadrature noise
    for n in range(max_harmonic + 1):
        avg = 0.5 * (components[n] + components[-n].conj().T)
        components[n] = avg
        components[-n] = avg.conj().T
    return components


def periodic_hamiltonian_from_timedomain(
    h_of_t: Callable[[float], np.ndarray],
    omega: float,
    max_harmonic: int,
    quad_points: int = 256,
    params: dict | None = None,
) -> PeriodicHamiltonian:
    """Wrap a time-domain Hamiltonian into a PeriodicHamiltonian.

    The Fourier components are frozen at construction; the resulting model's
    params are opaque labels (no reconstruction on shift), so it is meant for
    spectra and propagation rather than finite-difference pipelines.
    """
    components = fourier_components_from_timedomain(
        h_of_t, omega, max_harmonic, quad_points)
    levels = components[0].shape[0]

    def fourier_component(n, _params):
        if abs(n) > max_harmonic:
            return np.zeros((levels, levels), dtype=complex)
        return components[n]

    return PeriodicHamiltonian(
        levels=levels,
        omega=omega,
        params=dict(params or {}),
        fourier_component=fourier_component,
        max_harmonic=max_harmonic,
    )


def truncation_ladder(model: PeriodicHamiltonian, n_cuts) -> list[FloquetMatrix]:
    """Build one matrix per cutoff for downstream convergence studies."""
    n_cuts = list(n_cuts)
    if any(b <= a for a, b in zip(n_cuts, n_cuts[1:])):
        raise ValueError(f"n_cuts must be strictly increasing, got {n_cuts}")
    return [build_floquet_matrix(model, n) for n in n_cuts]
