"""Diagonalization of the truncated Floquet matrix and eigen-bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sambe import FloquetMatrix

EDGE_MODE_WEIGHT = 1e-3


class DiagonalizationError(RuntimeError):
    """Hermitian eigensolver failure, with condition diagnostics attached."""


def fold_to_fbz(lambdas, omega: float):
    """Map (quasi)energies into the first Brillouin zone (-w/2, w/2].

    Idempotent mod-omega reduction with the half-open boundary mapping
    +w/2 to itself.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    lam = np.asarray(lambdas, dtype=float)
    folded = np.mod(lam, omega)
    folded = np.where(folded > omega / 2, folded - omega, folded)
    # mod can return exactly omega for tiny negative inputs via roundoff
    folded = np.where(folded > omega / 2, folded - omega, folded)
    return folded if folded.ndim else float(folded)


@dataclass
class FloquetSpectrum:
    """Eigen-decomposition of a truncated Floquet matrix.

    `eigenvectors` columns are the Sambe-space eigenstates, sorted by
    ascending eigenvalue.  Immutable after construction by convention;
    shared freely across threads/processes.
    """

    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    n_cut: int = 0
    levels: int = 2
    omega: float = 1.0

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def n_sectors(self) -> int:
        return 2 * self.n_cut + 1

    @property
    def folded(self) -> np.ndarray:
        return fold_to_fbz(self.eigenvalues, self.omega)

    def sector_view(self) -> np.ndarray:
        """Eigenvector table reshaped to [sector, level, mode]."""
        return self.eigenvectors.reshape(self.n_sectors, self.levels, self.dim)

    def edge_weights(self) -> np.ndarray:
        """Per-mode probability weight on the two outermost Fourier sectors."""
        view = self.sector_view()
        outer = np.abs(view[0]) ** 2 + np.abs(view[-1]) ** 2
        return outer.sum(axis=0)

    def edge_modes(self, threshold: float = EDGE_MODE_WEIGHT) -> np.ndarray:
        """Indices of truncation-polluted modes (heavy outermost-sector weight)."""
        return np.nonzero(self.edge_weights() > threshold)[0]

    def interior_modes(self, threshold: float = 1e-8) -> np.ndarray:
        return np.nonzero(self.edge_weights() < threshold)[0]

    def physical_modes(self) -> np.ndarray:
        """One representative mode per level: largest central-sector weight."""
        central = np.abs(self.sector_view()[self.n_cut]) ** 2  # [level, mode]
        weight = central.sum(axis=0)
        return np.sort(np.argsort(weight)[-self.levels:])

    def folded_gap(self) -> float:
        """Minimal FBZ (circular) spacing of the physical quasienergy branches.

        The full Sambe spectrum replicates each branch in every Fourier
        sector, so the spacing is taken between one representative per level.
        """
        folded = np.sort(self.folded[self.physical_modes()])
        gaps = np.diff(folded)
        wrap = folded[0] + self.omega - folded[-1]
        return float(min(gaps.min(), wrap))


def diagonalize(matrix: FloquetMatrix) -> FloquetSpectrum:
    """Exact diagonalization of the (Hermitian) truncated Floquet matrix."""
    defect = matrix.hermiticity_defect()
    if defect > 1e-10:
        raise DiagonalizationError(
            f"matrix is not Hermitian (defect {defect:.3e})")
    try:
        lam, vec = np.linalg.eigh(matrix.data)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        scale = float(np.max(np.abs(matrix.data)))
        raise DiagonalizationError(
            f"eigh failed for dim={matrix.dim}, max|entry|={scale:.3e}") from exc
    return FloquetSpectrum(
        eigenvalues=lam,
        eigenvectors=vec,
        n_cut=matrix.n_cut,
        levels=matrix.levels,
        omega=matrix.omega,
    )


@dataclass
class AmplitudeTable:
    """Transition amplitudes B[alpha, k, gamma, beta].

    B = <gamma,k|lambda_alpha><lambda_alpha|beta,input_sector>; each entry is
    invariant under a global phase change of the eigenvector, so tables at
    neighboring parameter values can be differenced once modes are paired.
    """

    entries: np.ndarray = field(repr=False)  # (dim, n_sectors, N, N)
    k_values: np.ndarray = field(repr=False)
    input_sector: int = 0

    def identity_defect(self) -> float:
        """Deviation of sum_{alpha,k} B from the identity (phase-free sum)."""
        total = self.entries.sum(axis=(0, 1))
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def amplitude_table(spectrum: FloquetSpectrum, input_sector: int = 0) -> AmplitudeTable:
    """All transition amplitudes out of the given input Fourier sector."""
    if abs(input_sector) > spectrum.n_cut:
        raise ValueError(f"input_sector {input_sector} outside truncation")
    view = spectrum.sector_view()                      # [k, gamma, alpha]
    inp = view[input_sector + spectrum.n_cut].conj()   # [beta, alpha]
    entries = np.einsum("kga,ba->akgb", view, inp)
    return AmplitudeTable(
        entries=entries,
        k_values=np.arange(-spectrum.n_cut, spectrum.n_cut + 1),
        input_sector=input_sector,
    )
