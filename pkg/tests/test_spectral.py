"""Spectrum, folding, and amplitude-table tests."""
import numpy as np
import pytest

from floqmet.models import RashbaModel
from floqmet.sambe import FloquetMatrix, build_floquet_matrix
from floqmet.spectral import (DiagonalizationError, amplitude_table,
                              diagonalize, fold_to_fbz)


def test_fold_scalar_cases():
    assert fold_to_fbz(0.75, 1.0) == pytest.approx(-0.25)
    assert fold_to_fbz(0.5, 1.0) == pytest.approx(0.5)   # half-open boundary
    assert fold_to_fbz(-0.5, 1.0) == pytest.approx(0.5)
    assert fold_to_fbz(-2.3, 1.0) == pytest.approx(-0.3)


def test_fold_idempotent_and_in_range():
    lam = np.linspace(-7.3, 7.3, 501)
    folded = fold_to_fbz(lam, 1.0)
    assert np.all(folded > -0.5) and np.all(folded <= 0.5)
    np.testing.assert_allclose(fold_to_fbz(folded, 1.0), folded, atol=1e-14)


def test_static_spectrum_ladder():
    # B0 = 0: H is the static -B1 sigma_x, sector k adds k*omega
    spectrum = diagonalize(
        build_floquet_matrix(RashbaModel(0.0, 1.0, 1.0).hamiltonian(), 1))
    np.testing.assert_allclose(np.sort(spectrum.eigenvalues),
                               [-2, -1, 0, 0, 1, 2], atol=1e-12)


def test_diagonalize_rejects_non_hermitian():
    data = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    bad = FloquetMatrix(n_cut=0, levels=2, omega=1.0, data=data)
    with pytest.raises(DiagonalizationError):
        diagonalize(bad)


def test_amplitude_completeness_at_transition():
    spectrum = diagonalize(
        build_floquet_matrix(RashbaModel(0.5, 0.5, 1.0).hamiltonian(), 50))
    table = amplitude_table(spectrum)
    assert table.identity_defect() < 1e-10
    # sum_{alpha,k,gamma} |B|^2 = 1 per input level (long-time completeness)
    weights = np.sum(np.abs(table.entries) ** 2, axis=(0, 1, 2))
    np.testing.assert_allclose(weights, 1.0, atol=1e-6)


def test_static_amplitudes_stay_in_input_sector():
    spectrum = diagonalize(
        build_floquet_matrix(RashbaModel(0.0, 1.0, 1.0).hamiltonian(), 2))
    table = amplitude_table(spectrum)
    off_sector = table.entries[:, table.k_values != 0]
    np.testing.assert_allclose(off_sector, 0, atol=1e-12)


def test_folded_gap_is_branch_spacing():
    def spec(b0, b1):
        return diagonalize(
            build_floquet_matrix(RashbaModel(b0, b1, 1.0).hamiltonian(), 50))

    # two physical branches at +/-eps, symmetric under particle-hole
    s = spec(1.3, 1.0)
    modes = s.physical_modes()
    assert modes.size == 2
    folded = s.folded[modes]
    assert folded[0] == pytest.approx(-folded[1], abs=1e-10)
    assert s.folded_gap() == pytest.approx(2 * abs(folded[1]), abs=1e-10)
    assert s.folded_gap() > 1e-2
    # static limit: quasienergies are the eigenvalues +/-b1 folded into FBZ
    st = spec(0.0, 0.7)
    np.testing.assert_allclose(np.sort(st.folded[st.physical_modes()]),
                               [-0.3, 0.3], atol=1e-10)


def test_edge_modes_are_flagged_interior_clean():
    spectrum = diagonalize(
        build_floquet_matrix(RashbaModel(2.0, 1.0, 1.0).hamiltonian(), 50))
    interior = spectrum.interior_modes()
    edge = spectrum.edge_modes()
    assert interior.size > 0 and edge.size > 0
    assert np.intersect1d(interior, edge).size == 0


def test_input_sector_bounds():
    spectrum = diagonalize(
        build_floquet_matrix(RashbaModel(0.5, 0.5, 1.0).hamiltonian(), 2))
    with pytest.raises(ValueError):
        amplitude_table(spectrum, input_sector=3)
