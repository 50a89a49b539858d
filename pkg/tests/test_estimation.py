import numpy as np
import pytest

from irs_twrn.channels import complex_gaussian
from irs_twrn.errors import DegeneratePilotError, DimensionError, SingularDesignError
from irs_twrn.estimation import (
    CascadedSolver,
    estimate_all,
    estimate_cascaded,
    estimate_cascaded_orthogonal,
    estimate_direct,
)
from irs_twrn.mse import error_energies
from irs_twrn.pilots import PilotFrame, default_pilots, synthesize_frame
from irs_twrn.training import dft_matrix, hadamard_matrix, quantize, random_phase_matrix

from conftest import random_channels, rel_err


def kronecker_solve(Yt, Q, x, P):
    """Oracle: explicit (QX)^T kron I_K system, solved densely."""
    K = Yt.shape[0]
    A = np.kron((Q * x[None, :]).T, np.eye(K))
    vec_y = Yt.reshape(-1, order="F")
    vec_h = np.linalg.solve(A, vec_y) / (4 * np.sqrt(P))
    return vec_h.reshape(K, -1, order="F")


class TestDirect:
    def test_noise_free(self, rng):
        h = complex_gaussian(rng, 3, 1.0)
        x = default_pilots(8, rng).x_u1
        Yt = 4 * np.sqrt(2.5) * np.outer(h, x)
        np.testing.assert_allclose(estimate_direct(Yt, x, 2.5), h, rtol=1e-13)

    def test_scalar(self):
        assert estimate_direct(np.array([[8.0]]), np.array([1.0]), 1.0) == pytest.approx([2.0])

    def test_linear(self, rng):
        Yt = complex_gaussian(rng, (3, 8), 1.0)
        Yt2 = complex_gaussian(rng, (3, 8), 1.0)
        x = default_pilots(8, rng).x_u2
        c = 2 - 3j
        np.testing.assert_allclose(estimate_direct(c * Yt, x, 0.3), c * estimate_direct(Yt, x, 0.3))
        np.testing.assert_allclose(
            estimate_direct(Yt + Yt2, x, 0.3), estimate_direct(Yt, x, 0.3) + estimate_direct(Yt2, x, 0.3)
        )

    def test_zero_energy_pilots(self):
        with pytest.raises(DegeneratePilotError):
            estimate_direct(np.ones((2, 3)), np.zeros(3), 1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            estimate_direct(np.ones((2, 3)), np.ones(4), 1.0)


class TestCascaded:
    def test_noise_free(self, rng):
        H = complex_gaussian(rng, (2, 8), 1.0)
        Q = random_phase_matrix(8, rng)
        x = default_pilots(8, rng).x_u1
        Yt = 4 * np.sqrt(0.5) * H @ Q.entries @ np.diag(x)
        assert rel_err(estimate_cascaded(Yt, Q, x, 0.5), H) <= 1e-10

    @pytest.mark.parametrize("M", [2, 4, 8])
    @pytest.mark.parametrize("K", [1, 2, 3])
    def test_kronecker_equivalence(self, M, K, rng):
        Q = random_phase_matrix(M, rng)
        x = default_pilots(M, rng).x_u1
        Yt = complex_gaussian(rng, (K, M), 1.0)
        want = kronecker_solve(Yt, Q.entries, x, 1.7)
        assert rel_err(estimate_cascaded(Yt, Q, x, 1.7), want) <= 1e-10
        assert rel_err(CascadedSolver(Q).solve(Yt, x, 1.7), want) <= 1e-10

    @pytest.mark.parametrize("make", [dft_matrix, hadamard_matrix])
    def test_orthogonal_fast_path(self, make, rng):
        M = 16
        Q = make(M)
        x = default_pilots(M, rng).x_u1
        Yt = complex_gaussian(rng, (4, M), 1.0)
        assert rel_err(estimate_cascaded_orthogonal(Yt, Q, x, 3.0), estimate_cascaded(Yt, Q, x, 3.0)) <= 1e-10

    def test_linear(self, rng):
        Q = random_phase_matrix(6, rng)
        x = default_pilots(6, rng).x_u1
        A, B = complex_gaussian(rng, (2, 6), 1.0), complex_gaussian(rng, (2, 6), 1.0)
        lhs = estimate_cascaded(2 * A - 1j * B, Q, x, 1.0)
        rhs = 2 * estimate_cascaded(A, Q, x, 1.0) - 1j * estimate_cascaded(B, Q, x, 1.0)
        assert rel_err(lhs, rhs) <= 1e-12

    def test_singular_design(self, rng):
        Q = quantize(dft_matrix(32), 1)
        x = default_pilots(32, rng).x_u1
        with pytest.raises(SingularDesignError) as info:
            estimate_cascaded(np.ones((2, 32)), Q, x, 1.0)
        assert info.value.condition > 1e12
        with pytest.raises(SingularDesignError):
            CascadedSolver(Q)

    def test_solver_condition_reported(self):
        assert CascadedSolver(dft_matrix(8)).condition == pytest.approx(1.0)


class TestEstimateAll:
    @pytest.mark.parametrize("scheme", ["dft", "hadamard", "rpm"])
    def test_zero_noise_recovery(self, scheme, rng):
        M, K = 8, 2
        Q = {"dft": dft_matrix(M), "hadamard": hadamard_matrix(M), "rpm": random_phase_matrix(M, rng)}[scheme]
        ch = random_channels(rng, M, K)
        p = default_pilots(M, rng)
        est = estimate_all(synthesize_frame(ch, Q, p, 2.0, 0.5, 0.0, None), Q, p, 2.0, 0.5)
        assert rel_err(est.h_u1r_hat, ch.h_u1r) <= 1e-9
        assert rel_err(est.h_u2r_hat, ch.h_u2r) <= 1e-9
        assert rel_err(est.H_u1ir_hat, ch.H_u1ir) <= 1e-9
        assert rel_err(est.H_u2ir_hat, ch.H_u2ir) <= 1e-9

    def test_error_is_noise_only(self, rng):
        """Same noise, two channel draws: identical estimation errors."""
        M, K = 8, 3
        Q = dft_matrix(M)
        p = default_pilots(M, rng)
        W = complex_gaussian(rng, (4, K, M), 0.1)
        errors = []
        for _ in range(2):
            ch = random_channels(rng, M, K)
            clean = synthesize_frame(ch, Q, p, 1.0, 1.0, 0.0, None).Y
            est = estimate_all(PilotFrame(clean + W), Q, p, 1.0, 1.0)
            errors.append(
                [est.h_u1r_hat - ch.h_u1r, est.h_u2r_hat - ch.h_u2r, est.H_u1ir_hat - ch.H_u1ir, est.H_u2ir_hat - ch.H_u2ir]
            )
        for a, b in zip(*errors):
            assert rel_err(a, b) <= 1e-12

    def test_doubling_power_halves_error(self):
        M, K, T = 8, 2, 2000
        Q = dft_matrix(M)
        totals = []
        for P in (1.0, 2.0):
            rng = np.random.default_rng(1234 + int(P))
            acc = np.zeros(4)
            for _ in range(T):
                ch = random_channels(rng, M, K)
                p = default_pilots(M, rng)
                frame = synthesize_frame(ch, Q, p, P, P, 1.0, rng)
                acc += error_energies(estimate_all(frame, Q, p, P, P), ch)
            totals.append(acc)
        np.testing.assert_allclose(totals[1] / totals[0], 0.5, rtol=0.05)
