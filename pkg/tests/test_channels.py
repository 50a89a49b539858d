import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irs_twrn.channels import cascade, complex_gaussian, draw_channels, draw_channels_with_attenuation
from irs_twrn.config import LINKS, SystemConfig, path_loss_linear
from irs_twrn.errors import DimensionError

from conftest import random_channels


class TestCascade:
    def test_scalar(self):
        assert cascade(np.array([[2 + 0j]]), np.array([3 + 0j])) == np.array([[6 + 0j]])

    def test_all_ones_is_identity(self, rng):
        H = complex_gaussian(rng, (3, 5), 1.0)
        np.testing.assert_array_equal(cascade(H, np.ones(5, complex)), H)

    def test_matches_dense_product(self, rng):
        H = complex_gaussian(rng, (3, 4), 1.0)
        h = complex_gaussian(rng, 4, 1.0)
        np.testing.assert_allclose(cascade(H, h), H @ np.diag(h), rtol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            cascade(np.ones((2, 3)), np.ones(4))

    @settings(max_examples=25)
    @given(seed=st.integers(0, 2**32 - 1), M=st.integers(1, 12), K=st.integers(1, 5))
    def test_reflection_composite(self, seed, M, K):
        """H_cascaded @ theta == H_ir @ (theta * h) for unit-modulus theta."""
        rng = np.random.default_rng(seed)
        ch = random_channels(rng, M, K)
        theta = np.exp(1j * rng.uniform(0, 2 * np.pi, M))
        lhs = ch.H_u1ir @ theta
        rhs = ch.H_ir @ (theta * ch.h_u1i)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-14 * np.abs(rhs).max())


class TestDraw:
    def test_zero_attenuation(self, rng):
        ch = draw_channels_with_attenuation(4, 2, dict.fromkeys(LINKS, 0.0), rng)
        for name in ("h_u1i", "h_u2i", "H_ir", "h_u1r", "h_u2r", "H_u1ir", "H_u2ir"):
            assert not np.any(getattr(ch, name))

    def test_shapes_and_cascade_invariant(self, rng):
        cfg = SystemConfig(M=8, K=3)
        ch = draw_channels(cfg, rng)
        assert ch.h_u1i.shape == (8,) and ch.H_ir.shape == (3, 8) and ch.h_u2r.shape == (3,)
        for m in range(8):
            np.testing.assert_allclose(ch.H_u1ir[:, m], ch.h_u1i[m] * ch.H_ir[:, m], rtol=1e-14)
            np.testing.assert_allclose(ch.H_u2ir[:, m], ch.h_u2i[m] * ch.H_ir[:, m], rtol=1e-14)

    def test_deterministic(self):
        cfg = SystemConfig(M=8, K=2)
        a = draw_channels(cfg, np.random.default_rng(7))
        b = draw_channels(cfg, np.random.default_rng(7))
        for name in ("h_u1i", "h_u2i", "H_ir", "h_u1r", "h_u2r", "H_u1ir", "H_u2ir"):
            np.testing.assert_array_equal(getattr(a, name), getattr(b, name))

    def test_direct_link_variance(self):
        # 1e5 draws of one U1->R entry; M=K=1 keeps it cheap
        cfg = SystemConfig(M=1, K=1)
        target = path_loss_linear(50, 3.5, 30)
        rng = np.random.default_rng(11)
        samples = np.array([draw_channels(cfg, rng).h_u1r[0] for _ in range(100_000)])
        assert np.mean(np.abs(samples) ** 2) == pytest.approx(target, rel=0.02)

    def test_circular_symmetry(self):
        z = complex_gaussian(np.random.default_rng(3), 100_000, 2.5)
        assert np.var(z.real) == pytest.approx(1.25, rel=0.03)
        assert np.var(z.imag) == pytest.approx(1.25, rel=0.03)
        assert abs(np.mean(z.real * z.imag)) < 0.03 * 1.25
