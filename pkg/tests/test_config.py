import math
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from irs_twrn.config import (
    NodeGeometry,
    PathLossModel,
    SystemConfig,
    dbm_to_mw,
    link_distances,
    path_loss_linear,
    read_config_file,
    snr_to_power,
    system_config_from_sections,
)
from irs_twrn.errors import InvalidConfigError, InvalidDistanceError, InvalidGeometryError


class TestPathLoss:
    def test_reference_distance(self):
        assert path_loss_linear(1, 2.4, 30) == pytest.approx(1e-3, rel=1e-15)

    def test_ten_meters(self):
        # 30 + 10*2.2*1 = 52 dB
        assert path_loss_linear(10, 2.2, 30) == pytest.approx(6.309573444801929e-06, rel=1e-12)

    def test_zero_loss_identity(self):
        assert path_loss_linear(1, 0, 0) == 1.0

    @pytest.mark.parametrize("d", [0.0, 0.5, 0.999, -3.0, math.nan])
    def test_below_reference_distance(self, d):
        with pytest.raises(InvalidDistanceError):
            path_loss_linear(d, 2.0, 30)

    @given(
        d=st.floats(1.0, 1e4),
        step=st.floats(1e-3, 100),
        gamma=st.floats(0.1, 6),
    )
    def test_decreasing_in_distance(self, d, step, gamma):
        assert path_loss_linear(d + step, gamma, 30) < path_loss_linear(d, gamma, 30)

    @given(d=st.floats(1.01, 1e4), gamma=st.floats(0, 6), step=st.floats(1e-2, 3))
    def test_decreasing_in_exponent(self, d, gamma, step):
        assert path_loss_linear(d, gamma + step, 30) < path_loss_linear(d, gamma, 30)

    @given(d=st.floats(1.0, 1e5), gamma=st.floats(0, 6), ref=st.floats(-50, 80))
    def test_range(self, d, gamma, ref):
        v = path_loss_linear(d, gamma, ref)
        assert 0 < v <= 10 ** (-ref / 10) * (1 + 1e-12)


class TestPower:
    def test_zero_db(self):
        assert snr_to_power(0, 1e-11) == 1e-11

    def test_ten_db(self):
        assert snr_to_power(10, 1e-11) == pytest.approx(1e-10, rel=1e-15)

    def test_noise_floor_dbm(self):
        assert dbm_to_mw(-80) == pytest.approx(1e-8, rel=1e-15)

    def test_rejects_nonpositive_noise(self):
        with pytest.raises(InvalidConfigError):
            snr_to_power(0, 0.0)

    @given(a=st.floats(-60, 60), b=st.floats(-60, 60))
    def test_additivity(self, a, b):
        lhs = snr_to_power(a + b, 1e-8)
        rhs = snr_to_power(a, 1e-8) * 10 ** (b / 10)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestGeometry:
    def test_default_distances(self):
        d = link_distances(NodeGeometry())
        assert d["u1_relay"] == 50.0
        assert d["irs_relay"] == 10.0
        assert d["u2_relay"] == pytest.approx(111.80339887498948, rel=1e-14)
        assert d["u1_irs"] == pytest.approx(math.hypot(10, 50))
        assert d["u2_irs"] == pytest.approx(math.hypot(90, 50))

    def test_symmetric_under_endpoint_swap(self):
        g = NodeGeometry(u1=(3, 4), u2=(7, -1), relay=(0, 0), irs=(-2, 5))
        g2 = NodeGeometry(u1=(3, 4), u2=(7, -1), relay=(-2, 5), irs=(0, 0))
        assert link_distances(g)["irs_relay"] == link_distances(g2)["irs_relay"]

    def test_coincident_nodes_rejected(self):
        with pytest.raises(InvalidGeometryError):
            NodeGeometry(u1=(0, 50), relay=(0, 50))


class TestSystemConfig:
    def test_defaults(self):
        cfg = SystemConfig()
        assert (cfg.M, cfg.K, cfg.N_P) == (128, 16, 128)
        assert cfg.noise_power == pytest.approx(1e-8)
        assert cfg.P_u1 == cfg.P_u2
        assert cfg.path_loss == PathLossModel(30.0, 3.5, 2.4, 2.2)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(M=0), dict(K=0), dict(M=8, N_P=4), dict(M=8, N_P=9), dict(P_u1=0.0), dict(noise_power=-1.0), dict(seed=-1)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidConfigError):
            SystemConfig(**kwargs)

    def test_with_snr(self):
        cfg = SystemConfig().with_snr(10)
        assert cfg.P_u1 == pytest.approx(1e-7)
        assert cfg.P_u2 == cfg.P_u1

    def test_attenuations_use_per_hop_losses(self):
        att = SystemConfig().link_attenuations()
        assert att["u1_relay"] == pytest.approx(path_loss_linear(50, 3.5, 30))
        assert att["irs_relay"] == pytest.approx(path_loss_linear(10, 2.2, 30))

    def test_negative_exponent_rejected(self):
        with pytest.raises(InvalidConfigError):
            PathLossModel(exp_direct=-1)


def test_config_file_roundtrip(tmp_path):
    path = tmp_path / "scenario.ini"
    path.write_text(
        "[SystemConfig]\nM = 32\nK = 4\nnoise_power = 1e-9\n\n"
        "[NodeGeometry]\nirs = 20, 50\n\n"
        "[PathLossModel]\nexp_direct = 3.0  # comment\n",
        encoding="utf-8",
    )
    sections = read_config_file(path)
    cfg = system_config_from_sections(sections)
    assert (cfg.M, cfg.K, cfg.N_P) == (32, 4, 32)
    assert cfg.noise_power == 1e-9
    assert cfg.geometry.irs == (20.0, 50.0)
    assert cfg.path_loss.exp_direct == 3.0
    assert cfg.path_loss.exp_irs_relay == 2.2


def test_config_unknown_key(tmp_path):
    with pytest.raises(InvalidConfigError):
        system_config_from_sections({"SystemConfig": {"bogus": "1"}})
