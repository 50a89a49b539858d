import numpy as np
import pytest

from irs_twrn.channels import ChannelSet, complex_gaussian


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_channels(rng, M, K, scale=1.0):
    return ChannelSet.from_links(
        h_u1i=complex_gaussian(rng, M, scale),
        h_u2i=complex_gaussian(rng, M, scale),
        H_ir=complex_gaussian(rng, (K, M), scale),
        h_u1r=complex_gaussian(rng, K, scale),
        h_u2r=complex_gaussian(rng, K, scale),
    )


def rel_err(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return np.linalg.norm(a - b) / np.linalg.norm(b)
