"""Pilot design, least-squares channel estimation and phase-quantization
loss analysis for a two-way relay network aided by an intelligent
reflecting surface (IRS)."""

from .channels import ChannelSet, cascade, draw_channels
from .config import (
    NodeGeometry,
    PathLossModel,
    SystemConfig,
    link_distances,
    path_loss_linear,
    snr_to_power,
)
from .errors import IrsTwrnError, SingularDesignError, SingularGramError
from .estimation import EstimateSet, estimate_all, estimate_cascaded, estimate_direct
from .mse import (
    MseReport,
    analytic_cascaded,
    analytic_direct,
    empirical_component,
    predicted_quantized_sum,
    sum_mse_min,
)
from .pilots import PilotFrame, PilotSequences, combine, default_pilots, synthesize_frame
from .training import (
    Scheme,
    TrainingMatrix,
    dft_matrix,
    gram_trace_inv,
    hadamard_matrix,
    loss_factor_approx,
    loss_factor_exact,
    make_training_matrix,
    quantize,
    random_phase_matrix,
)

__version__ = "0.1.0"
