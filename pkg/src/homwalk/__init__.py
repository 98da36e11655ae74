"""Lattice simulator for Dirac propagation on conformal curved spacetime,
with the metric carried entirely by boundary encode/decode unitaries around
a homogeneous bulk walk."""

__version__ = "0.1.0"

from .encoder import EncoderParams, EncodingOperator, build_encoder, conditions_residual, decode, encode
from .errors import ConfigError, PreconditionError
from .lattice import (
    DoubledField,
    Grid,
    SpinorField,
    fidelity,
    gaussian_packet,
    l2_distance,
    prob_norm,
)
from .metric import (
    ConformalField,
    CurvatureReport,
    christoffel,
    omega_field,
    ricci_conformal_general,
    ricci_scalar,
)
from .pipeline import (
    PacketSpec,
    PipelineConfig,
    conjugated_step,
    run_per_step,
    run_telescoped,
    zeroth_order_residual,
)
from .solvers import cn_evolve, conformal_oracle, flat_dirac_exact, transport_exact
from .walk import CoinParams, coin_matrix, doubled_step, flat_step, shift_apply
from .experiments import (
    CurvedSweepSpec,
    ExperimentTable,
    FlatSweepSpec,
    amplitude_sweep,
    curved_convergence_sweep,
    fit_order,
    flat_convergence_sweep,
)
