"""Secret-message coding over the BPSK-constrained Gaussian wiretap channel
with message-punctured irregular LDPC codes, plus the density-evolution
linear-programming search for good degree distributions."""

__version__ = "0.1.0"

from .channel import (
    ChannelSetting,
    OutOfRegionError,
    RatePoint,
    bpsk_capacity,
    llr,
    region_boundary,
    secrecy_capacity,
    transmit,
)
from .degrees import DegreeDistribution, design_rate, regular
from .tanner import TannerGraph, sample_graph
from .alist import parse_alist, emit_alist, read_alist, write_alist
from .gf2 import TriangularizedCode, encode, triangularize
from .decoder import SumProductDecoder, bp_decode
from .secret import (
    SecretCode,
    SecretCodewordParts,
    build_secret_code,
    destination_decode,
    equivocation_lower_bound,
    k_for_secret_rate,
    secret_encode,
    wiretapper_decode,
)
from .density import (
    DensityGrid,
    QuantizedDensity,
    Trajectory,
    ResponseMatrices,
    bec_density,
    check_node_update,
    gaussian_channel_density,
    initial_density,
    response_matrices,
    run_trajectory,
    variable_node_update,
)
from .lp import LinearProgram, LPResult, solve_lp
from .search import SearchConfig, build_lambda_lp, build_rho_lp, search, search_for_setting
from .simulate import EvaluationRecord, estimate, sweep
