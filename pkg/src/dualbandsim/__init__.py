"""dualbandsim: dual-band MIMO-OFDM link simulation.

A co-located sub-6 GHz link rides along with a mmWave link; both are
trained with comb pilots, and the sub-6 GHz estimate (averaged,
band-extended, and phase-rotated onto the mmWave carrier) is fused with
the in-band mmWave estimate.  SVD precoding on the fused estimate is
then scored against the true channel in spectral efficiency.
"""

from .config import (
    BandParams,
    ConfigError,
    DerivedParams,
    SPEED_OF_LIGHT,
    SystemConfig,
    build_distance_matrix,
    config_from_file,
    config_from_mapping,
    derived_params,
    snr_sub6_linear,
)
from .channel import (
    ChannelRealization,
    ChannelSynthesizer,
    ChannelTensor,
    TdlProfile,
    free_space_channel,
    load_tdl_profile,
    rayleigh_tdl_tensor,
    realize_channels,
    rician_scaling,
)
from .training import (
    PilotPlan,
    band_average_extrapolate,
    ls_estimate,
    make_pilot_plan,
    observe_training,
)
from .fusion import (
    EstimationMethod,
    WeightTable,
    build_weight_table,
    dual_band_estimates,
    fuse,
    make_weight_grid,
    phase_rotate,
    weight_mse_curve,
)
from .linkeval import Precoding, channel_gain, spectral_efficiency, svd_precoding
from .harness import (
    SweepResult,
    evaluate_point,
    regenerate_weight_table,
    run_point,
    run_sweep,
    run_validation,
    small_validation_config,
    validate,
)

__version__ = "0.1.0"
