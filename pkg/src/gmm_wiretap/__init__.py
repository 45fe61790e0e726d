"""Secrecy rates of MIMO wiretap channels under Gaussian-mixture signaling."""

from .channel_model import (
    ChannelPair,
    InducedGmm,
    induce,
    make_bob_dct,
    make_eve_gaussian,
    noise_var_from_snr,
    sample_observation,
)
from .estimators import CayleyGmmSampler, ChannelTransformer, GmmMapClassifier
from .harness import ScenarioConfig, run_cdf, run_lownoise_sweep, run_validate
from .info_metrics import (
    Estimate,
    RateReport,
    cond_entropy_given_class,
    gaussian_entropy,
    lemma1_gap,
    low_noise_rate,
    map_error_rate,
    mc_entropy,
    mi_eve_upper,
    mi_mc,
    mixture_covariance,
    rate_report,
)
from .signal_model import (
    CayleyFamilySpec,
    GaussianClass,
    GmmSource,
    build_cayley_family,
    sample_class,
    sample_signal,
    source_power,
)

__version__ = "0.1.0"
