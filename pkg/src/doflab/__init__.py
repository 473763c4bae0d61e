"""Exact-arithmetic audits of linear schemes on the X-channel and three-user IC with delayed CSIT."""

from .channel import IC3, X_CHANNEL, CausalityViolation, ChannelRealization, CsitView, LinkSet, sample_realization
from .harness import ExperimentConfig, TrialLog, replay_trial, run_experiment
from .ic3 import theorem2_audit, verify_ic_scheme
from .ratmat import Q, RationalMatrix, proj_dim, rank
from .scheme import (
    LinearScheme,
    PrecoderTrace,
    causality_audit,
    gmk_scheme,
    resolve_scheme,
    run_scheme,
    tdma_scheme,
)
from .verify import Check, VerificationReport, verify_scheme

__version__ = "0.1.0"
