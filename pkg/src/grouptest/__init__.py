"""Noiseless non-adaptive group testing: COMP, DD, SCOMP and SSS decoders,
closed-form success bounds, and a Monte Carlo harness."""

from .core import (DesignParams, Instance, ItemSet, TestMatrix, compute_outcomes,
                   generate_bernoulli_design, is_k_disjunct, is_k_separable, is_satisfying,
                   read_instance, unexplained_tests, write_instance)
from .decoders import (ALGORITHMS, DecodeOutput, SearchBudgetExhausted, SssOptions, comp_decode,
                       dd_decode, decode, scomp_decode, sss_decode)
from .analytics import (InstanceParams, beta_eff, comp_success_lower, dd_success_exact,
                        dd_success_lower, info_bound, phi_k, rate_bounds, sss_success_lower,
                        sss_success_upper)
from .simulator import SweepConfig, run_sweep, run_trial

__version__ = "0.1.0"
