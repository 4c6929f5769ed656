"""One-shot entanglement quantities and checks of the non-asymptotic second law."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .hyptest import dh_lp_oracle, dh_neyman_pearson, dh_sdp
from .rains import rains, rains_closed_form_max_ent
from .secondlaw import ErrorBudget, correction_term, simulate_quasi_cyclic
from .states import isotropic_state, max_entangled, maximally_mixed

__all__ = [
    "KERNEL_BACKEND",
    "ErrorBudget",
    "correction_term",
    "dh_lp_oracle",
    "dh_neyman_pearson",
    "dh_sdp",
    "isotropic_state",
    "max_entangled",
    "maximally_mixed",
    "rains",
    "rains_closed_form_max_ent",
    "simulate_quasi_cyclic",
]

__version__ = "0.1.0"
