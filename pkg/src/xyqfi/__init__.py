"""Quantum and classical Fisher information of spin pairs in the ground state of
the anisotropic XY chain with transverse field and DM interaction."""

__version__ = "0.1.0"

from .chain_model import (  # noqa: E402
    DEFAULT_CONFIG,
    ChainIntegrals,
    ChainParams,
    ParameterTag,
    QuadratureConfig,
    chain_integrals,
    g_coefficient,
    g_coefficient_partial,
    magnetization,
    magnetization_partial,
)
from .correlations import (  # noqa: E402
    INFINITE,
    CorrelationPartials,
    CorrelationSet,
    asymptotic_decay_check,
    correlation_partials,
    correlation_set,
)
from .errors import *  # noqa: E402,F401,F403
from .fisher import (  # noqa: E402
    distance_ratios,
    fi_pair_magnetization,
    fi_single,
    fisher_scalars,
    qfi_pair,
    qfi_single,
    saturation,
)
from .multiparam import (  # noqa: E402
    hjj_fraction,
    qfim_pair,
    qfim_single,
    scalar_bound,
    sld_xstate,
    uhlmann_matrix,
    weak_commutators,
)
from .states import XState, pair_state, pair_state_partial, single_spin_state  # noqa: E402
