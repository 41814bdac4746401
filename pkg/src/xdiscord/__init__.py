"""Quantum discord of two-qubit X-states."""

__version__ = "0.1.0"

from .xcore import (  # noqa: E402
    BlochParams,
    CanonicalXState,
    DomainError,
    InvalidState,
    RawXState,
    binary_entropy,
    bloch_params,
    canonicalize,
    entropy,
    entropy_a,
    entropy_b,
    from_bloch_params,
    mutual_information,
    spectrum,
)
from .discord_vn import (  # noqa: E402
    AnalyticClass,
    DiscordResult,
    Method,
    MinimizeOptions,
    VnMeasurement,
    classical_correlation,
    classify_analytic,
    conditional_entropy_vn,
    discord_given_measurement,
    discord_sigma_x,
    discord_sigma_z,
    minimize_discord_vn,
)
from .povm import Povm, InvalidPovm, conditional_entropy_povm, discord_upper_povm, three_outcome_povm  # noqa: E402
from .families import X3Params, XmPoint, NoRoot, bell_diagonal, boundary_bx, boundary_bz, solve_xm, x3_state  # noqa: E402
