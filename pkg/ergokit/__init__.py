__version__ = "0.1.0"

from ergokit.states import (  # noqa: E402
    DensityOperator,
    ErgotropyBreakdown,
    FockOracleConfig,
    HamiltonianSpec,
    ergotropy,
    passive_state,
)
