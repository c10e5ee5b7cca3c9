"""The scenario contracts. Importing this package registers every kind."""

from .commitment import TimeLockCommitment
from .escrow import ArbitratedEscrow
from .game import GameBetting
from .maintenance import MaintenanceEscrow
from .reward import UnilateralReward
from .ride import RideSharingContract

SCENARIO_KINDS = {
    cls.kind: cls
    for cls in (
        RideSharingContract,
        MaintenanceEscrow,
        UnilateralReward,
        ArbitratedEscrow,
        GameBetting,
        TimeLockCommitment,
    )
}

__all__ = [
    "ArbitratedEscrow", "GameBetting", "MaintenanceEscrow", "RideSharingContract",
    "SCENARIO_KINDS", "TimeLockCommitment", "UnilateralReward",
]
