"""Exact altruistic hedonic games: friend-oriented utilities, core verification,
and clique reductions with their gadgets."""

from .errors import (
    AHGError,
    CapacityError,
    ContractError,
    InvariantViolation,
    ParameterError,
    ParseError,
    StructuralError,
    ValidationError,
)
from .game import (
    ALL_MODELS,
    Coalition,
    CoalitionStructure,
    GameInstance,
    UtilityModel,
    UtilityValue,
    compare,
    friend_aggregate,
    make_game,
    move_to_empty,
    to_numeric,
    utility,
    valuation,
)
from .graph import FriendshipGraph, build_graph
from .stability import (
    CoreVerdict,
    Status,
    Strategy,
    blocks,
    brute_force_core,
    verify_core,
    verify_strict_core,
    weakly_blocks,
)

__version__ = "0.1.0"

__all__ = [
    "AHGError", "CapacityError", "ContractError", "InvariantViolation", "ParameterError", "ParseError",
    "StructuralError", "ValidationError",
    "ALL_MODELS", "Coalition", "CoalitionStructure", "GameInstance", "UtilityModel", "UtilityValue",
    "compare", "friend_aggregate", "make_game", "move_to_empty", "to_numeric", "utility", "valuation",
    "FriendshipGraph", "build_graph",
    "CoreVerdict", "Status", "Strategy", "blocks", "brute_force_core", "verify_core", "verify_strict_core",
    "weakly_blocks",
]
