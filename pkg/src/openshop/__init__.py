"""Safety, reachability and deadlock analysis for multi-stage open shop systems."""

from .shop_model import (IN, OUT, IllegalMoveError, InvalidStateError, InvalidSystemError,
                         Job, Machine, Move, OpenShopSystem, ShopState, apply_move,
                         final_state, initial_state, is_deadlock, is_final,
                         is_subset_reachable, legal_moves, make_state, replay)
from .safety import (BlockingSet, canonical_blocking_set, find_blocking_set, is_full,
                     is_safe, verify_blocking_set)
from .reachability import complete_schedule, entry_schedule, is_reachable, reverse_state
from .exact_search import (Answer, SearchLimits, SearchVerdict, enumerate_reachable,
                           reachable_deadlock_exact, state_to_state)

__all__ = [
    "IN", "OUT", "IllegalMoveError", "InvalidStateError", "InvalidSystemError", "Job",
    "Machine", "Move", "OpenShopSystem", "ShopState", "apply_move", "final_state",
    "initial_state", "is_deadlock", "is_final", "is_subset_reachable", "legal_moves",
    "make_state", "replay", "BlockingSet", "canonical_blocking_set", "find_blocking_set",
    "is_full", "is_safe", "verify_blocking_set", "complete_schedule", "entry_schedule",
    "is_reachable", "reverse_state", "Answer", "SearchLimits", "SearchVerdict",
    "enumerate_reachable", "reachable_deadlock_exact", "state_to_state",
]
