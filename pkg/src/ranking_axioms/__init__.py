"""Axiomatic checks for tournament ranking methods."""

from .core import (
    MatchRecord,
    RankingProblem,
    Tournament,
    aggregate,
    format_tournament,
    negate,
    opponent_multiset,
    parse_tournament,
    permute_players,
    permute_rounds,
    sum_problems,
)
from .methods import REGISTRY, Method, ScoreVector, get_method

__version__ = "0.1.0"
