"""Explicit-constant growth ceilings certified by the experiment harness."""

from __future__ import annotations

from math import comb, sqrt

from .errors import ParameterError


def dqck_growth_ceiling(big_n: int, k: int, d: int, level: int) -> float:
    """min(2^(k/2), sqrt(N)) * C(2d, level) * N^((level-2)/2), for level >= 2."""
    if level < 2:
        raise ParameterError("the mixed-start ceiling applies to levels >= 2")
    return min(2.0 ** (k / 2), sqrt(big_n)) * comb(2 * d, level) * big_n ** ((level - 2) / 2)


def bqp_growth_ceiling(big_n: int, d: int, level: int) -> float:
    """C(2d, level) * N^((level-1)/2), for level >= 1."""
    if level < 1:
        raise ParameterError("the clean-start ceiling applies to levels >= 1")
    return comb(2 * d, level) * big_n ** ((level - 1) / 2)


def hybrid_dqck_growth_ceiling(big_n: int, k: int, d: int, level: int) -> float:
    """C(3d, level) * N^((level-2)/2) * min(2^(k/2), sqrt(N)): the ceiling for
    depth-<=d classical pre-processing in front of d-query mixed-start runs."""
    if level < 2:
        raise ParameterError("the hybrid ceiling applies to levels >= 2")
    return comb(3 * d, level) * big_n ** ((level - 2) / 2) * min(2.0 ** (k / 2), sqrt(big_n))
