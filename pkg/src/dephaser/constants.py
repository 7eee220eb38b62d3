"""Physical constants (SI), compiled in so results are bit-reproducible."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values. Not user-configurable."""

    hbar: float = 1.054571817e-34  # J s
    k_B: float = 1.380649e-23  # J / K
    e_charge: float = 1.602176634e-19  # C
    eps0: float = 8.8541878128e-12  # F / m


CONST = PhysicalConstants()
