"""SpinHex geometry parameters and closed-form resource/footprint estimates.

A SpinHex device is parametrized by the number of couplers in its horizontal
1D arrays (``n_x``) and in its diagonally oriented 1D arrays (``n_y``).  A
``(d+1) x (d+1)`` square lattice of unit cells hosts one rotated surface code
of distance ``d``.  Everything in this module is a pure closed-form function
of those numbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

# Default lithography constants: quantum-dot pitch and coupler diameter.
# Exposed as arguments on `footprint` for sensitivity studies; the defaults
# reproduce the published resource numbers.
DOT_PITCH_NM = 100.0
COUPLER_DIAMETER_NM = 500.0


class CodeVariant(enum.Enum):
    XZZX = "xzzx"
    CSS = "css"


class MemoryBasis(enum.Enum):
    # XZZX memories are named after the direction of the logical string.
    H = "h"
    V = "v"
    # CSS memories are named after the protected basis.
    X = "x"
    Z = "z"


_LEGAL_BASES = {
    CodeVariant.XZZX: (MemoryBasis.H, MemoryBasis.V),
    CodeVariant.CSS: (MemoryBasis.X, MemoryBasis.Z),
}


@dataclass(frozen=True)
class ArchitectureParams:
    """Geometry of one SpinHex device hosting a single logical qubit."""

    n_x: int
    n_y: int
    distance: int
    variant: CodeVariant = CodeVariant.XZZX
    basis: MemoryBasis = MemoryBasis.H

    def __post_init__(self) -> None:
        if self.n_x < 2:
            raise ValueError(f"need n_x >= 2, got {self.n_x}")
        if self.n_y < 3:
            raise ValueError(f"need n_y >= 3, got {self.n_y}")
        if self.distance < 3 or self.distance % 2 == 0:
            raise ValueError(f"distance must be odd and >= 3, got {self.distance}")
        if self.basis not in _LEGAL_BASES[self.variant]:
            raise ValueError(
                f"basis {self.basis.name} is not valid for variant {self.variant.name}"
            )


@dataclass(frozen=True)
class FootprintReport:
    """Per-device resource counts and areas (lengths in nm, areas in um^2)."""

    couplers_per_square: int
    double_dots_per_square: int
    array_length_x: float
    array_length_y: float
    square_area_bound: float
    couplers_per_logical: int
    qubits_per_logical: int
    area_per_logical: float
    connection_island_area: float
    swaps_per_gate: int
    swaps_per_stabilizer: int

    def as_dict(self) -> dict:
        return {
            "couplers_per_square": self.couplers_per_square,
            "double_dots_per_square": self.double_dots_per_square,
            "array_length_x_nm": self.array_length_x,
            "array_length_y_nm": self.array_length_y,
            "square_area_bound_um2": self.square_area_bound,
            "couplers_per_logical": self.couplers_per_logical,
            "qubits_per_logical": self.qubits_per_logical,
            "area_per_logical_um2": self.area_per_logical,
            "connection_island_area_um2": self.connection_island_area,
            "swaps_per_gate": self.swaps_per_gate,
            "swaps_per_stabilizer": self.swaps_per_stabilizer,
        }


def swaps_per_gate(n_x: int, n_y: int) -> int:
    """SWAP count wrapped around each two-qubit stabilizer gate.

    ``n_x + n_y - 2`` coupler SWAPs plus ``n_x + n_y - 3`` in-unit SWAPs to
    bring the qubits together, and the same amount to return them.
    """
    return 4 * (n_x + n_y) - 10


def footprint(
    params: ArchitectureParams,
    *,
    dot_pitch_nm: float = DOT_PITCH_NM,
    coupler_diameter_nm: float = COUPLER_DIAMETER_NM,
) -> FootprintReport:
    """Evaluate the closed-form resource formulas for one logical qubit."""
    nx, ny, d = params.n_x, params.n_y, params.distance
    n_c = 2 * nx + 4 * (ny - 2)
    n_dd = 2 * (nx - 1) + 4 * (ny - 1)

    seg = 2.0 * dot_pitch_nm + coupler_diameter_nm  # nm per coupler segment
    l_x = seg * (nx - 1)
    l_y = seg * (ny - 1)
    # Upper bound of the trapezoid area of a measurement square (theta -> 0),
    # in um^2; all downstream chip-area numbers use the bound.
    a_s = 4.0 * (l_x + l_y) * l_y * 1e-6

    squares = d * d - 1
    area_unit = (seg * 1e-3) ** 2  # um^2; 0.49 for the default 700 nm segment
    return FootprintReport(
        couplers_per_square=n_c,
        double_dots_per_square=n_dd,
        array_length_x=l_x,
        array_length_y=l_y,
        square_area_bound=a_s,
        couplers_per_logical=n_c * squares,
        qubits_per_logical=2 * n_dd * squares,
        area_per_logical=4.0 * area_unit * (nx + ny - 2) * (ny - 1) * squares,
        connection_island_area=area_unit * (nx - 1) * (ny - 1),
        swaps_per_gate=swaps_per_gate(nx, ny),
        swaps_per_stabilizer=8 * (2 * nx - 1 + 2 * (ny - 2)),
    )


def measurement_square_area(
    params: ArchitectureParams,
    theta: float,
    *,
    dot_pitch_nm: float = DOT_PITCH_NM,
    coupler_diameter_nm: float = COUPLER_DIAMETER_NM,
) -> float:
    """Exact trapezoid area (um^2) of a measurement square at tilt ``theta``.

    Bounded above by ``FootprintReport.square_area_bound`` for any
    ``theta`` in [0, pi/2].
    """
    seg = 2.0 * dot_pitch_nm + coupler_diameter_nm
    l_x = seg * (params.n_x - 1)
    l_y = seg * (params.n_y - 1)
    return 4.0 * (l_x + l_y * math.sin(theta)) * l_y * math.cos(theta) * 1e-6


def chip_area(
    params: ArchitectureParams, n_logical: int, overhead_factor: float = 1.0
) -> float:
    """Chip area in cm^2 for ``n_logical`` logical qubits.

    ``overhead_factor`` accounts for auxiliary structures (magic-state
    factories, routing); 1 means logical memory only.
    """
    if n_logical < 1:
        raise ValueError(f"need n_logical >= 1, got {n_logical}")
    if overhead_factor < 1:
        raise ValueError(f"need overhead_factor >= 1, got {overhead_factor}")
    a_q = footprint(params).area_per_logical  # um^2
    return a_q * n_logical * overhead_factor * 1e-8
