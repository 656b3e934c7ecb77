"""Rotated planar code layout: qubit placement, check types, gate schedule.

Data qubits sit at odd coordinates (2i+1, 2j+1), i, j in 0..d-1, with y
growing downward; check (measurement) qubits sit at even coordinates.
Z-type checks occupy the top/bottom boundaries, X-type checks the
left/right boundaries, so the logical Z string runs vertically (left
column) and the logical X string horizontally (top row).

Every check interacts with its (up to four) diagonal data neighbors across
four global time steps.  The per-type traversal orders are fixed constants
chosen so that (a) no data qubit is touched twice in a step and (b) mid-
schedule check-qubit errors ("hooks") spread only perpendicular to the
logical direction they could harm.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arch import ArchitectureParams, CodeVariant, MemoryBasis

# Diagonal directions, y down.
NE = (1, -1)
NW = (-1, -1)
SE = (1, 1)
SW = (-1, 1)

# Gate time order per check type.  Z-check hooks are Z-pairs on the two
# last-gated data qubits; ending on {SE, SW} makes them horizontal, which
# cannot shorten the vertical logical-Z string.  Symmetrically X checks end
# on the vertical pair {NW, SW}.
SCHEDULE_ORDER = {
    "Z": (NE, NW, SE, SW),
    "X": (NE, SE, NW, SW),
}


@dataclass(frozen=True)
class Check:
    """One measurement qubit: its type and scheduled data neighbors."""

    qubit: int
    pos: tuple[int, int]  # (a, b): coordinate is (2a, 2b)
    kind: str  # CSS stabilizer type, "X" or "Z"; XZZX checks inherit it
    # One entry per time step: data qubit index, or None when the diagonal
    # neighbor falls outside the lattice (boundary checks idle then).
    neighbors: tuple[int | None, int | None, int | None, int | None]

    @property
    def weight(self) -> int:
        return sum(1 for q in self.neighbors if q is not None)


@dataclass(frozen=True)
class Layout:
    distance: int
    num_data: int
    num_checks: int
    data_index: dict[tuple[int, int], int]  # (i, j) -> qubit index
    checks: tuple[Check, ...]

    @property
    def num_qubits(self) -> int:
        return self.num_data + self.num_checks

    def data_pos(self, qubit: int) -> tuple[int, int]:
        return self._data_pos[qubit]

    def __post_init__(self):
        object.__setattr__(
            self, "_data_pos", {q: ij for ij, q in self.data_index.items()}
        )


def data_sublattice(i: int, j: int) -> int:
    """0 for the sublattice containing the top-left data qubit, else 1.

    Sublattice 1 is the one Hadamard-conjugated to turn CSS into XZZX.
    """
    return (i + j) % 2


def build_layout(distance: int) -> Layout:
    d = distance
    if d < 3 or d % 2 == 0:
        raise ValueError(f"distance must be odd and >= 3, got {d}")
    data_index = {
        (i, j): j * d + i for j in range(d) for i in range(d)
    }

    # Candidate check at (2a, 2b); CSS type from the checkerboard parity.
    positions = []
    for b in range(d + 1):
        for a in range(d + 1):
            kind = "X" if (a + b) % 2 == 0 else "Z"
            neigh = {}
            for direc in (NE, NW, SE, SW):
                i, j = a + (direc[0] - 1) // 2, b + (direc[1] - 1) // 2
                if 0 <= i < d and 0 <= j < d:
                    neigh[direc] = data_index[(i, j)]
            if len(neigh) == 0:
                continue
            if b in (0, d) and kind != "Z":
                continue  # top/bottom boundaries host Z checks only
            if a in (0, d) and kind != "X":
                continue  # left/right boundaries host X checks only
            if len(neigh) not in (2, 4):
                continue
            positions.append((a, b, kind, neigh))

    checks = []
    for rank, (a, b, kind, neigh) in enumerate(positions):
        order = SCHEDULE_ORDER[kind]
        checks.append(
            Check(
                qubit=d * d + rank,
                pos=(a, b),
                kind=kind,
                neighbors=tuple(neigh.get(direc) for direc in order),
            )
        )
    layout = Layout(
        distance=d,
        num_data=d * d,
        num_checks=len(checks),
        data_index=data_index,
        checks=tuple(checks),
    )
    if layout.num_checks != d * d - 1:
        raise AssertionError(f"expected {d*d-1} checks, built {layout.num_checks}")
    _assert_schedule_valid(layout)
    return layout


def _assert_schedule_valid(layout: Layout) -> None:
    for step in range(4):
        busy: set[int] = set()
        for check in layout.checks:
            q = check.neighbors[step]
            if q is None:
                continue
            if q in busy:
                raise AssertionError(f"schedule conflict on data qubit {q} step {step}")
            busy.add(q)


def xzzx_action(check: Check, i: int, j: int) -> str:
    """Pauli the XZZX form of `check` applies to data qubit (i, j).

    A CSS Z check conjugates to Z on sublattice 0 and X on sublattice 1;
    an X check to the complement.  Either way the result reads X-Z-Z-X
    around the plaquette.
    """
    if check.kind == "Z":
        return "Z" if data_sublattice(i, j) == 0 else "X"
    return "X" if data_sublattice(i, j) == 0 else "Z"


@dataclass(frozen=True)
class MemoryPlan:
    """Initialization/readout bases and logical operator of one memory run."""

    variant: CodeVariant
    basis: MemoryBasis
    init_basis: dict[int, str]  # data qubit -> "Z" (|0>) or "X" (|+>)
    deterministic_kind: str  # CSS type of round-1-deterministic checks
    observable_data: tuple[int, ...]  # support of the logical operator


def memory_plan(arch: ArchitectureParams, layout: Layout) -> MemoryPlan:
    d = layout.distance
    left_column = tuple(layout.data_index[(0, j)] for j in range(d))
    top_row = tuple(layout.data_index[(i, 0)] for i in range(d))

    if arch.variant is CodeVariant.CSS:
        basis = "Z" if arch.basis is MemoryBasis.Z else "X"
        init = {q: basis for q in range(layout.num_data)}
        obs = left_column if basis == "Z" else top_row
        return MemoryPlan(arch.variant, arch.basis, init, basis, obs)

    # XZZX: image of the CSS circuit under H on sublattice 1.  H memory is
    # the image of the CSS X memory (horizontal logical string), V the image
    # of the Z memory (vertical string).
    css_like = "X" if arch.basis is MemoryBasis.H else "Z"
    init = {}
    for (i, j), q in layout.data_index.items():
        flipped = data_sublattice(i, j) == 1
        init[q] = ("Z" if flipped else "X") if css_like == "X" else (
            "X" if flipped else "Z"
        )
    obs = top_row if css_like == "X" else left_column
    return MemoryPlan(arch.variant, arch.basis, init, css_like, obs)
