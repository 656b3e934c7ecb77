"""Tailored circuit-level noise model for the SpinHex architecture.

The two-qubit gate error rate ``p`` is the baseline; every other rate is a
fixed multiple of it:

    CX/CZ                two-qubit depolarizing, rate p
    H                    single-qubit depolarizing, rate p/10
    reset                prepares the orthogonal state, rate 2p
    measurement          flips the recorded outcome, rate 2p
    SWAP hop             single-qubit depolarizing on the traveling qubit,
                         rate (12/15)p = 0.8p
    idling in layer L    biased Pauli, total rate xi(L) * (p/10), bias eta

The bias splits the idling rate as p_x = p_y = p_idl / (2(1+eta)) and
p_z = eta * p_idl / (1+eta); eta = inf is the pure-dephasing limit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .circuit import ChannelKind, GateKind, PauliChannel


class LayerKind(enum.Enum):
    """What the busy qubits are doing, for idle-noise time scaling."""

    TWO_QUBIT = "two_qubit"
    SWAP = "swap"
    SINGLE_QUBIT = "single_qubit"
    READOUT = "readout"
    RESET = "reset"


class IdleDuringSwaps(enum.Enum):
    # One idling event per SWAP step (physically motivated default), or a
    # single idling event per composite gate.
    PER_STEP = "per_step"
    SINGLE = "single"


@dataclass(frozen=True)
class NoiseParams:
    """Base rate, bias, and the configurable corners of the rate table."""

    p: float
    eta: float = 100.0
    xi_reset: float = 7.0
    idle_during_swaps: IdleDuringSwaps = IdleDuringSwaps.PER_STEP
    swap_rate_override: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 0.1:
            raise ValueError(f"need 0 <= p <= 0.1, got {self.p}")
        if not (self.eta > 0):
            raise ValueError(f"need eta > 0, got {self.eta}")
        if self.xi_reset < 0:
            raise ValueError(f"need xi_reset >= 0, got {self.xi_reset}")
        if self.swap_rate_override is not None and not (
            0.0 <= self.swap_rate_override <= 1.0
        ):
            raise ValueError(f"bad swap_rate_override {self.swap_rate_override}")

    @property
    def single_qubit_rate(self) -> float:
        return self.p / 10.0

    @property
    def spam_rate(self) -> float:
        return 2.0 * self.p

    @property
    def swap_rate(self) -> float:
        if self.swap_rate_override is not None:
            return self.swap_rate_override
        return 0.8 * self.p

    @property
    def idle_base_rate(self) -> float:
        return self.p / 10.0

    def xi(self, layer: LayerKind) -> float:
        return {
            LayerKind.TWO_QUBIT: 1.0,
            LayerKind.SWAP: 1.0,
            LayerKind.SINGLE_QUBIT: 0.1,
            LayerKind.READOUT: 7.0,
            LayerKind.RESET: self.xi_reset,
        }[layer]


def idle_channel(noise: NoiseParams, layer: LayerKind) -> PauliChannel:
    rate = noise.xi(layer) * noise.idle_base_rate
    return PauliChannel(ChannelKind.BIASED_PAULI1, (rate, noise.eta))


def swap_hop_channel(noise: NoiseParams) -> PauliChannel:
    return PauliChannel(ChannelKind.DEPOLARIZE1, (noise.swap_rate,))


def channel_for(op_kind: GateKind, noise: NoiseParams) -> PauliChannel:
    """Noise channel attached to one ideal operation."""
    if op_kind in (GateKind.CX, GateKind.CZ):
        return PauliChannel(ChannelKind.DEPOLARIZE2, (noise.p,))
    if op_kind is GateKind.H:
        return PauliChannel(ChannelKind.DEPOLARIZE1, (noise.single_qubit_rate,))
    if op_kind is GateKind.RESET_Z:
        return PauliChannel(ChannelKind.X_FLIP, (noise.spam_rate,))
    if op_kind is GateKind.RESET_X:
        # Orthogonal-state preparation in the X basis is a Z flip.
        return PauliChannel(ChannelKind.Z_FLIP, (noise.spam_rate,))
    if op_kind in (GateKind.MEASURE_Z, GateKind.MEASURE_X):
        return PauliChannel(ChannelKind.MEASURE_FLIP, (noise.spam_rate,))
    raise ValueError(f"no noise context for {op_kind}")


def bias_of(channel: PauliChannel) -> float:
    """p_z / (p_x + p_y) of a single-qubit channel (inf for pure dephasing)."""
    probs = dict(channel.components())
    pxy = probs.get("X", 0.0) + probs.get("Y", 0.0)
    pz = probs.get("Z", 0.0)
    if pxy == 0.0:
        return math.inf if pz > 0 else math.nan
    return pz / pxy
