"""SpinHex: surface-code memory experiments on a spin-qubit MEC architecture."""

from .arch import (
    ArchitectureParams,
    CodeVariant,
    FootprintReport,
    MemoryBasis,
    chip_area,
    footprint,
    swaps_per_gate,
)
from .builder import build_memory_experiment, default_rounds, stabilizer_schedule
from .circuit import ChannelKind, Circuit, GateKind, Instruction, Layer, NoiseOp, PauliChannel
from .layout import Layout, MemoryPlan, build_layout, memory_plan
from .noise import IdleDuringSwaps, LayerKind, NoiseParams

__all__ = [
    "ArchitectureParams",
    "ChannelKind",
    "Circuit",
    "CodeVariant",
    "FootprintReport",
    "GateKind",
    "IdleDuringSwaps",
    "Instruction",
    "Layer",
    "LayerKind",
    "Layout",
    "MemoryBasis",
    "MemoryPlan",
    "NoiseOp",
    "NoiseParams",
    "PauliChannel",
    "build_layout",
    "build_memory_experiment",
    "chip_area",
    "default_rounds",
    "footprint",
    "memory_plan",
    "stabilizer_schedule",
    "swaps_per_gate",
]

__version__ = "0.1.0"
