"""Noisy memory-experiment circuit construction.

A round consists of a check-reset layer, four two-qubit gate layers (each
wrapped in SWAP-hop noise layers modeling the journey of the measurement
qubit across the couplers), and a check-readout layer.  The first round
additionally initializes the data qubits; after the last round all data
qubits are measured in their initialization basis.
"""

from __future__ import annotations

from .arch import ArchitectureParams, CodeVariant, swaps_per_gate
from .circuit import Circuit, GateKind, Instruction, Layer, NoiseOp
from .layout import Check, Layout, build_layout, memory_plan, xzzx_action
from .noise import (
    IdleDuringSwaps,
    LayerKind,
    NoiseParams,
    channel_for,
    idle_channel,
    swap_hop_channel,
)

_RESET = {"Z": GateKind.RESET_Z, "X": GateKind.RESET_X}
_MEASURE = {"Z": GateKind.MEASURE_Z, "X": GateKind.MEASURE_X}


def default_rounds(distance: int) -> int:
    """3d rounds, enough to suppress time-boundary edge effects."""
    return 3 * distance


def stabilizer_schedule(arch: ArchitectureParams) -> dict[int, list[tuple[int, GateKind, int]]]:
    """Gate plan per measurement qubit: list of (time step, gate, data qubit).

    XZZX checks are prepared/measured in X and act as the control of CX
    (for the X part of the stabilizer) or CZ (for the Z part).  CSS X
    checks use CX with the check as control; CSS Z checks use CX with the
    check as target.
    """
    layout = build_layout(arch.distance)
    plan: dict[int, list[tuple[int, GateKind, int]]] = {}
    for check in layout.checks:
        gates = []
        for step, data in enumerate(check.neighbors):
            if data is None:
                continue
            gates.append((step, _gate_for(arch, layout, check, data), data))
        plan[check.qubit] = gates
    return plan


def _gate_for(arch: ArchitectureParams, layout: Layout, check: Check, data: int) -> GateKind:
    if arch.variant is CodeVariant.CSS:
        return GateKind.CX
    i, j = layout.data_pos(data)
    return GateKind.CX if xzzx_action(check, i, j) == "X" else GateKind.CZ


def _gate_targets(arch: ArchitectureParams, check: Check, gate: GateKind, data: int) -> tuple[int, int]:
    # CSS Z checks take the data qubit as control; everything else uses the
    # check qubit as control.
    if arch.variant is CodeVariant.CSS and check.kind == "Z":
        return (data, check.qubit)
    return (check.qubit, data)


def _idle_noise(noise: NoiseParams, layer_kind: LayerKind, idle: list[int]) -> list[NoiseOp]:
    ch = idle_channel(noise, layer_kind)
    if ch.total_rate == 0.0:
        return []
    return [NoiseOp(ch, (q,)) for q in sorted(idle)]


def insert_swap_overhead(
    plan: list[Layer],
    arch: ArchitectureParams,
    noise: NoiseParams,
    traveling: dict[int, list[int]],
    all_qubits: range,
) -> list[Layer]:
    """Wrap each two-qubit gate layer of `plan` in SWAP-hop noise layers.

    `traveling[i]` names the measurement qubits journeying during gate layer
    index i.  Each gains k = 4(n_x + n_y) - 10 depolarizing events at the
    SWAP rate, half before the gate and half after; qubits idle during a
    SWAP step accrue one biased idling event per step (or none, if the
    single-idle-per-gate convention is selected).
    """
    k = swaps_per_gate(arch.n_x, arch.n_y)
    out_steps = (k + 1) // 2
    back_steps = k // 2
    per_step_idle = noise.idle_during_swaps is IdleDuringSwaps.PER_STEP
    hop = swap_hop_channel(noise)

    result: list[Layer] = []
    for i, layer in enumerate(plan):
        movers = traveling.get(i)
        if movers is None:
            result.append(layer)
            continue
        idle = [q for q in all_qubits if q not in set(movers)]

        def swap_layer() -> Layer:
            noise_ops = [NoiseOp(hop, (q,)) for q in sorted(movers)]
            if per_step_idle:
                noise_ops += _idle_noise(noise, LayerKind.SWAP, idle)
            return Layer(ideal_ops=[], noise_ops=noise_ops)

        result.extend(swap_layer() for _ in range(out_steps))
        result.append(layer)
        result.extend(swap_layer() for _ in range(back_steps))
    return result


def build_memory_experiment(
    arch: ArchitectureParams,
    noise: NoiseParams,
    rounds: int | None = None,
) -> Circuit:
    """Full noisy memory experiment for the given architecture and noise."""
    if rounds is None:
        rounds = default_rounds(arch.distance)
    if rounds < 1:
        raise ValueError(f"need rounds >= 1, got {rounds}")

    layout = build_layout(arch.distance)
    plan = memory_plan(arch, layout)
    schedule = stabilizer_schedule(arch)
    all_qubits = range(layout.num_qubits)
    check_qubits = [c.qubit for c in layout.checks]
    check_by_qubit = {c.qubit: c for c in layout.checks}

    check_basis = {}
    for c in layout.checks:
        if arch.variant is CodeVariant.XZZX:
            check_basis[c.qubit] = "X"
        else:
            check_basis[c.qubit] = "X" if c.kind == "X" else "Z"

    layers: list[Layer] = []
    # Measurement index bookkeeping: checks are measured in ascending qubit
    # order each round, then all data qubits in ascending order at the end.
    meas_per_round = layout.num_checks

    for r in range(rounds):
        # Check reset (plus data initialization in the first round).
        reset_ops = []
        reset_noise = []
        for q in check_qubits:
            basis = check_basis[q]
            reset_ops.append(Instruction(_RESET[basis], (q,)))
            reset_noise.append(NoiseOp(channel_for(_RESET[basis], noise), (q,)))
        if r == 0:
            for q in range(layout.num_data):
                basis = plan.init_basis[q]
                reset_ops.append(Instruction(_RESET[basis], (q,)))
                reset_noise.append(NoiseOp(channel_for(_RESET[basis], noise), (q,)))
            idle: list[int] = []
        else:
            idle = list(range(layout.num_data))
        reset_ops.sort(key=lambda op: op.targets)
        reset_noise.sort(key=lambda op: op.targets)
        layers.append(
            Layer(reset_ops, reset_noise + _idle_noise(noise, LayerKind.RESET, idle))
        )

        # Four gate layers, wrapped with SWAP overhead.
        gate_layers: list[Layer] = []
        traveling: dict[int, list[int]] = {}
        for step in range(4):
            ops = []
            nops = []
            movers = []
            busy: set[int] = set()
            for cq in check_qubits:
                for s, gate, data in schedule[cq]:
                    if s != step:
                        continue
                    targets = _gate_targets(arch, check_by_qubit[cq], gate, data)
                    ops.append(Instruction(gate, targets))
                    nops.append(NoiseOp(channel_for(gate, noise), targets))
                    movers.append(cq)
                    busy.update(targets)
            idle = [q for q in all_qubits if q not in busy]
            gate_layers.append(
                Layer(ops, nops + _idle_noise(noise, LayerKind.TWO_QUBIT, idle))
            )
            traveling[step] = movers
        layers.extend(
            insert_swap_overhead(gate_layers, arch, noise, traveling, all_qubits)
        )

        # Check readout.
        meas_ops = [Instruction(_MEASURE[check_basis[q]], (q,)) for q in check_qubits]
        meas_noise = [
            NoiseOp(channel_for(_MEASURE[check_basis[q]], noise), (q,))
            for q in check_qubits
        ]
        layers.append(
            Layer(
                meas_ops,
                meas_noise
                + _idle_noise(noise, LayerKind.READOUT, list(range(layout.num_data))),
            )
        )

    # Final transversal data measurement in the initialization basis.
    final_ops = []
    final_noise = []
    for q in range(layout.num_data):
        basis = plan.init_basis[q]
        final_ops.append(Instruction(_MEASURE[basis], (q,)))
        final_noise.append(NoiseOp(channel_for(_MEASURE[basis], noise), (q,)))
    layers.append(Layer(final_ops, final_noise))

    # Detector and observable declarations over measurement indices.
    check_rank = {q: i for i, q in enumerate(check_qubits)}
    data_meas = {q: rounds * meas_per_round + q for q in range(layout.num_data)}

    def m(check_qubit: int, r: int) -> int:
        return r * meas_per_round + check_rank[check_qubit]

    detectors: list[tuple[int, ...]] = []
    for c in layout.checks:
        if c.kind == plan.deterministic_kind:
            detectors.append((m(c.qubit, 0),))
    for r in range(1, rounds):
        for c in layout.checks:
            detectors.append((m(c.qubit, r - 1), m(c.qubit, r)))
    for c in layout.checks:
        if c.kind == plan.deterministic_kind:
            support = sorted(data_meas[q] for q in c.neighbors if q is not None)
            detectors.append((m(c.qubit, rounds - 1), *support))

    observable = tuple(sorted(data_meas[q] for q in plan.observable_data))

    circuit = Circuit(
        num_qubits=layout.num_qubits,
        layers=layers,
        detectors=detectors,
        observables=[observable],
    )
    circuit.validate()
    return circuit
