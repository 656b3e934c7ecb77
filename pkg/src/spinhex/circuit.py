"""Circuit representation for noisy memory experiments, plus its text format.

A circuit is an ordered list of layers.  Each layer holds ideal Clifford
instructions (applied in parallel, at most one per qubit) followed by
stochastic Pauli noise annotations.  Measurement outcomes are indexed in
program order; detectors and the logical observable are declared as sets of
measurement indices whose parity is deterministic (and zero) in the
noiseless circuit.

Text format (one instruction per line):

    KIND q0 [q1] [args...]
    TICK                       # layer separator
    DETECTOR m0 m1 ...
    OBSERVABLE m0 m1 ...

Measurement indices count from 0 in program order.  `parse(emit(c)) == c`
bit-exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class GateKind(enum.Enum):
    RESET_Z = "RESET_Z"
    RESET_X = "RESET_X"
    H = "H"
    CX = "CX"
    CZ = "CZ"
    MEASURE_Z = "MEASURE_Z"
    MEASURE_X = "MEASURE_X"


TWO_QUBIT_GATES = (GateKind.CX, GateKind.CZ)
MEASURE_GATES = (GateKind.MEASURE_Z, GateKind.MEASURE_X)
RESET_GATES = (GateKind.RESET_Z, GateKind.RESET_X)


class ChannelKind(enum.Enum):
    DEPOLARIZE1 = "DEPOLARIZE1"
    DEPOLARIZE2 = "DEPOLARIZE2"
    BIASED_PAULI1 = "BIASED_PAULI1"
    X_FLIP = "X_FLIP"
    Z_FLIP = "Z_FLIP"
    MEASURE_FLIP = "MEASURE_FLIP"


_TWO_QUBIT_PAULIS = tuple(
    a + b for a in "IXYZ" for b in "IXYZ" if (a, b) != ("I", "I")
)


@dataclass(frozen=True)
class PauliChannel:
    """A stochastic Pauli channel, stored by kind plus its defining args.

    `args` are the physical parameters, not the per-Pauli probabilities:
    a rate for all kinds except BIASED_PAULI1, which stores (rate, bias).
    """

    kind: ChannelKind
    args: tuple[float, ...]

    @property
    def num_targets(self) -> int:
        return 2 if self.kind is ChannelKind.DEPOLARIZE2 else 1

    @property
    def total_rate(self) -> float:
        return self.args[0]

    def components(self) -> list[tuple[str, float]]:
        """Per-Pauli probabilities; strings use one letter per target."""
        k, a = self.kind, self.args
        if k is ChannelKind.DEPOLARIZE1:
            return [(pauli, a[0] / 3.0) for pauli in "XYZ"]
        if k is ChannelKind.DEPOLARIZE2:
            return [(pauli, a[0] / 15.0) for pauli in _TWO_QUBIT_PAULIS]
        if k is ChannelKind.BIASED_PAULI1:
            rate, eta = a
            if math.isinf(eta):
                return [("X", 0.0), ("Y", 0.0), ("Z", rate)]
            pxy = rate / (2.0 * (1.0 + eta))
            return [("X", pxy), ("Y", pxy), ("Z", rate * eta / (1.0 + eta))]
        if k is ChannelKind.X_FLIP:
            return [("X", a[0])]
        if k is ChannelKind.Z_FLIP:
            return [("Z", a[0])]
        if k is ChannelKind.MEASURE_FLIP:
            # Classical record flip; "M" marks it as a non-Pauli component.
            return [("M", a[0])]
        raise AssertionError(k)

    def validate(self) -> None:
        total = sum(p for _, p in self.components())
        if not (0.0 <= self.total_rate <= 1.0):
            raise ValueError(f"channel rate out of range: {self}")
        if abs(total - self.total_rate) > 1e-12 * max(1.0, self.total_rate):
            raise ValueError(f"component probabilities do not sum to rate: {self}")


@dataclass(frozen=True)
class Instruction:
    kind: GateKind
    targets: tuple[int, ...]


@dataclass(frozen=True)
class NoiseOp:
    channel: PauliChannel
    targets: tuple[int, ...]


@dataclass
class Layer:
    """One time step: parallel ideal gates, then noise annotations."""

    ideal_ops: list[Instruction] = field(default_factory=list)
    noise_ops: list[NoiseOp] = field(default_factory=list)

    def __eq__(self, other):
        return (
            isinstance(other, Layer)
            and self.ideal_ops == other.ideal_ops
            and self.noise_ops == other.noise_ops
        )


@dataclass
class Circuit:
    num_qubits: int
    layers: list[Layer] = field(default_factory=list)
    detectors: list[tuple[int, ...]] = field(default_factory=list)
    observables: list[tuple[int, ...]] = field(default_factory=list)

    def __eq__(self, other):
        return (
            isinstance(other, Circuit)
            and self.num_qubits == other.num_qubits
            and self.layers == other.layers
            and self.detectors == other.detectors
            and self.observables == other.observables
        )

    @property
    def num_measurements(self) -> int:
        return sum(
            len(op.targets)
            for layer in self.layers
            for op in layer.ideal_ops
            if op.kind in MEASURE_GATES
        )

    @property
    def num_detectors(self) -> int:
        return len(self.detectors)

    @property
    def num_observables(self) -> int:
        return len(self.observables)

    def measurement_qubit_order(self) -> list[tuple[int, GateKind]]:
        """(qubit, measure kind) per measurement index, in program order."""
        out = []
        for layer in self.layers:
            for op in layer.ideal_ops:
                if op.kind in MEASURE_GATES:
                    out.extend((q, op.kind) for q in op.targets)
        return out

    def validate(self) -> None:
        n_meas = self.num_measurements
        for i, layer in enumerate(self.layers):
            seen: set[int] = set()
            for op in layer.ideal_ops:
                expect = 2 if op.kind in TWO_QUBIT_GATES else 1
                if len(op.targets) != expect or len(set(op.targets)) != len(op.targets):
                    raise ValueError(f"layer {i}: bad targets for {op}")
                for q in op.targets:
                    if not 0 <= q < self.num_qubits:
                        raise ValueError(f"layer {i}: qubit {q} out of range")
                    if q in seen:
                        raise ValueError(f"layer {i}: qubit {q} in two ideal gates")
                    seen.add(q)
            measured_here = {
                q
                for op in layer.ideal_ops
                if op.kind in MEASURE_GATES
                for q in op.targets
            }
            for nop in layer.noise_ops:
                nop.channel.validate()
                if len(nop.targets) != nop.channel.num_targets:
                    raise ValueError(f"layer {i}: arity mismatch in {nop}")
                if any(not 0 <= q < self.num_qubits for q in nop.targets):
                    raise ValueError(f"layer {i}: noise qubit out of range in {nop}")
                if nop.channel.kind is ChannelKind.MEASURE_FLIP:
                    if nop.targets[0] not in measured_here:
                        raise ValueError(
                            f"layer {i}: MEASURE_FLIP on unmeasured qubit {nop.targets[0]}"
                        )
        for group in list(self.detectors) + list(self.observables):
            for m in group:
                if not 0 <= m < n_meas:
                    raise ValueError(f"measurement index {m} out of range")


def _fmt(x: float) -> str:
    return repr(float(x))


def emit(circuit: Circuit) -> str:
    """Serialize to the line-oriented text format."""
    lines: list[str] = []
    for i, layer in enumerate(circuit.layers):
        if i > 0:
            lines.append("TICK")
        for op in layer.ideal_ops:
            lines.append(" ".join([op.kind.value, *map(str, op.targets)]))
        for nop in layer.noise_ops:
            lines.append(
                " ".join(
                    [
                        nop.channel.kind.value,
                        *map(str, nop.targets),
                        *map(_fmt, nop.channel.args),
                    ]
                )
            )
    for det in circuit.detectors:
        lines.append(" ".join(["DETECTOR", *map(str, det)]))
    for obs in circuit.observables:
        lines.append(" ".join(["OBSERVABLE", *map(str, obs)]))
    return "\n".join(lines) + "\n"


_GATE_KINDS = {k.value: k for k in GateKind}
_CHANNEL_KINDS = {k.value: k for k in ChannelKind}
_CHANNEL_ARITY = {k: (2 if k is ChannelKind.DEPOLARIZE2 else 1) for k in ChannelKind}
_CHANNEL_NARGS = {k: (2 if k is ChannelKind.BIASED_PAULI1 else 1) for k in ChannelKind}


def parse(text: str, num_qubits: int | None = None) -> Circuit:
    """Parse the text format back into a Circuit.

    `num_qubits` defaults to 1 + the largest qubit index seen.
    """
    layers = [Layer()]
    detectors: list[tuple[int, ...]] = []
    observables: list[tuple[int, ...]] = []
    max_qubit = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "TICK":
            if len(parts) != 1:
                raise ValueError(f"line {lineno}: TICK takes no arguments")
            layers.append(Layer())
        elif kind == "DETECTOR":
            detectors.append(tuple(int(x) for x in parts[1:]))
        elif kind == "OBSERVABLE":
            observables.append(tuple(int(x) for x in parts[1:]))
        elif kind in _GATE_KINDS:
            gk = _GATE_KINDS[kind]
            targets = tuple(int(x) for x in parts[1:])
            expect = 2 if gk in TWO_QUBIT_GATES else 1
            if len(targets) != expect:
                raise ValueError(f"line {lineno}: {kind} expects {expect} targets")
            max_qubit = max(max_qubit, *targets)
            layers[-1].ideal_ops.append(Instruction(gk, targets))
        elif kind in _CHANNEL_KINDS:
            ck = _CHANNEL_KINDS[kind]
            arity = _CHANNEL_ARITY[ck]
            nargs = _CHANNEL_NARGS[ck]
            if len(parts) != 1 + arity + nargs:
                raise ValueError(f"line {lineno}: bad argument count for {kind}")
            targets = tuple(int(x) for x in parts[1 : 1 + arity])
            args = tuple(float(x) for x in parts[1 + arity :])
            max_qubit = max(max_qubit, *targets)
            layers[-1].noise_ops.append(NoiseOp(PauliChannel(ck, args), targets))
        else:
            raise ValueError(f"line {lineno}: unknown instruction {kind!r}")
    circuit = Circuit(
        num_qubits=num_qubits if num_qubits is not None else max_qubit + 1,
        layers=layers,
        detectors=detectors,
        observables=observables,
    )
    return circuit
