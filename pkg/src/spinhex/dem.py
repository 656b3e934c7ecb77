"""Detector error model: signature and probability of every error mechanism.

Signatures are computed by one backward sweep over the circuit.  For each
qubit we maintain the set of detectors/observables (a Python int bitmask,
detectors in the low bits) that an X or a Z inserted *at the current sweep
position* would flip.  Sweeping backward, a measurement adds its
detector/observable mask to the anticommuting frame, a reset clears both
masks, and Clifford gates transform masks by their (inverse) conjugation
action.  Each Pauli component of each noise channel then reads off its
signature directly at its own position.

Mechanisms with identical signatures merge via p <- p1 + p2 - 2 p1 p2 (the
parity of two independent coins).  Signatures flipping more than two
detectors are decomposed into pairs of existing <=2-detector mechanisms
(the X/Z split of a Y error) so the model is matchable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .circuit import ChannelKind, Circuit, GateKind, MEASURE_GATES


class UndecomposableError(ValueError):
    """A >2-detector mechanism has no decomposition into existing edges."""


@dataclass(frozen=True)
class ErrorMechanism:
    probability: float
    detectors: tuple[int, ...]  # sorted detector indices
    observable_mask: int  # bit per observable

    def __post_init__(self) -> None:
        if not 0.0 < self.probability < 1.0:
            raise ValueError(f"need 0 < p < 1, got {self.probability}")
        if tuple(sorted(set(self.detectors))) != self.detectors:
            raise ValueError(f"detectors not sorted/unique: {self.detectors}")


@dataclass(frozen=True)
class DetectorErrorModel:
    mechanisms: tuple[ErrorMechanism, ...]
    num_detectors: int
    num_observables: int

    def __post_init__(self) -> None:
        seen = set()
        for m in self.mechanisms:
            sig = (m.detectors, m.observable_mask)
            if sig in seen:
                raise ValueError(f"duplicate signature {sig}")
            seen.add(sig)


def merge_probability(p1: float, p2: float) -> float:
    """Probability that exactly one of two independent mechanisms fires."""
    return p1 + p2 - 2.0 * p1 * p2


def _measurement_masks(circuit: Circuit) -> list[int]:
    """Per measurement index, the detector/observable bitmask it feeds."""
    nd = circuit.num_detectors
    masks = [0] * circuit.num_measurements
    for i, det in enumerate(circuit.detectors):
        for m in det:
            masks[m] ^= 1 << i
    for i, obs in enumerate(circuit.observables):
        for m in obs:
            masks[m] ^= 1 << (nd + i)
    return masks


def error_locations(circuit: Circuit) -> list[tuple[float, int]]:
    """Per Pauli component of each noise op, its (probability, signature).

    One entry per nonzero-probability component, in circuit order; empty
    signatures are kept here (callers filter).  The signature bitmask has
    detectors in bits 0..D-1, observables above.
    """
    meas_mask = _measurement_masks(circuit)
    # Measurement index of each (layer, qubit) measurement.
    meas_at: dict[tuple[int, int], int] = {}
    idx = 0
    for li, layer in enumerate(circuit.layers):
        for op in layer.ideal_ops:
            if op.kind in MEASURE_GATES:
                for q in op.targets:
                    meas_at[(li, q)] = idx
                    idx += 1

    sig_x = [0] * circuit.num_qubits
    sig_z = [0] * circuit.num_qubits
    out: list[tuple[int, float, int]] = []  # (position, probability, signature)
    pos = 0
    for li in range(len(circuit.layers) - 1, -1, -1):
        layer = circuit.layers[li]
        # Noise sits after the layer's gates, so it reads the current masks,
        # except MEASURE_FLIP which hits the record of this layer directly.
        for ni in range(len(layer.noise_ops) - 1, -1, -1):
            nop = layer.noise_ops[ni]
            # Reversed so the final position sort restores component order.
            for pauli, prob in reversed(nop.channel.components()):
                if prob == 0.0:
                    continue
                if nop.channel.kind is ChannelKind.MEASURE_FLIP:
                    sig = meas_mask[meas_at[(li, nop.targets[0])]]
                else:
                    sig = 0
                    for letter, q in zip(pauli, nop.targets):
                        if letter in ("X", "Y"):
                            sig ^= sig_x[q]
                        if letter in ("Z", "Y"):
                            sig ^= sig_z[q]
                out.append((pos, prob, sig))
                pos += 1
        for op in reversed(layer.ideal_ops):
            k = op.kind
            if k in MEASURE_GATES:
                q = op.targets[0]
                mask = meas_mask[meas_at[(li, q)]]
                if k is GateKind.MEASURE_Z:
                    sig_x[q] ^= mask
                else:
                    sig_z[q] ^= mask
            elif k in (GateKind.RESET_Z, GateKind.RESET_X):
                q = op.targets[0]
                sig_x[q] = 0
                sig_z[q] = 0
            elif k is GateKind.H:
                q = op.targets[0]
                sig_x[q], sig_z[q] = sig_z[q], sig_x[q]
            elif k is GateKind.CX:
                c, t = op.targets
                sig_x[c] ^= sig_x[t]
                sig_z[t] ^= sig_z[c]
            elif k is GateKind.CZ:
                c, t = op.targets
                sig_x[c] ^= sig_z[t]
                sig_x[t] ^= sig_z[c]
            else:
                raise AssertionError(k)
    # Restore circuit order (the sweep visited locations back to front).
    out.sort(key=lambda e: -e[0])
    return [(prob, sig) for _, prob, sig in out]


def injection_specs(circuit: Circuit) -> list[tuple[int, tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    """Per error location, (layer, x-flip qubits, z-flip qubits, record flips).

    Aligned index-for-index with `error_locations`; feed the entries to
    `sampler.sample_injected` to reproduce any location deterministically.
    """
    meas_at: dict[tuple[int, int], int] = {}
    idx = 0
    for li, layer in enumerate(circuit.layers):
        for op in layer.ideal_ops:
            if op.kind in MEASURE_GATES:
                meas_at[(li, op.targets[0])] = idx
                idx += 1

    specs = []
    for li, layer in enumerate(circuit.layers):
        for nop in layer.noise_ops:
            for pauli, prob in nop.channel.components():
                if prob == 0.0:
                    continue
                if nop.channel.kind is ChannelKind.MEASURE_FLIP:
                    specs.append((li, (), (), (meas_at[(li, nop.targets[0])],)))
                    continue
                xq = tuple(
                    q for letter, q in zip(pauli, nop.targets) if letter in ("X", "Y")
                )
                zq = tuple(
                    q for letter, q in zip(pauli, nop.targets) if letter in ("Z", "Y")
                )
                specs.append((li, xq, zq, ()))
    return specs


def _split_signature(sig: int, num_detectors: int) -> tuple[tuple[int, ...], int]:
    dets = tuple(
        i for i in range(num_detectors) if sig >> i & 1
    )
    return dets, sig >> num_detectors


def build_dem(circuit: Circuit) -> DetectorErrorModel:
    """Merged, decomposed detector error model of a noisy circuit."""
    nd = circuit.num_detectors
    merged: dict[int, float] = {}
    for prob, sig in error_locations(circuit):
        if sig == 0:
            continue
        merged[sig] = merge_probability(merged.get(sig, 0.0), prob)

    undetectable = [s for s in merged if s >> nd and not s & ((1 << nd) - 1)]
    if undetectable:
        warnings.warn(
            f"{len(undetectable)} mechanism(s) flip only the observable; "
            "they bound the achievable logical fidelity",
            stacklevel=2,
        )

    def det_count(sig: int) -> int:
        return (sig & ((1 << nd) - 1)).bit_count()

    edges = {sig: p for sig, p in merged.items() if det_count(sig) <= 2}
    hyper = {sig: p for sig, p in merged.items() if det_count(sig) > 2}
    edge_keys = sorted(edges, key=lambda s: _split_signature(s, nd))
    for sig in sorted(hyper, key=lambda s: _split_signature(s, nd)):
        parts = _decompose(sig, edge_keys, nd)
        if parts is None:
            dets, mask = _split_signature(sig, nd)
            raise UndecomposableError(
                f"mechanism p={hyper[sig]} detectors={dets} mask={mask:b} "
                "has no decomposition into existing edges"
            )
        for part in parts:
            edges[part] = merge_probability(edges[part], hyper[sig])

    mechanisms = tuple(
        ErrorMechanism(edges[sig], *_split_signature(sig, nd))
        for sig in sorted(edges, key=lambda s: _split_signature(s, nd))
    )
    return DetectorErrorModel(mechanisms, nd, circuit.num_observables)


def _decompose(sig: int, edge_keys: list[int], nd: int) -> tuple[int, int] | None:
    """First (lexicographic) pair of existing edges XORing to `sig`."""
    index = set(edge_keys)
    for e1 in edge_keys:
        e2 = sig ^ e1
        if e2 in index and (e2 & ((1 << nd) - 1)).bit_count() <= 2:
            return (e1, e2)
    return None


def emit(dem: DetectorErrorModel) -> str:
    lines = [f"dem detectors {dem.num_detectors} observables {dem.num_observables}"]
    for m in dem.mechanisms:
        parts = [f"error({m.probability!r})"]
        parts += [f"D{d}" for d in m.detectors]
        parts += [f"L{i}" for i in range(dem.num_observables) if m.observable_mask >> i & 1]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse(text: str) -> DetectorErrorModel:
    mechanisms = []
    nd = no = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "dem":
            if parts[1] != "detectors" or parts[3] != "observables":
                raise ValueError(f"line {lineno}: bad header")
            nd, no = int(parts[2]), int(parts[4])
        elif parts[0].startswith("error(") and parts[0].endswith(")"):
            prob = float(parts[0][len("error(") : -1])
            dets = []
            mask = 0
            for tok in parts[1:]:
                if tok.startswith("D"):
                    dets.append(int(tok[1:]))
                elif tok.startswith("L"):
                    mask |= 1 << int(tok[1:])
                else:
                    raise ValueError(f"line {lineno}: bad target {tok!r}")
            mechanisms.append(ErrorMechanism(prob, tuple(sorted(dets)), mask))
        else:
            raise ValueError(f"line {lineno}: unknown line {line!r}")
    if nd is None:
        raise ValueError("missing dem header line")
    return DetectorErrorModel(tuple(mechanisms), nd, no)
