"""Bit-packed Pauli-frame Monte Carlo sampling of detector/observable bits.

Shots are packed 64 per machine word; X/Z frames propagate through the
ideal Clifford layer by word-wise XOR and measurements record the frame-
induced flip (the reference parity of every detector and observable is
verified to be 0 up front, so frame propagation is exact).

Noise channels are compiled once per circuit into a flat event program.
Consecutive single-qubit channels on the same qubit with no intervening
gate or measurement are composed exactly (stochastic Pauli channels
commute; composition is a pointwise product in the 4-element Walsh basis),
which collapses the long SWAP-hop chains into one draw per qubit per gate
step.  Each event consumes one uniform per shot, keyed by (seed, event,
shot), so results are independent of batch partitioning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import ChannelKind, Circuit, GateKind, MEASURE_GATES, RESET_GATES
from .rng import uniforms
from .tableau import verify_deterministic

_BATCH_SHOTS = 1 << 16  # multiple of 64; internal only, must not affect bits

# Single-qubit Pauli distributions are 4-vectors indexed bx + 2*bz:
# 0 = I, 1 = X, 2 = Z, 3 = Y.  _H4 is the Walsh transform for that indexing.
_H4 = np.array(
    [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]],
    dtype=np.float64,
)
_VEC_PAULIS = (None, ((1,), ()), ((), (1,)), ((1,), (1,)))  # target-slot lists


@dataclass(frozen=True)
class _Event:
    """One RNG draw: cumulative component bounds and the flips they cause."""

    index: int
    cums: np.ndarray  # ascending upper bounds; cums[-1] = total rate
    # Per component: (x-flip qubits, z-flip qubits, record index or None).
    comps: tuple[tuple[tuple[int, ...], tuple[int, ...], int | None], ...]


@dataclass
class FrameBatch:
    """Working state for one batch of shots."""

    shots: int
    frame_x: np.ndarray  # (qubits, words) uint64
    frame_z: np.ndarray
    records: np.ndarray  # (measurements, words) uint64


@dataclass(frozen=True)
class SampleResult:
    """Packed detector/observable bits; matrices are (rows, shot words)."""

    shots: int
    seed: int
    det_words: np.ndarray  # (num_detectors, ceil(shots/64)) uint64
    obs_words: np.ndarray  # (num_observables, words) uint64

    def __post_init__(self) -> None:
        words = (self.shots + 63) // 64
        if self.det_words.shape[1:] != (words,) or self.obs_words.shape[1:] != (words,):
            raise ValueError("bit matrix width inconsistent with shot count")

    def __eq__(self, other):
        return (
            isinstance(other, SampleResult)
            and self.shots == other.shots
            and self.seed == other.seed
            and np.array_equal(self.det_words, other.det_words)
            and np.array_equal(self.obs_words, other.obs_words)
        )

    @property
    def num_detectors(self) -> int:
        return self.det_words.shape[0]

    @property
    def num_observables(self) -> int:
        return self.obs_words.shape[0]

    def detector_bits(self) -> np.ndarray:
        """Unpacked (shots, detectors) boolean matrix."""
        return unpack_bits(self.det_words, self.shots).T

    def observable_bits(self) -> np.ndarray:
        return unpack_bits(self.obs_words, self.shots).T


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """(rows, shots) booleans -> (rows, words) uint64, bit i = shot 64w+i."""
    rows, shots = bits.shape
    words = (shots + 63) // 64
    padded = np.zeros((rows, words * 64), dtype=np.uint8)
    padded[:, :shots] = bits
    as_bytes = np.packbits(padded, axis=1, bitorder="little")
    return as_bytes.reshape(rows, words, 8).view(np.uint64).reshape(rows, words)


def unpack_bits(words: np.ndarray, shots: int) -> np.ndarray:
    """(rows, words) uint64 -> (rows, shots) booleans."""
    as_bytes = words.astype("<u8").view(np.uint8).reshape(words.shape[0], -1)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :shots].astype(bool)


def _channel_vec(kind: ChannelKind, args: tuple[float, ...]) -> np.ndarray:
    if kind is ChannelKind.DEPOLARIZE1:
        r = args[0]
        return np.array([1.0 - r, r / 3.0, r / 3.0, r / 3.0])
    if kind is ChannelKind.X_FLIP:
        return np.array([1.0 - args[0], args[0], 0.0, 0.0])
    if kind is ChannelKind.Z_FLIP:
        return np.array([1.0 - args[0], 0.0, args[0], 0.0])
    if kind is ChannelKind.BIASED_PAULI1:
        rate, eta = args
        if np.isinf(eta):
            return np.array([1.0 - rate, 0.0, rate, 0.0])
        pxy = rate / (2.0 * (1.0 + eta))
        return np.array([1.0 - rate, pxy, rate * eta / (1.0 + eta), pxy])
    raise AssertionError(kind)


def _compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = _H4 @ ((_H4 @ a) * (_H4 @ b)) / 4.0
    return np.clip(out, 0.0, 1.0)


@dataclass(frozen=True)
class _Program:
    ops: tuple[tuple, ...]
    num_events: int
    layer_ends: tuple[int, ...]  # ops index just past each layer's ideal ops


def _compile(circuit: Circuit, *, noiseless: bool = False) -> _Program:
    ops: list[tuple] = []
    layer_ends: list[int] = []
    pending: dict[int, np.ndarray] = {}
    counter = 0

    def emit_event(comps, probs) -> None:
        nonlocal counter
        keep = [(c, p) for c, p in zip(comps, probs) if p > 0.0]
        if not keep:
            return
        cums = np.cumsum([p for _, p in keep])
        ops.append(("EV", _Event(counter, cums, tuple(c for c, _ in keep))))
        counter += 1

    def flush(q: int) -> None:
        vec = pending.pop(q, None)
        if vec is None:
            return
        comps = [((q,), (), None), ((), (q,), None), ((q,), (q,), None)]
        emit_event(comps, [vec[1], vec[2], vec[3]])

    meas_index = 0
    for layer in circuit.layers:
        measured_at: dict[int, int] = {}
        for op in layer.ideal_ops:
            k = op.kind
            if k in (GateKind.CX, GateKind.CZ):
                for q in sorted(op.targets):
                    flush(q)
                ops.append((k.value, *op.targets))
            elif k is GateKind.H:
                flush(op.targets[0])
                ops.append(("H", op.targets[0]))
            elif k in RESET_GATES:
                # Noise before a reset is wiped; drop it instead of drawing.
                pending.pop(op.targets[0], None)
                ops.append(("R", op.targets[0]))
            elif k in MEASURE_GATES:
                q = op.targets[0]
                flush(q)
                basis = "MX" if k is GateKind.MEASURE_X else "MZ"
                ops.append((basis, q, meas_index))
                measured_at[q] = meas_index
                meas_index += 1
            else:
                raise AssertionError(k)
        layer_ends.append(len(ops))
        if noiseless:
            continue
        for nop in layer.noise_ops:
            ck = nop.channel.kind
            if ck is ChannelKind.DEPOLARIZE2:
                r = nop.channel.total_rate
                if r == 0.0:
                    continue
                a, b = nop.targets
                comps = []
                for pa in range(4):
                    for pb in range(4):
                        if pa == pb == 0:
                            continue
                        xq = tuple(
                            q for q, pp in ((a, pa), (b, pb)) if pp in (1, 3)
                        )
                        zq = tuple(
                            q for q, pp in ((a, pa), (b, pb)) if pp in (2, 3)
                        )
                        comps.append((xq, zq, None))
                emit_event(comps, [r / 15.0] * 15)
            elif ck is ChannelKind.MEASURE_FLIP:
                r = nop.channel.total_rate
                if r == 0.0:
                    continue
                emit_event([((), (), measured_at[nop.targets[0]])], [r])
            else:
                q = nop.targets[0]
                vec = _channel_vec(ck, nop.channel.args)
                pending[q] = _compose(pending[q], vec) if q in pending else vec
    # Leftover pending noise sits after every measurement of its qubit and
    # can never flip anything; discard.
    return _Program(tuple(ops), counter, tuple(layer_ends))


def _run_event(
    ev: _Event,
    batch: FrameBatch,
    seed: int,
    first_shot: int,
) -> None:
    u = uniforms(seed, ev.index, first_shot, batch.shots)
    hit = np.flatnonzero(u < ev.cums[-1])
    if hit.size == 0:
        return
    comp = np.searchsorted(ev.cums, u[hit], side="right")
    one = np.uint64(1)
    for ci, (xq, zq, rec) in enumerate(ev.comps):
        sel = hit[comp == ci]
        if sel.size == 0:
            continue
        mask = np.zeros(batch.frame_x.shape[1], dtype=np.uint64)
        np.bitwise_xor.at(mask, sel >> 6, one << (sel & 63).astype(np.uint64))
        for q in xq:
            batch.frame_x[q] ^= mask
        for q in zq:
            batch.frame_z[q] ^= mask
        if rec is not None:
            batch.records[rec] ^= mask


def _new_batch(circuit: Circuit, shots: int) -> FrameBatch:
    words = (shots + 63) // 64
    return FrameBatch(
        shots=shots,
        frame_x=np.zeros((circuit.num_qubits, words), dtype=np.uint64),
        frame_z=np.zeros((circuit.num_qubits, words), dtype=np.uint64),
        records=np.zeros((circuit.num_measurements, words), dtype=np.uint64),
    )


def _apply_ops(ops, batch: FrameBatch, seed: int, first_shot: int) -> None:
    fx, fz = batch.frame_x, batch.frame_z
    for op in ops:
        tag = op[0]
        if tag == "EV":
            _run_event(op[1], batch, seed, first_shot)
        elif tag == "CX":
            c, t = op[1], op[2]
            fx[t] ^= fx[c]
            fz[c] ^= fz[t]
        elif tag == "CZ":
            c, t = op[1], op[2]
            fz[t] ^= fx[c]
            fz[c] ^= fx[t]
        elif tag == "H":
            q = op[1]
            fx[q], fz[q] = fz[q].copy(), fx[q].copy()
        elif tag == "R":
            fx[op[1]] = 0
            fz[op[1]] = 0
        elif tag == "MZ":
            batch.records[op[2]] = fx[op[1]]
        elif tag == "MX":
            batch.records[op[2]] = fz[op[1]]
        else:
            raise AssertionError(tag)


def _run_batch(
    program: _Program,
    circuit: Circuit,
    seed: int,
    first_shot: int,
    shots: int,
) -> FrameBatch:
    batch = _new_batch(circuit, shots)
    _apply_ops(program.ops, batch, seed, first_shot)
    return batch


def sample(
    circuit: Circuit,
    shots: int,
    seed: int,
    *,
    first_shot: int = 0,
    check: bool = True,
    workers: int = 1,
) -> SampleResult:
    """Sample detector and observable bits; pure in (circuit, shots, seed).

    `first_shot` offsets the shot counter so a long run can be split into
    consecutive calls without changing any bit (it must be word-aligned).
    `workers` threads split the batches; they only affect wall time.
    `check=False` skips the noiseless-determinism verification; callers may
    do so only when the same ideal circuit was already verified.
    """
    if shots < 1:
        raise ValueError(f"need shots >= 1, got {shots}")
    if first_shot % 64 != 0 or first_shot < 0:
        raise ValueError(f"first_shot must be a non-negative multiple of 64, got {first_shot}")
    if check:
        verify_deterministic(circuit)
    program = _compile(circuit)

    words = (shots + 63) // 64
    det_words = np.zeros((circuit.num_detectors, words), dtype=np.uint64)
    obs_words = np.zeros((circuit.num_observables, words), dtype=np.uint64)

    def run_one(lo: int) -> None:
        nb = min(_BATCH_SHOTS, shots - lo)
        batch = _run_batch(program, circuit, seed, first_shot + lo, nb)
        wlo = lo // 64
        whi = wlo + (nb + 63) // 64
        for i, group in enumerate(circuit.detectors):
            acc = np.zeros(whi - wlo, dtype=np.uint64)
            for m in group:
                acc ^= batch.records[m]
            det_words[i, wlo:whi] = acc
        for i, group in enumerate(circuit.observables):
            acc = np.zeros(whi - wlo, dtype=np.uint64)
            for m in group:
                acc ^= batch.records[m]
            obs_words[i, wlo:whi] = acc

    starts = range(0, shots, _BATCH_SHOTS)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_one, starts))
    else:
        for lo in starts:
            run_one(lo)
    return SampleResult(shots, seed, det_words, obs_words)


def sample_injected(
    circuit: Circuit,
    injections,
    *,
    check: bool = True,
) -> SampleResult:
    """Noiseless run with one deterministic error injected per shot.

    `injections[s]` is (layer_index, x_flip_qubits, z_flip_qubits,
    record_flip_indices); the flips land after that layer's ideal gates
    (the position of the layer's noise annotations).  Shot s sees only its
    own injection, so one call checks many error locations at once.
    """
    shots = len(injections)
    if shots < 1:
        raise ValueError("need at least one injection")
    if check:
        verify_deterministic(circuit)
    program = _compile(circuit, noiseless=True)
    batch = _new_batch(circuit, shots)

    by_layer: dict[int, list[tuple[int, tuple, tuple, tuple]]] = {}
    for s, (li, xq, zq, recs) in enumerate(injections):
        if not 0 <= li < len(circuit.layers):
            raise ValueError(f"injection layer {li} out of range")
        by_layer.setdefault(li, []).append((s, tuple(xq), tuple(zq), tuple(recs)))

    one = np.uint64(1)
    start = 0
    for li, end in enumerate(program.layer_ends):
        _apply_ops(program.ops[start:end], batch, 0, 0)
        start = end
        for s, xq, zq, recs in by_layer.get(li, ()):
            bit = one << np.uint64(s & 63)
            w = s >> 6
            for q in xq:
                batch.frame_x[q, w] ^= bit
            for q in zq:
                batch.frame_z[q, w] ^= bit
            for m in recs:
                batch.records[m, w] ^= bit
    _apply_ops(program.ops[start:], batch, 0, 0)

    words = (shots + 63) // 64
    det_words = np.zeros((circuit.num_detectors, words), dtype=np.uint64)
    obs_words = np.zeros((circuit.num_observables, words), dtype=np.uint64)
    for i, group in enumerate(circuit.detectors):
        for m in group:
            det_words[i] ^= batch.records[m]
    for i, group in enumerate(circuit.observables):
        for m in group:
            obs_words[i] ^= batch.records[m]
    return SampleResult(shots, 0, det_words, obs_words)


_MAGIC = "spinhex-bits"


def _header(result: SampleResult, extra: str = "") -> str:
    line = (
        f"{_MAGIC} shots={result.shots} detectors={result.num_detectors} "
        f"observables={result.num_observables} seed={result.seed}"
    )
    if extra:
        line += f" # {extra}"
    return line + "\n"


def _parse_header(line: str) -> dict[str, int]:
    line = line.split("#", 1)[0]
    parts = line.split()
    if not parts or parts[0] != _MAGIC:
        raise ValueError(f"bad header {line!r}")
    return {k: int(v) for k, v in (tok.split("=") for tok in parts[1:])}


def write_bits(result: SampleResult, path: str, extra: str = "") -> None:
    """Binary form: header line (optionally with a trailing comment carrying
    the producing configuration), then both matrices row-major as LE words."""
    with open(path, "wb") as f:
        f.write(_header(result, extra).encode())
        f.write(result.det_words.astype("<u8").tobytes())
        f.write(result.obs_words.astype("<u8").tobytes())


def read_bits(path: str) -> SampleResult:
    with open(path, "rb") as f:
        fields = _parse_header(f.readline().decode())
        words = (fields["shots"] + 63) // 64
        nd, no = fields["detectors"], fields["observables"]
        raw = np.frombuffer(f.read(), dtype="<u8")
    if raw.size != (nd + no) * words:
        raise ValueError("bit file size inconsistent with header")
    return SampleResult(
        fields["shots"],
        fields["seed"],
        raw[: nd * words].reshape(nd, words).astype(np.uint64),
        raw[nd * words :].reshape(no, words).astype(np.uint64),
    )


def to_text01(result: SampleResult) -> str:
    """One line per shot: detector bits, a space, observable bits."""
    det = unpack_bits(result.det_words, result.shots)
    obs = unpack_bits(result.obs_words, result.shots)
    lines = [_header(result).rstrip("\n")]
    for s in range(result.shots):
        lines.append(
            "".join("1" if b else "0" for b in det[:, s])
            + " "
            + "".join("1" if b else "0" for b in obs[:, s])
        )
    return "\n".join(lines) + "\n"


def from_text01(text: str) -> SampleResult:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    fields = _parse_header(lines[0])
    shots, nd, no = fields["shots"], fields["detectors"], fields["observables"]
    if len(lines) - 1 != shots:
        raise ValueError("shot count mismatch")
    det = np.zeros((nd, shots), dtype=bool)
    obs = np.zeros((no, shots), dtype=bool)
    for s, line in enumerate(lines[1:]):
        dpart, _, opart = line.partition(" ")
        if len(dpart) != nd or len(opart) != no:
            raise ValueError(f"bad bit row at shot {s}")
        det[:, s] = [c == "1" for c in dpart]
        obs[:, s] = [c == "1" for c in opart]
    return SampleResult(shots, fields["seed"], pack_bits(det), pack_bits(obs))
