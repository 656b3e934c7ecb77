"""Layout, schedule, and memory-circuit construction."""

import pytest

from spinhex.arch import CodeVariant, MemoryBasis, swaps_per_gate
from spinhex.builder import (
    build_memory_experiment,
    default_rounds,
    stabilizer_schedule,
)
from spinhex.circuit import ChannelKind, GateKind, TWO_QUBIT_GATES
from spinhex.layout import SCHEDULE_ORDER, build_layout, memory_plan, xzzx_action
from spinhex.noise import IdleDuringSwaps, NoiseParams
from spinhex.tableau import verify_deterministic

from conftest import make_arch


def brute_force_checks(d: int):
    """Independent enumeration of the rotated layout's stabilizers.

    Walks every even lattice coordinate and keeps candidates by the
    textbook rules: interior checks have weight 4; boundary checks have
    weight 2 and only Z (X) types survive on the top/bottom (left/right)
    boundaries.
    """
    out = []
    for b in range(d + 1):
        for a in range(d + 1):
            kind = "X" if (a + b) % 2 == 0 else "Z"
            support = [
                (i, j)
                for i, j in [(a - 1, b - 1), (a, b - 1), (a - 1, b), (a, b)]
                if 0 <= i < d and 0 <= j < d
            ]
            if not support:
                continue
            if (b in (0, d) and kind != "Z") or (a in (0, d) and kind != "X"):
                continue
            if len(support) not in (2, 4):
                continue
            out.append((a, b, kind, frozenset(support)))
    return out


@pytest.mark.parametrize("d", [3, 5, 7])
def test_layout_matches_brute_force_enumeration(d):
    layout = build_layout(d)
    expected = brute_force_checks(d)
    assert layout.num_data == d * d
    assert layout.num_checks == d * d - 1 == len(expected)
    got = {
        (c.pos[0], c.pos[1]): (
            c.kind,
            frozenset(
                layout.data_pos(q) for q in c.neighbors if q is not None
            ),
        )
        for c in layout.checks
    }
    for a, b, kind, support in expected:
        assert got[(a, b)] == (kind, support)
    weights = sorted(c.weight for c in layout.checks)
    assert weights.count(2) == 2 * (d - 1)
    assert weights.count(4) == (d - 1) ** 2


def test_schedule_never_reuses_data_qubit_within_step():
    for d in (3, 5, 7):
        layout = build_layout(d)
        for step in range(4):
            seen = set()
            for c in layout.checks:
                q = c.neighbors[step]
                if q is not None:
                    assert q not in seen
                    seen.add(q)


def test_xzzx_bulk_check_alternates_gate_types():
    arch = make_arch(5)
    layout = build_layout(5)
    schedule = stabilizer_schedule(arch)
    for check in layout.checks:
        if check.weight != 4:
            continue
        gates = [g for _, g, _ in sorted(schedule[check.qubit])]
        assert sorted(gates, key=lambda g: g.value) == [
            GateKind.CX,
            GateKind.CX,
            GateKind.CZ,
            GateKind.CZ,
        ]
        # The two CX (X action) and two CZ (Z action) land on opposite
        # schedule slots: X_a Z_b Z_c X_d around the plaquette.
        assert gates[0] == gates[3] and gates[1] == gates[2]
        assert gates[0] != gates[1]


def test_xzzx_action_reads_xzzx():
    layout = build_layout(3)
    for check in layout.checks:
        paulis = [
            xzzx_action(check, *layout.data_pos(q))
            for q in check.neighbors
            if q is not None
        ]
        assert sorted(set(paulis)) == ["X", "Z"]


def test_css_gate_orientation():
    arch = make_arch(3, CodeVariant.CSS)
    layout = build_layout(3)
    circuit = build_memory_experiment(arch, NoiseParams(p=0.0), rounds=1)
    kinds = {c.qubit: c.kind for c in layout.checks}
    for layer in circuit.layers:
        for op in layer.ideal_ops:
            if op.kind in TWO_QUBIT_GATES:
                assert op.kind is GateKind.CX
                control, target = op.targets
                if control in kinds:  # check qubit as control: X check
                    assert kinds[control] == "X"
                else:  # data as control: Z check detects X errors
                    assert kinds[target] == "Z"


@pytest.mark.parametrize(
    "variant,basis",
    [
        (CodeVariant.XZZX, MemoryBasis.H),
        (CodeVariant.XZZX, MemoryBasis.V),
        (CodeVariant.CSS, MemoryBasis.Z),
        (CodeVariant.CSS, MemoryBasis.X),
    ],
)
@pytest.mark.parametrize("d", [3, 5])
def test_noiseless_determinism(variant, basis, d):
    circuit = build_memory_experiment(
        make_arch(d, variant, basis), NoiseParams(p=0.001), rounds=3
    )
    verify_deterministic(circuit)


def test_qubit_and_round_counts():
    circuit = build_memory_experiment(
        make_arch(5), NoiseParams(p=0.001), rounds=15
    )
    assert circuit.num_qubits == 25 + 24
    assert circuit.num_measurements == 15 * 24 + 25
    assert default_rounds(5) == 15


def test_two_qubit_gate_count_matches_enumeration():
    # Per round: one gate per (check, live neighbor) pair.
    for d in (3, 5):
        rounds = 2
        circuit = build_memory_experiment(
            make_arch(d), NoiseParams(p=0.001), rounds=rounds
        )
        got = sum(
            1
            for layer in circuit.layers
            for op in layer.ideal_ops
            if op.kind in TWO_QUBIT_GATES
        )
        expected_per_round = sum(
            len(support) for *_, support in brute_force_checks(d)
        )
        assert expected_per_round == 4 * d * (d - 1)
        assert got == rounds * expected_per_round


def test_xzzx_css_share_gate_and_qubit_counts():
    def counts(variant):
        c = build_memory_experiment(
            make_arch(3, variant), NoiseParams(p=0.001), rounds=2
        )
        gates = sum(
            1
            for layer in c.layers
            for op in layer.ideal_ops
            if op.kind in TWO_QUBIT_GATES
        )
        return c.num_qubits, gates

    assert counts(CodeVariant.XZZX) == counts(CodeVariant.CSS)


def test_swap_noise_event_count():
    for nx, ny in [(2, 3), (4, 5)]:
        rounds = 2
        circuit = build_memory_experiment(
            make_arch(3, nx=nx, ny=ny), NoiseParams(p=0.002), rounds=rounds
        )
        k = swaps_per_gate(nx, ny)
        hops = sum(
            1
            for layer in circuit.layers
            for nop in layer.noise_ops
            if nop.channel.kind is ChannelKind.DEPOLARIZE1
            and nop.channel.total_rate == pytest.approx(0.8 * 0.002)
        )
        gates = sum(
            1
            for layer in circuit.layers
            for op in layer.ideal_ops
            if op.kind in TWO_QUBIT_GATES
        )
        assert gates == rounds * 4 * 3 * (3 - 1)
        assert hops == gates * k


def test_swap_split_half_before_half_after():
    noise = NoiseParams(p=0.002)
    circuit = build_memory_experiment(make_arch(3), noise, rounds=1)
    # Find the first two-qubit gate layer and count adjacent pure-noise
    # layers carrying swap-rate DEPOLARIZE1 on the traveling qubits.
    hop_rate = pytest.approx(0.8 * 0.002)

    def is_hop_layer(layer):
        return not layer.ideal_ops and any(
            nop.channel.kind is ChannelKind.DEPOLARIZE1
            and nop.channel.total_rate == hop_rate
            for nop in layer.noise_ops
        )

    gate_indices = [
        i
        for i, layer in enumerate(circuit.layers)
        if any(op.kind in TWO_QUBIT_GATES for op in layer.ideal_ops)
    ]
    k = swaps_per_gate(2, 3)
    first = gate_indices[0]
    before = 0
    i = first - 1
    while i >= 0 and is_hop_layer(circuit.layers[i]):
        before += 1
        i -= 1
    after = 0
    i = first + 1
    while i < len(circuit.layers) and is_hop_layer(circuit.layers[i]):
        after += 1
        i += 1
    assert before == (k + 1) // 2
    assert after >= k // 2  # the next gate's journey out may follow directly


def test_idle_during_swaps_flag():
    per_step = build_memory_experiment(
        make_arch(3), NoiseParams(p=0.002), rounds=1
    )
    single = build_memory_experiment(
        make_arch(3),
        NoiseParams(p=0.002, idle_during_swaps=IdleDuringSwaps.SINGLE),
        rounds=1,
    )

    def idle_events(circuit):
        return sum(
            1
            for layer in circuit.layers
            for nop in layer.noise_ops
            if nop.channel.kind is ChannelKind.BIASED_PAULI1
        )

    assert idle_events(per_step) > idle_events(single)


def test_memory_plan_xzzx_interchanging_pattern():
    layout = build_layout(3)
    plan = memory_plan(make_arch(3, CodeVariant.XZZX, MemoryBasis.H), layout)
    # Top-left data qubit starts in |+>, neighbors alternate.
    assert plan.init_basis[layout.data_index[(0, 0)]] == "X"
    assert plan.init_basis[layout.data_index[(1, 0)]] == "Z"
    assert plan.init_basis[layout.data_index[(0, 1)]] == "Z"
    assert plan.init_basis[layout.data_index[(1, 1)]] == "X"
    planv = memory_plan(make_arch(3, CodeVariant.XZZX, MemoryBasis.V), layout)
    assert planv.init_basis[layout.data_index[(0, 0)]] == "Z"


def test_memory_plan_css():
    layout = build_layout(3)
    planz = memory_plan(make_arch(3, CodeVariant.CSS, MemoryBasis.Z), layout)
    assert set(planz.init_basis.values()) == {"Z"}
    assert planz.observable_data == tuple(layout.data_index[(0, j)] for j in range(3))
    planx = memory_plan(make_arch(3, CodeVariant.CSS, MemoryBasis.X), layout)
    assert set(planx.init_basis.values()) == {"X"}
    assert planx.observable_data == tuple(layout.data_index[(i, 0)] for i in range(3))


def test_schedule_order_constants():
    assert set(SCHEDULE_ORDER) == {"X", "Z"}
    for order in SCHEDULE_ORDER.values():
        assert len(set(order)) == 4


def test_build_rejects_bad_rounds():
    with pytest.raises(ValueError):
        build_memory_experiment(make_arch(3), NoiseParams(p=0.001), rounds=0)
