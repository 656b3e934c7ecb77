"""Circuit text format: round-trip identity and validation."""

import pytest

from spinhex.arch import CodeVariant
from spinhex.builder import build_memory_experiment
from spinhex.circuit import (
    ChannelKind,
    Circuit,
    GateKind,
    Instruction,
    Layer,
    NoiseOp,
    PauliChannel,
    emit,
    parse,
)
from spinhex.noise import NoiseParams

from conftest import make_arch


@pytest.mark.parametrize("variant", [CodeVariant.XZZX, CodeVariant.CSS])
def test_roundtrip_built_circuit(variant):
    circuit = build_memory_experiment(
        make_arch(3, variant), NoiseParams(p=0.0013, eta=37.0), rounds=2
    )
    assert parse(emit(circuit)) == circuit


def test_roundtrip_preserves_float_args_bitexact():
    # 0.1 + 0.2 is deliberately not representable as a short decimal.
    ch = PauliChannel(ChannelKind.BIASED_PAULI1, (0.1 + 0.2, 99.0))
    circuit = Circuit(
        num_qubits=1,
        layers=[Layer([Instruction(GateKind.RESET_Z, (0,))], [NoiseOp(ch, (0,))])],
    )
    parsed = parse(emit(circuit))
    assert parsed.layers[0].noise_ops[0].channel.args == ch.args


def test_parse_rejects_malformed():
    with pytest.raises(ValueError):
        parse("FROB 0\n")
    with pytest.raises(ValueError):
        parse("CX 0\n")
    with pytest.raises(ValueError):
        parse("TICK 3\n")
    with pytest.raises(ValueError):
        parse("DEPOLARIZE2 0 1\n")  # missing rate argument


def test_parse_skips_comments_and_blanks():
    circuit = parse("# header\n\nRESET_Z 0\nTICK\nMEASURE_Z 0\nDETECTOR 0\n")
    assert circuit.num_qubits == 1
    assert len(circuit.layers) == 2
    assert circuit.detectors == [(0,)]


def test_validate_catches_double_targeting():
    bad = Circuit(
        num_qubits=2,
        layers=[
            Layer(
                [
                    Instruction(GateKind.RESET_Z, (0,)),
                    Instruction(GateKind.CX, (0, 1)),
                ]
            )
        ],
    )
    with pytest.raises(ValueError, match="in two ideal gates"):
        bad.validate()


def test_validate_catches_bad_measure_flip():
    bad = Circuit(
        num_qubits=1,
        layers=[
            Layer(
                [Instruction(GateKind.RESET_Z, (0,))],
                [NoiseOp(PauliChannel(ChannelKind.MEASURE_FLIP, (0.1,)), (0,))],
            )
        ],
    )
    with pytest.raises(ValueError, match="MEASURE_FLIP"):
        bad.validate()


def test_validate_catches_out_of_range_detector():
    bad = Circuit(
        num_qubits=1,
        layers=[Layer([Instruction(GateKind.MEASURE_Z, (0,))])],
        detectors=[(1,)],
    )
    with pytest.raises(ValueError, match="out of range"):
        bad.validate()


def test_measurement_indexing_is_program_order():
    circuit = parse("MEASURE_Z 3\nMEASURE_X 1\nTICK\nMEASURE_Z 0\n")
    assert circuit.num_measurements == 3
    order = circuit.measurement_qubit_order()
    assert order == [
        (3, GateKind.MEASURE_Z),
        (1, GateKind.MEASURE_X),
        (0, GateKind.MEASURE_Z),
    ]
