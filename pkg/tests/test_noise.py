"""Rate table and bias structure of the noise model."""

import math

import pytest
from hypothesis import given, strategies as st

from spinhex.circuit import ChannelKind, GateKind
from spinhex.noise import (
    IdleDuringSwaps,
    LayerKind,
    NoiseParams,
    bias_of,
    channel_for,
    idle_channel,
    swap_hop_channel,
)


def test_rate_table():
    n = NoiseParams(p=0.004)
    assert channel_for(GateKind.CX, n).kind is ChannelKind.DEPOLARIZE2
    assert channel_for(GateKind.CX, n).total_rate == 0.004
    assert channel_for(GateKind.CZ, n).total_rate == 0.004
    assert channel_for(GateKind.H, n).kind is ChannelKind.DEPOLARIZE1
    assert channel_for(GateKind.H, n).total_rate == pytest.approx(0.0004)
    assert channel_for(GateKind.RESET_Z, n).kind is ChannelKind.X_FLIP
    assert channel_for(GateKind.RESET_X, n).kind is ChannelKind.Z_FLIP
    assert channel_for(GateKind.RESET_Z, n).total_rate == pytest.approx(0.008)
    assert channel_for(GateKind.MEASURE_Z, n).kind is ChannelKind.MEASURE_FLIP
    assert channel_for(GateKind.MEASURE_X, n).total_rate == pytest.approx(0.008)
    assert swap_hop_channel(n).total_rate == pytest.approx(0.8 * 0.004)


def test_readout_idle_published_example():
    n = NoiseParams(p=0.001, eta=100.0)
    ch = idle_channel(n, LayerKind.READOUT)
    probs = dict(ch.components())
    assert ch.total_rate == pytest.approx(7e-4)
    assert probs["Z"] == pytest.approx((100.0 / 101.0) * 7e-4)
    assert probs["X"] == pytest.approx(7e-4 / 202.0)
    assert probs["Y"] == pytest.approx(7e-4 / 202.0)


def test_single_qubit_layer_idle_rate():
    n = NoiseParams(p=0.004)
    assert idle_channel(n, LayerKind.SINGLE_QUBIT).total_rate == pytest.approx(
        0.004 / 100.0
    )


def test_half_bias_is_depolarizing():
    ch = idle_channel(NoiseParams(p=0.003, eta=0.5), LayerKind.TWO_QUBIT)
    probs = dict(ch.components())
    assert probs["X"] == pytest.approx(probs["Y"])
    assert probs["X"] == pytest.approx(probs["Z"])
    assert probs["X"] == pytest.approx(ch.total_rate / 3.0)


def test_zero_rate():
    n = NoiseParams(p=0.0)
    for gate in GateKind:
        assert channel_for(gate, n).total_rate == 0.0
    for layer in LayerKind:
        assert idle_channel(n, layer).total_rate == 0.0


def test_swap_rate_override():
    n = NoiseParams(p=0.002, swap_rate_override=0.01)
    assert swap_hop_channel(n).total_rate == 0.01
    assert swap_hop_channel(NoiseParams(p=0.002)).total_rate == pytest.approx(0.0016)


def test_param_validation():
    with pytest.raises(ValueError):
        NoiseParams(p=-0.001)
    with pytest.raises(ValueError):
        NoiseParams(p=0.2)
    with pytest.raises(ValueError):
        NoiseParams(p=0.001, eta=0.0)
    with pytest.raises(ValueError):
        NoiseParams(p=0.001, xi_reset=-1.0)


_p = st.floats(min_value=0.0, max_value=0.1)
_eta = st.one_of(
    st.floats(min_value=1e-6, max_value=1e9), st.just(math.inf)
)


@given(_p, _eta, st.sampled_from(list(LayerKind)))
def test_components_sum_to_rate(p, eta, layer):
    ch = idle_channel(NoiseParams(p=p, eta=eta), layer)
    ch.validate()
    total = sum(prob for _, prob in ch.components())
    assert total == pytest.approx(ch.total_rate, abs=1e-15)
    assert all(prob >= 0.0 for _, prob in ch.components())


@given(st.floats(min_value=1e-6, max_value=0.1), _eta)
def test_bias_exact(p, eta):
    ch = idle_channel(NoiseParams(p=p, eta=eta), LayerKind.TWO_QUBIT)
    if math.isinf(eta):
        probs = dict(ch.components())
        assert probs["X"] == 0.0 and probs["Y"] == 0.0
        assert bias_of(ch) == math.inf
    else:
        assert bias_of(ch) == pytest.approx(eta, rel=1e-9)


@given(_p, st.sampled_from(list(GateKind)))
def test_channel_for_total(p, gate):
    ch = channel_for(gate, NoiseParams(p=p))
    ch.validate()


def test_idle_during_swaps_enum_roundtrip():
    assert IdleDuringSwaps("per_step") is IdleDuringSwaps.PER_STEP
    assert IdleDuringSwaps("single") is IdleDuringSwaps.SINGLE
