import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from legoqec.channels import (
    amplitude_damping,
    channel_from_eq4,
    choi_trace_distance,
    gadget_channel,
    gamma_from_delta,
    pauli_channel,
    reset_channel,
)

deltas = st.floats(0.0, 1.0, allow_nan=False)


@given(deltas)
def test_three_constructions_agree(d):
    a, b, c = channel_from_eq4(d), gadget_channel(d), amplitude_damping(gamma_from_delta(d))
    assert choi_trace_distance(a, b) < 1e-10
    # sqrt(1 - gamma) is ill-conditioned as gamma -> 1; one ulp in gamma costs ~1e-8 there
    if d <= 1 - 1e-6 or d == 1.0:
        assert choi_trace_distance(a, c) < 1e-10


@given(deltas)
def test_cptp(d):
    assert channel_from_eq4(d).is_cptp()
    assert gadget_channel(d).is_cptp()


@given(deltas)
def test_excited_population_decay(d):
    rho = np.diag([0, 1]).astype(complex)
    out = channel_from_eq4(d).apply(rho)
    assert out[1, 1].real == pytest.approx((1 - d) ** 2, abs=1e-12)
    if d < 1:
        gamma_t = 2 * math.log(1 / (1 - d))
        assert out[1, 1].real == pytest.approx(math.exp(-gamma_t), abs=1e-12)


def test_kraus_round_trip():
    ch = channel_from_eq4(0.37)
    from legoqec.channels import Channel

    assert choi_trace_distance(Channel.from_kraus(ch.kraus()), ch) < 1e-12


def test_reset_and_pauli():
    rho = np.array([[0.3, 0.2], [0.2, 0.7]], dtype=complex)
    assert np.allclose(reset_channel().apply(rho), np.diag([1, 0]))
    assert np.allclose(pauli_channel(0, 0, 0.5).apply(rho), np.diag([0.3, 0.7]))


def test_delta_out_of_range():
    with pytest.raises(ValueError):
        channel_from_eq4(1.2)
