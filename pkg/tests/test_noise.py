import pytest
from hypothesis import given
from hypothesis import strategies as st

from legoqec.noise import NoiseModel, NoiseSpecError

probs = st.floats(0, 0.3, allow_nan=False)


@given(probs, probs, probs, st.one_of(st.none(), st.floats(0, 1)), st.sampled_from(["after_encoding", "per_gate"]))
def test_spec_round_trip(px, py, pz, delta, placement):
    m = NoiseModel((px, py, pz), relaxation_delta=delta, placement=placement)
    assert NoiseModel.from_spec(m.to_spec()) == m


def test_examples():
    m = NoiseModel.from_spec("iso:0.01;relax:0.1;placement:per_gate")
    assert m.pauli == (0.01,) * 3 and m.relaxation_delta == 0.1 and m.placement == "per_gate"
    m = NoiseModel.from_spec("q1:0.05/0/0")
    assert m.pauli_for(1) == (0.05, 0, 0) and m.pauli_for(0) == (0, 0, 0)
    assert NoiseModel.from_spec("none").is_noiseless


@pytest.mark.parametrize("bad", ["iso", "iso:x", "pauli:0.5/0.5/0.5", "relax:2", "placement:sometimes", "foo:1"])
def test_rejects_bad_specs(bad):
    with pytest.raises((NoiseSpecError, ValueError)):
        NoiseModel.from_spec(bad)


def test_gamma_t():
    assert NoiseModel(relaxation_delta=0.5).gamma_t == pytest.approx(2 * 0.6931471805599453)
