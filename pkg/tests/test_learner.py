import json

import pytest

from legoqec.codes import five_qubit_code, trivial_code
from legoqec.lego import LegoBlock, bell_block, t6_block
from legoqec.learner import (
    ADD,
    CONTRACT,
    LOGICAL,
    STOP,
    Action,
    CodeGame,
    GameState,
    LearningConfig,
    load_episode_log,
    run_learning,
)
from legoqec.noise import NoiseModel


def game(**kw):
    return CodeGame(LearningConfig(**kw))


def test_empty_state_offers_only_blocks():
    acts = game().legal_actions(GameState())
    assert {a.kind for a in acts} == {ADD}


def test_no_blocks_at_cap():
    g = game(max_qubits=5)
    s = g.step(GameState(), Action(ADD, ("t6",)))
    assert not any(a.kind == ADD and a.args == ("t6",) for a in g.legal_actions(s))
    g = game(max_qubits=1)
    s = g.step(GameState(), Action(ADD, ("bell",)))
    offered = [a.args[0] for a in g.legal_actions(s) if a.kind == ADD]
    assert offered == ["bell"]  # a second Bell block can still swap down to one qubit


def test_degenerate_contraction_is_offered_and_scores_minus_one():
    minus = LegoBlock.from_strings("m", ["+XX", "-ZZ"])
    g = game(palette={"m": minus})
    s = g.step(g.step(GameState(), Action(ADD, ("m",))), Action(ADD, ("m",)))
    bad = Action(CONTRACT, ((0, 0), (0, 1)))
    assert bad in g.legal_actions(s)
    end = g.step(s, bad)
    assert end.terminal and end.degenerate
    assert g.reward(end) == -1.0


def play(g, actions):
    s = GameState()
    for a in actions:
        assert a in g.legal_actions(s), a
        s = g.step(s, a)
    return s


def test_bare_qubit_reward():
    g = game(noise=NoiseModel.isotropic(0.01))
    s = play(g, [Action(ADD, ("bell",)), Action(LOGICAL, ((0, 0),)), Action(STOP)])
    assert s.code.canonical_key() == trivial_code().canonical_key()
    assert g.reward(s) == pytest.approx(-0.02, abs=1e-12)


def test_noiseless_reward_is_zero():
    g = game(noise=NoiseModel())
    s = play(g, [Action(ADD, ("t6",)), Action(LOGICAL, ((0, 5),)), Action(STOP)])
    assert g.reward(s) == 0.0


def test_reward_cache_by_canonical_key():
    calls = []

    def fake(code):
        calls.append(code)
        return 0.1

    g = CodeGame(LearningConfig(), fake)
    for leg in (0, 1):
        s = play(g, [Action(ADD, ("bell",)), Action(LOGICAL, ((0, leg),)), Action(STOP)])
        assert g.reward(s) == -0.1
    assert len(calls) == 1


def test_evaluation_failure_scores_minus_one():
    def boom(code):
        raise RuntimeError("backend down")

    g = CodeGame(LearningConfig(), boom)
    s = play(g, [Action(ADD, ("bell",)), Action(LOGICAL, ((0, 0),)), Action(STOP)])
    assert g.reward(s) == -1.0


def test_five_qubit_beats_bare_qubit():
    cfg = LearningConfig(noise=NoiseModel.isotropic(0.01))
    g = CodeGame(cfg)
    assert -g._default_evaluator(five_qubit_code()) > -g._default_evaluator(trivial_code())


def test_config_validation():
    with pytest.raises(ValueError):
        LearningConfig(episodes=0)
    with pytest.raises(ValueError):
        LearningConfig(agent="ppo")


def cheap(code):
    # deterministic stand-in: larger codes score worse
    return min(1.0, 0.02 * code.n + 0.001 * len(code.stabilizers))


@pytest.mark.parametrize("agent", ["random", "greedy-epsilon", "mcts"])
def test_runs_are_deterministic(agent, tmp_path):
    cfg = LearningConfig(agent=agent, episodes=30, seed=5, max_qubits=6)
    a = run_learning(cfg, tmp_path / "a.jsonl", evaluator=cheap)
    b = run_learning(cfg, tmp_path / "b.jsonl", evaluator=cheap)
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
    assert [c.canonical_key() for c, _ in a.ranking] == [c.canonical_key() for c, _ in b.ranking]
    log = load_episode_log(tmp_path / "a.jsonl")
    assert len(log) == 30
    assert all(-1.0 <= e["reward"] <= 0.0 for e in log)
    assert all(len(e["actions"]) <= cfg.max_steps for e in log)


def test_single_episode_budget(tmp_path):
    res = run_learning(LearningConfig(agent="random", episodes=1, seed=11), evaluator=cheap)
    assert len(res.log) == 1


def test_ranking_sorted_and_grouped():
    res = run_learning(LearningConfig(agent="mcts", episodes=60, seed=2, max_qubits=6), evaluator=cheap)
    ps = [p for _, p in res.ranking]
    assert ps == sorted(ps)
    for n, (code, p) in res.by_qubits.items():
        assert code.n == n and code.validate() is not None
    assert res.best()[0].n == min(res.by_qubits)
