"""Code-building game over Lego networks and the agents that play it.

An episode starts from an empty network.  Actions add palette blocks, glue two
open legs, mark one leg logical, or stop.  Stopping yields a code whose reward
is ``-p_ND``; a contraction that annihilates the state ends the episode at -1.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .codes import CheckMatrix
from .evaluator import FidelityModel, evaluate
from .lego import DEFAULT_PALETTE, DegenerateContractionError, LegoBlock, LegoError, LegoNetwork, derive_code
from .noise import NoiseModel

log = logging.getLogger(__name__)

ADD, CONTRACT, LOGICAL, STOP = "ADD_BLOCK", "CONTRACT", "ASSIGN_LOGICAL", "STOP"
ACTION_TYPES = (ADD, CONTRACT, LOGICAL, STOP)
AGENTS = ("random", "greedy-epsilon", "mcts")


@dataclass(frozen=True)
class Action:
    kind: str
    args: tuple = ()

    def __str__(self) -> str:
        if self.kind == ADD:
            return f"ADD {self.args[0]}"
        if self.kind == CONTRACT:
            (a, b), (c, d) = self.args
            return f"CONTRACT ({a}.{b})-({c}.{d})"
        if self.kind == LOGICAL:
            a, b = self.args[0]
            return f"LOGICAL ({a}.{b})"
        return "STOP"


@dataclass(frozen=True)
class GameState:
    network: LegoNetwork = field(default_factory=LegoNetwork)
    history: tuple[Action, ...] = ()
    terminal: bool = False
    degenerate: bool = False
    code: CheckMatrix | None = None

    @property
    def key(self) -> str:
        return self.network.to_text() + ("#T" if self.terminal else "")


@dataclass
class LearningConfig:
    max_qubits: int = 10
    shots: int = 20_000
    noise: NoiseModel = field(default_factory=lambda: NoiseModel.isotropic(0.01))
    agent: str = "mcts"
    episodes: int = 200
    seed: int = 0
    exact_threshold: int = 10
    bases: str = "six"
    fidelity_model: FidelityModel | None = None
    exploration: float = math.sqrt(2)
    epsilon: float = 0.2
    palette: dict[str, LegoBlock] = field(default_factory=lambda: dict(DEFAULT_PALETTE))

    def __post_init__(self):
        if self.max_qubits < 1 or self.shots < 1 or self.episodes < 1:
            raise ValueError("budgets must be positive")
        if self.agent not in AGENTS:
            raise ValueError(f"agent must be one of {AGENTS}")
        if not self.palette:
            raise ValueError("palette is empty")

    @property
    def max_steps(self) -> int:
        return 4 * self.max_qubits


class CodeGame:
    """Environment: legality, transitions and cached rewards."""

    def __init__(self, config: LearningConfig, evaluator: Callable[[CheckMatrix], float] | None = None):
        self.config = config
        self.cache: dict[str, float] = {}
        self._evaluator = evaluator or self._default_evaluator

    # --- rules --------------------------------------------------------------------

    def legal_actions(self, state: GameState) -> list[Action]:
        if state.terminal:
            return []
        cfg = self.config
        net = state.network
        acts: list[Action] = []
        if len(state.history) >= cfg.max_steps:
            return [Action(STOP)] if self._stoppable(state) else []
        for name in sorted(cfg.palette):
            legs = cfg.palette[name].legs
            # cheapest reachable size: one gluing (if not first) and one logical leg
            reach = net.n_open + legs - (2 if net.blocks else 0) - 1
            if reach <= cfg.max_qubits:
                acts.append(Action(ADD, (name,)))
        free = [l for l in net.open_legs if l not in net.logical_legs]
        if net.n_open - 2 >= 2:
            for i, a in enumerate(free):
                for b in free[i + 1 :]:
                    acts.append(Action(CONTRACT, (a, b)))
        if not net.logical_legs:
            acts += [Action(LOGICAL, (l,)) for l in free]
        if self._stoppable(state):
            acts.append(Action(STOP))
        return acts

    def _stoppable(self, state: GameState) -> bool:
        net = state.network
        if len(net.logical_legs) != 1 or not 1 <= len(net.physical_legs) <= self.config.max_qubits:
            return False
        return self._derive(net) is not None

    @staticmethod
    def _derive(net: LegoNetwork) -> CheckMatrix | None:
        try:
            return derive_code(net)
        except LegoError:
            return None

    def step(self, state: GameState, action: Action) -> GameState:
        net = state.network
        hist = state.history + (action,)
        if action.kind == ADD:
            return GameState(net.add_block(self.config.palette[action.args[0]]), hist)
        if action.kind == CONTRACT:
            try:
                return GameState(net.contract(*action.args), hist)
            except DegenerateContractionError:
                return GameState(net, hist, terminal=True, degenerate=True)
        if action.kind == LOGICAL:
            return GameState(net.assign_logical(action.args[0]), hist)
        if action.kind == STOP:
            return GameState(net, hist, terminal=True, code=self._derive(net))
        raise ValueError(f"unknown action {action}")

    def finish(self, state: GameState) -> GameState:
        """Close a state that has no legal moves left."""
        if state.terminal:
            return state
        return GameState(state.network, state.history, terminal=True)

    # --- reward -------------------------------------------------------------------

    def reward(self, state: GameState) -> float:
        if not state.terminal:
            raise ValueError("reward is defined on terminal states")
        if state.degenerate or state.code is None:
            return -1.0
        key = state.code.canonical_key()
        if key not in self.cache:
            try:
                p = self._evaluator(state.code)
            except Exception as exc:  # scored as a failed episode, not raised
                log.warning("evaluation failed for %s: %s", key, exc)
                p = 1.0
            self.cache[key] = -min(1.0, max(0.0, p))
        return self.cache[key]

    def _default_evaluator(self, code: CheckMatrix) -> float:
        cfg = self.config
        exact = code.n <= cfg.exact_threshold
        seed = int(hashlib.sha256(f"{cfg.seed}:{code.canonical_key()}".encode()).hexdigest()[:8], 16)
        report = evaluate(
            code,
            cfg.noise,
            "dense" if exact else "tableau",
            shots=None if exact else cfg.shots,
            seed=seed,
            bases=cfg.bases,
            exact=exact,
            model=cfg.fidelity_model,
        )
        return report.p_nd


# --------------------------------------------------------------------------- agents


def _typed_choice(actions: Sequence[Action], rng: np.random.Generator) -> Action:
    """Uniform over action types present, then uniform within the type."""
    kinds = [k for k in ACTION_TYPES if any(a.kind == k for a in actions)]
    kind = kinds[rng.integers(len(kinds))]
    pool = [a for a in actions if a.kind == kind]
    return pool[rng.integers(len(pool))]


def rollout(game: CodeGame, state: GameState, rng: np.random.Generator) -> tuple[GameState, list[GameState]]:
    path = []
    while not state.terminal:
        acts = game.legal_actions(state)
        if not acts:
            state = game.finish(state)
            break
        state = game.step(state, _typed_choice(acts, rng))
        path.append(state)
    return state, path


class RandomAgent:
    def __init__(self, game: CodeGame, rng: np.random.Generator):
        self.game, self.rng = game, rng

    def episode(self) -> GameState:
        return rollout(self.game, GameState(), self.rng)[0]


class EpsilonGreedyAgent:
    """Tabular Monte-Carlo control over hashed states."""

    def __init__(self, game: CodeGame, rng: np.random.Generator, epsilon: float = 0.2):
        self.game, self.rng, self.epsilon = game, rng, epsilon
        self.q: dict[tuple[str, Action], float] = {}
        self.n: dict[tuple[str, Action], int] = {}

    def episode(self) -> GameState:
        state = GameState()
        visited = []
        while not state.terminal:
            acts = self.game.legal_actions(state)
            if not acts:
                state = self.game.finish(state)
                break
            if self.rng.random() < self.epsilon:
                a = _typed_choice(acts, self.rng)
            else:
                vals = np.array([self.q.get((state.key, a), 0.0) for a in acts])
                best = np.flatnonzero(vals >= vals.max() - 1e-15)
                a = acts[best[self.rng.integers(len(best))]]
            visited.append((state.key, a))
            state = self.game.step(state, a)
        g = self.game.reward(state)
        for sa in visited:
            self.n[sa] = self.n.get(sa, 0) + 1
            self.q[sa] = self.q.get(sa, 0.0) + (g - self.q.get(sa, 0.0)) / self.n[sa]
        return state


@dataclass
class _Node:
    state: GameState
    untried: list[Action]
    children: dict[Action, "_Node"] = field(default_factory=dict)
    visits: int = 0
    value: float = 0.0


class MCTSAgent:
    """UCB1 tree search; one selection-expansion-rollout-backup pass per episode."""

    def __init__(self, game: CodeGame, rng: np.random.Generator, exploration: float = math.sqrt(2)):
        self.game, self.rng, self.c = game, rng, exploration
        self.root = self._node(GameState())

    def _node(self, state: GameState) -> _Node:
        return _Node(state, list(self.game.legal_actions(state)))

    def _ucb(self, parent: _Node, child: _Node) -> float:
        mean = child.value / child.visits
        return mean + self.c * math.sqrt(math.log(parent.visits) / child.visits)

    def episode(self) -> GameState:
        node = self.root
        path = [node]
        while not node.untried and node.children and not node.state.terminal:
            # max over children, ties to insertion order
            node = max(node.children.values(), key=lambda ch: self._ucb(path[-1], ch))
            path.append(node)
        if node.untried and not node.state.terminal:
            a = node.untried.pop(self.rng.integers(len(node.untried)))
            child = self._node(self.game.step(node.state, a))
            node.children[a] = child
            node = child
            path.append(node)
        final, _ = rollout(self.game, node.state, self.rng)
        g = self.game.reward(final)
        for nd in path:
            nd.visits += 1
            nd.value += g
        return final


# --------------------------------------------------------------------------- driver


@dataclass
class LearningResult:
    ranking: list[tuple[CheckMatrix, float]]
    by_qubits: dict[int, tuple[CheckMatrix, float]]
    log: list[dict]

    def best(self) -> tuple[CheckMatrix, float]:
        return self.ranking[0]

    def summary(self) -> dict:
        return {
            "ranking": [{"n": c.n, "p_nd": p, "code": c.to_text()} for c, p in self.ranking],
            "by_qubits": {str(n): {"p_nd": p, "code": c.to_text()} for n, (c, p) in sorted(self.by_qubits.items())},
            "episodes": len(self.log),
        }


def make_agent(config: LearningConfig, game: CodeGame, rng: np.random.Generator):
    if config.agent == "random":
        return RandomAgent(game, rng)
    if config.agent == "greedy-epsilon":
        return EpsilonGreedyAgent(game, rng, config.epsilon)
    return MCTSAgent(game, rng, config.exploration)


def run_learning(
    config: LearningConfig,
    log_path=None,
    evaluator: Callable[[CheckMatrix], float] | None = None,
) -> LearningResult:
    """Play ``config.episodes`` episodes; rank every distinct code found."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(config.seed)))
    game = CodeGame(config, evaluator)
    agent = make_agent(config, game, rng)
    found: dict[str, tuple[CheckMatrix, float]] = {}
    records = []
    fh = open(log_path, "a") if log_path is not None else None
    try:
        for ep in range(config.episodes):
            cached_before = set(game.cache)
            final = agent.episode()
            r = game.reward(final)
            entry = {
                "episode": ep,
                "actions": [str(a) for a in final.history],
                "degenerate": final.degenerate,
                "code": final.code.to_text() if final.code is not None else None,
                "n": final.code.n if final.code is not None else None,
                "p_nd": -r if final.code is not None else None,
                "reward": r,
                "cached": final.code is not None and final.code.canonical_key() in cached_before,
            }
            records.append(entry)
            if fh is not None:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
            if final.code is not None:
                found.setdefault(final.code.canonical_key(), (final.code, -r))
    finally:
        if fh is not None:
            fh.close()
    # p_ND compared at 1e-12 so exact ties fall back to the smaller code
    ranking = sorted(found.values(), key=lambda cp: (round(cp[1], 12), cp[0].n, cp[0].canonical_key()))
    by_q: dict[int, tuple[CheckMatrix, float]] = {}
    for c, p in ranking:
        by_q.setdefault(c.n, (c, p))
    return LearningResult(ranking, by_q, records)


def load_episode_log(path) -> list[dict]:
    return [json.loads(ln) for ln in Path(path).read_text().splitlines() if ln.strip()]
