"""Short learning run; prints the best code found per qubit count."""

import argparse

from legoqec import NoiseModel
from legoqec.learner import LearningConfig, run_learning


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.01)
    ap.add_argument("--episodes", type=int, default=100)
    ap.add_argument("--agent", default="mcts", choices=["mcts", "greedy-epsilon", "random"])
    ap.add_argument("--max-qubits", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--log", help="optional JSONL episode log")
    args = ap.parse_args()

    cfg = LearningConfig(
        max_qubits=args.max_qubits, noise=NoiseModel.isotropic(args.p), agent=args.agent,
        episodes=args.episodes, seed=args.seed,
    )
    res = run_learning(cfg, args.log)
    for n, (code, p) in sorted(res.by_qubits.items()):
        print(f"n={n:2d} p_ND={p:.6f}")
    best, p = res.best()
    print(f"best: n={best.n} p_ND={p:.6f}")
    print(best.to_text(), end="")


if __name__ == "__main__":
    main()
