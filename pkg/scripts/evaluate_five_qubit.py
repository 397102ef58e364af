"""Compare the [[5,1,3]] code with a bare qubit under depolarising and relaxation noise."""

import argparse

from legoqec import NoiseModel, evaluate, five_qubit_code, trivial_code


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.01, help="isotropic Pauli rate")
    ap.add_argument("--delta", type=float, default=0.1, help="relaxation strength")
    ap.add_argument("--shots", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    for label, noise in (("iso", NoiseModel.isotropic(args.p)), ("relax", NoiseModel.from_spec(f"relax:{args.delta}"))):
        for name, code in (("bare", trivial_code()), ("[[5,1,3]]", five_qubit_code())):
            exact = evaluate(code, noise, "dense", shots=None, exact=True).p_nd
            sampled = evaluate(code, noise, "tableau" if label == "iso" else "dense", shots=args.shots, seed=args.seed).p_nd
            print(f"{label:5s} {name:10s} exact p_ND={exact:.6f}  sampled p_ND={sampled:.6f}")


if __name__ == "__main__":
    main()
