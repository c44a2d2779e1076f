"""Compare the two sides of the L_W pseudo-inverse equivalence on Riesz bases.

For each seed prints the residual of the characterizing identity and the
relative distance between the Moore-Penrose inverse and the closed form.

    python3 scripts/pinv_ww_variant.py --seeds 10
"""

import argparse
from dataclasses import dataclass

from fusiongram.corpus import InstanceSpec, OperatorSpec, generate, make_operator
from fusiongram.gram import GramTriple, gram_pinv_formula


@dataclass(frozen=True)
class VariantConfig:
    seeds: int = 10
    n: int = 6
    dims: tuple = (2, 2, 2)
    operator: str = "random_invertible"


def rows(cfg):
    out = []
    for seed in range(cfg.seeds):
        W = generate(InstanceSpec(seed, cfg.n, cfg.dims, "riesz_basis", weight_law=("uniform", 0.5, 2.0)))
        u = make_operator(OperatorSpec(cfg.operator, seed), cfg.n)
        r = gram_pinv_formula(GramTriple(u, W, W), "WW")
        out.append((seed, r.condition_residual, r.formula_error, r.consistent))
    return out


def main():
    p = argparse.ArgumentParser(description="L_W pseudo-inverse variant on Riesz bases")
    p.add_argument("--seeds", type=int, default=VariantConfig.seeds)
    p.add_argument("--operator", default=VariantConfig.operator)
    args = p.parse_args()
    print(f"{'seed':>4} {'condition':>10} {'formula err':>12} consistent")
    for seed, cond, err, ok in rows(VariantConfig(seeds=args.seeds, operator=args.operator)):
        print(f"{seed:4d} {cond:10.3e} {err:12.3e} {ok}")


if __name__ == "__main__":
    main()
