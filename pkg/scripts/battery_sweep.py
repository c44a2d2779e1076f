"""Run every theorem battery over a range of seeds and print a pass table.

    python3 scripts/battery_sweep.py --seeds 20 --n 6
"""

import argparse
from dataclasses import dataclass

from fusiongram.batteries import BATTERIES, run_battery
from fusiongram.corpus import InstanceSpec


@dataclass(frozen=True)
class SweepConfig:
    seeds: int = 10
    n: int = 6
    dims: tuple = (2, 2, 2)
    weights: tuple = ("uniform", 0.5, 2.0)


def spec_for(kind, seed, cfg):
    dims = cfg.dims
    n = sum(dims) if kind in ("riesz_basis", "fusion_onb") else cfg.n
    if kind in ("generic_frame", "dual_pair") and sum(dims) <= n:
        n = sum(dims) - 1
    law = "unit" if kind == "fusion_onb" else cfg.weights
    return InstanceSpec(seed, n, dims, kind, weight_law=law)


def sweep(cfg):
    table = {}
    for name, (_, kind, _) in BATTERIES.items():
        passed = sum(bool(run_battery(name, spec_for(kind, s, cfg))["passed"]) for s in range(cfg.seeds))
        table[name] = passed
    return table


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=SweepConfig.seeds)
    p.add_argument("--n", type=int, default=SweepConfig.n)
    args = p.parse_args()
    cfg = SweepConfig(seeds=args.seeds, n=args.n)
    for name, passed in sweep(cfg).items():
        print(f"{name:12s} {passed:4d}/{cfg.seeds}")


if __name__ == "__main__":
    main()
