"""Iterated one-step coefficient extensions for a certified pair.

Starts from random contractive data at index 0 and extends to the given
degree, reporting the norm of the block matrix and whether the rounded data
still passes the exact contraction test.

    python3 scripts/extension_sweep.py --trials 20 --degree 6 --blocks 2
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from kernelcert import catalog
from kernelcert.exact import Gaussian
from kernelcert.interpolation import CaratheodoryData, caratheodory_extend, caratheodory_matrix
from kernelcert.linalg import operator_norm
from kernelcert.series import make_index_set


@dataclass
class Config:
    trials: int = 20
    degree: int = 6
    blocks: int = 1
    seed: int = 0


def start(r, J, radius):
    M = r.normal(size=(J, J)) + 1j * r.normal(size=(J, J))
    M *= radius / np.linalg.norm(M, 2)
    q = lambda x: Fraction(float(x)).limit_denominator(10**6)
    return CaratheodoryData(make_index_set(1, [0]), J, {(0,): [[Gaussian(q(v.real), q(v.imag)) for v in row] for row in M]})


def main(cfg: Config):
    r = np.random.default_rng(cfg.seed)
    pairs = {
        "bergman -> 1/(1-2x)": (catalog.bergman(), catalog.geometric(2)),
        "szego -> szego": (catalog.szego(), catalog.szego()),
        "ball(2) -> ball(3)": (catalog.ball_power(2, 1), catalog.ball_power(3, 1)),
    }
    for name, (kh, lh) in pairs.items():
        k, l = kh.series(cfg.degree), lh.series(cfg.degree)
        worst, exact_ok = 0.0, 0
        for _ in range(cfg.trials):
            data = start(r, cfg.blocks, r.uniform(0.5, 0.999))
            for d in range(1, cfg.degree + 1):
                ext = caratheodory_extend(data, k, l, d)
                data = ext.data
            worst = max(worst, ext.slack)
            exact_ok += ext.exact_psd
            C, _ = caratheodory_matrix(data, k, l)
        print(f"{name:<22} worst slack={worst:.2e}  exact contraction {exact_ok}/{cfg.trials}  last norm={operator_norm(C):.6f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=Config.trials)
    ap.add_argument("--degree", type=int, default=Config.degree)
    ap.add_argument("--blocks", type=int, default=Config.blocks)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    main(Config(a.trials, a.degree, a.blocks, a.seed))
