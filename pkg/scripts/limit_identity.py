"""Point Schur chains against coefficient Schur chains as the points merge at 0.

For each n the points u_1 << ... << u_n shrink with t; the sup deviation on a
fixed grid should fall like the largest point.

    python3 scripts/limit_identity.py --max-n 3 --truncation 30
"""

import argparse
from dataclasses import dataclass, field

from kernelcert import catalog
from kernelcert.schurtools import LimitSchedule, limit_identity_check
from kernelcert.series import BivariateSeries


@dataclass
class Config:
    max_n: int = 3
    truncation: int = 30
    ts: tuple = (1e-1, 1e-2, 1e-3, 1e-4)
    grid: tuple = (0.3, -0.2 + 0.1j, 0.25j, 0.1 - 0.15j)
    schedule: LimitSchedule = field(default_factory=LimitSchedule)
    dps: int = 120  # the smallest point is t^(3 + n - 1); cancellation eats about twice its digits


def main(cfg: Config):
    for name, h in (("bergman", catalog.bergman()), ("geometric(2)", catalog.geometric(2))):
        series = BivariateSeries.from_diagonal(h.series(cfg.truncation))
        print(f"{name}, truncation {cfg.truncation}")
        print("  n  " + "".join(f"t={t:<10g}" for t in cfg.ts) + "floor")
        for n in range(cfg.max_n + 1):
            r = limit_identity_check(h, series, n, cfg.ts, cfg.grid, cfg.schedule, dps=cfg.dps)
            print(f"  {n}  " + "".join(f"{d:<12.2e}" for d in r.deviations) + f"{r.truncation_floor:.1e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=Config.max_n)
    ap.add_argument("--truncation", type=int, default=Config.truncation)
    ap.add_argument("--dps", type=int, default=Config.dps)
    a = ap.parse_args()
    main(Config(max_n=a.max_n, truncation=a.truncation, dps=a.dps))
