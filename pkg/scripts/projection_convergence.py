"""Gap between span projections when one point moves into the origin.

Replacing the section at t by the constant function should be the t -> 0
limit: ||P(Lambda + {t}) - P(Lambda, 1)|| shrinks roughly linearly in t.

    python3 scripts/projection_convergence.py --degree 60
"""

import argparse
from dataclasses import dataclass

from kernelcert import catalog
from kernelcert.sampling import projection_gap, span_projection


@dataclass
class Config:
    degree: int = 60
    points: tuple = (0.4, -0.2j)
    ts: tuple = (0.3, 0.1, 0.03, 0.01, 0.003, 0.001)


def main(cfg: Config):
    for name, h in (("szego", catalog.szego()), ("bergman", catalog.bergman())):
        l = h.series(cfg.degree)
        ref = span_projection(l, list(cfg.points), monomials=1)
        print(name)
        for t in cfg.ts:
            P = span_projection(l, list(cfg.points) + [t])
            gap = projection_gap(P, ref)
            print(f"  t={t:<8g} gap={gap:.3e}  gap/t={gap / t:.3f}  cond={P.condition:.1e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, default=Config.degree)
    main(Config(degree=ap.parse_args().degree))
