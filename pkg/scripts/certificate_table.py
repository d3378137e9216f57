"""Master certificates and pair verdicts for catalog kernels.

    python3 scripts/certificate_table.py --degree 10
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from kernelcert import catalog
from kernelcert.certificates import certify_pair, master_certificate
from kernelcert.series import DiagonalSeries


@dataclass
class Config:
    degree: int = 10
    geometric: tuple = (1, 2, 3, 4)


def geo(c, n):
    return DiagonalSeries.from_list([Fraction(c) ** i for i in range(n + 1)], n)


def fmt_theta(theta: DiagonalSeries, terms: int = 4) -> str:
    parts = [("" if v == 1 else f"{v}") + f"x^{a[0]}" for a, v in theta.items()][:terms]
    return " + ".join(parts) + (" + ..." if len(theta.items()) > terms else "") if parts else "0"


def main(cfg: Config):
    kernels = {
        "szego": catalog.szego(),
        "bergman": catalog.bergman(),
        "cubic_gap": catalog.cubic_gap_kernel(),
        "geometric(2)": catalog.geometric(2),
    }
    print(f"{'k':<14}{'theta':<40}" + "".join(f"l=1/(1-{c}x)".ljust(14) for c in cfg.geometric))
    for name, h in kernels.items():
        k = h.series(cfg.degree)
        theta = master_certificate(k).theta
        cells = []
        for c in cfg.geometric:
            r = certify_pair(k, geo(c, cfg.degree))
            cells.append("pass" if r.verdict else f"fail@{r.first_failure[1][0]}")
        print(f"{name:<14}{fmt_theta(theta):<40}" + "".join(x.ljust(14) for x in cells))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, default=Config.degree)
    main(Config(degree=ap.parse_args().degree))
