"""Radius of {sum theta_n r^(2n) < 1} for a few certificates, with truncation.

    python3 scripts/radius_table.py
"""

import argparse
from dataclasses import dataclass

import numpy as np

from kernelcert import catalog
from kernelcert.certificates import master_certificate, omega1_radius, radial_section
from kernelcert.series import DiagonalSeries


@dataclass
class Config:
    degrees: tuple = (3, 6, 10, 16)


def main(cfg: Config):
    print(f"{'certificate':<22}" + "".join(f"deg={n:<9}" for n in cfg.degrees))
    for name, h in (("bergman", catalog.bergman()), ("ball(3, g=2)", catalog.ball_power(3, 2)), ("cubic_gap", catalog.cubic_gap_kernel())):
        row = []
        for n in cfg.degrees:
            th = radial_section(master_certificate(h.series(n)).theta)
            row.append(f"{omega1_radius(th):<13.8f}")
        print(f"{name:<22}" + "".join(row))
    # the cubic part alone, against polynomial roots in y = r^2
    cubic = DiagonalSeries.from_list([0, 2, 0, 10], 3)
    y = [x.real for x in np.roots([10, 0, 2, -1]) if abs(x.imag) < 1e-12 and x.real > 0][0]
    print(f"2x + 10x^3: bisection {omega1_radius(cubic):.10f}, roots {np.sqrt(y):.10f}")


if __name__ == "__main__":
    argparse.ArgumentParser(description=__doc__.splitlines()[0]).parse_args()
    main(Config())
