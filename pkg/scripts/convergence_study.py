"""Grid refinement: fd2 against fourier for the lowest eigenvalues of a smooth potential."""

import argparse
from dataclasses import dataclass

import numpy as np

from schrolab import (assemble, eigh, laplace_eigenbasis, make_circle, project_to_constraint,
                      square)


@dataclass
class StudyConfig:
    sizes: tuple = (32, 64, 128, 256)
    kappa0: float = 2 * np.pi
    amplitude: float = 0.5
    alpha: float = 0.1
    count: int = 5


def run(cfg: StudyConfig):
    F = square(cfg.kappa0)
    out = []
    for n in cfg.sizes:
        g = make_circle(1, n)
        v1 = laplace_eigenbasis(g, 2)[1].samples
        k = project_to_constraint(g, cfg.kappa0 + cfg.amplitude * v1, cfg.kappa0)
        a = eigh(assemble(g, k, F, cfg.alpha, "fourier"), cfg.count).values
        b = eigh(assemble(g, k, F, cfg.alpha, "fd2"), cfg.count).values
        out.append((n, a, np.abs(a - b)))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sizes", type=int, nargs="+", default=list(StudyConfig.sizes))
    cfg = StudyConfig(sizes=tuple(p.parse_args().sizes))
    res = run(cfg)
    print("n,j,lambda_fourier,fd2_gap,observed_order")
    for i, (n, lam, gap) in enumerate(res):
        for j in range(cfg.count):
            order = (np.log(res[i - 1][2][j] / gap[j]) / np.log(n / res[i - 1][0])
                     if i else float("nan"))
            print(f"{n},{j},{lam[j]:.17g},{gap[j]:.6e},{order:.4f}")


if __name__ == "__main__":
    main()
