"""Shared helpers for randomized mesh/regime property tests."""

import math

import numpy as np

from splayer import Case, RegimeData


def draw_regimes(count: int, seed: int = 20240811):
    """Yield (regime, n, d) triples spanning both layer-width cases."""
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(count):
        alpha1 = float(rng.uniform(0.5, 4.0))
        alpha2 = float(rng.uniform(0.5, 4.0))
        rho = float(rng.uniform(0.1, 2.0))
        gamma = float(rng.uniform(0.3, 3.0))
        epsilon = float(10.0 ** rng.uniform(-14.0, -3.0))
        mu = float(10.0 ** rng.uniform(-12.0, -0.5))
        alpha = abs(min(alpha1, alpha2))
        if math.sqrt(alpha) * mu <= math.sqrt(rho * epsilon):
            case = Case.ONE
            theta1 = theta2 = math.sqrt(rho * alpha) / (2.0 * math.sqrt(epsilon))
        else:
            case = Case.TWO
            theta1 = alpha * mu / (2.0 * epsilon)
            theta2 = rho / (2.0 * mu)
        regime = RegimeData(
            alpha1=alpha1, alpha2=alpha2, alpha=alpha, rho=rho, gamma=gamma,
            case=case, theta1=theta1, theta2=theta2,
        )
        n = 8 * int(rng.integers(2, 65))  # 16 .. 512
        d = float(rng.uniform(0.15, 0.85))
        draws.append((regime, n, d))
    return draws
