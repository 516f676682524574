"""Closed-form energies, residual metrics and convergence-depth predictions.

All closed forms apply to the Ising chain H_T = sum_j J_j Z_j Z_{j+1}.  The
depth-1 formulas are exact expectation values of the variational circuit and
double as independent oracles for the simulators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Boundary, ChainSpec, SpectrumBounds, Variant

__all__ = [
    "ConvergencePrediction",
    "residual_energy",
    "upper_bound_ring",
    "conjectured_min_ring",
    "cost_p1_ring",
    "cost_p1_open",
    "predicted_convergence_step",
    "threshold_crossing",
]

_RESIDUAL_SLACK = 1e-9

# Per-step light-cone growth: each layer of the plain circuit spreads
# correlations by one site on each side; the first and second commutator
# unitaries are range-2 and range-3 terms, tripling the growth at most.
_CONE_RATE = {
    Variant.QAOA: 1,
    Variant.QAOA_CD: 2,
    Variant.QAOA_2CD: 3,
}


@dataclass(frozen=True)
class ConvergencePrediction:
    """Light-cone convergence depth for a uniform ring.

    ``p_star`` is the smallest depth whose light cone wraps the ring
    (2*rate*p >= n).  ``subgraph_vertices(p)`` is the number of sites a
    single bond's expectation value can see at depth p.
    """

    variant: Variant
    n_sites: int
    p_star: int

    @property
    def cone_rate(self) -> int:
        return _CONE_RATE[self.variant]

    def subgraph_vertices(self, p: int) -> int:
        return 2 * self.cone_rate * p + 2


def residual_energy(e: float, bounds: SpectrumBounds) -> float:
    """Normalized distance of ``e`` from the ground energy, in [0, 1].

    Values within 1e-9 below e_min are clamped to 0 (floating-point slack);
    anything lower is an error since no physical state reaches it.
    """
    width = bounds.width
    if width <= 0:
        raise ValueError("degenerate spectrum bounds")
    if e < bounds.e_min - _RESIDUAL_SLACK:
        raise ValueError(f"energy {e} below ground energy {bounds.e_min}")
    return max(0.0, (e - bounds.e_min) / width)


def upper_bound_ring(n: int, p: int) -> float:
    """Residual-energy upper bound for depth-p circuits on the uniform ring.

    Zero once the light cone wraps (2p >= n).  For even n the bound is
    1/(2p+2); for odd n the frustrated ground state shifts it to
    (n/(n-1)) * (1/(2p+2) - 1/n), clamped at zero.
    """
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    if p < 1:
        raise ValueError(f"depth must be >= 1, got {p}")
    if 2 * p >= n:
        return 0.0
    if n % 2 == 0:
        return 1.0 / (2.0 * p + 2.0)
    return max(0.0, (n / (n - 1.0)) * (1.0 / (2.0 * p + 2.0) - 1.0 / n))


def conjectured_min_ring(n: int, p: int) -> float:
    """Best energy attainable at depth p on the uniform ring of n sites.

    Equal to -n*p/(p+1) below the wrapping depth and to the exact ground
    energy (-n even, -n+2 odd) from p = floor(n/2) on.
    """
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    if p < 1:
        raise ValueError(f"depth must be >= 1, got {p}")
    if p < n // 2:
        return -n * p / (p + 1.0)
    return float(-n if n % 2 == 0 else -n + 2)


def cost_p1_ring(n: int, beta: float, gamma: float) -> float:
    """Exact depth-1 energy of the plain circuit on the uniform ring."""
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    return -(n / 2.0) * math.sin(4.0 * beta) * math.sin(4.0 * gamma)


def cost_p1_open(spec: ChainSpec, beta: float, gamma: float) -> float:
    """Exact depth-1 energy of the plain circuit on a weighted open chain.

    Each inner bond sees both neighbouring bonds; the first and last bonds
    see only one.  Requires n >= 4 so the two boundary bonds are distinct.
    """
    if spec.boundary is not Boundary.OPEN:
        raise ValueError("cost_p1_open requires an open chain")
    if spec.n_sites < 4:
        raise ValueError(f"closed form needs n >= 4, got {spec.n_sites}")
    j = np.asarray(spec.couplings)
    inner = j[1:-1]
    total = float(
        np.sum(
            inner
            * np.sin(2.0 * gamma * inner)
            * (1.0 - np.sin(gamma * j[:-2]) ** 2 - np.sin(gamma * j[2:]) ** 2)
        )
    )
    total += j[0] * math.cos(gamma * j[1]) ** 2 * math.sin(2.0 * gamma * j[0])
    total += j[-1] * math.cos(gamma * j[-2]) ** 2 * math.sin(2.0 * gamma * j[-1])
    return -math.sin(4.0 * beta) * total


def predicted_convergence_step(n: int, variant: Variant) -> ConvergencePrediction:
    """Depth at which a uniform-ring circuit can first reach the ground state.

    Per step the plain circuit grows each bond's light cone by one site per
    side, the first-commutator variant by two, the second-commutator variant
    by three; convergence is predicted where the cone wraps the ring.
    """
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    if variant not in _CONE_RATE:
        raise ValueError(f"no light-cone prediction for {variant.value}")
    rate = _CONE_RATE[variant]
    p_star = math.ceil(n / (2 * rate))
    return ConvergencePrediction(variant=variant, n_sites=n, p_star=p_star)


def threshold_crossing(residuals: list[float], eps: float) -> int | None:
    """Smallest depth p (1-based index) with residual <= eps, or None."""
    if len(residuals) == 0:
        raise ValueError("residuals must be nonempty")
    if eps <= 0:
        raise ValueError("threshold must be positive")
    for i, r in enumerate(residuals):
        if r <= eps:
            return i + 1
    return None
