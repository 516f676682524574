"""Problem instances, circuit variants and parameter schedules for 1D MaxCut chains.

The target Hamiltonian is the weighted Ising chain ``H_T = sum_j J_j Z_j Z_{j+1}``
on either a ring (periodic) or a path (open).  Energies are dimensionless
(units of the exchange coupling).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Boundary",
    "ChainSpec",
    "Variant",
    "AngleSchedule",
    "SpectrumBounds",
    "make_ring_uniform",
    "make_open_uniform",
    "make_open_random",
    "spectrum_bounds",
    "params_per_step",
    "expand_constrained",
    "spec_to_json",
    "spec_from_json",
]


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


class Variant(enum.Enum):
    """Circuit variants and their free parameters per step.

    QAOA uses (gamma, beta).  QAOA_CD adds a commutator unitary with a free
    angle alpha.  QAOA_2CD further adds the two nested-commutator generators
    with free angles delta and zeta.  The 2P forms keep the extra unitaries
    but slave their angles to (gamma, beta), so they expose two free
    parameters per step.
    """

    QAOA = "qaoa"
    QAOA_CD = "qaoa-cd"
    QAOA_2CD = "qaoa-2cd"
    QAOA_CD_2P = "qaoa-cd-2p"
    QAOA_2CD_2P = "qaoa-2cd-2p"

    @property
    def is_constrained(self) -> bool:
        return self in (Variant.QAOA_CD_2P, Variant.QAOA_2CD_2P)

    @property
    def free_form(self) -> "Variant":
        """The free-parameter variant executed by the simulator."""
        if self is Variant.QAOA_CD_2P:
            return Variant.QAOA_CD
        if self is Variant.QAOA_2CD_2P:
            return Variant.QAOA_2CD
        return self


_PARAMS_PER_STEP = {
    Variant.QAOA: 2,
    Variant.QAOA_CD: 3,
    Variant.QAOA_2CD: 5,
    Variant.QAOA_CD_2P: 2,
    Variant.QAOA_2CD_2P: 2,
}

# Column order of AngleSchedule.values for each variant.
_COLUMNS = {
    Variant.QAOA: ("gamma", "beta"),
    Variant.QAOA_CD: ("gamma", "beta", "alpha"),
    Variant.QAOA_2CD: ("gamma", "beta", "alpha", "delta", "zeta"),
    Variant.QAOA_CD_2P: ("gamma", "beta"),
    Variant.QAOA_2CD_2P: ("gamma", "beta"),
}


def params_per_step(variant: Variant) -> int:
    """Number of free variational parameters per circuit step."""
    return _PARAMS_PER_STEP[variant]


@dataclass(frozen=True)
class ChainSpec:
    """A 1D Ising/MaxCut instance.

    Parameters
    ----------
    n_sites : int
        Number of spins N.
    boundary : Boundary
        PERIODIC rings carry N couplings (bond j couples sites j and j+1,
        with bond N closing the ring); OPEN paths carry N-1 couplings.
    couplings : tuple of float
        Bond couplings J_j.
    seed : int or None
        Seed recorded for randomly generated instances.
    """

    n_sites: int
    boundary: Boundary
    couplings: tuple[float, ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        n = self.n_sites
        if self.boundary is Boundary.PERIODIC:
            if n < 3:
                raise ValueError(f"periodic chain needs n >= 3, got {n}")
            expected = n
        else:
            if n < 2:
                raise ValueError(f"open chain needs n >= 2, got {n}")
            expected = n - 1
        if len(self.couplings) != expected:
            raise ValueError(
                f"{self.boundary.value} chain with {n} sites needs "
                f"{expected} couplings, got {len(self.couplings)}"
            )
        if not all(math.isfinite(j) for j in self.couplings):
            raise ValueError("couplings must be finite")

    @property
    def n_bonds(self) -> int:
        return len(self.couplings)

    @property
    def is_uniform(self) -> bool:
        return all(j == self.couplings[0] for j in self.couplings)

    def bonds(self) -> list[tuple[int, int, float]]:
        """Bonds as (site_i, site_j, J) with 0-based sites."""
        n = self.n_sites
        out = [(j, j + 1, self.couplings[j]) for j in range(n - 1)]
        if self.boundary is Boundary.PERIODIC:
            out.append((n - 1, 0, self.couplings[n - 1]))
        return out


@dataclass(frozen=True)
class SpectrumBounds:
    """Exact extreme eigenvalues of the classical target Hamiltonian."""

    e_min: float
    e_max: float

    def __post_init__(self) -> None:
        if self.e_min > self.e_max:
            raise ValueError("e_min must not exceed e_max")

    @property
    def width(self) -> float:
        return self.e_max - self.e_min


@dataclass
class AngleSchedule:
    """Variational angles for ``steps`` circuit layers of a given variant.

    ``values`` has shape (steps, params_per_step(variant)); row k holds the
    angles of layer k+1 in the column order gamma, beta[, alpha[, delta,
    zeta]].  Constrained variants store only (gamma, beta).
    """

    variant: Variant
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("values must be a 2D array of shape (steps, m)")
        if vals.shape[0] < 1:
            raise ValueError("schedule needs at least one step")
        m = params_per_step(self.variant)
        if vals.shape[1] != m:
            raise ValueError(
                f"{self.variant.value} needs {m} parameters per step, "
                f"got rows of width {vals.shape[1]}"
            )
        self.values = vals

    @property
    def steps(self) -> int:
        return self.values.shape[0]

    @property
    def n_params(self) -> int:
        """Total parameter count N_p = p * params_per_step."""
        return self.values.size

    def column(self, name: str) -> np.ndarray:
        cols = _COLUMNS[self.variant]
        if name not in cols:
            raise KeyError(f"{self.variant.value} has no '{name}' column")
        return self.values[:, cols.index(name)]

    def to_flat(self) -> np.ndarray:
        return self.values.reshape(-1).copy()

    @classmethod
    def from_flat(cls, variant: Variant, steps: int, flat: np.ndarray) -> "AngleSchedule":
        m = params_per_step(variant)
        flat = np.asarray(flat, dtype=float)
        if flat.size != steps * m:
            raise ValueError(f"expected {steps * m} parameters, got {flat.size}")
        return cls(variant, flat.reshape(steps, m))

    @classmethod
    def zeros(cls, variant: Variant, steps: int) -> "AngleSchedule":
        return cls(variant, np.zeros((steps, params_per_step(variant))))


def expand_constrained(schedule: AngleSchedule) -> AngleSchedule:
    """Expand a constrained 2p schedule into its free-form equivalent.

    The extra angles follow from the step angles as
    ``alpha = -beta*gamma/2``, ``delta = beta**2*gamma/6`` and
    ``zeta = beta*gamma**2/3``.
    """
    if not schedule.variant.is_constrained:
        raise ValueError(f"{schedule.variant.value} is already free-form")
    gamma = schedule.values[:, 0]
    beta = schedule.values[:, 1]
    alpha = -beta * gamma / 2.0
    if schedule.variant is Variant.QAOA_CD_2P:
        vals = np.column_stack([gamma, beta, alpha])
        return AngleSchedule(Variant.QAOA_CD, vals)
    delta = beta**2 * gamma / 6.0
    zeta = beta * gamma**2 / 3.0
    vals = np.column_stack([gamma, beta, alpha, delta, zeta])
    return AngleSchedule(Variant.QAOA_2CD, vals)


def make_ring_uniform(n: int) -> ChainSpec:
    """Uniform antiferromagnetic ring with all couplings +1."""
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    return ChainSpec(n, Boundary.PERIODIC, (1.0,) * n)


def make_open_uniform(n: int) -> ChainSpec:
    """Uniform open chain with all couplings +1."""
    if n < 2:
        raise ValueError(f"open chain needs n >= 2, got {n}")
    return ChainSpec(n, Boundary.OPEN, (1.0,) * (n - 1))


def make_open_random(n: int, seed: int) -> ChainSpec:
    """Open chain with couplings drawn i.i.d. uniform on [-1, 1].

    Uses the counter-based Philox generator keyed by ``seed``, so the same
    seed reproduces the couplings bit for bit on any platform.
    """
    if n < 2:
        raise ValueError(f"open chain needs n >= 2, got {n}")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    couplings = tuple(rng.uniform(-1.0, 1.0, size=n - 1).tolist())
    return ChainSpec(n, Boundary.OPEN, couplings, seed=seed)


def _ring_extreme(couplings: tuple[float, ...], minimize: bool) -> float:
    """Extreme eigenvalue of a ring via the frustration constraint.

    Each bond contributes J_j * s_j * s_{j+1} with the bond variables
    b_j = s_j * s_{j+1} constrained to multiply to +1 around the ring.  The
    unconstrained optimum picks the favourable sign of every bond; if the
    product of those signs is -1 the cheapest bond is flipped.  A zero
    coupling absorbs the constraint for free.
    """
    total = sum(abs(j) for j in couplings)
    sign_product = 1.0
    for j in couplings:
        if j == 0.0:
            return -total if minimize else total
        want = -math.copysign(1.0, j) if minimize else math.copysign(1.0, j)
        sign_product *= want
    if sign_product > 0:
        return -total if minimize else total
    penalty = 2.0 * min(abs(j) for j in couplings)
    return -total + penalty if minimize else total - penalty


def spectrum_bounds(spec: ChainSpec) -> SpectrumBounds:
    """Exact ground and top eigenvalues of the diagonal target Hamiltonian.

    Open chains satisfy every bond independently, so the bounds are
    ``-sum|J|`` and ``+sum|J|``.  Rings are solved through the frustration
    constraint on the bond variables.
    """
    if spec.boundary is Boundary.OPEN:
        total = sum(abs(j) for j in spec.couplings)
        return SpectrumBounds(-total, total)
    return SpectrumBounds(
        _ring_extreme(spec.couplings, minimize=True),
        _ring_extreme(spec.couplings, minimize=False),
    )


def spec_to_json(spec: ChainSpec) -> str:
    """Serialize an instance to JSON with bit-exact couplings."""
    obj: dict = {
        "n": spec.n_sites,
        "boundary": spec.boundary.value,
        "couplings": list(spec.couplings),
    }
    if spec.seed is not None:
        obj["seed"] = spec.seed
    return json.dumps(obj)


def spec_from_json(text: str) -> ChainSpec:
    """Parse an instance from its JSON form."""
    obj = json.loads(text)
    try:
        boundary = Boundary(obj["boundary"])
        couplings = tuple(float(j) for j in obj["couplings"])
        n = int(obj["n"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed instance JSON: {exc}") from exc
    return ChainSpec(n, boundary, couplings, seed=obj.get("seed"))
