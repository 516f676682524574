"""Angle optimization: local derivative-free search, multistart, and INTERP.

All searches are deterministic given their config seed: start schedules are
drawn from counter-based streams keyed by (seed, depth, start index), and
ties between equal minima resolve to the lowest start index.
"""

from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.optimize

from .fermion import CircuitEngine, engine_for
from .model import AngleSchedule, ChainSpec, Variant, params_per_step

__all__ = [
    "Method",
    "Strategy",
    "OptimizerConfig",
    "OptimizationResult",
    "minimize",
    "search_until",
    "interp_extend",
    "sweep_depth",
    "landscape_grid",
]


class Method(enum.Enum):
    NELDER_MEAD = "nelder-mead"
    QUASI_NEWTON = "quasi-newton"
    POWELL = "powell"


class Strategy(enum.Enum):
    INTERP = "interp"
    MULTISTART = "multistart"


@dataclass(frozen=True)
class OptimizerConfig:
    """Search settings; defaults favour accuracy over speed."""

    method: Method = Method.NELDER_MEAD
    f_tol: float = 1e-10
    x_tol: float = 1e-8
    max_evals: int = 20000
    restarts: int = 20
    init_box: float = math.pi / 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.f_tol <= 0 or self.x_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_evals <= 0:
            raise ValueError("max_evals must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def to_json(self) -> str:
        obj = asdict(self)
        obj["method"] = self.method.value
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text: str) -> "OptimizerConfig":
        obj = json.loads(text)
        obj["method"] = Method(obj["method"])
        return cls(**obj)


@dataclass
class OptimizationResult:
    best_angles: AngleSchedule
    best_energy: float
    residual: float
    n_evals: int
    start_index: int
    converged: bool
    wall_time_ms: float = 0.0

    @property
    def p(self) -> int:
        return self.best_angles.steps

    @property
    def n_params(self) -> int:
        return self.best_angles.n_params


def _start_rng(seed: int, p: int, start_index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([seed, p, start_index]))
    )


def random_schedule(
    variant: Variant, p: int, seed: int, start_index: int, box: float
) -> AngleSchedule:
    """Uniform random start in [-box, box] per angle.

    Every variant slices the same master (p, 5) draw, so variants sharing a
    (seed, p, start_index) triple share their overlapping angle columns.
    """
    rng = _start_rng(seed, p, start_index)
    master = rng.uniform(-box, box, size=(p, 5))
    return AngleSchedule(variant, master[:, : params_per_step(variant)].copy())


def minimize(
    spec: ChainSpec,
    variant: Variant,
    p: int,
    init: AngleSchedule,
    config: OptimizerConfig,
    engine: CircuitEngine | None = None,
) -> OptimizationResult:
    """Local minimum of the circuit energy from one starting schedule."""
    if init.variant is not variant or init.steps != p:
        raise ValueError("initial schedule does not match (variant, p)")
    eng = engine if engine is not None else engine_for(spec)
    fun = lambda flat: eng.energy_flat(variant, p, flat)
    x0 = init.to_flat()
    t0 = time.monotonic()
    if config.method is Method.NELDER_MEAD:
        res = scipy.optimize.minimize(
            fun,
            x0,
            method="Nelder-Mead",
            options={
                "fatol": config.f_tol,
                "xatol": config.x_tol,
                "maxfev": config.max_evals,
                "adaptive": True,
            },
        )
    elif config.method is Method.POWELL:
        res = scipy.optimize.minimize(
            fun,
            x0,
            method="Powell",
            options={
                "ftol": config.f_tol,
                "xtol": config.x_tol,
                "maxfev": config.max_evals,
            },
        )
    else:
        if eng.has_gradient:
            res = scipy.optimize.minimize(
                lambda flat: eng.energy_grad_flat(variant, p, flat),
                x0,
                method="L-BFGS-B",
                jac=True,
                options={
                    "maxfun": config.max_evals,
                    "ftol": config.f_tol,
                    "gtol": 1e-8,
                },
            )
        else:
            res = scipy.optimize.minimize(
                fun,
                x0,
                method="L-BFGS-B",
                jac="2-point",
                options={
                    "maxfun": config.max_evals,
                    "ftol": config.f_tol,
                    "gtol": 1e-8,
                },
            )
    elapsed_ms = (time.monotonic() - t0) * 1e3
    energy = float(res.fun)
    if energy < eng.bounds.e_min - 1e-9:
        raise RuntimeError(f"optimizer energy {energy} below ground energy")
    return OptimizationResult(
        best_angles=AngleSchedule.from_flat(variant, p, res.x),
        best_energy=energy,
        residual=eng.residual(energy),
        n_evals=int(res.nfev),
        start_index=0,
        converged=bool(res.success),
        wall_time_ms=elapsed_ms,
    )


def _best_of(
    spec: ChainSpec,
    variant: Variant,
    p: int,
    starts: list[AngleSchedule],
    config: OptimizerConfig,
    engine: CircuitEngine,
) -> OptimizationResult:
    """Optimize every start; lowest energy wins, lowest index breaks ties."""
    best: OptimizationResult | None = None
    total_evals = 0
    total_ms = 0.0
    for idx, start in enumerate(starts):
        out = minimize(spec, variant, p, start, config, engine=engine)
        total_evals += out.n_evals
        total_ms += out.wall_time_ms
        if best is None or out.best_energy < best.best_energy:
            out.start_index = idx
            best = out
    best.n_evals = total_evals
    best.wall_time_ms = total_ms
    return best


def search_until(
    spec: ChainSpec,
    variant: Variant,
    p: int,
    config: OptimizerConfig,
    target_residual: float,
    max_starts: int,
    seeds: list[AngleSchedule] | None = None,
) -> OptimizationResult:
    """Sequential random starts, stopping at the first sub-target minimum.

    Useful at depths where the optimum sits in a small basin: keeps drawing
    starts (after any caller-provided seed schedules) until one reaches
    ``target_residual`` or ``max_starts`` is exhausted, returning the best.
    """
    engine = engine_for(spec)
    best: OptimizationResult | None = None
    total_evals = 0
    total_ms = 0.0
    for idx in range(max_starts):
        pre = seeds[idx] if seeds is not None and idx < len(seeds) else None
        start = pre if pre is not None else random_schedule(
            variant, p, config.seed, idx, config.init_box
        )
        out = minimize(spec, variant, p, start, config, engine=engine)
        total_evals += out.n_evals
        total_ms += out.wall_time_ms
        if best is None or out.best_energy < best.best_energy:
            out.start_index = idx
            best = out
        if best.residual <= target_residual:
            break
    best.n_evals = total_evals
    best.wall_time_ms = total_ms
    return best


def interp_extend(prev: AngleSchedule) -> AngleSchedule:
    """Depth p+1 warm start interpolated from optimized depth-p angles.

    Applied independently to every parameter family: guess_i =
    ((i-1)/p) * prev_{i-1} + ((p-i+1)/p) * prev_i with zero boundaries
    prev_0 = prev_{p+1} = 0.
    """
    p = prev.steps
    m = prev.values.shape[1]
    padded = np.vstack([np.zeros((1, m)), prev.values, np.zeros((1, m))])
    i = np.arange(1, p + 2, dtype=float)[:, None]
    guess = ((i - 1.0) / p) * padded[0 : p + 1] + ((p - i + 1.0) / p) * padded[1 : p + 2]
    return AngleSchedule(prev.variant, guess)


def _zero_pad(prev: AngleSchedule) -> AngleSchedule:
    """Depth p+1 start appending an identity step (all angles zero)."""
    m = prev.values.shape[1]
    return AngleSchedule(prev.variant, np.vstack([prev.values, np.zeros((1, m))]))


def sweep_depth(
    spec: ChainSpec,
    variant: Variant,
    p_max: int,
    strategy: Strategy,
    config: OptimizerConfig,
    extra_starts: dict[int, list[AngleSchedule]] | None = None,
    nested: bool = False,
    stop_residual: float | None = None,
) -> list[OptimizationResult]:
    """Optimize depths p = 1..p_max.

    Interp warm-starts each depth from the previous optimum plus one random
    safeguard start.  MultiStart draws config.restarts independent random
    starts per depth; with ``nested`` the previous optimum padded by an
    identity step joins the pool, making best energies nonincreasing in p.
    ``extra_starts`` appends caller-supplied candidates at given depths;
    ``stop_residual`` ends the sweep early once a depth reaches it.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    engine = engine_for(spec)
    extra_starts = extra_starts or {}
    results: list[OptimizationResult] = []
    prev: AngleSchedule | None = None
    for p in range(1, p_max + 1):
        if strategy is Strategy.INTERP:
            if prev is None:
                starts = [
                    random_schedule(variant, p, config.seed, i, config.init_box)
                    for i in range(config.restarts)
                ]
            else:
                starts = [
                    interp_extend(prev),
                    random_schedule(variant, p, config.seed, 0, config.init_box),
                ]
        else:
            starts = [
                random_schedule(variant, p, config.seed, i, config.init_box)
                for i in range(config.restarts)
            ]
            if nested and prev is not None:
                starts.append(_zero_pad(prev))
        starts.extend(extra_starts.get(p, []))
        best = _best_of(spec, variant, p, starts, config, engine)
        results.append(best)
        prev = best.best_angles
        if stop_residual is not None and best.residual <= stop_residual:
            break
    return results


def landscape_grid(
    spec: ChainSpec,
    variant: Variant,
    grid: tuple[tuple[float, float], tuple[float, float], int, int],
    fixed: np.ndarray | None = None,
) -> np.ndarray:
    """Depth-1 cost on a (beta, gamma) grid; entry [i, j] = E(beta_i, gamma_j).

    Free variants hold their extra angles at ``fixed`` (default zeros);
    constrained variants derive them from each grid point.
    """
    (beta_lo, beta_hi), (gamma_lo, gamma_hi), n_beta, n_gamma = grid
    if n_beta < 1 or n_gamma < 1:
        raise ValueError("grid must have at least one point per axis")
    m = params_per_step(variant)
    extras = np.zeros(m - 2) if fixed is None else np.asarray(fixed, dtype=float)
    if extras.shape != (m - 2,):
        raise ValueError(f"{variant.value} needs {m - 2} fixed extra angles")
    engine = engine_for(spec)
    betas = np.linspace(beta_lo, beta_hi, n_beta)
    gammas = np.linspace(gamma_lo, gamma_hi, n_gamma)
    out = np.empty((n_beta, n_gamma))
    row = np.empty((1, m))
    for i, beta in enumerate(betas):
        for j, gamma in enumerate(gammas):
            row[0, 0] = gamma
            row[0, 1] = beta
            row[0, 2:] = extras
            out[i, j] = engine.energy_values(variant, row)
    return out
