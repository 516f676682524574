"""Experiment orchestration: instance ensembles, records, stats, validation.

A run fans a (family, size, seed) instance set across variants and depths,
collects one record per (instance, variant, p), and writes deterministic
CSV plus a JSON manifest.  Floats are serialized with 17 significant digits
so records round-trip bit-exactly.
"""

from __future__ import annotations

import csv
import enum
import json
import math
import platform
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .dense import (
    cd_operator,
    dense_run_circuit,
    jw_quadratic_dense,
    nested_cd_operators,
    parity_x_dense,
)
from .fermion import generator_2cd, generator_cd, run_circuit
from .model import (
    AngleSchedule,
    Boundary,
    ChainSpec,
    Variant,
    make_open_random,
    make_open_uniform,
    make_ring_uniform,
    params_per_step,
)
from .optimize import (
    OptimizerConfig,
    Strategy,
    landscape_grid,
    minimize,
    random_schedule,
    sweep_depth,
)

__all__ = [
    "SpecFamily",
    "ExperimentConfig",
    "RunRecord",
    "StatRow",
    "ValidationCheck",
    "ValidationReport",
    "make_instance",
    "run_experiment",
    "write_records",
    "read_records",
    "write_manifest",
    "ensemble_stats",
    "reindex_by_parameters",
    "emit_landscape",
    "validate",
]


class SpecFamily(enum.Enum):
    RING_UNIFORM = "ring-uniform"
    OPEN_UNIFORM = "open-uniform"
    OPEN_RANDOM = "open-random"


_DEFAULT_VARIANTS = (Variant.QAOA, Variant.QAOA_CD, Variant.QAOA_2CD)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one ensemble run; serializes to the manifest."""

    family: SpecFamily
    n_sites: int
    p_max: int
    variants: tuple[Variant, ...] = _DEFAULT_VARIANTS
    m_instances: int | None = None
    base_seed: int = 0
    strategies: dict[Variant, Strategy] | None = None
    n_starts: int = 20
    threshold: float = 1e-2
    stop_threshold: float | None = None
    nested_starts: bool = True
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    output_dir: str = "runs"

    def __post_init__(self) -> None:
        if self.p_max < 1:
            raise ValueError("p_max must be >= 1")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if not (0 < self.threshold < 1):
            raise ValueError("threshold must be in (0, 1)")
        if self.m_instances is None:
            m = 20 if self.family is SpecFamily.OPEN_RANDOM else 1
            object.__setattr__(self, "m_instances", m)
        if self.family is not SpecFamily.OPEN_RANDOM and self.m_instances != 1:
            raise ValueError("uniform families admit a single instance")
        if self.m_instances < 1:
            raise ValueError("m_instances must be >= 1")

    def strategy_for(self, variant: Variant) -> Strategy:
        if self.strategies and variant in self.strategies:
            return self.strategies[variant]
        if self.family is SpecFamily.OPEN_RANDOM:
            return Strategy.MULTISTART
        return Strategy.INTERP

    def to_json(self) -> str:
        obj = {
            "family": self.family.value,
            "n_sites": self.n_sites,
            "p_max": self.p_max,
            "variants": [v.value for v in self.variants],
            "m_instances": self.m_instances,
            "base_seed": self.base_seed,
            "strategies": (
                {v.value: s.value for v, s in self.strategies.items()}
                if self.strategies
                else None
            ),
            "n_starts": self.n_starts,
            "threshold": self.threshold,
            "stop_threshold": self.stop_threshold,
            "nested_starts": self.nested_starts,
            "optimizer": json.loads(self.optimizer.to_json()),
            "output_dir": self.output_dir,
        }
        return json.dumps(obj, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        obj = json.loads(text)
        try:
            obj["family"] = SpecFamily(obj["family"])
            obj["variants"] = tuple(Variant(v) for v in obj["variants"])
            if obj.get("strategies"):
                obj["strategies"] = {
                    Variant(k): Strategy(s) for k, s in obj["strategies"].items()
                }
            obj["optimizer"] = OptimizerConfig.from_json(
                json.dumps(obj["optimizer"])
            )
            return cls(**obj)
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"malformed experiment config: {exc}") from exc


@dataclass
class RunRecord:
    instance_id: int
    variant: str
    p: int
    n_p: int
    energy: float
    residual: float
    n_evals: int
    seed: int
    wall_time_ms: float
    status: str
    angles: list[list[float]]


_CSV_FIELDS = [
    "instance_id",
    "variant",
    "p",
    "n_p",
    "energy",
    "residual",
    "n_evals",
    "seed",
    "wall_time_ms",
    "status",
    "angles",
]


def make_instance(family: SpecFamily, n_sites: int, seed: int) -> ChainSpec:
    if family is SpecFamily.RING_UNIFORM:
        return make_ring_uniform(n_sites)
    if family is SpecFamily.OPEN_UNIFORM:
        return make_open_uniform(n_sites)
    return make_open_random(n_sites, seed)


def run_experiment(
    config: ExperimentConfig, write: bool = True
) -> list[RunRecord]:
    """Sweep every (instance, variant) pair and collect per-depth records."""
    records: list[RunRecord] = []
    for instance_id in range(config.m_instances):
        seed = config.base_seed + instance_id
        spec = make_instance(config.family, config.n_sites, seed)
        for variant in config.variants:
            opt = replace(config.optimizer, restarts=config.n_starts, seed=seed)
            results = sweep_depth(
                spec,
                variant,
                config.p_max,
                config.strategy_for(variant),
                opt,
                nested=config.nested_starts,
                stop_residual=config.stop_threshold,
            )
            for res in results:
                records.append(
                    RunRecord(
                        instance_id=instance_id,
                        variant=variant.value,
                        p=res.p,
                        n_p=res.n_params,
                        energy=res.best_energy,
                        residual=res.residual,
                        n_evals=res.n_evals,
                        seed=seed,
                        wall_time_ms=res.wall_time_ms,
                        status="ok" if res.converged else "budget",
                        angles=res.best_angles.values.tolist(),
                    )
                )
    records.sort(key=lambda r: (r.instance_id, r.variant, r.p))
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_records(records, out / "records.csv")
        write_manifest(config, out / "manifest.json")
    return records


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_records(records: list[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.instance_id,
                    r.variant,
                    r.p,
                    r.n_p,
                    _fmt(r.energy),
                    _fmt(r.residual),
                    r.n_evals,
                    r.seed,
                    _fmt(r.wall_time_ms),
                    r.status,
                    json.dumps(r.angles),
                ]
            )


def read_records(path: str | Path) -> list[RunRecord]:
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(
                RunRecord(
                    instance_id=int(row["instance_id"]),
                    variant=row["variant"],
                    p=int(row["p"]),
                    n_p=int(row["n_p"]),
                    energy=float(row["energy"]),
                    residual=float(row["residual"]),
                    n_evals=int(row["n_evals"]),
                    seed=int(row["seed"]),
                    wall_time_ms=float(row["wall_time_ms"]),
                    status=row["status"],
                    angles=json.loads(row["angles"]),
                )
            )
    return records


def write_manifest(config: ExperimentConfig, path: str | Path) -> None:
    manifest = {
        "config": json.loads(config.to_json()),
        "package_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)


@dataclass(frozen=True)
class StatRow:
    variant: str
    p: int
    n_p: int
    count: int
    mean_residual: float
    std_residual: float


def ensemble_stats(records: list[RunRecord]) -> list[StatRow]:
    """Mean and sample std of residuals grouped by (variant, p)."""
    groups: dict[tuple[str, int], list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.variant, r.p), []).append(r)
    rows = []
    for (variant, p), grp in sorted(groups.items()):
        vals = np.array([g.residual for g in grp])
        std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        rows.append(
            StatRow(
                variant=variant,
                p=p,
                n_p=grp[0].n_p,
                count=len(vals),
                mean_residual=float(vals.mean()),
                std_residual=std,
            )
        )
    return rows


def reindex_by_parameters(records: list[RunRecord]) -> list[StatRow]:
    """The same statistics keyed by total parameter count n_p."""
    rows = ensemble_stats(records)
    return sorted(rows, key=lambda s: (s.variant, s.n_p))


def write_stats(rows: list[StatRow], path: str | Path, by: str = "p") -> None:
    key = ["variant", "p", "n_p"] if by == "p" else ["variant", "n_p", "p"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(key + ["count", "mean_residual", "std_residual"])
        for s in rows:
            head = [s.variant, s.p, s.n_p] if by == "p" else [s.variant, s.n_p, s.p]
            writer.writerow(
                head + [s.count, _fmt(s.mean_residual), _fmt(s.std_residual)]
            )


def emit_landscape(
    spec: ChainSpec,
    variants: tuple[Variant, ...],
    grid: tuple[tuple[float, float], tuple[float, float], int, int],
    out_path: str | Path,
    optimizer: OptimizerConfig | None = None,
) -> Path:
    """Depth-1 (beta, gamma) cost grids, one labelled block per variant.

    Free variants with more than two angle families hold the extra angles
    at their depth-1 optimum, found by a short multistart first.
    """
    opt = optimizer or OptimizerConfig()
    rows = []
    for variant in variants:
        m = params_per_step(variant)
        fixed = None
        if not variant.is_constrained and m > 2:
            best = None
            for i in range(opt.restarts):
                start = random_schedule(variant, 1, opt.seed, i, opt.init_box)
                out = minimize(spec, variant, 1, start, opt)
                if best is None or out.best_energy < best.best_energy:
                    best = out
            fixed = best.best_angles.values[0, 2:]
        cost = landscape_grid(spec, variant, grid, fixed=fixed)
        (beta_lo, beta_hi), (gamma_lo, gamma_hi), n_beta, n_gamma = grid
        betas = np.linspace(beta_lo, beta_hi, n_beta)
        gammas = np.linspace(gamma_lo, gamma_hi, n_gamma)
        for i, beta in enumerate(betas):
            for j, gamma in enumerate(gammas):
                rows.append((variant.value, beta, gamma, cost[i, j]))
    out_path = Path(out_path)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "beta", "gamma", "cost"])
        for variant, beta, gamma, val in rows:
            writer.writerow([variant, _fmt(beta), _fmt(gamma), _fmt(val)])
    return out_path


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    n_sites: int
    max_abs_dev: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_abs_dev(self) -> float:
        return max(c.max_abs_dev for c in self.checks)


def _random_schedules(
    variant: Variant, rng: np.random.Generator, count: int
) -> list[AngleSchedule]:
    """Random schedules at mixed depths; commutator angles stay moderate."""
    out = []
    for i in range(count):
        p = 1 + i % 3
        vals = rng.uniform(-math.pi / 2, math.pi / 2, size=(p, 5))
        vals[:, 2:] = rng.uniform(-0.4, 0.4, size=(p, 3))
        out.append(
            AngleSchedule(variant, vals[:, : params_per_step(variant)].copy())
        )
    return out


def _cross_check(
    spec: ChainSpec, rng: np.random.Generator, trials: int, corrupt: bool
) -> float:
    """Max |E_fermion - E_dense| over random schedules, all variants."""
    worst = 0.0
    for variant in Variant:
        for sched in _random_schedules(variant, rng, trials):
            e_f = run_circuit(spec, sched)
            bad = sched
            if corrupt:
                vals = sched.values.copy()
                vals[0, 0] += 1e-3
                bad = AngleSchedule(variant, vals)
            e_d = dense_run_circuit(spec, bad)
            worst = max(worst, abs(e_f - e_d))
    return worst


def _reconstruction_dev(spec: ChainSpec, kind: str) -> float:
    """Elementwise gap between symbolic and quadratic-reconstructed operators.

    The quadratic matrices are parity-sector generators; on rings the dense
    reconstruction applies each sector's form through its parity projector.
    """
    n = spec.n_sites
    if kind == "cd":
        target = cd_operator(spec).to_dense()
        make = generator_cd
    elif kind == "2cd_xx":
        target = nested_cd_operators(spec)[0].to_dense()
        make = lambda s, parity=None: generator_2cd(s, parity)[0]
    elif kind == "2cd_tx":
        target = nested_cd_operators(spec)[1].to_dense()
        make = lambda s, parity=None: generator_2cd(s, parity)[1]
    else:
        raise ValueError(f"unknown generator kind: {kind}")
    if spec.boundary is Boundary.OPEN:
        gen = make(spec)
        rebuilt = jw_quadratic_dense(gen.matrix, gen.offset, n)
    else:
        dim = 2**n
        rebuilt = np.zeros((dim, dim), dtype=complex)
        par = parity_x_dense(n)
        eye = np.eye(dim)
        for sector in (+1, -1):
            gen = make(spec, parity=sector)
            proj = 0.5 * (eye + sector * par)
            block = jw_quadratic_dense(gen.matrix, gen.offset, n)
            rebuilt += proj @ block @ proj
    return float(np.abs(rebuilt - target).max())


def validate(
    n_list: tuple[int, ...] = (4, 6, 8),
    trials: int = 30,
    seed: int = 0,
    corrupt: bool = False,
) -> ValidationReport:
    """Cross-check the fermionic engine against the dense oracle.

    Two layers per size: circuit energies on random schedules for a uniform
    ring and a random open chain, and elementwise operator reconstruction of
    every commutator generator.  ``corrupt`` perturbs the schedules fed to
    the oracle, forcing a mismatch; it exists to prove the check can fail.
    """
    checks = []
    energy_tol = 1e-9
    op_tol = 1e-10
    for n in n_list:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n])))
        for label, spec in (
            ("energy-ring-uniform", make_ring_uniform(n)),
            ("energy-open-random", make_open_random(n, seed + n)),
        ):
            dev = _cross_check(spec, rng, trials, corrupt)
            checks.append(ValidationCheck(label, n, dev, energy_tol, dev <= energy_tol))
        for kind in ("cd", "2cd_xx", "2cd_tx"):
            for label, spec in (
                (f"operator-{kind}-ring", make_ring_uniform(n)),
                (f"operator-{kind}-open", make_open_random(n, seed + n + 1)),
            ):
                dev = _reconstruction_dev(spec, kind)
                checks.append(ValidationCheck(label, n, dev, op_tol, dev <= op_tol))
    return ValidationReport(tuple(checks))
