"""Black-box minimization over a bounded box: random search and a
tree-structured Parzen estimator.

The TPE follows the classic recipe: after a random startup phase, completed
trials split into a good set (best ceil(gamma * n) by value) and a bad set;
per dimension, each set is modeled by a mixture of truncated normal kernels
centered at the observed values plus one uniform prior kernel; candidates
are drawn from the good-set density l and the candidate maximizing
l(x)/g(x) is suggested. Objectives here are deterministic (exact
simulation), so values are treated as noiseless.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.special import ndtr, ndtri

Point = dict[str, float]


class StudyError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchDim:
    name: str
    lower: float
    upper: float
    scale: str = "linear"  # or "log"

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise ValueError(f"dim {self.name}: lower must be < upper")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"dim {self.name}: unknown scale {self.scale!r}")
        if self.scale == "log" and self.lower <= 0:
            raise ValueError(f"dim {self.name}: log scale needs positive bounds")

    def to_internal(self, x: float) -> float:
        return math.log(x) if self.scale == "log" else x

    def from_internal(self, z: float) -> float:
        x = math.exp(z) if self.scale == "log" else z
        return min(self.upper, max(self.lower, x))

    @property
    def internal_bounds(self) -> tuple[float, float]:
        return self.to_internal(self.lower), self.to_internal(self.upper)


@dataclass(frozen=True)
class SearchSpace:
    dims: tuple[SearchDim, ...]

    def __post_init__(self) -> None:
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ValueError("dimension names must be unique")
        object.__setattr__(self, "dims", tuple(self.dims))

    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)


# Physically plausible magnitudes bracketing typical device scales.
DEFAULT_BOUNDS: dict[str, tuple[float, float]] = {
    "k_dep": (0.0, 20.0),
    "b_dep": (0.0, 0.05),
    "b_amp": (0.0, 0.05),
    "theta_x": (-0.15, 0.15),
    "theta_y": (-0.15, 0.15),
    "theta_z": (-0.15, 0.15),
    "beta_1q": (0.3, 3.0),
    "k_dep_2q": (0.0, 20.0),
    "b_dep_2q": (0.0, 0.05),
    "b_amp_2q": (0.0, 0.05),
    "b_phi_2q": (0.0, 0.05),
    "theta_ix": (-0.15, 0.15),
    "theta_zx": (-0.15, 0.15),
    "theta_zz": (-0.15, 0.15),
    "beta_2q": (0.3, 3.0),
    "k_zz": (0.0, 0.5),
    "ro_a_0011": (0.0, 2.0),
    "ro_b_0011": (0.0, 0.05),
    "ro_a_0110": (0.0, 2.0),
    "ro_b_0110": (0.0, 0.05),
}


def default_search_space(
    overrides: Mapping[str, tuple[float, float]] | None = None,
) -> SearchSpace:
    """The 20-dimensional noise-parameter box (optionally with per-name
    bound overrides). Dimension count is fixed regardless of device size."""
    bounds = dict(DEFAULT_BOUNDS)
    if overrides:
        unknown = set(overrides) - set(bounds)
        if unknown:
            raise ValueError(f"unknown search dimensions: {sorted(unknown)}")
        bounds.update({k: (float(v[0]), float(v[1])) for k, v in overrides.items()})
    return SearchSpace(
        dims=tuple(SearchDim(name, lo, hi) for name, (lo, hi) in bounds.items())
    )


@dataclass(frozen=True)
class Trial:
    index: int
    params: Point
    value: float | None
    status: str  # "complete" | "failed"


@dataclass
class Study:
    method: str  # "tpe" | "rs"
    seed: int
    trials: list[Trial] = field(default_factory=list)

    def completed(self) -> list[Trial]:
        return [t for t in self.trials if t.status == "complete"]

    @property
    def best(self) -> int:
        done = self.completed()
        if not done:
            raise StudyError("study has no completed trials")
        best = min(done, key=lambda t: (t.value, t.index))
        return best.index

    @property
    def best_trial(self) -> Trial:
        return self.trials[self.best]

    def best_so_far(self) -> list[tuple[int, float | None]]:
        """Running minimum of completed values, one entry per trial."""
        curve: list[tuple[int, float | None]] = []
        running: float | None = None
        for t in self.trials:
            if t.status == "complete" and (running is None or t.value < running):
                running = t.value
            curve.append((t.index, running))
        return curve


@dataclass(frozen=True)
class TpeConfig:
    n_startup: int = 20
    gamma: float = 0.25
    n_candidates: int = 24
    # Relative floor keeping kernel bandwidths resolvable when trials repeat
    # a point (objectives are deterministic, so exact repeats do happen).
    bandwidth_floor: float = 1e-3


def random_suggest(space: SearchSpace, rng: np.random.Generator) -> Point:
    """Independent uniform (log-uniform on log dims) draw per dimension."""
    point = {}
    for dim in space.dims:
        zlo, zhi = dim.internal_bounds
        point[dim.name] = dim.from_internal(rng.uniform(zlo, zhi))
    return point


class ParzenMixture:
    """Per-dimension density: truncated normal kernels at observed points
    plus one uniform prior kernel, all weighted 1/(n_points + 1)."""

    def __init__(
        self, points: Sequence[float], lower: float, upper: float, floor: float = 1e-3
    ) -> None:
        self.lower = lower
        self.upper = upper
        width = upper - lower
        pts = np.sort(np.asarray(points, dtype=float))
        if pts.size >= 2:
            gaps_left = np.diff(pts, prepend=pts[0])
            gaps_right = np.diff(pts, append=pts[-1])
            sigmas = np.maximum(gaps_left, gaps_right)
            sigmas[sigmas <= 0] = width  # isolated duplicates fall back to width
        else:
            sigmas = np.full(pts.shape, width)
        self.points = pts
        self.sigmas = np.clip(sigmas, floor * width, width)
        self.weight = 1.0 / (pts.size + 1)

    def _norm_consts(self) -> np.ndarray:
        a = ndtr((self.lower - self.points) / self.sigmas)
        b = ndtr((self.upper - self.points) / self.sigmas)
        return b - a

    def pdf(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.full(z.shape, self.weight / (self.upper - self.lower))
        if self.points.size:
            u = (z[:, None] - self.points[None, :]) / self.sigmas[None, :]
            kernel = np.exp(-0.5 * u * u) / (self.sigmas[None, :] * math.sqrt(2 * math.pi))
            kernel /= self._norm_consts()[None, :]
            out = out + self.weight * kernel.sum(axis=1)
        return out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        choices = rng.integers(0, self.points.size + 1, size=size)
        u = rng.uniform(0.0, 1.0, size=size)
        out = np.empty(size)
        prior = choices == self.points.size
        out[prior] = self.lower + u[prior] * (self.upper - self.lower)
        idx = choices[~prior]
        if idx.size:
            mu = self.points[idx]
            sig = self.sigmas[idx]
            a = ndtr((self.lower - mu) / sig)
            b = ndtr((self.upper - mu) / sig)
            out[~prior] = mu + sig * ndtri(a + u[~prior] * (b - a))
        return np.clip(out, self.lower, self.upper)


def tpe_suggest(
    study: Study,
    space: SearchSpace,
    rng: np.random.Generator,
    config: TpeConfig = TpeConfig(),
) -> Point:
    """Suggest the candidate maximizing l(x)/g(x); falls back to
    :func:`random_suggest` during the startup phase."""
    done = study.completed()
    if len(done) < config.n_startup:
        return random_suggest(space, rng)
    ordered = sorted(done, key=lambda t: (t.value, t.index))
    n_good = math.ceil(config.gamma * len(ordered))
    good, bad = ordered[:n_good], ordered[n_good:]

    scores = None
    candidates: dict[str, np.ndarray] = {}
    for dim in space.dims:
        zlo, zhi = dim.internal_bounds
        l_mix = ParzenMixture(
            [dim.to_internal(t.params[dim.name]) for t in good], zlo, zhi, config.bandwidth_floor
        )
        g_mix = ParzenMixture(
            [dim.to_internal(t.params[dim.name]) for t in bad], zlo, zhi, config.bandwidth_floor
        )
        z = l_mix.sample(rng, config.n_candidates)
        candidates[dim.name] = z
        dim_score = np.log(l_mix.pdf(z)) - np.log(g_mix.pdf(z))
        scores = dim_score if scores is None else scores + dim_score
    pick = int(np.argmax(scores))
    return {
        dim.name: dim.from_internal(float(candidates[dim.name][pick])) for dim in space.dims
    }


def _suggest(
    method: str,
    study: Study,
    space: SearchSpace,
    rng: np.random.Generator,
    tpe_config: TpeConfig,
) -> Point:
    if method == "rs":
        return random_suggest(space, rng)
    if method == "tpe":
        return tpe_suggest(study, space, rng, tpe_config)
    raise ValueError(f"unknown optimization method {method!r}")


def run_study(
    objective: Callable[[Point], float],
    space: SearchSpace,
    n_trials: int,
    method: str = "tpe",
    seed: int = 0,
    tpe_config: TpeConfig = TpeConfig(),
    resume: Study | None = None,
    on_trial: Callable[[Trial], None] | None = None,
) -> Study:
    """Sequential suggest-evaluate loop; fully determined by
    (method, seed, space, objective).

    Failed evaluations are recorded and excluded from surrogate fitting.
    With ``resume``, recorded trials are replayed suggestion-only (advancing
    the generator identically) and evaluation continues from the next index.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    rng = np.random.default_rng(seed)
    study = Study(method=method, seed=seed)
    if resume is not None:
        if (resume.method, resume.seed) != (method, seed):
            raise StudyError("resume study does not match method/seed")
        for old in resume.trials:
            replayed = _suggest(method, study, space, rng, tpe_config)
            if any(
                not math.isclose(replayed[k], old.params[k], rel_tol=1e-12, abs_tol=1e-15)
                for k in replayed
            ):
                raise StudyError(f"resume replay diverged at trial {old.index}")
            study.trials.append(old)
    while len(study.trials) < n_trials:
        index = len(study.trials)
        point = _suggest(method, study, space, rng, tpe_config)
        try:
            value = float(objective(point))
            trial = Trial(index=index, params=point, value=value, status="complete")
        except Exception:  # noqa: BLE001 - failed trials are data, not crashes
            trial = Trial(index=index, params=point, value=None, status="failed")
        study.trials.append(trial)
        if on_trial is not None:
            on_trial(trial)
    if not study.completed():
        raise StudyError("objective failed on every trial")
    return study


def save_study(study: Study, path: str | Path) -> None:
    """One trial per line (JSON lines), enabling resume."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {"method": study.method, "seed": study.seed}
        fh.write(json.dumps(header) + "\n")
        for t in study.trials:
            fh.write(
                json.dumps(
                    {"index": t.index, "params": t.params, "value": t.value, "status": t.status}
                )
                + "\n"
            )


def load_study(path: str | Path) -> Study:
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    header = json.loads(lines[0])
    study = Study(method=header["method"], seed=int(header["seed"]))
    for line in lines[1:]:
        doc = json.loads(line)
        study.trials.append(
            Trial(
                index=int(doc["index"]),
                params={k: float(v) for k, v in doc["params"].items()},
                value=None if doc["value"] is None else float(doc["value"]),
                status=doc["status"],
            )
        )
    return study
