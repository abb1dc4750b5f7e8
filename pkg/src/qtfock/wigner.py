"""Monte Carlo for products of rho-correlated Wigner matrices.

Each entry ``w_ij(k)``, ``i <= j``, is an independent stationary chain in
``k`` with unit variance and ``E w_ij(k) w_ij(m) = rho^(m-k)``.  The
statistic is ``(1/N) Tr(W(1)/sqrt(N) ... W(n)/sqrt(N))`` averaged over
trials.  Its large-``N`` limit for ``2m`` factors is
``rho^m sum over non-crossing pairings of rho^(2 nest)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .combin import iter_noncrossing_pair_partitions, nestings
from .errors import ValidationError

ENTRY_LAWS = ("gaussian", "rademacher")
NORMALIZATIONS = ("sqrt", "linear")


@dataclass(frozen=True)
class WignerConfig:
    N: int
    rho: float
    n: int
    trials: int = 100
    seed: int = 0
    entries: str = "gaussian"
    normalization: str = "sqrt"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValidationError("N must be an integer >= 2")
        if not (0 <= self.rho <= 1):
            raise ValidationError(f"rho must lie in [0, 1], got {self.rho}")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("n (number of factors) must be a positive integer")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError("trials must be a positive integer")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise ValidationError("seed must be an integer in [0, 2^64)")
        if self.entries not in ENTRY_LAWS:
            raise ValidationError(f"entries must be one of {ENTRY_LAWS}")
        if self.normalization not in NORMALIZATIONS:
            raise ValidationError(f"normalization must be one of {NORMALIZATIONS}")

    def to_json(self) -> dict:
        return asdict(self)


class TraceEstimate(NamedTuple):
    mean: float
    std_error: float
    trials: int


class MonteCarloResult(NamedTuple):
    estimate: TraceEstimate
    prediction: float
    z_score: float
    per_trial: np.ndarray


def _symmetrize(upper: np.ndarray) -> np.ndarray:
    return np.triu(upper) + np.triu(upper, 1).swapaxes(-1, -2)


def sample_process(cfg: WignerConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """``cfg.n`` symmetric ``N x N`` matrices ``W(1), ..., W(n)`` stacked on axis 0.

    Gaussian entries follow ``w(k) = rho w(k-1) + sqrt(1 - rho^2) xi``.
    Rademacher entries keep their sign with probability ``(1 + rho) / 2``
    at each step, which gives the same correlations with ``+-1`` marginals.
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    N, rho = cfg.N, cfg.rho
    out = np.empty((cfg.n, N, N))
    if cfg.entries == "gaussian":
        w = rng.standard_normal((N, N))
        out[0] = w
        s = math.sqrt(max(0.0, 1 - rho * rho))
        for k in range(1, cfg.n):
            w = rho * w + s * rng.standard_normal((N, N))
            out[k] = w
    else:
        w = rng.choice(np.array([-1.0, 1.0]), size=(N, N))
        out[0] = w
        for k in range(1, cfg.n):
            flip = rng.random((N, N)) >= (1 + rho) / 2
            w = np.where(flip, -w, w)
            out[k] = w
    return _symmetrize(out)


def trace_statistic(matrices: Sequence[np.ndarray], normalization: str = "sqrt") -> float:
    """``(1/N) Tr`` of the product of ``W(k) / sqrt(N)`` (or ``W(k) / N`` with ``"linear"``)."""
    mats = [np.asarray(m, dtype=float) for m in matrices]
    if not mats:
        raise ValidationError("need at least one matrix")
    N = mats[0].shape[0]
    if any(m.shape != (N, N) for m in mats):
        raise ValidationError("all matrices must be square and of the same size")
    if normalization not in NORMALIZATIONS:
        raise ValidationError(f"normalization must be one of {NORMALIZATIONS}")
    scale = math.sqrt(N) if normalization == "sqrt" else float(N)
    prod = mats[0] / scale
    for m in mats[1:]:
        prod = prod @ (m / scale)
    return float(np.trace(prod) / N)


def theoretical_limit(rho: float, n_factors: int) -> float:
    """Large-``N`` limit of the statistic: ``rho^m sum_{NC_2(2m)} rho^(2 nest)`` for ``2m`` factors."""
    if n_factors < 1:
        raise ValidationError("n_factors must be positive")
    if n_factors % 2:
        return 0.0
    m = n_factors // 2
    total = math.fsum(rho ** (2 * nestings(V)) for V in iter_noncrossing_pair_partitions(m))
    return float(rho**m * total)


def trial_seeds(seed: int, trials: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(trials)


def _one_trial(cfg: WignerConfig, ss: np.random.SeedSequence) -> float:
    return trace_statistic(sample_process(cfg, np.random.default_rng(ss)), cfg.normalization)


def monte_carlo(cfg: WignerConfig, workers: int | None = None) -> MonteCarloResult:
    """Estimate the statistic over ``cfg.trials`` independent process samples.

    Trial ``i`` uses the ``i``-th child of ``SeedSequence(cfg.seed)`` and
    results are reduced in trial order, so the output does not depend on
    ``workers``.
    """
    seeds = trial_seeds(cfg.seed, cfg.trials)
    if workers is None or workers <= 1:
        values = [_one_trial(cfg, ss) for ss in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda ss: _one_trial(cfg, ss), seeds))
    arr = np.array(values)
    mean = math.fsum(values) / len(values)
    se = float(np.std(arr, ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    prediction = theoretical_limit(cfg.rho, cfg.n)
    if se > 0:
        z = (mean - prediction) / se
    else:
        z = 0.0 if mean == prediction else math.inf
    return MonteCarloResult(TraceEstimate(mean, se, len(values)), prediction, z, arr)
