"""Ergodic-scenario secrecy rates and the encoding-strategy dominance region.

Three quantities: the rate achieved by encoding one message across all
blocks with no CSI, the upper bound on any block-by-block scheme with a
jamming-gain design threshold, and the rate of the plain ARQ variant of
block-by-block encoding.  The dominance region marks, over a grid of
mean channel gains, where encoding across blocks beats the block-by-block
upper bound.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import (
    ChannelTriple,
    GainDistribution,
    MonteCarlo,
    Quadrature,
    expect,
    sample,
    substream,
)
from .phy_rates import SystemParams

_DEFAULT_SEED = 171717


@dataclass(frozen=True)
class ErgodicConfig:
    sp: SystemParams
    dist: ChannelTriple
    hz_star: float  # block-by-block encoding threshold on the jamming gain

    def __post_init__(self):
        if self.hz_star < 0:
            raise ValueError("hz_star must be nonnegative")


@dataclass(frozen=True)
class ErgodicRates:
    r_nocsi: float
    r_upper: float
    r_arq: float
    err_nocsi: float
    err_upper: float
    err_arq: float


def _expect_joint(f, dists, method):
    """E[f(X1, X2, ...)] over independent gains.

    Monte Carlo draws one joint batch; quadrature integrates the
    nondegenerate coordinates as nested 1-D integrals (fragile beyond two
    fading axes, which is why Monte Carlo is the default there).
    """
    degenerate = [d.is_degenerate for d in dists]
    if all(degenerate):
        return float(np.asarray(f(*[np.asarray(d.param) for d in dists]))), 0.0

    if isinstance(method, MonteCarlo):
        padded = list(dists) + [GainDistribution.deterministic(0.0)] * (3 - len(dists))
        batch = sample(ChannelTriple(*padded), method.seed, method.n)
        xs = [batch.values[:, i] for i in range(len(dists))]
        vals = np.asarray(f(*xs), dtype=float)
        return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(method.n))

    idx = degenerate.index(False)
    inner_dists = list(dists)

    def outer(x):
        fixed = float(x)

        def g(*rest):
            args = list(rest[:idx]) + [np.asarray(fixed)] + list(rest[idx:])
            return f(*args)

        sub = inner_dists[:idx] + inner_dists[idx + 1:]
        if not sub:
            return float(np.asarray(f(np.asarray(fixed))))
        val, _ = _expect_joint(g, sub, Quadrature(tol=method.tol * 0.5))
        return val

    return expect(dists[idx], outer, method)


def _default_method(dists, mc_seed, mc_n):
    n_fading = sum(not d.is_degenerate for d in dists)
    if n_fading <= 1:
        return Quadrature(tol=1e-9)
    return MonteCarlo(seed=mc_seed, n=mc_n)


def _diff(sp: SystemParams, h_m, h_e, h_z):
    return np.log2(1.0 + sp.p * h_m / (1.0 + sp.p_j * h_z)) - np.log2(1.0 + sp.p * h_e)


def rate_nocsi(
    cfg: ErgodicConfig,
    method: MonteCarlo | Quadrature | None = None,
    mc_n: int = 1_000_000,
) -> tuple[float, float]:
    """Rate of encoding across blocks with no CSI: positive part of the
    mean capacity advantage over the always-jamming / eavesdropping mix."""
    sp, dist = cfg.sp, cfg.dist
    dists = [dist.h_m, dist.h_e, dist.h_z]
    method = method or _default_method(dists, substream(_DEFAULT_SEED, 1), mc_n)
    value, err = _expect_joint(lambda m, e, z: _diff(sp, m, e, z), dists, method)
    return max(value, 0.0), err


def rate_upper_bound(
    cfg: ErgodicConfig,
    method: MonteCarlo | Quadrature | None = None,
    mc_n: int = 1_000_000,
) -> tuple[float, float]:
    """Upper bound for any block-by-block scheme with threshold hz_star:
    mean of the per-block positive part, scaled by P[H_z <= hz_star]."""
    sp, dist = cfg.sp, cfg.dist
    dists = [dist.h_m, dist.h_e, dist.h_z]
    method = method or _default_method(dists, substream(_DEFAULT_SEED, 2), mc_n)
    value, err = _expect_joint(
        lambda m, e, z: np.maximum(_diff(sp, m, e, z), 0.0), dists, method
    )
    scale = float(dist.h_z.cdf(cfg.hz_star))
    return value * scale, err * scale


def rate_arq(
    cfg: ErgodicConfig,
    method: MonteCarlo | Quadrature | None = None,
    mc_n: int = 1_000_000,
) -> tuple[float, float]:
    """Rate of the plain ARQ block-by-block scheme: the jamming gain in
    the expectation is pinned at hz_star and the probability factor is
    squared (one feedback round per retransmission)."""
    sp, dist = cfg.sp, cfg.dist
    dists = [dist.h_m, dist.h_e]
    method = method or _default_method(dists, substream(_DEFAULT_SEED, 3), mc_n)
    value, err = _expect_joint(
        lambda m, e: np.maximum(_diff(sp, m, e, np.asarray(cfg.hz_star)), 0.0),
        dists,
        method,
    )
    scale = float(dist.h_z.cdf(cfg.hz_star)) ** 2
    return value * scale, err * scale


def rates(cfg: ErgodicConfig, mc_n: int = 1_000_000) -> ErgodicRates:
    rn, en = rate_nocsi(cfg, mc_n=mc_n)
    ru, eu = rate_upper_bound(cfg, mc_n=mc_n)
    ra, ea = rate_arq(cfg, mc_n=mc_n)
    return ErgodicRates(rn, ru, ra, en, eu, ea)


class NoCrossing(Exception):
    """One strategy dominates over the whole grid column."""


@dataclass(frozen=True)
class BoundaryPoint:
    e_he: float
    e_hm: float | None
    status: str  # "ok" | "no_crossing"
    gap_err: float


@dataclass(frozen=True)
class RegionConfig:
    sp: SystemParams
    h_z: GainDistribution
    hz_quantile: float | None = 0.75
    hz_star: float | None = None
    mc_n: int = 200_000
    seed: int = _DEFAULT_SEED
    max_workers: int | None = None

    def resolve_hz_star(self) -> float:
        if self.hz_star is not None:
            return float(self.hz_star)
        return float(self.h_z.ppf(self.hz_quantile))


@dataclass(frozen=True)
class RegionResult:
    he_means: np.ndarray
    hm_means: np.ndarray
    r_nocsi: np.ndarray  # shape (len(he), len(hm))
    r_upper: np.ndarray
    err_nocsi: np.ndarray
    err_upper: np.ndarray
    boundary: list[BoundaryPoint]


def _point_rates(sp, h_z, hz_star, e_he, e_hm, seed, mc_n):
    dist = ChannelTriple(
        GainDistribution.exponential(e_hm), GainDistribution.exponential(e_he), h_z
    )
    cfg = ErgodicConfig(sp, dist, hz_star)
    rn, en = rate_nocsi(cfg, MonteCarlo(substream(seed, 1), mc_n))
    ru, eu = rate_upper_bound(cfg, MonteCarlo(substream(seed, 2), mc_n))
    return rn, ru, en, eu


def dominance_region(he_means, hm_means, cfg: RegionConfig) -> RegionResult:
    """Rate grid plus, per E[H_e] column, the E[H_m] where the two
    encoding strategies tie (found by bisection on the continuous axis).

    Grid points carry independent deterministic seeds, so results do not
    depend on the worker count.
    """
    he_means = np.asarray(he_means, dtype=float)
    hm_means = np.asarray(hm_means, dtype=float)
    if np.any(he_means <= 0) or np.any(hm_means <= 0):
        raise ValueError("grid axes must be positive")
    if np.any(np.diff(he_means) <= 0) or np.any(np.diff(hm_means) <= 0):
        raise ValueError("grid axes must be strictly increasing")
    hz_star = cfg.resolve_hz_star()

    cells = [(i, j) for i in range(he_means.size) for j in range(hm_means.size)]

    def run_cell(ij):
        i, j = ij
        return _point_rates(
            cfg.sp, cfg.h_z, hz_star, he_means[i], hm_means[j],
            substream(cfg.seed, i, j), cfg.mc_n,
        )

    with ThreadPoolExecutor(max_workers=cfg.max_workers or 4) as pool:
        results = list(pool.map(run_cell, cells))

    shape = (he_means.size, hm_means.size)
    rn = np.empty(shape)
    ru = np.empty(shape)
    en = np.empty(shape)
    eu = np.empty(shape)
    for (i, j), (a, b, ea_, eb_) in zip(cells, results):
        rn[i, j], ru[i, j], en[i, j], eu[i, j] = a, b, ea_, eb_

    boundary = []
    for i, e_he in enumerate(he_means):
        gap_lo = rn[i, 0] - ru[i, 0]
        gap_hi = rn[i, -1] - ru[i, -1]
        if hm_means.size < 2 or gap_lo * gap_hi > 0:
            boundary.append(BoundaryPoint(float(e_he), None, "no_crossing", 0.0))
            continue
        lo, hi = float(hm_means[0]), float(hm_means[-1])
        gap_err = 0.0
        step = 0
        while hi - lo > 1e-3 * (hm_means[-1] - hm_means[0]):
            mid = 0.5 * (lo + hi)
            a, b, ea_, eb_ = _point_rates(
                cfg.sp, cfg.h_z, hz_star, e_he, mid,
                substream(cfg.seed, i, 100_000 + step), cfg.mc_n,
            )
            step += 1
            gap_err = float(np.hypot(ea_, eb_))
            if (a - b) * gap_lo <= 0:
                hi = mid
            else:
                lo = mid
        boundary.append(BoundaryPoint(float(e_he), 0.5 * (lo + hi), "ok", gap_err))

    return RegionResult(he_means, hm_means, rn, ru, en, eu, boundary)
