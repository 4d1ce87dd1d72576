"""Fading-gain distributions: seeded sampling, CDFs, and expectations.

Only two marginal laws are supported, an exponential law (Rayleigh power
gain) and a point mass (non-fading link).  The three links of the wiretap
setup are mutually independent, so a joint draw is three independent
inverse-CDF transforms of one counter-based uniform stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import NonConvergence

EXPONENTIAL = "exponential"
DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class GainDistribution:
    """Marginal law of one channel power gain (linear units)."""

    kind: str
    param: float  # mean of the exponential law, or the point-mass value

    def __post_init__(self):
        if self.kind == EXPONENTIAL:
            if not self.param > 0:
                raise ValueError("exponential mean must be positive")
        elif self.kind == DETERMINISTIC:
            if self.param < 0:
                raise ValueError("deterministic gain must be nonnegative")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def exponential(cls, mean: float) -> "GainDistribution":
        return cls(EXPONENTIAL, float(mean))

    @classmethod
    def deterministic(cls, value: float) -> "GainDistribution":
        return cls(DETERMINISTIC, float(value))

    @property
    def is_degenerate(self) -> bool:
        return self.kind == DETERMINISTIC

    @property
    def mean(self) -> float:
        return self.param

    def cdf(self, x):
        """P[H <= x]; right-continuous."""
        x = np.asarray(x, dtype=float)
        if self.kind == EXPONENTIAL:
            out = np.where(x >= 0, -np.expm1(-np.maximum(x, 0.0) / self.param), 0.0)
        else:
            out = np.where(x >= self.param, 1.0, 0.0)
        return out if out.ndim else float(out)

    def tail_geq(self, x):
        """P[H >= x], tie inclusive (differs from 1-cdf only at atoms)."""
        x = np.asarray(x, dtype=float)
        if self.kind == EXPONENTIAL:
            out = np.where(x <= 0, 1.0, np.exp(-np.maximum(x, 0.0) / self.param))
        else:
            out = np.where(x <= self.param, 1.0, 0.0)
        return out if out.ndim else float(out)

    def ppf(self, q):
        """Quantile function (generalized inverse of the CDF)."""
        q = np.asarray(q, dtype=float)
        if np.any((q < 0) | (q > 1)):
            raise ValueError("quantile levels must lie in [0, 1]")
        if self.kind == EXPONENTIAL:
            out = -self.param * np.log1p(-np.minimum(q, 1.0 - 1e-16))
        else:
            out = np.full_like(q, self.param)
        return out if out.ndim else float(out)

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Inverse-CDF transform of uniforms in [0, 1)."""
        if self.kind == EXPONENTIAL:
            return -self.param * np.log1p(-u)
        return np.full_like(u, self.param)


@dataclass(frozen=True)
class ChannelTriple:
    """Joint law of the three independent power gains."""

    h_m: GainDistribution
    h_e: GainDistribution
    h_z: GainDistribution

    @property
    def is_degenerate(self) -> bool:
        return self.h_m.is_degenerate and self.h_e.is_degenerate and self.h_z.is_degenerate

    def components(self) -> tuple[GainDistribution, GainDistribution, GainDistribution]:
        return (self.h_m, self.h_e, self.h_z)


@dataclass(frozen=True)
class SampleBatch:
    """A reproducible batch of i.i.d. gain triples, shape (n, 3)."""

    seed: int
    n: int
    values: np.ndarray

    @property
    def h_m(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def h_e(self) -> np.ndarray:
        return self.values[:, 1]

    @property
    def h_z(self) -> np.ndarray:
        return self.values[:, 2]


def substream(seed: int, *key: int) -> int:
    """Derive a child seed deterministically from (seed, key)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _generator(seed: int) -> np.random.Generator:
    # Philox is counter-based: the stream is a pure function of the key,
    # so draws cannot be reordered by parallel evaluation.
    return np.random.Generator(np.random.Philox(key=int(seed)))


def sample(dist: ChannelTriple, seed: int, n: int) -> SampleBatch:
    """Draw n i.i.d. gain triples; bit-identical for identical inputs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = _generator(seed).random((3, n))
    cols = [d.from_uniform(u[i]) for i, d in enumerate(dist.components())]
    return SampleBatch(seed=int(seed), n=int(n), values=np.stack(cols, axis=1))


@dataclass(frozen=True)
class MonteCarlo:
    """Expectation by seeded Monte Carlo averaging."""

    seed: int
    n: int = 1_000_000


@dataclass(frozen=True)
class Quadrature:
    """Expectation by adaptive quadrature to an absolute tolerance."""

    tol: float = 1e-9
    limit: int = 400


def expect(
    dist: GainDistribution,
    f: Callable[[np.ndarray], np.ndarray],
    method: MonteCarlo | Quadrature,
) -> tuple[float, float]:
    """Estimate E[f(H)]; returns (value, error_estimate).

    The error estimate is the Monte Carlo standard error, or the requested
    quadrature tolerance.  For a point mass the value is exact and the
    error is zero.
    """
    if dist.is_degenerate:
        return float(np.asarray(f(np.asarray(dist.param)))), 0.0

    if isinstance(method, MonteCarlo):
        x = dist.from_uniform(_generator(method.seed).random(method.n))
        vals = np.asarray(f(x), dtype=float)
        mean = float(vals.mean())
        stderr = float(vals.std(ddof=1) / np.sqrt(method.n))
        return mean, stderr

    # Map [0, inf) to [0, 1) via t = cdf(x), i.e. x = -mu*log(1-t), so the
    # integrand is f(x(t)) against Lebesgue measure on the unit interval.
    mu = dist.param

    def integrand(t):
        return float(f(np.asarray(-mu * np.log1p(-t))))

    out = integrate.quad(
        integrand, 0.0, 1.0, epsabs=method.tol, epsrel=1e-12,
        limit=method.limit, full_output=1,
    )
    value, abserr = out[0], out[1]
    if abserr > max(method.tol, abs(value) * 1e-8):
        raise NonConvergence(
            f"quadrature error {abserr:.3g} exceeds tolerance {method.tol:.3g}"
        )
    return float(value), method.tol
