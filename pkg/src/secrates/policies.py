"""Channel-encoding rate policies: constant, or piecewise-constant in h_m."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CONSTANT = "constant"
TABULATED = "tabulated"


@dataclass(frozen=True)
class RatePolicy:
    """Code-rate rule R(h_m).

    ``constant`` policies ignore h_m.  ``tabulated`` policies are
    piecewise-constant, left-closed on sorted knot positions: the rate for
    ``h_m`` in ``[knots_h[k], knots_h[k+1])`` is ``knots_r[k]``; below the
    first knot the first rate applies, at or above the last knot the last.
    """

    kind: str
    rate: float | None = None
    knots_h: np.ndarray | None = field(default=None, repr=False)
    knots_r: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def constant(cls, rate: float) -> "RatePolicy":
        if rate < 0:
            raise ValueError("rate must be nonnegative")
        return cls(CONSTANT, rate=float(rate))

    @classmethod
    def tabulated(cls, knots_h, knots_r) -> "RatePolicy":
        h = np.asarray(knots_h, dtype=float)
        r = np.asarray(knots_r, dtype=float)
        if h.ndim != 1 or h.shape != r.shape or h.size == 0:
            raise ValueError("knots must be equal-length 1-D arrays")
        if np.any(np.diff(h) <= 0):
            raise ValueError("knot positions must be strictly increasing")
        if np.any(r < 0):
            raise ValueError("rates must be nonnegative")
        return cls(TABULATED, knots_h=h, knots_r=r)

    @property
    def is_constant(self) -> bool:
        return self.kind == CONSTANT

    def rate_at(self, h_m):
        """Evaluate R(h_m), vectorized."""
        h_m = np.asarray(h_m, dtype=float)
        if self.is_constant:
            out = np.full_like(h_m, self.rate)
        else:
            idx = np.clip(np.searchsorted(self.knots_h, h_m, side="right") - 1,
                          0, self.knots_r.size - 1)
            out = self.knots_r[idx]
        return out if out.ndim else float(out)

    def intervals(self):
        """Yield (lo, hi, rate) cells covering [0, inf)."""
        if self.is_constant:
            yield 0.0, np.inf, self.rate
            return
        edges = np.concatenate([[0.0] if self.knots_h[0] > 0 else [],
                                self.knots_h, [np.inf]])
        rates = self.knots_r if self.knots_h[0] == 0 else \
            np.concatenate([[self.knots_r[0]], self.knots_r])
        for lo, hi, r in zip(edges[:-1], edges[1:], rates):
            yield float(lo), float(hi), float(r)

    def min_rate(self) -> float:
        return self.rate if self.is_constant else float(self.knots_r.min())
