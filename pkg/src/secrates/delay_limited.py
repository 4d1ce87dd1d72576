"""Outage-constrained maximin secrecy-rate solver for the delay-limited case.

The long-run fraction of blocks that survive both connection and secrecy
outage, evaluated at the adversary's best response, must stay above a
threshold ``alpha``.  The transmitter maximizes the secrecy rate subject
to that constraint; the constraint value shrinks as the secrecy rate
grows (holding the optimized policy class fixed), so the outer search is
a bisection.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import adversary as adv
from .adversary import CsiRegime, JammingRule
from .channels import ChannelTriple, GainDistribution, MonteCarlo, Quadrature, expect, sample, substream
from .errors import AlphaOutOfRange, PolicyRegimeMismatch, SecratesError, UnsupportedRegime
from .phy_rates import SystemParams, rate_main_clear, rate_main_jammed, success_indicator
from .policies import RatePolicy

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint value with its Monte Carlo error bar."""

    c_min: float
    std_err: float
    feasible: bool | None
    regime: CsiRegime


@dataclass(frozen=True)
class SecrecySolution:
    r_s_star: float
    policy: RatePolicy
    report: FeasibilityReport


@dataclass(frozen=True)
class SearchConfig:
    rate_tol: float = 1e-4
    mc_n: int = 1_000_000
    seed: int = 20240
    n_knots: int = 256
    # feasible iff c_min - margin_k * std_err >= alpha; 0 keeps the plain
    # constraint semantics, larger values give conservative runs
    margin_k: float = 0.0
    pilot_grid: int = 200
    r_cap: float = 64.0


def _check_regime(regime: CsiRegime, policy: RatePolicy, rule: JammingRule | None = None):
    if rule is not None and rule.regime is not regime:
        raise PolicyRegimeMismatch(f"rule built for {rule.regime}, evaluated as {regime}")
    if regime is CsiRegime.NO_CSI and not policy.is_constant:
        raise PolicyRegimeMismatch("no-CSI transmission uses a constant rate")


def evaluate_constraint(
    regime: CsiRegime,
    policy: RatePolicy,
    r_s: float,
    sp: SystemParams,
    dist: ChannelTriple,
    rule: JammingRule,
    method: MonteCarlo | None = None,
    alpha: float | None = None,
    margin_k: float = 0.0,
) -> FeasibilityReport:
    """Estimate the success-fraction constraint under a given jamming rule.

    Fully deterministic channel triples are evaluated exactly (a single
    realization, no sampling); otherwise the estimate is a seeded Monte
    Carlo average with a binomial standard error.
    """
    _check_regime(regime, policy, rule)
    if dist.is_degenerate:
        h_m, h_e, h_z = (d.param for d in dist.components())
        jam = rule.decide(h_m, h_e, h_z)
        ok = success_indicator(sp, h_m, h_e, h_z, policy.rate_at(h_m), r_s, jam)
        c, se = float(ok), 0.0
    else:
        method = method or MonteCarlo(seed=0)
        batch = sample(dist, method.seed, method.n)
        jam = rule.decide(batch.h_m, batch.h_e, batch.h_z)
        ok = success_indicator(
            sp, batch.h_m, batch.h_e, batch.h_z, policy.rate_at(batch.h_m), r_s, jam
        )
        c = float(np.mean(ok))
        se = float(np.sqrt(max(c * (1.0 - c), 0.0) / method.n))
    feasible = None if alpha is None else (c - margin_k * se >= alpha)
    return FeasibilityReport(c_min=c, std_err=se, feasible=feasible, regime=regime)


def evaluate_constraint_full_duplex(
    policy: RatePolicy,
    r_s: float,
    sp: SystemParams,
    dist: ChannelTriple,
    method: MonteCarlo | None = None,
) -> FeasibilityReport:
    """Success fraction when jamming and eavesdropping bind simultaneously.

    This is the bounding device behind the pilot-vs-packet comparison: a
    block succeeds only if the jammed main capacity carries the code rate
    *and* the eavesdropper stays below the rate margin.  The result must
    coincide with the packet-feedback closed form.
    """
    method = method or MonteCarlo(seed=0)
    batch = sample(dist, method.seed, method.n)
    r = policy.rate_at(batch.h_m)
    ok = (rate_main_jammed(sp, batch.h_m, batch.h_z) >= r) & (
        np.log2(1.0 + sp.p * batch.h_e) <= r - r_s
    )
    c = float(np.mean(ok))
    se = float(np.sqrt(max(c * (1.0 - c), 0.0) / method.n))
    return FeasibilityReport(c_min=c, std_err=se, feasible=None,
                             regime=CsiRegime.PACKET_FEEDBACK)


def _secrecy_factor(r: float, r_s: float, sp: SystemParams, dist_e: GainDistribution) -> float:
    """P[log2(1 + p*H_e) <= r - r_s]."""
    if sp.p == 0:
        return 1.0 if r >= r_s else 0.0
    return float(dist_e.cdf((2.0 ** (r - r_s) - 1.0) / sp.p))


def _cell_jam_mass(
    lo: float, hi: float, r: float, sp: SystemParams, dist: ChannelTriple, tol: float
) -> float:
    """P[H_m in [lo, hi) and jammed main capacity >= r], joint over H_z."""
    snr_thr = 2.0 ** r - 1.0
    if snr_thr <= 0:
        return adv._prob_interval_geq(dist.h_m, lo, hi, 0.0)
    if sp.p == 0:
        return 0.0
    if dist.h_z.is_degenerate or sp.p_j == 0:
        v = dist.h_z.param if sp.p_j > 0 else 0.0
        thr = snr_thr * (1.0 + sp.p_j * v) / sp.p
        return adv._prob_interval_geq(dist.h_m, lo, hi, thr)
    value, _ = expect(
        dist.h_z,
        lambda z: adv._prob_interval_geq(
            dist.h_m, lo, hi, snr_thr * (1.0 + sp.p_j * float(z)) / sp.p
        ),
        Quadrature(tol=tol),
    )
    return value


def c_min_closed_form(
    regime: CsiRegime,
    policy: RatePolicy,
    r_s: float,
    sp: SystemParams,
    dist: ChannelTriple,
    tol: float = 1e-10,
) -> float:
    """Constraint value at the adversary's best response, in closed form.

    The best-responding adversary reduces the constraint to the single
    probability P[r_s + log2(1+p*H_e) <= R(H_m) <= jammed main capacity].
    With independent gains and a piecewise-constant policy this is a sum
    of per-cell products of marginal probabilities (with one 1-D
    quadrature over H_z per cell when the jamming link fades).
    """
    if regime is CsiRegime.PILOT_FEEDBACK:
        raise UnsupportedRegime("no closed form for pilot feedback")
    _check_regime(regime, policy)
    total = 0.0
    for lo, hi, r in policy.intervals():
        fe = _secrecy_factor(r, r_s, sp, dist.h_e)
        if fe > 0.0:
            total += fe * _cell_jam_mass(lo, hi, r, sp, dist, tol)
    return float(min(max(total, 0.0), 1.0))


def _golden_max(f, lo: float, hi: float, tol: float = 1e-6):
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    x = x1 if f1 >= f2 else x2
    return x, max(f1, f2)


def _grid_then_golden(f, lo: float, hi: float, n_grid: int = 48, tol: float = 1e-6):
    """Coarse-grid scan followed by golden-section refinement."""
    if hi <= lo:
        return lo, f(lo)
    grid = np.linspace(lo, hi, n_grid)
    vals = [f(x) for x in grid]
    k = int(np.argmax(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, n_grid - 1)]
    x, v = _golden_max(f, a, b, tol)
    if vals[k] >= v:
        return float(grid[k]), float(vals[k])
    return float(x), float(v)


def _conn_jam_factor(h_m: float, r: float, sp: SystemParams, dist_z: GainDistribution) -> float:
    """P[1 + p_j*H_z <= p*h_m / (2^r - 1)] for a fixed main gain."""
    snr_thr = 2.0 ** r - 1.0
    if snr_thr <= 0:
        return 1.0
    if sp.p == 0 or h_m <= 0:
        return 0.0
    t = sp.p * h_m / snr_thr
    if sp.p_j == 0:
        return 1.0 if t >= 1.0 else 0.0
    if dist_z.is_degenerate:
        return 1.0 if t >= 1.0 + sp.p_j * dist_z.param else 0.0
    return float(dist_z.cdf((t - 1.0) / sp.p_j))


def optimize_policy_packet(
    r_s: float,
    sp: SystemParams,
    dist: ChannelTriple,
    n_knots: int = 256,
) -> tuple[RatePolicy, float]:
    """Per-state rate policy maximizing the packet-feedback constraint.

    The constraint is a separate expectation over the main gain, so the
    optimal rate is found knot by knot: maximize
    ``P[H_e <= (2^(r-r_s)-1)/p] * P[1 + p_j*H_z <= p*h_m/(2^r - 1)]``
    over ``r`` in ``[r_s, log2(1 + p*h_m)]``.  Knots are quantile-spaced
    in H_m so resolution follows probability mass.
    """
    if r_s < 0:
        raise ValueError("r_s must be nonnegative")

    def best_rate(h_lo: float, h_rep: float) -> float:
        hi = float(rate_main_clear(sp, h_rep))
        if h_rep <= 0 or hi <= r_s:
            return r_s
        if dist.h_z.is_degenerate or sp.p_j == 0:
            # The jamming factor is a step in r.  Pin the rate to the jammed
            # capacity at the cell's LEFT edge: a higher rate (e.g. at the
            # cell midpoint) would fail every realization below it and
            # forfeit that mass for a vanishing rate gain.
            v = dist.h_z.param if sp.p_j > 0 else 0.0
            return max(r_s, float(rate_main_jammed(sp, h_lo, v)))
        g = lambda r: (_secrecy_factor(r, r_s, sp, dist.h_e)
                       * _conn_jam_factor(h_rep, r, sp, dist.h_z))
        r_star, _ = _grid_then_golden(g, r_s, hi)
        return r_star

    if dist.h_m.is_degenerate:
        v = dist.h_m.param
        policy = RatePolicy.constant(best_rate(v, v))
    else:
        q = np.arange(n_knots) / n_knots
        knots_h = dist.h_m.ppf(q)
        reps = dist.h_m.ppf((np.arange(n_knots) + 0.5) / n_knots)
        knots_r = np.array([best_rate(lo, h) for lo, h in zip(knots_h, reps)])
        policy = RatePolicy.tabulated(knots_h, knots_r)
    c_min = c_min_closed_form(CsiRegime.PACKET_FEEDBACK, policy, r_s, sp, dist)
    return policy, c_min


def optimize_policy_pilot(
    r_s: float,
    sp: SystemParams,
    dist: ChannelTriple,
    cfg: "SearchConfig",
    method: MonteCarlo | None = None,
) -> tuple[RatePolicy, float, float]:
    """Rate policy for the pilot regime; returns (policy, c_min, std_err).

    The pilot adversary cannot see h_m, so the transmitter can gamble:
    cells whose rate rides the clear (unjammed) capacity gain secrecy
    margin but are lost whenever the adversary jams.  Starting from the
    packet-optimal policy (whose constraint the pilot value can never
    fall below), the fraction of low-gain cells flipped to the clear
    capacity is tuned by a 1-D search against the re-computed pilot best
    response, with common random numbers across candidates.
    """
    base, _ = optimize_policy_packet(r_s, sp, dist, cfg.n_knots)
    if base.is_constant:
        knots_h = np.array([dist.h_m.param])
        knots_r = np.array([base.rate])
    else:
        knots_h, knots_r = base.knots_h, base.knots_r
    clear_lo = np.maximum(np.log2(1.0 + sp.p * knots_h), r_s)
    n = knots_r.size

    def candidate(frac: float) -> RatePolicy:
        r = knots_r.copy()
        k = int(round(frac * n))
        if k:
            r[:k] = clear_lo[:k]
        if n == 1:
            return RatePolicy.constant(float(r[0]))
        return RatePolicy.tabulated(knots_h, r)

    def score(frac: float, mc: MonteCarlo | None) -> FeasibilityReport:
        policy = candidate(frac)
        rule = adv.best_response_pilot(policy, r_s, sp, dist, cfg.pilot_grid)
        return evaluate_constraint(
            CsiRegime.PILOT_FEEDBACK, policy, r_s, sp, dist, rule,
            method=None if dist.is_degenerate else mc,
        )

    search_mc = None
    if not dist.is_degenerate:
        seed = method.seed if method else substream(cfg.seed, 1)
        search_mc = MonteCarlo(seed=seed, n=max(cfg.mc_n // 5, 10_000))
    fracs = np.linspace(0.0, 1.0, 11)
    scores = [score(f, search_mc).c_min for f in fracs]
    k = int(np.argmax(scores))
    lo = fracs[max(k - 1, 0)]
    hi = fracs[min(k + 1, fracs.size - 1)]
    f_star, _ = _golden_max(lambda f: score(f, search_mc).c_min, lo, hi, tol=0.02)
    if scores[k] >= score(f_star, search_mc).c_min:
        f_star = fracs[k]

    final_mc = method or (None if dist.is_degenerate else
                          MonteCarlo(seed=substream(cfg.seed, 2), n=cfg.mc_n))
    rep = score(f_star, final_mc)
    return candidate(f_star), rep.c_min, rep.std_err


def _best_constant_nocsi(
    r_s: float, sp: SystemParams, dist: ChannelTriple, r_cap: float
) -> tuple[RatePolicy, float]:
    """Maximize the no-CSI closed form over the constant code rate."""

    def g(r: float) -> float:
        return c_min_closed_form(
            CsiRegime.NO_CSI, RatePolicy.constant(r), r_s, sp, dist
        )

    # shrink the search window to where a successful jammed block is possible
    hi = r_s + 1.0
    while hi < r_s + r_cap and _cell_jam_mass(0.0, np.inf, hi, sp, dist, 1e-10) > 1e-9:
        hi = r_s + 2.0 * (hi - r_s)
    r_star, c = _grid_then_golden(g, r_s, hi, n_grid=96)
    return RatePolicy.constant(r_star), c


def solve(
    regime: CsiRegime,
    sp: SystemParams,
    dist: ChannelTriple,
    alpha: float,
    cfg: SearchConfig | None = None,
) -> SecrecySolution:
    """Maximal secrecy rate whose best-response constraint stays >= alpha.

    No-CSI and packet feedback use their closed forms; pilot feedback
    evaluates the packet-optimal policy family against the pilot
    best-response adversary by Monte Carlo (a lower bound on the pilot
    optimum, realizing the feasible-set inclusion behind the regime
    ordering).  Common random numbers are reused across bisection points.
    """
    cfg = cfg or SearchConfig()
    if not (0.0 < alpha <= 1.0):
        raise AlphaOutOfRange("alpha must lie in (0, 1]")
    mc = MonteCarlo(seed=substream(cfg.seed, 0), n=cfg.mc_n)

    def cmin(r_s: float) -> tuple[float, float, RatePolicy]:
        if regime is CsiRegime.NO_CSI:
            policy, c = _best_constant_nocsi(r_s, sp, dist, cfg.r_cap)
            return c, 0.0, policy
        if regime is CsiRegime.PACKET_FEEDBACK:
            policy, c = optimize_policy_packet(r_s, sp, dist, cfg.n_knots)
            return c, 0.0, policy
        policy, c, se = optimize_policy_pilot(r_s, sp, dist, cfg, method=mc)
        return c, se, policy

    history: list[tuple[float, float, float]] = []

    def feasible_at(r_s: float) -> tuple[bool, float, float, RatePolicy]:
        c, se, policy = cmin(r_s)
        history.append((r_s, c, se))
        return c - cfg.margin_k * se >= alpha, c, se, policy

    ok0, c0, se0, policy0 = feasible_at(0.0)
    if not ok0:
        report = FeasibilityReport(c0, se0, False, regime)
        return SecrecySolution(0.0, policy0, report)

    lo, lo_state = 0.0, (c0, se0, policy0)
    hi = 1.0
    while hi <= cfg.r_cap:
        ok, c, se, policy = feasible_at(hi)
        if not ok:
            break
        lo, lo_state = hi, (c, se, policy)
        hi *= 2.0
    else:
        hi = cfg.r_cap  # feasible everywhere we are willing to search

    while hi - lo > cfg.rate_tol:
        mid = 0.5 * (lo + hi)
        ok, c, se, policy = feasible_at(mid)
        if ok:
            lo, lo_state = mid, (c, se, policy)
        else:
            hi = mid

    _assert_monotone(history)
    c, se, policy = lo_state
    report = FeasibilityReport(c, se, True, regime)
    return SecrecySolution(lo, policy, report)


def _assert_monotone(history: list[tuple[float, float, float]]):
    """The constraint value must be nonincreasing in the secrecy rate."""
    pts = sorted(history)
    for (r0, c0, s0), (r1, c1, s1) in zip(pts[:-1], pts[1:]):
        slack = 6.0 * np.hypot(s0, s1) + 1e-6
        if c1 > c0 + slack:
            raise SecratesError(
                f"constraint not monotone in r_s: C({r0:.6g})={c0:.6g} < "
                f"C({r1:.6g})={c1:.6g}"
            )
