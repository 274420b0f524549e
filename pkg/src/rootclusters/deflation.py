"""Deflation by power sums.

Once some clusters of P are known, the factor Q of P carrying the other
roots is built from power sums: the power sums of all roots of P come from
P's coefficients (Newton identities), the contribution of each known
cluster is approximated from its center, and the difference is converted
back to coefficients.  Searching Q instead of P is cheaper because Q has
lower degree.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from flint import acb

from .clustering import (
    Cluster,
    ClusterSet,
    Refiner,
    SearchDomain,
    SolveStats,
    cluster_cover,
    cluster_pol,
    resolve_symmetry,
)
from .counting import DEFAULT_L0, DEFAULT_LMAX, CountingEngine
from .geometry import Box
from .numerics import ball, ball_radius_log2, working_precision
from .polynomial import DensePolynomial, OraclePolynomial

# give up when the working precision exceeds L * 2**_MAX_DOUBLINGS
_MAX_DOUBLINGS = 12


class DeflationError(RuntimeError):
    """The deflated polynomial could not be approximated to the requested precision."""

    def __init__(self, message: str, cluster: Cluster | None = None):
        self.cluster = cluster
        super().__init__(message)


@dataclass(frozen=True)
class PowerSumVector:
    """Balls a_1..a_n enclosing the power sums of a root multiset."""

    values: tuple

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("need at least one power sum")

    @property
    def count(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def precision(self) -> float:
        """-log2 of the largest ball radius (``inf`` when all are exact)."""
        worst = max(ball_radius_log2(v) for v in self.values)
        return -worst


def _log2_root_bound(A: DensePolynomial) -> float:
    """log2 of Fujiwara's bound 2 max |a_{d-k}/a_d|^(1/k) on root moduli."""
    d = A.degree
    lead = A[d].abs_lower()
    if not lead > 0:
        raise ZeroDivisionError("leading coefficient not bounded away from zero")
    lead_l = math.log2(float(lead.mid())) if float(lead.mid()) > 0 else -1074
    best = -math.inf
    for k in range(1, d + 1):
        u = A[d - k].abs_upper()
        man, exp = u.mid().man_exp()
        man = int(man)
        if man:
            lg = int(exp) + math.log2(man) - lead_l
            best = max(best, lg / k)
    return 1 + best if best != -math.inf else 0.0


def coeffs_to_power_sums(P, n: int, L: int) -> PowerSumVector:
    """First n power sums of all roots of P, each to within 2**-L.

    ``P`` is an oracle or a :class:`DensePolynomial` (whose precision is
    then fixed; the result may miss the target, check ``precision()``).
    """
    d = P.degree
    if not 1 <= n <= d:
        raise ValueError("need 1 <= n <= degree")
    fixed = isinstance(P, DensePolynomial)
    A = P if fixed else P.approximate(53)
    lr = max(_log2_root_bound(A), 0.0)
    growth = math.ceil(n * lr + 2 * math.log2(d + 1)) + 32
    Lc = L + growth
    while True:
        if not fixed:
            A = P.approximate(Lc)
        with working_precision(Lc + growth + 64):
            lead = A[d]
            c = [None] + [A[d - k] / lead for k in range(1, n + 1)]
            p = [None]
            for k in range(1, n + 1):
                acc = k * c[k]
                for i in range(1, k):
                    acc += c[i] * p[k - i]
                p.append(-acc)
        ps = PowerSumVector(tuple(p[1:]))
        if fixed or ps.precision() >= L:
            return ps
        Lc *= 2


def power_sums_to_coeffs(ps: PowerSumVector, L: int, d: int) -> tuple[DensePolynomial, int]:
    """Monic degree-d polynomial whose roots have power sums ``ps``.

    Uses e_k = (1/k) sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i and q_{d-k} = (-1)^k e_k.
    Returns the polynomial and L' = -ceil(log2(largest coefficient radius)).
    """
    if d > ps.count:
        raise ValueError(f"need {d} power sums, got {ps.count}")
    if d < 0:
        raise ValueError("degree must be nonnegative")
    if d == 0:
        return DensePolynomial((acb(1),)), 2**31
    lr = 0.0
    for k in range(d):
        m = ps[k].abs_upper()
        man, exp = m.mid().man_exp()
        if int(man):
            lr = max(lr, (int(exp) + math.log2(int(man))) / (k + 1))
    prec = L + math.ceil(d * (lr + 1) + 2 * math.log2(d + 1)) + 64
    with working_precision(prec):
        e = [acb(1)]
        for k in range(1, d + 1):
            acc = acb(0)
            for i in range(1, k + 1):
                term = e[k - i] * ps[i - 1]
                acc = acc + term if i % 2 else acc - term
            e.append(acc / k)
        q = [e[d - j] if (d - j) % 2 == 0 else -e[d - j] for j in range(d + 1)]
    Q = DensePolynomial(tuple(q))
    worst = max(ball_radius_log2(x) for x in q)
    Lp = 2**31 if worst == -math.inf else -math.ceil(worst)
    return Q, Lp


def _cluster_power_sums(C: Sequence[Cluster], n: int, prec: int) -> list:
    """sum_j m_j z^s over balls z covering each cluster disc, s = 1..n."""
    sums = [acb(0)] * n
    with working_precision(prec):
        for K in C:
            z = ball(K.center, K.radius)
            zs = acb(1)
            for s in range(n):
                zs = zs * z
                sums[s] = sums[s] + K.multiplicity * zs
    return sums


class DeflationContext:
    """State shared by the deflated oracles of one run: the refiner and caches."""

    def __init__(self, P: OraclePolynomial, stats: SolveStats | None = None):
        self.P = P
        self.stats = stats if stats is not None else SolveStats()
        self.refiner = Refiner(P, stats=self.stats)
        self._ps_cache: dict[tuple[int, int], PowerSumVector] = {}

    def power_sums(self, n: int, L: int) -> PowerSumVector:
        for (nn, LL), v in self._ps_cache.items():
            if nn >= n and LL == L:
                return PowerSumVector(v.values[:n])
        v = coeffs_to_power_sums(self.P, n, L)
        self._ps_cache[(n, L)] = v
        return v


def oracle_for_q(P: OraclePolynomial, C: Sequence[Cluster], L: int,
                 context: DeflationContext | None = None) -> DensePolynomial:
    """L-bit approximation of the monic Q whose roots are those of P outside C."""
    ctx = context or DeflationContext(P)
    stats = ctx.stats
    t0 = time.perf_counter()
    C = list(C)
    dQ = P.degree - sum(K.multiplicity for K in C)
    if dQ < 0:
        raise ValueError("clusters hold more roots than the degree")
    if dQ == 0:
        return DensePolynomial((acb(1),))
    L_temp = L
    best = -math.inf
    stalled = 0
    try:
        while True:
            L_temp *= 2
            if L_temp > L << _MAX_DOUBLINGS:
                widest = max(C, key=lambda K: K.radius)
                raise DeflationError(
                    f"deflation did not reach {L} bits by precision {L_temp // 2}", widest)
            stats.refine_precisions.append(L_temp)
            refined = ctx.refiner.refine(C, L_temp)
            a = ctx.power_sums(dQ, L_temp)
            work = L_temp + 64 + math.ceil(dQ * math.log2(dQ + 1))
            sub = _cluster_power_sums(refined, dQ, work)
            with working_precision(work + 2 * L_temp):
                chat = PowerSumVector(tuple(a[s] - sub[s] for s in range(dQ)))
            Ls = chat.precision()
            if Ls <= 0:
                continue
            t1 = time.perf_counter()
            Q, Lres = power_sums_to_coeffs(chat, math.floor(min(Ls, 2**30)), dQ)
            stats.add_time("power_sums_to_coeffs", time.perf_counter() - t1)
            if Lres >= L:
                return Q
            if Lres <= best:
                stalled += 1
                if stalled >= 3:
                    widest = max(C, key=lambda K: K.radius)
                    raise DeflationError(
                        f"deflation stalled at {Lres} bits; widest cluster has radius "
                        f"{float(widest.radius):.3g} at {float(widest.center[0]):.6g}"
                        f"{float(widest.center[1]):+.6g}i", widest)
            else:
                best, stalled = Lres, 0
    finally:
        stats.add_time("oracle_for_q", time.perf_counter() - t0)


class DeflatedOracle(OraclePolynomial):
    """Oracle for the factor of P whose roots lie outside the clusters C."""

    def __init__(self, P: OraclePolynomial, C: Sequence[Cluster],
                 context: DeflationContext | None = None, real: bool | None = None):
        super().__init__()
        self.P = P
        self.clusters = tuple(C)
        self.context = context or DeflationContext(P)
        self.degree = P.degree - sum(K.multiplicity for K in self.clusters)
        # exact Q is real when P is and C is closed under conjugation
        self.is_real = bool(getattr(P, "is_real", False)) if real is None else real

    def _compute(self, L: int) -> DensePolynomial:
        return oracle_for_q(self.P, self.clusters, L, self.context)

    def __repr__(self):
        return f"DeflatedOracle(degree={self.degree}, clusters={len(self.clusters)})"


def cluster_with_deflation(P: OraclePolynomial, D0: Box, eps, n: int, *,
                           real_symmetry=None, L0: int = DEFAULT_L0,
                           Lmax: int = DEFAULT_LMAX, record_boxes: bool = False) -> ClusterSet:
    """Natural eps-clusters of P in D0, deflating after every n clusters.

    Clusters used for deflation are reported at the finest radius they
    were refined to.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eps = Fraction(eps)
    sym = resolve_symmetry(P, real_symmetry, D0)
    stats = SolveStats(record_boxes=record_boxes)
    stats.degrees = [P.degree]
    t0 = time.perf_counter()
    ctx = DeflationContext(P, stats)
    engine = CountingEngine(P, L0, Lmax, stats=stats.counting)
    C, D = cluster_pol(P, SearchDomain.from_box(D0), eps, (), n,
                       real_symmetry=sym, engine=engine, stats=stats)
    found = list(C)
    stats.passes = 1
    while D:
        Q = DeflatedOracle(P, found, ctx, real=sym)
        stats.degrees.append(Q.degree)
        engine = CountingEngine(Q, L0, Lmax, stats=stats.counting)
        Cs, D = cluster_pol(Q, D, eps, found, n, real_symmetry=sym,
                            engine=engine, stats=stats)
        found.extend(Cs)
        stats.passes += 1
    out = cluster_cover(found, ctx.refiner)
    stats.add_time("total", time.perf_counter() - t0)
    return ClusterSet(out, stats)
