"""Random k-partite hypergraphs and upper-bound calculators.

H(k, N, p) places each of the N^k transversal edges independently with
probability p.  The trimming construction removes the highest-degree
vertices from each part; together with the union-bound calculator this
covers the size regime where large balanced independent sets are unlikely.

All logs are natural.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Union

from balhyp.core import KPartiteHypergraph, induced
from balhyp.errors import BudgetExceededError, RegimeError
from balhyp.rng import Seed, rng_for

__all__ = [
    "Seed",
    "UpperBoundParams",
    "sample_hknp",
    "trim_top_degree",
    "union_bound_bis",
    "exists_balanced_is",
]

SeedLike = Union[int, Seed, tuple]

# Bernoulli-per-edge up to this many candidate edges, binomial count above.
_PER_EDGE_LIMIT = 10**7
_MAX_EDGES = 5 * 10**7


@dataclass(frozen=True)
class UpperBoundParams:
    """Parameter ledger for the trimmed random construction.

    Inputs are (epsilon, k, Delta, n); the derived quantities are

        gamma = epsilon / (2 k^2)
        N     = n / (1 - gamma)          (ambient part size, real-valued)
        p     = Delta / ((1 + gamma) N^(k-1))
        s     = (((k + epsilon)/(k - 1)) * log(Delta)/Delta)^(1/(k-1)) * n

    For integer plumbing, trim_count rounds gamma*N up (removing more
    vertices cannot raise the degree bound) and s_int rounds s down
    (claiming a smaller set is the weaker statement).
    """

    epsilon: float
    k: int
    Delta: float
    n: int
    gamma: float = field(init=False)
    N: float = field(init=False)
    p: float = field(init=False)
    s: float = field(init=False)

    def __post_init__(self):
        if self.k < 2:
            raise RegimeError(f"k={self.k} must be at least 2")
        if self.n < 1:
            raise RegimeError(f"n={self.n} must be positive")
        if self.epsilon <= 0:
            raise RegimeError(f"epsilon={self.epsilon} must be positive")
        if self.Delta < 1:
            raise RegimeError(f"Delta={self.Delta} must be at least 1")
        gamma = self.epsilon / (2 * self.k**2)
        if gamma >= 1:
            raise RegimeError(f"gamma={gamma} must be below 1")
        N = self.n / (1 - gamma)
        p = self.Delta / ((1 + gamma) * N ** (self.k - 1))
        s = (
            ((self.k + self.epsilon) / (self.k - 1))
            * math.log(self.Delta)
            / self.Delta
        ) ** (1 / (self.k - 1)) * self.n
        if not 0 < p <= 1:
            raise RegimeError(f"p={p} outside (0, 1]; regime not sampleable")
        if s > self.n:
            raise RegimeError(f"s={s} exceeds n={self.n}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", s)

    @property
    def trim_count(self) -> int:
        return math.ceil(self.gamma * self.N)

    @property
    def ambient_n(self) -> int:
        """Integer part size to sample at so that trimming lands on n."""
        return self.n + self.trim_count

    @property
    def s_int(self) -> int:
        return math.floor(self.s)


def _rank_to_edge(rank: int, k: int, n: int) -> tuple:
    digits = []
    for _ in range(k):
        rank, d = divmod(rank, n)
        digits.append(d)
    return tuple(reversed(digits))


def sample_hknp(k: int, N: int, p: float, seed: SeedLike) -> KPartiteHypergraph:
    """Sample H(k, N, p): each transversal edge present independently w.p. p.

    Deterministic given (k, N, p, seed); edges come out sorted.  Small
    instances draw one uniform per candidate edge in lexicographic order;
    large ones draw the edge count Binomial(N^k, p) and then a uniform
    subset of that size, which has exactly the same distribution.
    """
    if k < 2:
        raise ValueError(f"k={k} must be at least 2")
    if N < 1:
        raise ValueError(f"N={N} must be positive")
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    total = N**k
    sizes = [N] * k
    if p == 0:
        return KPartiteHypergraph(sizes, [])
    if p == 1:
        return KPartiteHypergraph(sizes, itertools.product(range(N), repeat=k))
    rng = rng_for(seed)
    if total <= _PER_EDGE_LIMIT:
        u = rng.random(total)
        edges = [
            _rank_to_edge(r, k, N) for r in range(total) if u[r] < p
        ]
        return KPartiteHypergraph(sizes, edges)
    if p * total > _MAX_EDGES:
        raise BudgetExceededError(
            f"expected edge count {p * total:.3g} exceeds limit {_MAX_EDGES}"
        )
    m = int(rng.binomial(total, p))
    chosen: set = set()
    while len(chosen) < m:
        want = m - len(chosen)
        batch = rng.integers(0, total, size=max(want + 16, int(want * 1.1)))
        for r in batch:
            if len(chosen) == m:
                break
            chosen.add(int(r))
    edges = sorted(_rank_to_edge(r, k, N) for r in chosen)
    return KPartiteHypergraph(sizes, edges)


def trim_top_degree(h: KPartiteHypergraph, t: int) -> KPartiteHypergraph:
    """Drop the t highest-degree vertices from each part (ties: lowest index).

    Surviving indices are compacted; the result keeps exactly the edges
    avoiding every removed vertex, so its max degree cannot grow.
    """
    if t < 0:
        raise ValueError(f"t={t} must be non-negative")
    if any(t >= sz for sz in h.part_sizes):
        raise ValueError(f"t={t} not below every part size {h.part_sizes}")
    if t == 0:
        return h
    keep = []
    for part in h.incidence:
        order = sorted(range(len(part)), key=lambda i: (-len(part[i]), i))
        removed = set(order[:t])
        keep.append([i for i in range(len(part)) if i not in removed])
    sub, _ = induced(h, keep)
    return sub


def union_bound_bis(k: int, N: int, s: int, p: float) -> float:
    """C(N, s)^k * (1 - p)^(s^k): union bound on a side-s balanced
    independent set existing in H(k, N, p).  May exceed 1 (vacuous).
    """
    if not 0 <= s <= N:
        raise ValueError(f"s={s} outside [0, {N}]")
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    if s == 0:
        return 1.0
    if p == 1:
        return 0.0
    log_choose = math.lgamma(N + 1) - math.lgamma(s + 1) - math.lgamma(N - s + 1)
    log_val = k * log_choose + s**k * math.log1p(-p)
    if log_val > 700:
        return math.inf
    return math.exp(log_val)


def exists_balanced_is(
    h: KPartiteHypergraph, s: int, budget: int = 10**8
) -> bool:
    """Exhaustive: does some balanced set of side s avoid every edge?

    Enumerates side-s subsets of parts 1..k-1 in lexicographic order; given
    those, a valid part-k completion exists iff at most n_k - s part-k
    vertices close an edge.  Raises BudgetExceededError when the subset
    count C(n,s)^k is out of reach rather than guessing.
    """
    if s < 0:
        raise ValueError(f"s={s} must be non-negative")
    if s == 0:
        return True
    if any(s > sz for sz in h.part_sizes):
        return False
    cost = 1
    for sz in h.part_sizes:
        cost *= math.comb(sz, s)
        if cost > budget:
            raise BudgetExceededError(
                f"C(n,s)^k exceeds enumeration budget {budget}"
            )
    k = h.k
    nk = h.part_sizes[-1]
    ranges = [range(sz) for sz in h.part_sizes[:-1]]
    for combo in itertools.product(
        *(itertools.combinations(r, s) for r in ranges)
    ):
        member = [set(sub) for sub in combo[1:]]
        blocked = set()
        for u in combo[0]:
            for pos in h.incidence[0][u]:
                e = h.edges[pos]
                if all(e[j] in member[j - 1] for j in range(1, k - 1)):
                    blocked.add(e[k - 1])
        if nk - len(blocked) >= s:
            return True
    return False
