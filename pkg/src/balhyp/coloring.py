"""Two-stage randomized balanced coloring.

Stage one colors parts 1..k-1 uniformly with q colors and then gives each
part-k vertex a color from its survivor list (colors not forced mono by an
edge), leaving vertices with empty lists uncolored.  Rebalancing trims all
classes to a common size n_c while steering clear of vertices whose edges
meet the uncolored part-k pool.  The leftover vertices induce a residual
hypergraph that is finished off with the matching-based colorer on a fresh
palette.  High-probability events from the analysis become runtime checks
with retry; a whole-instance matching fallback guards the worst case.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from balhyp.core import (
    KPartiteHypergraph,
    PartialColoring,
    is_proper_balanced_coloring,
    is_proper_on_colored,
    induced,
)
from balhyp.errors import RegimeError
from balhyp.matching import fallback_coloring
from balhyp.rng import Seed, rng_for

__all__ = [
    "ColParams",
    "PhaseState",
    "col_params",
    "col_random_phase",
    "rebalance",
    "residual",
    "full_coloring",
]

SeedLike = Union[int, Seed, tuple]


@dataclass(frozen=True)
class ColParams:
    """Parameter ledger for the two-stage coloring at max degree Delta.

        gamma       = epsilon / (2 k^2)
        q_real      = (1 + gamma/2) * ((k-1) Delta / log Delta)^(1/(k-1))
        q           = ceil(q_real)
        delta       = exp(-Delta^(gamma/50))
        omega       = 1 / (Delta * (log Delta)^(1/(2(k-1))))
        delta_tilde = (gamma/(2k)) * ((k-1) Delta / log Delta)^(1/(k-1))
        n_c         = floor((1 - 2 omega) n / q)
        final_budget = q + k * delta_tilde_eff

    Roundings all weaken the side that is re-verified at runtime: more
    colors, smaller classes, and a residual degree target of at least 1.
    Natural log.
    """

    k: int
    epsilon: float
    Delta: float
    n: int
    gamma: float = field(init=False)
    q_real: float = field(init=False)
    q: int = field(init=False)
    delta: float = field(init=False)
    omega: float = field(init=False)
    delta_tilde: float = field(init=False)
    delta_tilde_eff: int = field(init=False)
    n_c: int = field(init=False)
    final_budget: int = field(init=False)
    advisories: tuple = field(init=False)

    def __post_init__(self):
        if self.k < 2:
            raise RegimeError(f"k={self.k} must be at least 2")
        if self.Delta < 3:
            raise RegimeError(f"Delta={self.Delta} below 3; log Delta must exceed 1")
        if self.epsilon <= 0:
            raise RegimeError(f"epsilon={self.epsilon} must be positive")
        if self.n < 1:
            raise RegimeError(f"n={self.n} must be positive")
        k, logd = self.k, math.log(self.Delta)
        gamma = self.epsilon / (2 * k**2)
        base = ((k - 1) * self.Delta / logd) ** (1 / (k - 1))
        q_real = (1 + gamma / 2) * base
        q = math.ceil(q_real)
        delta = math.exp(-(self.Delta ** (gamma / 50)))
        omega = 1 / (self.Delta * logd ** (1 / (2 * (k - 1))))
        delta_tilde = (gamma / (2 * k)) * base
        delta_tilde_eff = max(math.ceil(delta_tilde), 1)
        if self.n < q:
            raise RegimeError(f"n={self.n} below q={q}: no room for one vertex per class")
        if not 0 < omega < 0.5:
            raise RegimeError(f"omega={omega} outside (0, 1/2)")
        n_c = math.floor((1 - 2 * omega) * self.n / q)
        notes = []
        if delta_tilde < 1:
            notes.append(
                f"delta_tilde={delta_tilde:.4g} below 1 at Delta={self.Delta}; "
                f"residual degree target clamped to 1 (asymptotic regime not reached)"
            )
            warnings.warn(notes[-1], stacklevel=3)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "q_real", q_real)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "delta_tilde", delta_tilde)
        object.__setattr__(self, "delta_tilde_eff", delta_tilde_eff)
        object.__setattr__(self, "n_c", n_c)
        object.__setattr__(self, "final_budget", q + k * delta_tilde_eff)
        object.__setattr__(self, "advisories", tuple(notes))


def col_params(k: int, epsilon: float, Delta: float, n: int) -> ColParams:
    return ColParams(k=k, epsilon=epsilon, Delta=Delta, n=n)


@dataclass(frozen=True)
class PhaseState:
    """Coloring state after the random phase, optionally rebalanced.

    lists_k[v] is the sorted survivor list of part-k vertex v; u_k holds
    the vertices whose list was empty.  Rebalancing fills in n_c, the
    enlarged uncolored pool u_k_prime, the per-class bad sets, and the two
    failure flags (class clamped below target, good vertices exhausted).
    """

    h: KPartiteHypergraph
    phi: PartialColoring
    q: int
    lists_k: tuple
    u_k: tuple
    n_c: Optional[int] = None
    u_k_prime: Optional[tuple] = None
    bad_sets: Optional[dict] = None
    clamped: bool = False
    good_shortage: bool = False

    def classes(self) -> dict:
        """(part, color) -> sorted indices currently colored that color."""
        out = {}
        for j, part in enumerate(self.phi.colors):
            for c in range(1, self.q + 1):
                out[(j + 1, c)] = tuple(i for i, col in enumerate(part) if col == c)
        return out


def col_random_phase(h: KPartiteHypergraph, q: int, seed: SeedLike) -> PhaseState:
    """Steps one and two: uniform colors on parts 1..k-1, survivor-list
    colors on part k.

    Randomness contract, in order: one rng.integers(1, q+1, size=n) block
    per part 1..k-1, then one rng.random(n) block of selector variates for
    part k.  Vertex v's selector T picks the ceil(T * len(L))-th smallest
    survivor color (selectors of vertices with empty lists stay unused).
    """
    if not h.n_balanced:
        raise ValueError(f"part sizes {h.part_sizes} are not all equal")
    if q < 1:
        raise ValueError(f"q={q} must be at least 1")
    n = h.part_sizes[0]
    k = h.k
    rng = rng_for(seed)
    cols = [rng.integers(1, q + 1, size=n) for _ in range(k - 1)]
    selectors = rng.random(n)
    banned: list = [set() for _ in range(n)]
    for e in h.edges:
        c0 = cols[0][e[0]]
        if all(cols[j][e[j]] == c0 for j in range(1, k - 1)):
            banned[e[k - 1]].add(int(c0))
    lists_k = []
    part_k: list = []
    u_k = []
    for v in range(n):
        survivors = tuple(c for c in range(1, q + 1) if c not in banned[v])
        lists_k.append(survivors)
        if survivors:
            rank = max(1, math.ceil(selectors[v] * len(survivors)))
            part_k.append(survivors[rank - 1])
        else:
            part_k.append(None)
            u_k.append(v)
    phi = PartialColoring(q, [[int(c) for c in col] for col in cols] + [part_k])
    assert is_proper_on_colored(h, phi)
    return PhaseState(h=h, phi=phi, q=q, lists_k=tuple(lists_k), u_k=tuple(u_k))


def rebalance(state: PhaseState, params) -> PhaseState:
    """Steps three and four: trim every class to a common size n_c.

    n_c is clamped to the smallest class when needed (setting `clamped`).
    Part k uncolors lowest-index vertices first; the enlarged uncolored
    pool u_k_prime then defines the bad sets, and parts below k uncolor
    lowest-index good vertices first, dipping into bad ones only when good
    ones run out (setting `good_shortage`).  Afterwards every class has
    exactly n_c vertices per part and each part has n - q*n_c uncolored.
    """
    h = state.h
    phi, q, k = state.phi, state.q, h.k
    n = h.part_sizes[0]
    classes = state.classes()
    n_c = min(
        [params.n_c]
        + [len(classes[(j, c)]) for j in range(1, k + 1) for c in range(1, q + 1)]
    )
    clamped = n_c < params.n_c
    colors = [list(part) for part in phi.colors]
    for c in range(1, q + 1):
        cls = classes[(k, c)]
        for idx in cls[: len(cls) - n_c]:
            colors[k - 1][idx] = None
    u_k_prime = tuple(i for i in range(n) if colors[k - 1][i] is None)
    pool = set(u_k_prime)
    threshold = params.delta_tilde_eff
    bad_sets = {}
    good_shortage = False
    for j in range(1, k):
        for c in range(1, q + 1):
            cls = classes[(j, c)]
            bad = tuple(
                u
                for u in cls
                if sum(
                    1
                    for pos in h.incidence[j - 1][u]
                    if h.edges[pos][k - 1] in pool
                )
                >= threshold
            )
            bad_sets[(j, c)] = bad
            drop = len(cls) - n_c
            good = [u for u in cls if u not in set(bad)]
            chosen = good[:drop]
            if len(chosen) < drop:
                good_shortage = True
                need = drop - len(chosen)
                chosen += [u for u in bad if u not in set(chosen)][:need]
            for idx in chosen:
                colors[j - 1][idx] = None
    new_phi = PartialColoring(q, colors)
    return replace(
        state,
        phi=new_phi,
        n_c=n_c,
        u_k_prime=u_k_prime,
        bad_sets=bad_sets,
        clamped=clamped,
        good_shortage=good_shortage,
    )


def residual(h: KPartiteHypergraph, state: PhaseState):
    """Subhypergraph induced by the uncolored vertices, with the remap."""
    if state.n_c is None:
        raise ValueError("state has not been rebalanced")
    uncolored = [
        [i for i, c in enumerate(part) if c is None] for part in state.phi.colors
    ]
    return induced(h, uncolored)


def _as_stream(seed: SeedLike) -> tuple:
    if isinstance(seed, (tuple, Seed)):
        return tuple(int(x) for x in seed)
    return (int(seed),)


def full_coloring(
    h: KPartiteHypergraph,
    epsilon: float,
    seed: SeedLike = 0,
    max_retries: int = 16,
    matching_budget: int = 10**4,
):
    """Total balanced coloring of an n-balanced hypergraph, with a report.

    Each attempt r runs the random phase on stream seed+(r, 0), rebalances,
    and is accepted when no clamping occurred and the residual max degree
    is at most delta_tilde_eff and at most half the residual part size;
    the residual is then colored by the matching fallback on stream
    seed+(r, 1) with palette offset q.  If no attempt is accepted the whole
    instance goes to the matching fallback on stream seed+(max_retries, 1).
    Edgeless input short-circuits to the single-color answer.

    Returns (coloring, report); the report records palette, q,
    delta_tilde_eff, retries_used, path ("main" or "fallback"), validator
    verdicts, per-class sizes, and any advisories.
    """
    if not h.n_balanced:
        raise ValueError(f"part sizes {h.part_sizes} are not all equal")
    n = h.part_sizes[0]
    k = h.k
    base = _as_stream(seed)
    advisories = []
    delta_h = h.max_degree
    if delta_h == 0:
        phi = PartialColoring(1, [[1] * n for _ in range(k)])
        report = _report(h, phi, q=1, eff=0, retries_used=0, path="main",
                         advisories=["edgeless instance: single color"])
        return phi, report
    ledger_delta = float(delta_h)
    if delta_h < 3:
        ledger_delta = 3.0
        advisories.append(
            f"Delta={delta_h} below ledger minimum 3; parameters computed at Delta=3"
        )
    try:
        params = col_params(k, epsilon, ledger_delta, n)
    except RegimeError as exc:
        advisories.append(f"parameter regime rejected ({exc}); using matching fallback")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            phi = fallback_coloring(h, seed=base + (max_retries, 1), budget=matching_budget)
        assert len(phi.colors_used()) <= k * delta_h + 1
        return phi, _report(h, phi, q=0, eff=0, retries_used=0, path="fallback",
                            advisories=advisories)
    advisories.extend(params.advisories)
    q = params.q
    for r in range(max_retries):
        state = col_random_phase(h, q, base + (r, 0))
        state = rebalance(state, params)
        h_phi, remap = residual(h, state)
        n_res = h_phi.part_sizes[0]
        if state.clamped or h_phi.max_degree > params.delta_tilde_eff:
            continue
        if h_phi.max_degree > n_res / 2:
            continue
        if n_res == 0:  # unreachable with omega > 0; kept for safety
            merged = state.phi
        else:
            sub_phi = fallback_coloring(
                h_phi, seed=base + (r, 1), budget=matching_budget
            )
            colors = [list(part) for part in state.phi.colors]
            for j in range(k):
                for new_idx, old_idx in enumerate(remap[j]):
                    colors[j][old_idx] = q + sub_phi.colors[j][new_idx]
            merged = PartialColoring(q + sub_phi.q, colors)
        assert merged.is_total()
        assert is_proper_balanced_coloring(h, merged)
        used = len(merged.colors_used())
        assert used <= q + k * h_phi.max_degree + 1
        report = _report(
            h, merged, q=q, eff=params.delta_tilde_eff, retries_used=r + 1,
            path="main", advisories=advisories,
            extra={"n_c": state.n_c, "residual_delta": h_phi.max_degree,
                   "residual_n": n_res, "good_shortage": state.good_shortage},
        )
        return merged, report
    advisories.append(f"no attempt accepted in {max_retries} tries; using matching fallback")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        phi = fallback_coloring(h, seed=base + (max_retries, 1), budget=matching_budget)
    assert len(phi.colors_used()) <= k * delta_h + 1
    return phi, _report(h, phi, q=q, eff=params.delta_tilde_eff,
                        retries_used=max_retries, path="fallback",
                        advisories=advisories)


def _report(h, phi, q, eff, retries_used, path, advisories, extra=None):
    per_class = {
        c: [sum(1 for x in part if x == c) for part in phi.colors]
        for c in phi.colors_used()
    }
    report = {
        "palette": len(phi.colors_used()),
        "q": q,
        "delta_tilde_eff": eff,
        "retries_used": retries_used,
        "path": path,
        "validator": {
            "total": phi.is_total(),
            "proper": is_proper_on_colored(h, phi),
            "balanced": is_proper_balanced_coloring(h, phi),
        },
        "per_class_sizes": per_class,
        "advisories": list(advisories),
    }
    if extra:
        report.update(extra)
    return report
