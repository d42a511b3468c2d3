"""Ground-truth maximum weight matching oracles and the uniqueness gap.

Two independent routes are provided: factorial enumeration for small
instances and an exact-rational Hungarian method for anything larger.
Both are deterministic; enumeration breaks ties toward the
lexicographically smallest permutation.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Optional

from .core import (
    Instance,
    Matching,
    OracleCapExceeded,
    ParameterError,
    matching_weight,
)

BRUTE_FORCE_CAP = 10


def mwm_bruteforce(inst: Instance) -> tuple[Matching, Fraction]:
    """Maximum-weight perfect matching by n! enumeration (n <= 10).

    Ties are broken toward the lexicographically smallest permutation.
    Permutations that would use an absent edge are skipped.
    """
    n = inst.n
    if n > BRUTE_FORCE_CAP:
        raise OracleCapExceeded(f"brute force limited to n <= {BRUTE_FORCE_CAP}")
    best_perm: Optional[tuple[int, ...]] = None
    best_weight = Fraction(0)
    rows = inst.weights
    for perm in permutations(range(n)):
        total = Fraction(0)
        ok = True
        for i, j in enumerate(perm):
            w = rows[i][j]
            if w is None:
                ok = False
                break
            total += w
        if ok and (best_perm is None or total > best_weight):
            best_perm = perm
            best_weight = total
    if best_perm is None:
        raise ParameterError("instance has no perfect matching on present edges")
    return Matching.of(enumerate(best_perm)), best_weight


def _forbidden_weight(inst: Instance) -> Fraction:
    # Low enough that any matching using a forbidden edge loses to any
    # matching that avoids all of them (below -2n*w_max with margin).
    return -(4 * inst.n) * (inst.max_abs_weight + 1)


def mwm_hungarian(inst: Instance) -> tuple[Matching, Fraction]:
    """Maximum-weight perfect matching via the exact Hungarian method.

    Absent edges are modeled with a prohibitively negative weight and
    rejected afterwards, so the result never uses one when avoidable.
    """
    n = inst.n
    sentinel = _forbidden_weight(inst)
    cost = [
        [-(w if w is not None else sentinel) for w in row] for row in inst.weights
    ]
    assignment = _min_cost_assignment(cost)
    pairs = list(enumerate(assignment))
    if any(inst.weights[i][j] is None for i, j in pairs):
        raise ParameterError("instance has no perfect matching on present edges")
    m = Matching.of(pairs)
    return m, matching_weight(inst, m)


def _min_cost_assignment(cost: list[list[Fraction]]) -> list[int]:
    """Exact O(n^3) assignment minimizing total cost; returns column per row."""
    n = len(cost)
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row (1-based) currently matched to column j
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv: list[Optional[Fraction]] = [None] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta: Optional[Fraction] = None
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if minv[j] is None or cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if delta is None or minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            assert delta is not None
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta  # type: ignore[operator]
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            p[j0] = p[way[j0]]
            j0 = way[j0]
    result = [0] * n
    for j in range(1, n + 1):
        result[p[j] - 1] = j - 1
    return result


def _solve(inst: Instance) -> tuple[Matching, Fraction]:
    if inst.n <= BRUTE_FORCE_CAP:
        return mwm_bruteforce(inst)
    return mwm_hungarian(inst)


def second_best_weight(inst: Instance) -> Fraction:
    """Weight of the second-best perfect matching (distinct edge set)."""
    n = inst.n
    if n == 1:
        raise ParameterError("n=1 has a single perfect matching")
    if n <= 7:
        weights = sorted(
            (
                matching_weight(inst, m)
                for m in _enumerate_present(inst)
            ),
            reverse=True,
        )
        if len(weights) < 2:
            raise ParameterError("fewer than two perfect matchings exist")
        return weights[1]
    # Forbid one optimal edge at a time and re-solve: any second-best
    # matching omits at least one edge of the optimum.
    best, _ = mwm_hungarian(inst)
    sentinel = _forbidden_weight(inst)
    best_second: Optional[Fraction] = None
    for i, j in best.sorted_pairs():
        rows = [list(row) for row in inst.weights]
        rows[i][j] = sentinel
        _, w = mwm_hungarian(Instance(rows))
        if best_second is None or w > best_second:
            best_second = w
    assert best_second is not None
    return best_second


def _enumerate_present(inst: Instance):
    for perm in permutations(range(inst.n)):
        if all(inst.weights[i][j] is not None for i, j in enumerate(perm)):
            yield Matching.of(enumerate(perm))


def uniqueness_gap(inst: Instance) -> Fraction:
    """W(best) - W(second best) over perfect matchings; 0 means non-unique."""
    _, best = _solve(inst)
    return best - second_best_weight(inst)
