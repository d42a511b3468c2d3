"""Completion of partial BP matchings via the conflict graph.

Uncovered nodes and single-sided beliefs form a bipartite conflict graph in
which every connected component has at most one cycle (each node believes
in at most one edge).  Cyclic components are resolved by branching on one
cycle edge being in or out of the matching; both residual forests are
solved exactly by tree dynamic programming.  Nodes still unmatched
afterwards are paired greedily in ascending index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Optional, Sequence

from .core import Instance, Matching, MissingEdgeError, ParameterError, matching_weight
from .engine import BeliefSnapshot, PartialBpMatching, partial_bp_matching


@dataclass(frozen=True)
class ConflictGraph:
    """Uncovered nodes plus edges believed by exactly one uncovered endpoint."""

    left_nodes: tuple[int, ...]
    right_nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]  # (left index, right index), sorted


@dataclass(frozen=True)
class BranchRecord:
    """Outcome of the two-case branching on one cyclic component."""

    cycle_edge: tuple[int, int]
    weight_with_edge: Fraction  # W(M_a) + w_e
    weight_without_edge: Fraction  # W(M_b)
    chose_edge: bool


@dataclass(frozen=True)
class CompletionResult:
    """A perfect matching extending the partial BP matching."""

    matching: Matching
    branch_records: tuple[BranchRecord, ...]
    greedy_pairs: tuple[tuple[int, int], ...]


def build_conflict_graph(inst: Instance, snap: BeliefSnapshot) -> ConflictGraph:
    """Conflict graph of a belief snapshot.

    Unresolved uncovered nodes appear isolated; a believed edge whose other
    endpoint is covered by the partial BP matching is dropped.
    """
    partial = partial_bp_matching(snap)
    unc_left = set(partial.uncovered_left)
    unc_right = set(partial.uncovered_right)
    edges = set()
    for i in unc_left:
        j = snap.left_belief[i]
        if j is not None and j in unc_right:
            edges.add((i, j))
    for j in unc_right:
        i = snap.right_belief[j]
        if i is not None and i in unc_left:
            edges.add((i, j))
    return ConflictGraph(
        left_nodes=partial.uncovered_left,
        right_nodes=partial.uncovered_right,
        edges=tuple(sorted(edges)),
    )


def forest_mwm(
    edges: Sequence[tuple[Hashable, Hashable, Fraction]],
) -> tuple[Fraction, list[tuple[Hashable, Hashable]]]:
    """Maximum weight matching of a weighted forest (nodes optional).

    Negative edges are only taken when they improve the total, which on a
    forest with optional coverage means never.  Raises on cyclic input.
    """
    adj: dict[Hashable, list[tuple[Hashable, Fraction]]] = {}
    for u, v, w in edges:
        if u == v:
            raise ParameterError("self-loop in forest input")
        adj.setdefault(u, []).append((v, Fraction(w)))
        adj.setdefault(v, []).append((u, Fraction(w)))
    if _has_cycle(adj):
        raise ParameterError("cycle detected in forest input")

    zero = Fraction(0)
    total = zero
    chosen: list[tuple[Hashable, Hashable]] = []
    visited: set[Hashable] = set()
    for root in adj:
        if root in visited:
            continue
        # Iterative post-order over the tree containing root.
        order: list[tuple[Hashable, Optional[Hashable]]] = []
        stack: list[tuple[Hashable, Optional[Hashable]]] = [(root, None)]
        while stack:
            u, p = stack.pop()
            visited.add(u)
            order.append((u, p))
            for v, _ in adj[u]:
                if v != p:
                    stack.append((v, u))
        # free[u]: best weight of u's subtree with u unmatched.
        # best[u]: best weight of u's subtree (u free or matched to a child).
        free: dict[Hashable, Fraction] = {}
        best: dict[Hashable, Fraction] = {}
        pick: dict[Hashable, Optional[tuple[Hashable, Fraction]]] = {}
        for u, p in reversed(order):
            kids = [(v, w) for v, w in adj[u] if v != p]
            f = sum((best[v] for v, _ in kids), start=zero)
            free[u] = f
            best[u] = f
            pick[u] = None
            for v, w in kids:
                cand = f - best[v] + free[v] + w
                if cand > best[u]:
                    best[u] = cand
                    pick[u] = (v, w)
        total += best[root]
        # Top-down reconstruction.
        state: dict[Hashable, bool] = {root: True}  # True: use best, False: forced free
        for u, p in order:
            use_best = state.get(u, True)
            choice = pick[u] if use_best else None
            if choice is not None:
                chosen.append((u, choice[0]))
            for v, _ in adj[u]:
                if v == p:
                    continue
                state[v] = not (choice is not None and choice[0] == v)
    return total, chosen


def _has_cycle(adj: dict[Hashable, list[tuple[Hashable, Fraction]]]) -> bool:
    parent_of: dict[Hashable, Hashable] = {}

    def find(x: Hashable) -> Hashable:
        while parent_of.get(x, x) != x:
            parent_of[x] = parent_of.get(parent_of[x], parent_of[x])
            x = parent_of[x]
        return x

    seen_pairs = set()
    for u in adj:
        for v, _ in adj[u]:
            key = frozenset((u, v))
            if key in seen_pairs:
                continue
            seen_pairs.add(key)
            ru, rv = find(u), find(v)
            if ru == rv:
                return True
            parent_of.setdefault(ru, ru)
            parent_of[ru] = rv
    return False


def _components(
    nodes: set[tuple[str, int]],
    edges: Sequence[tuple[int, int]],
) -> list[tuple[set[tuple[str, int]], list[tuple[int, int]]]]:
    adj: dict[tuple[str, int], list[tuple[str, int]]] = {u: [] for u in nodes}
    for i, j in edges:
        adj[("L", i)].append(("R", j))
        adj[("R", j)].append(("L", i))
    seen: set[tuple[str, int]] = set()
    comps = []
    for start in sorted(nodes):
        if start in seen:
            continue
        comp = set()
        stack = [start]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            comp.add(u)
            stack.extend(adj[u])
        comp_edges = [
            (i, j) for i, j in edges if ("L", i) in comp
        ]
        comps.append((comp, comp_edges))
    return comps


def _cycle_edges(
    comp: set[tuple[str, int]], comp_edges: list[tuple[int, int]]
) -> list[tuple[int, int]]:
    """The unique cycle of a pseudoforest component ([] when acyclic)."""
    degree: dict[tuple[str, int], int] = {u: 0 for u in comp}
    live = set(comp_edges)
    for i, j in live:
        degree[("L", i)] += 1
        degree[("R", j)] += 1
    # Peel leaves until only the cycle (or nothing) remains.
    changed = True
    while changed:
        changed = False
        for e in sorted(live):
            i, j = e
            if degree[("L", i)] == 1 or degree[("R", j)] == 1:
                live.discard(e)
                degree[("L", i)] -= 1
                degree[("R", j)] -= 1
                changed = True
    return sorted(live)


def complete(inst: Instance, snap: BeliefSnapshot) -> CompletionResult:
    """Perfect matching extending the partial BP matching of a snapshot.

    Cyclic conflict components are branched on their lexicographically
    smallest cycle edge; the branch with the larger committed weight wins.
    Leftover nodes are paired greedily in ascending index order.
    """
    partial = partial_bp_matching(snap)
    cg = build_conflict_graph(inst, snap)
    pairs: set[tuple[int, int]] = set(partial.pairs.pairs)
    records: list[BranchRecord] = []

    nodes = {("L", i) for i in cg.left_nodes} | {("R", j) for j in cg.right_nodes}
    for comp, comp_edges in _components(nodes, cg.edges):
        if not comp_edges:
            continue
        weighted = [(("L", i), ("R", j), inst.weight(i, j)) for i, j in comp_edges]
        cyc = _cycle_edges(comp, comp_edges)
        if cyc:
            e = cyc[0]
            ei, ej = e
            w_e = inst.weight(ei, ej)
            case_a = [
                (u, v, w)
                for (u, v, w), raw in zip(weighted, comp_edges)
                if raw[0] != ei and raw[1] != ej
            ]
            case_b = [
                (u, v, w)
                for (u, v, w), raw in zip(weighted, comp_edges)
                if raw != e
            ]
            weight_a, matched_a = forest_mwm(case_a)
            weight_b, matched_b = forest_mwm(case_b)
            chose_edge = weight_a + w_e > weight_b
            committed = matched_a if chose_edge else matched_b
            records.append(
                BranchRecord(
                    cycle_edge=e,
                    weight_with_edge=weight_a + w_e,
                    weight_without_edge=weight_b,
                    chose_edge=chose_edge,
                )
            )
            if chose_edge:
                pairs.add(e)
        else:
            _, committed = forest_mwm(weighted)
        for u, v in committed:
            (i,) = [x[1] for x in (u, v) if x[0] == "L"]
            (j,) = [x[1] for x in (u, v) if x[0] == "R"]
            pairs.add((i, j))

    covered_left = {i for i, _ in pairs}
    covered_right = {j for _, j in pairs}
    greedy = []
    # Pair leftovers joined by a conflict edge first (the tree stage may
    # skip a negative believed edge); afterwards no conflict edge joins
    # the two remaining leftover sets.
    for i, j in cg.edges:
        if i not in covered_left and j not in covered_right:
            greedy.append((i, j))
            pairs.add((i, j))
            covered_left.add(i)
            covered_right.add(j)
    leftover_left = sorted(i for i in range(inst.n) if i not in covered_left)
    leftover_right = sorted(j for j in range(inst.n) if j not in covered_right)
    for i, j in zip(leftover_left, leftover_right):
        if not inst.has_edge(i, j):
            raise MissingEdgeError(
                "greedy completion needs the full K_{n,n}; edge "
                f"({i},{j}) is absent"
            )
        greedy.append((i, j))
        pairs.add((i, j))
    return CompletionResult(
        matching=Matching.of(pairs),
        branch_records=tuple(records),
        greedy_pairs=tuple(greedy),
    )


def approximation_ratio(
    inst: Instance, completion: CompletionResult, mwm_weight: Fraction
) -> Fraction:
    """W(completion) / W(optimum) as an exact rational."""
    mwm_weight = Fraction(mwm_weight)
    if mwm_weight <= 0:
        raise ParameterError("ratio needs a positive optimal weight; shift first")
    if not completion.matching.is_perfect(inst.n):
        raise ParameterError("completion must be a perfect matching")
    return matching_weight(inst, completion.matching) / mwm_weight
