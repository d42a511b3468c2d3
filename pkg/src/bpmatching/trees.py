"""Computation-tree unrolling and exact maximum weight T-matchings.

A computation tree of depth t rooted at a graph node v repeats the graph:
the children of a tree node are all graph neighbors of its label except the
label of its tree parent.  A T-matching is a partial matching of the tree
covering every inner (non-leaf) node.  The root edge of a maximum weight
T-matching is the independent ground truth for the BP belief at iteration t.

Graph nodes are addressed by ids 0..2n-1: left node alpha_{i+1} has id i,
right node beta_{j+1} has id n+j (see Instance.node_neighbors).

For cycle-restricted instances every tree is a path (each non-root node has
exactly one child), so unrolling stays linear in t.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .core import Instance, OracleCapExceeded, ParameterError

DEFAULT_NODE_CAP = 10**6


class _Tie:
    def __repr__(self) -> str:  # pragma: no cover
        return "TIE"


#: Returned where several maximum weight T-matchings disagree at the root.
TIE = _Tie()


@dataclass
class ComputationTree:
    """Flat array form of a computation tree (node 0 is the root).

    ``labels[k]`` is the original-graph node id of tree node k, ``parent[k]``
    its tree parent (-1 for the root) and ``weight_up[k]`` the weight of the
    edge to its parent.  Nodes are stored in BFS order.
    """

    root: int
    depth: int
    labels: list[int]
    parent: list[int]
    weight_up: list[Optional[Fraction]]

    def node_count(self) -> int:
        return len(self.labels)

    def edges(self) -> list[tuple[int, int, Fraction]]:
        """Tree edges as (label, parent label, weight) triples."""
        return [
            (self.labels[k], self.labels[self.parent[k]], self.weight_up[k])
            for k in range(1, len(self.labels))
        ]


def unroll(inst: Instance, v: int, t: int, cap: int = DEFAULT_NODE_CAP) -> ComputationTree:
    """Depth-t computation tree of graph node ``v``."""
    if not (0 <= v < inst.node_count()):
        raise ParameterError(f"node id {v} out of range")
    if t < 0:
        raise ParameterError("depth must be >= 0")
    labels = [v]
    parent = [-1]
    weight_up: list[Optional[Fraction]] = [None]
    frontier = [0]
    for _ in range(t):
        nxt = []
        for k in frontier:
            u = labels[k]
            p_label = labels[parent[k]] if parent[k] >= 0 else -1
            for nb, w in inst.node_neighbors(u):
                if nb == p_label:
                    continue
                if len(labels) >= cap:
                    raise OracleCapExceeded(
                        f"computation tree exceeds cap of {cap} nodes"
                    )
                labels.append(nb)
                parent.append(k)
                weight_up.append(w)
                nxt.append(len(labels) - 1)
        frontier = nxt
    return ComputationTree(root=v, depth=t, labels=labels, parent=parent,
                           weight_up=weight_up)


def max_t_matching(
    tree: ComputationTree,
) -> tuple[Fraction, Union[tuple[int, int], _Tie]]:
    """Optimal T-matching weight and the root-incident edge of the optimum.

    Per node u the DP tracks A(u), the best subtree weight when u is matched
    upward (edge weight counted at the parent), and B(u), the best weight
    when u is matched to one of its children.  Leaves may stay unmatched
    (A = B = 0); inner nodes are covered structurally.  Returns TIE when
    several optima disagree on the root edge.
    """
    if tree.depth < 1:
        raise ParameterError("T-matchings need depth >= 1")
    m = tree.node_count()
    children: list[list[int]] = [[] for _ in range(m)]
    for k in range(1, m):
        children[tree.parent[k]].append(k)
    zero = Fraction(0)
    A = [zero] * m
    B = [zero] * m
    for k in range(m - 1, 0, -1):
        ch = children[k]
        if not ch:
            continue
        sum_b = sum((B[c] for c in ch), start=zero)
        A[k] = sum_b
        B[k] = sum_b + max(tree.weight_up[c] + A[c] - B[c] for c in ch)
    root_children = children[0]
    if not root_children:
        raise ParameterError("root has no incident edge")
    scores = [tree.weight_up[c] + A[c] - B[c] for c in root_children]
    best = max(scores)
    total = sum((B[c] for c in root_children), start=zero) + best
    winners = [c for c, s in zip(root_children, scores) if s == best]
    if len(winners) > 1:
        return total, TIE
    return total, (tree.root, tree.labels[winners[0]])


def oracle_belief(
    inst: Instance, v: int, t: int, cap: int = DEFAULT_NODE_CAP
) -> Union[int, _Tie]:
    """Believed partner index of node ``v`` at iteration ``t`` (or TIE).

    The partner is reported as an index on the opposite side (0..n-1).
    """
    tree = unroll(inst, v, t, cap=cap)
    _, root_edge = max_t_matching(tree)
    if root_edge is TIE:
        return TIE
    _, other = root_edge
    n = inst.n
    return other - n if other >= n else other


def tail_decompose(n: int, t: int) -> tuple[int, int]:
    """Split t = k*n + l with 0 <= l <= n-1 (cycle copies plus tail)."""
    if t < 0:
        raise ParameterError("t must be >= 0")
    if n < 1:
        raise ParameterError("n must be >= 1")
    return divmod(t, n)


def nibbling_delta(n: int, w_max: Fraction, eps: Fraction, l: int) -> Fraction:
    """Suboptimal advantage of a heavy tail of half-length l.

    Delta(l) = w_max*(n-l)/(2(n-1)) - eps*(l-1)/(n-1), strictly decreasing
    from Delta(1) = w_max/2 down to a value above w_max/(4(n-1)).
    """
    w_max = Fraction(w_max)
    eps = Fraction(eps)
    if n < 3:
        raise ParameterError("n must be >= 3")
    if not (1 <= l <= n - 1):
        raise ParameterError("l must satisfy 1 <= l <= n-1")
    if not (0 < eps < w_max / (4 * (n - 2))):
        raise ParameterError("eps must satisfy 0 < eps < w_max/(4(n-2))")
    return w_max * Fraction(n - l, 2 * (n - 1)) - eps * Fraction(l - 1, n - 1)


def _path_edge_sequence(tree: ComputationTree) -> list[tuple[int, int, Fraction]]:
    """Leaf-to-leaf edge sequence of a path-shaped computation tree."""
    m = tree.node_count()
    children: list[list[int]] = [[] for _ in range(m)]
    for k in range(1, m):
        children[tree.parent[k]].append(k)
    if any(len(ch) > 1 for k, ch in enumerate(children) if k != 0) or len(children[0]) > 2:
        raise ParameterError("computation tree is not a path")

    def arm(start: int) -> list[tuple[int, int, Fraction]]:
        out = []
        k = start
        while True:
            out.append((tree.labels[tree.parent[k]], tree.labels[k], tree.weight_up[k]))
            ch = children[k]
            if not ch:
                return out
            k = ch[0]

    arms = [arm(c) for c in children[0]]
    if len(arms) == 1:
        return arms[0]
    first = [(b, a, w) for a, b, w in reversed(arms[0])]
    return first + arms[1]


def heavy_tail_tree(inst: Instance, k: int, l: int) -> tuple[ComputationTree, int]:
    """A cycle computation tree whose 2l-edge tail contains the heavy edge.

    The instance must be a generated single-cycle instance (cycle metadata
    present).  Returns the tree and its root node id.  Searches all cycle
    nodes; existence is guaranteed for 1 <= l <= n-1.
    """
    meta = inst.meta or {}
    edges = meta.get("edges") or {}
    heavy = {tuple(e) for e in edges.get("heavy", ())}
    if len(heavy) != 1:
        raise ParameterError("instance is not a single-cycle construction")
    ((hi, hj),) = heavy
    n = inst.n
    heavy_pair = {hi, n + hj}
    if not (1 <= l <= n - 1):
        raise ParameterError("l must satisfy 1 <= l <= n-1")
    t = k * n + l
    for v in range(2 * n):
        tree = unroll(_cycle_view(inst), v, t)
        seq = _path_edge_sequence(tree)
        tail_windows = (seq[-2 * l:], seq[: 2 * l])
        if any(
            {a, b} == heavy_pair for window in tail_windows for a, b, _ in window
        ):
            return tree, v
    raise ParameterError("no heavy-tail root found (malformed cycle instance)")


def _cycle_view(inst: Instance) -> Instance:
    """The instance restricted to its generated cycle edges."""
    meta = inst.meta or {}
    edges = meta.get("edges") or {}
    keep = set()
    for cls in ("opt", "sub", "heavy", "pad"):
        keep.update(tuple(e) for e in edges.get(cls, ()))
    if not keep:
        raise ParameterError("instance has no edge-class metadata")
    rows = [
        [w if (i, j) in keep else None for j, w in enumerate(row)]
        for i, row in enumerate(inst.weights)
    ]
    return Instance(rows, meta=inst.meta)


def class_weight_split(inst: Instance, tree: ComputationTree) -> dict[str, Fraction]:
    """Total tree edge weight per generator edge class.

    The heavy edge counts toward the suboptimal class, matching the
    optimal/suboptimal partition of cycle edges.
    """
    meta = inst.meta or {}
    edges = meta.get("edges") or {}
    classes: dict[frozenset[int], str] = {}
    n = inst.n
    for cls in ("opt", "sub", "heavy", "pad"):
        for i, j in edges.get(cls, ()):
            key = frozenset((i, n + j))
            classes[key] = "sub" if cls == "heavy" else cls
    totals: dict[str, Fraction] = {}
    for a, b, w in tree.edges():
        cls = classes.get(frozenset((a, b)), "light")
        totals[cls] = totals.get(cls, Fraction(0)) + w
    return totals
