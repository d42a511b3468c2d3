"""Adversarial instance constructions: heavy cycles and prime multi-cycles.

The single-cycle family places a 2n-cycle with one heavy suboptimal edge;
the multi-cycle family packs node-disjoint heavy cycles whose half-lengths
are distinct primes from the interval (n/2c, n/c), padded with forced pairs.
Both families have a unique maximum weight matching with uniqueness gap eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import Instance, Matching, ParameterError, format_rational


@dataclass(frozen=True)
class CycleParams:
    """Parameters of the heavy-cycle construction."""

    n: int
    w_max: Fraction
    eps: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "w_max", Fraction(self.w_max))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.n < 3:
            raise ParameterError("cycle half-length must be >= 3")
        if self.w_max <= 0:
            raise ParameterError("w_max must be positive")
        if not (0 < self.eps < self.w_max / (4 * (self.n - 2))):
            raise ParameterError("eps must satisfy 0 < eps < w_max/(4(n-2))")

    @property
    def w_opt(self) -> Fraction:
        return self.w_max / 2

    @property
    def w_sub(self) -> Fraction:
        n = self.n
        return self.w_max / 2 - self.w_max / (2 * (n - 1)) - self.eps / (n - 1)


@dataclass(frozen=True)
class PrimeSelection:
    """Primes chosen for the multi-cycle construction."""

    n: int
    c: int
    primes: tuple[int, ...]
    interval: tuple[Fraction, Fraction]


def _cycle_edge_classes(n: int, offset: int = 0) -> dict[str, list[list[int]]]:
    """Edge classes of one 2n-cycle occupying indices offset..offset+n-1."""
    opt = [[offset + i, offset + i] for i in range(n)]
    sub = [[offset + i + 1, offset + i] for i in range(n - 1)]
    heavy = [[offset, offset + n - 1]]
    return {"opt": opt, "sub": sub, "heavy": heavy}


def gen_cycle(params: CycleParams, embed: bool = False) -> Instance:
    """The heavy-cycle instance, bare (edges only on the cycle) or embedded.

    Edge weights: optimal edges w_max/2; plain suboptimal edges
    w_max/2 - w_max/(2(n-1)) - eps/(n-1); the heavy edge w_max.  When
    embedded, every non-cycle edge of K_{n,n} weighs -2*w_max.
    """
    n = params.n
    light = -2 * params.w_max
    rows: list[list[Optional[Fraction]]] = [
        [light if embed else None] * n for _ in range(n)
    ]
    classes = _cycle_edge_classes(n)
    for i, j in classes["opt"]:
        rows[i][j] = params.w_opt
    for i, j in classes["sub"]:
        rows[i][j] = params.w_sub
    for i, j in classes["heavy"]:
        rows[i][j] = params.w_max
    meta = {
        "family": "cycle",
        "n": n,
        "w_max": format_rational(params.w_max),
        "eps": format_rational(params.eps),
        "embed": embed,
        "edges": classes,
        "cycles": [{"offset": 0, "half_length": n}],
    }
    return Instance(rows, meta=meta)


def select_primes(n: int, c: int) -> PrimeSelection:
    """The c smallest primes strictly inside (n/2c, n/c).

    Availability is checked by an actual sieve of the interval rather than
    assumed from asymptotic counting bounds.
    """
    from sympy import primerange

    if c < 1 or n < 1:
        raise ParameterError("n and c must be positive")
    lo = Fraction(n, 2 * c)
    hi = Fraction(n, c)
    start = math.floor(lo) + 1
    stop = math.ceil(hi)
    primes = [p for p in primerange(start, stop) if lo < p < hi]
    if len(primes) < c:
        raise ParameterError(
            f"only {len(primes)} primes in ({lo}, {hi}); need {c}"
        )
    return PrimeSelection(n=n, c=c, primes=tuple(primes[:c]), interval=(lo, hi))


def pi_bounds(n: int) -> tuple[Fraction, Fraction]:
    """Dusart's bracketing of the prime-counting function for n >= 599."""
    if n < 599:
        raise ParameterError("the bounds require n >= 599")
    log_n = math.log(n)
    lower = (n / log_n) * (1 + 1 / log_n)
    upper = (n / log_n) * (1 + 1.2762 / log_n)
    return Fraction(lower), Fraction(upper)


def default_cycle_count(n: int) -> int:
    """floor((1/2) * sqrt(n / log n))."""
    if n < 3:
        raise ParameterError("n must be >= 3")
    return max(1, math.floor(0.5 * math.sqrt(n / math.log(n))))


def gen_multicycle(
    n: int,
    w_max: Fraction,
    eps: Fraction,
    c: Optional[int] = None,
) -> Instance:
    """K_{n,n} packed with node-disjoint heavy cycles of prime half-lengths.

    Cycle blocks occupy the lowest indices in prime order; the remaining
    n - sum(n_i) index pairs are pad edges of weight w_max/2; every other
    edge weighs -2*w_max.  Each cycle satisfies the single-cycle parameter
    constraint with its own half-length.
    """
    w_max = Fraction(w_max)
    eps = Fraction(eps)
    if c is None:
        c = default_cycle_count(n)
    selection = select_primes(n, c)
    largest = selection.primes[-1]
    if not (0 < eps < w_max / (4 * (largest - 2))):
        raise ParameterError(
            "eps must satisfy 0 < eps < w_max/(4(n_c-2)) for the largest prime"
        )
    light = -2 * w_max
    rows: list[list[Optional[Fraction]]] = [[light] * n for _ in range(n)]
    classes: dict[str, list[list[int]]] = {"opt": [], "sub": [], "heavy": [], "pad": []}
    cycles = []
    offset = 0
    for n_i in selection.primes:
        params = CycleParams(n=n_i, w_max=w_max, eps=eps)
        block = _cycle_edge_classes(n_i, offset)
        for i, j in block["opt"]:
            rows[i][j] = params.w_opt
        for i, j in block["sub"]:
            rows[i][j] = params.w_sub
        for i, j in block["heavy"]:
            rows[i][j] = w_max
        for cls in ("opt", "sub", "heavy"):
            classes[cls].extend(block[cls])
        cycles.append({"offset": offset, "half_length": n_i})
        offset += n_i
    for i in range(offset, n):
        rows[i][i] = w_max / 2
        classes["pad"].append([i, i])
    meta = {
        "family": "multicycle",
        "n": n,
        "w_max": format_rational(w_max),
        "eps": format_rational(eps),
        "embed": True,
        "c": c,
        "primes": list(selection.primes),
        "edges": classes,
        "cycles": cycles,
    }
    return Instance(rows, meta=meta)


def failure_window(n: int, c: int, w_max: Fraction, eps: Fraction) -> Fraction:
    """Iteration window in which at least c/2 cycles cannot be perfect.

    min( w_max/(8*c*eps), floor((n/2c)^(c/2)) ), computed exactly.
    """
    w_max = Fraction(w_max)
    eps = Fraction(eps)
    if eps <= 0:
        raise ParameterError("eps must be positive")
    power = Fraction(n, 2 * c) ** c
    m = math.isqrt(power.numerator // power.denominator)
    while (m + 1) * (m + 1) * power.denominator <= power.numerator:
        m += 1
    while m * m * power.denominator > power.numerator:
        m -= 1
    return min(w_max / (8 * c * eps), Fraction(m))


def shift_weights(inst: Instance, delta: Fraction) -> Instance:
    """All present weights increased by delta; arg-max matching unchanged."""
    delta = Fraction(delta)
    rows = [
        [None if w is None else w + delta for w in row] for row in inst.weights
    ]
    return Instance(rows, meta=inst.meta)


def optimal_matching(inst: Instance) -> Matching:
    """The construction's unique MWM: optimal cycle edges plus pad edges."""
    meta = inst.meta or {}
    edges = meta.get("edges")
    if not edges:
        raise ParameterError("instance has no generator metadata")
    pairs = [tuple(e) for e in edges["opt"]] + [
        tuple(e) for e in edges.get("pad", ())
    ]
    return Matching.of(pairs)


def suboptimal_matching(inst: Instance) -> Matching:
    """Second-best matching of a single-cycle instance (its suboptimal edges)."""
    meta = inst.meta or {}
    if meta.get("family") != "cycle":
        raise ParameterError("suboptimal matching is defined for the cycle family")
    edges = meta["edges"]
    pairs = [tuple(e) for e in edges["sub"]] + [tuple(e) for e in edges["heavy"]]
    return Matching.of(pairs)
