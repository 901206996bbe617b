"""Exact minimum-cost codes for desk-scale instances.

A branch-and-bound search over tree shapes.  Each state is a set of frontier
words (potential internal nodes or leaves) plus a set of finalized leaf words;
the cheapest frontier word is processed first and either finalized or expanded
with the k cheapest letters (using any other letters, or skipping a cheaper
one, can never help).  Probabilities never enter the search: once a leaf-cost
multiset is fixed, the best assignment pairs the largest probability with the
smallest cost (rearrangement), so states are compared by that value alone.

The lower bound completes a state with the cheapest n - |done| words reachable
from the frontier, generated in cost order from a heap; this never exceeds the
value of any true completion, so pruning is exact.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .coder import ProbInput
from .costs import CostSpec
from .errors import CapTooSmallError, OracleTooLargeError

MAX_N = 10
MAX_T = 4

# Improvements smaller than this are ties; keeps float noise from flapping
# the incumbent between equal-cost optima.
_IMPROVE = 1e-12
_CAP_SLACK = 1e-9


@dataclass(frozen=True)
class OracleResult:
    """Optimal expected cost with a witness code.

    opt_codeword_costs is ascending and pairs with the probabilities in
    descending order; opt_words are the matching letter sequences, forming a
    prefix-free witness.
    """

    opt_cost: float
    opt_codeword_costs: tuple[float, ...]
    nodes_explored: int
    cost_cap_used: float
    opt_words: tuple[tuple[int, ...], ...]


def exact_opt(pinput: ProbInput, spec: CostSpec, cap: float | None = None) -> OracleResult:
    """Exhaustively find OPT for n <= 10 symbols and t <= 4 letters.

    `cap` bounds the search (use the constructed code's cost for a massive
    speedup); CapTooSmallError means every prefix-free code costs more than
    cap + 1e-9, which cannot happen when cap came from a valid code.
    """
    if not spec.is_finite_alphabet:
        raise OracleTooLargeError("oracle needs a finite alphabet")
    t = int(spec.alphabet_size)
    n = pinput.n
    if n > MAX_N:
        raise OracleTooLargeError(f"n={n} exceeds oracle limit {MAX_N}")
    if t > MAX_T:
        raise OracleTooLargeError(f"t={t} exceeds oracle limit {MAX_T}")
    costs = spec.costs
    probs = pinput.probs.tolist()
    cap_used = math.inf if cap is None else float(cap)

    if n == 1:
        value = probs[0] * costs[0]
        if value > cap_used + _CAP_SLACK:
            raise CapTooSmallError("single codeword already exceeds the cap")
        return OracleResult(
            opt_cost=value,
            opt_codeword_costs=(costs[0],),
            nodes_explored=1,
            cost_cap_used=cap_used,
            opt_words=((1,),),
        )

    def value_of(sorted_costs):
        return math.fsum(p * w for p, w in zip(probs, sorted_costs))

    def greedy_complete():
        # Expand the cheapest node with as many letters as still fit.
        heap = [(0.0, ())]
        while len(heap) < n:
            cost, word = heapq.heappop(heap)
            k = min(t, n - len(heap))
            for i in range(k):
                heapq.heappush(heap, (cost + costs[i], word + (i + 1,)))
        return sorted(heap)

    best_leaves = greedy_complete()
    best_value = value_of([w for w, _ in best_leaves])
    if best_value > cap_used + _CAP_SLACK:
        best_leaves = None
        best_value = math.inf

    def lower_bound(frontier, done, need):
        # Cheapest `need` words reachable from the frontier, by cost order.
        heap = list(frontier)
        heapq.heapify(heap)
        picked = []
        while len(picked) < need:
            cost = heapq.heappop(heap)
            picked.append(cost)
            for ci in costs:
                heapq.heappush(heap, cost + ci)
        return value_of(sorted(done + picked))

    nodes = 0

    def search(frontier, done):
        # frontier: ascending list of (cost, word); done: list of (cost, word)
        nonlocal best_value, best_leaves, nodes
        nodes += 1
        if not frontier:
            if len(done) == n:
                value = value_of(sorted(w for w, _ in done))
                if value < best_value - _IMPROVE and value <= cap_used + _CAP_SLACK:
                    best_value = value
                    best_leaves = sorted(done)
            return
        slots = len(done) + len(frontier)
        need = n - len(done)
        lb = lower_bound([w for w, _ in frontier], [w for w, _ in done], need)
        if lb > cap_used + _CAP_SLACK:
            return
        if best_leaves is not None and lb >= best_value - _IMPROVE:
            return
        head, rest = frontier[0], frontier[1:]
        # finalize the cheapest frontier word as a leaf
        if slots <= n:
            search(rest, done + [head])
        # or expand it with the k cheapest letters
        max_k = min(t, n - slots + 1)
        cost, word = head
        for k in range(2, max_k + 1):
            children = [(cost + costs[i], word + (i + 1,)) for i in range(k)]
            search(sorted(rest + children), done)

    search([(0.0, ())], [])
    if best_leaves is None:
        raise CapTooSmallError("no prefix-free code exists at or below the cap")
    return OracleResult(
        opt_cost=best_value,
        opt_codeword_costs=tuple(w for w, _ in best_leaves),
        nodes_explored=nodes,
        cost_cap_used=cap_used,
        opt_words=tuple(word for _, word in best_leaves),
    )


def huffman_equal_cost(pinput: ProbInput, t: int) -> float:
    """Optimal expected depth for t equal-cost letters (classic merging).

    Pads with zero-probability symbols so every merge takes exactly t nodes;
    a single symbol costs 1.0 (one letter).
    """
    if t < 2:
        raise ValueError("need at least 2 letters")
    n = pinput.n
    if n == 1:
        return 1.0
    pad = (-(n - 1)) % (t - 1)
    heap = pinput.probs.tolist() + [0.0] * pad
    heapq.heapify(heap)
    total = 0.0
    while len(heap) > 1:
        merged = math.fsum(heapq.heappop(heap) for _ in range(t))
        total += merged
        heapq.heappush(heap, merged)
    return total
