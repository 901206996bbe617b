"""Tests for the exact small-instance oracle and equal-cost cross-check."""

import itertools
import math
import random

import numpy as np
import pytest

from varncode import (
    CapTooSmallError,
    OracleTooLargeError,
    build_code,
    char_root,
    entropy,
    exact_opt,
    finite_list,
    huffman_equal_cost,
    linear,
    parse_cost_spec,
    prepare,
    verify_prefix_free,
)

THIRDS_SIXTHS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0)


# ---------------------------------------------------------------------------
# golden instances
# ---------------------------------------------------------------------------

def test_thirds_sixths_equal_costs_optimum():
    res = exact_opt(prepare(THIRDS_SIXTHS), parse_cost_spec("finite:1,1"))
    assert abs(res.opt_cost - 2.0) < 1e-12
    assert res.opt_codeword_costs == (2.0, 2.0, 2.0, 2.0)
    assert verify_prefix_free(res.opt_words)


def test_thirds_sixths_one_three_optimum():
    res = exact_opt(prepare(THIRDS_SIXTHS), parse_cost_spec("finite:1,3"))
    assert abs(res.opt_cost - 3.5) < 1e-12
    assert res.opt_codeword_costs == (3.0, 3.0, 4.0, 5.0)
    assert verify_prefix_free(res.opt_words)
    # the two cheapest codewords go to the two 1/3 probabilities
    assert res.opt_cost == pytest.approx(
        (3.0 + 3.0) / 3.0 + (4.0 + 5.0) / 6.0, abs=1e-12
    )


def test_single_symbol_optimum():
    res = exact_opt(prepare([1.0]), parse_cost_spec("finite:1,3"))
    assert res.opt_cost == 1.0
    assert res.opt_words == ((1,),)


def test_result_invariants():
    rng = np.random.default_rng(2)
    spec = parse_cost_spec("finite:1,2,3")
    for _ in range(20):
        n = int(rng.integers(2, 8))
        p = rng.random(n)
        pin = prepare(p, normalize=True)
        res = exact_opt(pin, spec)
        assert len(res.opt_codeword_costs) == n
        assert len(res.opt_words) == n
        assert list(res.opt_codeword_costs) == sorted(res.opt_codeword_costs)
        assert verify_prefix_free(res.opt_words)
        assert res.nodes_explored >= 1
        direct = math.fsum(
            float(q) * w for q, w in zip(pin.probs, res.opt_codeword_costs)
        )
        assert res.opt_cost == pytest.approx(direct, abs=1e-12)
        # word letter costs match the reported codeword costs
        for w, word in zip(res.opt_codeword_costs, res.opt_words):
            assert w == pytest.approx(
                sum(spec.costs[m - 1] for m in word), abs=1e-12
            )


def test_determinism():
    pin = prepare([0.4, 0.3, 0.2, 0.1])
    spec = parse_cost_spec("finite:1,2")
    a = exact_opt(pin, spec)
    b = exact_opt(pin, spec)
    assert a.opt_cost == b.opt_cost
    assert a.opt_words == b.opt_words
    assert a.nodes_explored == b.nodes_explored


# ---------------------------------------------------------------------------
# equal-cost agreement with classic merging
# ---------------------------------------------------------------------------

def test_dyadic_binary_huffman():
    pin = prepare([0.5, 0.25, 0.125, 0.125])
    assert huffman_equal_cost(pin, 2) == pytest.approx(1.75, abs=1e-12)
    res = exact_opt(pin, parse_cost_spec("finite:1,1"))
    assert res.opt_cost == pytest.approx(1.75, abs=1e-12)


def test_huffman_matches_oracle_all_arities():
    rng = np.random.default_rng(13)
    specs = {
        2: finite_list([1.0, 1.0]),
        3: finite_list([1.0, 1.0, 1.0]),
        4: finite_list([1.0, 1.0, 1.0, 1.0]),
    }
    for trial in range(36):
        t = 2 + trial % 3
        n = int(rng.integers(2, 8))
        p = rng.random(n)
        pin = prepare(p, normalize=True)
        merged = huffman_equal_cost(pin, t)
        res = exact_opt(pin, specs[t])
        assert res.opt_cost == pytest.approx(merged, abs=1e-9)


def test_huffman_edge_cases():
    assert huffman_equal_cost(prepare([1.0]), 2) == 1.0
    assert huffman_equal_cost(prepare([0.5, 0.5]), 3) == 1.0
    # 4 uniform symbols over 3 letters: two at depth 1, two at depth 2
    assert huffman_equal_cost(prepare([0.25] * 4), 3) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        huffman_equal_cost(prepare([0.5, 0.5]), 1)


# ---------------------------------------------------------------------------
# optimality properties
# ---------------------------------------------------------------------------

def test_entropy_lower_bound_and_build_upper_bound():
    rng = np.random.default_rng(19)
    labels = ("finite:1,1", "finite:1,2", "finite:1,3", "finite:1,2,3")
    for trial in range(40):
        n = int(rng.integers(2, 8))
        p = rng.random(n) + 1e-3
        pin = prepare(p, normalize=True)
        spec = parse_cost_spec(labels[trial % 4])
        root = char_root(spec)
        tree = build_code(pin, spec, root)
        res = exact_opt(pin, spec, cap=tree.cost())
        assert entropy(pin) / root.value <= res.opt_cost + 1e-9
        assert res.opt_cost <= tree.cost() + 1e-12


def test_extra_letters_never_hurt():
    rng = np.random.default_rng(37)
    small = parse_cost_spec("finite:1,2")
    large = parse_cost_spec("finite:1,2,3")
    for _ in range(15):
        n = int(rng.integers(2, 7))
        pin = prepare(rng.random(n), normalize=True)
        assert exact_opt(pin, large).opt_cost <= exact_opt(pin, small).opt_cost + 1e-12


def test_rearrangement_is_best_assignment():
    """Pairing sorted probs with sorted costs beats every other permutation."""
    rng = random.Random(8)
    for _ in range(30):
        n = rng.randint(2, 5)
        probs = sorted((rng.random() for _ in range(n)), reverse=True)
        total = sum(probs)
        probs = [p / total for p in probs]
        costs = sorted(rng.uniform(1.0, 5.0) for _ in range(n))
        paired = math.fsum(p * w for p, w in zip(probs, costs))
        for perm in itertools.permutations(costs):
            alt = math.fsum(p * w for p, w in zip(probs, perm))
            assert paired <= alt + 1e-12


def test_oracle_beats_every_fixed_depth_profile():
    """Brute-force check against all leaf-depth multisets for binary costs."""
    spec = parse_cost_spec("finite:1,1")
    rng = np.random.default_rng(23)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        pin = prepare(rng.random(n), normalize=True)
        res = exact_opt(pin, spec)
        best = math.inf
        for depths in itertools.product(range(1, n + 1), repeat=n):
            if abs(sum(0.5 ** d for d in depths) - 1.0) > 1e-12 \
                    and sum(0.5 ** d for d in depths) > 1.0:
                continue
            value = math.fsum(
                p * d for p, d in zip(pin.probs, sorted(depths))
            )
            best = min(best, value)
        assert res.opt_cost == pytest.approx(best, abs=1e-9)


# ---------------------------------------------------------------------------
# limits and caps
# ---------------------------------------------------------------------------

def test_size_limits():
    spec = parse_cost_spec("finite:1,2")
    with pytest.raises(OracleTooLargeError):
        exact_opt(prepare([1.0 / 11] * 11), spec)
    with pytest.raises(OracleTooLargeError):
        exact_opt(prepare([0.5, 0.5]), parse_cost_spec("finite:1,1,1,1,1"))
    with pytest.raises(OracleTooLargeError):
        exact_opt(prepare([0.5, 0.5]), linear())


def test_cap_semantics():
    pin = prepare(THIRDS_SIXTHS)
    spec = parse_cost_spec("finite:1,1")
    with pytest.raises(CapTooSmallError):
        exact_opt(pin, spec, cap=1.5)
    capped = exact_opt(pin, spec, cap=2.0)
    assert capped.opt_cost == pytest.approx(2.0, abs=1e-12)
    assert capped.cost_cap_used == 2.0
    open_search = exact_opt(pin, spec)
    assert open_search.cost_cap_used == math.inf
    assert open_search.opt_cost == capped.opt_cost
    # a tight cap prunes at least as hard as no cap
    assert capped.nodes_explored <= open_search.nodes_explored
