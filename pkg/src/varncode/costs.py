"""Letter-cost alphabets and the characteristic equation.

An alphabet is either an explicit finite list of positive letter costs or an
integer-cost profile (d_1, d_2, ...) giving the number of letters of each
integer cost, possibly infinite.  The characteristic root c is the unique
positive solution of

    1 = sum_i 2^(-c * c_i) = sum_j d_j * 2^(-c * j)

and generalizes "bits per symbol" to unequal letter costs.  Everything else in
the package (bin widths, entropy lower bound, redundancy bounds) is phrased in
terms of c and a few tail sums computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    CostSpecError,
    DivergentSpecError,
    DivergentTailError,
    NoRootError,
)

FINITE_LIST = "FiniteList"
INTEGER_PROFILE = "IntegerProfile"

# Costs within this distance of an integer are treated as integers (fast paths,
# sharper multiplicity bounds).
INTEGER_SNAP = 1e-9

_DEFAULT_ROOT_TOL = 1e-12
_TAIL_TOL = 1e-12


def _geom_weighted_tail(z: float, level: int) -> float:
    """sum_{j > level} j * z^j for 0 < z < 1, in closed form."""
    m = level
    return z ** (m + 1) * ((m + 1) - m * z) / (1.0 - z) ** 2


# ---------------------------------------------------------------------------
# profile families
# ---------------------------------------------------------------------------

class ProfileFamily:
    """Integer-cost alphabet described by multiplicities d_j, j = 1, 2, ...

    Subclasses supply the analytic facts the rest of the package needs:
    multiplicities, the characteristic sum as a function of z = 2^(-c), an
    exact root when one is known, the supremum of the characteristic sum over
    its convergence region (to decide root existence), the largest
    multiplicity K (or infinity), and certified tails of sum_j j*d_j*z^j.
    """

    name = "custom"

    def multiplicity(self, j: int) -> int:
        raise NotImplementedError

    def char_sum_z(self, z: float) -> float:
        """sum_j d_j z^j, or math.inf where the series diverges."""
        raise NotImplementedError

    def closed_root(self) -> float | None:
        return None

    def sup_char_sum(self) -> float:
        """Supremum of the characteristic sum over z in (0, 1)."""
        raise NotImplementedError

    def total_letters(self) -> float:
        """Number of letters (math.inf for infinite alphabets)."""
        return math.inf

    def max_multiplicity(self) -> float:
        """K = max_j d_j, or math.inf when the profile is unbounded."""
        raise NotImplementedError

    def tail_convergent_at(self, z: float) -> bool:
        """Whether sum_j j d_j z^j converges."""
        raise NotImplementedError

    def weighted_tail_after(self, level: int, z: float) -> float:
        """sum_{j > level} j d_j z^j with truncation error below 1e-12."""
        raise NotImplementedError


class LinearFamily(ProfileFamily):
    """One letter of every integer cost: d_j = 1."""

    name = "linear"

    def multiplicity(self, j):
        return 1

    def char_sum_z(self, z):
        if z >= 1.0:
            return math.inf
        return z / (1.0 - z)

    def closed_root(self):
        # z/(1-z) = 1 at z = 1/2.
        return 1.0

    def sup_char_sum(self):
        return math.inf

    def max_multiplicity(self):
        return 1.0

    def tail_convergent_at(self, z):
        return z < 1.0

    def weighted_tail_after(self, level, z):
        if not self.tail_convergent_at(z):
            raise DivergentTailError("linear tail diverges at z >= 1")
        return _geom_weighted_tail(z, level)


class RepeatFamily(ProfileFamily):
    """d copies of every integer cost: d_j = d."""

    name = "repeat"

    def __init__(self, d: int):
        if d < 1:
            raise CostSpecError("repeat multiplicity must be >= 1")
        self.d = int(d)

    def multiplicity(self, j):
        return self.d

    def char_sum_z(self, z):
        if z >= 1.0:
            return math.inf
        return self.d * z / (1.0 - z)

    def closed_root(self):
        # d*z/(1-z) = 1 at z = 1/(d+1).
        return math.log2(self.d + 1)

    def sup_char_sum(self):
        return math.inf

    def max_multiplicity(self):
        return float(self.d)

    def tail_convergent_at(self, z):
        return z < 1.0

    def weighted_tail_after(self, level, z):
        if not self.tail_convergent_at(z):
            raise DivergentTailError("repeat tail diverges at z >= 1")
        return self.d * _geom_weighted_tail(z, level)


_PHI = (1.0 + math.sqrt(5.0)) / 2.0


class FibonacciFamily(ProfileFamily):
    """Fibonacci multiplicities d_j = F_j (1, 1, 2, 3, 5, ...)."""

    name = "fib"
    # generating function z/(1 - z - z^2), radius of convergence 1/phi

    def __init__(self):
        self._fib = [0, 1, 1]

    def multiplicity(self, j):
        fib = self._fib
        while len(fib) <= j:
            fib.append(fib[-1] + fib[-2])
        return fib[j]

    def char_sum_z(self, z):
        den = 1.0 - z - z * z
        if den <= 0.0:
            return math.inf
        return z / den

    def closed_root(self):
        # z/(1-z-z^2) = 1 at z = sqrt(2) - 1.
        return -math.log2(math.sqrt(2.0) - 1.0)

    def sup_char_sum(self):
        return math.inf

    def max_multiplicity(self):
        return math.inf

    def tail_convergent_at(self, z):
        return z < 1.0 / _PHI

    def weighted_tail_after(self, level, z):
        if not self.tail_convergent_at(z):
            raise DivergentTailError("fibonacci tail diverges at z >= 1/phi")
        # F_j <= phi^(j-1), so the remainder past j0 is bounded by the
        # geometric-derivative tail of r = phi*z < 1, scaled by 1/phi.
        r = _PHI * z
        terms = []
        j = level
        while True:
            j += 1
            bound = _geom_weighted_tail(r, j - 1) / _PHI
            if bound <= 0.5 * _TAIL_TOL:
                break
            terms.append(j * self.multiplicity(j) * z ** j)
        return math.fsum(terms)


class BalancedWordsFamily(ProfileFamily):
    """Balanced-word alphabet: d_j = 0 for odd j, 2*Catalan(j/2 - 1) for even j."""

    name = "balanced"
    # generating function 1 - sqrt(1 - 4 z^2), radius 1/2, value 1 at z = 1/2

    def multiplicity(self, j):
        if j <= 0 or j % 2 == 1:
            return 0
        k = j // 2 - 1
        return 2 * math.comb(2 * k, k) // (k + 1)

    def char_sum_z(self, z):
        x = 4.0 * z * z
        if x > 1.0:
            return math.inf
        return 1.0 - math.sqrt(1.0 - x)

    def closed_root(self):
        # The characteristic sum reaches 1 exactly at the convergence boundary
        # z = 1/2; its slope is infinite there, which is why this root is not
        # reachable by bisection to the requested tolerance.
        return 1.0

    def sup_char_sum(self):
        return 1.0

    def max_multiplicity(self):
        return math.inf

    def tail_convergent_at(self, z):
        # sum j d_j z^j behaves like sum j^(-1/2) (2z)^j: divergent at z = 1/2.
        return z < 0.5

    def weighted_tail_after(self, level, z):
        if not self.tail_convergent_at(z):
            raise DivergentTailError("balanced-word tail diverges at z >= 1/2")
        # d_j <= 2 * 4^(j/2 - 1) = 2^(j-1), so bound the remainder by the
        # geometric-derivative tail of r = 2z < 1, halved.
        r = 2.0 * z
        terms = []
        j = level
        while True:
            j += 1
            bound = 0.5 * _geom_weighted_tail(r, j - 1)
            if bound <= 0.5 * _TAIL_TOL:
                break
            d = self.multiplicity(j)
            if d:
                terms.append(j * d * z ** j)
        return math.fsum(terms)


class CustomProfileFamily(ProfileFamily):
    """Explicit multiplicity prefix with a zero or repeating tail.

    `prefix` lists d_1..d_J.  With tail "zero" the alphabet ends at level J;
    with tail "repeat" every level past J repeats d_J.  An optional dominator
    (rho, A) asserts d_j <= A * rho^j and is validated against the declared
    coefficients.
    """

    name = "profile"

    def __init__(self, prefix, tail="zero", dominator=None):
        prefix = tuple(int(d) for d in prefix)
        if not prefix or any(d < 0 for d in prefix):
            raise CostSpecError("profile prefix must be nonempty with d_j >= 0")
        if tail not in ("zero", "repeat"):
            raise CostSpecError(f"unknown profile tail rule {tail!r}")
        if tail == "zero" and sum(prefix) < 2:
            raise CostSpecError("profile must supply at least 2 letters")
        if tail == "repeat" and sum(prefix) < 1:
            raise CostSpecError("repeating profile needs a positive coefficient")
        self.prefix = prefix
        self.tail = tail
        self.dominator = None
        if dominator is not None:
            rho, amp = float(dominator[0]), float(dominator[1])
            if rho <= 0.0 or amp <= 0.0:
                raise CostSpecError("dominator parameters must be positive")
            for j, d in enumerate(prefix, start=1):
                if d > amp * rho ** j + 1e-9:
                    raise CostSpecError(
                        f"dominator violated at level {j}: d_j={d} > A*rho^j"
                    )
            if tail == "repeat" and prefix[-1] > 0:
                j1 = len(prefix) + 1
                if rho < 1.0 or prefix[-1] > amp * rho ** j1 + 1e-9:
                    raise CostSpecError("dominator violated by the repeating tail")
            self.dominator = (rho, amp)

    def multiplicity(self, j):
        if j <= len(self.prefix):
            return self.prefix[j - 1]
        return self.prefix[-1] if self.tail == "repeat" else 0

    def char_sum_z(self, z):
        base = math.fsum(d * z ** j for j, d in enumerate(self.prefix, start=1))
        if self.tail == "zero" or self.prefix[-1] == 0:
            return base
        if z >= 1.0:
            return math.inf
        J = len(self.prefix)
        return base + self.prefix[-1] * z ** (J + 1) / (1.0 - z)

    def sup_char_sum(self):
        if self.tail == "repeat" and self.prefix[-1] > 0:
            return math.inf
        return float(sum(self.prefix))

    def total_letters(self):
        if self.tail == "repeat" and self.prefix[-1] > 0:
            return math.inf
        return float(sum(self.prefix))

    def max_multiplicity(self):
        return float(max(self.prefix))

    def tail_convergent_at(self, z):
        if self.tail == "zero" or self.prefix[-1] == 0:
            return True
        return z < 1.0

    def weighted_tail_after(self, level, z):
        if not self.tail_convergent_at(z):
            raise DivergentTailError("repeating profile tail diverges at z >= 1")
        J = len(self.prefix)
        head = math.fsum(
            j * self.prefix[j - 1] * z ** j
            for j in range(level + 1, J + 1)
        )
        if self.tail == "zero" or self.prefix[-1] == 0:
            return head
        return head + self.prefix[-1] * _geom_weighted_tail(z, max(level, J))


# ---------------------------------------------------------------------------
# cost specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CostSpec:
    """A letter-cost alphabet: explicit cost list or integer-cost profile.

    Exactly one of `costs` (nondecreasing positive floats) and `family` is set.
    `label` is a short display form, normally the DSL string that produced it.
    """

    costs: tuple[float, ...] | None = None
    family: ProfileFamily | None = None
    label: str = ""

    def __post_init__(self):
        if (self.costs is None) == (self.family is None):
            raise CostSpecError("spec needs exactly one of costs/family")
        if self.costs is not None:
            if len(self.costs) < 2:
                raise CostSpecError("finite alphabet needs at least 2 letters")
            if any(not (c > 0.0) or not math.isfinite(c) for c in self.costs):
                raise CostSpecError("letter costs must be positive and finite")
            if any(a > b for a, b in zip(self.costs, self.costs[1:])):
                raise CostSpecError("letter costs must be nondecreasing")

    # -- basic shape ----------------------------------------------------

    @property
    def kind(self) -> str:
        return FINITE_LIST if self.costs is not None else INTEGER_PROFILE

    @property
    def alphabet_size(self) -> float:
        """Number of letters t; math.inf for infinite alphabets."""
        if self.costs is not None:
            return len(self.costs)
        return self.family.total_letters()

    @property
    def is_finite_alphabet(self) -> bool:
        return self.alphabet_size != math.inf

    def letter_cost(self, m: int) -> float:
        """Cost of the m-th cheapest letter, 1-based."""
        if m < 1:
            raise CostSpecError("letter index must be >= 1")
        if self.costs is not None:
            if m > len(self.costs):
                raise CostSpecError("letter index beyond alphabet")
            return self.costs[m - 1]
        seen = 0
        j = 0
        while True:
            j += 1
            if j > 10 ** 7:
                raise CostSpecError("letter index beyond alphabet")
            seen += self.family.multiplicity(j)
            if seen >= m:
                return float(j)

    @property
    def max_cost(self) -> float:
        """c_t for finite alphabets; math.inf otherwise."""
        if self.costs is not None:
            return self.costs[-1]
        if not self.is_finite_alphabet:
            return math.inf
        top = 0
        j = 0
        remaining = self.alphabet_size
        seen = 0
        while seen < remaining:
            j += 1
            d = self.family.multiplicity(j)
            if d:
                seen += d
                top = j
        return float(top)

    @property
    def integer_costs(self) -> bool:
        if self.family is not None:
            return True
        return all(abs(c - round(c)) <= INTEGER_SNAP for c in self.costs)

    # -- characteristic sum and profile views ---------------------------

    def char_sum(self, c: float) -> float:
        """S(c) = sum_i 2^(-c*c_i); math.inf where the series diverges."""
        if self.costs is not None:
            return math.fsum(2.0 ** (-c * ci) for ci in self.costs)
        return self.family.char_sum_z(2.0 ** (-c))

    def d_profile(self, up_to: int) -> tuple[int, ...]:
        """Multiplicities d_1..d_up_to; d_j counts costs in [j, j+1)."""
        if up_to < 1:
            raise CostSpecError("profile length must be >= 1")
        if self.family is not None:
            return tuple(self.family.multiplicity(j) for j in range(1, up_to + 1))
        out = [0] * up_to
        for c in self.costs:
            snapped = round(c) if abs(c - round(c)) <= INTEGER_SNAP else c
            j = int(math.floor(snapped))
            if 1 <= j <= up_to:
                out[j - 1] += 1
        return tuple(out)

    def max_multiplicity(self) -> float:
        """K = max_j d_j (math.inf for unbounded profiles)."""
        if self.family is not None:
            return self.family.max_multiplicity()
        top = int(self.max_cost) + 1
        return float(max(self.d_profile(top)))

    def count_at_most(self, threshold: float) -> int:
        """Number of letters with cost <= threshold (finite for convergent specs)."""
        if self.costs is not None:
            return sum(1 for c in self.costs if c <= threshold + 1e-12)
        n = 0
        j = 1
        while j <= threshold + 1e-12:
            n += self.family.multiplicity(j)
            j += 1
        return n

    # -- normalization --------------------------------------------------

    @property
    def is_normalized(self) -> bool:
        if self.costs is None:
            return True
        return abs(self.costs[0] - 1.0) <= 1e-12

    def normalize(self) -> "CostSpec":
        """Rescale a finite list so the cheapest letter costs exactly 1.

        Integer-cost profiles are already in canonical units and pass through
        unchanged (their cheapest letter may legitimately cost more than 1).
        """
        if self.costs is None or self.is_normalized:
            return self
        c1 = self.costs[0]
        scaled = tuple(c / c1 for c in self.costs)
        return CostSpec(costs=scaled, family=None, label=self.label)


# -- constructors -------------------------------------------------------

def finite_list(costs, label="") -> CostSpec:
    """Finite alphabet from an iterable of positive costs (sorted on entry)."""
    tup = tuple(sorted(float(c) for c in costs))
    if not label:
        label = "finite:" + ",".join(_fmt(c) for c in tup)
    return CostSpec(costs=tup, family=None, label=label)


def linear() -> CostSpec:
    return CostSpec(family=LinearFamily(), label="linear")


def repeat(d: int) -> CostSpec:
    return CostSpec(family=RepeatFamily(d), label=f"repeat:{int(d)}")


def fibonacci() -> CostSpec:
    return CostSpec(family=FibonacciFamily(), label="fib")


def balanced_words() -> CostSpec:
    return CostSpec(family=BalancedWordsFamily(), label="balanced")


def telegraph() -> CostSpec:
    return finite_list((1.0, 2.0), label="telegraph")


def custom_profile(prefix, tail="zero", dominator=None, label="") -> CostSpec:
    fam = CustomProfileFamily(prefix, tail=tail, dominator=dominator)
    if not label:
        label = "profile:" + ",".join(str(d) for d in fam.prefix)
    return CostSpec(family=fam, label=label)


def _fmt(x: float) -> str:
    return f"{x:g}"


def word_count_profile(nonterminal_costs, terminal_costs, up_to: int) -> tuple[int, ...]:
    """Multiplicities of the alphabet whose letters are words N* T.

    Counts, for each total cost j = 1..up_to, the words made of any sequence
    of "nonterminal" letters followed by exactly one "terminal" letter, with
    integer letter costs.  This is how structured infinite alphabets (one-ended
    codes, run-length constraints) reduce to an integer-cost profile.
    """
    nts = [int(c) for c in nonterminal_costs]
    ts = [int(c) for c in terminal_costs]
    if any(c < 1 for c in nts + ts):
        raise CostSpecError("letter costs must be positive integers")
    ways = [0] * (up_to + 1)
    ways[0] = 1
    for j in range(1, up_to + 1):
        ways[j] = sum(ways[j - c] for c in nts if c <= j)
    out = []
    for j in range(1, up_to + 1):
        out.append(sum(ways[j - c] for c in ts if c <= j))
    return tuple(out)


# ---------------------------------------------------------------------------
# DSL
# ---------------------------------------------------------------------------

def parse_cost_spec(text: str) -> CostSpec:
    """Parse the cost DSL used by the CLI.

    Grammar:
        finite:c1,c2,...      explicit costs (normalized so min cost = 1)
        rll:a,b               costs a, a+1, ..., b, then normalized
        telegraph             shorthand for finite:1,2
        linear                one letter of each integer cost
        repeat:d              d letters of each integer cost
        fib                   Fibonacci multiplicities
        balanced              balanced-word multiplicities
        profile:d1,d2,...[;dominator=rho,A][;tail=zero|repeat]
    """
    s = text.strip()
    if not s:
        raise CostSpecError("empty cost spec")
    head, sep, rest = s.partition(":")
    head = head.strip().lower()

    if head == "finite":
        values = _parse_floats(rest, "finite")
        if len(values) < 2:
            raise CostSpecError("finite spec needs at least 2 costs")
        if any(v <= 0 for v in values):
            raise CostSpecError("finite costs must be positive")
        return finite_list(values, label=s).normalize()

    if head == "rll":
        parts = _parse_floats(rest, "rll")
        if len(parts) != 2:
            raise CostSpecError("rll takes two integers: rll:a,b")
        a, b = (int(p) for p in parts)
        if a < 1 or b < a + 1:
            raise CostSpecError("rll needs 1 <= a < b")
        return finite_list(range(a, b + 1), label=s).normalize()

    if head == "telegraph":
        if sep:
            raise CostSpecError("telegraph takes no parameters")
        return telegraph()

    if head == "linear":
        if sep:
            raise CostSpecError("linear takes no parameters")
        return linear()

    if head == "fib":
        if sep:
            raise CostSpecError("fib takes no parameters")
        return fibonacci()

    if head == "balanced":
        if sep:
            raise CostSpecError("balanced takes no parameters")
        return balanced_words()

    if head == "repeat":
        parts = _parse_floats(rest, "repeat")
        if len(parts) != 1 or parts[0] != int(parts[0]):
            raise CostSpecError("repeat takes one integer: repeat:d")
        return repeat(int(parts[0]))

    if head == "profile":
        pieces = [p.strip() for p in rest.split(";") if p.strip()]
        if not pieces:
            raise CostSpecError("profile needs coefficients")
        coeffs = _parse_floats(pieces[0], "profile")
        if any(v != int(v) or v < 0 for v in coeffs):
            raise CostSpecError("profile coefficients must be integers >= 0")
        tail = "zero"
        dominator = None
        for opt in pieces[1:]:
            key, eq, val = opt.partition("=")
            key = key.strip().lower()
            if key == "dominator":
                dv = _parse_floats(val, "dominator")
                if len(dv) != 2:
                    raise CostSpecError("dominator takes two numbers: rho,A")
                dominator = (dv[0], dv[1])
            elif key == "tail":
                tail = val.strip().lower()
            else:
                raise CostSpecError(f"unknown profile option {key!r}")
        return custom_profile(
            [int(v) for v in coeffs], tail=tail, dominator=dominator, label=s
        )

    raise CostSpecError(f"unknown cost spec {text!r}")


def _parse_floats(text: str, what: str) -> list[float]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            raise CostSpecError(f"malformed {what} parameter list {text!r}")
        try:
            out.append(float(piece))
        except ValueError as exc:
            raise CostSpecError(f"bad number {piece!r} in {what} spec") from exc
    return out


# ---------------------------------------------------------------------------
# characteristic root
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharRoot:
    """Characteristic root c with its certificate.

    `tolerance` bounds |value - true root|; `residual` is the measured
    |S(value) - 1|.  `beta` and `tail_convergent` are evaluated at the root so
    downstream bound formulas need no second pass over the alphabet.
    """

    value: float
    tolerance: float
    residual: float
    beta: float
    tail_convergent: bool


def char_root(spec: CostSpec, tol: float = _DEFAULT_ROOT_TOL) -> CharRoot:
    """Solve 1 = sum_i 2^(-c*c_i) for c > 0.

    Built-in profile families use exact algebraic roots; finite lists and
    custom profiles use doubling to bracket the decreasing characteristic sum
    followed by bisection to `tol`.
    """
    if tol <= 0.0:
        raise CostSpecError("tolerance must be positive")
    if not spec.is_normalized:
        raise CostSpecError("normalize the spec first (cheapest letter must cost 1)")

    closed = spec.family.closed_root() if spec.family is not None else None
    if closed is not None:
        value = closed
        tolerance = 1e-15
    else:
        if spec.family is not None and spec.family.sup_char_sum() < 1.0:
            raise NoRootError(
                "characteristic sum stays below 1 over its convergence region"
            )
        lo = 0.0
        hi = 1.0
        doublings = 0
        while spec.char_sum(hi) >= 1.0:
            lo = hi
            hi *= 2.0
            doublings += 1
            if doublings > 60:
                raise DivergentSpecError("could not bracket the characteristic root")
        for _ in range(200):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if spec.char_sum(mid) >= 1.0:
                lo = mid
            else:
                hi = mid
        value = 0.5 * (lo + hi)
        tolerance = 0.5 * (hi - lo)

    residual = abs(spec.char_sum(value) - 1.0)
    z = 2.0 ** (-value)
    if spec.is_finite_alphabet:
        tail_ok = True
    else:
        tail_ok = spec.family.tail_convergent_at(z)
    beta = _beta_value(spec, value)
    return CharRoot(
        value=value,
        tolerance=tolerance,
        residual=residual,
        beta=beta,
        tail_convergent=tail_ok,
    )


def _beta_value(spec: CostSpec, c: float) -> float:
    """beta = sup_m 2^(c*c_m) * sum_{i>=m} 2^(-c*c_i)."""
    if spec.costs is not None:
        best = 0.0
        suffix = 0.0
        for ci in reversed(spec.costs):
            suffix += 2.0 ** (-c * ci)
            val = 2.0 ** (c * ci) * suffix
            if val > best:
                best = val
        return best
    fam = spec.family
    z = 2.0 ** (-c)
    if spec.is_finite_alphabet:
        # Within a level the supremand is largest at the level's first letter,
        # so scanning occupied levels suffices.
        top = int(spec.max_cost)
        weights = [fam.multiplicity(j) * z ** j for j in range(1, top + 1)]
        best = 0.0
        suffix = 0.0
        for j in range(top, 0, -1):
            suffix += weights[j - 1]
            if fam.multiplicity(j):
                val = suffix / z ** j
                if val > best:
                    best = val
        return best
    K = fam.max_multiplicity()
    if K == math.inf:
        return math.inf
    if isinstance(fam, CustomProfileFamily):
        # The supremand at the first letter of level j is W_j / z^j with
        # W_j = sum_{l >= j} d_l z^l; past the prefix the ratio is constant,
        # so a backward scan over the prefix finds the exact supremum.
        J = len(fam.prefix)
        rep = fam.prefix[-1]
        best = rep / (1.0 - z)
        W = rep * z ** (J + 1) / (1.0 - z)
        for j in range(J, 0, -1):
            W += fam.prefix[j - 1] * z ** j
            if fam.prefix[j - 1]:
                best = max(best, W / z ** j)
        return best
    # d_j = K at infinitely many levels for the built-in families, where
    # this is the exact supremum (attained in the limit).
    return K / (1.0 - z)


def beta_of(spec: CostSpec, root: CharRoot | float) -> float:
    """beta for a spec at its characteristic root (math.inf when unbounded)."""
    c = root.value if isinstance(root, CharRoot) else float(root)
    return _beta_value(spec, c)


def d_profile_of(spec: CostSpec, up_to: int) -> tuple[int, ...]:
    """Multiplicities d_1..d_up_to of a spec (see CostSpec.d_profile)."""
    return spec.d_profile(up_to)


def tail_sum_g(spec: CostSpec, root: CharRoot | float, from_index: int) -> float:
    """g(x) = sum_{m >= x} c_m * 2^(-c*c_m), certified to 1e-12.

    Finite alphabets sum exactly (0 past the last letter).  Infinite profiles
    split the sum at the level of letter x: the remainder of that level in
    closed count form plus the family's certified tail of later levels.
    Raises DivergentTailError when the series does not converge at the root.
    """
    if from_index < 1:
        raise CostSpecError("tail index must be >= 1")
    c = root.value if isinstance(root, CharRoot) else float(root)
    z = 2.0 ** (-c)
    if spec.costs is not None:
        return math.fsum(
            ci * 2.0 ** (-c * ci) for ci in spec.costs[from_index - 1:]
        )
    fam = spec.family
    if spec.is_finite_alphabet:
        t = int(spec.alphabet_size)
        if from_index > t:
            return 0.0
        terms = []
        seen = 0
        j = 0
        while seen < t:
            j += 1
            d = fam.multiplicity(j)
            if not d:
                continue
            lo = seen + 1
            seen += d
            count = seen - max(lo, from_index) + 1
            if count > 0:
                terms.append(count * j * z ** j)
        return math.fsum(terms)
    if not fam.tail_convergent_at(z):
        raise DivergentTailError("cost-weighted tail diverges at the root")
    seen = 0
    j = 0
    while True:
        j += 1
        d = fam.multiplicity(j)
        seen += d
        if seen >= from_index:
            break
    remainder_in_level = seen - from_index + 1
    return remainder_in_level * j * z ** j + fam.weighted_tail_after(j, z)


# ---------------------------------------------------------------------------
# letter table used by the code builder
# ---------------------------------------------------------------------------

class LetterTable:
    """Letter costs and cumulative bin weights at a fixed root.

    costs[m] is c_m (1-based; costs[0] unused) and cum[m] is
    sum_{i<=m} 2^(-c*c_i), the right boundary of bin m as a fraction of the
    parent interval.  Profile tables grow lazily as the builder asks for
    deeper bins.
    """

    def __init__(self, spec: CostSpec, c: float):
        self.spec = spec
        self.c = c
        self.costs = [0.0]
        self.cum = [0.0]
        self._level = 0
        self._left = 0
        if spec.costs is not None:
            acc = 0.0
            for ci in spec.costs:
                acc += 2.0 ** (-c * ci)
                self.costs.append(ci)
                self.cum.append(acc)

    def ensure(self, m: int) -> None:
        """Extend the table so letter m is materialized."""
        costs = self.costs
        cum = self.cum
        if len(costs) > m:
            return
        spec = self.spec
        if spec.costs is not None:
            raise CostSpecError("letter index beyond alphabet")
        fam = spec.family
        total = fam.total_letters()
        while len(costs) <= m:
            while self._left == 0:
                self._level += 1
                if self._level > 10 ** 7 or len(costs) - 1 >= total:
                    raise CostSpecError("letter index beyond alphabet")
                self._left = fam.multiplicity(self._level)
            w = 2.0 ** (-self.c * self._level)
            batch = min(self._left, m + 1 - len(costs))
            base = cum[-1]
            for i in range(1, batch + 1):
                costs.append(float(self._level))
                cum.append(base + i * w)
            self._left -= batch
