"""Somos-k sequences, their transformation group, and the quartic condition.

A Somos-k sequence satisfies a(n) * a(n+k) = sum_{i=1}^{floor(k/2)}
a(n+i) * a(n+k-i) for all n.  Terms are exact rationals; symbolic sequences
carry each term as a reduced rational function of the k initial values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import Polynomial, RationalFunction, ring

MIN_ORDER = 2
MAX_ORDER = 7

DEFAULT_TERM_BUDGET = 200_000


class SomosError(Exception):
    pass


class BlockedError(SomosError):
    """Extension hit a zero pivot; the recurrence cannot cross it."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"blocked at index {index}: {reason}")


class BudgetExceededError(SomosError):
    """A symbolic term outgrew the configured expression-size budget."""


class RuleViolationError(SomosError):
    """A stored window fails the Somos rule; carries the first bad window."""

    def __init__(self, index: int, window: tuple):
        self.index = index
        self.window = window
        super().__init__(f"rule violated on window starting at {index}: {window}")


class SomosRule:
    """The order-k recurrence with right-hand side sum a(n+i)*a(n+k-i)."""

    __slots__ = ("k", "pairs")

    def __init__(self, k: int):
        if not MIN_ORDER <= k <= MAX_ORDER:
            raise ValueError(f"order must be in {MIN_ORDER}..{MAX_ORDER}, got {k}")
        self.k = k
        self.pairs = tuple((i, k - i) for i in range(1, k // 2 + 1))

    def rhs(self, term):
        """Sum of a(n+i)*a(n+k-i) with terms supplied by index offset."""
        total = None
        for i, j in self.pairs:
            prod = term(i) * term(j)
            total = prod if total is None else total + prod
        return total

    def __eq__(self, other):
        return isinstance(other, SomosRule) and self.k == other.k

    def __repr__(self):
        body = " + ".join(
            f"a(n+{i})^2" if i == j else f"a(n+{i})*a(n+{j})" for i, j in self.pairs
        )
        return f"SomosRule(a(n)*a(n+{self.k}) = {body})"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"sequence entries must be exact rationals, got {type(x).__name__}")


class SomosSequence:
    """Two-sided store of exact terms, extended on demand by the recurrence.

    Extension past a vanishing pivot raises BlockedError and the boundary is
    remembered; it is never skipped.  Instances are not thread-safe while
    being extended.
    """

    def __init__(self, rule: SomosRule, terms: Mapping[int, Fraction]):
        self.rule = rule
        if len(terms) < rule.k:
            raise ValueError(f"need at least {rule.k} initial terms")
        idx = sorted(terms)
        if idx != list(range(idx[0], idx[0] + len(idx))):
            raise ValueError("initial terms must occupy consecutive indices")
        self.terms: dict[int, Fraction] = {n: _as_fraction(v) for n, v in terms.items()}
        self.lo = idx[0]
        self.hi = idx[-1]
        self.blocked_above: int | None = None
        self.blocked_below: int | None = None
        self._check_initial_windows()

    @classmethod
    def from_window(cls, k: int, values: Sequence, start: int = 0) -> "SomosSequence":
        if len(values) != k:
            raise ValueError(f"seed window must have exactly {k} entries")
        return cls(SomosRule(k), {start + i: v for i, v in enumerate(values)})

    def _check_initial_windows(self) -> None:
        k = self.rule.k
        for n in range(self.lo, self.hi - k + 1):
            lhs = self.terms[n] * self.terms[n + k]
            rhs = self.rule.rhs(lambda i, n=n: self.terms[n + i])
            if lhs != rhs:
                raise RuleViolationError(n, self.window(n, k + 1))

    def window(self, start: int, length: int | None = None) -> tuple[Fraction, ...]:
        length = self.rule.k if length is None else length
        return tuple(self.term(start + i) for i in range(length))

    def term(self, n: int) -> Fraction:
        k = self.rule.k
        while n > self.hi:
            m = self.hi + 1
            if self.blocked_above is not None:
                raise BlockedError(self.blocked_above, "zero pivot above")
            pivot = self.terms[m - k]
            if pivot == 0:
                self.blocked_above = m
                raise BlockedError(m, f"pivot a({m - k}) is zero")
            value = self.rule.rhs(lambda i: self.terms[m - k + i]) / pivot
            self.terms[m] = value
            self.hi = m
        while n < self.lo:
            m = self.lo - 1
            if self.blocked_below is not None:
                raise BlockedError(self.blocked_below, "zero pivot below")
            pivot = self.terms[m + k]
            if pivot == 0:
                self.blocked_below = m
                raise BlockedError(m, f"pivot a({m + k}) is zero")
            value = self.rule.rhs(lambda i: self.terms[m + i]) / pivot
            self.terms[m] = value
            self.lo = m
        return self.terms[n]

    def try_term(self, n: int) -> Fraction | None:
        try:
            return self.term(n)
        except BlockedError:
            return None

    def extend_to(self, lo: int, hi: int) -> None:
        self.term(hi)
        self.term(lo)

    def is_integral(self, n: int) -> bool:
        return self.term(n).denominator == 1

    def known_items(self) -> list[tuple[int, Fraction]]:
        return sorted(self.terms.items())

    def __repr__(self):
        return f"SomosSequence(k={self.rule.k}, known=[{self.lo}..{self.hi}])"


class SymbolicSequence:
    """Somos-k terms as reduced rational functions of a0..a_{k-1}.

    The numerator term count of every computed value is capped by
    ``max_terms``; exceeding it raises BudgetExceededError rather than
    truncating.
    """

    def __init__(self, k: int, max_terms: int = DEFAULT_TERM_BUDGET):
        self.rule = SomosRule(k)
        self.max_terms = max_terms
        self.vars = tuple(f"a{i}" for i in range(k))
        gens = ring(self.vars)
        one = Polynomial.constant(self.vars, 1)
        self.terms: dict[int, RationalFunction] = {
            i: RationalFunction(gens[i], one) for i in range(k)
        }
        self._lo = 0
        self._hi = k - 1

    @property
    def k(self) -> int:
        return self.rule.k

    def term(self, n: int) -> RationalFunction:
        k = self.rule.k
        while n > self._hi:
            m = self._hi + 1
            value = self.rule.rhs(lambda i: self.terms[m - k + i]) / self.terms[m - k]
            self._admit(m, value)
        while n < self._lo:
            m = self._lo - 1
            value = self.rule.rhs(lambda i: self.terms[m + i]) / self.terms[m + k]
            self._admit(m, value)
        return self.terms[n]

    def _admit(self, m: int, value: RationalFunction) -> None:
        size = len(value.numerator.terms) + len(value.denominator.terms)
        if size > self.max_terms:
            raise BudgetExceededError(
                f"term at index {m} has {size} monomials, budget is {self.max_terms}"
            )
        self.terms[m] = value
        self._lo = min(self._lo, m)
        self._hi = max(self._hi, m)


def symbolic_term(k: int, n: int, max_terms: int = DEFAULT_TERM_BUDGET) -> RationalFunction:
    """The reduced rational function for a(n) in the initial values a0..a_{k-1}."""
    return SymbolicSequence(k, max_terms).term(n)


def check_laurent(k: int, lo: int, hi: int,
                  max_terms: int = DEFAULT_TERM_BUDGET) -> dict[int, bool]:
    """Monomial-denominator verdict for each index in [lo, hi]."""
    seq = SymbolicSequence(k, max_terms)
    return {n: seq.term(n).monomial_denominator() for n in range(lo, hi + 1)}


# ----------------------------------------------------------------------
# The transformation group on sequences


@dataclass(frozen=True)
class TransformSpec:
    """Normal form M(b,c) . F^shift . R^reflect acting on sequences.

    M(b,c) rescales a(n) by b*c^n, F shifts the index by one, R reflects.
    Applied to a sequence s:  t(s)(n) = b * c^n * s(sigma * (n + shift)),
    sigma = -1 when reflect is set.
    """

    b: Fraction = Fraction(1)
    c: Fraction = Fraction(1)
    shift: int = 0
    reflect: bool = False

    def __post_init__(self):
        object.__setattr__(self, "b", _as_fraction(self.b))
        object.__setattr__(self, "c", _as_fraction(self.c))
        if self.b == 0 or self.c == 0:
            raise ValueError("scaling parameters must be nonzero")

    @classmethod
    def scaling(cls, b, c) -> "TransformSpec":
        return cls(b=_as_fraction(b), c=_as_fraction(c))

    @classmethod
    def shift_by(cls, m: int) -> "TransformSpec":
        return cls(shift=m)

    @classmethod
    def reflection(cls) -> "TransformSpec":
        return cls(reflect=True)

    @property
    def is_identity(self) -> bool:
        return self.b == 1 and self.c == 1 and self.shift == 0 and not self.reflect

    def source_index(self, n: int) -> int:
        m = n + self.shift
        return -m if self.reflect else m

    def scale_at(self, n: int) -> Fraction:
        return self.b * self.c ** n

    def compose(self, first: "TransformSpec") -> "TransformSpec":
        """Normal form of self . first (apply ``first``, then ``self``)."""
        sigma = -1 if self.reflect else 1
        c1 = first.c if sigma == 1 else 1 / first.c
        return TransformSpec(
            b=self.b * first.b * c1 ** self.shift,
            c=self.c * c1,
            shift=self.shift + sigma * first.shift,
            reflect=self.reflect ^ first.reflect,
        )

    def inverse(self) -> "TransformSpec":
        # solve compose(self, inv) = identity
        sigma = -1 if self.reflect else 1
        c_inv = (1 / self.c) if sigma == 1 else self.c
        shift_inv = -sigma * self.shift
        b_inv = 1 / (self.b * (self.c if sigma == 1 else 1 / self.c) ** shift_inv)
        return TransformSpec(b=b_inv, c=c_inv, shift=shift_inv, reflect=self.reflect)


def transform_sequence(seq, t: TransformSpec):
    """Apply a group element; the result satisfies the same Somos rule."""
    if isinstance(seq, SomosSequence):
        out: dict[int, Fraction] = {}
        for n_src, v in seq.known_items():
            # n_src = sigma*(n + shift)  =>  n = sigma*n_src - shift
            n = (-n_src if t.reflect else n_src) - t.shift
            out[n] = t.scale_at(n) * v
        return SomosSequence(seq.rule, out)
    if isinstance(seq, SymbolicSequence):
        result = SymbolicSequence(seq.k, seq.max_terms)
        result.terms = {}
        indices = sorted(seq.terms)
        for n_src in indices:
            n = (-n_src if t.reflect else n_src) - t.shift
            result.terms[n] = seq.terms[n_src] * t.scale_at(n)
        result._lo = min(result.terms)
        result._hi = max(result.terms)
        return result
    raise TypeError(f"cannot transform {type(seq).__name__}")


# ----------------------------------------------------------------------
# The quartic condition for even/odd Somos-4 subsequences


def quartic_condition_poly(vars: Sequence[str] = ("a0", "a1", "a2", "a3"),
                           offset: int = 0) -> Polynomial:
    """The window quartic w0^2*w3^2 + w1^2*w2^2 + w0*w2^3 + w3*w1^3 + 2*w0*w1*w2*w3
    over variables a{offset}..a{offset+3} inside the given variable list."""
    vs = tuple(vars)
    g = {name: Polynomial.variable(vs, name) for name in vs}
    w = [g[f"a{offset + i}"] for i in range(4)]
    return (w[0] ** 2 * w[3] ** 2 + w[1] ** 2 * w[2] ** 2
            + w[0] * w[2] ** 3 + w[3] * w[1] ** 3
            + 2 * w[0] * w[1] * w[2] * w[3])


def eval_S(window: Sequence) -> Fraction:
    """Exact value of the quartic condition on a 4-term window."""
    w = [_as_fraction(x) for x in window]
    if len(w) != 4:
        raise ValueError("the quartic condition takes a window of 4 terms")
    return (w[0] ** 2 * w[3] ** 2 + w[1] ** 2 * w[2] ** 2
            + w[0] * w[2] ** 3 + w[3] * w[1] ** 3
            + 2 * w[0] * w[1] * w[2] * w[3])


@dataclass(frozen=True)
class PropagationReport:
    propagation_ok: bool
    even_factor_ok: bool
    odd_factor_ok: bool
    residual: str | None

    @property
    def verified(self) -> bool:
        return self.propagation_ok and self.even_factor_ok and self.odd_factor_ok


def verify_S_propagation(S: Polynomial | None = None,
                         max_terms: int = DEFAULT_TERM_BUDGET) -> PropagationReport:
    """Check the propagation identity and the 8-step factor property.

    Propagation: with a4 expressed through the recurrence, the shifted window
    quartic times a0^2 equals S * (a1*a3 + a2^2).  Factor property: S divides
    the cleared numerators of a0*a8 - a2*a6 - a4^2 and a1*a9 - a3*a7 - a5^2.
    Passing a custom S exercises the refutation path.
    """
    vars5 = ("a0", "a1", "a2", "a3", "a4")
    a0, a1, a2, a3, a4 = ring(vars5)
    S0 = quartic_condition_poly(vars5) if S is None else S.with_vars(vars5)
    S1 = quartic_condition_poly(vars5, offset=1)
    shifted = S1.substitute({"a4": RationalFunction(a1 * a3 + a2 ** 2, a0)})
    lhs = shifted * (a0 ** 2)
    rhs = S0 * (a1 * a3 + a2 ** 2)
    diff = lhs - RationalFunction(rhs)
    propagation_ok = diff.is_zero

    seq = SymbolicSequence(4, max_terms)
    S4 = S0.with_vars(seq.vars)
    even = seq.term(0) * seq.term(8) - seq.term(2) * seq.term(6) - seq.term(4) ** 2
    odd = seq.term(1) * seq.term(9) - seq.term(3) * seq.term(7) - seq.term(5) ** 2
    even_ok = even.numerator.try_divexact(S4) is not None
    odd_ok = odd.numerator.try_divexact(S4) is not None

    residual = None
    if not propagation_ok:
        residual = str(diff)
    elif not even_ok:
        residual = f"S does not divide {even.numerator.to_text()}"
    elif not odd_ok:
        residual = f"S does not divide {odd.numerator.to_text()}"
    return PropagationReport(propagation_ok, even_ok, odd_ok, residual)


def split_even_odd(seq: SomosSequence) -> tuple[SomosSequence, SomosSequence]:
    """Split a Somos-4 sequence into its even and odd index subsequences.

    Both parts are re-checked against the Somos-4 rule on every available
    window; the first violation is raised (this is how a window with S != 0
    is reported).
    """
    if seq.rule.k != 4:
        raise ValueError("even/odd splitting applies to Somos-4 sequences")
    items = seq.known_items()
    even = {n // 2: v for n, v in items if n % 2 == 0}
    odd = {(n - 1) // 2: v for n, v in items if n % 2 == 1}
    parts = []
    for sub in (even, odd):
        idx = sorted(sub)
        # keep the longest contiguous run containing the middle
        runs, cur = [], [idx[0]]
        for n in idx[1:]:
            if n == cur[-1] + 1:
                cur.append(n)
            else:
                runs.append(cur)
                cur = [n]
        runs.append(cur)
        run = max(runs, key=len)
        terms = {n: sub[n] for n in run}
        parts.append(SomosSequence(SomosRule(4), terms))
    return parts[0], parts[1]


# ----------------------------------------------------------------------
# Named integer sequences used throughout the verification suites


def seq_a006769() -> SomosSequence:
    """The two-sided integer Somos-4 sequence with S = 0, seeded (1,1,-1,1) at 1..4."""
    return SomosSequence.from_window(4, [1, 1, -1, 1], start=1)


def seq_a006720() -> SomosSequence:
    """The classical Somos-4 sequence from initial values 1,1,1,1."""
    return SomosSequence.from_window(4, [1, 1, 1, 1], start=0)


def seq_a051138(upto: int = 40) -> SomosSequence:
    """Even-index subsequence of the S = 0 sequence."""
    base = seq_a006769()
    base.extend_to(0, 2 * upto)
    even, _ = split_even_odd(base)
    return even


# ----------------------------------------------------------------------
# Divisibility


@dataclass(frozen=True)
class DivisibilityInstance:
    label: str
    divisor_index: int
    dividend_index: int
    divisor: int
    dividend: int
    status: str  # divides | fails | skipped

    @property
    def ok(self) -> bool:
        return self.status != "fails"


def _int_term(seq: SomosSequence, n: int) -> int:
    v = seq.term(n)
    if v.denominator != 1:
        raise SomosError(f"term a({n}) = {v} is not an integer")
    return v.numerator


def check_divisibility_relations(
    eds_n_max: int = 8,
    eds_k_max: int = 4,
    prog_n_range: Iterable[int] = range(2, 7),
    prog_k_range: Iterable[int] = range(1, 4),
) -> list[DivisibilityInstance]:
    """All divisibility instances at the requested desk-scale ranges.

    Covers: the strong divisibility a(n) | a(n*k) inside the S = 0 sequence;
    the arithmetic-progression relation inside the classical sequence; and the
    cross-sequence relation into the even subsequence.  Zero divisors are
    skipped, never silently passed.
    """
    out: list[DivisibilityInstance] = []
    s69 = seq_a006769()
    s20 = seq_a006720()
    s38 = seq_a051138(upto=max(30, (2 * max(prog_n_range) - 3) * max(prog_k_range) + 2))

    def record(label, seq_a, n, seq_b, m):
        d = _int_term(seq_a, n)
        v = _int_term(seq_b, m)
        if d == 0:
            status = "skipped"
        else:
            status = "divides" if v % d == 0 else "fails"
        out.append(DivisibilityInstance(label, n, m, d, v, status))

    for n in range(0, eds_n_max + 1):
        for k in range(1, eds_k_max + 1):
            record("A006769(n) | A006769(n*k)", s69, n, s69, n * k)
    for n in prog_n_range:
        for k in prog_k_range:
            record("A006720(n) | A006720(n+(2n-3)k)", s20, n, s20, n + (2 * n - 3) * k)
    for n in prog_n_range:
        for k in prog_k_range:
            record("A006720(n) | A051138((2n-3)k)", s20, n, s38, (2 * n - 3) * k)
    return out


# ----------------------------------------------------------------------
# Integer windows on the quartic


@dataclass(frozen=True)
class IntegerWindow:
    window: tuple[int, int, int, int]
    forward_integral: int   # how many of the requested forward steps stayed integral
    backward_integral: int
    forward_blocked: bool
    backward_blocked: bool


def _canonical_window(w: tuple[int, int, int, int]) -> tuple[int, int, int, int] | None:
    g = 0
    for x in w:
        g = math.gcd(g, abs(x))
    if g == 0:
        return None
    w = tuple(x // g for x in w)
    for x in w:
        if x > 0:
            return w
        if x < 0:
            return tuple(-y for y in w)
    return None  # pragma: no cover


def _extension_profile(window: tuple[int, int, int, int], steps: int) -> tuple[int, int, bool, bool]:
    seq = SomosSequence.from_window(4, list(window))
    fwd = bwd = 0
    fblocked = bblocked = False
    for i in range(steps):
        v = seq.try_term(4 + i)
        if v is None:
            fblocked = True
            break
        if v.denominator == 1:
            fwd += 1
        else:
            break
    for i in range(steps):
        v = seq.try_term(-1 - i)
        if v is None:
            bblocked = True
            break
        if v.denominator == 1:
            bwd += 1
        else:
            break
    return fwd, bwd, fblocked, bblocked


def search_integer_windows(height: int, extension: int = 4) -> list[IntegerWindow]:
    """All primitive integer windows with S = 0 and entries bounded by height.

    The quartic is quadratic in the last entry, so windows are enumerated by
    solving for it exactly; every hit is canonicalized up to sign and scale
    and annotated with how far the recurrence extends integrally.
    """
    if height < 0:
        raise ValueError("height bound must be non-negative")
    hits: set[tuple[int, int, int, int]] = set()
    rng = range(-height, height + 1)
    for w0 in rng:
        for w1 in rng:
            for w2 in rng:
                A = w0 * w0
                B = w1 ** 3 + 2 * w0 * w1 * w2
                C = w1 * w1 * w2 * w2 + w0 * w2 ** 3
                if A == 0:
                    if B == 0:
                        if C == 0:
                            for w3 in rng:
                                cand = _canonical_window((w0, w1, w2, w3))
                                if cand:
                                    hits.add(cand)
                        continue
                    num = -C
                    if num % B == 0 and abs(num // B) <= height:
                        cand = _canonical_window((w0, w1, w2, num // B))
                        if cand:
                            hits.add(cand)
                    continue
                disc = B * B - 4 * A * C
                if disc < 0:
                    continue
                root = math.isqrt(disc)
                if root * root != disc:
                    continue
                for sgn in (1, -1):
                    num = -B + sgn * root
                    if num % (2 * A) == 0 and abs(num // (2 * A)) <= height:
                        cand = _canonical_window((w0, w1, w2, num // (2 * A)))
                        if cand:
                            hits.add(cand)
    out = []
    for w in sorted(hits):
        if eval_S(w) != 0:  # pragma: no cover - enumeration is exact
            raise SomosError(f"window {w} failed the quartic recheck")
        fwd, bwd, fb, bb = _extension_profile(w, extension)
        out.append(IntegerWindow(w, fwd, bwd, fb, bb))
    return out
