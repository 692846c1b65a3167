"""Exact sparse multivariate polynomial and rational-function arithmetic.

Everything downstream (sequence terms, birational maps, curve identities)
reduces to arithmetic in Q[a0, ..., a_{n-1}, c, alpha, ...].  Coefficients are
exact rationals; no floating point anywhere.

Variables whose name matches ``a<digits>`` are *projective* coordinates; all
other names (``c``, ``alpha``, ``beta``, ``x1``, ``iota``, ...) are free
parameters.  Parameters take part in ring arithmetic like any variable but are
excluded from homogeneity and projective-degree accounting.

Internally a monomial is packed into a single int: 16-bit exponent fields in
variable order, with the total degree in the most significant field.  Packed
keys add under monomial multiplication and compare as graded-lex, which keeps
the hot loops (multiplication, division, term ordering) on machine ints.
Coefficients are stored as int where possible and Fraction otherwise; results
never expose the distinction.
"""

from __future__ import annotations

import heapq
import random
import re
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

Scalar = Union[int, Fraction]

_FIELD_BITS = 16
_FIELD_MASK = (1 << _FIELD_BITS) - 1
_MAX_EXPONENT = _FIELD_MASK

_PROJECTIVE_NAME = re.compile(r"^a\d+$")


class AlgebraError(Exception):
    """Base class for algebra failures."""


class VariableMismatchError(AlgebraError):
    """Two operands live over different variable lists."""


class NotDivisibleError(AlgebraError):
    """Exact division failed.

    Carries the first obstructing remainder term (a monomial/coefficient pair
    that the divisor's leading term cannot divide).
    """

    def __init__(self, monomial: "Monomial", coefficient: Fraction):
        self.monomial = monomial
        self.coefficient = coefficient
        super().__init__(f"not divisible, first obstruction: {coefficient} * {monomial}")


class NotHomogeneousError(AlgebraError):
    """The polynomial has projective parts of differing total degree."""


def is_projective_name(name: str) -> bool:
    return bool(_PROJECTIVE_NAME.match(name))


def _norm_scalar(c: Scalar) -> Scalar:
    """Collapse Fractions with unit denominator to int."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return c.numerator
        return c
    if isinstance(c, int):
        return c
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


def _pack(exponents: Sequence[int], nv: int) -> int:
    total = 0
    key = 0
    for i, e in enumerate(exponents):
        if e < 0 or e > _MAX_EXPONENT:
            raise ValueError(f"exponent out of range: {e}")
        total += e
        key |= e << (_FIELD_BITS * (nv - 1 - i))
    if total > _MAX_EXPONENT:
        raise ValueError(f"total degree out of range: {total}")
    return key | (total << (_FIELD_BITS * nv))


def _unpack(key: int, nv: int) -> tuple[int, ...]:
    return tuple((key >> (_FIELD_BITS * (nv - 1 - i))) & _FIELD_MASK for i in range(nv))


def _key_degree(key: int, nv: int) -> int:
    return key >> (_FIELD_BITS * nv)


def _key_divides(kq: int, k: int, nv: int) -> bool:
    """True iff the monomial of kq divides the monomial of k (field-wise <=)."""
    for i in range(nv + 1):
        shift = _FIELD_BITS * i
        if ((kq >> shift) & _FIELD_MASK) > ((k >> shift) & _FIELD_MASK):
            return False
    return True


class Monomial:
    """An exponent vector over a fixed variable list."""

    __slots__ = ("vars", "exponents")

    def __init__(self, vars: tuple[str, ...], exponents: Sequence[int]):
        if len(exponents) != len(vars):
            raise ValueError("exponent vector length must equal variable count")
        self.vars = vars
        self.exponents = tuple(exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Monomial)
            and self.vars == other.vars
            and self.exponents == other.exponents
        )

    def __hash__(self) -> int:
        return hash((self.vars, self.exponents))

    def __str__(self) -> str:
        parts = [f"{v}^{e}" for v, e in zip(self.vars, self.exponents) if e]
        return "*".join(parts) if parts else "1"

    def __repr__(self) -> str:
        return f"Monomial({self})"


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients.

    ``vars`` is the ordered variable list; ``terms`` maps packed exponent keys
    to nonzero coefficients.  Instances must never be mutated after
    construction — every operation returns a fresh polynomial, so values are
    safe to share across threads.
    """

    __slots__ = ("vars", "terms", "_nv")

    def __init__(self, vars: Sequence[str], terms: Mapping[Sequence[int], Scalar] | None = None):
        vs = tuple(vars)
        if len(set(vs)) != len(vs):
            raise ValueError("duplicate variable names")
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "_nv", len(vs))
        packed: dict[int, Scalar] = {}
        if terms:
            for exps, c in terms.items():
                c = _norm_scalar(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
                if c:
                    k = _pack(exps, self._nv)
                    acc = packed.get(k, 0) + c
                    if acc:
                        packed[k] = _norm_scalar(acc)
                    elif k in packed:
                        del packed[k]
        object.__setattr__(self, "terms", packed)

    def __setattr__(self, *a):  # pragma: no cover - guard rail
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, vars: tuple[str, ...], packed: dict[int, Scalar]) -> "Polynomial":
        p = object.__new__(cls)
        object.__setattr__(p, "vars", vars)
        object.__setattr__(p, "_nv", len(vars))
        object.__setattr__(p, "terms", packed)
        return p

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "Polynomial":
        return cls._raw(tuple(vars), {})

    @classmethod
    def constant(cls, vars: Sequence[str], value: Scalar) -> "Polynomial":
        value = _norm_scalar(Fraction(value) if not isinstance(value, (int, Fraction)) else value)
        if not value:
            return cls.zero(vars)
        return cls._raw(tuple(vars), {0: value})

    @classmethod
    def variable(cls, vars: Sequence[str], name: str) -> "Polynomial":
        vs = tuple(vars)
        i = vs.index(name)
        exps = [0] * len(vs)
        exps[i] = 1
        return cls._raw(vs, {_pack(exps, len(vs)): 1})

    # ------------------------------------------------------------------
    # Inspection

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise AlgebraError("polynomial is not constant")
        return Fraction(self.terms[0])

    def __len__(self) -> int:
        return len(self.terms)

    def total_degree(self) -> int:
        """Total degree over all variables; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return _key_degree(max(self.terms), self._nv)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        shift = _FIELD_BITS * (self._nv - 1 - i)
        if not self.terms:
            return -1
        return max((k >> shift) & _FIELD_MASK for k in self.terms)

    def monomials(self) -> Iterator[tuple[Monomial, Fraction]]:
        """Terms in descending graded-lex order."""
        for k in sorted(self.terms, reverse=True):
            yield Monomial(self.vars, _unpack(k, self._nv)), Fraction(self.terms[k])

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise AlgebraError("zero polynomial has no leading term")
        k = max(self.terms)
        return Monomial(self.vars, _unpack(k, self._nv)), Fraction(self.terms[k])

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        return Fraction(self.terms.get(_pack(exponents, self._nv), 0))

    def variables_used(self) -> tuple[str, ...]:
        used = [False] * self._nv
        for k in self.terms:
            for i in range(self._nv):
                if (k >> (_FIELD_BITS * (self._nv - 1 - i))) & _FIELD_MASK:
                    used[i] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    # ------------------------------------------------------------------
    # Ring arithmetic

    def _check_vars(self, other: "Polynomial") -> None:
        if self.vars != other.vars:
            raise VariableMismatchError(f"{self.vars} vs {other.vars}")

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            self._check_vars(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.vars, other)
        return None

    def __add__(self, other) -> "Polynomial":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        big, small = (self.terms, q.terms) if len(self.terms) >= len(q.terms) else (q.terms, self.terms)
        out = dict(big)
        for k, c in small.items():
            acc = out.get(k, 0) + c
            if acc:
                out[k] = _norm_scalar(acc)
            elif k in out:
                del out[k]
        return Polynomial._raw(self.vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.vars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        if not self.terms or not q.terms:
            return Polynomial.zero(self.vars)
        a, b = self.terms, q.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            ((kb, cb),) = b.items()
            if cb == 1:
                return Polynomial._raw(self.vars, {k + kb: c for k, c in a.items()})
            return Polynomial._raw(
                self.vars, {k + kb: _norm_scalar(c * cb) for k, c in a.items()}
            )
        out: dict[int, Scalar] = {}
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                acc = out.get(k, 0) + ca * cb
                if acc:
                    out[k] = acc
                elif k in out:
                    del out[k]
        for k, c in out.items():
            out[k] = _norm_scalar(c)
        return Polynomial._raw(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero scalar")
            inv = Fraction(1, 1) / other
            return Polynomial._raw(
                self.vars, {k: _norm_scalar(c * inv) for k, c in self.terms.items()}
            )
        if isinstance(other, Polynomial):
            return self.divexact(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.vars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    # ------------------------------------------------------------------
    # Division

    def divexact(self, q: "Polynomial") -> "Polynomial":
        """Exact division; raises NotDivisibleError with the first obstruction."""
        r = self.try_divexact(q)
        if r is None:
            self._raise_obstruction(q)
        return r

    def _raise_obstruction(self, q: "Polynomial"):
        # rerun the division just far enough to report the blocking term
        qk = max(q.terms)
        rem = dict(self.terms)
        while rem:
            k = max(rem)
            if not _key_divides(qk, k, self._nv):
                raise NotDivisibleError(Monomial(self.vars, _unpack(k, self._nv)), Fraction(rem[k]))
            t = _norm_scalar(Fraction(rem[k]) / Fraction(q.terms[qk]))
            for kq, cq in q.terms.items():
                kk = k - qk + kq
                acc = rem.get(kk, 0) - t * cq
                if acc:
                    rem[kk] = _norm_scalar(acc)
                elif kk in rem:
                    del rem[kk]
        raise AlgebraError("division unexpectedly exact")  # pragma: no cover

    def try_divexact(self, q: "Polynomial") -> "Polynomial | None":
        """Return self/q when the division is exact, else None."""
        self._check_vars(q)
        if q.is_zero:
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero:
            return self
        if q.is_constant:
            return self / q.constant_value()
        qk = max(q.terms)
        qc = Fraction(q.terms[qk])
        if len(q.terms) == 1:
            out = {}
            for k, c in self.terms.items():
                if not _key_divides(qk, k, self._nv):
                    return None
                out[k - qk] = _norm_scalar(c / qc)
            return Polynomial._raw(self.vars, out)
        if self.total_degree() < q.total_degree():
            return None
        rem = dict(self.terms)
        heap = [-k for k in rem]
        heapq.heapify(heap)
        quo: dict[int, Scalar] = {}
        qitems = [(k, c) for k, c in q.terms.items() if k != qk]
        while heap:
            k = -heap[0]
            if k not in rem:
                heapq.heappop(heap)
                continue
            if not _key_divides(qk, k, self._nv):
                return None
            t = _norm_scalar(rem.pop(k) / qc)
            heapq.heappop(heap)
            kt = k - qk
            quo[kt] = t
            for kq, cq in qitems:
                kk = kt + kq
                if kk in rem:
                    acc = rem[kk] - t * cq
                    if acc:
                        rem[kk] = _norm_scalar(acc)
                    else:
                        del rem[kk]
                else:
                    rem[kk] = _norm_scalar(-t * cq)
                    heapq.heappush(heap, -kk)
        return Polynomial._raw(self.vars, quo) if not rem else None

    def divides(self, other: "Polynomial") -> bool:
        return other.try_divexact(self) is not None

    # ------------------------------------------------------------------
    # Content, normalization

    def monomial_content_key(self) -> int:
        """Packed key of the largest monomial dividing every term."""
        if not self.terms:
            return 0
        mins = [_FIELD_MASK] * self._nv
        for k in self.terms:
            for i in range(self._nv):
                e = (k >> (_FIELD_BITS * (self._nv - 1 - i))) & _FIELD_MASK
                if e < mins[i]:
                    mins[i] = e
        return _pack(mins, self._nv)

    def monomial_content(self) -> Monomial:
        return Monomial(self.vars, _unpack(self.monomial_content_key(), self._nv))

    def divide_monomial_key(self, key: int) -> "Polynomial":
        if key == 0:
            return self
        return Polynomial._raw(self.vars, {k - key: c for k, c in self.terms.items()})

    def rational_content(self) -> Fraction:
        """Positive rational c with self/c integer-primitive; sign carried by
        the graded-lex leading coefficient.  Zero polynomial has content 0."""
        if not self.terms:
            return Fraction(0)
        from math import gcd as igcd

        num = 0
        den = 1
        for c in self.terms.values():
            f = c if isinstance(c, Fraction) else Fraction(c)
            num = igcd(num, f.numerator)
            den = den * f.denominator // igcd(den, f.denominator)
        content = Fraction(num, den)
        if Fraction(self.terms[max(self.terms)]) < 0:
            content = -content
        return content

    def primitive(self) -> "Polynomial":
        """Integer-primitive form with positive leading coefficient."""
        if not self.terms:
            return self
        return self / self.rational_content()

    def canonical(self) -> "Polynomial":
        return self.primitive()

    # ------------------------------------------------------------------
    # Degrees, homogeneity

    def projective_degree(self) -> int:
        """Common total degree in the projective variables.

        Parameters count as coefficients.  Raises NotHomogeneousError when the
        projective parts differ in degree, ValueError on the zero polynomial.
        """
        if not self.terms:
            raise ValueError("zero polynomial has no projective degree")
        proj = [i for i, v in enumerate(self.vars) if is_projective_name(v)]
        deg = None
        for k in self.terms:
            d = 0
            for i in proj:
                d += (k >> (_FIELD_BITS * (self._nv - 1 - i))) & _FIELD_MASK
            if deg is None:
                deg = d
            elif deg != d:
                raise NotHomogeneousError(f"projective degrees {deg} and {d} both present")
        return deg if deg is not None else 0

    def is_homogeneous(self) -> bool:
        try:
            self.projective_degree()
            return True
        except NotHomogeneousError:
            return False
        except ValueError:
            return True  # zero is vacuously homogeneous

    # ------------------------------------------------------------------
    # Calculus, evaluation, substitution

    def derivative(self, name: str) -> "Polynomial":
        i = self.vars.index(name)
        shift = _FIELD_BITS * (self._nv - 1 - i)
        unit = (1 << shift) | (1 << (_FIELD_BITS * self._nv))
        out: dict[int, Scalar] = {}
        for k, c in self.terms.items():
            e = (k >> shift) & _FIELD_MASK
            if e:
                out[k - unit] = _norm_scalar(c * e)
        return Polynomial._raw(self.vars, out)

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        """Exact value at a full assignment of the variables in use."""
        missing = [v for v in self.variables_used() if v not in point]
        if missing:
            raise AlgebraError(f"missing assignment for {missing}")
        vals = []
        for v in self.vars:
            x = point.get(v, 0)
            vals.append(x if isinstance(x, (int, Fraction)) else Fraction(x))
        total: Scalar = 0
        pows: list[dict[int, Scalar]] = [dict() for _ in range(self._nv)]
        for k, c in self.terms.items():
            term = c
            for i in range(self._nv):
                e = (k >> (_FIELD_BITS * (self._nv - 1 - i))) & _FIELD_MASK
                if e:
                    cache = pows[i]
                    if e not in cache:
                        cache[e] = vals[i] ** e
                    term = term * cache[e]
            total = total + term
        return Fraction(total)

    def eval_partial(self, point: Mapping[str, Scalar]) -> "Polynomial":
        """Substitute scalars for a subset of variables."""
        idx = {self.vars.index(v): (x if isinstance(x, (int, Fraction)) else Fraction(x))
               for v, x in point.items()}
        out: dict[int, Scalar] = {}
        pows: dict[tuple[int, int], Scalar] = {}
        for k, c in self.terms.items():
            coeff: Scalar = c
            kk = k
            deg_drop = 0
            for i, val in idx.items():
                shift = _FIELD_BITS * (self._nv - 1 - i)
                e = (k >> shift) & _FIELD_MASK
                if e:
                    key = (i, e)
                    if key not in pows:
                        pows[key] = val ** e
                    coeff = coeff * pows[key]
                    kk -= e << shift
                    deg_drop += e
            if coeff:
                kk -= deg_drop << (_FIELD_BITS * self._nv)
                acc = out.get(kk, 0) + coeff
                if acc:
                    out[kk] = _norm_scalar(acc)
                elif kk in out:
                    del out[kk]
        return Polynomial._raw(self.vars, out)

    def compose(self, assignment: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Substitute polynomials (over the same variable list) for variables."""
        for q in assignment.values():
            self._check_vars(q)
        idx = {self.vars.index(v): q for v, q in assignment.items()}
        one = Polynomial.constant(self.vars, 1)
        pows: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            key = (i, e)
            got = pows.get(key)
            if got is None:
                got = idx[i] ** e
                pows[key] = got
            return got

        result = Polynomial.zero(self.vars)
        for k, c in self.terms.items():
            residual_key = 0
            deg = 0
            factor = one
            for i in range(self._nv):
                shift = _FIELD_BITS * (self._nv - 1 - i)
                e = (k >> shift) & _FIELD_MASK
                if not e:
                    continue
                if i in idx:
                    factor = factor * power(i, e)
                else:
                    residual_key |= e << shift
                    deg += e
            term = Polynomial._raw(
                self.vars, {residual_key | (deg << (_FIELD_BITS * self._nv)): c}
            )
            result = result + term * factor
        return result

    def substitute(self, assignment: Mapping[str, "RationalFunction | Polynomial | Scalar"]) -> "RationalFunction":
        """Substitute rational functions for variables; unassigned pass through."""
        lifted: dict[str, RationalFunction] = {}
        for v, val in assignment.items():
            if isinstance(val, RationalFunction):
                lifted[v] = val
            elif isinstance(val, Polynomial):
                self._check_vars(val)
                lifted[v] = RationalFunction(val, Polynomial.constant(self.vars, 1))
            else:
                lifted[v] = RationalFunction(
                    Polynomial.constant(self.vars, val), Polynomial.constant(self.vars, 1)
                )
        for rf in lifted.values():
            if rf.denominator.is_zero:
                raise ZeroDivisionError("substituted denominator is zero")
        # all-polynomial assignments take the fast path
        if all(rf.denominator.is_constant for rf in lifted.values()):
            polys = {v: rf.numerator / rf.denominator.constant_value() for v, rf in lifted.items()}
            return RationalFunction(self.compose(polys), Polynomial.constant(self.vars, 1))
        idx = {self.vars.index(v): rf for v, rf in lifted.items()}
        one = RationalFunction(
            Polynomial.constant(self.vars, 1), Polynomial.constant(self.vars, 1)
        )
        pows: dict[tuple[int, int], RationalFunction] = {}

        def power(i: int, e: int) -> RationalFunction:
            key = (i, e)
            got = pows.get(key)
            if got is None:
                got = idx[i] ** e
                pows[key] = got
            return got

        total = RationalFunction(Polynomial.zero(self.vars), Polynomial.constant(self.vars, 1))
        for k, c in self.terms.items():
            residual_key = 0
            deg = 0
            factor = one
            for i in range(self._nv):
                shift = _FIELD_BITS * (self._nv - 1 - i)
                e = (k >> shift) & _FIELD_MASK
                if not e:
                    continue
                if i in idx:
                    factor = factor * power(i, e)
                else:
                    residual_key |= e << shift
                    deg += e
            mono = Polynomial._raw(
                self.vars, {residual_key | (deg << (_FIELD_BITS * self._nv)): c}
            )
            total = total + factor * mono
        return total

    # ------------------------------------------------------------------
    # Variable-list surgery

    def with_vars(self, vars: Sequence[str]) -> "Polynomial":
        """Re-express over a superset (or permutation) of the variable list."""
        new = tuple(vars)
        if new == self.vars:
            return self
        pos = []
        for v in self.vars:
            if v not in new:
                if self.degree_in(v) > 0:
                    raise VariableMismatchError(f"variable {v} in use cannot be dropped")
                pos.append(-1)
            else:
                pos.append(new.index(v))
        nv_new = len(new)
        out: dict[int, Scalar] = {}
        for k, c in self.terms.items():
            exps = _unpack(k, self._nv)
            new_exps = [0] * nv_new
            for i, e in enumerate(exps):
                if e:
                    new_exps[pos[i]] = e
            out[_pack(new_exps, nv_new)] = c
        return Polynomial._raw(new, out)

    # ------------------------------------------------------------------
    # Text form

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r}, vars={self.vars})"

    def to_text(self) -> str:
        """Canonical serialization: graded-lex descending, explicit exponents."""
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            c = self.terms[k]
            sign = "+" if (c if isinstance(c, int) else c.numerator) >= 0 else "-"
            mag = c if (isinstance(c, int) and c >= 0) or (isinstance(c, Fraction) and c >= 0) else -c
            factors = [f"{v}^{e}" for v, e in zip(self.vars, _unpack(k, self._nv)) if e]
            body = f"{mag}" + ("*" + "*".join(factors) if factors else "")
            parts.append(sign + body)
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str, vars: Sequence[str]) -> "Polynomial":
        """Parse the canonical text form (also accepts implicit ^1 and bare signs)."""
        vs = tuple(vars)
        p = cls.zero(vs)
        cleaned = text.replace(" ", "")
        if not cleaned or cleaned == "0":
            return p
        token = re.compile(r"([+-]?)([^+-]+)")
        pos = 0
        for m in token.finditer(cleaned):
            if m.start() != pos:
                raise ValueError(f"cannot parse polynomial near {cleaned[pos:]!r}")
            pos = m.end()
            sign = -1 if m.group(1) == "-" else 1
            coeff = Fraction(1)
            exps = [0] * len(vs)
            for factor in m.group(2).split("*"):
                if not factor:
                    raise ValueError(f"empty factor in {text!r}")
                if "^" in factor:
                    base, _, e = factor.partition("^")
                    exponent = int(e)
                else:
                    base, exponent = factor, 1
                if base in vs:
                    exps[vs.index(base)] += exponent
                else:
                    coeff *= Fraction(base) ** exponent
            p = p + cls._raw(vs, {_pack(exps, len(vs)): _norm_scalar(Fraction(sign) * coeff)})
        if pos != len(cleaned):
            raise ValueError(f"cannot parse polynomial near {cleaned[pos:]!r}")
        return p


def ring(names: Sequence[str] | str) -> tuple[Polynomial, ...]:
    """Generators of Q[names].  Accepts a sequence or space-separated string."""
    if isinstance(names, str):
        names = names.split()
    vs = tuple(names)
    return tuple(Polynomial.variable(vs, v) for v in vs)


def projective_ring(n: int, params: Sequence[str] = ()) -> tuple[Polynomial, ...]:
    """Generators a0..a_{n-1} plus trailing parameter variables."""
    return ring([f"a{i}" for i in range(n)] + list(params))


# ----------------------------------------------------------------------
# GCD engine
#
# Strategy, in order of increasing cost:
#   1. zero/constant/equal fast paths;
#   2. split off the common monomial factor (per-variable minimum exponents);
#   3. certified per-variable degree bounds via univariate specializations —
#      when every bound is 0 the gcd is the monomial part alone;
#   4. trial division of one operand by the other;
#   5. recursive subresultant PRS in the variable with the smallest bound.
# The bounds in step 3 are rigorous: specializing all other variables at a
# point where a leading coefficient survives can only enlarge the gcd.

_SCAN_POINT_SEED = 0x50D05


def _uni_gcd_degree(f: list[Fraction], g: list[Fraction]) -> int:
    """Degree of gcd of two univariate polynomials given as coefficient lists."""

    def strip(cs):
        while cs and not cs[-1]:
            cs.pop()
        return cs

    a, b = strip(list(f)), strip(list(g))
    if not a:
        return len(b) - 1 if b else 0
    if not b:
        return len(a) - 1
    if len(a) < len(b):
        a, b = b, a
    while b:
        while len(a) >= len(b):
            q = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i in range(len(b)):
                a[shift + i] = a[shift + i] - q * b[i]
            strip(a)
            if not a:
                break
        a, b = b, a
    return len(a) - 1


def _specialize(p: Polynomial, main: int, point: list[Scalar]) -> list[Fraction]:
    """Coefficient list of p in variable #main with others fixed at point."""
    nv = p._nv
    shift_main = _FIELD_BITS * (nv - 1 - main)
    coeffs: dict[int, Fraction] = {}
    pows: dict[tuple[int, int], Scalar] = {}
    for k, c in p.terms.items():
        val: Scalar = c
        for i in range(nv):
            if i == main:
                continue
            e = (k >> (_FIELD_BITS * (nv - 1 - i))) & _FIELD_MASK
            if e:
                key = (i, e)
                if key not in pows:
                    pows[key] = point[i] ** e
                val = val * pows[key]
        if val:
            e_main = (k >> shift_main) & _FIELD_MASK
            coeffs[e_main] = coeffs.get(e_main, 0) + val
    if not coeffs:
        return []
    out = [Fraction(0)] * (max(coeffs) + 1)
    for e, v in coeffs.items():
        out[e] = Fraction(v)
    while out and not out[-1]:
        out.pop()
    return out


def _lc_in_var(p: Polynomial, main: int) -> Polynomial:
    """Leading coefficient of p viewed univariately in variable #main."""
    nv = p._nv
    shift = _FIELD_BITS * (nv - 1 - main)
    d = max((k >> shift) & _FIELD_MASK for k in p.terms)
    unit = (1 << shift) | (1 << (_FIELD_BITS * nv))
    out = {k - d * unit: c for k, c in p.terms.items() if ((k >> shift) & _FIELD_MASK) == d}
    return Polynomial._raw(p.vars, out)


def _gcd_degree_bound(p: Polynomial, q: Polynomial, main: int, rng: random.Random) -> int:
    """Certified upper bound for deg_main(gcd(p, q))."""
    nv = p._nv
    lcp = _lc_in_var(p, main)
    lcq = _lc_in_var(q, main)
    for attempt in range(64):
        span = 4 + 2 * attempt
        point: list[Scalar] = [0] * nv
        assign = {}
        for i in range(nv):
            if i != main:
                point[i] = rng.randint(1, span) * (1 if rng.random() < 0.5 else -1)
                assign[p.vars[i]] = point[i]
        if lcp.evaluate(assign) != 0 or lcq.evaluate(assign) != 0:
            fu = _specialize(p, main, point)
            gu = _specialize(q, main, point)
            return _uni_gcd_degree(fu, gu)
    raise AlgebraError("could not find a valid specialization point")  # pragma: no cover


def _coefficients_in_var(p: Polynomial, main: int) -> dict[int, Polynomial]:
    """p as a univariate polynomial in variable #main with Polynomial coefficients."""
    nv = p._nv
    shift = _FIELD_BITS * (nv - 1 - main)
    unit = (1 << shift) | (1 << (_FIELD_BITS * nv))
    buckets: dict[int, dict[int, Scalar]] = {}
    for k, c in p.terms.items():
        e = (k >> shift) & _FIELD_MASK
        buckets.setdefault(e, {})[k - e * unit] = c
    return {e: Polynomial._raw(p.vars, t) for e, t in buckets.items()}


def _from_coefficients(coeffs: dict[int, Polynomial], vars: tuple[str, ...], main: int) -> Polynomial:
    nv = len(vars)
    shift = _FIELD_BITS * (nv - 1 - main)
    unit = (1 << shift) | (1 << (_FIELD_BITS * nv))
    out: dict[int, Scalar] = {}
    for e, poly in coeffs.items():
        for k, c in poly.terms.items():
            out[k + e * unit] = c
    return Polynomial._raw(vars, out)


def _content_in_var(p: Polynomial, main: int) -> Polynomial:
    coeffs = _coefficients_in_var(p, main)
    content = Polynomial.zero(p.vars)
    for poly in sorted(coeffs.values(), key=lambda q: len(q.terms)):
        content = poly_gcd(content, poly)
        if content.is_constant:
            break
    return content


def _pseudo_divide(A: dict[int, Polynomial], B: dict[int, Polynomial],
                   vars: tuple[str, ...]) -> dict[int, Polynomial]:
    """Textbook pseudo-remainder lc(B)^(dA-dB+1) * A mod B (univariate views)."""
    da, db = max(A), max(B)
    lb = B[db]
    R = dict(A)
    for d in range(da, db - 1, -1):
        rd = R.pop(d, None)
        # R <- lb*R - rd * x^(d-db) * B; the lb factor applies even when the
        # coefficient at d is zero, to match the exact prem normalization
        newR: dict[int, Polynomial] = {e: ce * lb for e, ce in R.items()}
        if rd is not None and not rd.is_zero:
            for e, be in B.items():
                if e == db:
                    continue
                tgt = e + d - db
                prod = rd * be
                if tgt in newR:
                    newR[tgt] = newR[tgt] - prod
                else:
                    newR[tgt] = -prod
        R = {e: c for e, c in newR.items() if not c.is_zero}
        if not R:
            break
    return R


def _prs_gcd(p: Polynomial, q: Polynomial, main: int) -> Polynomial:
    """gcd of primitive (in main) p, q via the subresultant PRS."""
    A = _coefficients_in_var(p, main)
    B = _coefficients_in_var(q, main)
    if max(A) < max(B):
        A, B = B, A
    one = Polynomial.constant(p.vars, 1)
    g = one
    h = one
    while True:
        delta = max(A) - max(B)
        R = _pseudo_divide(A, B, p.vars)
        if not R:
            result = _from_coefficients(B, p.vars, main)
            return result.divexact(_content_in_var(result, main)).primitive()
        if max(R) == 0:
            return Polynomial.constant(p.vars, 1)
        divisor = g * h ** delta
        A = B
        B = {e: c.divexact(divisor) for e, c in R.items()}
        g = A[max(A)]
        if delta == 1:
            h = g
        elif delta > 1:
            h = (g ** delta).divexact(h ** (delta - 1))


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Primitive, canonically signed gcd; divides both inputs exactly."""
    if isinstance(p, Polynomial) and isinstance(q, Polynomial):
        p._check_vars(q)
    if p.is_zero and q.is_zero:
        raise AlgebraError("gcd(0, 0) is undefined")
    if p.is_zero:
        return q.canonical()
    if q.is_zero:
        return p.canonical()
    if p.is_constant or q.is_constant:
        return Polynomial.constant(p.vars, 1)

    mk_p = p.monomial_content_key()
    mk_q = q.monomial_content_key()
    nv = p._nv
    exps_p = _unpack(mk_p, nv)
    exps_q = _unpack(mk_q, nv)
    common = [min(a, b) for a, b in zip(exps_p, exps_q)]
    mono_key = _pack(common, nv)
    pp = p.divide_monomial_key(mk_p)
    qq = q.divide_monomial_key(mk_q)
    mono = Polynomial._raw(p.vars, {mono_key: 1})
    if pp.is_constant or qq.is_constant:
        return mono

    pp = pp.primitive()
    qq = qq.primitive()
    if pp == qq:
        return mono * pp

    rng = random.Random(_SCAN_POINT_SEED)
    shared = [i for i, v in enumerate(p.vars)
              if pp.degree_in(v) > 0 and qq.degree_in(v) > 0]
    # a variable missing from either operand cannot appear in the gcd
    active = [i for i in shared]
    bounds: dict[int, int] = {}
    for i in active:
        bounds[i] = _gcd_degree_bound(pp, qq, i, rng)
    if all(b == 0 for b in bounds.values()):
        return mono
    # trial division catches the common case gcd == smaller operand
    small, big = (pp, qq) if len(pp.terms) <= len(qq.terms) else (qq, pp)
    if small.divides(big):
        return mono * small

    candidates = [i for i in active if bounds[i] > 0]
    main = min(candidates, key=lambda i: (bounds[i], len(p.vars) - i))
    cont_p = _content_in_var(pp, main)
    cont_q = _content_in_var(qq, main)
    cont_gcd = poly_gcd(cont_p, cont_q) if not (cont_p.is_constant and cont_q.is_constant) \
        else Polynomial.constant(p.vars, 1)
    pp_main = pp.divexact(cont_p)
    qq_main = qq.divexact(cont_q)
    core = _prs_gcd(pp_main, qq_main, main)
    return (mono * cont_gcd * core).canonical()


def poly_lcm(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.is_zero or q.is_zero:
        return Polynomial.zero(p.vars)
    return (p * q).divexact(poly_gcd(p, q)).canonical()


def certified_coprime(polys: Sequence[Polynomial]) -> bool:
    """Rigorous test that gcd(polys) is constant.

    For every variable shared by all operands, a specialized univariate gcd
    gives a certified upper bound on the variable's degree in the common gcd;
    if some pair bounds it to zero for each variable the gcd is constant.
    A False return is conservative (the caller falls back to a full gcd).
    """
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        return False
    if any(p.is_constant for p in polys):
        return True
    vars = polys[0].vars
    shared = [i for i, v in enumerate(vars) if all(p.degree_in(v) > 0 for p in polys)]
    if not shared:
        return True
    order = sorted(range(len(polys)), key=lambda j: len(polys[j].terms))
    rng = random.Random(_SCAN_POINT_SEED)
    for i in shared:
        cleared = False
        for a in range(min(3, len(order))):
            for b in range(a + 1, min(a + 3, len(order))):
                if _gcd_degree_bound(polys[order[a]], polys[order[b]], i, rng) == 0:
                    cleared = True
                    break
            if cleared:
                break
        if not cleared:
            return False
    return True


# ----------------------------------------------------------------------
# Rational functions


class RationalFunction:
    """Quotient of polynomials, always stored fully reduced.

    The denominator is normalized to integer-primitive form with positive
    graded-lex leading coefficient, so equal values have equal components.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: Polynomial, denominator: Polynomial | None = None):
        if denominator is None:
            denominator = Polynomial.constant(numerator.vars, 1)
        numerator._check_vars(denominator)
        if denominator.is_zero:
            raise ZeroDivisionError("zero denominator")
        if numerator.is_zero:
            denominator = Polynomial.constant(numerator.vars, 1)
        else:
            g = poly_gcd(numerator, denominator)
            if not g.is_constant or g.constant_value() != 1:
                numerator = numerator.divexact(g)
                denominator = denominator.divexact(g)
            c = denominator.rational_content()
            if c != 1:
                denominator = denominator / c
                numerator = numerator / c
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    def __setattr__(self, *a):  # pragma: no cover - guard rail
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def from_scalar(cls, vars: Sequence[str], value: Scalar) -> "RationalFunction":
        return cls(Polynomial.constant(vars, value))

    @property
    def vars(self) -> tuple[str, ...]:
        return self.numerator.vars

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    def is_polynomial(self) -> bool:
        return self.denominator.is_constant

    def monomial_denominator(self) -> bool:
        """True iff the reduced denominator has exactly one term."""
        return len(self.denominator.terms) == 1

    def _coerce(self, other) -> "RationalFunction | None":
        if isinstance(other, RationalFunction):
            if self.vars != other.vars:
                raise VariableMismatchError(f"{self.vars} vs {other.vars}")
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.from_scalar(self.vars, other)
        return None

    def __add__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.denominator == o.denominator:
            return RationalFunction(self.numerator + o.numerator, self.denominator)
        g = poly_gcd(self.denominator, o.denominator)
        d1 = self.denominator.divexact(g)
        d2 = o.denominator.divexact(g)
        num = self.numerator * d2 + o.numerator * d1
        return RationalFunction(num, d1 * o.denominator)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        out = object.__new__(RationalFunction)
        object.__setattr__(out, "numerator", -self.numerator)
        object.__setattr__(out, "denominator", self.denominator)
        return out

    def __sub__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "RationalFunction":
        return (-self) + other

    def __mul__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # cross-reduce first so the big product never carries a common factor
        g1 = poly_gcd(self.numerator, o.denominator) if not self.numerator.is_zero else None
        g2 = poly_gcd(o.numerator, self.denominator) if not o.numerator.is_zero else None
        n1 = self.numerator if g1 is None else self.numerator.divexact(g1)
        d2 = o.denominator if g1 is None else o.denominator.divexact(g1)
        n2 = o.numerator if g2 is None else o.numerator.divexact(g2)
        d1 = self.denominator if g2 is None else self.denominator.divexact(g2)
        return RationalFunction(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return self * RationalFunction(o.denominator, o.numerator)

    def __rtruediv__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "RationalFunction":
        if not isinstance(n, int):
            raise ValueError("rational function powers must be integers")
        if n < 0:
            if self.is_zero:
                raise ZeroDivisionError("negative power of zero")
            return RationalFunction(self.denominator ** (-n), self.numerator ** (-n))
        return RationalFunction(self.numerator ** n, self.denominator ** n)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.numerator == o.numerator and self.denominator == o.denominator

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        den = self.denominator.evaluate(point)
        if den == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.numerator.evaluate(point) / den

    def substitute(self, assignment) -> "RationalFunction":
        num = self.numerator.substitute(assignment)
        den = self.denominator.substitute(assignment)
        if den.is_zero:
            raise ZeroDivisionError("substituted denominator is identically zero")
        return num / den

    def with_vars(self, vars: Sequence[str]) -> "RationalFunction":
        return RationalFunction(self.numerator.with_vars(vars), self.denominator.with_vars(vars))

    def __str__(self) -> str:
        if self.is_polynomial():
            return self.numerator.to_text()
        return f"({self.numerator.to_text()}) / ({self.denominator.to_text()})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def rf_reduce(rf: RationalFunction) -> RationalFunction:
    """Reduced form (construction already reduces; exposed for symmetry)."""
    return RationalFunction(rf.numerator, rf.denominator)


def reduce_modulo_i(p: Polynomial, name: str = "iota") -> Polynomial:
    """Reduce exponents of the formal imaginary unit by iota^2 -> -1."""
    if name not in p.vars:
        return p
    i = p.vars.index(name)
    nv = p._nv
    shift = _FIELD_BITS * (nv - 1 - i)
    acc: dict[int, Scalar] = {}
    for k, c in p.terms.items():
        e = (k >> shift) & _FIELD_MASK
        if e >= 2:
            sign = -1 if (e // 2) % 2 else 1
            rem = e % 2
            kk = k - ((e - rem) << shift) - ((e - rem) << (_FIELD_BITS * nv))
            c = c * sign
        else:
            kk = k
        v = acc.get(kk, 0) + c
        if v:
            acc[kk] = _norm_scalar(v)
        elif kk in acc:
            del acc[kk]
    return Polynomial._raw(p.vars, acc)
