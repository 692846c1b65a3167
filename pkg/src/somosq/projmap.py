"""Birational maps of real projective space as homogeneous polynomial tuples.

A map on P^{n-1} is stored as n polynomial components over a variable list
whose projective part is exactly a0..a_{n-1}; extra names (c, alpha, ...) ride
along as free parameters.  Components are always kept *normalized*: common
polynomial factors (including pure parameter powers, which are projective
units) are cancelled, coefficients are integer-primitive, and the first
nonzero component has a positive leading coefficient.  The degree of a map is
only ever read off a normalized tuple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import (
    Polynomial,
    RationalFunction,
    certified_coprime,
    is_projective_name,
    poly_gcd,
    poly_lcm,
)

_HINT_TERM_CAP = 2000


class ProjmapError(Exception):
    pass


class IndeterminateError(ProjmapError):
    """All components vanish at the point."""

    def __init__(self, point: "ProjectivePoint"):
        self.point = point
        super().__init__(f"map is indeterminate at {point}")


class ZeroJacobianError(ProjmapError):
    """The Jacobian determinant vanishes identically (map not dominant)."""


class ProjectivePoint:
    """A point of P^{n-1}; equality is up to a nonzero scalar."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence):
        cs = tuple(Fraction(c) for c in coords)
        if all(c == 0 for c in cs):
            raise ValueError("a projective point needs a nonzero coordinate")
        self.coords = cs

    def __len__(self):
        return len(self.coords)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if len(self.coords) != len(other.coords):
            return False
        x, y = self.coords, other.coords
        n = len(x)
        return all(x[i] * y[j] == x[j] * y[i] for i in range(n) for j in range(i + 1, n))

    def __hash__(self):
        return hash(self.normalized())

    def normalized(self) -> tuple[int, ...]:
        """Primitive integer coordinates with the first nonzero entry positive."""
        from math import gcd, lcm

        den = 1
        for c in self.coords:
            den = lcm(den, c.denominator)
        ints = [int(c * den) for c in self.coords]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        ints = [v // g for v in ints]
        for v in ints:
            if v != 0:
                if v < 0:
                    ints = [-u for u in ints]
                break
        return tuple(ints)

    def __repr__(self):
        return "(" + " : ".join(str(v) for v in self.normalized()) + ")"


def _projective_names(vars: Sequence[str]) -> tuple[str, ...]:
    return tuple(v for v in vars if is_projective_name(v))


def _normalize_components(
    components: Sequence[Polynomial], hints: Iterable[Polynomial] = ()
) -> tuple[Polynomial, ...]:
    """Cancel common factors and fix signs/content; gcd work is mandatory here."""
    comps = list(components)
    nonzero = [p for p in comps if not p.is_zero]
    if not nonzero:
        raise ProjmapError("all map components are zero")
    vars = nonzero[0].vars

    # common monomial factor (covers pure parameter powers as well)
    def strip_monomials(cs):
        from .algebra import _pack, _unpack  # internal, same package

        nv = len(vars)
        mins = None
        for p in cs:
            if p.is_zero:
                continue
            exps = _unpack(p.monomial_content_key(), nv)
            mins = exps if mins is None else tuple(min(a, b) for a, b in zip(mins, exps))
        key = _pack(mins, nv)
        if key:
            return [p.divide_monomial_key(key) if not p.is_zero else p for p in cs]
        return cs

    comps = strip_monomials(comps)
    nonzero = [p for p in comps if not p.is_zero]

    # cheap trial divisions by likely factors before any general gcd
    tried: set = set()
    hint_list = []
    for h in hints:
        hp = h.divide_monomial_key(h.monomial_content_key()).primitive() if not h.is_zero else h
        if hp.is_zero or hp.is_constant or len(hp.terms) > _HINT_TERM_CAP:
            continue
        if hp not in tried:
            tried.add(hp)
            hint_list.append(hp)
    hint_list.sort(key=lambda p: (len(p.terms), p.total_degree()))
    for h in hint_list:
        while True:
            quotients = []
            for p in comps:
                if p.is_zero:
                    quotients.append(p)
                    continue
                q = p.try_divexact(h)
                if q is None:
                    quotients = None
                    break
                quotients.append(q)
            if quotients is None:
                break
            comps = quotients
    comps = strip_monomials(comps)
    nonzero = [p for p in comps if not p.is_zero]

    if not certified_coprime(nonzero):
        g = None
        for p in sorted(nonzero, key=lambda q: len(q.terms)):
            g = p if g is None else poly_gcd(g, p)
            if g.is_constant:
                break
        if not g.is_constant:
            comps = [p.divexact(g) if not p.is_zero else p for p in comps]
            nonzero = [p for p in comps if not p.is_zero]

    # joint rational content, sign from the first nonzero component
    content = None
    for p in nonzero:
        c = p.rational_content()
        content = abs(c) if content is None else _fraction_gcd(content, abs(c))
    first = next(p for p in comps if not p.is_zero)
    if Fraction(first.terms[max(first.terms)]) < 0:
        content = -content
    return tuple(p / content for p in comps)


def _fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    from math import gcd, lcm

    return Fraction(gcd(a.numerator, b.numerator), lcm(a.denominator, b.denominator))


class BirationalMap:
    """Normalized homogeneous polynomial tuple acting on P^{n-1}."""

    __slots__ = ("vars", "components", "degree", "proj_vars")

    def __init__(self, components: Sequence[Polynomial], normalize: bool = True,
                 hints: Iterable[Polynomial] = ()):
        comps = tuple(components)
        if not comps:
            raise ProjmapError("a map needs at least one component")
        vars = comps[0].vars
        for p in comps:
            if p.vars != vars:
                raise ProjmapError("components must share one variable list")
        proj = _projective_names(vars)
        if list(proj) != [f"a{i}" for i in range(len(comps))]:
            raise ProjmapError(
                f"need projective variables a0..a{len(comps) - 1}, have {proj}"
            )
        if normalize:
            comps = _normalize_components(comps, hints)
        degree = None
        for p in comps:
            if p.is_zero:
                continue
            d = p.projective_degree()  # raises NotHomogeneousError when mixed
            if degree is None:
                degree = d
            elif degree != d:
                raise ProjmapError(f"components of degrees {degree} and {d}")
        if degree is None:
            raise ProjmapError("all map components are zero")
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "proj_vars", proj)

    def __setattr__(self, *a):  # pragma: no cover - guard rail
        raise AttributeError("BirationalMap is immutable")

    @property
    def dimension(self) -> int:
        """Number of homogeneous coordinates (the map acts on P^{dimension-1})."""
        return len(self.components)

    @classmethod
    def identity(cls, vars: Sequence[str]) -> "BirationalMap":
        proj = _projective_names(vars)
        return cls([Polynomial.variable(vars, v) for v in proj], normalize=False)

    @classmethod
    def from_fractions(cls, fractions: Sequence[RationalFunction]) -> "BirationalMap":
        """Clear denominators by their lcm, then fully normalize."""
        fracs = list(fractions)
        if not fracs:
            raise ProjmapError("empty component tuple")
        vars = fracs[0].vars
        lcm = Polynomial.constant(vars, 1)
        for f in fracs:
            lcm = poly_lcm(lcm, f.denominator)
        comps = [f.numerator * lcm.divexact(f.denominator) for f in fracs]
        return cls(comps)

    @classmethod
    def from_texts(cls, texts: Sequence[str], vars: Sequence[str]) -> "BirationalMap":
        return cls([Polynomial.parse(t, vars) for t in texts])

    def to_texts(self) -> list[str]:
        return [p.to_text() for p in self.components]

    def __repr__(self):
        return "(" + " : ".join(self.to_texts()) + ")"

    # ------------------------------------------------------------------

    def compose(self, inner: "BirationalMap") -> "BirationalMap":
        """self after inner; the common-factor cancellation is mandatory."""
        if self.vars != inner.vars or self.dimension != inner.dimension:
            raise ProjmapError("maps must share variable list and dimension")
        assignment = {v: inner.components[i] for i, v in enumerate(self.proj_vars)}
        comps = [p.compose(assignment) for p in self.components]
        if all(p.is_zero for p in comps):
            raise ProjmapError("composition is identically zero (image in indeterminacy locus)")
        return BirationalMap(comps, hints=list(inner.components) + list(self.components))

    def __matmul__(self, inner: "BirationalMap") -> "BirationalMap":
        return self.compose(inner)

    def power(self, n: int) -> "BirationalMap":
        if n < 0:
            raise ProjmapError("negative powers need an explicit inverse")
        acc = BirationalMap.identity(self.vars)
        for _ in range(n):
            acc = self.compose(acc)
        return acc

    def apply(self, point: ProjectivePoint | Sequence,
              params: Mapping[str, Fraction | int] | None = None) -> ProjectivePoint:
        """Evaluate at a point; parameters must be bound to exact scalars."""
        if not isinstance(point, ProjectivePoint):
            point = ProjectivePoint(point)
        if len(point) != self.dimension:
            raise ProjmapError("point dimension mismatch")
        comps = self.components
        if params:
            comps = tuple(p.eval_partial(dict(params)) for p in comps)
        free = {v for p in comps for v in p.variables_used() if not is_projective_name(v)}
        if free:
            raise ProjmapError(f"unbound parameters: {sorted(free)}")
        assign = {v: point.coords[i] for i, v in enumerate(self.proj_vars)}
        values = [p.evaluate(assign) for p in comps]
        if all(v == 0 for v in values):
            raise IndeterminateError(point)
        return ProjectivePoint(values)

    def equal_projective(self, other: "BirationalMap") -> bool:
        """True iff all 2x2 minors of the stacked component matrix vanish.

        Valid with free parameters present: the minors must vanish identically.
        """
        if self.dimension != other.dimension:
            raise ProjmapError("dimension mismatch")
        x, y = self.components, other.components
        n = self.dimension
        for i in range(n):
            for j in range(i + 1, n):
                if x[i] * y[j] != x[j] * y[i]:
                    return False
        return True

    def is_identity(self) -> bool:
        return self.equal_projective(BirationalMap.identity(self.vars))

    def order(self, bound: int) -> int | None:
        """Least k <= bound with self^k the identity, else None."""
        if bound < 1:
            raise ValueError("order bound must be at least 1")
        acc = self
        for k in range(1, bound + 1):
            if acc.is_identity():
                return k
            if k < bound:
                acc = self.compose(acc)
        return None

    # ------------------------------------------------------------------

    def jacobian_determinant(self) -> Polynomial:
        mat = [[c.derivative(v) for v in self.proj_vars] for c in self.components]
        return _poly_det(mat)

    def pullback(self, p: Polynomial) -> Polynomial:
        """p composed with the map components (denominator-free)."""
        if p.vars != self.vars:
            p = p.with_vars(self.vars)
        assignment = {v: self.components[i] for i, v in enumerate(self.proj_vars)}
        return p.compose(assignment)


def _poly_det(mat: list[list[Polynomial]]) -> Polynomial:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    vars = mat[0][0].vars
    total = Polynomial.zero(vars)
    for j, entry in enumerate(mat[0]):
        if entry.is_zero:
            continue
        minor = [[row[jj] for jj in range(n) if jj != j] for row in mat[1:]]
        term = entry * _poly_det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


@dataclass(frozen=True)
class JacobianFactorReport:
    verified: bool
    multiplicities: tuple[int, ...]
    leftover: str
    witness: str | None = None


def map_jacobian_factors(
    phi: BirationalMap,
    claimed: Sequence[tuple[Polynomial, int | None]],
) -> JacobianFactorReport:
    """Check det jac == nonzero constant * product of the claimed factors.

    A claimed multiplicity of None means "at least one, exactly discovered";
    an integer is required exactly.  Any residual factor refutes the claim.
    """
    det = phi.jacobian_determinant()
    if det.is_zero:
        raise ZeroJacobianError("Jacobian determinant vanishes identically")
    mults = []
    rest = det
    for factor, wanted in claimed:
        if factor.vars != rest.vars:
            factor = factor.with_vars(rest.vars)
        e = 0
        while True:
            q = rest.try_divexact(factor)
            if q is None:
                break
            rest = q
            e += 1
        mults.append(e)
        if wanted is None:
            if e < 1:
                return JacobianFactorReport(
                    False, tuple(mults), rest.to_text(),
                    witness=f"factor {factor.to_text()} does not divide the Jacobian",
                )
        elif e != wanted:
            return JacobianFactorReport(
                False, tuple(mults), rest.to_text(),
                witness=f"factor {factor.to_text()} has multiplicity {e}, claimed {wanted}",
            )
    proj_free = all(not is_projective_name(v) for v in rest.variables_used())
    if not proj_free:
        return JacobianFactorReport(
            False, tuple(mults), rest.to_text(),
            witness=f"unclaimed residual factor {rest.to_text()}",
        )
    return JacobianFactorReport(True, tuple(mults), rest.to_text())


# ----------------------------------------------------------------------
# Words over a generator alphabet


_LETTER_RE = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\((.*)\))?$")


@dataclass(frozen=True)
class Letter:
    name: str
    args: tuple[tuple[str, Fraction | str], ...] = ()

    def bindings(self) -> dict[str, Fraction | str]:
        return dict(self.args)

    def __str__(self):
        if not self.args:
            return self.name
        inner = ",".join(f"{k}={v}" if not isinstance(v, str) or k != v else k
                         for k, v in self.args)
        return f"{self.name}({inner})"


@dataclass(frozen=True)
class MapWord:
    """A composition word like R.F.M(c=2); leftmost letter applies last."""

    letters: tuple[Letter, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "MapWord":
        text = text.strip()
        if not text:
            return cls(())
        letters = []
        for chunk in text.split("."):
            m = _LETTER_RE.match(chunk.strip())
            if not m:
                raise ValueError(f"cannot parse word letter {chunk!r}")
            name, argtext = m.group(1), m.group(2)
            args: list[tuple[str, Fraction | str]] = []
            if argtext is not None and argtext.strip():
                for part in argtext.split(","):
                    if "=" in part:
                        k, _, v = part.partition("=")
                        k, v = k.strip(), v.strip()
                        try:
                            args.append((k, Fraction(v)))
                        except ValueError:
                            args.append((k, v))  # symbolic binding
                    else:
                        sym = part.strip()
                        args.append((sym, sym))  # bare name stays symbolic
            letters.append(Letter(name, tuple(args)))
        return cls(tuple(letters))

    def __str__(self):
        return ".".join(str(letter) for letter in self.letters)
