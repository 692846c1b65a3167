"""Plane curves invariant under the Somos-3 map group, and their identities.

An invariant curve of even degree d is a combination of the monomials
a0^m * a1^(d-2m) * a2^m, m = 0..d/2.  The reflection fixes each monomial; the
degree-2 involution swaps m with d/2 - m, so invariant curves are built from
the pair sums (symmetric) or pair differences (antisymmetric, any self-paired
monomial omitted), with one free coefficient per group after the leading pair
is normalized to 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import Polynomial, reduce_modulo_i, ring

CURVE_VARS = ("a0", "a1", "a2")


def _default_param_names(count: int) -> tuple[str, ...]:
    if count == 0:
        return ()
    if count == 1:
        return ("alpha",)
    if count == 2:
        return ("alpha", "beta")
    return tuple(f"alpha{i + 1}" for i in range(count))


@dataclass(frozen=True)
class CurveFamily:
    """A parametric family of invariant plane curves of even degree."""

    degree: int
    parity: str  # "symmetric" | "antisymmetric"
    params: tuple[str, ...]
    polynomial: Polynomial

    @property
    def vars(self) -> tuple[str, ...]:
        return self.polynomial.vars

    def at(self, *args) -> Polynomial:
        """Instantiate the parameters with scalars or polynomials.

        Polynomial arguments must live over the target variable list (the
        family variables with its own parameter names dropped).
        """
        if len(args) != len(self.params):
            raise ValueError(f"family takes {len(self.params)} parameters, got {len(args)}")
        target: tuple[str, ...] | None = None
        for a in args:
            if isinstance(a, Polynomial):
                target = a.vars
                break
        if target is None:
            target = tuple(v for v in self.vars if v not in self.params)
        lifted = []
        for a in args:
            lifted.append(a if isinstance(a, Polynomial) else Polynomial.constant(target, a))
        base = self.polynomial.with_vars(self._merge_vars(target))
        assignment = {name: value.with_vars(base.vars) for name, value in zip(self.params, lifted)}
        out = base.compose(assignment)
        return out.with_vars(target)

    def _merge_vars(self, target: Sequence[str]) -> tuple[str, ...]:
        merged = list(target)
        for v in self.vars:
            if v not in merged:
                merged.append(v)
        return tuple(merged)


def _curve_groups(d: int) -> list[tuple[int, int] | int]:
    """Monomial groups ordered by decreasing a0 power; pairs (m, d/2-m) with
    m > d/2-m, plus the self-paired exponent when d/2 is even."""
    half = d // 2
    groups: list[tuple[int, int] | int] = []
    for m in range(half, -1, -1):
        partner = half - m
        if m > partner:
            groups.append((m, partner))
        elif m == partner:
            groups.append(m)
    return groups


def construct_curve(d: int, parity: str = "symmetric",
                    param_names: Sequence[str] | None = None) -> CurveFamily:
    """Build the invariant curve family of even degree d."""
    if d < 2 or d % 2:
        raise ValueError("invariant curves exist for even degree d >= 2")
    if parity not in ("symmetric", "antisymmetric"):
        raise ValueError("parity must be symmetric or antisymmetric")
    groups = _curve_groups(d)
    if parity == "antisymmetric":
        groups = [g for g in groups if isinstance(g, tuple)]
    n_params = len(groups) - 1
    names = tuple(param_names) if param_names is not None else _default_param_names(n_params)
    if len(names) != n_params:
        raise ValueError(f"degree {d} {parity} family needs {n_params} parameter names")
    vars = CURVE_VARS + names
    half = d // 2

    def monomial(m: int) -> Polynomial:
        exps = {v: 0 for v in vars}
        return Polynomial(vars, {tuple(
            (m if v == "a0" else d - 2 * m if v == "a1" else m if v == "a2" else 0)
            for v in vars
        ): 1})

    def group_poly(g) -> Polynomial:
        if isinstance(g, tuple):
            m, partner = g
            if parity == "symmetric":
                return monomial(m) + monomial(partner)
            return monomial(m) - monomial(partner)
        return monomial(g)

    poly = group_poly(groups[0])
    for name, g in zip(names, groups[1:]):
        poly = poly + Polynomial.variable(vars, name) * group_poly(g)
    return CurveFamily(d, parity, names, poly)


def curve_c2() -> Polynomial:
    a0, a1, a2 = ring(CURVE_VARS)
    return a0 * a2 + a1 ** 2


def curve_c2a() -> Polynomial:
    a0, a1, a2 = ring(CURVE_VARS)
    return a0 * a2 - a1 ** 2


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    parameters: tuple[str, ...]  # derived parameter values, leading group first
    reason: str | None = None


def family_membership(p: Polynomial, d: int, parity: str = "symmetric") -> MembershipReport:
    """Decide whether p (over a0,a1,a2 plus free parameters) lies in the
    degree-d family, and read off the parameter values it realizes.

    The coefficients may be polynomials in the extra parameters; membership
    requires the leading group to have coefficient 1 and paired monomials to
    share (symmetric) or negate (antisymmetric) their coefficients.
    """
    half = d // 2
    vars = p.vars
    extra = tuple(v for v in vars if v not in CURVE_VARS)
    zero = Polynomial.zero(vars)
    coeffs: dict[int, Polynomial] = {m: zero for m in range(half + 1)}
    for mono, c in p.monomials():
        exp = dict(zip(vars, mono.exponents))
        m0, m1, m2 = exp.get("a0", 0), exp.get("a1", 0), exp.get("a2", 0)
        if m0 != m2 or m1 != d - 2 * m0 or m0 > half:
            return MembershipReport(False, (), f"stray monomial {mono}")
        term = Polynomial(vars, {tuple(exp.get(v, 0) if v in extra else 0 for v in vars): c})
        coeffs[m0] = coeffs[m0] + term
    sign = 1 if parity == "symmetric" else -1
    groups = _curve_groups(d)
    derived: list[str] = []
    for i, g in enumerate(groups):
        if isinstance(g, tuple):
            m, partner = g
            if coeffs[m] != sign * coeffs[partner]:
                return MembershipReport(False, (), f"pair ({m},{partner}) coefficients differ")
            value = coeffs[m]
        else:
            if parity == "antisymmetric":
                if not coeffs[g].is_zero:
                    return MembershipReport(False, (), "self-paired monomial present in antisymmetric family")
                continue
            value = coeffs[g]
        if i == 0:
            if not (value.is_constant and value.constant_value() == 1):
                return MembershipReport(False, (), f"leading group coefficient {value} != 1")
        else:
            derived.append(value.to_text())
    return MembershipReport(True, tuple(derived))


# ----------------------------------------------------------------------
# The factorization identities between the families


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    holds: bool
    residual: str


def verify_curve_identities() -> list[IdentityCheck]:
    """Every curve factorization identity, checked as exact polynomial
    equalities with the parameters symbolic (the complex case modulo
    iota^2 + 1)."""
    out: list[IdentityCheck] = []

    def check(name: str, lhs: Polynomial, rhs: Polynomial):
        diff = lhs - rhs
        out.append(IdentityCheck(name, diff.is_zero, diff.to_text()))

    c4 = construct_curve(4)
    c6 = construct_curve(6)
    c8 = construct_curve(8)
    c12 = construct_curve(12)
    c6a = construct_curve(6, "antisymmetric")
    c8a = construct_curve(8, "antisymmetric")
    c4a_family = construct_curve(4, "antisymmetric")

    base = CURVE_VARS
    c2 = curve_c2()
    c2a = curve_c2a()
    check("C4(+2) = C2^2", c4.at(2), c2 ** 2)
    check("C4(-2) = C2a^2", c4.at(-2), c2a ** 2)
    check("C4a = C2 * C2a", c4a_family.at(), c2 * c2a)

    # complex splitting of C4(0), handled modulo iota^2 + 1
    vi = base + ("iota",)
    a0, a1, a2, iota = ring(vi)
    prod = reduce_modulo_i((a0 * a2 + iota * a1 ** 2) * (a0 * a2 - iota * a1 ** 2))
    check("C4(0) = (a0 a2 + i a1^2)(a0 a2 - i a1^2)", c4.at(0).with_vars(vi), prod)

    # sextic factorizations with the parameter symbolic
    va = base + ("alpha",)
    ga = ring(va)
    alpha = ga[3]
    check("C6(alpha) = C4(alpha-1) * C2",
          c6.at(alpha, alpha), c4.at(alpha - 1) * c2.with_vars(va))
    check("C6a(alpha) = C4(alpha-1) * C2a",
          c6a.at(alpha, alpha), c4.at(alpha - 1) * c2a.with_vars(va))

    # octics
    vx = base + ("x1", "x2")
    _, _, _, x1, x2 = ring(vx)
    check("C8(x1+x2, 2+x1*x2) = C4(x1) * C4(x2)",
          c8.at(x1 + x2, 2 + x1 * x2), c4.at(x1) * c4.at(x2))
    check("C8a(alpha) = C4(alpha) * C2 * C2a",
          c8a.at(alpha, alpha), c4.at(alpha) * (c2 * c2a).with_vars(va))

    # degree 12 through the elementary symmetric functions
    vxx = base + ("x1", "x2", "x3")
    _, _, _, y1, y2, y3 = ring(vxx)
    s1 = y1 + y2 + y3
    s2 = y1 * y2 + y1 * y3 + y2 * y3
    s3 = y1 * y2 * y3
    check("C12(s1, 3+s2, 2*s1+s3) = C4(x1) C4(x2) C4(x3)",
          c12.at(s1, 3 + s2, 2 * s1 + s3), c4.at(y1) * c4.at(y2) * c4.at(y3))

    # C2 times a product of quartics stays in the symmetric families
    def membership(name, prod_poly, d):
        rep = family_membership(prod_poly, d)
        out.append(IdentityCheck(
            name, rep.member,
            "parameters " + ", ".join(rep.parameters) if rep.member else (rep.reason or ""),
        ))

    vx1 = base + ("x1",)
    _, _, _, z1 = ring(vx1)
    membership("C2 * C4(x1) lies in the degree-6 family", c2.with_vars(vx1) * c4.at(z1), 6)
    membership("C2 * C4(x1) C4(x2) lies in the degree-10 family",
               c2.with_vars(vx) * c4.at(x1) * c4.at(x2), 10)
    membership("C2 * C4(x1) C4(x2) C4(x3) lies in the degree-14 family",
               c2.with_vars(vxx) * c4.at(y1) * c4.at(y2) * c4.at(y3), 14)

    # resolvents tying the family arguments to the quartic roots
    vq = ("x", "x1", "x2")
    x, r1, r2 = ring(vq)
    check("quadratic resolvent x^2 - alpha x + (beta - 2) for alpha=x1+x2, beta=2+x1*x2",
          x ** 2 - (r1 + r2) * x + ((2 + r1 * r2) - 2), (x - r1) * (x - r2))
    vc = ("x", "x1", "x2", "x3")
    xx, t1, t2, t3 = ring(vc)
    e1 = t1 + t2 + t3
    e2 = t1 * t2 + t1 * t3 + t2 * t3
    e3 = t1 * t2 * t3
    check("cubic resolvent x^3 - a1 x^2 + (a2-3) x - (a3-2 a1) for the symmetric-function arguments",
          xx ** 3 - e1 * xx ** 2 + ((3 + e2) - 3) * xx - ((2 * e1 + e3) - 2 * e1),
          (xx - t1) * (xx - t2) * (xx - t3))
    return out
