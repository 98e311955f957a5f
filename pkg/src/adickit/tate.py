"""Truncated Tate-algebra arithmetic and finitely presented quotients.

A presentation is always flattened over a scalar coefficient base: a p-adic
field at fixed precision, the integers, or a finite ring.  Towers (B over A
over the base) are represented by variable/generator prefixes, so composing
and base-changing presentations is substitution on the flat data.

Groebner bases are computed over exact coefficients (rationals for p-adic
bases) and only the Gauss-norm / series layer sees tracked p-adic precision;
p-adic Buchberger loses precision catastrophically, and every quotient in
scope has an exact-coefficient presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .finiterings import FiniteRing, FiniteRingElement
from .groebner import (DegreeOverflowError, buchberger, normal_form,
                       quotient_dimension, staircase_for)
from .norms import ExactNorm, norm_max
from .padics import DEFAULT_PRECISION, PadicNumber, PrecisionLossError
from .poly import Poly, exp_coprime, exp_total, grevlex_key, render_poly

DEFAULT_DEGREE_CAP = 8


class PresentationError(ValueError):
    """The requested operation is not available for this presentation."""


@dataclass(frozen=True)
class QpBase:
    """Coefficient field Q_p carried at precision N."""
    p: int
    precision: int = DEFAULT_PRECISION

    def __str__(self):
        return f"Qp({self.p},{self.precision})"


@dataclass(frozen=True)
class IntegerBase:
    """Coefficient ring Z; used for lifting corpora over mixed characteristics."""

    def __str__(self):
        return "ZZ"


def base_name(base) -> str:
    if isinstance(base, FiniteRing):
        return base.name
    return str(base)


# -- truncated series with p-adic coefficients -------------------------------

class TateSeries:
    """A multivariate series truncated at a total-degree cap, with tracked
    p-adic coefficients and honest overflow / precision-loss flags."""

    __slots__ = ("p", "precision", "varnames", "degree_cap", "coeffs", "flags")

    def __init__(self, p: int, precision: int, varnames: tuple,
                 degree_cap: int, coeffs: dict, flags: frozenset = frozenset()):
        self.p = p
        self.precision = precision
        self.varnames = tuple(varnames)
        self.degree_cap = degree_cap
        self.coeffs = {e: c for e, c in coeffs.items() if c}
        self.flags = flags

    @classmethod
    def from_poly(cls, poly: Poly, p: int, varnames: tuple,
                  precision: int = DEFAULT_PRECISION,
                  degree_cap: int = DEFAULT_DEGREE_CAP) -> "TateSeries":
        coeffs = {}
        flags = set()
        for e, c in poly.terms.items():
            if exp_total(e) > degree_cap:
                flags.add("overflow")
                continue
            if isinstance(c, PadicNumber):
                coeffs[e] = c
            else:
                coeffs[e] = PadicNumber.exact(Fraction(c), p)
        return cls(p, precision, varnames, degree_cap, coeffs,
                   frozenset(flags))

    @classmethod
    def zero(cls, p: int, varnames: tuple,
             precision: int = DEFAULT_PRECISION,
             degree_cap: int = DEFAULT_DEGREE_CAP) -> "TateSeries":
        return cls(p, precision, varnames, degree_cap, {})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "TateSeries"):
        if (self.p, self.varnames, self.degree_cap, self.precision) != \
                (other.p, other.varnames, other.degree_cap, other.precision):
            raise PresentationError("series caps or variables do not match")

    def __add__(self, other: "TateSeries") -> "TateSeries":
        self._check(other)
        coeffs = dict(self.coeffs)
        flags = set(self.flags | other.flags)
        for e, c in other.coeffs.items():
            if e in coeffs:
                try:
                    s = coeffs[e] + c
                    if s:
                        coeffs[e] = s
                    else:
                        del coeffs[e]
                except PrecisionLossError:
                    del coeffs[e]
                    flags.add("precision_loss")
            else:
                coeffs[e] = c
        return TateSeries(self.p, self.precision, self.varnames,
                          self.degree_cap, coeffs, frozenset(flags))

    def __mul__(self, other: "TateSeries") -> "TateSeries":
        self._check(other)
        acc: dict = {}
        flags = set(self.flags | other.flags)
        from .poly import exp_mul
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = exp_mul(e1, e2)
                if exp_total(e) > self.degree_cap:
                    flags.add("overflow")
                    continue
                prod = c1 * c2
                if e in acc:
                    try:
                        s = acc[e] + prod
                        if s:
                            acc[e] = s
                        else:
                            del acc[e]
                    except PrecisionLossError:
                        del acc[e]
                        flags.add("precision_loss")
                elif prod:
                    acc[e] = prod
        return TateSeries(self.p, self.precision, self.varnames,
                          self.degree_cap, acc, frozenset(flags))

    def __eq__(self, other):
        if not isinstance(other, TateSeries):
            return NotImplemented
        return (self.p == other.p and self.varnames == other.varnames
                and self.coeffs == other.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, key=grevlex_key, reverse=True):
            mono = "*".join(f"{self.varnames[i]}^{k}" if k > 1 else self.varnames[i]
                            for i, k in enumerate(e) if k)
            c = self.coeffs[e]
            parts.append(f"({c!r})*{mono}" if mono else f"({c!r})")
        tail = f" [{','.join(sorted(self.flags))}]" if self.flags else ""
        return " + ".join(parts) + tail


def tate_arith(op: str, f: TateSeries, g: TateSeries) -> TateSeries:
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown series operation {op!r}")


def gauss_norm(f: TateSeries) -> ExactNorm:
    """Sup norm over the coefficients; exactly zero iff the series is zero.
    When the series carries a precision-loss flag the value is a lower bound."""
    if f.is_zero:
        return ExactNorm.zero()
    return norm_max(*(c.norm() for c in f.coeffs.values()))


# -- presentations -----------------------------------------------------------

class RingPresentation:
    """B = base<X_1..X_n>/(f_1..f_p) with ordered generators.

    The integral-subring data and the declared-property flags are carried
    verbatim and never participate in computation.
    """

    def __init__(self, base, varnames: tuple, gens: list[Poly],
                 degree_cap: int = DEFAULT_DEGREE_CAP,
                 declared: frozenset = frozenset(),
                 integral_generators: tuple = (),
                 parent: "RingPresentation | None" = None):
        self.base = base
        self.parent = parent  # the declared base ring of the tower, if any
        self.varnames = tuple(varnames)
        if len(set(self.varnames)) != len(self.varnames):
            raise PresentationError("duplicate variable names")
        self.gens = list(gens)
        for g in self.gens:
            if g.nvars != len(self.varnames):
                raise PresentationError("generator variable count mismatch")
            if not isinstance(base, FiniteRing):
                for c in g.terms.values():
                    # Buchberger over p-adic coefficients loses precision
                    # catastrophically; generators stay exact
                    if isinstance(c, PadicNumber):
                        raise PresentationError(
                            "generators need exact rational coefficients")
        self.degree_cap = degree_cap
        self.declared = frozenset(declared)
        self.integral_generators = tuple(integral_generators)
        self._basis = None
        self._dim = None

    # -- coefficient domain helpers ----------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.varnames)

    def coeff_one(self):
        if isinstance(self.base, FiniteRing):
            return self.base.one
        return Fraction(1)

    def coeff_from_int(self, n: int):
        if isinstance(self.base, FiniteRing):
            return self.base.from_int(n)
        return Fraction(n)

    def var(self, name: str) -> Poly:
        return Poly.variable(self.varnames.index(name), self.nvars,
                             self.coeff_one())

    def const(self, c) -> Poly:
        if isinstance(self.base, FiniteRing) and not isinstance(c, FiniteRingElement):
            c = self.base.from_int(int(c))
        elif not isinstance(self.base, FiniteRing):
            c = Fraction(c)
        return Poly.constant(c, self.nvars)

    def has_field_coefficients(self) -> bool:
        if isinstance(self.base, QpBase):
            return True
        if isinstance(self.base, FiniteRing):
            return self.base.is_field
        return False

    # -- normal forms --------------------------------------------------------

    def groebner_basis(self) -> list[Poly]:
        """Reduced basis used for canonical normal forms.

        Field coefficients go through Buchberger.  Over a finite non-field
        base the generators must already be a separated monic rewrite system
        (unit leading coefficients, pure-power leading monomials of distinct
        variables); pairwise-coprime leading terms make such a system a
        Groebner basis of its ideal.
        """
        if self._basis is not None:
            return self._basis
        if self.has_field_coefficients():
            self._basis = buchberger(self.gens)
        elif isinstance(self.base, FiniteRing):
            self._basis = self._validated_rewrite_system()
        else:
            raise PresentationError(
                "normal forms over the integer base are not supported; "
                "use point functors")
        return self._basis

    def _validated_rewrite_system(self) -> list[Poly]:
        basis = []
        seen_vars = set()
        for g in self.gens:
            if g.is_zero:
                continue
            exp, lc = g.leading()
            if not lc.is_unit():
                raise PresentationError(
                    "finite-base presentation needs unit leading coefficients")
            support = [i for i, e in enumerate(exp) if e]
            if len(support) != 1 or support[0] in seen_vars:
                raise PresentationError(
                    "finite-base presentation needs one pure-power leading "
                    "monomial per variable")
            seen_vars.add(support[0])
            basis.append(g.scale(lc.inverse()))
        for i, g in enumerate(basis):
            for h in basis[i + 1:]:
                if not exp_coprime(g.leading()[0], h.leading()[0]):
                    raise PresentationError("leading monomials must be coprime")
        return sorted(basis, key=lambda g: grevlex_key(g.leading()[0]))

    def normal_form(self, f: Poly) -> Poly:
        return normal_form(f, self.groebner_basis())

    def normal_form_series(self, f: TateSeries) -> TateSeries:
        """Reduce a truncated p-adic series against the cached basis.

        The basis is exact; the division happens in tracked p-adic
        arithmetic, and full cancellations show up as a precision-loss flag
        rather than a silent zero."""
        if not isinstance(self.base, QpBase):
            raise PresentationError("series reduction needs a p-adic base")
        if f.varnames != self.varnames:
            raise PresentationError("series variables do not match")
        p, prec = self.base.p, f.precision
        basis = [g.map_coeffs(lambda c: PadicNumber.exact(Fraction(c), p))
                 for g in self.groebner_basis()]
        work = Poly(self.nvars, dict(f.coeffs), normalize=False)
        flags = set(f.flags)
        try:
            reduced = normal_form(work, basis,
                                  degree_guard=f.degree_cap)
        except DegreeOverflowError:
            return TateSeries(p, prec, self.varnames, f.degree_cap,
                              f.coeffs, frozenset(flags | {"overflow"}))
        except PrecisionLossError:
            return TateSeries(p, prec, self.varnames, f.degree_cap,
                              f.coeffs, frozenset(flags | {"precision_loss"}))
        return TateSeries(p, prec, self.varnames, f.degree_cap,
                          dict(reduced.terms), frozenset(flags))

    def nf_zero(self, f: Poly) -> bool:
        return self.normal_form(f).is_zero

    def dimension(self) -> int:
        if self._dim is None:
            self._dim = quotient_dimension(self.groebner_basis(), self.nvars)
        return self._dim

    def staircase(self, max_degree: int | None = None) -> list[tuple]:
        cap = self.degree_cap if max_degree is None else max_degree
        return staircase_for(self.nvars, self.groebner_basis(), cap)

    # -- structure -----------------------------------------------------------

    def extend(self, new_varnames: tuple, new_gens: list[Poly],
               declared: frozenset = frozenset()) -> "RingPresentation":
        """Adjoin variables and relations (the flattened Quot construction).
        Existing generators are reinterpreted in the larger variable list;
        new generators must already use the combined list."""
        varnames = self.varnames + tuple(new_varnames)
        n = len(varnames)
        gens = [g.extend_vars(n) for g in self.gens]
        for g in new_gens:
            if g.nvars != n:
                raise PresentationError(
                    "new generators must use the extended variable list")
            gens.append(g)
        return RingPresentation(self.base, varnames, gens, self.degree_cap,
                                self.declared | declared,
                                self.integral_generators, parent=self)

    def fresh_varname(self, stem: str) -> str:
        if stem not in self.varnames:
            return stem
        k = 2
        while f"{stem}{k}" in self.varnames:
            k += 1
        return f"{stem}{k}"

    def is_tower_extension_of(self, other: "RingPresentation") -> bool:
        """Is `other` a variable/generator prefix of self (same base)?"""
        if base_key(self.base) != base_key(other.base):
            return False
        if self.varnames[:other.nvars] != other.varnames:
            return False
        if len(self.gens) < len(other.gens):
            return False
        lifted = [g.extend_vars(self.nvars) for g in other.gens]
        return self.gens[:len(lifted)] == lifted

    def as_series(self, f: Poly) -> TateSeries:
        if not isinstance(self.base, QpBase):
            raise PresentationError("series layer needs a p-adic base")
        return TateSeries.from_poly(f, self.base.p, self.varnames,
                                    self.base.precision, self.degree_cap)

    def describe(self) -> str:
        rel = "; ".join(render_poly(g, self.varnames) for g in self.gens)
        head = f"{base_name(self.base)}<{','.join(self.varnames)}>"
        return f"{head}/({rel})" if rel else head

    def __eq__(self, other):
        if not isinstance(other, RingPresentation):
            return NotImplemented
        return (base_key(self.base) == base_key(other.base)
                and self.varnames == other.varnames
                and self.gens == other.gens)

    def __repr__(self):
        return f"RingPresentation({self.describe()})"


def _integral_membership(poly: Poly, gens: list[Poly]) -> bool:
    """Ideal membership over the integers, certified through the rational
    basis: sufficient when the pulled-back combination has integral
    coefficients (which covers tower inclusions)."""
    if poly.is_zero:
        return True
    if not gens:
        return False
    from .groebner import buchberger_tracked
    basis, rows = buchberger_tracked(gens)
    rem, quot = normal_form(poly, basis, track=True)
    if not rem.is_zero:
        return False
    combo = [Poly.zero(poly.nvars) for _ in gens]
    for a, q in enumerate(quot):
        if q.is_zero:
            continue
        combo = [c + q * r for c, r in zip(combo, rows[a])]
    return all(c.denominator == 1
               for piece in combo for c in piece.terms.values())


def base_key(base):
    if isinstance(base, FiniteRing):
        return ("finite", id(base))
    return base


def free_presentation(base, varnames: tuple,
                      degree_cap: int = DEFAULT_DEGREE_CAP) -> RingPresentation:
    return RingPresentation(base, varnames, [], degree_cap)


class MorphismPresentation:
    """A base-algebra map A -> B given by images of A's variables in B."""

    def __init__(self, source: RingPresentation, target: RingPresentation,
                 images: list[Poly], check: bool = True):
        if base_key(source.base) != base_key(target.base):
            raise PresentationError("morphism endpoints live over different bases")
        if len(images) != source.nvars:
            raise PresentationError("one image per source variable required")
        self.source = source
        self.target = target
        self.images = [im if im.nvars == target.nvars else
                       im.extend_vars(target.nvars) for im in images]
        if check:
            for g in source.gens:
                pushed = self.apply(g)
                try:
                    ok = target.nf_zero(pushed)
                except PresentationError:
                    ok = _integral_membership(pushed, target.gens)
                if not ok:
                    raise PresentationError(
                        "images do not satisfy the source relations")

    @classmethod
    def identity(cls, pres: RingPresentation) -> "MorphismPresentation":
        one = pres.coeff_one()
        return cls(pres, pres,
                   [Poly.variable(i, pres.nvars, one) for i in range(pres.nvars)],
                   check=False)

    @classmethod
    def inclusion(cls, source: RingPresentation,
                  target: RingPresentation) -> "MorphismPresentation":
        """The structural map of a tower extension."""
        if not target.is_tower_extension_of(source):
            raise PresentationError("target is not a tower extension of source")
        one = target.coeff_one()
        return cls(source, target,
                   [Poly.variable(i, target.nvars, one)
                    for i in range(source.nvars)], check=False)

    def apply(self, f: Poly) -> Poly:
        """Push a polynomial over the source variables into the target."""
        if f.nvars != self.source.nvars:
            raise PresentationError("polynomial is not over the source variables")
        return f.substitute(self.images, self.target.nvars, lambda c: c,
                            self.target.coeff_one())

    def is_identity_inclusion(self) -> bool:
        if not self.target.is_tower_extension_of(self.source):
            return False
        one = self.target.coeff_one()
        return all(
            im == Poly.variable(i, self.target.nvars, one)
            for i, im in enumerate(self.images))

    def describe(self) -> str:
        imgs = ", ".join(
            f"{v} -> {render_poly(im, self.target.varnames)}"
            for v, im in zip(self.source.varnames, self.images))
        return f"{self.source.describe()} --[{imgs}]--> {self.target.describe()}"

    def __repr__(self):
        return f"MorphismPresentation({self.describe()})"


def compose_presentations(f: MorphismPresentation,
                          g: MorphismPresentation) -> MorphismPresentation:
    """The composite A -> C of A -> B and B -> C."""
    if f.target != g.source:
        raise PresentationError(
            "middle presentations do not match; cannot compose")
    return MorphismPresentation(f.source, g.target,
                                [g.apply(im) for im in f.images], check=False)


def base_change(pres: RingPresentation,
                phi: MorphismPresentation) -> MorphismPresentation:
    """Push a tower extension B of A along phi: A -> A'.

    Returns the structural morphism A' -> B' = A' (x)_A B; the underlying
    presentation is its target.
    """
    src = phi.source
    if not pres.is_tower_extension_of(src):
        raise PresentationError(
            "presentation is not a tower extension of phi's source")
    tgt = pres  # B over A
    aprime = phi.target
    extra_vars = tgt.varnames[src.nvars:]
    extra_gens = tgt.gens[len(src.gens):]

    renamed = []
    result = aprime
    for name in extra_vars:
        fresh = result.fresh_varname(name)
        renamed.append(fresh)
        result = result.extend((fresh,), [])
    n_new = result.nvars
    one = result.coeff_one()
    # old variable i -> phi image (A-vars) or the adjoined copy (extras)
    values = [im.extend_vars(n_new) for im in phi.images]
    values += [Poly.variable(aprime.nvars + j, n_new, one)
               for j in range(len(extra_vars))]
    pushed = [g.substitute(values, n_new, lambda c: c, one)
              for g in extra_gens]
    final = RingPresentation(result.base, result.varnames,
                             result.gens + pushed, result.degree_cap,
                             pres.declared, pres.integral_generators,
                             parent=aprime)
    return MorphismPresentation.inclusion(aprime, final)
