"""Finite commutative test rings with full element enumeration.

A ring is a free Z/m_1 x ... x Z/m_k additive group with commutative,
associative structure constants on the basis; multiplication extends
bilinearly, so verifying the axioms on basis tuples verifies them everywhere.
Builders cover Z/m, GF(p^k), quotients F_p[x_1..x_k]/I of cardinality <= 4096,
and finite products, which is exactly the test-ring zoo the infinitesimal
classifiers quantify over.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .groebner import (buchberger, is_zero_dimensional, normal_form,
                       staircase_for)
from .poly import Poly, grevlex_key

CARDINALITY_CAP = 4096


class FiniteRingElement:
    __slots__ = ("parent", "coords")

    def __init__(self, parent: "FiniteRing", coords: tuple):
        self.parent = parent
        self.coords = coords

    def _check(self, other):
        if self.parent is not other.parent:
            raise ValueError("elements of different rings")

    def __add__(self, other: "FiniteRingElement") -> "FiniteRingElement":
        self._check(other)
        m = self.parent.moduli
        return FiniteRingElement(self.parent, tuple(
            (a + b) % m[i] for i, (a, b) in enumerate(zip(self.coords,
                                                          other.coords))))

    def __neg__(self) -> "FiniteRingElement":
        m = self.parent.moduli
        return FiniteRingElement(self.parent, tuple(
            (-a) % m[i] for i, a in enumerate(self.coords)))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "FiniteRingElement") -> "FiniteRingElement":
        self._check(other)
        parent = self.parent
        acc = [0] * len(parent.moduli)
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(other.coords):
                if b == 0:
                    continue
                prod = parent.basis_products[i][j]
                ab = a * b
                for k, c in enumerate(prod):
                    if c:
                        acc[k] += ab * c
        return FiniteRingElement(parent, tuple(
            acc[k] % parent.moduli[k] for k in range(len(acc))))

    def times_int(self, k: int) -> "FiniteRingElement":
        m = self.parent.moduli
        return FiniteRingElement(self.parent, tuple(
            (a * k) % m[i] for i, a in enumerate(self.coords)))

    def __pow__(self, k: int) -> "FiniteRingElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = self.parent.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "FiniteRingElement":
        inv = self.parent._inverse_of(self)
        if inv is None:
            raise ZeroDivisionError(f"{self} is not a unit in {self.parent.name}")
        return inv

    def is_unit(self) -> bool:
        return self.parent._inverse_of(self) is not None

    def __bool__(self) -> bool:
        return any(self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteRingElement):
            return NotImplemented
        return self.parent is other.parent and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.parent), self.coords))

    def key(self) -> tuple:
        """Deterministic sort key."""
        return self.coords

    def __repr__(self) -> str:
        return self.parent.render(self)


class FiniteRing:
    def __init__(self, moduli: tuple, basis_products: tuple, one_coords: tuple,
                 name: str, basis_names: tuple, is_field: bool | None = None,
                 lift_model=None):
        self.moduli = moduli
        self.basis_products = basis_products
        self.one_coords = one_coords
        self.name = name
        self.basis_names = basis_names
        self._is_field = is_field
        self.lift_model = lift_model
        self._inverses: dict = {}
        self._nilradical = None
        self.cardinality = 1
        for m in moduli:
            self.cardinality *= m
        if self.cardinality > CARDINALITY_CAP:
            raise ValueError(
                f"cardinality {self.cardinality} exceeds cap {CARDINALITY_CAP}")
        self.zero = FiniteRingElement(self, (0,) * len(moduli))
        self.one = FiniteRingElement(self, one_coords)
        self._verify_basis_axioms()

    # Bilinearity of the product reduces commutativity/associativity on all
    # tuples to the basis tuples, so this check is exhaustive in effect.
    def _verify_basis_axioms(self):
        basis = [FiniteRingElement(self, tuple(1 if j == i else 0
                                               for j in range(len(self.moduli))))
                 for i in range(len(self.moduli))]
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                if (a * b) != (b * a):
                    raise ValueError(f"{self.name}: basis product not commutative")
                for c in basis:
                    if ((a * b) * c) != (a * (b * c)):
                        raise ValueError(f"{self.name}: basis product not associative")
        if self.one * basis[0] != basis[0]:
            raise ValueError(f"{self.name}: unit fails on basis")

    def element(self, coords) -> FiniteRingElement:
        return FiniteRingElement(self, tuple(
            c % m for c, m in zip(coords, self.moduli)))

    def from_int(self, n: int) -> FiniteRingElement:
        return self.one.times_int(n)

    def elements(self):
        def rec(i, acc):
            if i == len(self.moduli):
                yield FiniteRingElement(self, tuple(acc))
                return
            for c in range(self.moduli[i]):
                acc.append(c)
                yield from rec(i + 1, acc)
                acc.pop()
        yield from rec(0, [])

    @property
    def characteristic(self) -> int:
        order = 1
        for c, m in zip(self.one_coords, self.moduli):
            if c:
                o = m // gcd(m, c)
                order = order * o // gcd(order, o)
        return order

    def _inverse_of(self, x: FiniteRingElement):
        if x.coords in self._inverses:
            return self._inverses[x.coords]
        found = None
        for y in self.elements():
            if x * y == self.one:
                found = y
                break
        self._inverses[x.coords] = found
        return found

    @property
    def is_field(self) -> bool:
        if self._is_field is None:
            self._is_field = all(y.is_unit() for y in self.elements() if y)
        return self._is_field

    def nilradical(self) -> frozenset:
        """The set of nilpotent elements (the unique maximal nilpotent ideal)."""
        if self._nilradical is None:
            e = 1
            while (1 << e) < self.cardinality:
                e += 1
            nil = []
            for x in self.elements():
                y = x
                for _ in range(e):
                    y = y * y
                if not y:
                    nil.append(x)
            self._nilradical = frozenset(nil)
        return self._nilradical

    def render(self, x: FiniteRingElement) -> str:
        parts = []
        for c, name in zip(x.coords, self.basis_names):
            if c == 0:
                continue
            if name == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(name)
            else:
                parts.append(f"{c}*{name}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"FiniteRing({self.name}, {self.cardinality} elements)"


def nilradical(ring) -> frozenset:
    return ring.nilradical()


# -- builders ---------------------------------------------------------------

@lru_cache(maxsize=None)
def zmod(m: int) -> FiniteRing:
    if m < 2:
        raise ValueError("Zmod(m) needs m >= 2")
    is_prime = m > 1 and all(m % d for d in range(2, int(m ** 0.5) + 1))
    return FiniteRing((m,), (((1,),),), (1,), f"Zmod({m})", ("1",),
                      is_field=is_prime, lift_model=("int",))


def _poly_mod(num: list[int], den: list[int], p: int) -> list[int]:
    """Remainder of univariate num by monic den over F_p (coefficient lists,
    index = degree)."""
    num = [c % p for c in num]
    d = len(den) - 1
    while len(num) >= len(den):
        lead = num[-1]
        if lead:
            shift = len(num) - len(den)
            for i, c in enumerate(den):
                num[shift + i] = (num[shift + i] - lead * c) % p
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    return num


def _monic_polys(p: int, degree: int):
    def rec(i, acc):
        if i == degree:
            yield acc + [1]
            return
        for c in range(p):
            yield from rec(i + 1, acc + [c])
    yield from rec(0, [])


def _find_irreducible(p: int, k: int) -> list[int]:
    for cand in _monic_polys(p, k):
        reducible = False
        for d in range(1, k // 2 + 1):
            for div in _monic_polys(p, d):
                if not _poly_mod(list(cand), div, p):
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            return cand
    raise RuntimeError("no irreducible polynomial found")  # unreachable


@lru_cache(maxsize=None)
def gf(p: int, k: int = 1) -> FiniteRing:
    """The field with p^k elements, k <= 4, via a fixed irreducible polynomial."""
    if k == 1:
        ring = zmod(p)
        if not ring.is_field:
            raise ValueError(f"GF({p}) needs a prime")
        return ring
    if k > 4:
        raise ValueError("GF(p,k) supported for k <= 4")
    modulus = _find_irreducible(p, k)
    basis_products = []
    for i in range(k):
        row = []
        for j in range(k):
            prod = [0] * (i + j) + [1]
            rem = _poly_mod(prod, modulus, p)
            rem += [0] * (k - len(rem))
            row.append(tuple(rem))
        basis_products.append(tuple(row))
    names = tuple("1" if i == 0 else ("x" if i == 1 else f"x^{i}")
                  for i in range(k))
    return FiniteRing((p,) * k, tuple(basis_products), (1,) + (0,) * (k - 1),
                      f"GF({p},{k})", names, is_field=True,
                      lift_model=("intpoly", tuple(modulus)))


def fp_quotient(p: int, varnames: tuple, relations: list[Poly]) -> FiniteRing:
    """F_p[x_1..x_k]/(relations) when the quotient is finite and within the
    cardinality cap."""
    base = gf(p, 1)
    nvars = len(varnames)

    def to_base(c):
        if isinstance(c, FiniteRingElement):
            if c.parent is base:
                return c
            if c.parent.moduli == (p,):
                return base.from_int(c.coords[0])
            raise ValueError("relation coefficients must lie in the prime field")
        if isinstance(c, Fraction):
            if c.denominator % p == 0:
                raise ValueError("coefficient denominator divisible by p")
            return base.from_int(c.numerator * pow(c.denominator, -1, p))
        return base.from_int(int(c))

    gens = []
    for rel in relations:
        if rel.nvars != nvars:
            raise ValueError("relation variable count mismatch")
        gens.append(rel.map_coeffs(to_base))
    basis = buchberger(gens)
    from .groebner import is_unit_ideal
    if is_unit_ideal(basis):
        raise ValueError("relations generate the unit ideal (zero ring)")
    if not is_zero_dimensional(basis, nvars):
        raise ValueError("quotient is not finite over F_p")
    # the staircase is finite; a degree bound of sum of leading degrees is safe
    bound = sum(g.total_degree() for g in basis) + 1 if basis else 1
    stairs = staircase_for(nvars, basis, bound)
    card = p ** len(stairs)
    if card > CARDINALITY_CAP:
        raise ValueError(f"cardinality {card} exceeds cap {CARDINALITY_CAP}")
    stairs = sorted(stairs, key=grevlex_key)
    index = {m: i for i, m in enumerate(stairs)}

    def nf_coords(poly: Poly) -> tuple:
        rem = normal_form(poly, basis)
        coords = [0] * len(stairs)
        for e, c in rem.terms.items():
            coords[index[e]] = c.coords[0]
        return tuple(coords)

    one = base.one
    basis_products = []
    for mi in stairs:
        row = []
        for mj in stairs:
            prod = Poly(nvars, {mi: one}).mul_term(mj, one)
            row.append(nf_coords(prod))
        basis_products.append(tuple(row))

    def mono_name(e):
        if not any(e):
            return "1"
        return "*".join(f"{varnames[i]}^{k}" if k > 1 else varnames[i]
                        for i, k in enumerate(e) if k)

    names = tuple(mono_name(m) for m in stairs)
    from .poly import render_poly
    rel_txt = ",".join(render_poly(g, varnames) for g in gens)
    return FiniteRing((p,) * len(stairs), tuple(basis_products),
                      nf_coords(Poly.constant(one, nvars)),
                      f"GF({p})[{','.join(varnames)}]/({rel_txt})", names)


def product_ring(a: FiniteRing, b: FiniteRing) -> FiniteRing:
    ka, kb = len(a.moduli), len(b.moduli)
    products = []
    for i in range(ka + kb):
        row = []
        for j in range(ka + kb):
            if i < ka and j < ka:
                row.append(a.basis_products[i][j] + (0,) * kb)
            elif i >= ka and j >= ka:
                row.append((0,) * ka + b.basis_products[i - ka][j - ka])
            else:
                row.append((0,) * (ka + kb))
        products.append(tuple(row))
    lift = None
    if a.lift_model and b.lift_model:
        lift = ("product", a, b)
    return FiniteRing(a.moduli + b.moduli, tuple(products),
                      a.one_coords + b.one_coords,
                      f"Prod({a.name},{b.name})",
                      tuple(f"({n},0)" for n in a.basis_names)
                      + tuple(f"(0,{n})" for n in b.basis_names),
                      is_field=False, lift_model=lift)


def dual_numbers(p: int) -> FiniteRing:
    """F_p[eps]/(eps^2)."""
    one = gf(p, 1).one
    eps_sq = Poly(1, {(2,): one})
    return fp_quotient(p, ("eps",), [eps_sq])


# -- ideals and quotients ----------------------------------------------------

def additive_closure(ring, gens) -> frozenset:
    """Subgroup of (R,+) generated by gens."""
    seen = {ring.zero}
    queue = [g for g in gens]
    while queue:
        x = queue.pop()
        if x in seen:
            continue
        new = {x}
        for y in list(seen):
            z = x + y
            if z not in seen:
                new.add(z)
        for z in new:
            if z not in seen:
                seen.add(z)
                queue.extend(z + g for g in gens)
    # close again until stable (handles generator sums of sums)
    changed = True
    while changed:
        changed = False
        for x in list(seen):
            for g in gens:
                z = x + g
                if z not in seen:
                    seen.add(z)
                    changed = True
    return frozenset(seen)


def ideal_generated(ring, gens) -> frozenset:
    """Ideal of a finite ring generated by gens."""
    scaled = [r * g for g in gens for r in ring.elements()]
    return additive_closure(ring, scaled)


def is_ideal(ring, subset: frozenset) -> bool:
    if ring.zero not in subset:
        return False
    for x in subset:
        for y in subset:
            if x + y not in subset:
                return False
        for r in ring.elements():
            if r * x not in subset:
                return False
    return True


class QuotientElement:
    __slots__ = ("parent", "rep")

    def __init__(self, parent: "QuotientRing", rep):
        self.parent = parent
        self.rep = rep

    def _lift(self, other):
        if self.parent is not other.parent:
            raise ValueError("elements of different quotient rings")
        return other.rep

    def __add__(self, other):
        return self.parent._wrap(self.rep + self._lift(other))

    def __neg__(self):
        return self.parent._wrap(-self.rep)

    def __sub__(self, other):
        return self.parent._wrap(self.rep - self._lift(other))

    def __mul__(self, other):
        return self.parent._wrap(self.rep * self._lift(other))

    def times_int(self, k: int):
        return self.parent._wrap(self.rep.times_int(k))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("inverses in quotient rings are not supported")
        result = self.parent.one
        for _ in range(k):
            result = result * self
        return result

    def __bool__(self):
        return self.rep != self.parent._zero_rep

    def __eq__(self, other):
        if not isinstance(other, QuotientElement):
            return NotImplemented
        return self.parent is other.parent and self.rep == other.rep

    def __hash__(self):
        return hash((id(self.parent), self.rep))

    def key(self):
        return self.rep.key()

    def __repr__(self):
        return f"[{self.rep!r}]"


class QuotientRing:
    """R/I for a finite ring R and an ideal I, with canonical coset
    representatives (minimal coordinate key)."""

    def __init__(self, ring, ideal: frozenset, name: str | None = None):
        self.base = ring
        self.ideal = ideal
        rep_of = {}
        for x in ring.elements():
            if x in rep_of:
                continue
            coset = sorted((x + i for i in ideal), key=lambda e: e.key())
            rep = coset[0]
            for y in coset:
                rep_of[y] = rep
        self._rep_of = rep_of
        self._zero_rep = rep_of[ring.zero]
        self.zero = QuotientElement(self, self._zero_rep)
        self.one = QuotientElement(self, rep_of[ring.one])
        self.cardinality = ring.cardinality // len(ideal)
        self.name = name or f"{ring.name}/I{len(ideal)}"
        self._nilradical = None

    def _wrap(self, rep):
        return QuotientElement(self, self._rep_of[rep])

    def project(self, x) -> QuotientElement:
        """The quotient map R -> R/I."""
        return QuotientElement(self, self._rep_of[x])

    def from_int(self, n: int) -> QuotientElement:
        return self._wrap(self.base.from_int(n))

    def elements(self):
        seen = set()
        for x in self.base.elements():
            r = self._rep_of[x]
            if r not in seen:
                seen.add(r)
                yield QuotientElement(self, r)

    @property
    def characteristic(self) -> int:
        n, acc = 1, self.one
        while acc:
            acc = acc + self.one
            n += 1
        return n

    def nilradical(self) -> frozenset:
        if self._nilradical is None:
            e = 1
            while (1 << e) < max(self.cardinality, 2):
                e += 1
            nil = []
            for x in self.elements():
                y = x
                for _ in range(e):
                    y = y * y
                if not y:
                    nil.append(x)
            self._nilradical = frozenset(nil)
        return self._nilradical

    def __repr__(self):
        return f"QuotientRing({self.name}, {self.cardinality} elements)"


def reduced_ring(ring):
    """R/Nil(R) together with the projection."""
    nil = ring.nilradical()
    q = QuotientRing(ring, nil, name=f"{ring.name}_red")
    return q, q.project


def canonical_scalar_map(base, ring):
    """The canonical coefficient map base -> ring when one exists.

    base may be None (integers), a Zmod/GF(p,1) prime ring, or the target
    itself.  Returns a callable on coefficients (ints/Fractions for the
    integer base, ring elements otherwise) or None.
    """
    if base is None:
        def from_integer(c):
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError("integer base cannot map a fraction")
                c = c.numerator
            return ring.from_int(int(c))
        return from_integer
    if base is ring:
        return lambda c: c
    if isinstance(base, FiniteRing) and len(base.moduli) == 1:
        m = base.moduli[0]
        if ring.characteristic != 0 and m % ring.characteristic == 0:
            return lambda c: ring.from_int(c.coords[0])
        return None
    return None
