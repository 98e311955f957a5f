"""Rational localizations and the finite-precision gluing exactness checker.

The sequence 0 -> B -> B<f/g> (+) B<g/f> -> B<f/g,g/f> -> 0 is checked on
truncated coefficient spaces by exact rank computations.  "Inconclusive" is a
first-class verdict: a clause is only reported "exact" when the containment
is certified at the cap, and only reported "failed" when the relevant image
has stabilized under extra working degree and the containment still fails, so
a false "exact" is impossible by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .groebner import DegreeOverflowError, unit_certificate
from .linalg import RowSpace, kernel_of_map, span_in_low_block
from .poly import Poly, exp_total, grevlex_key
from .tate import (IntegerBase, MorphismPresentation, PresentationError,
                   QpBase, RingPresentation)


def rational_localization(B: RingPresentation, f: Poly, g: Poly,
                          varname: str = "u"):
    """B<f/g> = B<u>/(g*u - f) plus the structural morphism B -> B<f/g>."""
    name = B.fresh_varname(varname)
    n = B.nvars + 1
    one = B.coeff_one()
    u = Poly.variable(B.nvars, n, one)
    relation = g.extend_vars(n) * u - f.extend_vars(n)
    loc = B.extend((name,), [relation])
    return loc, MorphismPresentation.inclusion(B, loc)


@dataclass
class CoveringCertificate:
    status: str                      # "true" | "false" | "inconclusive"
    f_coeff: Poly | None = None
    g_coeff: Poly | None = None
    ideal_coeffs: list | None = None
    note: str = ""

    def holds(self) -> bool:
        return self.status == "true"


def covering_check(B: RingPresentation, f: Poly, g: Poly) -> CoveringCertificate:
    """Decide 1 in I + (f, g) with an explicit combination as certificate."""
    gens = list(B.gens) + [f, g]
    try:
        if B.has_field_coefficients():
            cert = unit_certificate(gens)
            if cert is None:
                return CoveringCertificate("false")
            return CoveringCertificate("true", f_coeff=cert[-2],
                                        g_coeff=cert[-1],
                                        ideal_coeffs=cert[:-2])
        if isinstance(B.base, IntegerBase):
            cert = unit_certificate(gens)
            if cert is None:
                return CoveringCertificate("false")
            integral = all(c.denominator == 1
                           for poly in cert for c in poly.terms.values())
            if integral:
                return CoveringCertificate("true", f_coeff=cert[-2],
                                           g_coeff=cert[-1],
                                           ideal_coeffs=cert[:-2])
            return CoveringCertificate(
                "inconclusive",
                note="rational certificate exists but is not integral")
        # finite non-field base: only the easy constant-unit cases
        for poly, which in ((g, "g"), (f, "f")):
            nf = B.normal_form(poly)
            if not nf.is_zero and nf.total_degree() == 0:
                c = nf.leading()[1]
                if c.is_unit():
                    inv = Poly.constant(c.inverse(), B.nvars)
                    if which == "g":
                        return CoveringCertificate(
                            "true", f_coeff=Poly.zero(B.nvars), g_coeff=inv,
                            ideal_coeffs=[Poly.zero(B.nvars)] * len(B.gens))
                    return CoveringCertificate(
                        "true", f_coeff=inv, g_coeff=Poly.zero(B.nvars),
                        ideal_coeffs=[Poly.zero(B.nvars)] * len(B.gens))
        return CoveringCertificate(
            "inconclusive", note="no decision procedure over this base")
    except DegreeOverflowError:
        return CoveringCertificate("inconclusive",
                                   note="degree guard hit during the check")


@dataclass
class BinaryCovering:
    base_pres: RingPresentation
    f: Poly
    g: Poly
    loc_fg: RingPresentation
    loc_gf: RingPresentation
    joint: RingPresentation
    certificate: CoveringCertificate


def binary_covering(B: RingPresentation, f: Poly, g: Poly,
                    require_valid: bool = True) -> BinaryCovering:
    if B.has_field_coefficients():
        f, g = B.normal_form(f), B.normal_form(g)
    cert = covering_check(B, f, g)
    if require_valid and not cert.holds():
        raise PresentationError(
            f"(f, g) do not generate the unit ideal: {cert.status}")
    loc_fg, _ = rational_localization(B, f, g, "u")
    loc_gf, _ = rational_localization(B, g, f, "v")
    n = B.nvars + 2
    one = B.coeff_one()
    u = Poly.variable(B.nvars, n, one)
    v = Poly.variable(B.nvars + 1, n, one)
    fe, ge = f.extend_vars(n), g.extend_vars(n)
    joint = B.extend((loc_fg.varnames[-1], loc_gf.varnames[-1]),
                     [ge * u - fe, fe * v - ge])
    return BinaryCovering(B, f, g, loc_fg, loc_gf, joint, cert)


@dataclass
class ExactnessReport:
    left: str
    middle: str
    right: str
    degree_cap: int
    precision: int
    detail: dict = field(default_factory=dict)

    def all_exact(self) -> bool:
        return (self.left, self.middle, self.right) == ("exact",) * 3

    def to_json(self) -> dict:
        return {"left": self.left, "middle": self.middle, "right": self.right,
                "degree_cap": self.degree_cap, "precision": self.precision}


def _coords(poly: Poly, index: dict, width: int):
    vec = [Fraction(0)] * width
    for e, c in poly.terms.items():
        vec[index[e]] = c
    return vec


class _TruncatedRing:
    """Staircase coordinates of a presentation at a working degree."""

    def __init__(self, pres: RingPresentation, degree: int):
        self.pres = pres
        self.monomials = sorted(pres.staircase(degree), key=grevlex_key)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.width = len(self.monomials)

    def nf_coords(self, poly: Poly):
        return _coords(self.pres.normal_form(poly), self.index, self.width)

    def low_indices(self, degree: int):
        return [i for i, m in enumerate(self.monomials)
                if exp_total(m) <= degree]


def gluing_sequence_check(cov: BinaryCovering, degree_cap: int = 6,
                          precision: int = 6,
                          margin: int = 3) -> ExactnessReport:
    """Check the three exactness clauses on degree-capped coefficient spaces.

    The image spans are recomputed at an enlarged working degree before a
    clause is allowed to fail: degree-cap staircases are grevlex-sorted, so
    the degree <= cap block of a wider coordinate space matches the cap-level
    coordinates position by position.
    """
    one = Fraction(1)
    nb1, nb2, nj = cov.loc_fg.nvars, cov.loc_gf.nvars, cov.joint.nvars

    def into_loc1(mono):  # B monomial -> loc_fg polynomial
        return Poly(nb1, {mono + (0,): one}, normalize=False)

    def into_loc2(mono):
        return Poly(nb2, {mono + (0,): one}, normalize=False)

    def loc1_into_joint(mono):  # (x.., u) -> (x.., u, v)
        return Poly(nj, {mono + (0,): one}, normalize=False)

    def loc2_into_joint(mono):  # (x.., v) -> (x.., u, v)
        return Poly(nj, {mono[:-1] + (0, mono[-1]): one}, normalize=False)

    detail: dict = {}

    # Cap-level coordinates (also the shared low block of every working degree).
    Bc = _TruncatedRing(cov.base_pres, degree_cap)
    C1 = _TruncatedRing(cov.loc_fg, degree_cap)
    C2 = _TruncatedRing(cov.loc_gf, degree_cap)
    C12 = _TruncatedRing(cov.joint, degree_cap)

    # (i) injectivity of B -> B1 (+) B2 on degree <= cap.  Normal forms are
    # exact, so a kernel vector is a genuine algebraic counterexample.
    alpha_cap = [C1.nf_coords(into_loc1(m)) + C2.nf_coords(into_loc2(m))
                 for m in Bc.monomials]
    kernel = kernel_of_map(alpha_cap, C1.width + C2.width, one)
    left = "exact" if not kernel else "failed"
    detail["left_kernel_dim"] = len(kernel)

    # (ii) kernel of the difference map on the cap-level middle term.
    beta_cap = [C12.nf_coords(loc1_into_joint(m)) for m in C1.monomials]
    beta_cap += [[-c for c in C12.nf_coords(loc2_into_joint(m))]
                 for m in C2.monomials]
    ker_beta = kernel_of_map(beta_cap, C12.width, one)
    detail["middle_kernel_dim"] = len(ker_beta)

    def middle_attempt(work: int):
        Bw = _TruncatedRing(cov.base_pres, work)
        W1 = _TruncatedRing(cov.loc_fg, work)
        W2 = _TruncatedRing(cov.loc_gf, work)
        vectors = [W1.nf_coords(into_loc1(m)) + W2.nf_coords(into_loc2(m))
                   for m in Bw.monomials]
        low_cols = W1.low_indices(degree_cap) + \
            [W1.width + i for i in W2.low_indices(degree_cap)]
        space = span_in_low_block(vectors, low_cols, W1.width + W2.width, one)
        ok = all(space.contains(v) for v in ker_beta)
        return ok, space.dim

    def right_attempt(work: int):
        W1 = _TruncatedRing(cov.loc_fg, work)
        W2 = _TruncatedRing(cov.loc_gf, work)
        W12 = _TruncatedRing(cov.joint, work)
        images = [W12.nf_coords(loc1_into_joint(m)) for m in W1.monomials]
        images += [[-c for c in W12.nf_coords(loc2_into_joint(m))]
                   for m in W2.monomials]
        space = span_in_low_block(images, W12.low_indices(degree_cap),
                                  W12.width, one)
        ok = True
        for k in range(C12.width):
            vec = [Fraction(0)] * C12.width
            vec[k] = one
            if not space.contains(vec):
                ok = False
                break
        return ok, space.dim

    def settle(attempt):
        ok, dim = attempt(degree_cap + margin)
        if ok:
            return "exact"
        ok2, dim2 = attempt(degree_cap + margin + 1)
        if ok2:
            return "exact"
        return "failed" if dim2 == dim else "inconclusive"

    middle = settle(middle_attempt)
    right = settle(right_attempt)
    return ExactnessReport(left, middle, right, degree_cap, precision, detail)


@dataclass
class JointSurjectionResult:
    generators: list[Poly]          # elements of B
    status: str                     # "certified" | "failed"
    perturbed: bool
    detail: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.generators)


def _truncate_small_coeffs(poly: Poly, p: int) -> Poly:
    """Drop coefficients of p-adic norm <= 1/p (the delta = p^-1 perturbation)."""
    kept = {}
    for e, c in poly.terms.items():
        c = Fraction(c)
        if c.numerator % p != 0 or c.denominator % p == 0:
            kept[e] = c
    return Poly(poly.nvars, kept)


def joint_surjection_lift(cov: BinaryCovering, s1: list[Poly], s2: list[Poly],
                          over: RingPresentation | None = None,
                          degree_cap: int = 6) -> JointSurjectionResult:
    """Patch generating sets of the two localized pieces into a joint
    generating set of B over a sub-Tate-algebra, re-certifying surjectivity
    at the cap after the p^-1 truncation perturbation."""
    B = cov.base_pres
    if not isinstance(B.base, QpBase):
        raise PresentationError("joint lifting needs a p-adic base")
    p = B.base.p
    one = Fraction(1)
    if over is not None and not B.is_tower_extension_of(over):
        raise PresentationError("'over' must be a tower prefix of B")
    sub_nvars = over.nvars if over is not None else 0

    work = degree_cap + 2
    Bt = _TruncatedRing(B, work)

    def solve_preimage(target_pres, element: Poly):
        """b in B (poly model) with the same normal form in the localization."""
        tr = _TruncatedRing(target_pres, work)
        images = []
        for m in Bt.monomials:
            lifted = Poly(target_pres.nvars, {m + (0,): one}, normalize=False)
            images.append(tr.nf_coords(lifted))
        rhs = tr.nf_coords(element)
        from .linalg import solve
        rows = [[images[i][w] for i in range(len(images))]
                for w in range(tr.width)]
        sol = solve(rows, rhs, one)
        if sol is None:
            return None
        return Poly(B.nvars, {m: c for m, c in zip(Bt.monomials, sol) if c})

    generators: list[Poly] = []
    perturbed = False
    for pres, gens in ((cov.loc_fg, s1), (cov.loc_gf, s2)):
        for t in gens:
            t = t if t.nvars == pres.nvars else t.extend_vars(pres.nvars)
            b = solve_preimage(pres, t)
            if b is None:
                t2 = _truncate_small_coeffs(t, p)
                b = solve_preimage(pres, t2)
                perturbed = True
            if b is None:
                return JointSurjectionResult([], "failed", perturbed,
                                             {"unliftable": str(t)})
            if b not in generators:
                generators.append(b)

    # certify: sub-algebra monomials times generator products span B at cap
    span = RowSpace(Bt.width, one)
    low = Bt.low_indices(degree_cap)

    from .poly import monomials_upto
    sub_monos = [m + (0,) * (B.nvars - sub_nvars)
                 for m in monomials_upto(sub_nvars, work)]
    products = {Poly.constant(one, B.nvars)}
    frontier = list(products)
    while frontier:
        new = []
        for prod in frontier:
            for gen in generators:
                cand = prod * gen
                if cand.total_degree() <= work and cand not in products:
                    products.add(cand)
                    new.append(cand)
        frontier = new
    for gp in products:
        d = gp.total_degree()
        for m in sub_monos:
            if sum(m) + d <= work:
                span.insert(Bt.nf_coords(gp.mul_term(m, one)))
    ok = True
    for k in low:
        vec = [Fraction(0)] * Bt.width
        vec[k] = one
        if not span.contains(vec):
            ok = False
            break
    return JointSurjectionResult(generators,
                                 "certified" if ok else "failed", perturbed,
                                 {"span_dim": span.dim})
