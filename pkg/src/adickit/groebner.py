"""Buchberger's algorithm over field coefficients, with certificate tracking.

Everything here works for any coefficient type supporting field operations
(Fractions for the exact rational layer, finite-field elements, tracked
p-adic numbers for normal forms only).  The tracked variants maintain the
expression of each basis element as a combination of the input generators,
which is what ideal-membership certificates and syzygy generators are built
from.
"""

from __future__ import annotations

from .poly import (Poly, exp_coprime, exp_div, exp_divides, exp_lcm,
                   exp_total, grevlex_key, monomials_upto)

DEGREE_GUARD = 64


class DegreeOverflowError(ArithmeticError):
    """A computation exceeded the hard degree guard."""


def _vec_zero(length: int, nvars: int) -> list[Poly]:
    return [Poly.zero(nvars) for _ in range(length)]

def _vec_add(a: list[Poly], b: list[Poly]) -> list[Poly]:
    return [x + y for x, y in zip(a, b)]

def _vec_sub(a: list[Poly], b: list[Poly]) -> list[Poly]:
    return [x - y for x, y in zip(a, b)]

def _vec_mul_term(a: list[Poly], exp: tuple, coeff) -> list[Poly]:
    return [x.mul_term(exp, coeff) for x in a]

def _vec_scale(a: list[Poly], coeff) -> list[Poly]:
    return [x.scale(coeff) for x in a]


def normal_form(f: Poly, basis: list[Poly], *, degree_guard: int = DEGREE_GUARD,
                track: bool = False):
    """Fully reduce f against basis (leading coefficients must be invertible).

    Returns the remainder, or (remainder, quotients) when track=True with
    f = sum(quotients[i] * basis[i]) + remainder.
    """
    quotients = [Poly.zero(f.nvars) for _ in basis] if track else None
    remainder = Poly.zero(f.nvars)
    work = f
    while not work.is_zero:
        exp, coeff = work.leading()
        if exp_total(exp) > degree_guard:
            raise DegreeOverflowError(
                f"reduction exceeded degree guard {degree_guard}")
        for i, g in enumerate(basis):
            if g.is_zero:
                continue
            gexp, gcoeff = g.leading()
            if exp_divides(gexp, exp):
                factor = coeff * gcoeff ** -1
                shift = exp_div(exp, gexp)
                work = work - g.mul_term(shift, factor)
                if track:
                    quotients[i] = quotients[i] + Poly(
                        f.nvars, {shift: factor})
                break
        else:
            remainder = remainder + Poly(f.nvars, {exp: coeff},
                                         normalize=False)
            work = work - Poly(f.nvars, {exp: coeff}, normalize=False)
    if track:
        return remainder, quotients
    return remainder


def _s_pair(f: Poly, g: Poly) -> tuple[Poly, tuple, tuple]:
    """S-polynomial of two monic polynomials, plus the two cofactor monomials."""
    fexp, _ = f.leading()
    gexp, _ = g.leading()
    lcm = exp_lcm(fexp, gexp)
    mf, mg = exp_div(lcm, fexp), exp_div(lcm, gexp)
    one_coeff = f.leading()[1]  # both monic: this is 1 of the field
    return f.mul_term(mf, one_coeff) - g.mul_term(mg, one_coeff), mf, mg


def buchberger_tracked(gens: list[Poly], *, degree_guard: int = DEGREE_GUARD):
    """Reduced monic Groebner basis G with transformation matrix M, G = M.F.

    Zero input generators are tolerated (they contribute nothing).
    """
    if not gens:
        return [], []
    nvars = gens[0].nvars
    basis: list[Poly] = []
    reps: list[list[Poly]] = []
    for i, f in enumerate(gens):
        if f.is_zero:
            continue
        _, lc = f.leading()
        inv = lc ** -1
        basis.append(f.scale(inv))
        rep = _vec_zero(len(gens), nvars)
        rep[i] = Poly.constant(inv, nvars)
        reps.append(rep)

    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    while pairs:
        # normal selection: smallest lcm first, deterministic
        pairs.sort(key=lambda ij: grevlex_key(
            exp_lcm(basis[ij[0]].leading()[0], basis[ij[1]].leading()[0])),
            reverse=True)
        i, j = pairs.pop()
        ei, ej = basis[i].leading()[0], basis[j].leading()[0]
        if exp_coprime(ei, ej):
            continue  # product criterion
        sp, mi, mj = _s_pair(basis[i], basis[j])
        sp_rep = _vec_sub(_vec_mul_term(reps[i], mi, basis[i].leading()[1]),
                          _vec_mul_term(reps[j], mj, basis[j].leading()[1]))
        rem, quot = normal_form(sp, basis, degree_guard=degree_guard,
                                track=True)
        if rem.is_zero:
            continue
        rem_rep = sp_rep
        for k, q in enumerate(quot):
            if not q.is_zero:
                rem_rep = _vec_sub(rem_rep, [x * q for x in reps[k]])
        _, lc = rem.leading()
        inv = lc ** -1
        basis.append(rem.scale(inv))
        reps.append(_vec_scale(rem_rep, inv))
        pairs.extend((k, len(basis) - 1) for k in range(len(basis) - 1))

    return _reduce_tracked(basis, reps, degree_guard)


def _reduce_tracked(basis, reps, degree_guard):
    """Inter-reduce a monic basis, keeping the transformation in sync."""
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            if basis[i].is_zero:
                continue
            others = [basis[k] if k != i else Poly.zero(basis[i].nvars)
                      for k in range(len(basis))]
            rem, quot = normal_form(basis[i], others,
                                    degree_guard=degree_guard, track=True)
            if rem == basis[i]:
                continue
            rep = reps[i]
            for k, q in enumerate(quot):
                if not q.is_zero:
                    rep = _vec_sub(rep, [x * q for x in reps[k]])
            if rem.is_zero:
                basis[i] = rem
                reps[i] = rep
            else:
                _, lc = rem.leading()
                inv = lc ** -1
                basis[i] = rem.scale(inv)
                reps[i] = _vec_scale(rep, inv)
            changed = True
    pairs = [(g, r) for g, r in zip(basis, reps) if not g.is_zero]
    pairs.sort(key=lambda gr: grevlex_key(gr[0].leading()[0]))
    return [g for g, _ in pairs], [r for _, r in pairs]


def buchberger(gens: list[Poly], *, degree_guard: int = DEGREE_GUARD) -> list[Poly]:
    basis, _ = buchberger_tracked(gens, degree_guard=degree_guard)
    return basis


def representation(f: Poly, basis: list[Poly], *,
                   degree_guard: int = DEGREE_GUARD) -> list[Poly]:
    """Quotients q with f = sum(q[i] * basis[i]); f must reduce to zero."""
    rem, quot = normal_form(f, basis, degree_guard=degree_guard, track=True)
    if not rem.is_zero:
        raise ValueError("element is not in the ideal spanned by the basis")
    return quot


def is_unit_ideal(basis: list[Poly]) -> bool:
    return any(not g.is_zero and exp_total(g.leading()[0]) == 0 for g in basis)


def unit_certificate(gens: list[Poly], *,
                     degree_guard: int = DEGREE_GUARD) -> list[Poly] | None:
    """Coefficients c with 1 = sum(c[i] * gens[i]), or None if 1 is not in
    the ideal."""
    if not gens:
        return None
    basis, reps = buchberger_tracked(gens, degree_guard=degree_guard)
    for g, rep in zip(basis, reps):
        exp, coeff = g.leading()
        if exp_total(exp) == 0:
            inv = coeff ** -1  # basis is monic so this is 1, kept for clarity
            return _vec_scale(rep, inv)
    return None


def syzygy_basis(gens: list[Poly], *,
                 degree_guard: int = DEGREE_GUARD) -> list[list[Poly]]:
    """Generators of the module of relations among gens.

    Uses Schreyer syzygies of the reduced Groebner basis pulled back through
    the tracked transformation, plus the rows of (Id - N.M) where N expresses
    the generators in the basis.
    """
    gens = list(gens)
    live = [(i, f) for i, f in enumerate(gens) if not f.is_zero]
    if not live:
        return []
    nvars = gens[0].nvars
    basis, m_rows = buchberger_tracked(gens, degree_guard=degree_guard)
    n_rows = [representation(f, basis, degree_guard=degree_guard)
              for f in gens]
    one = basis[0].leading()[1] if basis else None

    syzygies: list[list[Poly]] = []
    # Schreyer syzygies of the basis, pulled back to the generators.
    for j in range(len(basis)):
        for i in range(j):
            sp, mi, mj = _s_pair(basis[i], basis[j])
            rem, quot = normal_form(sp, basis, degree_guard=degree_guard,
                                    track=True)
            if not rem.is_zero:
                raise AssertionError("S-pair of a Groebner basis must reduce to 0")
            s_vec = [Poly.zero(nvars) for _ in basis]
            s_vec[i] = s_vec[i] + Poly(nvars, {mi: one})
            s_vec[j] = s_vec[j] - Poly(nvars, {mj: one})
            for k, q in enumerate(quot):
                s_vec[k] = s_vec[k] - q
            pulled = _vec_zero(len(gens), nvars)
            for a, s in enumerate(s_vec):
                if s.is_zero:
                    continue
                pulled = _vec_add(pulled, [s * x for x in m_rows[a]])
            if any(not x.is_zero for x in pulled):
                syzygies.append(pulled)
    # Rows of Id - N.M.
    for i in range(len(gens)):
        if gens[i].is_zero:
            continue
        row = _vec_zero(len(gens), nvars)
        row[i] = Poly.constant(one, nvars)
        for a, q in enumerate(n_rows[i]):
            if not q.is_zero:
                row = _vec_sub(row, [q * x for x in m_rows[a]])
        if any(not x.is_zero for x in row):
            syzygies.append(row)
    return syzygies


def staircase_monomials(basis: list[Poly], max_degree: int) -> list[tuple]:
    """Monomials of degree <= max_degree outside the leading-term ideal,
    grevlex-ascending.  These are the canonical basis of the quotient at the
    cap."""
    if not basis:
        lts = []
    else:
        lts = [g.leading()[0] for g in basis if not g.is_zero]
    nvars = basis[0].nvars if basis else None
    if nvars is None:
        raise ValueError("empty basis needs an ambient variable count")
    return [m for m in monomials_upto(nvars, max_degree)
            if not any(exp_divides(lt, m) for lt in lts)]


def staircase_for(nvars: int, basis: list[Poly], max_degree: int) -> list[tuple]:
    if not basis:
        return monomials_upto(nvars, max_degree)
    return staircase_monomials(basis, max_degree)


def is_zero_dimensional(basis: list[Poly], nvars: int) -> bool:
    """Finite staircase test: every variable has a pure power among the
    leading terms."""
    if is_unit_ideal(basis):
        return True
    lts = [g.leading()[0] for g in basis if not g.is_zero]
    for i in range(nvars):
        if not any(all(e == 0 for k, e in enumerate(lt) if k != i) and lt[i] > 0
                   for lt in lts):
            return False
    return True


def quotient_dimension(basis: list[Poly], nvars: int) -> int:
    """Krull dimension of the quotient by the ideal (via the leading-term
    ideal): the largest size of a variable subset S such that no leading
    monomial is supported inside S.  Returns -1 for the unit ideal."""
    if is_unit_ideal(basis):
        return -1
    lts = [g.leading()[0] for g in basis if not g.is_zero]
    from itertools import combinations
    for size in range(nvars, -1, -1):
        for subset in combinations(range(nvars), size):
            inside = set(subset)
            if not any(all(i in inside for i, e in enumerate(lt) if e > 0)
                       for lt in lts):
                return size
    return 0
