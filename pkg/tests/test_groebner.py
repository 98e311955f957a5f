from fractions import Fraction
from itertools import permutations

from adickit.groebner import (buchberger, buchberger_tracked, is_unit_ideal,
                              normal_form, quotient_dimension,
                              staircase_for, syzygy_basis, unit_certificate)
from adickit.poly import Poly

ONE = Fraction(1)


def V(i, n):
    return Poly.variable(i, n, ONE)


def C(c, n):
    return Poly.constant(Fraction(c), n)


def test_single_generator_already_reduced():
    T = V(0, 1)
    basis = buchberger([T * T - T])
    assert basis == [T * T - T]
    assert quotient_dimension(basis, 1) == 0


def test_two_generator_buchberger_by_hand():
    # {X - Y^2, Y^3} in grevlex: leading terms Y^2 and Y^3; the S-pair chain
    # yields XY and then X^2, and Y^3 becomes redundant.
    X, Y = V(0, 2), V(1, 2)
    basis = buchberger([X - Y * Y, Y * Y * Y])
    assert basis == [Y * Y - X, X * Y, X * X]
    assert normal_form(X * Y, basis).is_zero
    assert quotient_dimension(basis, 2) == 0


def test_empty_ideal():
    assert buchberger([]) == []
    assert quotient_dimension([], 3) == 3
    assert len(staircase_for(2, [], 2)) == 6  # 1, x, y, x^2, xy, y^2


def test_reduced_basis_is_order_independent():
    X, Y = V(0, 2), V(1, 2)
    gens = [X * X - Y, X * Y - C(1, 2), Y * Y - X]
    expected = buchberger(gens)
    for perm in permutations(gens):
        assert buchberger(list(perm)) == expected


def test_tracked_transformation():
    T = V(0, 1)
    gens = [T * T - T, C(2, 1) * T - C(1, 1)]
    basis, rows = buchberger_tracked(gens)
    for g, row in zip(basis, rows):
        total = Poly.zero(1)
        for coeff, f in zip(row, gens):
            total = total + coeff * f
        assert total == g


def test_unit_certificate_identity():
    T = V(0, 1)
    gens = [T * T - T, C(2, 1) * T - C(1, 1)]
    cert = unit_certificate(gens)
    assert cert is not None
    total = Poly.zero(1)
    for coeff, f in zip(cert, gens):
        total = total + coeff * f
    assert total == C(1, 1)
    assert is_unit_ideal(buchberger(gens))
    # and a non-unit ideal has no certificate
    assert unit_certificate([T * T]) is None


def test_syzygies_are_relations():
    X, Y = V(0, 2), V(1, 2)
    systems = [
        [X * X - Y, Y * Y * X],
        [X - Y * Y, Y * Y * Y],
        [X * Y, X * X, Y * Y],
        [V(0, 1) ** 2 - V(0, 1), V(0, 1) ** 3],
    ]
    for gens in systems:
        n = gens[0].nvars
        syz = syzygy_basis(gens)
        for vec in syz:
            total = Poly.zero(n)
            for coeff, f in zip(vec, gens):
                total = total + coeff * f
            assert total.is_zero


def test_degree_guard_raises():
    import pytest
    from adickit.groebner import DegreeOverflowError
    T = V(0, 1)
    with pytest.raises(DegreeOverflowError):
        normal_form(T ** 10, [T ** 3 - T], degree_guard=5)


def test_koszul_syzygy_is_generated():
    # for two generators, the Koszul relation (g, -f) must lie in the span of
    # the computed syzygies; check at low degree by exact linear algebra
    T = V(0, 1)
    f, g = T * T - T, T ** 3
    syz = syzygy_basis([f, g])
    koszul = [g, -f]
    from adickit.linalg import RowSpace
    from adickit.poly import monomials_upto

    cap = 8
    monos = monomials_upto(1, cap)
    index = {m: i for i, m in enumerate(monos)}

    def flatten(vec):
        out = [Fraction(0)] * (2 * len(monos))
        for i, comp in enumerate(vec):
            for m, c in comp.terms.items():
                out[i * len(monos) + index[m]] = c
        return out

    space = RowSpace(2 * len(monos), ONE)
    for s in syz:
        sdeg = max((c.total_degree() for c in s if not c.is_zero), default=0)
        for m in monomials_upto(1, cap - sdeg - 1):
            shifted = [c.mul_term(m, ONE) for c in s]
            space.insert(flatten(shifted))
    assert space.contains(flatten(koszul))
