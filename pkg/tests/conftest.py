from fractions import Fraction

import pytest

from adickit.tate import QpBase, free_presentation


@pytest.fixture
def q2():
    return QpBase(2, 8)


@pytest.fixture
def line(q2):
    """A = Q_2<T>."""
    return free_presentation(q2, ("T",))


def poly_over(pres, expr):
    """Tiny helper: build a polynomial from a dict {exponent-tuple: rational}."""
    from adickit.poly import Poly
    return Poly(pres.nvars, {e: Fraction(c) for e, c in expr.items()})
