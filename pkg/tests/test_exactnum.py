"""Exact scalar layer: polynomials, root isolation, rational matrices."""

import random
from fractions import Fraction

import numpy as np
import pytest

from qeslab.exactnum import (
    ExactMatrix,
    ParamPoly,
    VariableMismatchError,
    cauchy_bound,
    isolate_real_roots,
    poly_gcd,
    real_roots,
    solve_linear,
    square_free_decomposition,
    square_free_part,
    sturm_count,
)

F = Fraction


def rand_fraction(rng):
    return F(rng.randint(-9, 9), rng.randint(1, 9))


def rand_poly(rng, var="t", max_degree=5):
    coeffs = [rand_fraction(rng) for _ in range(rng.randint(0, max_degree) + 1)]
    return ParamPoly(var, coeffs)


def test_ring_axioms_on_random_triples():
    rng = random.Random(20260814)
    for _ in range(40):
        a, b, c = (rand_poly(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a * ParamPoly.one("t") == a
        assert a + ParamPoly.zero("t") == a
        assert a - a == ParamPoly.zero("t")


def test_evaluation_matches_expansion():
    rng = random.Random(7)
    for _ in range(25):
        p = rand_poly(rng)
        at = rand_fraction(rng)
        direct = sum(
            (p.coeff(k) * at**k for k in range(p.degree + 1)), start=F(0)
        )
        assert p(at) == direct


def test_derivative_product_rule():
    rng = random.Random(11)
    for _ in range(20):
        f, g = rand_poly(rng), rand_poly(rng)
        lhs = (f * g).derivative()
        rhs = f.derivative() * g + f * g.derivative()
        assert lhs == rhs


def test_scalar_parameter_nests_into_other_variables():
    k0 = ParamPoly.gen("k0")
    x = ParamPoly.gen("x")
    mixed = (k0 * 2) * x + k0 * k0
    assert mixed.coeff(1) == k0 * 2
    assert mixed.coeff(0) == k0 * k0
    # and back out by evaluating the scalar
    collapsed = mixed.map_coeffs(
        lambda c: c(F(1, 2)) if isinstance(c, ParamPoly) else c
    )
    assert collapsed == ParamPoly("x", (F(1, 4), F(1)))


def test_two_nonscalar_variables_do_not_mix():
    x = ParamPoly.gen("x")
    lam = ParamPoly.gen("lam")
    with pytest.raises(VariableMismatchError):
        _ = (x + 1) * (lam + 1)


def test_divmod_reconstructs():
    rng = random.Random(13)
    for _ in range(20):
        f = rand_poly(rng)
        g = rand_poly(rng)
        if g.is_zero:
            continue
        q, r = divmod(f, g)
        assert q * g + r == f
        assert r.is_zero or r.degree < g.degree


def test_gcd_divides_both_and_contains_common_factor():
    rng = random.Random(17)
    for _ in range(15):
        f, g, h = (rand_poly(rng, max_degree=3) for _ in range(3))
        if f.is_zero or g.is_zero or h.is_zero:
            continue
        d = poly_gcd(f * h, g * h)
        assert (f * h) % d == ParamPoly.zero("t")
        assert (g * h) % d == ParamPoly.zero("t")
        assert d % h.monic() == ParamPoly.zero("t")


def test_square_free_decomposition_rebuilds():
    t = ParamPoly.gen("t")
    p = (t - 1) ** 3 * (t + 2) ** 2 * (t - F(1, 2))
    parts = square_free_decomposition(p)
    rebuilt = ParamPoly.one("t")
    for factor, mult in parts:
        rebuilt = rebuilt * factor**mult
    assert rebuilt == p.monic()
    mults = sorted(m for _, m in parts)
    assert mults == [1, 2, 3]
    sf = square_free_part(p)
    assert sf == ((t - 1) * (t + 2) * (t - F(1, 2))).monic()


def test_sturm_counts_on_known_intervals():
    t = ParamPoly.gen("t")
    assert sturm_count(t * t - 1, F(0), F(2)) == 1
    assert sturm_count(t * t + 1, F(-10), F(10)) == 0
    cubic = t**3 - 248 * t * t + 4800 * t - 23040
    assert sturm_count(cubic, F(0), F(10**6)) == 3
    # half-open convention: root at the left endpoint is excluded
    assert sturm_count(t * t - 1, F(1), F(2)) == 0
    assert sturm_count(t * t - 1, F(0), F(1)) == 1


def test_sturm_against_companion_matrix_oracle():
    rng = random.Random(19)
    for _ in range(20):
        if rng.random() < 0.5:
            roots = sorted(
                F(rng.randint(-40, 40), rng.randint(1, 5)) for _ in range(3)
            )
            if len(set(roots)) < 3:
                continue
            t = ParamPoly.gen("t")
            p = (t - roots[0]) * (t - roots[1]) * (t - roots[2])
            true_real = 3
        else:
            r = F(rng.randint(-20, 20), rng.randint(1, 5))
            a = F(rng.randint(-10, 10), rng.randint(1, 5))
            b = F(rng.randint(1, 10), rng.randint(1, 5))
            t = ParamPoly.gen("t")
            p = (t - r) * (t * t - 2 * a * t + (a * a + b * b))
            true_real = 1
        bound = cauchy_bound(p)
        assert sturm_count(p, -bound, bound) == true_real
        numeric = np.roots([float(p.coeff(k)) for k in range(3, -1, -1)])
        assert sum(1 for z in numeric if abs(z.imag) < 1e-7) == true_real


def test_isolation_brackets_separate_roots():
    t = ParamPoly.gen("t")
    p = (t - 1) * (t - 2) * (t + 5)
    brackets = isolate_real_roots(square_free_part(p))
    assert len(brackets) == 3
    for lo, hi in brackets:
        assert sturm_count(p, lo, hi) == 1


def test_real_roots_exact_and_multiplicity():
    t = ParamPoly.gen("t")
    roots = real_roots(t**4 - 64 * t * t)
    assert [(r.exact, r.multiplicity) for r in roots] == [
        (F(-8), 1),
        (F(0), 2),
        (F(8), 1),
    ]
    irr = real_roots(t * t - 2)
    assert [r.exact for r in irr] == [None, None]
    assert abs(irr[0].value + 2**0.5) < 1e-12
    assert abs(irr[1].value - 2**0.5) < 1e-12
    mixed = real_roots((t - F(1, 3)) ** 2 * (t + 2))
    assert [(r.exact, r.multiplicity) for r in mixed] == [
        (F(-2), 1),
        (F(1, 3), 2),
    ]


def test_cauchy_bound_is_strict():
    t = ParamPoly.gen("t")
    p = (t - 3) * (t + 7) * (t - F(1, 9))
    bound = cauchy_bound(p)
    for root in real_roots(p):
        assert abs(root.exact) < bound


def rand_matrix(rng, size=4):
    return ExactMatrix(
        [[rand_fraction(rng) for _ in range(size)] for _ in range(size)]
    )


def test_char_poly_matches_fraction_free_determinant():
    rng = random.Random(23)
    for _ in range(10):
        m = rand_matrix(rng)
        cp = m.char_poly("lam")
        r = rand_fraction(rng)
        shifted = ExactMatrix.identity(4) * r - m
        assert cp(r) == shifted.det()


def test_char_poly_known_companion():
    # companion matrix of t^3 - 2t + 5
    m = ExactMatrix([[0, 0, -5], [1, 0, 2], [0, 1, 0]])
    t = ParamPoly.gen("lam")
    assert m.char_poly("lam") == t**3 - 2 * t + 5


def test_nullspace_vectors_annihilate():
    rng = random.Random(29)
    for _ in range(10):
        left = [[rand_fraction(rng) for _ in range(2)] for _ in range(4)]
        right = [[rand_fraction(rng) for _ in range(4)] for _ in range(2)]
        prod = [
            [
                sum((left[i][k] * right[k][j] for k in range(2)), start=F(0))
                for j in range(4)
            ]
            for i in range(4)
        ]
        m = ExactMatrix(prod)
        kernel = m.nullspace()
        assert len(kernel) >= 2
        for vec in kernel:
            image = [
                sum((m[i][j] * vec[j] for j in range(4)), start=F(0))
                for i in range(4)
            ]
            assert all(entry == 0 for entry in image)


def test_solve_linear_roundtrip():
    rng = random.Random(31)
    solved = 0
    while solved < 8:
        m = rand_matrix(rng, 3)
        if not m.det():
            continue
        x_true = [rand_fraction(rng) for _ in range(3)]
        rhs = [
            sum((m[i][j] * x_true[j] for j in range(3)), start=F(0))
            for i in range(3)
        ]
        assert list(solve_linear(m.entries, rhs)) == x_true
        solved += 1


def test_rescale_variable():
    t = ParamPoly.gen("t")
    p = 3 * t * t - t + 2
    q = p.rescale_variable(F(1, 2), "s")
    assert q.var == "s"
    assert q == ParamPoly("s", (F(2), F(-1, 2), F(3, 4)))
    assert q(F(4)) == p(F(2))
