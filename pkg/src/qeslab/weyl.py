"""Normal-ordered one-variable Weyl algebra with 2x2 matrix coefficients.

A scalar operator is a finite sum  sum_{i,j} c_{ij} x^i d^j  with the
powers of x written to the left of the powers of the derivative d; the
coefficients c_{ij} live in Q or Q[k0].  Products are renormalised with
the two-term commutation rule d x = x d + 1, i.e.

    d^b x^c = sum_s  C(b, s) * c!/(c-s)! * x^(c-s) d^(b-s).

``MatOp`` wraps a 2x2 matrix of such operators acting on doublets of
polynomials, and ``restrict`` turns a matrix operator into the exact
matrix of its action on a finite doublet of polynomial spaces, keeping
any components that fall outside the target space as explicit leakage
records instead of silently dropping them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from qeslab.exactnum import (
    ExactMatrix,
    ParamPoly,
    SCALAR_VARS,
    as_exact,
)

X_VAR = "x"


def x_monomial(power: int, coeff=1) -> ParamPoly:
    """coeff * x**power as an exact polynomial."""
    if power < 0:
        raise ValueError("negative monomial power")
    return ParamPoly(X_VAR, [0] * power + [coeff])


def _is_scalar(value) -> bool:
    if isinstance(value, (int, Fraction)):
        return True
    if isinstance(value, ParamPoly):
        return value.var in SCALAR_VARS or len(value.coeffs) <= 1
    return False


def _x_coeffs(poly) -> tuple:
    """Coefficient tuple of `poly` read as a polynomial in x.

    Scalars and parameter polynomials count as constants."""
    if isinstance(poly, (int, Fraction)):
        return (Fraction(poly),) if poly else ()
    if not isinstance(poly, ParamPoly):
        raise TypeError(f"expected a polynomial, got {poly!r}")
    if poly.var == X_VAR or len(poly.coeffs) <= 1:
        return poly.coeffs
    if poly.var in SCALAR_VARS:
        return (poly,)
    raise ValueError(f"expected a polynomial in {X_VAR!r}, got {poly.var!r}")


class DiffOp:
    """Normal-ordered scalar differential operator.

    ``terms`` maps (x_power, d_power) -> coefficient; zero coefficients
    are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, coeff in (terms or {}).items():
            i, j = key
            if i < 0 or j < 0:
                raise ValueError(f"negative operator powers {key}")
            c = as_exact(coeff)
            if c:
                clean[(i, j)] = c
        self.terms = clean

    # ------------------------------------------------------------------
    @classmethod
    def zero(cls) -> "DiffOp":
        return cls()

    @classmethod
    def one(cls) -> "DiffOp":
        return cls({(0, 0): 1})

    @classmethod
    def x(cls, power: int = 1) -> "DiffOp":
        return cls({(power, 0): 1})

    @classmethod
    def d(cls, power: int = 1) -> "DiffOp":
        return cls({(0, power): 1})

    @classmethod
    def euler(cls) -> "DiffOp":
        """x d, whose eigenvectors are the monomials."""
        return cls({(1, 1): 1})

    @classmethod
    def from_x_poly(cls, poly: ParamPoly) -> "DiffOp":
        """Multiplication operator by a polynomial in x."""
        coeffs = _x_coeffs(poly)
        return cls({(k, 0): c for k, c in enumerate(coeffs)})

    # ------------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def max_x_power(self) -> int:
        return max((i for i, _ in self.terms), default=0)

    @property
    def max_d_power(self) -> int:
        return max((j for _, j in self.terms), default=0)

    def coeff(self, x_power: int, d_power: int):
        return self.terms.get((x_power, d_power), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self.terms == other.terms
        if _is_scalar(other):
            other = as_exact(other)
            if not other:
                return self.is_zero
            return self.terms == {(0, 0): other}
        return NotImplemented

    __hash__ = None

    # ------------------------------------------------------------------
    def __neg__(self) -> "DiffOp":
        return DiffOp({k: -c for k, c in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, DiffOp):
            out = dict(self.terms)
            for k, c in other.terms.items():
                out[k] = out.get(k, Fraction(0)) + c
            return DiffOp(out)
        if _is_scalar(other):
            return self + DiffOp({(0, 0): other})
        return NotImplemented

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            out = {}
            for (a, b), ca in self.terms.items():
                for (c, d), cb in other.terms.items():
                    coeff = ca * cb
                    for s in range(min(b, c) + 1):
                        w = math.comb(b, s) * math.perm(c, s)
                        key = (a + c - s, b + d - s)
                        out[key] = out.get(key, Fraction(0)) + w * coeff
            return DiffOp(out)
        if _is_scalar(other):
            return DiffOp({k: c * other for k, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if _is_scalar(other):
            return DiffOp({k: other * c for k, c in self.terms.items()})
        return NotImplemented

    def __pow__(self, n: int) -> "DiffOp":
        if n < 0:
            raise ValueError("negative power of an operator")
        out = DiffOp.one()
        for _ in range(n):
            out = out * self
        return out

    # ------------------------------------------------------------------
    def apply(self, poly: ParamPoly) -> ParamPoly:
        """Apply to a polynomial in x (exactly)."""
        coeffs = _x_coeffs(poly)
        out = ParamPoly.zero(X_VAR)
        for (i, j), c in self.terms.items():
            for k, pk in enumerate(coeffs):
                if k < j or not pk:
                    continue
                out = out + x_monomial(k + i - j, c * pk * math.perm(k, j))
        return out

    def map_coeffs(self, func) -> "DiffOp":
        return DiffOp({k: func(c) for k, c in self.terms.items()})

    def eval_param(self, value) -> "DiffOp":
        """Substitute a value for the scalar parameter in every coefficient."""
        return self.map_coeffs(
            lambda c: c(value) if isinstance(c, ParamPoly) else c
        )

    # ------------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j) in sorted(self.terms, key=lambda k: (k[0] + k[1], k[0])):
            c = self.terms[(i, j)]
            mono = "*".join(
                s
                for s in (
                    "" if i == 0 else ("x" if i == 1 else f"x^{i}"),
                    "" if j == 0 else ("d" if j == 1 else f"d^{j}"),
                )
                if s
            )
            cs = f"({c})" if isinstance(c, ParamPoly) else str(c)
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOp({self.terms!r})"


# ----------------------------------------------------------------------
# 2x2 matrices of operators
# ----------------------------------------------------------------------

def _as_diffop(value) -> DiffOp:
    if isinstance(value, DiffOp):
        return value
    if _is_scalar(value):
        return DiffOp({(0, 0): value})
    raise TypeError(f"cannot interpret {value!r} as a scalar operator")


class MatOp:
    """2x2 matrix of scalar operators acting on doublets (top, bottom)."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        rows = tuple(tuple(_as_diffop(e) for e in row) for row in entries)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("MatOp needs a 2x2 entry grid")
        self.entries = rows

    # ------------------------------------------------------------------
    @classmethod
    def zero(cls) -> "MatOp":
        z = DiffOp.zero()
        return cls(((z, z), (z, z)))

    @classmethod
    def identity(cls) -> "MatOp":
        return cls.diag(DiffOp.one(), DiffOp.one())

    @classmethod
    def diag(cls, top, bottom) -> "MatOp":
        z = DiffOp.zero()
        return cls(((_as_diffop(top), z), (z, _as_diffop(bottom))))

    @classmethod
    def scalar(cls, value) -> "MatOp":
        return cls.diag(value, value)

    @classmethod
    def sigma3(cls) -> "MatOp":
        return cls.diag(1, -1)

    @classmethod
    def lower_shift(cls, op=1) -> "MatOp":
        """op in the bottom-left slot: sends (top, bottom) to (0, op top)."""
        z = DiffOp.zero()
        return cls(((z, z), (_as_diffop(op), z)))

    @classmethod
    def raise_shift(cls, op=1) -> "MatOp":
        """op in the top-right slot: sends (top, bottom) to (op bottom, 0)."""
        z = DiffOp.zero()
        return cls(((z, _as_diffop(op)), (z, z)))

    # ------------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if isinstance(other, MatOp):
            return self.entries == other.entries
        return NotImplemented

    __hash__ = None

    def __neg__(self) -> "MatOp":
        return MatOp(tuple(tuple(-e for e in row) for row in self.entries))

    def __add__(self, other):
        if isinstance(other, MatOp):
            return MatOp(
                tuple(
                    tuple(a + b for a, b in zip(ra, rb))
                    for ra, rb in zip(self.entries, other.entries)
                )
            )
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, MatOp):
            return self + (-other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, MatOp):
            a, b = self.entries, other.entries
            return MatOp(
                tuple(
                    tuple(
                        a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)
                    )
                    for i in range(2)
                )
            )
        if _is_scalar(other):
            return MatOp(
                tuple(tuple(e * other for e in row) for row in self.entries)
            )
        return NotImplemented

    def __rmul__(self, other):
        if _is_scalar(other):
            return MatOp(
                tuple(tuple(other * e for e in row) for row in self.entries)
            )
        return NotImplemented

    def __pow__(self, n: int) -> "MatOp":
        if n < 0:
            raise ValueError("negative power of an operator")
        out = MatOp.identity()
        for _ in range(n):
            out = out * self
        return out

    # ------------------------------------------------------------------
    def apply(self, doublet) -> tuple:
        top, bottom = doublet
        return (
            self.entries[0][0].apply(top) + self.entries[0][1].apply(bottom),
            self.entries[1][0].apply(top) + self.entries[1][1].apply(bottom),
        )

    def map_coeffs(self, func) -> "MatOp":
        return MatOp(
            tuple(tuple(e.map_coeffs(func) for e in row) for row in self.entries)
        )

    def eval_param(self, value) -> "MatOp":
        return MatOp(
            tuple(tuple(e.eval_param(value) for e in row) for row in self.entries)
        )

    def __str__(self):
        return "[[{}, {}], [{}, {}]]".format(
            self.entries[0][0], self.entries[0][1],
            self.entries[1][0], self.entries[1][1],
        )

    def __repr__(self):
        return f"MatOp({self.entries!r})"


def commutator(a, b):
    return a * b - b * a


def anticommutator(a, b):
    return a * b + b * a


# ----------------------------------------------------------------------
# restriction to polynomial doublets
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ModuleSpec:
    """The doublet P(top_degree) (+) P(bottom_degree).

    Basis order: monomials 1, x, ..., x^top_degree of the top component,
    then 1, x, ..., x^bottom_degree of the bottom one.
    """

    top_degree: int
    bottom_degree: int

    def __post_init__(self):
        if self.top_degree < 0 or self.bottom_degree < 0:
            raise ValueError("component degrees must be nonnegative")

    @property
    def dim(self) -> int:
        return self.top_degree + self.bottom_degree + 2

    def degree_cap(self, component: int) -> int:
        return self.top_degree if component == 0 else self.bottom_degree

    def basis_index(self, component: int, power: int) -> int:
        if not 0 <= power <= self.degree_cap(component):
            raise IndexError(f"x^{power} outside component {component}")
        return power if component == 0 else self.top_degree + 1 + power

    def basis_labels(self):
        for comp in (0, 1):
            for power in range(self.degree_cap(comp) + 1):
                yield comp, power


@dataclass(frozen=True)
class LeakageTerm:
    """A piece of the image that fell outside the target doublet."""

    source_component: int
    source_power: int
    dest_component: int
    dest_power: int
    coeff: object

    def __str__(self):
        return (
            f"comp{self.source_component} x^{self.source_power} -> "
            f"comp{self.dest_component} x^{self.dest_power} (coeff {self.coeff})"
        )


@dataclass(frozen=True)
class RestrictedMatrix:
    """Exact matrix of a MatOp on a ModuleSpec basis, plus leakage."""

    module: ModuleSpec
    matrix: ExactMatrix
    leakage: tuple

    @property
    def leakage_free(self) -> bool:
        return not self.leakage

    def char_poly(self, var: str = "lam") -> ParamPoly:
        if self.leakage:
            raise ValueError("operator does not preserve the doublet")
        return self.matrix.char_poly(var)


def restrict(op: MatOp, module: ModuleSpec) -> RestrictedMatrix:
    """Matrix of `op` on the doublet basis, with out-of-space leakage."""
    dim = module.dim
    cols = []
    leaks = []
    for comp, power in module.basis_labels():
        col = [Fraction(0)] * dim
        mono = x_monomial(power)
        for dest in (0, 1):
            image = op.entries[dest][comp].apply(mono)
            cap = module.degree_cap(dest)
            for q, cq in enumerate(image.coeffs):
                if not cq:
                    continue
                if q <= cap:
                    col[module.basis_index(dest, q)] = cq
                else:
                    leaks.append(LeakageTerm(comp, power, dest, q, cq))
        cols.append(col)
    matrix = ExactMatrix(list(map(list, zip(*cols))))
    return RestrictedMatrix(module, matrix, tuple(leaks))
