"""Exact rational verification of the determinant and summation identities.

Everything here works in ``fractions.Fraction``, which keeps every value in
lowest terms with a positive denominator. Identities are checked by exact
equality; there are no tolerances.

The determinant family is indexed by ``(r1, r2, s1, s2)``: the first ``r2``
rows hold ``f(s1, s2, r1, i, j)`` and the last ``r1`` rows hold
``(-1)^(j-i-r2) f(s2, s1, r2, i-r2, j)``, with

    f(s1, s2, r, i, j) = C(r, j-i) (s1+i)_{j-i}
                         / ((s1+s2+i+j-1)_{j-i} (s1+s2+r+2i)_{j-i}).
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .coeff_relations import det_Mr_closed, mr_entries, mr_reduced_entries, scaling_diagonals
from .jacobi1d import pochhammer

RationalLike = Union[Fraction, int, str]


class ParameterDomainError(ValueError):
    """A parameter choice that makes a Pochhammer denominator vanish."""


def as_rational(value: RationalLike) -> Fraction:
    """Parse ``p/q``, an integer or a decimal string into a Fraction.

    >>> as_rational("3/4")
    Fraction(3, 4)
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    try:
        return Fraction(value)
    except ZeroDivisionError as exc:
        raise ValueError(f"zero denominator in rational {value!r}") from exc


def format_rational(q: Fraction) -> str:
    """``p/q`` form; integers keep the ``/1`` so every field parses the same way."""
    return f"{q.numerator}/{q.denominator}"


def _nonzero_poch(a: Fraction, n: int, what: str) -> Fraction:
    value = pochhammer(a, n)
    if value == 0:
        raise ParameterDomainError(f"vanishing Pochhammer ({a})_{n} in {what}")
    return value


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        d = len(self.rows)
        if any(len(row) != d for row in self.rows):
            raise ValueError("matrix must be square")

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[RationalLike]]) -> "RationalMatrix":
        return cls(tuple(tuple(as_rational(v) for v in row) for row in rows))

    @classmethod
    def identity(cls, d: int) -> "RationalMatrix":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(tuple(tuple(self.rows[i][j] for j in cols) for i in rows))

    def tolist(self) -> list[list[Fraction]]:
        return [list(row) for row in self.rows]


def det_bareiss(m: RationalMatrix) -> Fraction:
    """Determinant by fraction-free Bareiss elimination.

    Each row is first scaled to integers by the lcm of its denominators;
    the integer determinant is then divided by the product of the scales.
    Every Bareiss division is exact.
    """
    d = m.dim
    if d == 0:
        return Fraction(1)
    scale = 1
    a = []
    for row in m.rows:
        lcm = math.lcm(*(v.denominator for v in row))
        scale *= lcm
        a.append([v.numerator * (lcm // v.denominator) for v in row])
    sign = 1
    prev = 1
    for k in range(d - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, d) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return Fraction(sign * a[d - 1][d - 1], scale)


def det_gauss(m: RationalMatrix) -> Fraction:
    """Determinant by plain Gaussian elimination over the rationals."""
    a = m.tolist()
    d = m.dim
    det = Fraction(1)
    for k in range(d):
        piv = next((i for i in range(k, d) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, d):
            factor = a[i][k] / a[k][k]
            if factor:
                for j in range(k, d):
                    a[i][j] -= factor * a[k][j]
    return det


def det_exact(m: RationalMatrix) -> Fraction:
    return det_bareiss(m)


# ------------------------------------------------------ determinant family


def f_entry(s1: Fraction, s2: Fraction, r: int, i: int, j: int) -> Fraction:
    """Band entry ``f(s1, s2, r, i, j)``; zero when ``j - i`` is outside ``0..r``."""
    d = j - i
    if d < 0 or d > r:
        return Fraction(0)
    s = s1 + s2
    den = _nonzero_poch(s + i + j - 1, d, "f entry") * _nonzero_poch(s + r + 2 * i, d, "f entry")
    return math.comb(r, d) * pochhammer(s1 + i, d) / den


@dataclass(frozen=True)
class DetFamilySpec:
    r1: int
    r2: int
    s1: Fraction
    s2: Fraction

    def __post_init__(self):
        if self.r1 < 1 or self.r2 < 1:
            raise ValueError(f"r1 and r2 must be positive, got ({self.r1}, {self.r2})")
        object.__setattr__(self, "s1", as_rational(self.s1))
        object.__setattr__(self, "s2", as_rational(self.s2))
        # touching every entry and the closed form raises on a vanishing denominator
        build_M_general(self)
        closed_form_rhs(self)

    @property
    def dim(self) -> int:
        return self.r1 + self.r2

    def as_dict(self) -> dict:
        return {"r1": self.r1, "r2": self.r2, "s1": format_rational(self.s1), "s2": format_rational(self.s2)}


def _bottom_entry(spec_r2: int, s1: Fraction, s2: Fraction, i: int, j: int) -> Fraction:
    value = f_entry(s2, s1, spec_r2, i - spec_r2, j)
    return -value if (j - i - spec_r2) % 2 else value


def build_M_general(spec: DetFamilySpec) -> RationalMatrix:
    d = spec.r1 + spec.r2
    rows = []
    for i in range(d):
        if i < spec.r2:
            rows.append(tuple(f_entry(spec.s1, spec.s2, spec.r1, i, j) for j in range(d)))
        else:
            rows.append(tuple(_bottom_entry(spec.r2, spec.s1, spec.s2, i, j) for j in range(d)))
    return RationalMatrix(tuple(rows))


def closed_form_rhs(spec: DetFamilySpec) -> Fraction:
    """``(-1)^(r1 r2) prod_{j=1}^{r1} 1 / (s1+s2+r1+r2+j-2)_{r2}``."""
    s = spec.s1 + spec.s2
    acc = Fraction(1)
    for j in range(1, spec.r1 + 1):
        acc /= _nonzero_poch(s + spec.r1 + spec.r2 + j - 2, spec.r2, "closed form")
    return -acc if (spec.r1 * spec.r2) % 2 else acc


def family_det_pair(spec: DetFamilySpec) -> tuple[Fraction, Fraction]:
    return det_exact(build_M_general(spec)), closed_form_rhs(spec)


# ------------------------------------------------------------------ minors


def factorial_ratio(z: Fraction, u: int, v: int) -> Fraction:
    """``(z+u)! / (z+v)!`` for integer ``u - v``, as a rising factorial.

    Equals ``(z+v+1)_{u-v}`` when ``u >= v`` and ``1 / (z+u+1)_{v-u}``
    otherwise; defined for any rational ``z`` where that product is nonzero.
    """
    if u >= v:
        return pochhammer(z + v + 1, u - v)
    return 1 / _nonzero_poch(z + u + 1, v - u, "factorial ratio")


def band_minor_matrix(r1: int, r2: int, s1: Fraction, s2: Fraction, ks: Sequence[int]) -> RationalMatrix:
    return RationalMatrix(tuple(tuple(f_entry(s1, s2, r1, i, k) for k in ks) for i in range(r2)))


def band_minor_closed_form(r1: int, r2: int, s1: Fraction, s2: Fraction, ks: Sequence[int]) -> Fraction:
    """Product formula for the minor on the first ``r2`` rows and columns ``ks``.

    The shifted factorials of ``S = s1 + s2`` are paired into ratios with
    integer offsets and evaluated as rising factorials:

    * ``(S+r1+2i-2)! / (S+r1+i-2)! = (S+r1+i-1)_i``
    * ``(S+r1+2i-1)! / (S+r1+r2+k-2)!``
    * ``(S+k-2)! / (S+2k-2)! = 1 / (S+k-1)_k``
    """
    s = s1 + s2
    acc = Fraction(1)
    for i, j in itertools.combinations(range(r2), 2):
        acc *= (ks[j] - ks[i]) * (ks[i] + ks[j] + s - 1)
    for i, k in enumerate(ks):
        num = pochhammer(s1, k) * math.factorial(r1 + i)
        den = _nonzero_poch(s1, i, "minor closed form") * math.factorial(k) * math.factorial(r1 + r2 - k - 1)
        acc *= num / den
        acc *= factorial_ratio(s, r1 + 2 * i - 2, r1 + i - 2)
        acc *= factorial_ratio(s, r1 + 2 * i - 1, r1 + r2 + k - 2)
        acc *= factorial_ratio(s, k - 2, 2 * k - 2)
    return acc


def band_minor_pair(r1: int, r2: int, s1: RationalLike, s2: RationalLike,
                ks: Sequence[int]) -> tuple[Fraction, Fraction]:
    """(exact minor determinant, closed form) for strictly increasing ``ks``."""
    s1, s2 = as_rational(s1), as_rational(s2)
    ks = list(ks)
    if len(ks) != r2:
        raise ValueError(f"need {r2} column indices, got {len(ks)}")
    if any(b <= a for a, b in zip(ks, ks[1:])) or (ks and ks[0] < 0):
        raise ValueError(f"column indices must be strictly increasing and non-negative: {ks}")
    if ks and ks[-1] > r1 + r2 - 1:
        raise ValueError(f"column indices must not exceed r1 + r2 - 1 = {r1 + r2 - 1}")
    return det_exact(band_minor_matrix(r1, r2, s1, s2, ks)), band_minor_closed_form(r1, r2, s1, s2, ks)


# ----------------------------------------------------------- summation


def alternating_summand(ks: Sequence[int], m: int, a: Fraction, b: Fraction) -> Fraction:
    acc = Fraction(-1 if sum(ks) % 2 else 1)
    for i, j in itertools.combinations(range(len(ks)), 2):
        acc *= ((ks[j] - ks[i]) * (ks[i] + ks[j] + a)) ** 2
    for k in ks:
        num = (a + 2 * k) * pochhammer(a, k) * pochhammer(b, k) * pochhammer(-m, k)
        den = (a * math.factorial(k) * _nonzero_poch(a + 1 - b, k, "summand")
               * _nonzero_poch(a + 1 + m, k, "summand"))
        acc *= num / den
    return acc


def alternating_sum_pair(r: int, m: int, a: RationalLike, b: RationalLike) -> tuple[Fraction, Fraction]:
    """(multiple sum over ``0 <= k_1 < ... < k_r <= m``, product formula).

    For ``r > m + 1`` the sum is empty and the product contains
    ``1 / (m+1-i)!`` at a negative integer, so both sides are 0.
    """
    a, b = as_rational(a), as_rational(b)
    if r < 1 or m < 0:
        raise ValueError(f"need r >= 1 and m >= 0, got r={r}, m={m}")
    if a == 0:
        raise ParameterDomainError("a must be nonzero")
    lhs = sum((alternating_summand(ks, m, a, b) for ks in itertools.combinations(range(m + 1), r)), Fraction(0))
    rhs = Fraction(1)
    for i in range(1, r + 1):
        if m + 1 - i < 0:
            # 1/(m+1-i)! vanishes at a negative integer
            rhs = Fraction(0)
            break
        num = math.factorial(i - 1) * pochhammer(b, i - 1) * math.factorial(m) * pochhammer(a + 1, m)
        den = math.factorial(m + 1 - i) * _nonzero_poch(a + 1 - b, m + 1 - i, "product side")
        rhs *= num / den
    return lhs, rhs


# ------------------------------------------------------ Laplace expansion

LAPLACE_MAX_DIM = 8


def laplace_terms(spec: DetFamilySpec) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """Signed products of complementary minors along the first ``r2`` rows."""
    m = build_M_general(spec)
    d = spec.dim
    top = list(range(spec.r2))
    bottom = list(range(spec.r2, d))
    base_sign = math.comb(spec.r2, 2)
    for ks in itertools.combinations(range(d), spec.r2):
        ls = [j for j in range(d) if j not in ks]
        sign = -1 if (base_sign + sum(ks)) % 2 else 1
        term = sign * det_exact(m.submatrix(top, ks)) * det_exact(m.submatrix(bottom, ls))
        yield ks, term


def laplace_check(spec: DetFamilySpec) -> bool:
    """True iff the Laplace sum over column subsets reproduces ``det M`` exactly."""
    if spec.dim > LAPLACE_MAX_DIM:
        raise ValueError(f"r1 + r2 = {spec.dim} exceeds the guard {LAPLACE_MAX_DIM}")
    total = sum((term for _, term in laplace_terms(spec)), Fraction(0))
    return total == det_exact(build_M_general(spec))


# ------------------------------------------- specialization to M_r(k, n)


def mr_matrix_exact(r: int, k: int, n: int, alpha: RationalLike, beta: RationalLike) -> RationalMatrix:
    a, b = as_rational(alpha), as_rational(beta)
    return RationalMatrix.from_lists(mr_entries(r, k, n, a, b))


def mr_det_pair(r: int, k: int, n: int, alpha: RationalLike, beta: RationalLike) -> tuple[Fraction, Fraction]:
    """(exact ``det M_r(k,n)``, closed-form product)."""
    a, b = as_rational(alpha), as_rational(beta)
    try:
        lhs = det_exact(mr_matrix_exact(r, k, n, a, b))
        rhs = det_Mr_closed(r, k, n, a, b)
    except ZeroDivisionError as exc:
        raise ParameterDomainError(f"vanishing denominator at alpha={a}, beta={b}") from exc
    return lhs, rhs


def mr_reduced_det_pair(r: int, k: int, alpha: RationalLike, beta: RationalLike) -> tuple[Fraction, Fraction]:
    """(exact ``det M_r(k)``, ``(-1)^(r^2) / prod_j (2k+a+b+2r+j)_r``)."""
    a, b = as_rational(alpha), as_rational(beta)
    lhs = det_exact(RationalMatrix.from_lists(mr_reduced_entries(r, k, a, b)))
    rhs = Fraction(1)
    for j in range(1, r + 1):
        rhs /= _nonzero_poch(2 * k + a + b + 2 * r + j, r, "reduced determinant")
    return lhs, (-rhs if r % 2 else rhs)


def mr_scaling_holds(r: int, k: int, n: int, alpha: RationalLike, beta: RationalLike) -> bool:
    """``diag(L) M_r(k,n) diag(R) == M_r(k)`` entrywise, exactly."""
    a, b = as_rational(alpha), as_rational(beta)
    full = mr_entries(r, k, n, a, b)
    reduced = mr_reduced_entries(r, k, a, b)
    left, right = scaling_diagonals(r, k, n, a, b)
    return all(left[i] * full[i][j] * right[j] == reduced[i][j]
               for i in range(2 * r) for j in range(2 * r))


def mr_as_family(r: int, k: int, alpha: RationalLike, beta: RationalLike) -> DetFamilySpec:
    """The family member equal to ``M_r(k)``: ``r1 = r2 = r``, ``s1 = k+beta+1``, ``s2 = k+alpha+1``."""
    a, b = as_rational(alpha), as_rational(beta)
    return DetFamilySpec(r, r, k + b + 1, k + a + 1)


# ------------------------------------------------------ random parameters


def random_rational(rng: random.Random, max_num: int = 20, max_den: int = 20) -> Fraction:
    return Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))


def random_family_spec(rng: random.Random, r1: int, r2: int, max_num: int = 20,
                       max_den: int = 20, max_tries: int = 1000) -> DetFamilySpec:
    """Rejection-sample ``(s1, s2)`` until no Pochhammer denominator vanishes."""
    for _ in range(max_tries):
        try:
            return DetFamilySpec(r1, r2, random_rational(rng, max_num, max_den),
                                 random_rational(rng, max_num, max_den))
        except ParameterDomainError:
            continue
    raise RuntimeError(f"no admissible parameters found in {max_tries} draws")


def random_sum_params(rng: random.Random, r: int, m: int, max_num: int = 20, max_den: int = 20,
                      max_tries: int = 1000) -> tuple[Fraction, Fraction]:
    """Rejection-sample ``(a, b)`` admissible for the summation identity."""
    for _ in range(max_tries):
        a = random_rational(rng, max_num, max_den)
        b = random_rational(rng, max_num, max_den)
        try:
            alternating_sum_pair(r, m, a, b)
        except ParameterDomainError:
            continue
        return a, b
    raise RuntimeError(f"no admissible parameters found in {max_tries} draws")


# ----------------------------------------------------------- reporting


def record(kind: str, params: dict, lhs: Fraction, rhs: Fraction) -> dict:
    return {"kind": kind, **params, "lhs": format_rational(lhs), "rhs": format_rational(rhs),
            "equal": lhs == rhs}


def to_json_line(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True)
