"""Coefficient machinery for the branch expansion of a one-place curve germ.

The germ ``w^a = z^b * unit`` (gcd-free exponents ``2 <= a < b``,
``b`` not a multiple of ``a``) has a parameterization ``z = s^a``,
``w = T_b = (s^a + c_2 s^{a-2} + ... + c_a)^{b/a}``, a fractional-power
series whose coefficients are polynomials in ``c_2..c_a``. This module
generates those coefficient polynomials and everything derived from them:

* ``f_coeff``: coefficients of ``(1 + sum c_k s^{-k})^{beta/a}``,
* ``gamma_coeff`` / ``theta_series``: a unit series and its inverse unit,
* ``theta_cap``: coefficients of integer powers of the inverse unit,
* ``big_f``: the obstruction polynomials (singular-tail coefficients),
* ``f_bar`` / ``jac_bar``: the comparison-perturbed system and its Jacobian,
* ``sigma_coeff``: section coefficients twisted by a polar part ``g0``.

Everything is exact; coefficients are Fractions and results are MPoly.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .polycore import MPoly, VarSet

Partition = dict[int, int]


@dataclass(frozen=True)
class LocalModel:
    """One singular point of type (a, b): w^a = z^b, 2 <= a < b, a not dividing b."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if not 2 <= self.a < self.b:
            raise ValueError(f"need 2 <= a < b, got a={self.a}, b={self.b}")
        if self.b % self.a == 0:
            raise ValueError(
                f"b={self.b} must not be a multiple of a={self.a}: a divisible "
                "contact order can be absorbed by a coordinate change, so the "
                "normalized model assumes a does not divide b")

    @property
    def varset(self) -> VarSet:
        return VarSet.coefficients(self.a)

    @property
    def doubled_varset(self) -> VarSet:
        return VarSet.doubled(self.a)


@dataclass(frozen=True)
class SigmaModel:
    """A local model together with the polar part g0 of a twisting section.

    g0[r-1] is the coefficient g_{0,r} of S^{b+r}; the list is finite and
    may be empty (untwisted sections).
    """

    model: LocalModel
    g0: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "g0", tuple(Fraction(g) for g in self.g0))


def partitions(n: int, lo: int = 2, hi: int | None = None) -> list[Partition]:
    """All partitions of n with parts in [lo, hi], as part -> multiplicity maps.

    n = 0 yields the empty partition; n < 0 yields nothing. hi = None means
    no upper bound (effectively n).
    """
    if n < 0:
        return []
    cap = n if hi is None else min(hi, n)
    results: list[Partition] = []
    current: Partition = {}

    def descend(remaining: int, max_part: int) -> None:
        if remaining == 0:
            results.append(dict(current))
            return
        for part in range(min(max_part, remaining), lo - 1, -1):
            current[part] = current.get(part, 0) + 1
            descend(remaining - part, part)
            if current[part] == 1:
                del current[part]
            else:
                current[part] -= 1

    descend(n, cap)
    return results


def gen_multinomial(alpha: Fraction | int, lam: Partition) -> Fraction:
    """Generalized multinomial: falling factorial of alpha over multiplicity factorials.

    With beta_j the multiplicities of lam and B their sum, this is
    ``prod_{i=0}^{B-1} (alpha - i) / prod_j beta_j!``.
    """
    alpha = Fraction(alpha)
    total = sum(lam.values())
    num = Fraction(1)
    for i in range(total):
        num *= alpha - i
    den = 1
    for mult in lam.values():
        den *= math.factorial(mult)
    return num / den


class CoeffSeries:
    """Truncated power series in one symbol with polynomial coefficients.

    coeffs[i] is the coefficient of x^i; indices >= cap are dropped.
    Used internally for exact series inversion, powers, and composition.
    """

    __slots__ = ("varset", "cap", "coeffs")

    def __init__(self, varset: VarSet, cap: int, coeffs: Sequence[MPoly] | None = None):
        if cap < 1:
            raise ValueError("series cap must be at least 1")
        self.varset = varset
        self.cap = cap
        cs = list(coeffs) if coeffs else []
        if len(cs) > cap:
            cs = cs[:cap]
        zero = MPoly.zero(varset)
        cs.extend(zero for _ in range(cap - len(cs)))
        self.coeffs = cs

    @staticmethod
    def one(varset: VarSet, cap: int) -> "CoeffSeries":
        return CoeffSeries(varset, cap, [MPoly.constant(varset, 1)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoeffSeries):
            return NotImplemented
        return (self.varset, self.cap) == (other.varset, other.cap) and self.coeffs == other.coeffs

    def __add__(self, other: "CoeffSeries") -> "CoeffSeries":
        self._check(other)
        return CoeffSeries(self.varset, self.cap,
                           [x + y for x, y in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "CoeffSeries") -> "CoeffSeries":
        self._check(other)
        return CoeffSeries(self.varset, self.cap,
                           [x - y for x, y in zip(self.coeffs, other.coeffs)])

    def _check(self, other: "CoeffSeries") -> None:
        if self.varset != other.varset or self.cap != other.cap:
            raise ValueError("series caps or variable sets differ")

    def __mul__(self, other: "CoeffSeries") -> "CoeffSeries":
        self._check(other)
        zero = MPoly.zero(self.varset)
        out = [zero] * self.cap
        for i, ci in enumerate(self.coeffs):
            if ci.is_zero():
                continue
            for j in range(self.cap - i):
                cj = other.coeffs[j]
                if not cj.is_zero():
                    out[i + j] = out[i + j] + ci * cj
        return CoeffSeries(self.varset, self.cap, out)

    def inverse(self) -> "CoeffSeries":
        """Multiplicative inverse; the constant term must be a nonzero scalar."""
        c0 = self.coeffs[0]
        if not c0.is_constant() or c0.is_zero():
            raise ValueError("series inverse needs a nonzero constant term")
        inv0 = 1 / c0.constant_value()
        zero = MPoly.zero(self.varset)
        out = [zero] * self.cap
        out[0] = MPoly.constant(self.varset, inv0)
        for n in range(1, self.cap):
            acc = zero
            for i in range(1, n + 1):
                if not self.coeffs[i].is_zero() and not out[n - i].is_zero():
                    acc = acc + self.coeffs[i] * out[n - i]
            out[n] = acc * (-inv0)
        return CoeffSeries(self.varset, self.cap, out)

    def power(self, n: int) -> "CoeffSeries":
        """Integer power; negative exponents go through the inverse."""
        base = self.inverse() if n < 0 else self
        n = abs(n)
        result = CoeffSeries.one(self.varset, self.cap)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def compose(self, inner: "CoeffSeries") -> "CoeffSeries":
        """Substitute a series with zero constant term for the symbol."""
        if not inner.coeffs[0].is_zero():
            raise ValueError("composition needs zero constant term")
        self._check(inner)
        result = CoeffSeries(self.varset, self.cap, [self.coeffs[0]])
        pw = CoeffSeries.one(self.varset, self.cap)
        for i in range(1, self.cap):
            pw = pw * inner
            ci = self.coeffs[i]
            if not ci.is_zero():
                result = result + CoeffSeries(self.varset, self.cap,
                                              [p * ci for p in pw.coeffs])
        return result


@functools.lru_cache(maxsize=None)
def f_coeff(model: LocalModel, beta_num: int, m: int) -> MPoly:
    """Coefficient of s^{-m} in (1 + sum_{k=2}^{a} c_k s^{-k})^{beta_num / a}.

    Sum over partitions of m with parts in [2, a]; each partition lam
    contributes gen_multinomial(beta_num/a, lam) * prod c_k^{lam(k)}.
    Weighted homogeneous of degree m. m = 0 gives 1 and m = 1 gives 0.
    """
    if m < 0:
        raise ValueError(f"need m >= 0, got {m}")
    varset = model.varset
    alpha = Fraction(beta_num, model.a)
    total = MPoly.zero(varset)
    for lam in partitions(m, 2, model.a):
        coeff = gen_multinomial(alpha, lam)
        if not coeff:
            continue
        exps = tuple(lam.get(k, 0) for k in range(2, model.a + 1))
        total = total + MPoly.monomial(varset, exps, coeff)
    return total


def gamma_coeff(model: LocalModel, i: int) -> MPoly:
    """Coefficient gamma_i of s^{-i} in the unit u(s) with S = s*u(s)."""
    if i < 2:
        raise ValueError(f"gamma index starts at 2, got {i}")
    return f_coeff(model, 1, i)


@functools.lru_cache(maxsize=None)
def _inverse_unit_series(model: LocalModel, nmax: int) -> CoeffSeries:
    """The unit P with s = S * P(S^{-1}), truncated past degree nmax.

    With Q(x) = 1 + sum gamma_m x^m and y = S^{-1}, the inverse variable
    x = s^{-1} satisfies the fixed point x = y*Q(x), and P = 1/Q(x(y)).
    Each pass of the iteration is exact and gains at least two orders,
    so nmax passes always reach the fixed point.
    """
    varset = model.varset
    cap = nmax + 1
    q = CoeffSeries.one(varset, cap)
    for mth in range(2, cap):
        q.coeffs[mth] = gamma_coeff(model, mth)
    y = CoeffSeries(varset, cap, [MPoly.zero(varset), MPoly.constant(varset, 1)])
    x = y
    for _ in range(cap):
        nxt = y * q.compose(x)
        if nxt == x:
            break
        x = nxt
    else:
        raise AssertionError("inverse-unit fixed point did not stabilize")
    return q.compose(x).inverse()


def theta_series(model: LocalModel, nmax: int) -> dict[int, MPoly]:
    """Coefficients theta_2..theta_nmax of the inverse unit: s = S(1 + sum theta_m S^{-m}).

    theta_m is weighted homogeneous of degree m and equals -gamma_m plus
    corrections quadratic in the gammas.
    """
    if nmax < 2:
        raise ValueError(f"need nmax >= 2, got {nmax}")
    p = _inverse_unit_series(model, nmax)
    return {m: p.coeffs[m] for m in range(2, nmax + 1)}


@functools.lru_cache(maxsize=None)
def theta_cap(model: LocalModel, l: int, i: int, nmax: int | None = None) -> MPoly:
    """Coefficient Theta_i^{(l)} of S^{-i} in (s/S)^l = (1 + sum theta_m S^{-m})^l, l < 0.

    Computed by the partition expansion: sum over partitions lam of i with
    parts in [2, i] of gen_multinomial(l, lam) * prod theta_k^{lam(k)}.
    Theta_0 = 1, Theta_1 = 0; weighted homogeneous of degree i.
    """
    if l >= 0:
        raise ValueError(f"need l < 0, got {l}")
    if i < 0:
        raise ValueError(f"need i >= 0, got {i}")
    if nmax is not None and nmax < i:
        raise ValueError(f"truncation nmax={nmax} cannot resolve index i={i}")
    varset = model.varset
    if i == 0:
        return MPoly.constant(varset, 1)
    if i == 1:
        return MPoly.zero(varset)
    thetas = theta_series(model, i)
    total = MPoly.zero(varset)
    for lam in partitions(i, 2, i):
        coeff = gen_multinomial(l, lam)
        if not coeff:
            continue
        term = MPoly.constant(varset, coeff)
        for k, mult in lam.items():
            term = term * thetas[k] ** mult
        total = total + term
    return total


@functools.lru_cache(maxsize=None)
def big_f(model: LocalModel, n: int, nmax: int | None = None) -> MPoly:
    """Obstruction polynomial F_{-n}: the S^{-n} coefficient of the singular tail.

    F_{-n} = sum_{m=1}^{n} Theta_{n-m}^{(-m)} * f_{b+m}; weighted
    homogeneous of degree b + n. Defined for 1 <= n <= a-1.
    """
    if not 1 <= n <= model.a - 1:
        raise ValueError(f"need 1 <= n <= a-1 = {model.a - 1}, got {n}")
    if nmax is not None and nmax < n:
        raise ValueError(f"truncation nmax={nmax} cannot resolve index n={n}")
    total = MPoly.zero(model.varset)
    for m in range(1, n + 1):
        tail = f_coeff(model, model.b, model.b + m)
        if tail.is_zero():
            continue
        total = total + theta_cap(model, -m, n - m) * tail
    return total


def _doubled_image(model: LocalModel, p: MPoly, tilde: bool) -> MPoly:
    """Reinterpret a polynomial in c2..ca inside the doubled ring.

    tilde = True maps it to the comparison copy ct2..cta.
    """
    varset = model.doubled_varset
    n1 = model.a - 1
    out = MPoly.zero(varset)
    for exps, coeff in p.terms.items():
        full = (0,) * n1 + exps if tilde else exps + (0,) * n1
        out = out + MPoly.monomial(varset, full, coeff)
    return out


@functools.lru_cache(maxsize=None)
def f_bar(model: LocalModel, j: int) -> MPoly:
    """Perturbed coefficient polynomial over the doubled ring (c, ct).

    fbar_{b+j}(c) = f_{b+j}(c)
        + sum_{k=2}^{j-1} ((j-k)/a) (c_k - ct_k) f_{b+j-k}(ct)
        - sum_{k=2}^{j-1} ((j-k)/a) sum_{l=2}^{k-2} ((a-l)/a)
              (c_{k-l} - ct_{k-l}) ct_l f_{b+j-k}(ct).

    Setting ct := c recovers f_{b+j}; the added terms are linear in the
    differences c_k - ct_k. For j = 1 there are no added terms.
    """
    if not 1 <= j <= model.a - 1:
        raise ValueError(f"need 1 <= j <= a-1 = {model.a - 1}, got {j}")
    a = model.a
    varset = model.doubled_varset
    total = _doubled_image(model, f_coeff(model, model.b, model.b + j), tilde=False)
    for k in range(2, j):
        weight = Fraction(j - k, a)
        f_tail = _doubled_image(model, f_coeff(model, model.b, model.b + j - k), tilde=True)
        diff_k = (MPoly.variable(varset, f"c{k}")
                  - MPoly.variable(varset, f"ct{k}"))
        total = total + weight * diff_k * f_tail
        for l in range(2, k - 1):
            diff_kl = (MPoly.variable(varset, f"c{k - l}")
                       - MPoly.variable(varset, f"ct{k - l}"))
            ct_l = MPoly.variable(varset, f"ct{l}")
            total = total - weight * Fraction(a - l, a) * diff_kl * ct_l * f_tail
    return total


def f_bar_jacobian_matrix(model: LocalModel) -> list[list[MPoly]]:
    """Matrix d fbar_{b+j} / d c_k (j = 1..a-1 rows, k = 2..a columns).

    Derivatives are taken in the plain variables only; afterwards the
    comparison copy is identified with them (ct := c), so entries live in
    the single ring c2..ca.
    """
    a = model.a
    single = model.varset
    identify = {f"c{k}": MPoly.variable(single, f"c{k}") for k in range(2, a + 1)}
    identify.update({f"ct{k}": MPoly.variable(single, f"c{k}") for k in range(2, a + 1)})
    rows = []
    for j in range(1, a):
        fb = f_bar(model, j)
        rows.append([fb.diff(f"c{k}").evaluate(identify) for k in range(2, a + 1)])
    return rows


@functools.lru_cache(maxsize=None)
def jac_bar(model: LocalModel) -> MPoly:
    """Determinant of the perturbed-system Jacobian, in the single ring.

    For a = 2 this is the single derivative d f_{b+1} / d c_2.
    """
    from .polycore import det_bareiss

    return det_bareiss(f_bar_jacobian_matrix(model))


def sigma_coeff(sigma_model: SigmaModel, l: int, tmax: int) -> MPoly:
    """Coefficient of s^l in S^b + S^{b+1} g0(S), as a polynomial in c.

    sigma_{-l} = f_coeff(b, b-l) + sum_r g_{0,r} * f_coeff(b+r, b+r-l),
    keeping only summands of weighted degree at most tmax. Negative
    fractional-series indices contribute nothing.
    """
    model = sigma_model.model
    b = model.b
    total = MPoly.zero(model.varset)
    if 0 <= b - l <= tmax:
        total = total + f_coeff(model, b, b - l)
    for r, g in enumerate(sigma_model.g0, start=1):
        if g and 0 <= b + r - l <= tmax:
            total = total + g * f_coeff(model, b + r, b + r - l)
    return total
