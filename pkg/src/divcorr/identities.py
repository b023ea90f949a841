"""Combinatorial identities for ``tau_z`` and the friable factorization.

Two exact decompositions are generated and verified term by term on every
``n <= x``:

* the Heath-Brown type identity for rational ``alpha = +-r + u/v``, built from
  the polynomial identity
  ``sum_{K <= m} a_m (X-1)^m = 1 + X^{Nv} sum_l b_l X^{lv-u}`` with
  ``X = zeta^{1/v} G`` and ``G`` the truncation of ``zeta^{-1/v}`` to
  ``n <= x^{1/K}``;
* the Linnik type identity for ``f^(*z)`` with a friable first factor.

Comparing Dirichlet coefficients below ``x`` gives the convolution
coefficients ``c_l = -b_l`` (positive case ``N = 0``, negative case
``N = r - 1``); :func:`hb_verify` checks that this produces zero deviation.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .arith import FactorTable, build_factor_table, iroot
from .divisor import (
    FunctionSpec,
    Scalar,
    TauZ,
    ValueTable,
    ZFold,
    ZParam,
    as_zparam,
    binomial_z,
    dirichlet_convolve,
    is_rational,
    linear_combination,
    sieve_multiplicative,
)
from .errors import DomainError


@dataclass(frozen=True)
class HBCoefficients:
    """Coefficients of the polynomial identity.

    ``b[l-1]`` is ``b_l`` for ``1 <= l <= K``; ``a`` maps ``m`` to ``a_m`` for
    ``K <= m <= (K + N) v - u``.
    """

    K: int
    N: int
    u: int
    v: int
    b: tuple[Fraction, ...]
    a: dict[int, Fraction] = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return (self.K + self.N) * self.v - self.u


@dataclass
class IdentityReport:
    """Outcome of checking an identity on ``1..x``."""

    params: dict
    x: int
    mode: str
    max_abs_deviation: Scalar
    worst_n: int | None
    terms_evaluated: int

    @property
    def exact_zero(self) -> bool:
        return self.max_abs_deviation == 0


def _check_uv(u: int, v: int) -> None:
    if not (v > u >= 0):
        raise DomainError(f"need v > u >= 0, got u={u}, v={v}")


def _exponents(K: int, N: int, u: int, v: int) -> list[int]:
    return [l * v + N * v - u for l in range(1, K + 1)]


def hb_b_coefficients(K: int, N: int, u: int, v: int) -> list[Fraction]:
    """Closed form ``b_l = (-1)^l / ((l-1)! (K-l)!) prod_{j != l} (j + N - u/v)``.

    The result is checked against the moment system it must solve.
    """
    _check_uv(u, v)
    if K < 1 or N < 0:
        raise DomainError(f"need K >= 1 and N >= 0, got K={K}, N={N}")
    shift = N - Fraction(u, v)
    b = []
    for l in range(1, K + 1):
        prod = Fraction(1)
        for j in range(1, K + 1):
            if j != l:
                prod *= j + shift
        b.append((-1) ** l * prod / (math.factorial(l - 1) * math.factorial(K - l)))
    exps = _exponents(K, N, u, v)
    for row in range(K):
        lhs = sum(bl * Fraction(e) ** row for bl, e in zip(b, exps))
        if lhs != (-1 if row == 0 else 0):
            raise ArithmeticError(f"b_l closed form fails row {row} of the moment system")
    return b


def hb_b_vandermonde(K: int, N: int, u: int, v: int) -> list[Fraction]:
    """Solve the Vandermonde moment system for ``b`` by exact elimination.

    Row ``j`` reads ``sum_l b_l (lv + Nv - u)^j = -[j = 0]``.
    """
    _check_uv(u, v)
    exps = _exponents(K, N, u, v)
    M = [[Fraction(e) ** j for e in exps] + [Fraction(-1 if j == 0 else 0)] for j in range(K)]
    for col in range(K):
        piv = next(r for r in range(col, K) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [c * inv for c in M[col]]
        for r in range(K):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[r][K] for r in range(K)]


def hb_a_coefficients(coeffs: HBCoefficients) -> dict[int, Fraction]:
    """Re-expand ``1 + sum_l b_l X^{e_l}`` in powers of ``X - 1``.

    The coefficient of ``(X-1)^m`` is ``[m = 0] + sum_l b_l binom(e_l, m)``;
    those with ``m < K`` must vanish, the rest are returned.
    """
    exps = _exponents(coeffs.K, coeffs.N, coeffs.u, coeffs.v)
    out = {}
    for m in range(coeffs.degree + 1):
        c = Fraction(1 if m == 0 else 0) + sum(
            (bl * math.comb(e, m) for bl, e in zip(coeffs.b, exps)), Fraction(0)
        )
        if m < coeffs.K:
            if c != 0:
                raise ArithmeticError(f"(X-1)^{m} coefficient {c} should vanish")
        else:
            out[m] = c
    return out


def hb_coefficients(K: int, N: int, u: int, v: int) -> HBCoefficients:
    b = tuple(hb_b_coefficients(K, N, u, v))
    partial = HBCoefficients(K, N, u, v, b)
    return HBCoefficients(K, N, u, v, b, hb_a_coefficients(partial))


def hb_verify(r: int, u: int, v: int, K: int, x: int, mode: str = "exact",
              sign: int = 1, table: FactorTable | None = None) -> IdentityReport:
    """Check the Heath-Brown type decomposition of ``tau_{sign*r + u/v}`` on ``1..x``.

    For ``sign = +1`` the ``l``-th term convolves ``tau_{l+r}`` with ``l v - u``
    copies of the truncated ``tau_{-1/v}``; for ``sign = -1`` it convolves
    ``tau_{l-1}`` with ``l v + (r-1) v - u`` copies. Truncation keeps
    ``n <= floor(x^{1/K})``.
    """
    _check_uv(u, v)
    if K < 1 or x < 2:
        raise DomainError(f"need K >= 1 and x >= 2, got K={K}, x={x}")
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    if r < (0 if sign > 0 else 1):
        raise DomainError(f"r={r} is out of range for sign {sign:+d}")
    table = table or build_factor_table(x)
    y = iroot(x, K)
    if y < 2:
        warnings.warn(f"x^(1/K) < 2 for x={x}, K={K}: truncated factor is trivial", stacklevel=2)
    N = 0 if sign > 0 else r - 1
    b = hb_b_coefficients(K, N, u, v)
    alpha = sign * r + Fraction(u, v)

    lhs = sieve_multiplicative(TauZ(alpha), x, table, mode)
    g = sieve_multiplicative(TauZ(Fraction(-1, v)), x, table, mode).truncate(y)
    powers = {1: g}

    def gpow(k: int) -> ValueTable:
        top = max(j for j in powers if j <= k)
        while top < k:
            powers[top + 1] = dirichlet_convolve(powers[top], g)
            top += 1
        return powers[k]

    terms, coeffs = [], []
    for l in range(1, K + 1):
        unrestricted = l + r if sign > 0 else l - 1
        copies = l * v - u if sign > 0 else l * v + (r - 1) * v - u
        tau_m = sieve_multiplicative(TauZ(unrestricted), x, table, mode)
        terms.append(dirichlet_convolve(tau_m, gpow(copies)))
        coeffs.append(-b[l - 1])
    rhs = linear_combination(terms, coeffs, "hb_rhs")
    dev, worst = rhs.max_abs_difference(lhs)
    params = {"r": r, "u": u, "v": v, "K": K, "sign": sign}
    return IdentityReport(params, x, mode, dev, worst, K * x)


def linnik_coefficients(z: ZParam, K: int) -> list[Scalar]:
    """``c_l = (-1)^l sum_{l <= k < K} (-1)^k binom(z, k) binom(k, l)`` for ``0 <= l < K``."""
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    z = as_zparam(z)
    binz = [binomial_z(z, k) for k in range(K)]
    out = []
    for l in range(K):
        s = sum(((-1) ** (k - l) * binz[k] * math.comb(k, l) for k in range(l, K)),
                Fraction(0) if is_rational(z) else 0j)
        out.append(s)
    return out


def linnik_verify(f: FunctionSpec, z: ZParam, K: int, x: int, mode: str | None = None,
                  table: FactorTable | None = None) -> IdentityReport:
    """Check ``f^(*z)(n) = sum_l c_l sum_{n = n1 n2, P+(n1) <= x^{1/K}} f^(*(z-l))(n1) f^(*l)(n2)``.

    ``mode`` defaults to exact when ``f`` and ``z`` are rational.
    """
    if K < 1 or x < 2:
        raise DomainError(f"need K >= 1 and x >= 2, got K={K}, x={x}")
    z = as_zparam(z)
    if mode is None:
        mode = "exact" if is_rational(z) and f.rational() else "float"
    table = table or build_factor_table(x)
    y = iroot(x, K)
    if y < 2:
        warnings.warn(f"x^(1/K) < 2 for x={x}, K={K}: friable factor is trivial", stacklevel=2)
    friable = table.largest_prime_factor[: x + 1] <= y
    c = linnik_coefficients(z, K)
    lhs = sieve_multiplicative(ZFold(f, z), x, table, mode)
    terms = []
    for l in range(K):
        n1 = sieve_multiplicative(ZFold(f, z - l), x, table, mode).restrict(friable, f"friable|{l}")
        n2 = sieve_multiplicative(ZFold(f, l), x, table, mode)
        terms.append(dirichlet_convolve(n1, n2))
    rhs = linear_combination(terms, c, "linnik_rhs")
    dev, worst = rhs.max_abs_difference(lhs)
    params = {"f": f.key(), "z": z, "K": K}
    return IdentityReport(params, x, mode, dev, worst, K * x)


# --------------------------------------------------------------------------
# friable factorization


class FriableClass(enum.Enum):
    SIGMA_I = "Sigma_I"
    SIGMA_TRIV = "Sigma_triv"


class Split(NamedTuple):
    n1: int
    n2: int


def friable_factorize(n: int, y: int, w: int, table: FactorTable) -> FriableClass | Split:
    """Classify a ``y``-friable ``n`` for the well-factorization.

    Returns ``SIGMA_I`` if ``n <= w``; ``SIGMA_TRIV`` if some ``p^nu || n``
    exceeds ``y``; otherwise the split obtained by multiplying prime powers
    into ``n1`` in increasing order of ``p`` until ``n1 > w``.
    """
    if y < 2 or w < 2:
        raise DomainError(f"need y, w >= 2, got y={y}, w={w}")
    fac = table.factorize(n)
    if fac and fac[-1][0] > y:
        raise DomainError(f"n={n} is not {y}-friable")
    if n <= w:
        return FriableClass.SIGMA_I
    if any(p**nu > y for p, nu in fac):
        return FriableClass.SIGMA_TRIV
    n1 = 1
    for p, nu in fac:
        q = p**nu
        n1 *= q
        if n1 > w:
            break
    n2 = n // n1
    # construction guarantees: w < n1 <= w Q+(n1), P+(n1) < P-(n2), coprime
    assert w < n1 <= w * q
    assert n2 == 1 or table.spf[n2] > p
    return Split(n1, n2)


def admissible_splits(n: int, w: int, table: FactorTable) -> list[Split]:
    """All coprime ``n = n1 n2`` with ``P+(n1) < P-(n2)`` and ``w < n1 <= w Q+(n1)``.

    Brute-force enumeration over unitary divisors, used as the uniqueness oracle.
    """
    fac = table.factorize(n)
    out = []
    for mask in range(1, 1 << len(fac)):
        parts = [fac[i] for i in range(len(fac)) if mask >> i & 1]
        n1 = math.prod(p**nu for p, nu in parts)
        n2 = n // n1
        p_top, nu_top = parts[-1]
        rest_primes = [p for i, (p, _) in enumerate(fac) if not mask >> i & 1]
        if rest_primes and min(rest_primes) < p_top:
            continue
        if w < n1 <= w * p_top**nu_top:
            out.append(Split(n1, n2))
    return out


@dataclass
class FriableReport:
    """Sums of ``f g`` over ``y``-friable ``n <= x`` split by classification."""

    sum_total: Scalar
    sum_I: Scalar
    sum_triv: Scalar
    residual: Scalar
    split_mass: Scalar
    split_count: int


def friable_decomposition_report(f: ValueTable, g, y: int, w: int, x: int,
                                 table: FactorTable) -> FriableReport:
    """Classify every ``y``-friable ``n <= x`` and sum ``f(n) g(n)`` per class.

    ``residual = sum_total - sum_I - sum_triv`` is the part carried by splits.
    ``split_mass`` recomputes it from the pieces as ``sum f(n1) f(n2) g(n)``,
    which agrees for multiplicative ``f`` since ``(n1, n2) = 1``.
    """
    if x > f.limit or x > table.limit:
        raise DomainError(f"x={x} exceeds table limits")
    g = np.asarray(g.values if isinstance(g, ValueTable) else g)
    exact = f.mode == "exact"
    zero = Fraction(0) if exact else 0j
    total = s_i = s_triv = split_mass = zero
    count = 0
    lpf = table.largest_prime_factor
    for n in range(1, x + 1):
        if lpf[n] > y:
            continue
        term = f[n] * g[n]
        total += term
        cls = friable_factorize(n, y, w, table)
        if cls is FriableClass.SIGMA_I:
            s_i += term
        elif cls is FriableClass.SIGMA_TRIV:
            s_triv += term
        else:
            count += 1
            split_mass += f[cls.n1] * f[cls.n2] * g[n]
    residual = total - s_i - s_triv
    return FriableReport(total, s_i, s_triv, residual, split_mass, count)
