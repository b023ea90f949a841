"""Shifted convolution sums, the character kernel and the explicit main term.

Notation: ``g = (h, q)`` and ``m = q / g``. The kernel

    tilde_tau_h(n; R) = 2 sum_{q <= sqrt(n-h), (n,q) = (h,q)} phi(m)^{-1}
                        sum_{chi mod m, cond(chi) <= R} chi(h/g) conj chi(n/g)

is evaluated through the matrices ``S_f[a, b] = sum_{psi prim mod f} psi(a) conj psi(b)``:
a character mod ``m`` with conductor ``f`` is the lift of a unique primitive
``psi`` mod ``f``, and ``h/g``, ``n/g`` are units mod ``m`` whenever the gcd
condition holds. ``S_f`` is built from the character pool and, independently,
has the closed form ``sum_{d | f} mu(f/d) phi(d) [a = b mod d]`` used by
:func:`tilde_tau_exact`.

Sums over ``n`` are organised per modulus ``q`` through residue-class column
sums of ``f``, so every ``q`` costs one pass over a contiguous slice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .arith import FactorTable, build_factor_table, divisors, euler_phi, mobius
from .characters import DirichletCharacter, character_group, primitive_characters_up_to
from .divisor import (
    FunctionSpec,
    Scalar,
    ValueTable,
    ZParam,
    ZPowOmega,
    as_zparam,
    is_rational,
    sieve_multiplicative,
)
from .errors import DomainError
from .parallel import exact_sum, fixed_blocks, ordered_map

Q_BLOCK = 64


# --------------------------------------------------------------------------
# helpers


def _as_table(f, x: int, table: FactorTable | None, mode: str | None) -> ValueTable:
    if isinstance(f, ValueTable):
        if f.limit < x:
            raise DomainError(f"value table covers n <= {f.limit}, need {x}")
        return f
    if not isinstance(f, FunctionSpec):
        raise DomainError(f"expected a FunctionSpec or ValueTable, got {type(f).__name__}")
    if mode is None:
        mode = "exact" if f.rational() else "float"
    return sieve_multiplicative(f, x, table, mode)


def _tau_array(limit: int, table: FactorTable | None) -> np.ndarray:
    if table is None or table.limit < limit:
        table = build_factor_table(max(limit, 2))
    return table.divisor_count


def _column_sums(vals: np.ndarray, lo: int, hi: int, q: int) -> np.ndarray:
    """``out[r] = sum_{lo <= n <= hi, n = r mod q} vals[n]``."""
    out_dtype = vals.dtype
    if hi < lo:
        return np.zeros(q, dtype=out_dtype)
    seg = vals[lo : hi + 1]
    pad = (-seg.shape[0]) % q
    if pad:
        seg = np.concatenate([seg, np.zeros(pad, dtype=out_dtype)])
    cols = seg.reshape(-1, q).sum(axis=0)
    # column j holds residue (lo + j) mod q
    return np.roll(cols, lo % q)


def _fsum_array(arr: np.ndarray):
    if arr.dtype == object:
        total = 0
        for v in arr:
            total += v
        return total
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))
    return math.fsum(arr.tolist())


def _scalar_out(v) -> Scalar:
    if isinstance(v, (Fraction, int, np.integer)):
        v = Fraction(v)
        return v.numerator if v.denominator == 1 else v
    return complex(v)


# --------------------------------------------------------------------------
# shifted convolution sum


def divisor_correlation(f, x: int, a: int = 1, h: int = 1, table: FactorTable | None = None,
                        mode: str | None = None) -> Scalar:
    """``D_f(x; a, h) = sum_{|h|/a < n <= x} f(n) tau(a n - h)``.

    Args:
        f: a :class:`FunctionSpec` or a precomputed :class:`ValueTable`.
        x: upper end of the range.
        a: positive multiplier.
        h: nonzero shift.
        table: factor table covering ``a x + |h|`` (built if missing).
        mode: table mode when ``f`` is a spec.

    Returns:
        Exact rational for exact tables, complex otherwise.
    """
    if a < 1 or h == 0:
        raise DomainError(f"need a >= 1 and h != 0, got a={a}, h={h}")
    if x < 1:
        return 0
    lo = abs(h) // a + 1
    if lo > x:
        return 0
    need = a * x - h
    fac = table if table is not None and table.limit >= max(need, x) else build_factor_table(max(need, x, 2))
    ft = _as_table(f, x, fac, mode)
    tau = _tau_array(need, fac)
    n = np.arange(lo, x + 1)
    weights = tau[a * n - h]
    vals = ft.values[lo : x + 1]
    if ft.mode == "exact":
        total = 0
        for fv, w in zip(vals, weights.tolist()):
            if fv:
                total += fv * w
        return _scalar_out(total)
    return _scalar_out(_fsum_array(vals * weights))


# --------------------------------------------------------------------------
# kernel


def kernel_matrix_exact(f: int) -> np.ndarray:
    """Integer matrix ``S_f[a, b] = sum_{d | f} mu(f/d) phi(d) [a = b mod d]`` on units."""
    idx = np.arange(f)
    out = np.zeros((f, f), dtype=np.int64)
    for d in divisors(f):
        mu = mobius(f // d)
        if mu:
            out += mu * euler_phi(d) * ((idx[:, None] - idx[None, :]) % d == 0)
    unit = np.gcd(idx, f) == 1
    out[~unit, :] = 0
    out[:, ~unit] = 0
    return out


@dataclass
class CharacterPool:
    """Primitive characters of conductor ``<= R`` with cached kernel matrices."""

    R: int
    characters: list[DirichletCharacter] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.R < 1:
            raise DomainError(f"R must be >= 1, got {self.R}")
        if not self.characters:
            self.characters = primitive_characters_up_to(self.R)
        self._kernels: dict[int, np.ndarray] = {}

    @cached_property
    def by_conductor(self) -> dict[int, list[DirichletCharacter]]:
        out: dict[int, list[DirichletCharacter]] = {}
        for c in self.characters:
            out.setdefault(c.conductor, []).append(c)
        return out

    def kernel(self, f: int) -> np.ndarray:
        """``S_f`` from character values (complex ``f x f`` matrix)."""
        if f not in self._kernels:
            chars = self.by_conductor.get(f, [])
            if not chars:
                self._kernels[f] = np.zeros((f, f), dtype=np.complex128)
            else:
                V = np.stack([c.values for c in chars])
                self._kernels[f] = V.T @ V.conj()
        return self._kernels[f]

    def conductors_dividing(self, m: int) -> list[int]:
        return [f for f in divisors(m) if f <= self.R and f in self.by_conductor]


def _check_kernel_args(n: int, h: int, R: int) -> None:
    if n < 1 or n - h < 1:
        raise DomainError(f"kernel needs n >= 1 and n - h >= 1, got n={n}, h={h}")
    if R < 1:
        raise DomainError(f"R must be >= 1, got {R}")


def tilde_tau_complex(n: int, h: int, R: int, pool: CharacterPool | None = None) -> complex:
    """Kernel value before discarding the (vanishing) imaginary part."""
    _check_kernel_args(n, h, R)
    pool = pool if pool is not None and pool.R == R else CharacterPool(R)
    terms = []
    for q in range(1, math.isqrt(n - h) + 1):
        g = math.gcd(h, q)
        if math.gcd(n, q) != g:
            continue
        m = q // g
        s = 0j
        for f in pool.conductors_dividing(m):
            s += pool.kernel(f)[(h // g) % f, (n // g) % f]
        terms.append(s / euler_phi(m))
    return 2 * exact_sum(terms) if terms else 0j


def tilde_tau(n: int, h: int, R: int, pool: CharacterPool | None = None) -> float:
    """``tilde_tau_h(n; R)`` as a real number.

    Raises:
        DomainError: if ``n - h < 1``.
        ArithmeticError: if the imaginary part exceeds ``1e-9``.
    """
    v = tilde_tau_complex(n, h, R, pool)
    if abs(v.imag) > 1e-9:
        raise ArithmeticError(f"kernel has imaginary part {v.imag} at n={n}, h={h}, R={R}")
    return v.real


def tilde_tau_exact(n: int, h: int, R: int) -> Fraction:
    """Kernel value in exact rationals via the closed form of ``S_f``."""
    _check_kernel_args(n, h, R)
    total = Fraction(0)
    for q in range(1, math.isqrt(n - h) + 1):
        g = math.gcd(h, q)
        if math.gcd(n, q) != g:
            continue
        m = q // g
        a, b = h // g, n // g
        s = 0
        for f in divisors(m):
            if f > R:
                break
            s += sum(mobius(f // d) * euler_phi(d) for d in divisors(f) if (a - b) % d == 0)
        total += Fraction(s, euler_phi(m))
    return 2 * total


def _tau_small(n: int) -> int:
    return len(divisors(n))


def delta_h(n: int, h: int, R: int, pool: CharacterPool | None = None) -> float:
    """``Delta_h(n; R) = tau(n - h) - tilde_tau_h(n; R)``."""
    return _tau_small(n - h) - tilde_tau(n, h, R, pool)


def _kernel_weights(q: int, a: int, h: int, pool: CharacterPool) -> np.ndarray:
    """``w[r]`` such that the ``q``-term of ``tilde_tau_h(a n; R)`` is ``w[n mod q]``.

    Includes the factor ``1/phi(m)`` but not the overall 2.
    """
    g = math.gcd(h, q)
    m = q // g
    r = np.arange(q)
    ar = a * r
    ok = np.gcd(ar, q) == g
    w = np.zeros(q, dtype=np.complex128)
    b = (ar // g)[ok]
    hg = h // g
    for f in pool.conductors_dividing(m):
        w[ok] += pool.kernel(f)[hg % f, b % f]
    return w / euler_phi(m)


def sigma_f(f, lo: int, hi: int, a: int = 1, h: int = 1, R: int = 1,
            table: FactorTable | None = None, pool: CharacterPool | None = None,
            threads: int | None = None) -> complex:
    """``Sigma_f(I; a, h; R) = sum_{n in I} f(n) Delta_h(a n; R)`` with ``I = (lo, hi]``.

    The kernel part is summed per ``q``: for each ``q`` the admissible ``n``
    satisfy ``a n - h >= q^2`` and the summand depends on ``n mod q`` only.
    """
    if hi <= lo:
        raise DomainError(f"empty interval ({lo}, {hi}]")
    if a < 1 or a * (lo + 1) - h < 1:
        raise DomainError(f"need a n - h >= 1 on the interval, got a={a}, h={h}, lo={lo}")
    need = a * hi - h
    fac = table if table is not None and table.limit >= max(need, hi) else build_factor_table(max(need, hi, 2))
    ft = _as_table(f, hi, fac, "float" if isinstance(f, FunctionSpec) else None)
    vals = ft.values
    if vals.dtype == object:
        vals = vals.astype(np.complex128)
    pool = pool if pool is not None and pool.R == R else CharacterPool(R)
    tau = fac.divisor_count
    n = np.arange(lo + 1, hi + 1)
    direct = _fsum_array(vals[lo + 1 : hi + 1] * tau[a * n - h])

    qmax = math.isqrt(need)

    def block(bounds):
        parts = []
        for q in range(bounds[0], bounds[1]):
            nmin = max(lo + 1, -(-(q * q + h) // a))
            if nmin > hi:
                continue
            cols = _column_sums(vals, nmin, hi, q)
            w = _kernel_weights(q, a, h, pool)
            parts.append(complex(np.dot(cols, w)))
        return parts

    blocks = ordered_map(block, fixed_blocks(1, qmax + 1, Q_BLOCK), threads)
    kernel_sum = 2 * exact_sum([p for b in blocks for p in b])
    return complex(direct) - kernel_sum


# --------------------------------------------------------------------------
# main term


def _primitive_dividing(D: int) -> list[DirichletCharacter]:
    out = []
    for c in divisors(D):
        out.extend(character_group(c).primitive())
    return out


@dataclass
class MainTerm:
    """``M_f(x; a, h)`` and its split over primitive characters with conductor dividing ``D``."""

    value: Scalar
    partials: dict[str, Scalar]


def main_term_detail(f, x: int, a: int = 1, h: int = 1, D: int = 1,
                     table: FactorTable | None = None, mode: str | None = None,
                     threads: int | None = None) -> MainTerm:
    """Evaluate the main term character by character.

    ``M_f = 2 sum_{chi} sum_{q <= sqrt(a x), cond(chi) | m} conj chi(h/g) / phi(m)
    sum_{q^2/a <= n <= x, (a n, q) = g} f(n) chi(a n / g)``, with ``chi``
    primitive of conductor dividing ``D``. Exact when the value table is
    exact and every character involved is real.
    """
    if a < 1 or h == 0 or D < 1:
        raise DomainError(f"need a >= 1, h != 0, D >= 1, got a={a}, h={h}, D={D}")
    ft = _as_table(f, x, table, mode)
    chars = _primitive_dividing(D)
    exact = ft.mode == "exact" and all(c.is_real for c in chars)
    vals = ft.values if exact else ft.values.astype(np.complex128)
    qmax = math.isqrt(a * x)

    def block(bounds):
        acc = {c.label: [] for c in chars}
        for q in range(bounds[0], bounds[1]):
            nmin = -(-(q * q) // a)
            if nmin > x:
                continue
            g = math.gcd(h, q)
            m = q // g
            live = [c for c in chars if m % c.conductor == 0]
            if not live:
                continue
            r = np.arange(q)
            ar = a * r
            ok = np.nonzero(np.gcd(ar, q) == g)[0]
            cols = _column_sums(vals, nmin, x, q)[ok]
            b = ar[ok] // g
            phi_m = euler_phi(m)
            for c in live:
                if exact:
                    chi_b = [c.exact(int(t)) for t in b]
                    s = sum((cv * w for cv, w in zip(cols, chi_b) if w), 0)
                    acc[c.label].append(Fraction(c.exact(h // g)) * s / phi_m)
                else:
                    s = np.dot(cols, c.values[b % c.conductor])
                    acc[c.label].append(np.conj(c(h // g)) * complex(s) / phi_m)
        return acc

    blocks = ordered_map(block, fixed_blocks(1, qmax + 1, Q_BLOCK), threads)
    partials = {}
    for c in chars:
        partials[c.label] = _scalar_out(2 * exact_sum([v for b in blocks for v in b[c.label]]))
    total = _scalar_out(exact_sum(list(partials.values())))
    return MainTerm(total, partials)


def main_term(f, x: int, a: int = 1, h: int = 1, D: int = 1, table: FactorTable | None = None,
              mode: str | None = None, threads: int | None = None) -> Scalar:
    """``M_f(x; a, h)``; see :func:`main_term_detail`."""
    return main_term_detail(f, x, a, h, D, table, mode, threads).value


def main_term_shift1(f, x: int, D: int = 1, table: FactorTable | None = None,
                     mode: str | None = None) -> Scalar:
    """Main term for ``a = h = 1`` by a separate route.

    ``2 sum_chi sum_{q <= sqrt x, cond(chi) | q} phi(q)^{-1}
    sum_{q^2 <= n <= x, (n, q) = 1} f(n) chi(n)``, where coprimality is handled
    by Moebius inclusion-exclusion over strided slices instead of residue
    classes.
    """
    ft = _as_table(f, x, table, mode)
    chars = _primitive_dividing(D)
    exact = ft.mode == "exact" and all(c.is_real for c in chars)
    total = []
    n = np.arange(x + 1)
    for c in chars:
        if exact:
            chi_n = np.array([c.exact(int(t)) for t in range(c.conductor)], dtype=object)[n % c.conductor]
            fc = ft.values * chi_n
        else:
            fc = ft.values.astype(np.complex128) * c.values[n % c.conductor]
        for q in range(c.conductor, math.isqrt(x) + 1, c.conductor):
            start = q * q
            s = 0
            for d in divisors(q):
                mu = mobius(d)
                if mu:
                    first = -(-start // d) * d
                    s += mu * _fsum_array(fc[first : x + 1 : d])
            total.append(Fraction(s, euler_phi(q)) if exact else s / euler_phi(q))
    return _scalar_out(2 * exact_sum(total))


# --------------------------------------------------------------------------
# report


@dataclass
class CorrelationReport:
    """Shifted convolution sum next to its main term and kernel discrepancy."""

    x: int
    a: int
    h: int
    R: int | None
    D: int
    d_value: Scalar
    m_value: Scalar
    sigma_value: Scalar | None = None
    interval: tuple[int, int] | None = None
    partials: dict[str, Scalar] = field(default_factory=dict)

    @property
    def normalized_gap(self) -> float:
        return float(abs(complex(self.d_value) - complex(self.m_value))) / self.x


def correlation_report(f, x: int, a: int = 1, h: int = 1, D: int = 1, R: int | None = None,
                       interval: tuple[int, int] | None = None, mode: str | None = None,
                       threads: int | None = None) -> CorrelationReport:
    """Compute ``D_f`` next to ``M_f`` on one shared factor table, adding ``Sigma_f`` when ``R`` is set."""
    need = max(a * x + abs(h), x, 2)
    fac = build_factor_table(need)
    ft = _as_table(f, x, fac, mode)
    d = divisor_correlation(ft, x, a, h, fac)
    mt = main_term_detail(ft, x, a, h, D, fac, threads=threads)
    sig = None
    if R is not None:
        lo, hi = interval if interval is not None else (x // 2, x)
        sig = sigma_f(ft, lo, hi, a, h, R, fac, threads=threads)
        interval = (lo, hi)
    return CorrelationReport(x, a, h, R, D, d, mt.value, sig, interval, mt.partials)


# --------------------------------------------------------------------------
# restricted correlations


def _omega_tau(x: int, h: int, table: FactorTable | None):
    if h == 0:
        raise DomainError("h must be nonzero")
    lo = abs(h) + 1
    need = max(x - h, x, 2)
    fac = table if table is not None and table.limit >= need else build_factor_table(need)
    n = np.arange(lo, x + 1)
    return fac, n, fac.divisor_count[n - h] if n.size else np.zeros(0, dtype=np.int64)


def correlation_by_omega(x: int, h: int, k: int, table: FactorTable | None = None) -> int:
    """``sum_{|h| < n <= x, omega(n) = k} tau(n - h)``."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    fac, n, tau = _omega_tau(x, h, table)
    if not n.size:
        return 0
    return int(tau[fac.omega[n] == k].sum())


def correlation_by_omega_all(x: int, h: int, table: FactorTable | None = None) -> dict[int, int]:
    """All nonzero ``correlation_by_omega(x, h, k)`` keyed by ``k``."""
    fac, n, tau = _omega_tau(x, h, table)
    if not n.size:
        return {}
    counts = np.bincount(fac.omega[n], weights=None, minlength=1)
    sums = np.zeros(counts.shape[0], dtype=np.int64)
    np.add.at(sums, fac.omega[n], tau)
    return {k: int(s) for k, s in enumerate(sums) if counts[k]}


def xi_polynomial(x: int, h: int, z: ZParam, table: FactorTable | None = None) -> Scalar:
    """``Xi_{x,h}(z) = sum_{|h| < n <= x} z^omega(n) tau(n - h)``, exact for rational ``z``."""
    z = as_zparam(z)
    fac, n, tau = _omega_tau(x, h, table)
    if not n.size:
        return 0
    mode = "exact" if is_rational(z) else "float"
    w = sieve_multiplicative(ZPowOmega(z), x, fac, mode).values[n]
    if mode == "exact":
        total = 0
        for wv, t in zip(w, tau.tolist()):
            total += wv * t
        return _scalar_out(total)
    return _scalar_out(_fsum_array(w * tau))


# --------------------------------------------------------------------------
# b_chi


def b_chi_parameters(class_values, D: int) -> dict[str, Scalar]:
    """Coefficients ``b_chi = phi(D)^{-1} sum_r v(r) conj chi(r)`` over characters mod ``D``.

    Args:
        class_values: mapping ``r -> v(r)`` on reduced residues mod ``D``.
        D: the modulus.

    Returns:
        Mapping from character label to ``b_chi``. The reconstruction
        ``sum_chi b_chi chi(r) = v(r)`` is asserted on every reduced ``r``.
    """
    if D < 1:
        raise DomainError(f"D must be >= 1, got {D}")
    units = [r for r in range(D) if math.gcd(r, D) == 1] if D > 1 else [0]
    vals = {r % D if D > 1 else 0: as_zparam(v) for r, v in dict(class_values).items()}
    if sorted(vals) != units:
        raise DomainError(f"class values must cover exactly the reduced residues mod {D}")
    group = character_group(D)
    exact = all(c.is_real for c in group) and all(is_rational(v) for v in vals.values())
    phi = euler_phi(D)
    out = {}
    for c in group:
        if exact:
            out[c.label] = _scalar_out(sum(vals[r] * c.exact(r) for r in units) / Fraction(phi))
        else:
            out[c.label] = sum(complex(vals[r]) * np.conj(c(r)) for r in units) / phi
    for r in units:
        if exact:
            back = sum(out[c.label] * c.exact(r) for c in group)
            ok = back == vals[r]
        else:
            back = sum(complex(out[c.label]) * c(r) for c in group)
            ok = abs(back - complex(vals[r])) < 1e-12
        if not ok:
            raise ArithmeticError(f"b_chi reconstruction failed at r={r}")
    return out
