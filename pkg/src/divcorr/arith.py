"""Integer arithmetic on a smallest-prime-factor sieve.

The :class:`FactorTable` is the backbone of every other module: it factors
any ``n <= limit`` in ``O(log n)`` steps and exposes derived arrays such as
``omega`` and the largest prime factor, computed once and cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, ResourceError


@dataclass(frozen=True, eq=False)
class FactorTable:
    """Smallest prime factor of every integer up to ``limit``.

    Attributes:
        limit: largest integer covered by the table.
        spf: ``spf[n]`` is the smallest prime dividing ``n`` (``n >= 2``);
            entries 0 and 1 are zero.
    """

    limit: int
    spf: np.ndarray = field(repr=False)

    def _check(self, n: int) -> None:
        if n < 1 or n > self.limit:
            raise DomainError(f"n={n} outside factor table range [1, {self.limit}]")

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Return ``[(p, nu), ...]`` with primes increasing and ``prod p**nu == n``."""
        self._check(n)
        out: list[tuple[int, int]] = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            nu = 0
            while n % p == 0:
                n //= p
                nu += 1
            out.append((p, nu))
        return out

    def is_prime(self, n: int) -> bool:
        self._check(n)
        return n >= 2 and int(self.spf[n]) == n

    @cached_property
    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return np.nonzero((self.spf == idx) & (idx >= 2))[0]

    @cached_property
    def prime_power_split(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays ``(pp, nu, rest)`` with ``n = pp[n] * rest[n]``.

        ``pp[n] = p**nu`` is the exact power of ``p = spf[n]`` dividing ``n``.
        Entries 0 and 1 hold ``pp = 1, nu = 0, rest = n``.
        """
        x = self.limit
        n = np.arange(x + 1, dtype=np.int64)
        spf = self.spf.astype(np.int64)
        pp = np.ones(x + 1, dtype=np.int64)
        nu = np.zeros(x + 1, dtype=np.int64)
        rest = n.copy()
        active = np.nonzero(n >= 2)[0]
        p = spf[active]
        while active.size:
            pp[active] *= p
            nu[active] += 1
            rest[active] //= p
            keep = rest[active] % p == 0
            active = active[keep]
            p = p[keep]
        return pp, nu, rest

    @cached_property
    def omega(self) -> np.ndarray:
        """Number of distinct prime factors, ``omega[1] = 0``."""
        _, nu, rest = self.prime_power_split
        return _additive_levels(rest, np.ones_like(nu))

    @cached_property
    def big_omega(self) -> np.ndarray:
        _, nu, rest = self.prime_power_split
        return _additive_levels(rest, nu)

    @cached_property
    def largest_prime_factor(self) -> np.ndarray:
        """``P^+(n)``, with the convention ``P^+(1) = 1``."""
        out = np.zeros(self.limit + 1, dtype=np.int64)
        out[1] = 1
        for p in self.primes:
            out[p::p] = p
        return out

    @cached_property
    def divisor_count(self) -> np.ndarray:
        """``tau(n)`` as int64 for ``0 <= n <= limit`` (``tau(0)`` set to 0)."""
        _, nu, rest = self.prime_power_split
        return multiplicative_levels(rest, nu + 1, np.ones(self.limit + 1, np.int64))


def multiplicative_levels(rest: np.ndarray, fpp: np.ndarray, out: np.ndarray) -> np.ndarray:
    """Fill ``out[n] = fpp[n] * out[rest[n]]`` for ``n >= 2``.

    ``out[1]`` must already hold 1; ``out[0]`` is zeroed. Works for numeric and
    object dtypes. Entries are resolved one omega-level at a time, so the loop
    runs ``max omega(n) + 1`` times.
    """
    size = rest.shape[0]
    done = np.zeros(size, dtype=bool)
    done[:2] = True
    out[0] = 0
    while True:
        ready = np.nonzero(~done & done[rest])[0]
        if ready.size == 0:
            break
        out[ready] = fpp[ready] * out[rest[ready]]
        done[ready] = True
    return out


def _additive_levels(rest: np.ndarray, inc: np.ndarray) -> np.ndarray:
    out = np.zeros(rest.shape[0], dtype=np.int64)
    done = np.zeros(rest.shape[0], dtype=bool)
    done[:2] = True
    while True:
        ready = np.nonzero(~done & done[rest])[0]
        if ready.size == 0:
            return out
        out[ready] = out[rest[ready]] + inc[ready]
        done[ready] = True


def build_factor_table(x: int) -> FactorTable:
    """Sieve smallest prime factors up to ``x``.

    Raises:
        DomainError: if ``x < 2``.
        ResourceError: if the arrays cannot be allocated.
    """
    if x < 2:
        raise DomainError(f"factor table limit must be >= 2, got {x}")
    try:
        dtype = np.int32 if x < 2**31 else np.int64
        spf = np.zeros(x + 1, dtype=dtype)
        for p in range(2, math.isqrt(x) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        idx = np.arange(x + 1, dtype=dtype)
        rest = spf == 0
        spf[rest] = idx[rest]
        spf[:2] = 0
    except MemoryError as exc:
        raise ResourceError(f"cannot allocate factor table for x={x}", x) from exc
    spf.setflags(write=False)
    return FactorTable(limit=x, spf=spf)


def primes_up_to(n: int) -> np.ndarray:
    """All primes ``<= n`` (plain Eratosthenes, int64)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def trial_factorize(n: int) -> list[tuple[int, int]]:
    """Factor a small positive integer by trial division."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            nu = 0
            while n % p == 0:
                n //= p
                nu += 1
            out.append((p, nu))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def mobius(n: int, table: FactorTable | None = None) -> int:
    fac = table.factorize(n) if table is not None else trial_factorize(n)
    if any(nu > 1 for _, nu in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def euler_phi(n: int, table: FactorTable | None = None) -> int:
    fac = table.factorize(n) if table is not None else trial_factorize(n)
    out = n
    for p, _ in fac:
        out = out // p * (p - 1)
    return out


def eval_basic(n: int, kind, table: FactorTable) -> int:
    """Evaluate a classical arithmetic function at ``n``.

    ``kind`` is one of ``"mobius"``, ``"phi"``, ``"omega"``, ``"big_omega"``
    or a tuple ``("omega_class", r, D)`` counting primes ``p | n`` with
    ``p = r mod D``.
    """
    fac = table.factorize(n)
    if kind == "mobius":
        return mobius(n, table)
    if kind == "phi":
        return euler_phi(n, table)
    if kind == "omega":
        return len(fac)
    if kind == "big_omega":
        return sum(nu for _, nu in fac)
    if isinstance(kind, tuple) and kind[0] == "omega_class":
        _, r, D = kind
        if math.gcd(r, D) != 1:
            raise DomainError(f"omega_class needs gcd(r, D) = 1, got r={r}, D={D}")
        return sum(1 for p, _ in fac if (p - r) % D == 0)
    raise DomainError(f"unknown arithmetic function {kind!r}")


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of ``n``."""
    ds = [1]
    for p, nu in trial_factorize(n):
        ds = [d * p**k for d in ds for k in range(nu + 1)]
    return sorted(ds)


def ramanujan_sum(d: int, h: int) -> int:
    """``c_d(h) = sum_{delta | (h, d)} delta * mu(d / delta)``."""
    if d < 1:
        raise DomainError(f"Ramanujan sum needs d >= 1, got {d}")
    g = math.gcd(h, d)
    return sum(delta * mobius(d // delta) for delta in divisors(g))


def iroot(x: int, k: int) -> int:
    """Largest integer ``t`` with ``t**k <= x`` (integer Newton iteration)."""
    if k < 1 or x < 0:
        raise DomainError(f"iroot needs x >= 0 and k >= 1, got x={x}, k={k}")
    if x < 2 or k == 1:
        return x
    t = 1 << -(-x.bit_length() // k)  # t**k > x
    while True:
        s = ((k - 1) * t + x // t ** (k - 1)) // k
        if s >= t:
            break
        t = s
    while t**k > x:
        t -= 1
    while (t + 1) ** k <= x:
        t += 1
    return t
