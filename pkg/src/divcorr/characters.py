"""Dirichlet characters stored as exact root-of-unity exponents.

A character modulo ``q`` is kept as a tuple ``exps`` of length ``q`` where
``exps[a] = k`` means ``chi(a) = e(k / phi(q))`` and ``exps[a] = -1`` means
``chi(a) = 0`` (``gcd(a, q) > 1``). Exactness matters: orthogonality and the
kernel identities are tested with no floating drift.

Groups are built from generators of ``(Z/p^e Z)^*``: a primitive root for odd
``p``, and ``{-1, 5}`` for ``2^e`` with ``e >= 3``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .arith import euler_phi, trial_factorize
from .errors import DomainError


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character modulo ``modulus``.

    Attributes:
        modulus: the modulus ``q``.
        conductor: modulus of the primitive character inducing this one.
        index: position inside :func:`character_group` (0 is principal).
        exps: exponent table, see module docstring.
    """

    modulus: int
    conductor: int
    index: int
    exps: tuple[int, ...] = field(repr=False)

    @property
    def primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def order_base(self) -> int:
        """``phi(q)``: values are ``phi(q)``-th roots of unity."""
        return euler_phi(self.modulus)

    @property
    def is_principal(self) -> bool:
        return all(k <= 0 for k in self.exps)

    @cached_property
    def is_real(self) -> bool:
        m = self.order_base
        return all(k < 0 or (2 * k) % m == 0 for k in self.exps)

    def exponent(self, n: int) -> int:
        """Root-of-unity exponent of ``chi(n)``, or -1 when ``chi(n) = 0``."""
        return self.exps[n % self.modulus]

    def __call__(self, n: int) -> complex:
        k = self.exps[n % self.modulus]
        if k < 0:
            return 0j
        return _root(k, self.order_base)

    def exact(self, n: int) -> int:
        """Value at ``n`` as an integer; only valid for real characters."""
        k = self.exps[n % self.modulus]
        if k < 0:
            return 0
        m = self.order_base
        if (2 * k) % m:
            raise ValueError(f"character {self.label} is not real-valued at {n}")
        return 1 if k == 0 else -1

    @cached_property
    def values(self) -> np.ndarray:
        """Complex values on residues ``0 .. q-1``."""
        m = self.order_base
        out = np.zeros(self.modulus, dtype=np.complex128)
        for a, k in enumerate(self.exps):
            if k >= 0:
                out[a] = _root(k, m)
        return out

    @property
    def label(self) -> str:
        return f"{self.modulus}.{self.index}"

    def lift(self, m: int) -> "DirichletCharacter":
        """The character modulo a multiple ``m`` of ``modulus`` induced by this one."""
        if m % self.modulus:
            raise DomainError(f"cannot lift a character mod {self.modulus} to mod {m}")
        mb, ob = euler_phi(m), self.order_base
        exps = []
        for a in range(m):
            k = self.exps[a % self.modulus]
            exps.append(k * (mb // ob) if k >= 0 and math.gcd(a, m) == 1 else -1)
        return DirichletCharacter(m, self.conductor, -1, tuple(exps))


def _root(k: int, m: int) -> complex:
    # exact values at quarter turns keep real characters free of roundoff
    r = Fraction(k, m) % 1
    if r == 0:
        return 1 + 0j
    if r == Fraction(1, 2):
        return -1 + 0j
    if r == Fraction(1, 4):
        return 1j
    if r == Fraction(3, 4):
        return -1j
    return cmath.exp(2j * math.pi * float(r))


@dataclass(frozen=True)
class CharGroup:
    """All ``phi(q)`` characters modulo ``q``."""

    modulus: int
    characters: tuple[DirichletCharacter, ...]

    def __len__(self) -> int:
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def __getitem__(self, i: int) -> DirichletCharacter:
        return self.characters[i]

    @property
    def principal(self) -> DirichletCharacter:
        return self.characters[0]

    def primitive(self) -> list[DirichletCharacter]:
        return [c for c in self.characters if c.primitive]

    def find(self, exps: tuple[int, ...]) -> DirichletCharacter:
        for c in self.characters:
            if c.exps == exps:
                return c
        raise KeyError("no character with these values")


def _primitive_root(p: int) -> int:
    phi = p - 1
    qs = [r for r, _ in trial_factorize(phi)] if phi > 1 else []
    for g in range(2, p + 1):
        if all(pow(g, phi // r, p) != 1 for r in qs):
            return g
    return 1


def _local_component(p: int, e: int):
    """Generators and discrete-log tables for ``(Z/p^e)^*``.

    Returns ``(orders, logs, conductor_fn)`` where ``logs[i][a]`` is the log of
    ``a mod p^e`` with respect to generator ``i`` (-1 if ``p | a``) and
    ``conductor_fn(js)`` maps an exponent tuple to the local conductor.
    """
    pe = p**e
    if p == 2:
        if e == 1:
            return [], [], lambda js: 1
        if e == 2:
            log = [-1] * 4
            log[1], log[3] = 0, 1
            return [2], [log], lambda js: 1 if js[0] == 0 else 4
        o5 = 2 ** (e - 2)
        log_sign = [-1] * pe
        log_five = [-1] * pe
        t = 1
        for k in range(o5):
            log_sign[t], log_five[t] = 0, k
            log_sign[pe - t], log_five[pe - t] = 1, k
            t = t * 5 % pe

        def cond2(js):
            j_sign, j5 = js
            o = o5 // math.gcd(j5, o5)
            if o == 1:
                return 1 if j_sign == 0 else 4
            return 2 ** (2 + o.bit_length() - 1)

        return [2, o5], [log_sign, log_five], cond2
    g = _primitive_root(p)
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    order = pe - pe // p
    log = [-1] * pe
    t = 1
    for k in range(order):
        log[t] = k
        t = t * g % pe

    def condp(js):
        o = order // math.gcd(js[0], order)
        if o == 1:
            return 1
        v = 0
        while o % p == 0:
            o //= p
            v += 1
        return p ** (1 + v)

    return [order], [log], condp


@lru_cache(maxsize=512)
def character_group(q: int) -> CharGroup:
    """Enumerate the characters modulo ``q`` with conductors.

    Characters are indexed in mixed radix over the exponent vectors of the
    local generators, so index 0 is the principal character.
    """
    if q < 1:
        raise DomainError(f"character modulus must be >= 1, got {q}")
    phi = euler_phi(q)
    comps = []  # (modulus p^e, orders, logs, conductor_fn)
    for p, e in trial_factorize(q) if q > 1 else []:
        orders, logs, cfn = _local_component(p, e)
        comps.append((p**e, orders, logs, cfn))

    residues = np.arange(q)
    coprime = np.gcd(residues, q) == 1
    # log vectors over residues mod q, scaled to units of 1/phi(q)
    scaled_logs = []
    orders_flat = []
    for pe, orders, logs, _ in comps:
        for order, log in zip(orders, logs):
            table = np.asarray(log, dtype=np.int64)[residues % pe]
            scaled_logs.append(np.where(coprime, table * (phi // order), 0))
            orders_flat.append(order)

    chars = []
    for index in range(phi):
        js = []
        rem = index
        for order in orders_flat:
            js.append(rem % order)
            rem //= order
        k = np.zeros(q, dtype=np.int64)
        for j, sl in zip(js, scaled_logs):
            k += j * sl
        k %= phi
        exps = tuple(int(v) if c else -1 for v, c in zip(k, coprime))
        conductor = 1
        pos = 0
        for _, orders, _, cfn in comps:
            conductor *= cfn(js[pos : pos + len(orders)])
            pos += len(orders)
        chars.append(DirichletCharacter(q, conductor, index, exps))
    return CharGroup(q, tuple(chars))


def primitive_characters(f: int) -> list[DirichletCharacter]:
    """Primitive characters of conductor exactly ``f``."""
    return character_group(f).primitive()


def primitive_characters_up_to(R: int) -> list[DirichletCharacter]:
    """Every primitive character of conductor ``<= R``, sorted by (conductor, index)."""
    if R < 1:
        raise DomainError(f"R must be >= 1, got {R}")
    out: list[DirichletCharacter] = []
    for f in range(1, R + 1):
        out.extend(primitive_characters(f))
    return out


def count_primitive(f: int) -> int:
    return len(primitive_characters(f))
