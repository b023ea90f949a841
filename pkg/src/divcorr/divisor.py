"""Generalized divisor functions and value tables of multiplicative functions.

Parameters ``z`` are either exact rationals (:class:`fractions.Fraction`) or
complex floats. A :class:`ValueTable` holds ``f(0..x)`` in one of two modes:

* ``"exact"``: a numpy object array of ``int``/``Fraction`` entries;
* ``"float"``: a ``complex128`` array.

Multiplicative functions are described declaratively (:class:`TauZ`,
:class:`ClassOmega`, ...). Each spec knows its values on prime powers and the
modulus its prime values are periodic in; :func:`sieve_multiplicative`
combines that with a :class:`~divcorr.arith.FactorTable`.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .arith import FactorTable, build_factor_table, multiplicative_levels
from .characters import DirichletCharacter
from .errors import DomainError, ModeError, ResourceError

ZParam = Union[Fraction, complex]
Scalar = Union[int, Fraction, complex]

MODES = ("float", "exact")

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")
_DEC = r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"^\s*(?P<re>[+-]?(?:{_DEC}))?\s*(?:(?P<sign>[+-])\s*(?P<im>{_DEC})?\s*[ij])?\s*$"
)
_PURE_IMAG = re.compile(rf"^\s*(?P<sign>[+-]?)\s*(?P<im>{_DEC})?\s*[ij]\s*$")


def parse_z(text: str) -> ZParam:
    """Parse ``"u/v"``, ``"-u/v"``, ``"3"`` (rational) or ``"a+bi"``, ``"0.5"`` (complex)."""
    m = _RATIONAL.match(text)
    if m:
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise DomainError(f"zero denominator in z={text!r}")
        return Fraction(int(m.group(1)), den)
    m = _PURE_IMAG.match(text)
    if m:
        im = float(m.group("im")) if m.group("im") else 1.0
        return as_zparam(complex(0.0, -im if m.group("sign") == "-" else im))
    m = _COMPLEX.match(text)
    if m and (m.group("re") or m.group("sign")):
        re_part = float(m.group("re")) if m.group("re") else 0.0
        im = 0.0
        if m.group("sign"):
            im = float(m.group("im")) if m.group("im") else 1.0
            if m.group("sign") == "-":
                im = -im
        return as_zparam(complex(re_part, im))
    raise DomainError(f"malformed z parameter {text!r}")


def as_zparam(z) -> ZParam:
    """Normalize ints/Fractions to ``Fraction`` and floats/complex to ``complex``."""
    if isinstance(z, bool):
        raise DomainError("bool is not a valid z parameter")
    if isinstance(z, (int, Fraction)):
        return Fraction(z)
    if isinstance(z, str):
        return parse_z(z)
    if isinstance(z, (float, complex, np.floating, np.complexfloating)):
        c = complex(z)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise DomainError(f"z must be finite, got {z!r}")
        return c
    raise DomainError(f"unsupported z parameter {z!r}")


def is_rational(z) -> bool:
    return isinstance(z, (int, Fraction)) and not isinstance(z, bool)


def _norm(v: Scalar) -> Scalar:
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v.numerator)
    return v


def to_mode(v: Scalar, mode: str) -> Scalar:
    if mode == "float":
        return complex(v)
    if isinstance(v, complex):
        raise ModeError(f"value {v!r} is not rational; exact mode impossible")
    return _norm(Fraction(v))


def binomial_z(z: ZParam, ell: int) -> Scalar:
    """Generalized binomial ``z (z-1) ... (z-ell+1) / ell!``."""
    if ell < 0:
        raise DomainError(f"binomial needs ell >= 0, got {ell}")
    z = as_zparam(z)
    out: Scalar = Fraction(1) if is_rational(z) else 1 + 0j
    for i in range(ell):
        out = out * (z - i) / (i + 1)
    return out


def tau_z_prime_power(z: ZParam, ell: int) -> Scalar:
    """``tau_z(p^ell) = binom(z + ell - 1, ell)``; independent of ``p``."""
    z = as_zparam(z)
    return binomial_z(z + ell - 1, ell)


def z_fold_convolution_prime_power(f: "FunctionSpec", z: ZParam, p: int, nu: int) -> Scalar:
    """Value of the z-fold convolution ``f^(*z)`` at ``p^nu``.

    Sums ``binom(z, r)`` times the composition sums
    ``sum_{l_1+...+l_r = nu, l_i >= 1} f(p^l_1) ... f(p^l_r)``; the composition
    sums are built by dynamic programming over ``(r, nu)``.
    """
    if nu < 1:
        raise DomainError(f"z-fold convolution needs nu >= 1, got {nu}")
    z = as_zparam(z)
    fp = [None] + [f.prime_power(p, k) for k in range(1, nu + 1)]
    zero: Scalar = 0 if is_rational(z) else 0j
    # comp[k] = composition sum of k into the current number of parts
    comp = [zero] + fp[1:]
    total = binomial_z(z, 1) * comp[nu]
    for r in range(2, nu + 1):
        nxt = [zero] * (nu + 1)
        for k in range(r, nu + 1):
            nxt[k] = sum((fp[lam] * comp[k - lam] for lam in range(1, k - r + 2)), zero)
        comp = nxt
        total += binomial_z(z, r) * comp[nu]
    return total


def _char_at(chi: DirichletCharacter, n: int, rational: bool) -> Scalar:
    if rational and chi.is_real:
        return chi.exact(n)
    return chi(n)


# --------------------------------------------------------------------------
# function specs


class FunctionSpec:
    """Base class for declarative multiplicative functions."""

    period: int = 1

    def prime_power(self, p: int, nu: int) -> Scalar:
        raise NotImplementedError

    def rational(self) -> bool:
        """True when every value is a rational number."""
        return True

    def key(self) -> str:
        return repr(self)

    def digest(self) -> bytes:
        return hashlib.sha256(self.key().encode()).digest()


def _chi_key(chi: DirichletCharacter) -> str:
    return f"chi[{chi.modulus}:{chi.index}:{hash(chi.exps) & 0xFFFFFFFF:x}]"


@dataclass(frozen=True)
class TauZ(FunctionSpec):
    """Coefficients of ``zeta(s)^z``."""

    z: ZParam

    def __post_init__(self):
        object.__setattr__(self, "z", as_zparam(self.z))

    def prime_power(self, p, nu):
        return tau_z_prime_power(self.z, nu)

    def rational(self):
        return is_rational(self.z)


@dataclass(frozen=True)
class TauZTwisted(FunctionSpec):
    """``chi(n) tau_z(n)``, the coefficients of ``L(s, chi)^z``."""

    z: ZParam
    chi: DirichletCharacter

    def __post_init__(self):
        object.__setattr__(self, "z", as_zparam(self.z))

    @property
    def period(self):
        return self.chi.modulus

    def prime_power(self, p, nu):
        c = _char_at(self.chi, p, self.rational())
        return c**nu * tau_z_prime_power(self.z, nu)

    def rational(self):
        return is_rational(self.z) and self.chi.is_real

    def key(self):
        return f"TauZTwisted({self.z!r},{_chi_key(self.chi)})"


@dataclass(frozen=True)
class ClassOmega(FunctionSpec):
    """Coefficients of ``prod_{p = r mod D} (1 + z_r / (p^s - 1))``.

    ``zvec`` maps every reduced residue ``r mod D`` to ``z_r``; primes
    dividing ``D`` contribute nothing (value 0 on their powers).
    """

    D: int
    zvec: tuple

    def __post_init__(self):
        zv = self.zvec
        if isinstance(zv, dict):
            zv = tuple(sorted(zv.items()))
        elif zv and not isinstance(zv[0], tuple):
            reduced = [r for r in range(self.D) if math.gcd(r, self.D) == 1]
            if len(zv) != len(reduced):
                raise DomainError(f"ClassOmega needs {len(reduced)} class values, got {len(zv)}")
            zv = tuple(zip(reduced, zv))
        zv = tuple((r % self.D, as_zparam(z)) for r, z in zv)
        reduced = {r for r in range(self.D) if math.gcd(r, self.D) == 1}
        if {r for r, _ in zv} != reduced or len(zv) != len(reduced):
            raise DomainError("ClassOmega zvec must have one entry per reduced class")
        object.__setattr__(self, "zvec", zv)

    @property
    def period(self):
        return self.D

    def prime_power(self, p, nu):
        if self.D > 1 and self.D % p == 0:
            return Fraction(0) if self.rational() else 0j
        return dict(self.zvec)[p % self.D]

    def rational(self):
        return all(is_rational(z) for _, z in self.zvec)


@dataclass(frozen=True)
class ZPowOmega(FunctionSpec):
    """``n -> z^omega(n)``."""

    z: ZParam

    def __post_init__(self):
        object.__setattr__(self, "z", as_zparam(self.z))

    def prime_power(self, p, nu):
        return self.z

    def rational(self):
        return is_rational(self.z)


@dataclass(frozen=True)
class TwoSquaresIndicator(FunctionSpec):
    """Indicator of integers that are sums of two squares."""

    period = 4

    def prime_power(self, p, nu):
        if p % 4 == 3:
            return Fraction(1 - nu % 2)
        return Fraction(1)


@dataclass(frozen=True)
class Convolve(FunctionSpec):
    """Dirichlet convolution of the listed specs."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise DomainError("Convolve needs at least one part")
        object.__setattr__(self, "parts", parts)

    @property
    def period(self):
        return math.lcm(*(s.period for s in self.parts))

    def prime_power(self, p, nu):
        acc = [self.parts[0].prime_power(p, k) if k else 1 for k in range(nu + 1)]
        for s in self.parts[1:]:
            vals = [s.prime_power(p, k) if k else 1 for k in range(nu + 1)]
            acc = [sum(acc[i] * vals[k - i] for i in range(k + 1)) for k in range(nu + 1)]
        return acc[nu]

    def rational(self):
        return all(s.rational() for s in self.parts)

    def key(self):
        return "Convolve(" + ",".join(s.key() for s in self.parts) + ")"


@dataclass(frozen=True)
class PointwiseCharTwist(FunctionSpec):
    """``n -> chi(n) f(n)``."""

    inner: FunctionSpec
    chi: DirichletCharacter

    @property
    def period(self):
        return math.lcm(self.inner.period, self.chi.modulus)

    def prime_power(self, p, nu):
        c = _char_at(self.chi, p, self.rational())
        return c**nu * self.inner.prime_power(p, nu)

    def rational(self):
        return self.inner.rational() and self.chi.is_real

    def key(self):
        return f"PointwiseCharTwist({self.inner.key()},{_chi_key(self.chi)})"


@dataclass(frozen=True)
class ZFold(FunctionSpec):
    """The z-fold convolution ``f^(*z)``: Dirichlet series ``F(s)^z``."""

    inner: FunctionSpec
    z: ZParam

    def __post_init__(self):
        object.__setattr__(self, "z", as_zparam(self.z))

    @property
    def period(self):
        return self.inner.period

    def prime_power(self, p, nu):
        return z_fold_convolution_prime_power(self.inner, self.z, p, nu)

    def rational(self):
        return self.inner.rational() and is_rational(self.z)

    def key(self):
        return f"ZFold({self.inner.key()},{self.z!r})"


# --------------------------------------------------------------------------
# value tables


@dataclass(eq=False)
class ValueTable:
    """Values ``f(0..limit)`` of an arithmetic function.

    ``values[0]`` is always 0. ``spec`` is ``None`` for derived tables
    (truncations, sums), which carry a descriptive ``label`` instead.
    """

    limit: int
    values: np.ndarray = field(repr=False)
    mode: str
    spec: FunctionSpec | None = None
    label: str = ""

    def __post_init__(self):
        if not self.label:
            self.label = self.spec.key() if self.spec is not None else "table"

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return self.limit + 1

    def digest(self) -> bytes:
        return hashlib.sha256(self.label.encode()).digest()

    def restrict(self, mask: np.ndarray, label: str) -> "ValueTable":
        """Copy keeping ``values[n]`` where ``mask[n]`` and zeroing the rest."""
        vals = self.values.copy()
        vals[~mask] = 0
        return ValueTable(self.limit, vals, self.mode, None, label)

    def truncate(self, y: int) -> "ValueTable":
        mask = np.arange(self.limit + 1) <= y
        return self.restrict(mask, f"{self.label}|n<={y}")

    def max_abs_difference(self, other: "ValueTable") -> tuple[Scalar, int | None]:
        """Largest ``|self[n] - other[n]|`` over ``1 <= n <= limit`` and a witness."""
        _check_compatible(self, other)
        diff = self.values[1:] - other.values[1:]
        if self.mode == "exact":
            nz = [i for i, d in enumerate(diff) if d != 0]
            if not nz:
                return Fraction(0), None
            i = max(nz, key=lambda j: abs(diff[j]))
            return abs(Fraction(diff[i])), i + 1
        mag = np.abs(diff)
        i = int(np.argmax(mag))
        if mag[i] == 0:
            return 0.0, None
        return float(mag[i]), i + 1


def empty_values(x: int, mode: str) -> np.ndarray:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    try:
        if mode == "float":
            return np.zeros(x + 1, dtype=np.complex128)
        out = np.empty(x + 1, dtype=object)
        out[:] = 0
        return out
    except MemoryError as exc:
        raise ResourceError(f"cannot allocate value table for x={x}", x) from exc


def _class_keys(spf: np.ndarray, period: int) -> np.ndarray:
    # primes dividing the period get their own key (P + p); others share p mod P
    spf = spf.astype(np.int64)
    key = spf % period
    if period > 1:
        divides = (spf > 0) & (period % np.maximum(spf, 1) == 0)
        key = np.where(divides, period + spf, key)
    return key


def sieve_multiplicative(spec: FunctionSpec, x: int, table: FactorTable | None = None,
                         mode: str = "float") -> ValueTable:
    """Tabulate a multiplicative function on ``1..x``.

    Prime-power values are computed once per (class of ``p`` mod the function's
    period, exponent) and then spread with the sieve's ``n = p^nu * m`` split.
    :class:`Convolve` specs are tabulated part by part and convolved.

    Raises:
        ModeError: exact mode requested for a spec with non-rational values.
        DomainError: ``x`` exceeds the factor table.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "exact" and not spec.rational():
        raise ModeError(f"{spec.key()} has non-rational values; use float mode")
    if table is None:
        table = build_factor_table(max(x, 2))
    if x > table.limit:
        raise DomainError(f"x={x} exceeds factor table limit {table.limit}")
    if isinstance(spec, Convolve):
        parts = [sieve_multiplicative(s, x, table, mode) for s in spec.parts]
        out = parts[0]
        for t in parts[1:]:
            out = dirichlet_convolve(out, t)
        return ValueTable(x, out.values, mode, spec)

    pp, nu, rest = (a[: x + 1] for a in table.prime_power_split)
    spf = table.spf[: x + 1]
    code = _class_keys(spf, spec.period) * 64 + nu
    code[:2] = -1
    uniq, first, inverse = np.unique(code, return_index=True, return_inverse=True)
    vals = []
    for c, i in zip(uniq, first):
        if c < 0:
            vals.append(0)
            continue
        vals.append(to_mode(spec.prime_power(int(spf[i]), int(nu[i])), mode))
    if mode == "float":
        fpp = np.asarray(vals, dtype=np.complex128)[inverse]
    else:
        lut = np.empty(len(vals), dtype=object)
        lut[:] = vals
        fpp = lut[inverse]
    out = empty_values(x, mode)
    out[1] = 1
    multiplicative_levels(rest, fpp, out)
    return ValueTable(x, out, mode, spec)


def _check_compatible(A: ValueTable, B: ValueTable) -> None:
    if A.limit != B.limit or A.mode != B.mode:
        raise DomainError(
            f"incompatible tables: limits {A.limit}/{B.limit}, modes {A.mode}/{B.mode}"
        )


def _harmonic_support(vals: np.ndarray) -> float:
    nz = np.nonzero(vals[1:] != 0)[0] + 1
    return float(np.sum(1.0 / nz)) if nz.size else 0.0


def dirichlet_convolve(A: ValueTable, B: ValueTable, label: str | None = None) -> ValueTable:
    """``(A * B)[n] = sum_{de = n} A[d] B[e]`` for ``n <= limit``.

    The outer loop runs over the support of the table with the smaller
    harmonic weight, so convolving with a short truncated table is cheap.
    """
    _check_compatible(A, B)
    x = A.limit
    a, b = A.values, B.values
    if _harmonic_support(a) > _harmonic_support(b):
        a, b = b, a
    out = empty_values(x, A.mode)
    for d in np.nonzero(a[1:] != 0)[0] + 1:
        d = int(d)
        m = x // d
        out[d : d * m + 1 : d] += a[d] * b[1 : m + 1]
    return ValueTable(x, out, A.mode, None, label or f"({A.label})*({B.label})")


def convolution_power(A: ValueTable, k: int) -> ValueTable:
    """``A^{*k}``; ``k = 0`` gives the identity ``delta``."""
    if k < 0:
        raise DomainError("convolution power must be >= 0")
    if k == 0:
        return delta_table(A.limit, A.mode)
    out = A
    for _ in range(k - 1):
        out = dirichlet_convolve(out, A)
    return out


def delta_table(x: int, mode: str) -> ValueTable:
    vals = empty_values(x, mode)
    vals[1] = 1
    return ValueTable(x, vals, mode, None, "delta")


def linear_combination(tables: list[ValueTable], coeffs: list[Scalar], label: str = "") -> ValueTable:
    """``sum_i coeffs[i] * tables[i]`` pointwise."""
    base = tables[0]
    out = empty_values(base.limit, base.mode)
    for t, c in zip(tables, coeffs):
        _check_compatible(base, t)
        out = out + to_mode(c, base.mode) * t.values
    out[0] = 0
    return ValueTable(base.limit, out, base.mode, None, label or "linear_combination")

