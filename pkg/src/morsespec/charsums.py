"""Quadratic character tables and the flat trigonometric polynomials they generate.

For an odd prime p the sign table is eps(0) = 1 and eps(k) = (k|p), the
Legendre symbol, for 0 < k < p.  Packing the table into

    P(x) = p^(-1/2) * sum_{k=0}^{p-1} eps(k) * exp(-2 pi i k x / p)

gives an almost flat polynomial on the p-th roots of unity: for x != 0
the classical Gauss sum evaluation pins |P(x)| inside
[1 - 1/sqrt(p), 1 + 1/sqrt(p)], while P(0) = 1/sqrt(p).  When p = 1
(mod 4) the Gauss sum is real and |P(x)| takes only the two extreme
values; when p = 3 (mod 4) it is purely imaginary and |P(x)| is the
constant sqrt(1 + 1/p).

The autocorrelation of a sign table,

    c(j) = (1/p) * sum_{x mod p} eps(x) * eps(x + j),

is an exact rational with denominator p.  It doubles as the j-th Fourier
coefficient of the density |P|^2 on the cyclic group, which provides an
independent floating-point route to the same number.

The core routines accept any sign table (entries +/-1, entry 0 fixed to
+1); the prime-keyed wrappers specialise to the Legendre table.
"""

from __future__ import annotations

import math
import os
import re
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CacheError, ConfigError, InternalConsistencyError
from .odometer import is_prime

# FFT round-off on the table sizes used here stays far below this.
_NUMERIC_TOL = 1e-9


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) in {-1, 0, 1} via Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    ls = pow(a, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


@dataclass(frozen=True)
class LegendreTable:
    """Sign table of length p: entry 0 is +1, the rest are +/-1.

    The name reflects the standard construction; any table meeting the
    structural constraints is accepted downstream.
    """

    prime: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        p = self.prime
        if len(self.values) != p:
            raise ConfigError(f"table for {p} has {len(self.values)} entries")
        if self.values[0] != 1:
            raise ConfigError("table entry at 0 must be +1")
        if any(v not in (-1, 1) for v in self.values):
            raise ConfigError("table entries must be +1 or -1")


@lru_cache(maxsize=None)
def legendre_table(p: int) -> LegendreTable:
    if not is_prime(p) or p == 2:
        raise ConfigError(f"{p} is not an odd prime")
    values = (1,) + tuple(legendre(k, p) for k in range(1, p))
    return LegendreTable(prime=p, values=values)


def gauss_sum(p: int, x: int) -> complex:
    """sum_k exp(-2 pi i k^2 x / p), evaluated by the classical formula:
    sqrt(p) * (x|p) for p = 1 (mod 4), -i * sqrt(p) * (x|p) for p = 3 (mod 4)."""
    x %= p
    if x == 0:
        return complex(p)
    chi = legendre(x, p)
    root = math.sqrt(p)
    if p % 4 == 1:
        return complex(chi * root)
    return complex(0.0, -chi * root)


def gauss_sum_brute(p: int, x: int) -> complex:
    """Same sum by direct summation; the slow cross-check route."""
    k = np.arange(p, dtype=np.int64)
    return complex(np.exp(-2j * np.pi * ((k * k * x) % p) / p).sum())


@lru_cache(maxsize=None)
def gauss_sum_all(p: int) -> np.ndarray:
    """Every quadratic Gauss sum mod p at once: entry x holds
    sum_k exp(-2 pi i k^2 x / p), via the FFT of the histogram of squares."""
    k = np.arange(p, dtype=np.int64)
    counts = np.bincount((k * k) % p, minlength=p)
    return np.fft.fft(counts.astype(np.complex128))


@lru_cache(maxsize=None)
def _sign_array(table: LegendreTable) -> np.ndarray:
    return np.array(table.values, dtype=np.int64)


@lru_cache(maxsize=None)
def table_polynomial_values(table: LegendreTable) -> np.ndarray:
    """P(x) for all x at once.  np.fft.fft applies exp(-2 pi i k x / p),
    matching the sign convention fixed above."""
    signs = _sign_array(table).astype(np.complex128)
    return np.fft.fft(signs) / math.sqrt(table.prime)


@lru_cache(maxsize=None)
def table_density(table: LegendreTable) -> np.ndarray:
    """|P(x)|^2 for all x; averages to exactly 1."""
    vals = table_polynomial_values(table)
    return (vals * vals.conj()).real


@lru_cache(maxsize=None)
def autocorrelation_numerator(table: LegendreTable, j: int) -> int:
    """p * c(j) as an exact integer: sum_x eps(x) eps(x + j)."""
    j %= table.prime
    signs = _sign_array(table)
    return int(np.dot(signs, np.roll(signs, -j)))


def table_autocorrelation(table: LegendreTable, j: int) -> Fraction:
    """c(j) as an exact rational, computed from the sign table itself."""
    j %= table.prime
    if j == 0:
        return Fraction(1)
    return Fraction(autocorrelation_numerator(table, j), table.prime)


@lru_cache(maxsize=None)
def _density_fourier_all(table: LegendreTable) -> np.ndarray:
    # ifft carries the +2 pi i kernel and the 1/p normalisation
    return np.fft.ifft(table_density(table))


def table_density_fourier(table: LegendreTable, j: int) -> float:
    """j-th Fourier coefficient (1/p) sum_x |P(x)|^2 exp(+2 pi i j x / p).

    The value is real and must agree with table_autocorrelation(table, j)
    up to round-off; the two routes share no code past the table."""
    val = complex(_density_fourier_all(table)[j % table.prime])
    if abs(val.imag) > _NUMERIC_TOL:
        raise InternalConsistencyError(
            f"density Fourier coefficient not real at p={table.prime}, j={j}: {val}"
        )
    return float(val.real)


def character_polynomial_values(p: int) -> np.ndarray:
    return table_polynomial_values(legendre_table(p))


def character_polynomial(p: int, x: int) -> complex:
    return complex(character_polynomial_values(p)[x % p])


def density_values(p: int) -> np.ndarray:
    return table_density(legendre_table(p))


def autocorrelation(p: int, j: int) -> Fraction:
    return table_autocorrelation(legendre_table(p), j)


def autocorrelation_closed_form(p: int, j: int) -> Fraction:
    """c_p(j) = (-1 + (j|p) + (-j|p)) / p for j != 0, specific to the
    Legendre table.  Independent of the summation route; used as a
    cross-check."""
    j %= p
    if j == 0:
        return Fraction(1)
    return Fraction(-1 + legendre(j, p) + legendre(p - j, p), p)


def fourier_of_density_factor(p: int, j: int) -> float:
    return table_density_fourier(legendre_table(p), j)


@dataclass(frozen=True)
class FlatnessReport:
    """Exhaustive sup/inf of |P| away from 0, plus the parity class of the
    Gauss sum: 'one' for real (p = 1 mod 4), 'imaginary-unit' for purely
    imaginary (p = 3 mod 4)."""

    prime: int
    min_modulus: float
    max_modulus: float
    delta_sign: str


def flatness_report(p: int) -> FlatnessReport:
    """Scan |P(x)| over every x != 0 and confirm the flatness window."""
    mods = np.abs(character_polynomial_values(p))[1:]
    lo, hi = float(mods.min()), float(mods.max())
    root = math.sqrt(p)
    if lo < 1 - 1 / root - _NUMERIC_TOL or hi > 1 + 1 / root + _NUMERIC_TOL:
        raise InternalConsistencyError(
            f"flatness window violated at p={p}: [{lo}, {hi}]"
        )
    return FlatnessReport(
        prime=p,
        min_modulus=lo,
        max_modulus=hi,
        delta_sign="one" if p % 4 == 1 else "imaginary-unit",
    )


# ---------------------------------------------------------------------------
# disk cache: one flat text file per prime, entries "+1" / "-1", line k
# holding the sign at k

_CACHE_LINE = re.compile(r"^[+-]1$")


def _cache_path(cache_dir: str, p: int) -> str:
    return os.path.join(cache_dir, f"legendre-{p}.txt")


def save_table(table: LegendreTable, cache_dir: str) -> str:
    """Write a sign table atomically (temp file + rename)."""
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(cache_dir, table.prime)
    text = "\n".join("+1" if v == 1 else "-1" for v in table.values) + "\n"
    fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=f".legendre-{table.prime}-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return path


def load_table(p: int, cache_dir: str) -> LegendreTable | None:
    """Read a cached sign table; None if absent, CacheError if malformed."""
    path = _cache_path(cache_dir, p)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        lines = fh.read().split()
    if len(lines) != p:
        raise CacheError(f"{path}: expected {p} entries, found {len(lines)}")
    if any(not _CACHE_LINE.match(line) for line in lines):
        raise CacheError(f"{path}: entries must be '+1' or '-1'")
    values = tuple(1 if line == "+1" else -1 for line in lines)
    if values[0] != 1:
        raise CacheError(f"{path}: entry at 0 must be +1")
    return LegendreTable(prime=p, values=values)


def legendre_table_cached(p: int, cache_dir: str | None) -> LegendreTable:
    """Cache-through table lookup: hit, else compute and persist."""
    if cache_dir is None:
        return legendre_table(p)
    cached = load_table(p, cache_dir)
    if cached is not None:
        return cached
    table = legendre_table(p)
    save_table(table, cache_dir)
    return table
