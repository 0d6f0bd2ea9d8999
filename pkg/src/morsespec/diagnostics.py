"""Finite word coding of the two-point extension and its separation numbers.

Fix a stage n and let the index set be the stage-n group, enumerated
lexicographically.  A tower piece (indexed by h) crossed with a sign
gamma determines, for every index g, which half of the extension the
points reach under g: by level-constancy the reached sign is

    w0(g + h) * w0(h) * gamma,

the same for every point of the piece.  Recording bit 0 for +1 and bit 1
for -1 yields one word per (piece, sign) class: 2|G_n| words of length
|G_n|, each class carrying measure 1/(2|G_n|).

Normalized Hamming distance between these words is exactly computable,
and the minimum over distinct pairs (delta_min) feeds a ball-counting
bound: when epsilon < delta_min/2, a ball of radius epsilon around ANY
word of the same length captures at most one class, so it captures at
most measure 1/(2|G_n|), and the scaled quantity |Lambda| * mass is at
most 1/2.  An averaging approximation scheme would need such a ball to
capture mass arbitrarily close to full; the bound 1/2 rules that out for
this index set at small epsilon.  This is a diagnostic: the rigorous
verdict comes from the spectral density certificate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cocycle import CocycleContext, cocycle_at_zero
from .errors import BudgetError, ConfigError
from .odometer import GroupElement, add, enumerate_level_group, level_group_order
from .reporting import write_atomic


@dataclass(frozen=True)
class FunnyWord:
    """A {0,1}-word indexed by an ordered list of group elements."""

    domain: tuple[GroupElement, ...]
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.domain:
            raise ConfigError("word domain must be nonempty")
        if len(self.domain) != len(self.bits):
            raise ConfigError(f"{len(self.domain)} indices but {len(self.bits)} bits")
        if any(b not in (0, 1) for b in self.bits):
            raise ConfigError("bits must be 0 or 1")
        if len({g.coords for g in self.domain}) != len(self.domain):
            raise ConfigError("domain elements must be distinct")


def complement(word: FunnyWord) -> FunnyWord:
    return FunnyWord(domain=word.domain, bits=tuple(1 - b for b in word.bits))


def hamming(w1: FunnyWord, w2: FunnyWord) -> Fraction:
    """Fraction of positions that differ; exact."""
    if w1.domain is not w2.domain and w1.domain != w2.domain:
        raise ConfigError("words are indexed by different domains")
    differ = sum(a != b for a, b in zip(w1.bits, w2.bits))
    return Fraction(differ, len(w1.bits))


@lru_cache(maxsize=None)
def _level_domain(n: int, ctx: CocycleContext) -> tuple[GroupElement, ...]:
    return tuple(enumerate_level_group(n, ctx.cfg))


@lru_cache(maxsize=None)
def _zero_values(n: int, ctx: CocycleContext) -> tuple[int, ...]:
    return tuple(cocycle_at_zero(g, ctx) for g in _level_domain(n, ctx))


def name_word(h: GroupElement, gamma: int, n: int, ctx: CocycleContext) -> FunnyWord:
    """The common word of every point in the stage-n piece indexed by h,
    on the fiber side gamma: bit 0 at g iff w0(g+h) * w0(h) * gamma = 1."""
    if gamma not in (-1, 1):
        raise ConfigError("gamma must be +1 or -1")
    if h.max_index() >= n:
        raise ConfigError(f"index element must lie in G_{n}")
    cfg = ctx.cfg
    domain = _level_domain(n, ctx)
    zh = cocycle_at_zero(h, ctx)
    bits = tuple(
        0 if cocycle_at_zero(add(g, h, cfg), ctx) * zh * gamma == 1 else 1
        for g in domain
    )
    return FunnyWord(domain=domain, bits=bits)


@dataclass(frozen=True)
class NameAtlas:
    """All 2|G_n| words at a stage, in (piece, sign) order with signs +1
    then -1 per piece; immutable once built.  class_measure is the mass
    each word class carries; the classes tile the extension."""

    level: int
    keys: tuple[tuple[GroupElement, int], ...]
    words: tuple[FunnyWord, ...]
    class_measure: Fraction

    def word(self, h: GroupElement, gamma: int) -> FunnyWord:
        return self.words[self.keys.index((h, gamma))]


def name_atlas(n: int, ctx: CocycleContext, max_names: int = 100_000) -> NameAtlas:
    """Build every word of the stage exhaustively."""
    count = 2 * level_group_order(n, ctx.cfg)
    if count > max_names:
        raise BudgetError(f"stage {n} needs {count} names, budget is {max_names}")
    keys = []
    words = []
    for h in _level_domain(n, ctx):
        for gamma in (1, -1):
            keys.append((h, gamma))
            words.append(name_word(h, gamma, n, ctx))
    return NameAtlas(
        level=n,
        keys=tuple(keys),
        words=tuple(words),
        class_measure=Fraction(1, count),
    )


@dataclass(frozen=True)
class SeparationReport:
    """Exact pairwise-distance statistics of a stage's words."""

    level: int
    name_count: int
    pair_count: int
    delta_min: Fraction
    histogram: tuple[tuple[Fraction, int], ...]  # (distance, count), ascending


def name_separation(n: int, ctx: CocycleContext, max_names: int = 100_000) -> SeparationReport:
    """Full pairwise scan over all distinct word pairs of the stage."""
    atlas = name_atlas(n, ctx, max_names=max_names)
    bits = np.array([w.bits for w in atlas.words], dtype=np.int64)
    count, length = bits.shape
    # differing positions via the inner-product identity for 0/1 vectors
    ones = bits.sum(axis=1)
    overlap = bits @ bits.T
    dist_num = ones[:, None] + ones[None, :] - 2 * overlap
    iu, ju = np.triu_indices(count, k=1)
    numerators = dist_num[iu, ju]
    counter = Counter(int(v) for v in numerators)
    histogram = tuple(
        (Fraction(num, length), cnt) for num, cnt in sorted(counter.items())
    )
    return SeparationReport(
        level=n,
        name_count=count,
        pair_count=len(numerators),
        delta_min=Fraction(int(numerators.min()), length),
        histogram=histogram,
    )


def at_ball_bound(
    n: int,
    epsilon,
    ctx: CocycleContext,
    separation: SeparationReport | None = None,
) -> Fraction:
    """Upper bound for |Lambda| times the largest mass any single
    epsilon-ball of words can capture.

    Distinct words sit at least delta_min apart, so for
    epsilon < delta_min/2 a ball holds at most one class of measure
    1/(2|G_n|); scaled by |Lambda| = |G_n| that is 1/2.  For larger
    epsilon only the trivial bound |Lambda| is returned.
    """
    eps = Fraction(epsilon)
    sep = separation if separation is not None else name_separation(n, ctx)
    if sep.level != n:
        raise ConfigError(f"separation report is for stage {sep.level}, not {n}")
    if eps < sep.delta_min / 2:
        return Fraction(1, 2)
    return Fraction(level_group_order(n, ctx.cfg))


def write_histogram_csv(report: SeparationReport, path: str) -> None:
    """Histogram rows 'numerator,denominator,count', ascending by distance."""
    lines = ["numerator,denominator,count"]
    for dist, cnt in report.histogram:
        lines.append(f"{dist.numerator},{dist.denominator},{cnt}")
    write_atomic(path, "\n".join(lines) + "\n")
