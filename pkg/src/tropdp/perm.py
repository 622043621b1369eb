"""Permutations of [n], cycle types, conjugation and the permutation classes
used to index matching compatibility matrices.

Internally a permutation is a tuple of 0-based images; everything user-facing
(JSON, cycle notation, ``images()``) is 1-based.  Composition applies the
right factor first: ``compose(a, b)(x) == a(b(x))``.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .errors import WorkbenchError


class Permutation(tuple):
    __slots__ = ()

    def __new__(cls, images0: Iterable[int]):
        t = super().__new__(cls, images0)
        if sorted(t) != list(range(len(t))):
            raise WorkbenchError("NOT_A_PERMUTATION", repr(tuple(t)))
        return t

    @classmethod
    def _trusted(cls, images0) -> "Permutation":
        return tuple.__new__(cls, images0)

    @classmethod
    def from_images(cls, images1: Sequence[int]) -> "Permutation":
        """Build from 1-based images (entry i is the image of i+1)."""
        return cls(x - 1 for x in images1)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._trusted(range(n))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        """Build from 1-based cycle notation, e.g. ``[[1, 3], [2, 4]]``."""
        img = list(range(n))
        seen = set()
        for cyc in cycles:
            for idx, x in enumerate(cyc):
                if not 1 <= x <= n or x in seen:
                    raise WorkbenchError("NOT_A_PERMUTATION", f"bad cycle entry {x}")
                seen.add(x)
                img[x - 1] = cyc[(idx + 1) % len(cyc)] - 1
        return cls(img)

    @classmethod
    def parse(cls, text: str, n: int) -> "Permutation":
        """Parse ``"(1 3)(2 4)"`` or ``"()"`` style cycle notation."""
        cycles = []
        for chunk in text.replace(")", ")\n").split("\n"):
            chunk = chunk.strip().strip("()").replace(",", " ")
            if chunk:
                cycles.append([int(x) for x in chunk.split()])
        return cls.from_cycles(cycles, n)

    @property
    def n(self) -> int:
        return len(self)

    def images(self) -> list[int]:
        return [x + 1 for x in self]

    def __call__(self, x: int) -> int:
        """Image of the 1-based point ``x``."""
        return self[x - 1] + 1

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for i, x in enumerate(self):
            inv[x] = i
        return Permutation._trusted(inv)

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        """1-based cycles, each starting at its least element, ordered by that element."""
        seen = [False] * len(self)
        out = []
        for s in range(len(self)):
            if seen[s]:
                continue
            cyc = []
            x = s
            while not seen[x]:
                seen[x] = True
                cyc.append(x + 1)
                x = self[x]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return cycle_type(self)

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self) -> str:
        return f"Permutation({self})"


def _check_same(a: Sequence[int], b: Sequence[int]):
    if len(a) != len(b):
        raise WorkbenchError("DOMAIN_MISMATCH", f"{len(a)} vs {len(b)}")


def compose(a: Sequence[int], b: Sequence[int]) -> Permutation:
    """(a∘b)(x) = a(b(x))."""
    _check_same(a, b)
    return Permutation._trusted(tuple(a[x] for x in b))


def compose_many(*perms: Sequence[int]) -> Permutation:
    """Left-to-right written product; the rightmost factor is applied first."""
    if not perms:
        raise WorkbenchError("EMPTY_PRODUCT")
    acc = perms[-1]
    for p in reversed(perms[:-1]):
        acc = compose(p, acc)
    return Permutation._trusted(acc)


def inverse(a: Sequence[int]) -> Permutation:
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return Permutation._trusted(inv)


def conjugate(rho: Sequence[int], pi: Sequence[int]) -> Permutation:
    """π⁻¹ ρ π."""
    _check_same(rho, pi)
    inv = inverse(pi)
    return Permutation._trusted(tuple(inv[rho[x]] for x in pi))


def cycle_type(rho: Sequence[int]) -> tuple[int, ...]:
    """Cycle lengths (fixed points included) in non-increasing order."""
    n = len(rho)
    seen = [False] * n
    sizes = []
    for s in range(n):
        if seen[s]:
            continue
        length = 0
        x = s
        while not seen[x]:
            seen[x] = True
            x = rho[x]
            length += 1
        sizes.append(length)
    return tuple(sorted(sizes, reverse=True))


def is_single_cycle(rho: Sequence[int]) -> bool:
    n = len(rho)
    if n == 0:
        return False
    x, steps = rho[0], 1
    while x != 0:
        x = rho[x]
        steps += 1
    return steps == n


class ClassVariant(enum.Enum):
    SINGLE_CYCLE = "single-cycle"
    ALL_TWO_CYCLES = "all-two-cycles"
    TWO_K_CYCLES = "two-k-cycles"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class ClassSpec:
    variant: ClassVariant
    cycle_type: tuple[int, ...] = ()

    @classmethod
    def explicit(cls, sizes: Iterable[int]) -> "ClassSpec":
        return cls(ClassVariant.EXPLICIT, tuple(sorted(sizes, reverse=True)))

    def target_type(self, n: int) -> tuple[int, ...]:
        v = self.variant
        if v is ClassVariant.SINGLE_CYCLE:
            if n < 1:
                raise WorkbenchError("INVALID_SPEC", "empty domain")
            return (n,)
        if v in (ClassVariant.ALL_TWO_CYCLES, ClassVariant.TWO_K_CYCLES):
            if n < 2 or n % 2:
                raise WorkbenchError("INVALID_SPEC", f"{v.value} needs an even domain, got {n}")
            k = n // 2
            return (2,) * k if v is ClassVariant.ALL_TWO_CYCLES else (k, k)
        if sum(self.cycle_type) != n or any(s < 1 for s in self.cycle_type):
            raise WorkbenchError("INVALID_SPEC", f"cycle type {self.cycle_type} does not partition {n}")
        return self.cycle_type


SINGLE_CYCLE = ClassSpec(ClassVariant.SINGLE_CYCLE)
ALL_TWO_CYCLES = ClassSpec(ClassVariant.ALL_TWO_CYCLES)
TWO_K_CYCLES = ClassSpec(ClassVariant.TWO_K_CYCLES)


def class_size(n: int, spec: ClassSpec) -> int:
    """n! / ∏ m_i! i^{m_i} for the target cycle type."""
    ctype = spec.target_type(n)
    denom = 1
    for size, mult in Counter(ctype).items():
        denom *= math.factorial(mult) * size**mult
    return math.factorial(n) // denom


def _cycles_to_images(n: int, cycles: Iterable[Sequence[int]]) -> tuple[int, ...]:
    img = list(range(n))
    for cyc in cycles:
        for i, x in enumerate(cyc):
            img[x] = cyc[(i + 1) % len(cyc)]
    return tuple(img)


def _gen_cycle_structures(points: tuple[int, ...], sizes: tuple[int, ...]):
    """Yield lists of cycles over ``points`` with the given sizes (non-increasing).

    Each structure is produced once: the least remaining point always opens the
    next cycle, and equal-size cycles are taken in order of their least point.
    """
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    tried = set()
    for idx, size in enumerate(sizes):
        if size in tried:
            continue
        tried.add(size)
        remaining_sizes = sizes[:idx] + sizes[idx + 1 :]
        for others in combinations(rest, size - 1):
            left = tuple(p for p in rest if p not in others)
            for order in permutations(others):
                cyc = (first,) + order
                for tail in _gen_cycle_structures(left, remaining_sizes):
                    yield [cyc] + tail


def _pairings(points: tuple[int, ...]):
    if not points:
        yield []
        return
    a = points[0]
    for i in range(1, len(points)):
        b = points[i]
        rest = points[1:i] + points[i + 1 :]
        for tail in _pairings(rest):
            yield [(a, b)] + tail


def enumerate_class(n: int, spec: ClassSpec) -> list[Permutation]:
    """All permutations of the class, sorted lexicographically by image sequence."""
    ctype = spec.target_type(n)
    pts = tuple(range(n))
    if spec.variant is ClassVariant.ALL_TWO_CYCLES:
        gen = (_cycles_to_images(n, p) for p in _pairings(pts))
    elif spec.variant is ClassVariant.SINGLE_CYCLE:
        gen = (_cycles_to_images(n, [(0,) + o]) for o in permutations(pts[1:]))
    else:
        gen = (_cycles_to_images(n, s) for s in _gen_cycle_structures(pts, ctype))
    return [Permutation._trusted(t) for t in sorted(gen)]


def all_permutations(n: int) -> list[Permutation]:
    return [Permutation._trusted(p) for p in permutations(range(n))]


def in_class(rho: Sequence[int], spec: ClassSpec) -> bool:
    return cycle_type(rho) == spec.target_type(len(rho))


def count_conjugators(rho1: Sequence[int], rho2: Sequence[int]) -> int:
    """|{π : π⁻¹ρ1π = ρ2}| by enumeration over S_n."""
    _check_same(rho1, rho2)
    if cycle_type(rho1) != cycle_type(rho2):
        return 0
    target = tuple(rho2)
    return sum(1 for pi in permutations(range(len(rho1))) if tuple(conjugate(rho1, pi)) == target)


def conjugation_orbit_counts(rho: Sequence[int]) -> Counter:
    """Multiset {π⁻¹ρπ : π ∈ S_n}: keys give the orbit, values the conjugator counts."""
    return Counter(tuple(conjugate(rho, pi)) for pi in permutations(range(len(rho))))


def count_completions(rho1: Sequence[int]) -> int:
    """|{ρ2 ∈ S²₂ₖ : ρ2ρ1 ∈ Sᵏ₂ₖ}| by enumeration."""
    n = len(rho1)
    if not in_class(rho1, ALL_TWO_CYCLES):
        raise WorkbenchError("NOT_IN_CLASS", f"{Permutation._trusted(rho1)} is not a fixed-point-free involution")
    target = TWO_K_CYCLES.target_type(n)
    return sum(1 for r2 in enumerate_class(n, ALL_TWO_CYCLES) if cycle_type(compose(r2, rho1)) == target)


def double_factorial(m: int) -> int:
    """m!! with (−1)!! = 0!! = 1."""
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def centralizer_order(ctype: Sequence[int]) -> int:
    out = 1
    for size, mult in Counter(ctype).items():
        out *= math.factorial(mult) * size**mult
    return out
