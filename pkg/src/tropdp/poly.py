"""Tropical monomials and polynomials.

A monomial is a multiset of variables; we store it as the sorted tuple of its
variables with repetition, so ``x**2 * y`` is ``("x", "x", "y")``.  Plain
tuples in that canonical form hash and compare equal to :class:`Monomial`
instances, which lets hot loops (circuit extraction) skip the wrapper.

A polynomial is a *set* of monomials: ``x + x`` and ``x`` are the same object
here, which is exactly the monomial-set semantics behind the ``≃`` relation.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from itertools import product as _cartesian
from typing import Iterable, Mapping

from .errors import WorkbenchError

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class Flavor(enum.Enum):
    MAX_PLUS = "max"
    MIN_PLUS = "min"

    @property
    def pick(self):
        return max if self is Flavor.MAX_PLUS else min

    @classmethod
    def parse(cls, s: "str | Flavor") -> "Flavor":
        if isinstance(s, Flavor):
            return s
        s = s.lower()
        if s in ("max", "max_plus", "maxplus"):
            return cls.MAX_PLUS
        if s in ("min", "min_plus", "minplus"):
            return cls.MIN_PLUS
        raise WorkbenchError("INVALID_FLAVOR", repr(s))


def check_int64(value: int) -> int:
    if value < INT64_MIN or value > INT64_MAX:
        raise WorkbenchError("OVERFLOW", f"value {value} outside signed 64-bit range")
    return value


class Monomial(tuple):
    """Canonical sorted tuple of variable ids (with repetition)."""

    __slots__ = ()

    def __new__(cls, variables: Iterable[str] = ()):
        return super().__new__(cls, sorted(variables))

    @classmethod
    def from_exponents(cls, exps: Mapping[str, int]) -> "Monomial":
        out = []
        for var, e in exps.items():
            if not isinstance(e, int) or e < 1:
                raise WorkbenchError("BAD_EXPONENT", f"{var}^{e}")
            out.extend([var] * e)
        return cls(out)

    @property
    def exponents(self) -> dict[str, int]:
        return dict(Counter(self))

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self)

    @property
    def degree(self) -> int:
        return len(self)

    def is_multilinear(self) -> bool:
        return all(self[i] != self[i + 1] for i in range(len(self) - 1))

    def __mul__(self, other):  # type: ignore[override]
        return Monomial(tuple.__add__(self, other))

    def __str__(self) -> str:
        if not self:
            return "1"
        return "·".join(v if e == 1 else f"{v}^{e}" for v, e in sorted(self.exponents.items()))

    def __repr__(self) -> str:
        return f"Monomial({str(self)})"


ONE = Monomial()


def eval_monomial(m: Iterable[str], v: Mapping[str, int]) -> int:
    total = 0
    for var in m:
        try:
            total += v[var]
        except KeyError:
            raise WorkbenchError("MISSING_VARIABLE", var) from None
    return check_int64(total)


class Polynomial:
    """Finite set of monomials; duplicates collapse on construction."""

    __slots__ = ("monomials", "_hash")

    def __init__(self, monomials: Iterable[Iterable[str]] = ()):
        self.monomials: frozenset[Monomial] = frozenset(
            m if isinstance(m, Monomial) else Monomial(m) for m in monomials
        )
        self._hash = None

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls([(name,)])

    @classmethod
    def one(cls) -> "Polynomial":
        return cls([ONE])

    def __len__(self) -> int:
        return len(self.monomials)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, m) -> bool:
        if not isinstance(m, Monomial):
            m = Monomial(m)
        return m in self.monomials

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.monomials == other.monomials

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.monomials)
        return self._hash

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(self.monomials | other.monomials)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(a * b for a, b in _cartesian(self.monomials, other.monomials))

    def sorted(self) -> list[Monomial]:
        return sorted(self.monomials, key=lambda m: (len(m), tuple(m)))

    @property
    def support(self) -> frozenset[str]:
        out: set[str] = set()
        for m in self.monomials:
            out.update(m)
        return frozenset(out)

    def is_multilinear(self) -> bool:
        return all(m.is_multilinear() for m in self.monomials)

    def is_homogeneous(self) -> bool:
        return len({len(m) for m in self.monomials}) <= 1

    def __str__(self) -> str:
        if not self.monomials:
            return "0̸"
        return " + ".join(str(m) for m in self.sorted())

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        mons = sorted(
            ([[var, e] for var, e in sorted(m.exponents.items())] for m in self.monomials),
        )
        return {"variables": sorted(self.support), "monomials": mons}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping) -> "Polynomial":
        mons = [Monomial.from_exponents({var: e for var, e in m}) for m in d["monomials"]]
        declared = set(d.get("variables", ()))
        p = cls(mons)
        if declared and not p.support <= declared:
            raise WorkbenchError("SUPPORT_NOT_IN_UNIVERSE", "monomial uses undeclared variable")
        return p

    @classmethod
    def from_json(cls, s: str) -> "Polynomial":
        return cls.from_dict(json.loads(s))


def eval_poly(p: Polynomial, v: Mapping[str, int], flavor: Flavor | str = Flavor.MAX_PLUS) -> int:
    flavor = Flavor.parse(flavor)
    if not p.monomials:
        raise WorkbenchError("EMPTY_POLYNOMIAL")
    return flavor.pick(eval_monomial(m, v) for m in p.monomials)


def characteristic_valuation(m: Iterable[str], universe: Iterable[str]) -> dict[str, int]:
    universe = set(universe)
    sup = set(m)
    if not sup <= universe:
        raise WorkbenchError("SUPPORT_NOT_IN_UNIVERSE", ", ".join(sorted(sup - universe)))
    return {x: (1 if x in sup else -1) for x in sorted(universe)}


def poly_subset(p: Polynomial, q: Polynomial) -> bool:
    return p.monomials <= q.monomials


def poly_equiv(p: Polynomial, q: Polynomial) -> bool:
    return p.monomials == q.monomials


def separating_witness(p: Polynomial, q: Polynomial):
    """A monomial of ``p`` missing from ``q`` (least in canonical order), or None.

    For multilinear ``p`` the characteristic valuation of the witness tells the
    two polynomials apart under MAX_PLUS evaluation.
    """
    missing = p.monomials - q.monomials
    if not missing:
        return None
    return min(missing, key=lambda m: (len(m), tuple(m)))
