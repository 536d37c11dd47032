"""Exact arithmetic in Z[A, A^-1] and Z[zeta], zeta a primitive sixth root of unity.

Laurent polynomials are the coefficient ring of every chain group; the
cyclotomic ring is the codomain of the evaluation homomorphism that sends
A to zeta and every framed link to 1.  Both rings use arbitrary-precision
integers throughout: state sums over many crossings overflow fixed-width
arithmetic very quickly, and exactness is the whole point.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Union

__all__ = [
    "LaurentPoly",
    "Cyclo6",
    "epsilon_scalar",
    "A",
    "A_INV",
    "ONE",
    "ZERO",
    "LOOP_FACTOR",
    "ZETA",
]

PolyLike = Union["LaurentPoly", int]


class LaurentPoly:
    """Sparse Laurent polynomial in A with integer coefficients.

    Stored as exponent -> coefficient with no zero coefficients, so two
    polynomials are equal iff their term maps are equal.  Instances are
    immutable; every operation returns a fresh object.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] | None = None):
        coeffs: dict[int, int] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for exp, c in items:
                if not isinstance(exp, int) or not isinstance(c, int):
                    raise TypeError("exponents and coefficients must be integers")
                acc = coeffs.get(exp, 0) + c
                if acc:
                    coeffs[exp] = acc
                elif exp in coeffs:
                    del coeffs[exp]
        self._terms = coeffs

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> LaurentPoly:
        return cls({exp: coeff})

    @classmethod
    def from_int(cls, n: int) -> LaurentPoly:
        return cls({0: n})

    @classmethod
    def from_pairs(cls, pairs: Iterable[Iterable[int]]) -> LaurentPoly:
        """Parse the wire form: a list of [exponent, coefficient] pairs."""
        return cls((int(e), int(c)) for e, c in pairs)

    def to_pairs(self) -> list[list[int]]:
        """Serialize as [exponent, coefficient] pairs, ascending exponent."""
        return [[e, self._terms[e]] for e in sorted(self._terms)]

    @staticmethod
    def _promote(x: PolyLike) -> LaurentPoly:
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, int):
            return LaurentPoly({0: x})
        return NotImplemented  # type: ignore[return-value]

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: PolyLike) -> LaurentPoly:
        other = self._promote(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for e, c in other._terms.items():
            acc = terms.get(e, 0) + c
            if acc:
                terms[e] = acc
            elif e in terms:
                del terms[e]
        out = LaurentPoly()
        out._terms = terms
        return out

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        out = LaurentPoly()
        out._terms = {e: -c for e, c in self._terms.items()}
        return out

    def __sub__(self, other: PolyLike) -> LaurentPoly:
        other = self._promote(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: PolyLike) -> LaurentPoly:
        return (-self) + other

    def __mul__(self, other: PolyLike) -> LaurentPoly:
        other = self._promote(other)
        if other is NotImplemented:
            return NotImplemented
        terms: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                acc = terms.get(e, 0) + c1 * c2
                if acc:
                    terms[e] = acc
                elif e in terms:
                    del terms[e]
        out = LaurentPoly()
        out._terms = terms
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            raise ValueError("negative powers of a general Laurent polynomial")
        result = LaurentPoly({0: 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by A^k (shift all exponents)."""
        out = LaurentPoly()
        out._terms = {e + k: c for e, c in self._terms.items()}
        return out

    def coefficient(self, exp: int) -> int:
        return self._terms.get(exp, 0)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_pairs()!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for e in sorted(self._terms, reverse=True):
            c = self._terms[e]
            if e == 0:
                mon = ""
            elif e == 1:
                mon = "A"
            else:
                mon = f"A^{e}"
            if not mon:
                term = str(c)
            elif c == 1:
                term = mon
            elif c == -1:
                term = "-" + mon
            else:
                term = f"{c}{mon}"
            pieces.append(term)
        out = pieces[0]
        for term in pieces[1:]:
            out += " - " + term[1:] if term.startswith("-") else " + " + term
        return out


class Cyclo6:
    """Element a + b*zeta of Z[zeta], reduced by the relation zeta^2 = zeta - 1.

    The basis {1, zeta} gives a unique representation and O(1) reduction;
    in particular zeta^-1 = 1 - zeta and zeta^3 = -1.
    """

    __slots__ = ("_a", "_b")

    def __init__(self, a: int, b: int = 0):
        if not isinstance(a, int) or not isinstance(b, int):
            raise TypeError("Cyclo6 components must be integers")
        self._a = a
        self._b = b

    @property
    def a(self) -> int:
        return self._a

    @property
    def b(self) -> int:
        return self._b

    @classmethod
    def zeta_pow(cls, k: int) -> Cyclo6:
        """zeta^k for any integer k (period 6)."""
        table = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
        a, b = table[k % 6]
        return cls(a, b)

    @classmethod
    def from_pair(cls, pair: Iterable[int]) -> Cyclo6:
        a, b = pair
        return cls(int(a), int(b))

    def to_pair(self) -> list[int]:
        return [self._a, self._b]

    def __bool__(self) -> bool:
        return bool(self._a or self._b)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Cyclo6(other)
        if not isinstance(other, Cyclo6):
            return NotImplemented
        return self._a == other._a and self._b == other._b

    def __hash__(self) -> int:
        return hash((self._a, self._b))

    def __add__(self, other: Cyclo6 | int) -> Cyclo6:
        if isinstance(other, int):
            other = Cyclo6(other)
        if not isinstance(other, Cyclo6):
            return NotImplemented
        return Cyclo6(self._a + other._a, self._b + other._b)

    __radd__ = __add__

    def __neg__(self) -> Cyclo6:
        return Cyclo6(-self._a, -self._b)

    def __sub__(self, other: Cyclo6 | int) -> Cyclo6:
        if isinstance(other, int):
            other = Cyclo6(other)
        if not isinstance(other, Cyclo6):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Cyclo6 | int) -> Cyclo6:
        return (-self) + other

    def __mul__(self, other: Cyclo6 | int) -> Cyclo6:
        if isinstance(other, int):
            other = Cyclo6(other)
        if not isinstance(other, Cyclo6):
            return NotImplemented
        # (a + b z)(c + d z) = ac + (ad + bc) z + bd z^2,  z^2 = z - 1
        a, b, c, d = self._a, self._b, other._a, other._b
        return Cyclo6(a * c - b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Cyclo6:
        if n < 0:
            raise ValueError("negative powers not supported")
        result = Cyclo6(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self) -> str:
        return f"Cyclo6({self._a}, {self._b})"

    def __str__(self) -> str:
        if not self._b:
            return str(self._a)
        z = "z" if self._b == 1 else "-z" if self._b == -1 else f"{self._b}z"
        if not self._a:
            return z
        return f"{self._a}{'+' if not z.startswith('-') else ''}{z}"


def epsilon_scalar(p: LaurentPoly) -> Cyclo6:
    """The scalar part of the evaluation map: A^k -> zeta^k, extended Z-linearly."""
    out = Cyclo6(0)
    for e, c in p._terms.items():
        out = out + Cyclo6.zeta_pow(e) * c
    return out


A = LaurentPoly({1: 1})
A_INV = LaurentPoly({-1: 1})
ONE = LaurentPoly({0: 1})
ZERO = LaurentPoly()
#: Removing a split zero-crossing circle multiplies a chain coefficient by this.
LOOP_FACTOR = LaurentPoly({2: -1, -2: -1})
ZETA = Cyclo6(0, 1)
