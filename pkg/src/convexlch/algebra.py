"""Free noncommutative algebra over GF(2).

Elements are finite sets of words (mod-2 coefficients are implicit in set
membership); words are tuples of generator keys.  The empty word is the
unit.
"""

from __future__ import annotations

from typing import Iterable

Word = tuple
Element = frozenset

ZERO: Element = frozenset()
ONE: Element = frozenset({()})


def el(*words: Word) -> Element:
    """Element from explicit words, reducing mod 2."""
    out: set[Word] = set()
    for w in words:
        out ^= {tuple(w)}
    return frozenset(out)


def add(*elements: Element) -> Element:
    out: set[Word] = set()
    for e in elements:
        out ^= e
    return frozenset(out)


def mul(a: Element, b: Element) -> Element:
    out: set[Word] = set()
    for wa in a:
        for wb in b:
            out ^= {wa + wb}
    return frozenset(out)


def mul_many(factors: Iterable[Element]) -> Element:
    out = ONE
    for f in factors:
        if not f:
            return ZERO
        out = mul(out, f)
    return out


def scalar(e: Element) -> int:
    """Coefficient of the empty word."""
    return 1 if () in e else 0


def nonconstant(e: Element) -> Element:
    return frozenset(w for w in e if w)


def words_sorted(e: Element) -> list[Word]:
    return sorted(e, key=lambda w: (len(w), w))
