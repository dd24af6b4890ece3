"""Exact plane geometry shared by the metric modules.

Every edge length appearing in the thickened complexes has the form
``2*sin(pi*t)`` for a rational ``t`` in ``(0, 1/2]``.  We therefore carry
the chord parameter ``t`` alongside the floating point value, and angles
are stored as exact fractions of a full turn whenever a closed form is
available.  A floating point mirror is always present so that callers
can fall back to numerics uniformly.

The closed forms implemented in :func:`corner_angle` cover three
situations:

* both sides at the corner are unit chords (``t = 1/6``), so the corner
  is the apex of an isosceles triangle with unit legs;
* the opposite side equals one of the corner sides and both are unit
  chords, so the corner is a base angle of such a triangle;
* the three chords can be inscribed in a unit circle, i.e. some choice
  of arcs ``e_i`` in ``{t_i, 1 - t_i}`` satisfies ``e_1 + e_2 + e_3 = 1``,
  in which case the inscribed angle theorem applies.

Each closed form is cross-checked against the law of cosines; a
disagreement beyond 1e-9 raises, since it would indicate a bug rather
than a numerical artefact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

UNIT_CHORD_PARAM = Fraction(1, 6)

_CROSS_CHECK_TOL = 1e-9


def chord_value(t: Fraction) -> float:
    """Numeric length of the chord with parameter ``t``."""
    return 2.0 * math.sin(math.pi * float(t))


@dataclass(frozen=True, order=True)
class Chord:
    """A length of the form ``2*sin(pi*t)`` with ``t`` rational.

    >>> float(Chord(Fraction(1, 6)))
    1.0
    """

    t: Fraction

    def __post_init__(self) -> None:
        if not (0 < self.t <= Fraction(1, 2)):
            raise ValueError(f"chord parameter {self.t} outside (0, 1/2]")

    @property
    def value(self) -> float:
        return chord_value(self.t)

    def __float__(self) -> float:
        return self.value

    @property
    def is_unit(self) -> bool:
        return self.t == UNIT_CHORD_PARAM


UNIT_CHORD = Chord(UNIT_CHORD_PARAM)


@dataclass(frozen=True)
class Angle:
    """An angle with optional exact value in fractions of a full turn."""

    radians: float
    turns: Optional[Fraction] = None

    @property
    def exact(self) -> bool:
        return self.turns is not None

    @classmethod
    def from_turns(cls, turns: Fraction) -> "Angle":
        return cls(radians=2.0 * math.pi * float(turns), turns=Fraction(turns))

    def __add__(self, other: "Angle") -> "Angle":
        if self.turns is not None and other.turns is not None:
            return Angle.from_turns(self.turns + other.turns)
        return Angle(radians=self.radians + other.radians)

    def __float__(self) -> float:
        return self.radians


ZERO_ANGLE = Angle.from_turns(Fraction(0))


def angle_sum(angles: Iterable[Angle]) -> Angle:
    total = ZERO_ANGLE
    for a in angles:
        total = total + a
    return total


def _law_of_cosines(left: Chord, right: Chord, across: Chord) -> float:
    l, r, a = left.value, right.value, across.value
    cos = (l * l + r * r - a * a) / (2.0 * l * r)
    cos = max(-1.0, min(1.0, cos))
    return math.acos(cos)


def triangle_is_strict(left: Chord, right: Chord, across: Chord) -> bool:
    """Strict triangle inequality for the three chords, all permutations."""
    l, r, a = left.value, right.value, across.value
    return l + r > a + 1e-12 and l + a > r + 1e-12 and r + a > l + 1e-12


def _closed_form_candidates(left: Chord, right: Chord, across: Chord):
    # Apex of an isosceles triangle with unit legs: the base subtends
    # the full central angle 2*pi*t of its chord.
    if left.is_unit and right.is_unit:
        yield Fraction(across.t)
    # Base angle of an isosceles triangle with unit legs: across is one
    # of the legs, the other corner side is the base.
    if across.is_unit and left.is_unit:
        yield Fraction(1, 4) - right.t / 2
    if across.is_unit and right.is_unit:
        yield Fraction(1, 4) - left.t / 2
    # Inscribed in a unit circle: arcs e_i in {t_i, 1 - t_i} adding to a
    # full turn; the corner sees half the arc of the opposite chord.
    for e_l in (left.t, 1 - left.t):
        for e_r in (right.t, 1 - right.t):
            for e_a in (across.t, 1 - across.t):
                if e_l + e_r + e_a == 1:
                    yield e_a / 2


def corner_angle(left: Chord, right: Chord, across: Chord) -> Angle:
    """Angle between ``left`` and ``right`` in the triangle they span.

    Returns an exact angle whenever one of the catalogued closed forms
    applies, and a numeric-only angle otherwise.

    >>> u = Chord(Fraction(1, 6))
    >>> corner_angle(u, u, u).turns
    Fraction(1, 6)
    """
    if not triangle_is_strict(left, right, across):
        raise ValueError(
            f"chords {left.t}, {right.t}, {across.t} violate the strict triangle inequality"
        )
    numeric = _law_of_cosines(left, right, across)
    matched = sorted(
        {
            turns
            for turns in _closed_form_candidates(left, right, across)
            if abs(2.0 * math.pi * float(turns) - numeric) <= _CROSS_CHECK_TOL
        }
    )
    if len(matched) > 1:
        raise AssertionError(
            f"conflicting exact angle candidates {matched} for chords "
            f"{left.t}, {right.t}, {across.t}"
        )
    if matched:
        return Angle(radians=numeric, turns=matched[0])
    return Angle(radians=numeric)


# ---------------------------------------------------------------------------
# Exact arithmetic in a real quadratic field.


@dataclass(frozen=True)
class QuadraticNumber:
    """A number ``rational + radical * sqrt(root)`` with exact arithmetic.

    ``root`` must be a positive non-square integer.  Numbers with
    ``radical == 0`` are compatible with any root.
    """

    rational: Fraction
    radical: Fraction = Fraction(0)
    root: int = 3

    def __post_init__(self) -> None:
        if self.root <= 1:
            raise ValueError("root must be >= 2")
        object.__setattr__(self, "rational", Fraction(self.rational))
        object.__setattr__(self, "radical", Fraction(self.radical))

    @classmethod
    def of(cls, value, root: int = 3) -> "QuadraticNumber":
        if isinstance(value, QuadraticNumber):
            return value
        return cls(Fraction(value), Fraction(0), root)

    def _common_root(self, other: "QuadraticNumber") -> int:
        if self.radical == 0:
            return other.root
        if other.radical == 0:
            return self.root
        if self.root != other.root:
            raise ValueError(f"mixed radicals sqrt({self.root}) and sqrt({other.root})")
        return self.root

    def __add__(self, other) -> "QuadraticNumber":
        other = QuadraticNumber.of(other, self.root)
        root = self._common_root(other)
        return QuadraticNumber(self.rational + other.rational, self.radical + other.radical, root)

    __radd__ = __add__

    def __neg__(self) -> "QuadraticNumber":
        return QuadraticNumber(-self.rational, -self.radical, self.root)

    def __sub__(self, other) -> "QuadraticNumber":
        return self + (-QuadraticNumber.of(other, self.root))

    def __rsub__(self, other) -> "QuadraticNumber":
        return QuadraticNumber.of(other, self.root) - self

    def __mul__(self, other) -> "QuadraticNumber":
        other = QuadraticNumber.of(other, self.root)
        root = self._common_root(other)
        return QuadraticNumber(
            self.rational * other.rational + self.radical * other.radical * root,
            self.rational * other.radical + self.radical * other.rational,
            root,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QuadraticNumber":
        other = QuadraticNumber.of(other, self.root)
        root = self._common_root(other)
        norm = other.rational * other.rational - other.radical * other.radical * root
        if norm == 0:
            raise ZeroDivisionError("division by zero quadratic number")
        conj = QuadraticNumber(other.rational, -other.radical, root)
        prod = self * conj
        return QuadraticNumber(prod.rational / norm, prod.radical / norm, root)

    def sign(self) -> int:
        """Exact sign, avoiding floating point entirely."""
        a, b = self.rational, self.radical
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # Opposite signs: compare a^2 with b^2 * root.
        lhs, rhs = a * a, b * b * self.root
        if lhs == rhs:
            return 0
        dominant_rational = lhs > rhs
        if a > 0:
            return 1 if dominant_rational else -1
        return -1 if dominant_rational else 1

    def is_zero(self) -> bool:
        return self.rational == 0 and self.radical == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QuadraticNumber.of(other, self.root)
        if not isinstance(other, QuadraticNumber):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        if self.radical == 0:
            return hash(self.rational)
        return hash((self.rational, self.radical, self.root))

    def __lt__(self, other) -> bool:
        other = QuadraticNumber.of(other, self.root)
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        other = QuadraticNumber.of(other, self.root)
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return not self <= other

    def __ge__(self, other) -> bool:
        return not self < other

    def __float__(self) -> float:
        return float(self.rational) + float(self.radical) * math.sqrt(self.root)

    def __repr__(self) -> str:
        if self.radical == 0:
            return f"{self.rational}"
        return f"({self.rational}+{self.radical}*sqrt({self.root}))"
