"""Capacities (possibly signed set functions) and the exact Choquet integral."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .core import DimensionMismatch, Point, RationalLike, ValidationError, as_fraction


@dataclass(frozen=True)
class Capacity:
    """A set function on subsets of {0, ..., n-1}, given as a mask table.

    Mask bit i stands for ground element i. The empty set must map to 0.
    ``monotone`` records whether nu(A) <= nu(B) holds for all A subseteq B;
    it is computed at construction, and signed capacities simply carry False.
    ``normalized`` records nu(full set) == 1.
    """

    ground: int
    table: tuple[Fraction, ...]
    monotone: bool
    normalized: bool

    @classmethod
    def from_mask_table(
        cls, ground: int, values: Mapping[int, RationalLike]
    ) -> "Capacity":
        if ground < 1:
            raise ValidationError("capacity ground size must be >= 1")
        size = 1 << ground
        table = [Fraction(0)] * size
        for mask, v in values.items():
            if not 0 <= mask < size:
                raise ValidationError(f"mask {mask} out of range for ground {ground}")
            table[mask] = as_fraction(v)
        if table[0] != 0:
            raise ValidationError("capacity must vanish on the empty set")
        monotone = True
        for mask in range(size):
            for i in range(ground):
                if mask & (1 << i):
                    continue
                if table[mask] > table[mask | (1 << i)]:
                    monotone = False
                    break
            if not monotone:
                break
        return cls(
            ground=ground,
            table=tuple(table),
            monotone=monotone,
            normalized=table[size - 1] == 1,
        )

    def value(self, mask: int) -> Fraction:
        return self.table[mask]

    def to_mask_dict(self) -> dict[int, Fraction]:
        return {m: v for m, v in enumerate(self.table) if v != 0}


def choquet_value(x: Point, nu: Capacity) -> Fraction:
    """Choquet integral by the descending layer-cake telescope, exactly.

    Coordinates are sorted descending with ties broken by coordinate index
    (equal layers contribute symmetrically, so the value is tie-break free).
    Negative coordinates follow the asymmetric integral convention, which is
    what the telescope with the final value anchored at zero computes.
    """
    if x.dimension != nu.ground:
        raise DimensionMismatch(
            f"point dimension {x.dimension} differs from ground size {nu.ground}"
        )
    order = sorted(range(x.dimension), key=lambda i: (-x.coords[i], i))
    total = Fraction(0)
    mask = 0
    for pos, i in enumerate(order):
        mask |= 1 << i
        current = x.coords[i]
        nxt = x.coords[order[pos + 1]] if pos + 1 < len(order) else Fraction(0)
        total += (current - nxt) * nu.value(mask)
    return total
