"""
Transformation groups (X, G): spaces, left and right actions, the product-space
action of a semidirect product, and finite test windows.
"""
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

from components.groups import CyclicGroup, FreeAbelianGroup, FreeGroup, Group, SemidirectGroup, ball, format_word
from models.data_models import Window
from utils.errors import ConfigurationError, ConstructionError, DomainError
from utils.logging_utils import logger

POINT = "pt"


@dataclass(frozen=True)
class Space:
    """A discrete space with an enumerable point universe and a point measure"""

    kind: str
    points: Tuple[Any, ...] = ()
    group: Optional[Group] = None
    depth: int = 0
    factors: Tuple["Space", ...] = ()
    weights: Dict[Any, Fraction] = field(default_factory=dict, hash=False, compare=False)

    @classmethod
    def point(cls) -> "Space":
        return cls("point", points=(POINT,))

    @classmethod
    def finite(cls, points, weights: Optional[Dict[Any, Any]] = None) -> "Space":
        points = tuple(dict.fromkeys(points))
        if not points:
            raise ConstructionError("a finite space needs at least one point")
        weights = {p: Fraction(w) for p, w in (weights or {}).items()}
        unknown = [p for p in weights if p not in points]
        if unknown:
            raise ConstructionError(f"weights name points outside the space: {unknown!r}")
        if any(w <= 0 for w in weights.values()):
            raise ConstructionError("point weights must be positive")
        return cls("finite", points=points, weights=weights)

    @classmethod
    def carrier(cls, group: Group) -> "Space":
        """G as a space"""
        return cls("carrier", group=group)

    @classmethod
    def boundary(cls, rank: int = 2, depth: int = 8) -> "Space":
        """Depth-truncated reduced infinite words over F_rank"""
        if depth < 1:
            raise ConstructionError(f"boundary depth must be positive, got {depth}")
        return cls("boundary", group=FreeGroup(rank), depth=depth)

    @classmethod
    def product(cls, left: "Space", right: "Space") -> "Space":
        return cls("product", factors=(left, right))

    def contains(self, x: Any) -> bool:
        if self.kind in ("point", "finite"):
            return x in self.points
        if self.kind == "carrier":
            return self.group.contains(x)
        if self.kind == "boundary":
            return len(x) == self.depth and self.group.contains(x) if isinstance(x, tuple) else False
        if self.kind == "product":
            return (
                isinstance(x, tuple)
                and len(x) == 2
                and self.factors[0].contains(x[0])
                and self.factors[1].contains(x[1])
            )
        return False

    def check(self, x: Any) -> Any:
        if not self.contains(x):
            raise DomainError(f"{x!r} is not a point of the {self.kind} space")
        return x

    def weight(self, x: Any) -> Fraction:
        if self.kind == "product":
            return self.factors[0].weight(x[0]) * self.factors[1].weight(x[1])
        return self.weights.get(x, Fraction(1))

    def enumerate(self, limit: int) -> Tuple[Any, ...]:
        """First `limit` points in canonical order"""
        if limit < 1:
            return ()
        if self.kind in ("point", "finite"):
            return self.points[:limit]
        if self.kind == "carrier":
            radius = 0
            found = ball(self.group, self.group.generators, 0)
            while len(found) < limit:
                radius += 1
                grown = ball(self.group, self.group.generators, radius)
                if len(grown) == len(found):
                    break
                found = grown
            return found[:limit]
        if self.kind == "boundary":
            return tuple(itertools.islice(self._boundary_words(), limit))
        left = self.factors[0].enumerate(limit)
        right = self.factors[1].enumerate(limit)
        return tuple(itertools.islice(itertools.product(left, right), limit))

    def _boundary_words(self):
        alphabet = self.group.alphabet

        def extend(prefix):
            if len(prefix) == self.depth:
                yield prefix
                return
            for letter in alphabet:
                if prefix and prefix[-1] == -letter:
                    continue
                yield from extend(prefix + (letter,))

        return extend(())

    def format_point(self, x: Any) -> str:
        if self.kind == "boundary":
            return format_word(x)
        if self.kind == "carrier":
            return self.group.format_element(x)
        if self.kind == "product":
            return f"({self.factors[0].format_point(x[0])},{self.factors[1].format_point(x[1])})"
        return str(x)

    def describe(self) -> Dict[str, Any]:
        if self.kind == "finite":
            return {"kind": "finite", "points": list(self.points)}
        if self.kind == "carrier":
            return {"kind": "carrier"}
        if self.kind == "boundary":
            return {"kind": "boundary", "rank": self.group.rank, "depth": self.depth}
        if self.kind == "product":
            return {"kind": "product", "factors": [f.describe() for f in self.factors]}
        return {"kind": "point"}


@dataclass(frozen=True)
class TransformationGroup:
    """G acting on X from the left, optionally also from the right"""

    space: Space
    group: Group
    left_act: Callable[[Any, Any], Any]
    right_act: Optional[Callable[[Any, Any], Any]] = None
    label: str = "action"

    @property
    def has_right_action(self) -> bool:
        return self.right_act is not None


def act_left(T: TransformationGroup, s: Any, x: Any) -> Any:
    """s·x"""
    T.group.check(s)
    T.space.check(x)
    return T.left_act(s, x)


def act_right(T: TransformationGroup, x: Any, s: Any) -> Any:
    """x·s"""
    if T.right_act is None:
        raise ConfigurationError(f"{T.label} has no right action")
    T.group.check(s)
    T.space.check(x)
    return T.right_act(x, s)


def trivial_action(space: Space, group: Group) -> TransformationGroup:
    """s·x = x = x·s"""
    return TransformationGroup(space, group, lambda s, x: x, lambda x, s: x, label="trivial")


def carrier_action(group: Group) -> TransformationGroup:
    """G on itself by left and right multiplication"""
    return TransformationGroup(
        Space.carrier(group), group, group._multiply, group._multiply, label="carrier"
    )


def rotation_action(order: int, group: Optional[Group] = None) -> TransformationGroup:
    """ℤ (or ℤ/m) acting on the points 0..order-1 by translation mod order

    A semidirect group acts through its acting factor, so its normal factor fixes every point.
    """
    group = group or FreeAbelianGroup(1)
    base, index = group, (lambda s: s)
    if isinstance(group, SemidirectGroup):
        base, index = group.acting, (lambda s: s[1])
    if not isinstance(base, (FreeAbelianGroup, CyclicGroup)) or getattr(base, "rank", 1) != 1:
        raise ConstructionError(f"rotation needs an integer-indexed group, got {group.name}")
    if order < 1:
        raise ConstructionError(f"rotation order must be positive, got {order}")
    space = Space.finite(range(order))
    rotate = lambda s, x: (x + index(s)) % order
    return TransformationGroup(space, group, rotate, lambda x, s: rotate(s, x), label=f"rotation({order})")


def boundary_action(rank: int = 2, depth: int = 8) -> TransformationGroup:
    """F_rank on depth-truncated boundary words.

    A stored word w stands for the infinite word w·(w_last)^∞. The image s·w is
    computed exactly on that infinite word and cut back to the stored depth, so
    the first depth − |s| letters are exact.
    """
    space = Space.boundary(rank, depth)
    group = space.group

    def left(s, w):
        tail = (w[-1],) * len(s)
        return group.reduce(s + w + tail)[:depth]

    return TransformationGroup(space, group, left, label=f"boundary(F{rank},{depth})")


def with_inverse_right(T: TransformationGroup) -> TransformationGroup:
    """Opt-in right action x·s := s⁻¹·x"""
    group = T.group
    return TransformationGroup(
        T.space, group, T.left_act, lambda x, s: T.left_act(group._inverse(s), x),
        label=f"{T.label}+inverse-right",
    )


def product_action(T_N: TransformationGroup, T_H: TransformationGroup, G: SemidirectGroup,
                   sample: int = 8) -> TransformationGroup:
    """N⋊H on X×X by (n,h)·(x,y) = (x, h·y); X must be a trivial N-space"""
    if T_N.group is not G.normal or T_H.group is not G.acting:
        raise ConstructionError("product action factors must act through the semidirect factors")
    if T_N.space != T_H.space:
        raise ConstructionError("product action needs N and H acting on the same space")
    for x in T_N.space.enumerate(sample):
        for n in ball(G.normal, G.normal.generators, 2):
            if T_N.left_act(n, x) != x:
                raise ConstructionError(
                    f"N acts nontrivially: {G.normal.format_element(n)}·{x!r} != {x!r}"
                )

    def left(g, point):
        _, h = g
        x, y = point
        return (x, T_H.left_act(h, y))

    space = Space.product(T_N.space, T_H.space)
    logger.info(f"ACTION: product action of {G.name} on X×X ({T_H.label})")
    return TransformationGroup(space, G, left, label=f"product({T_H.label})")


def diag_conjugation_window(T: TransformationGroup, r_X: int, r_G: int) -> Window:
    """Space part: ball of radius r_X (group carriers) or the first max(1, r_X) points; group part: ball(G, r_G)"""
    if r_X < 0 or r_G < 0:
        raise DomainError("window radii must be nonnegative")
    if T.space.kind == "carrier":
        space_part = ball(T.space.group, T.space.group.generators, r_X)
    else:
        space_part = T.space.enumerate(max(1, r_X))
    group_part = ball(T.group, T.group.generators, r_G)
    return Window(tuple(space_part), tuple(group_part))


def boundary_point(space: Space, word: Sequence[int]) -> Tuple[int, ...]:
    """Stored point of the periodic word word^∞, e.g. 'a' for a^∞ and 'ab' for (ab)^∞"""
    if space.kind != "boundary":
        raise DomainError("boundary points need a boundary space")
    if not word:
        raise DomainError("a boundary point needs a nonempty period")
    return space.check(tuple(itertools.islice(itertools.cycle(word), space.depth)))
