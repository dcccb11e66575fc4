"""
Finitely supported functions and probability measures with exact rational
weights: translations, convolution and ℓ¹ distances.

Pushforward conventions used throughout:
    (s·μ)(E) = μ(s⁻¹E)   support moves by t ↦ st
    (μ·s)(E) = μ(Es⁻¹)   support moves by t ↦ ts
"""
from collections.abc import Mapping
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Iterator, Optional

from utils.errors import DomainError

Weight = Optional[Callable[[Any], Fraction]]


class FinSignedFunction(Mapping):
    """Finite map point → rational with no zero entries stored"""

    __slots__ = ("_values",)

    def __init__(self, values: Optional[Dict[Any, Any]] = None):
        values = values or {}
        self._values = {p: Fraction(v) for p, v in values.items() if v != 0}

    def __getitem__(self, point: Any) -> Fraction:
        return self._values[point]

    def get(self, point: Any, default: Any = Fraction(0)) -> Fraction:
        return self._values.get(point, default)

    def __iter__(self) -> Iterator[Any]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Mapping):
            return self._values == {p: v for p, v in other.items() if v != 0}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._values.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{p!r}: {v}" for p, v in sorted(self._values.items(), key=lambda kv: repr(kv[0])))
        return f"{self.__class__.__name__}({{{inner}}})"

    @property
    def support(self) -> frozenset:
        return frozenset(self._values)


class ProbMeasure(FinSignedFunction):
    """Finitely supported probability measure: nonnegative weights summing to exactly 1"""

    __slots__ = ()

    def __init__(self, values: Optional[Dict[Any, Any]] = None):
        super().__init__(values)
        if any(v < 0 for v in self._values.values()):
            raise DomainError("probability measures have nonnegative weights")
        total = sum(self._values.values(), Fraction(0))
        if total != 1:
            raise DomainError(f"probability measure weights sum to {total}, not 1")


def total_mass(f: Mapping, weight: Weight = None) -> Fraction:
    """Σ_p f(p)·w(p), with counting weight by default"""
    if weight is None:
        return sum(f.values(), Fraction(0))
    return sum((v * weight(p) for p, v in f.items()), Fraction(0))


def l1_norm(f: Mapping, weight: Weight = None) -> Fraction:
    if weight is None:
        return sum((abs(v) for v in f.values()), Fraction(0))
    return sum((abs(v) * weight(p) for p, v in f.items()), Fraction(0))


def l1_distance(mu: Mapping, nu: Mapping, weight: Weight = None) -> Fraction:
    """Σ_p |μ(p) − ν(p)|·w(p) over the union of supports"""
    total = Fraction(0)
    for p in set(mu) | set(nu):
        diff = abs(Fraction(mu.get(p, 0)) - Fraction(nu.get(p, 0)))
        if diff:
            total += diff if weight is None else diff * weight(p)
    return total


def point_mass(point: Any) -> ProbMeasure:
    return ProbMeasure({point: 1})


def uniform(points: Iterable[Any]) -> ProbMeasure:
    points = set(points)
    if not points:
        raise DomainError("uniform measure needs a nonempty support")
    weight = Fraction(1, len(points))
    return ProbMeasure({p: weight for p in points})


def indicator(points: Iterable[Any]) -> FinSignedFunction:
    return FinSignedFunction({p: 1 for p in points})


def scale(f: Mapping, c: Any) -> FinSignedFunction:
    c = Fraction(c)
    return FinSignedFunction({p: v * c for p, v in f.items()})


def add(f: Mapping, g: Mapping) -> FinSignedFunction:
    values: Dict[Any, Fraction] = dict(f)
    for p, v in g.items():
        values[p] = values.get(p, Fraction(0)) + v
    return FinSignedFunction(values)


def subtract(f: Mapping, g: Mapping) -> FinSignedFunction:
    return add(f, scale(g, -1))


def pushforward(f: Mapping, mapping: Callable[[Any], Any]) -> FinSignedFunction:
    """Image of f under a point map; colliding points accumulate"""
    values: Dict[Any, Fraction] = {}
    for p, v in f.items():
        q = mapping(p)
        values[q] = values.get(q, Fraction(0)) + v
    result = FinSignedFunction(values)
    if isinstance(f, ProbMeasure):
        return ProbMeasure(result)
    return result


def normalize(f: Mapping, weight: Weight = None) -> ProbMeasure:
    """Divide a nonnegative, nonzero function by its total mass"""
    if any(v < 0 for v in f.values()):
        raise DomainError("cannot normalize a function with negative values")
    mass = total_mass(f, weight)
    if mass == 0:
        raise DomainError("cannot normalize the zero function")
    if weight is None:
        return ProbMeasure({p: Fraction(v) / mass for p, v in f.items()})
    return ProbMeasure({p: Fraction(v) * weight(p) / mass for p, v in f.items()})


def translate_left(group, s: Any, f: Mapping) -> FinSignedFunction:
    """l_s f(t) = f(s⁻¹t): support moves by t ↦ st"""
    group.check(s)
    return pushforward(f, lambda t: group.multiply(s, t))


def translate_right(group, f: Mapping, s: Any) -> FinSignedFunction:
    """r_s f(t) = f(ts): support moves by t ↦ ts⁻¹"""
    s_inv = group.inverse(s)
    return pushforward(f, lambda t: group.multiply(t, s_inv))


def push_left(group, s: Any, mu: Mapping) -> FinSignedFunction:
    """s·μ"""
    return translate_left(group, s, mu)


def push_right(group, mu: Mapping, s: Any) -> FinSignedFunction:
    """μ·s"""
    group.check(s)
    return pushforward(mu, lambda t: group.multiply(t, s))


def convolve(group, mu: Mapping, nu: Mapping) -> FinSignedFunction:
    """(μ*ν)(t) = Σ_{uv=t} μ(u)ν(v); probability inputs give a probability output"""
    values: Dict[Any, Fraction] = {}
    for u, a in mu.items():
        for v, b in nu.items():
            t = group.multiply(u, v)
            values[t] = values.get(t, Fraction(0)) + a * b
    result = FinSignedFunction(values)
    if isinstance(mu, ProbMeasure) and isinstance(nu, ProbMeasure):
        return ProbMeasure(result)
    return result


def commutator_defect(group, s: Any, f: Mapping) -> Fraction:
    """‖δ_s*f − f*δ_s‖₁"""
    delta = point_mass(s)
    return l1_distance(convolve(group, delta, f), convolve(group, f, delta))


def to_json(f: Mapping, encode: Callable[[Any], Any]) -> list:
    """[[point, numerator, denominator], ...] sorted by encoded point"""
    rows = [[encode(p), v.numerator, v.denominator] for p, v in f.items()]
    return sorted(rows, key=lambda row: repr(row[0]))


def from_json(rows: list, decode: Callable[[Any], Any]) -> FinSignedFunction:
    try:
        return FinSignedFunction({decode(p): Fraction(num, den) for p, num, den in rows})
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise DomainError(f"malformed measure rows: {str(e)}")
