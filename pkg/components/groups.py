"""
Discrete group families with decidable canonical forms, the semidirect product
constructor, automorphism families and modular weights.

Element encodings (all immutable, all hashable):
    free-abelian(1)   int
    free-abelian(d)   tuple of d ints
    free(k)           freely reduced word, tuple of nonzero ints in ±1..±k
                      (i is the i-th generator, -i its inverse)
    cyclic(m)         int in 0..m-1
    finite(table)     int index into the multiplication table
    lamps(m)          sorted tuple of (position, value) pairs, value in 1..m-1
    semidirect        pair (n, h)
"""
import functools
import itertools
import json
import random
import string
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.combinatorics.free_groups import free_group

from utils.errors import ConstructionError, DomainError
from utils.logging_utils import logger

Element = Any

_LETTERS = string.ascii_lowercase


class Group(ABC):
    """Base class for discrete groups with canonical element forms"""

    family: str = "abstract"

    @property
    @abstractmethod
    def identity(self) -> Element:
        """The identity element"""

    @property
    @abstractmethod
    def generators(self) -> Tuple[Element, ...]:
        """A finite generating list, closed under inverses"""

    @abstractmethod
    def contains(self, g: Element) -> bool:
        """True when g is a canonical element of this group"""

    @abstractmethod
    def _multiply(self, g: Element, h: Element) -> Element:
        """Unchecked product of canonical elements"""

    @abstractmethod
    def _inverse(self, g: Element) -> Element:
        """Unchecked inverse of a canonical element"""

    @abstractmethod
    def element_to_json(self, g: Element) -> Any:
        """JSON-native encoding of an element"""

    @abstractmethod
    def element_from_json(self, data: Any) -> Element:
        """Decode an element; raises DomainError on malformed input"""

    @property
    def name(self) -> str:
        return self.family

    @property
    def is_abelian(self) -> bool:
        return False

    def multiply(self, g: Element, h: Element) -> Element:
        """Canonical form of g·h"""
        self.check(g)
        self.check(h)
        return self._multiply(g, h)

    def inverse(self, g: Element) -> Element:
        self.check(g)
        return self._inverse(g)

    def check(self, g: Element) -> Element:
        if not self.contains(g):
            raise DomainError(f"{g!r} is not an element of {self.name}")
        return g

    def conjugate(self, s: Element, g: Element) -> Element:
        """s g s⁻¹"""
        return self.multiply(self.multiply(s, g), self.inverse(s))

    def power(self, g: Element, k: int) -> Element:
        base = g if k >= 0 else self.inverse(g)
        result = self.identity
        for _ in range(abs(k)):
            result = self._multiply(result, base)
        return result

    def haar_weight(self, g: Element) -> Fraction:
        """Counting measure: every element weighs 1"""
        return Fraction(1)

    def weight_of(self, elements: Iterable[Element]) -> Fraction:
        return sum((self.haar_weight(g) for g in elements), Fraction(0))

    def format_element(self, g: Element) -> str:
        return json.dumps(self.element_to_json(g), separators=(",", ":"))

    def random_element(self, rng: random.Random, radius: int = 3) -> Element:
        """Product of a random number (≤ radius) of random generators"""
        result = self.identity
        if not self.generators:
            return result
        for _ in range(rng.randint(0, radius)):
            result = self._multiply(result, rng.choice(self.generators))
        return result

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family}

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.name}>"


class FreeAbelianGroup(Group):
    """ℤ^d under addition; rank 1 uses plain ints"""

    family = "free-abelian"

    def __init__(self, rank: int = 1):
        if rank < 1:
            raise ConstructionError(f"free-abelian rank must be positive, got {rank}")
        self.rank = rank

    @property
    def name(self) -> str:
        return "Z" if self.rank == 1 else f"Z^{self.rank}"

    @property
    def is_abelian(self) -> bool:
        return True

    @property
    def identity(self) -> Element:
        return 0 if self.rank == 1 else (0,) * self.rank

    @property
    def generators(self) -> Tuple[Element, ...]:
        if self.rank == 1:
            return (1, -1)
        gens = []
        for i in range(self.rank):
            for sign in (1, -1):
                vec = [0] * self.rank
                vec[i] = sign
                gens.append(tuple(vec))
        return tuple(gens)

    def contains(self, g: Element) -> bool:
        if self.rank == 1:
            return isinstance(g, int) and not isinstance(g, bool)
        return (
            isinstance(g, tuple)
            and len(g) == self.rank
            and all(isinstance(c, int) and not isinstance(c, bool) for c in g)
        )

    def _multiply(self, g: Element, h: Element) -> Element:
        if self.rank == 1:
            return g + h
        return tuple(a + b for a, b in zip(g, h))

    def _inverse(self, g: Element) -> Element:
        if self.rank == 1:
            return -g
        return tuple(-a for a in g)

    def element_to_json(self, g: Element) -> Any:
        return g if self.rank == 1 else list(g)

    def element_from_json(self, data: Any) -> Element:
        if self.rank == 1:
            if isinstance(data, str):
                data = _parse_int(data)
            return self.check(data)
        if isinstance(data, str):
            data = [_parse_int(part) for part in data.strip("()[] ").split(",")]
        return self.check(tuple(data) if isinstance(data, list) else data)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "rank": self.rank}


class FreeGroup(Group):
    """Free group F_k; elements are freely reduced words of signed letters, a = 1, a⁻¹ = -1, b = 2, ...

    Products and inverses are computed by sympy's free group and read back
    through `letter_form`.
    """

    family = "free"

    def __init__(self, rank: int = 2):
        if not 1 <= rank <= len(_LETTERS):
            raise ConstructionError(f"free group rank must be in 1..{len(_LETTERS)}, got {rank}")
        self.rank = rank
        self._free, *self._gens = free_group(", ".join(_LETTERS[:rank]))
        self._index = {sym: i for i, sym in enumerate(self._free.symbols, start=1)}

    @property
    def name(self) -> str:
        return f"F{self.rank}"

    @property
    def is_abelian(self) -> bool:
        return self.rank == 1

    @property
    def identity(self) -> Element:
        return ()

    @property
    def generators(self) -> Tuple[Element, ...]:
        return tuple((sign * i,) for i in range(1, self.rank + 1) for sign in (1, -1))

    @property
    def alphabet(self) -> Tuple[int, ...]:
        """Letters in the order a, a⁻¹, b, b⁻¹, ..."""
        return tuple(word[0] for word in self.generators)

    def contains(self, g: Element) -> bool:
        if not isinstance(g, tuple):
            return False
        for i, letter in enumerate(g):
            if not isinstance(letter, int) or letter == 0 or abs(letter) > self.rank:
                return False
            if i and g[i - 1] == -letter:
                return False
        return True

    def to_sympy(self, letters: Iterable[int]):
        word = self._free.identity
        for letter in letters:
            if not isinstance(letter, int) or letter == 0 or abs(letter) > self.rank:
                raise DomainError(f"letter {letter!r} is outside {self.name}")
            word = word * self._gens[abs(letter) - 1] ** (1 if letter > 0 else -1)
        return word

    def from_sympy(self, word) -> Element:
        return tuple(
            self._index[sym] if sym.is_Symbol else -self._index[-sym] for sym in word.letter_form
        )

    def reduce(self, letters: Iterable[int]) -> Element:
        """Freely reduced form of any letter sequence"""
        return self.from_sympy(self.to_sympy(letters))

    def _multiply(self, g: Element, h: Element) -> Element:
        return self.from_sympy(self.to_sympy(g) * self.to_sympy(h))

    def _inverse(self, g: Element) -> Element:
        return self.from_sympy(self.to_sympy(g).inverse())

    def format_element(self, g: Element) -> str:
        return format_word(g)

    def element_to_json(self, g: Element) -> Any:
        return format_word(g)

    def element_from_json(self, data: Any) -> Element:
        if not isinstance(data, str):
            raise DomainError(f"free group elements are words such as 'aB', got {data!r}")
        return self.reduce(parse_word(data))

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "rank": self.rank}


class CyclicGroup(Group):
    """ℤ/m; order 1 is the trivial group"""

    family = "cyclic"

    def __init__(self, order: int):
        if order < 1:
            raise ConstructionError(f"cyclic order must be positive, got {order}")
        self.order = order

    @property
    def name(self) -> str:
        return "trivial" if self.order == 1 else f"Z/{self.order}"

    @property
    def is_abelian(self) -> bool:
        return True

    @property
    def identity(self) -> Element:
        return 0

    @property
    def generators(self) -> Tuple[Element, ...]:
        if self.order == 1:
            return ()
        if self.order == 2:
            return (1,)
        return (1, self.order - 1)

    def contains(self, g: Element) -> bool:
        return isinstance(g, int) and not isinstance(g, bool) and 0 <= g < self.order

    def _multiply(self, g: Element, h: Element) -> Element:
        return (g + h) % self.order

    def _inverse(self, g: Element) -> Element:
        return (-g) % self.order

    def element_to_json(self, g: Element) -> Any:
        return g

    def element_from_json(self, data: Any) -> Element:
        if isinstance(data, str):
            data = _parse_int(data)
        return self.check(data)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "order": self.order}


class FiniteGroup(Group):
    """Finite group given by a multiplication table on 0..n-1"""

    family = "finite"

    def __init__(self, table: Sequence[Sequence[int]], label: Optional[str] = None):
        self.table = tuple(tuple(row) for row in table)
        self.label = label
        self._validate()
        n = len(self.table)
        self._identity = next(
            e for e in range(n) if all(self.table[e][g] == g == self.table[g][e] for g in range(n))
        )
        self._inverses = tuple(
            next(h for h in range(n) if self.table[g][h] == self._identity) for g in range(n)
        )

    def _validate(self):
        n = len(self.table)
        if n == 0:
            raise ConstructionError("multiplication table is empty")
        if any(len(row) != n or any(not 0 <= v < n for v in row) for row in self.table):
            raise ConstructionError("multiplication table must be square with entries in 0..n-1")
        for g, h, k in itertools.product(range(n), repeat=3):
            if self.table[self.table[g][h]][k] != self.table[g][self.table[h][k]]:
                raise ConstructionError(f"multiplication table is not associative at ({g},{h},{k})")
        identities = [
            e for e in range(n) if all(self.table[e][g] == g == self.table[g][e] for g in range(n))
        ]
        if not identities:
            raise ConstructionError("multiplication table has no identity")
        e = identities[0]
        for g in range(n):
            if e not in self.table[g]:
                raise ConstructionError(f"element {g} has no inverse")

    @property
    def name(self) -> str:
        return self.label or f"finite({len(self.table)})"

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def is_abelian(self) -> bool:
        n = len(self.table)
        return all(self.table[g][h] == self.table[h][g] for g in range(n) for h in range(n))

    @property
    def identity(self) -> Element:
        return self._identity

    @property
    def generators(self) -> Tuple[Element, ...]:
        return tuple(g for g in range(len(self.table)) if g != self._identity)

    def contains(self, g: Element) -> bool:
        return isinstance(g, int) and not isinstance(g, bool) and 0 <= g < len(self.table)

    def _multiply(self, g: Element, h: Element) -> Element:
        return self.table[g][h]

    def _inverse(self, g: Element) -> Element:
        return self._inverses[g]

    def element_to_json(self, g: Element) -> Any:
        return g

    def element_from_json(self, data: Any) -> Element:
        if isinstance(data, str):
            data = _parse_int(data)
        return self.check(data)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "table": [list(row) for row in self.table]}


class LampGroup(Group):
    """⊕_{i∈ℤ} ℤ/m: finitely supported lamp configurations, pointwise addition"""

    family = "lamps"

    def __init__(self, order: int = 2):
        if order < 2:
            raise ConstructionError(f"lamp order must be at least 2, got {order}")
        self.order = order

    @property
    def name(self) -> str:
        return "lamps" if self.order == 2 else f"lamps({self.order})"

    @property
    def is_abelian(self) -> bool:
        return True

    @property
    def identity(self) -> Element:
        return ()

    @property
    def generators(self) -> Tuple[Element, ...]:
        if self.order == 2:
            return (((0, 1),),)
        return (((0, 1),), ((0, self.order - 1),))

    def contains(self, g: Element) -> bool:
        if not isinstance(g, tuple):
            return False
        positions = []
        for entry in g:
            if not (isinstance(entry, tuple) and len(entry) == 2):
                return False
            pos, val = entry
            if not isinstance(pos, int) or not isinstance(val, int) or not 0 < val < self.order:
                return False
            positions.append(pos)
        return positions == sorted(set(positions))

    def configuration(self, values: Dict[int, int]) -> Element:
        return tuple(sorted((p, v % self.order) for p, v in values.items() if v % self.order))

    def _multiply(self, g: Element, h: Element) -> Element:
        values = dict(g)
        for pos, val in h:
            values[pos] = values.get(pos, 0) + val
        return self.configuration(values)

    def _inverse(self, g: Element) -> Element:
        return self.configuration({p: -v for p, v in g})

    def shift(self, g: Element, k: int) -> Element:
        """Move every lamp k positions to the right"""
        return tuple((p + k, v) for p, v in g)

    def supported_in(self, lo: int, hi: int) -> Tuple[Element, ...]:
        """All configurations supported in positions lo..hi"""
        positions = list(range(lo, hi + 1))
        configs = []
        for values in itertools.product(range(self.order), repeat=len(positions)):
            configs.append(self.configuration(dict(zip(positions, values))))
        return tuple(configs)

    def element_to_json(self, g: Element) -> Any:
        if self.order == 2:
            return [p for p, _ in g]
        return [[p, v] for p, v in g]

    def element_from_json(self, data: Any) -> Element:
        if not isinstance(data, list):
            raise DomainError(f"lamp configurations are JSON lists, got {data!r}")
        try:
            if self.order == 2:
                values = {int(p): 1 for p in data}
            else:
                values = {int(p): int(v) for p, v in data}
        except (TypeError, ValueError):
            raise DomainError(f"malformed lamp configuration {data!r}")
        return self.configuration(values)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "order": self.order}


@dataclass(frozen=True)
class Automorphism:
    """A group automorphism given by mutually inverse maps"""

    forward: Callable[[Element], Element]
    backward: Callable[[Element], Element]
    label: str = "automorphism"

    def __call__(self, g: Element) -> Element:
        return self.forward(g)

    def inverse(self) -> "Automorphism":
        return Automorphism(self.backward, self.forward, f"{self.label}^-1")

    def power(self, k: int) -> "Automorphism":
        step = self.forward if k >= 0 else self.backward
        back = self.backward if k >= 0 else self.forward
        count = abs(k)

        def forward(g, _step=step, _count=count):
            for _ in range(_count):
                g = _step(g)
            return g

        def backward(g, _back=back, _count=count):
            for _ in range(_count):
                g = _back(g)
            return g

        return Automorphism(forward, backward, f"{self.label}^{k}")

    @classmethod
    def identity(cls) -> "Automorphism":
        return cls(lambda g: g, lambda g: g, "id")


class TauAction(ABC):
    """A homomorphism τ: H → Aut(N), h ↦ τ_h"""

    label: str = "tau"
    descriptor: Any = None

    @abstractmethod
    def __call__(self, h: Element) -> Automorphism:
        """τ_h"""

    def describe(self) -> Any:
        return self.descriptor if self.descriptor is not None else self.label


class TrivialTau(TauAction):
    """τ_h = id for all h (direct product)"""

    label = "trivial"

    def __call__(self, h: Element) -> Automorphism:
        return Automorphism.identity()


class PowerTau(TauAction):
    """τ_h = φ^h for an integer-indexed H (ℤ or ℤ/m)"""

    def __init__(self, base: Automorphism, acting: Group, label: Optional[str] = None):
        if not isinstance(acting, (CyclicGroup, FreeAbelianGroup)) or (
            isinstance(acting, FreeAbelianGroup) and acting.rank != 1
        ):
            raise ConstructionError(f"power actions need H = Z or Z/m, got {acting.name}")
        self.base = base
        self.acting = acting
        self.label = label or base.label
        self._power = functools.lru_cache(maxsize=1024)(base.power)

    def __call__(self, h: Element) -> Automorphism:
        return self._power(self.acting.check(h))


@dataclass(frozen=True)
class TablePermutation:
    """Permutation of a finite group's elements used as an automorphism"""

    images: Tuple[int, ...]

    def automorphism(self, group: FiniteGroup) -> Automorphism:
        n = group.order
        if sorted(self.images) != list(range(n)):
            raise ConstructionError("table automorphism must be a permutation of the elements")
        for g in range(n):
            for h in range(n):
                if self.images[group.table[g][h]] != group.table[self.images[g]][self.images[h]]:
                    raise ConstructionError(
                        f"table automorphism is not a homomorphism at ({g},{h})"
                    )
        inverse = [0] * n
        for g, image in enumerate(self.images):
            inverse[image] = g
        images, back = self.images, tuple(inverse)
        return Automorphism(lambda g: images[g], lambda g: back[g], "table")


def sign_flip_tau(normal: Group, acting: Group) -> PowerTau:
    """τ_h(n) = (−1)^h n on an abelian N"""
    if not normal.is_abelian:
        raise ConstructionError(f"sign flip needs an abelian normal factor, got {normal.name}")
    flip = Automorphism(normal._inverse, normal._inverse, "sign-flip")
    return PowerTau(flip, acting, "sign-flip")


def shift_tau(normal: Group, acting: Group) -> PowerTau:
    """τ_h moves every lamp h positions"""
    if not isinstance(normal, LampGroup):
        raise ConstructionError(f"shift action needs a lamp group, got {normal.name}")
    step = Automorphism(lambda g: normal.shift(g, 1), lambda g: normal.shift(g, -1), "shift")
    return PowerTau(step, acting, "shift")


def table_tau(normal: Group, acting: Group, images: Sequence[int]) -> PowerTau:
    if not isinstance(normal, FiniteGroup):
        raise ConstructionError(f"table action needs a finite normal factor, got {normal.name}")
    base = TablePermutation(tuple(images)).automorphism(normal)
    tau = PowerTau(base, acting, "table")
    tau.descriptor = {"table": list(images)}
    return tau


class ModularWeight:
    """Positive multiplicative weight σ on H"""

    def __init__(self, value: Callable[[Element], Fraction], label: str = "custom"):
        self._value = value
        self.label = label

    def __call__(self, h: Element) -> Fraction:
        return Fraction(self._value(h))

    def inverse_at(self, h: Element) -> Fraction:
        return 1 / self(h)

    @property
    def is_unit(self) -> bool:
        return self.label == "unit"

    @classmethod
    def unit(cls) -> "ModularWeight":
        return cls(lambda h: Fraction(1), "unit")

    @classmethod
    def exponential(cls, base: Fraction) -> "ModularWeight":
        """σ(h) = base^h for integer-indexed H"""
        base = Fraction(base)
        if base <= 0:
            raise ConstructionError("exponential modular weight needs a positive base")
        return cls(lambda h: base ** h, f"exponential({base})")

    def describe(self) -> Any:
        return 1 if self.is_unit else self.label


class SemidirectGroup(Group):
    """N ⋊_τ H with (n₁,h₁)(n₂,h₂) = (n₁τ_{h₁}(n₂), h₁h₂)"""

    family = "semidirect"

    def __init__(self, normal: Group, acting: Group, tau: TauAction, sigma: ModularWeight,
                 label: Optional[str] = None):
        self.normal = normal
        self.acting = acting
        self.tau = tau
        self.sigma = sigma
        self.label = label

    @property
    def name(self) -> str:
        return self.label or f"{self.normal.name}x|{self.acting.name}[{self.tau.label}]"

    @property
    def is_abelian(self) -> bool:
        return isinstance(self.tau, TrivialTau) and self.normal.is_abelian and self.acting.is_abelian

    @property
    def identity(self) -> Element:
        return (self.normal.identity, self.acting.identity)

    @property
    def generators(self) -> Tuple[Element, ...]:
        gens = [(n, self.acting.identity) for n in self.normal.generators]
        gens += [(self.normal.identity, h) for h in self.acting.generators]
        return tuple(gens)

    def contains(self, g: Element) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == 2
            and self.normal.contains(g[0])
            and self.acting.contains(g[1])
        )

    def _multiply(self, g: Element, h: Element) -> Element:
        n1, h1 = g
        n2, h2 = h
        return (self.normal._multiply(n1, self.tau(h1)(n2)), self.acting._multiply(h1, h2))

    def _inverse(self, g: Element) -> Element:
        n, h = g
        h_inv = self.acting._inverse(h)
        return (self.tau(h_inv)(self.normal._inverse(n)), h_inv)

    def haar_weight(self, g: Element) -> Fraction:
        n, h = g
        return self.sigma(h) * self.normal.haar_weight(n) * self.acting.haar_weight(h)

    def element_to_json(self, g: Element) -> Any:
        return [self.normal.element_to_json(g[0]), self.acting.element_to_json(g[1])]

    def element_from_json(self, data: Any) -> Element:
        if not isinstance(data, list) or len(data) != 2:
            raise DomainError(f"semidirect elements are [n, h] pairs, got {data!r}")
        return (self.normal.element_from_json(data[0]), self.acting.element_from_json(data[1]))

    def describe(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "normal": self.normal.describe(),
            "acting": self.acting.describe(),
            "tau": self.tau.describe(),
            "sigma": self.sigma.describe(),
        }


def semidirect(normal: Group, acting: Group, tau: TauAction,
               sigma: Optional[ModularWeight] = None, label: Optional[str] = None,
               seed: int = 0, samples: int = 24) -> SemidirectGroup:
    """Build N ⋊_τ H after spot-checking τ and σ on sampled elements"""
    sigma = sigma or ModularWeight.unit()
    rng = random.Random(seed)
    hs = list(ball(acting, acting.generators, 2)) + [acting.random_element(rng, 6) for _ in range(samples)]
    ns = list(ball(normal, normal.generators, 2)) + [normal.random_element(rng, 6) for _ in range(samples)]

    for _ in range(samples):
        h1, h2 = rng.choice(hs), rng.choice(hs)
        n1, n2 = rng.choice(ns), rng.choice(ns)
        t1, t2, t12 = tau(h1), tau(h2), tau(acting._multiply(h1, h2))
        if t12(n1) != t1(t2(n1)):
            raise ConstructionError(
                f"tau is not a homomorphism: tau_(h1 h2) != tau_h1 o tau_h2 at h1={h1!r}, h2={h2!r}, n={n1!r}"
            )
        if t1(normal._multiply(n1, n2)) != normal._multiply(t1(n1), t1(n2)):
            raise ConstructionError(f"tau_{h1!r} does not preserve products on N")
        if t1.backward(t1(n1)) != n1 or t1(t1.backward(n1)) != n1:
            raise ConstructionError(f"tau_{h1!r} forward and backward maps are not inverse")
        if sigma(h1) <= 0:
            raise ConstructionError(f"modular weight must be positive, sigma({h1!r}) = {sigma(h1)}")
        if sigma(acting._multiply(h1, h2)) != sigma(h1) * sigma(h2):
            raise ConstructionError(f"modular weight is not multiplicative at ({h1!r}, {h2!r})")

    group = SemidirectGroup(normal, acting, tau, sigma, label)
    logger.info(f"GROUP: built {group.name} (tau={tau.label}, sigma={sigma.label})")
    return group


def lamplighter(order: int = 2) -> SemidirectGroup:
    """(⊕_ℤ ℤ/m) ⋊ ℤ with the shift action"""
    lamps = LampGroup(order)
    z = FreeAbelianGroup(1)
    return semidirect(lamps, z, shift_tau(lamps, z), label="lamplighter" if order == 2 else f"lamplighter({order})")


def sign_flip_product(rank: int = 1) -> SemidirectGroup:
    """ℤ^d ⋊ ℤ with τ_h = (−1)^h, infinite-dihedral type"""
    normal = FreeAbelianGroup(rank)
    acting = FreeAbelianGroup(1)
    return semidirect(normal, acting, sign_flip_tau(normal, acting))


def ball(group: Group, generators: Optional[Sequence[Element]] = None, radius: int = 1) -> Tuple[Element, ...]:
    """All elements of word length ≤ radius, in breadth-first order"""
    if radius < 0:
        raise DomainError(f"ball radius must be nonnegative, got {radius}")
    gens = tuple(group.generators if generators is None else generators)
    for s in gens:
        group.check(s)
    seen = {group.identity}
    order = [group.identity]
    frontier = deque([group.identity])
    for _ in range(radius):
        next_frontier = deque()
        for g in frontier:
            for s in gens:
                h = group._multiply(g, s)
                if h not in seen:
                    seen.add(h)
                    order.append(h)
                    next_frontier.append(h)
        frontier = next_frontier
    return tuple(order)


def translate_set(group: Group, s: Element, elements: Iterable[Element], side: str = "left") -> frozenset:
    """sA (side='left') or As (side='right')"""
    if side == "left":
        return frozenset(group.multiply(s, g) for g in elements)
    return frozenset(group.multiply(g, s) for g in elements)


def format_word(word: Sequence[int]) -> str:
    """(1, -2) -> 'aB'; the empty word is 'e'"""
    if not word:
        return "e"
    return "".join(
        _LETTERS[letter - 1] if letter > 0 else _LETTERS[-letter - 1].upper() for letter in word
    )


def parse_word(text: str) -> Tuple[int, ...]:
    """'aB' -> (1, -2), letters as written; 'e' or '' is the empty word"""
    text = text.strip()
    if text in ("", "e", "1"):
        return ()
    letters = []
    for char in text:
        if char.islower() and char in _LETTERS:
            letters.append(_LETTERS.index(char) + 1)
        elif char.isupper() and char.lower() in _LETTERS:
            letters.append(-(_LETTERS.index(char.lower()) + 1))
        else:
            raise DomainError(f"unexpected letter {char!r} in word {text!r}")
    return tuple(letters)


def _parse_int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise DomainError(f"expected an integer, got {text!r}")


FAMILIES = {
    "free-abelian": "Z^d under addition (params: rank)",
    "free": "free group F_k on reduced words (params: rank)",
    "cyclic": "Z/m, order 1 is the trivial group (params: order)",
    "finite": "finite group from a multiplication table (params: table)",
    "lamps": "finitely supported Z-indexed lamp configurations over Z/m (params: order)",
    "semidirect": "N x|_tau H (params: normal, acting, tau = sign-flip|shift|trivial|{table}, sigma = 1)",
    "lamplighter": "(+_Z Z/2) x| Z with the shift action (params: order)",
}
