"""Conditional independence statements and the semi-graphoid closure engine."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator


def _names(vs: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(vs))


def format_set(vs: Iterable[str]) -> str:
    names = _names(vs)
    if all(len(n) == 1 for n in names):
        return "".join(names)
    return ",".join(names)


@dataclass(frozen=True, order=False)
class CIStatement:
    """An assertion (X ⊥ Y | Z) over disjoint sets of variable names.

    Instances are canonical: ``x`` is never lexicographically greater than
    ``y``, so ``CIStatement.make("B", "A")`` and ``CIStatement.make("A", "B")``
    compare equal.
    """

    x: frozenset[str]
    y: frozenset[str]
    z: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.x or not self.y:
            raise ValueError("CI statement needs nonempty X and Y")
        if self.x & self.y or self.x & self.z or self.y & self.z:
            raise ValueError(f"CI statement sets must be disjoint: {self.x}, {self.y}, {self.z}")
        if _names(self.y) < _names(self.x):
            x, y = self.x, self.y
            object.__setattr__(self, "x", y)
            object.__setattr__(self, "y", x)

    @classmethod
    def make(cls, x: Iterable[str] | str, y: Iterable[str] | str, z: Iterable[str] | str = ()) -> "CIStatement":
        def as_set(v: Iterable[str] | str) -> frozenset[str]:
            return frozenset([v]) if isinstance(v, str) else frozenset(v)

        return cls(as_set(x), as_set(y), as_set(z))

    @property
    def variables(self) -> frozenset[str]:
        return self.x | self.y | self.z

    def sort_key(self) -> tuple:
        return (len(self.x) + len(self.y), len(self.z), _names(self.x), _names(self.y), _names(self.z))

    def __lt__(self, other: "CIStatement") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        body = f"{format_set(self.x)} ⊥ {format_set(self.y)}"
        if self.z:
            body += f" | {format_set(self.z)}"
        return f"({body})"

    def to_json(self) -> list[list[str]]:
        return [list(_names(self.x)), list(_names(self.y)), list(_names(self.z))]

    @classmethod
    def from_json(cls, triple: list) -> "CIStatement":
        x, y, z = triple
        return cls.make(x, y, z)


def parse_statement(text: str) -> CIStatement:
    """Parse ``"A,B _||_ C | D"`` or ``"A ⊥ C | D"``; comma-free sides split per character."""
    s = text.strip().strip("()")
    for sep in ("⊥", "_||_", "_|_"):
        if sep in s:
            left, rest = s.split(sep, 1)
            break
    else:
        raise ValueError(f"no independence symbol in {text!r}")
    right, _, given = rest.partition("|")

    def side(part: str) -> list[str]:
        part = part.strip()
        if not part:
            return []
        if "," in part:
            return [p.strip() for p in part.split(",") if p.strip()]
        if " " in part:
            return part.split()
        return list(part)

    return CIStatement.make(side(left), side(right), side(given))


class CISet:
    """An immutable, canonically ordered set of CI statements."""

    def __init__(self, statements: Iterable[CIStatement] = (), variables: Iterable[str] | None = None):
        self._statements = frozenset(statements)
        vs = set(variables) if variables is not None else set()
        for s in self._statements:
            vs |= s.variables
        self.variables = frozenset(vs)

    def __iter__(self) -> Iterator[CIStatement]:
        return iter(sorted(self._statements))

    def __len__(self) -> int:
        return len(self._statements)

    def __contains__(self, s: object) -> bool:
        return s in self._statements

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CISet):
            return self._statements == other._statements
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._statements)

    def __repr__(self) -> str:
        return "CISet{" + ", ".join(str(s) for s in self) + "}"

    @property
    def statements(self) -> frozenset[CIStatement]:
        return self._statements

    def __or__(self, other: "CISet") -> "CISet":
        return CISet(self._statements | other._statements, self.variables | other.variables)

    def __sub__(self, other: "CISet") -> "CISet":
        return CISet(self._statements - other._statements, self.variables)

    def issubset(self, other: "CISet") -> bool:
        return self._statements <= other._statements

    def restrict(self, variables: Iterable[str]) -> "CISet":
        keep = frozenset(variables)
        return CISet((s for s in self._statements if s.variables <= keep), keep)

    def singleton_pairs(self) -> "CISet":
        return CISet((s for s in self._statements if len(s.x) == 1 and len(s.y) == 1), self.variables)

    def separates(self, a: str, b: str) -> list[frozenset[str]]:
        """Conditioning sets Z with (a ⊥ b | Z) in this set, smallest first."""
        out = [s.z for s in self._statements if len(s.x) == 1 and len(s.y) == 1 and {*s.x, *s.y} == {a, b}]
        return sorted(out, key=lambda z: (len(z), _names(z)))

    def to_json(self) -> list:
        return [s.to_json() for s in self]


def _nonempty_subsets(s: frozenset[str]) -> Iterator[frozenset[str]]:
    items = sorted(s)
    for r in range(1, len(items) + 1):
        for c in combinations(items, r):
            yield frozenset(c)


def semigraphoid_closure(g: CISet | Iterable[CIStatement]) -> CISet:
    """Least superset of ``g`` closed under the four semi-graphoid axioms.

    Symmetry is built into :class:`CIStatement`; the worklist applies
    decomposition, weak union and contraction to both orientations of each
    statement until nothing new appears.
    """
    base = g if isinstance(g, CISet) else CISet(g)
    known: set[CIStatement] = set(base.statements)
    # oriented index: (X, Z) -> set of Y with (X ⊥ Y | Z) known
    by_left: dict[tuple[frozenset[str], frozenset[str]], set[frozenset[str]]] = {}
    work = list(sorted(known))
    for s in work:
        for x, y in ((s.x, s.y), (s.y, s.x)):
            by_left.setdefault((x, s.z), set()).add(y)

    def add(x: frozenset[str], y: frozenset[str], z: frozenset[str]) -> None:
        s = CIStatement(x, y, z)
        if s in known:
            return
        known.add(s)
        work.append(s)
        for a, b in ((s.x, s.y), (s.y, s.x)):
            by_left.setdefault((a, s.z), set()).add(b)

    while work:
        s = work.pop()
        for x, y in ((s.x, s.y), (s.y, s.x)):
            z = s.z
            for part in _nonempty_subsets(y):
                if part == y:
                    continue
                # decomposition and weak union
                add(x, part, z)
                add(x, part, z | (y - part))
            # contraction with s as the first premise: (X ⊥ Y | Z), (X ⊥ W | ZY)
            for w in list(by_left.get((x, z | y), ())):
                add(x, y | w, z)
            # s as the second premise: (X ⊥ W | Z'), Z' = Z ∪ Y, needs (X ⊥ Y | Z)
            w = y
            for yy in _nonempty_subsets(z):
                zz = z - yy
                if yy in by_left.get((x, zz), ()):
                    add(x, yy | w, zz)
    return CISet(known, base.variables)


def is_generated_by(generators: CISet | Iterable[CIStatement], target: CISet) -> bool:
    return semigraphoid_closure(generators) == target


def all_statements(variables: Iterable[str], singleton_pairs: bool = False) -> Iterator[CIStatement]:
    """Every canonical (X ⊥ Y | Z) over disjoint subsets of ``variables``.

    With ``singleton_pairs`` only single-variable X and Y are produced.
    """
    vs = sorted(set(variables))
    n = len(vs)
    if singleton_pairs:
        for i, j in combinations(range(n), 2):
            rest = [v for k, v in enumerate(vs) if k not in (i, j)]
            for r in range(len(rest) + 1):
                for z in combinations(rest, r):
                    yield CIStatement(frozenset([vs[i]]), frozenset([vs[j]]), frozenset(z))
        return
    # label each variable 0 (unused), 1 (X), 2 (Y) or 3 (Z)
    for code in range(4**n):
        x, y, z = [], [], []
        c = code
        for v in vs:
            c, label = divmod(c, 4)
            if label == 1:
                x.append(v)
            elif label == 2:
                y.append(v)
            elif label == 3:
                z.append(v)
        if x and y and tuple(x) < tuple(y):
            yield CIStatement(frozenset(x), frozenset(y), frozenset(z))


def _as_set(v: Iterable[str] | str) -> frozenset[str]:
    return frozenset([v]) if isinstance(v, str) else frozenset(v)


def _oriented(s: CIStatement, x: frozenset[str]) -> frozenset[str]:
    if x == s.x:
        return s.y
    if x == s.y:
        return s.x
    raise ValueError(f"{format_set(x)} is not a side of {s}")


def decomposition(s: CIStatement, x: Iterable[str] | str, keep: Iterable[str] | str) -> CIStatement:
    """(X ⊥ YW | Z) gives (X ⊥ Y | Z), with Y = ``keep``."""
    xs, ks = _as_set(x), _as_set(keep)
    other = _oriented(s, xs)
    if not ks < other:
        raise ValueError(f"{format_set(ks)} is not a proper part of {format_set(other)} in {s}")
    return CIStatement(xs, ks, s.z)


def weak_union(s: CIStatement, x: Iterable[str] | str, move: Iterable[str] | str) -> CIStatement:
    """(X ⊥ YW | Z) gives (X ⊥ Y | ZW), with W = ``move``."""
    xs, ms = _as_set(x), _as_set(move)
    other = _oriented(s, xs)
    if not ms < other:
        raise ValueError(f"{format_set(ms)} is not a proper part of {format_set(other)} in {s}")
    return CIStatement(xs, other - ms, s.z | ms)


def contraction(first: CIStatement, second: CIStatement, x: Iterable[str] | str) -> CIStatement:
    """(X ⊥ Y | Z) and (X ⊥ W | ZY) give (X ⊥ YW | Z)."""
    xs = _as_set(x)
    y = _oriented(first, xs)
    w = _oriented(second, xs)
    if second.z != first.z | y:
        raise ValueError(f"{second} is not conditioned on the context and far side of {first}")
    return CIStatement(xs, y | w, first.z)
