"""Small finite groups given by multiplication tables."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product


class GroupTableError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    name: str
    elements: tuple[str, ...]
    table: dict  # (a, b) -> a*b
    identity: str

    def __post_init__(self):
        els = set(self.elements)
        if self.identity not in els:
            raise GroupTableError(f"{self.name}: identity {self.identity!r} not an element")
        for a, b in product(self.elements, repeat=2):
            c = self.table.get((a, b))
            if c not in els:
                raise GroupTableError(f"{self.name}: product {a}*{b} missing or outside the group")
        for a in self.elements:
            if self.table[a, self.identity] != a or self.table[self.identity, a] != a:
                raise GroupTableError(f"{self.name}: {self.identity} is not a unit for {a}")
            if not any(self.table[a, b] == self.identity for b in self.elements):
                raise GroupTableError(f"{self.name}: {a} has no inverse")
        for a, b, c in product(self.elements, repeat=3):
            if self.table[self.table[a, b], c] != self.table[a, self.table[b, c]]:
                raise GroupTableError(f"{self.name}: not associative at ({a},{b},{c})")

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: str, b: str) -> str:
        return self.table[a, b]

    def inv(self, a: str) -> str:
        for b in self.elements:
            if self.table[a, b] == self.identity:
                return b
        raise GroupTableError(a)

    def index(self, a: str) -> int:
        return self.elements.index(a)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "elements": list(self.elements),
            "identity": self.identity,
            "table": [[a, b, self.table[a, b]] for a in self.elements for b in self.elements],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FiniteGroup":
        return cls(doc.get("name", "G"), tuple(doc["elements"]), {(a, b): c for a, b, c in doc["table"]}, doc["identity"])


def cyclic(n: int) -> FiniteGroup:
    names = ["e"] + ["g" if k == 1 else f"g{k}" for k in range(1, n)]
    table = {(names[i], names[j]): names[(i + j) % n] for i in range(n) for j in range(n)}
    return FiniteGroup(f"Z{n}", tuple(names), table, "e")


def trivial() -> FiniteGroup:
    return cyclic(1)


def symmetric3() -> FiniteGroup:
    perms = sorted(permutations(range(3)))
    ident = (0, 1, 2)
    perms.remove(ident)
    perms.insert(0, ident)
    names = {p: ("e" if p == ident else "s" + "".join(map(str, p))) for p in perms}
    # (p*q)(i) = p(q(i))
    table = {(names[p], names[q]): names[tuple(p[q[i]] for i in range(3))] for p in perms for q in perms}
    return FiniteGroup("S3", tuple(names[p] for p in perms), table, "e")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    els = [f"{a}.{b}" for a in g.elements for b in h.elements]
    table = {}
    for a1, b1 in product(g.elements, h.elements):
        for a2, b2 in product(g.elements, h.elements):
            table[f"{a1}.{b1}", f"{a2}.{b2}"] = f"{g.mul(a1, a2)}.{h.mul(b1, b2)}"
    return FiniteGroup(f"{g.name}x{h.name}", tuple(els), table, f"{g.identity}.{h.identity}")


def by_name(name: str) -> FiniteGroup:
    name = name.strip().upper()
    if name == "S3":
        return symmetric3()
    if name.startswith("Z"):
        return cyclic(int(name[1:]))
    raise KeyError(name)
