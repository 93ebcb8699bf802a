"""Groups given by normal forms.

Finite factor groups are explicit multiplication tables.  On top of them sit
amalgamated free products ``H *_A J`` and HNN extensions ``H *^A`` whose
elements are stored as normal forms and multiplied by the right action of a
single letter.  Two table-free shortcuts cover the built-in infinite
families: free products of cyclic groups (free groups, ``Z2 * Z2 * Z2``, ...)
and finitely generated abelian groups ``Z^r x Z_m``.

All group classes share one small protocol (see :class:`Group`): a normal
form is a hashable value, ``act(nf, letter)`` is right multiplication by a
generator letter, and ``token(nf)`` is the printable vertex name used in
Cayley graphs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, PresentationError

IDENTITY = "1"
MAX_TABLE = 64


class FiniteGroupTable:
    """A finite group given by its multiplication table.

    ``table[i][j]`` is the token of ``elements[i] * elements[j]``.  The
    identity must be called ``"1"``.  Group axioms are checked exhaustively.
    """

    def __init__(self, elements, table):
        elements = list(elements)
        n = len(elements)
        if n > MAX_TABLE:
            raise PresentationError("size", f"table groups are limited to {MAX_TABLE} elements, got {n}")
        if len(set(elements)) != n:
            raise PresentationError("elements", "duplicate element token")
        if IDENTITY not in elements:
            raise PresentationError("identity", "no element named '1'")
        for t in elements:
            if not isinstance(t, str) or not t or "." in t or t.endswith("^-1") or t != t.strip():
                raise PresentationError("elements", f"bad element token {t!r}")
        self.elements = elements
        self.index = {t: i for i, t in enumerate(elements)}
        if len(table) != n or any(len(row) != n for row in table):
            raise PresentationError("closure", "table must be square over the element list")
        try:
            T = np.array([[self.index[x] for x in row] for row in table], dtype=np.int64)
        except KeyError as exc:
            raise PresentationError("closure", f"product {exc.args[0]!r} is not an element") from None
        self.T = T
        e = self.index[IDENTITY]
        ar = np.arange(n)
        if not (np.array_equal(T[e], ar) and np.array_equal(T[:, e], ar)):
            raise PresentationError("identity", "'1' is not a two-sided identity")
        # T[T][i,j,k] = (ij)k and T[:, T][i,j,k] = i(jk)
        if not np.array_equal(T[T], T[:, T]):
            bad = np.argwhere(T[T] != T[:, T])[0]
            trip = tuple(elements[i] for i in bad)
            raise PresentationError("associativity", f"fails on {trip}")
        inv = np.full(n, -1)
        for i in range(n):
            hits = np.nonzero(T[i] == e)[0]
            if len(hits) != 1 or T[hits[0], i] != e:
                raise PresentationError("inverse", f"{elements[i]!r} has no two-sided inverse")
            inv[i] = hits[0]
        self.inv_idx = inv

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.index

    def mul(self, x: str, y: str) -> str:
        return self.elements[self.T[self.index[x], self.index[y]]]

    def inv(self, x: str) -> str:
        return self.elements[self.inv_idx[self.index[x]]]

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or set(data) != {"elements", "table"}:
            raise InputError("factor group must have exactly the keys 'elements' and 'table'")
        return cls(data["elements"], data["table"])

    def to_dict(self):
        return {"elements": list(self.elements),
                "table": [[self.elements[k] for k in row] for row in self.T.tolist()]}

    @classmethod
    def cyclic(cls, n: int, name: str = "c") -> "FiniteGroupTable":
        elems = [IDENTITY] + [name if k == 1 else f"{name}{k}" for k in range(1, n)]
        return cls(elems, [[elems[(i + j) % n] for j in range(n)] for i in range(n)])

    @classmethod
    def from_elements(cls, elements, mul) -> "FiniteGroupTable":
        """Tabulate a finite subset closed under ``mul``; tokens are kept."""
        elements = list(elements)
        return cls(elements, [[mul(x, y) for y in elements] for x in elements])


class SubgroupEmbedding:
    """A subgroup ``A`` of a table group with a left transversal.

    The transversal holds one representative per left coset ``tA``: the
    identity for ``A`` itself, otherwise the lexicographically least token.
    """

    def __init__(self, group: FiniteGroupTable, members):
        members = list(members)
        for a in members:
            if a not in group:
                raise PresentationError("closure", f"subgroup element {a!r} not in the group")
        mset = frozenset(members)
        if IDENTITY not in mset:
            raise PresentationError("identity", "subgroup lacks '1'")
        for a in mset:
            if group.inv(a) not in mset:
                raise PresentationError("inverse", f"subgroup not closed under inverse at {a!r}")
            for b in mset:
                if group.mul(a, b) not in mset:
                    raise PresentationError("closure", f"subgroup not closed: {a!r}*{b!r}")
        self.group = group
        self.members = mset
        self._decomp = {}
        reps = []
        for h in sorted(group.elements, key=lambda t: (t != IDENTITY, t)):
            if h in self._decomp:
                continue
            reps.append(h)
            for a in mset:
                self._decomp[group.mul(h, a)] = (h, a)
        self.transversal = tuple(reps)
        if len(reps) * len(mset) != len(group):
            raise InvariantError("transversal size mismatch")

    def __contains__(self, x):
        return x in self.members

    def decompose(self, h: str) -> tuple[str, str]:
        return self._decomp[h]


class InvariantError(PresentationError):
    def __init__(self, detail):
        super().__init__("lagrange", detail)


def coset_decompose(h: str, emb: SubgroupEmbedding) -> tuple[str, str]:
    """Unique ``(rep, remainder)`` with ``rep`` in the transversal,
    ``remainder`` in the subgroup and ``rep * remainder == h``."""
    if h not in emb.group:
        raise InputError(f"{h!r} is not an element of the group")
    return emb.decompose(h)


class Group:
    """Shared protocol for normal-form groups.

    Subclasses provide ``identity``, ``generators``, ``act``,
    ``inverse_letter``, ``letters`` and ``token``.
    """

    identity = None
    generators: list = []
    kind = "group"

    def act(self, nf, letter):
        raise NotImplementedError

    def inverse_letter(self, letter):
        raise NotImplementedError

    def letters(self, nf) -> tuple:
        raise NotImplementedError

    def token(self, nf) -> str:
        raise NotImplementedError

    def validate(self, nf) -> None:
        """Raise ``AssertionError`` if ``nf`` breaks a normal-form invariant."""

    def normalize(self, word):
        nf = self.identity
        for letter in word:
            nf = self.act(nf, letter)
        return nf

    def multiply(self, g, h):
        for letter in self.letters(h):
            g = self.act(g, letter)
        return g

    def inverse(self, g):
        return self.normalize(self.inverse_letter(x) for x in reversed(self.letters(g)))

    def symmetric_generators(self) -> list:
        out = []
        for s in self.generators:
            for x in (s, self.inverse_letter(s)):
                if x not in out:
                    out.append(x)
        return out

    def neighbours(self, nf) -> set:
        """Cayley neighbours ``nf * s`` for ``s`` in ``S ∪ S^-1``, minus ``nf``."""
        return cayley_neighbours(nf, self.generators, self)


def _tok(letters) -> str:
    return ".".join(letters) if letters else IDENTITY


@dataclass(frozen=True)
class AmalgamNormalForm:
    """``(x0, ..., xn, a)``: alternating transversal letters and a tail in ``A``."""

    syllables: tuple = ()
    tail: str = IDENTITY


@dataclass(frozen=True)
class HNNNormalForm:
    """``(x0, t^e0, ..., xn, t^en, h)`` stored as ``((x0, e0), ...)`` plus ``h``."""

    syllables: tuple = ()
    tail: str = IDENTITY


def _check_phi(A: SubgroupEmbedding, B: SubgroupEmbedding, phi: dict):
    if set(phi) != set(A.members):
        raise PresentationError("bijection", "phi must be defined exactly on A")
    if set(phi.values()) != set(B.members) or len(set(phi.values())) != len(phi):
        raise PresentationError("bijection", "phi must map A bijectively onto B")
    GA, GB = A.group, B.group
    for a in A.members:
        for b in A.members:
            if phi[GA.mul(a, b)] != GB.mul(phi[a], phi[b]):
                raise PresentationError("homomorphism", f"phi({a}*{b}) != phi({a})*phi({b})")


class AmalgamPresentation(Group):
    """``H *_A J`` with ``phi: A -> B``; letters are element tokens of H or J."""

    kind = "amalgam"

    def __init__(self, H, J, A, B, phi, generators=None):
        self.H, self.J = H, J
        self.A = A if isinstance(A, SubgroupEmbedding) else SubgroupEmbedding(H, A)
        self.B = B if isinstance(B, SubgroupEmbedding) else SubgroupEmbedding(J, B)
        self.phi = dict(phi)
        _check_phi(self.A, self.B, self.phi)
        self.phi_inv = {b: a for a, b in self.phi.items()}
        clash = (set(H.elements) & set(J.elements)) - {IDENTITY}
        if clash:
            raise PresentationError("elements", f"H and J share tokens {sorted(clash)}")
        if generators is None:
            generators = [x for x in H.elements + J.elements if x != IDENTITY]
        for s in generators:
            if s not in H and s not in J:
                raise PresentationError("generators", f"unknown generator {s!r}")
        self.generators = list(generators)
        self.identity = AmalgamNormalForm()

    def side(self, x):
        return "H" if x in self.H.index else "J"

    def _factor(self, side):
        if side == "H":
            return self.H, self.A, (lambda a: a), (lambda a: a)
        return self.J, self.B, (lambda a: self.phi[a]), (lambda b: self.phi_inv[b])

    def act(self, nf: AmalgamNormalForm, h: str) -> AmalgamNormalForm:
        """Right action of one factor element, following the case table of
        the normal-form lemma (and its mirror image for ``J``)."""
        side = "H" if h in self.H.index else "J"
        if side == "J" and h not in self.J.index:
            raise InputError(f"{h!r} is not a letter of this amalgam")
        G, sub, into, back = self._factor(side)
        a = into(nf.tail)
        syl = nf.syllables
        if h in sub:
            return AmalgamNormalForm(syl, back(G.mul(a, h)))
        if not syl or self.side(syl[-1]) != side:
            rep, rem = sub.decompose(G.mul(a, h))
            return AmalgamNormalForm(syl + (rep,), back(rem))
        y = G.mul(G.mul(syl[-1], a), h)
        if y in sub:
            return AmalgamNormalForm(syl[:-1], back(y))
        rep, rem = sub.decompose(y)
        return AmalgamNormalForm(syl[:-1] + (rep,), back(rem))

    def inverse_letter(self, x):
        return self.H.inv(x) if x in self.H.index else self.J.inv(x)

    def letters(self, nf):
        return nf.syllables + ((nf.tail,) if nf.tail != IDENTITY else ())

    def token(self, nf):
        return _tok(self.letters(nf))

    def validate(self, nf):
        assert nf.tail in self.A.members, f"tail {nf.tail!r} not in A"
        prev = None
        for x in nf.syllables:
            s = self.side(x)
            sub = self.A if s == "H" else self.B
            assert x != IDENTITY and x in sub.transversal, f"{x!r} is not a non-trivial representative"
            assert s != prev, "consecutive letters from the same factor"
            prev = s

    def to_dict(self):
        return {"kind": "amalgam", "H": self.H.to_dict(), "J": self.J.to_dict(),
                "A": sorted(self.A.members), "B": sorted(self.B.members),
                "phi": dict(sorted(self.phi.items())), "generators": list(self.generators)}


class HNNPresentation(Group):
    """``H *^A = <H, t | t a t^-1 = phi(a)>``.

    In a normal form the letter before ``t`` is a left-coset representative
    of ``B`` and the letter before ``t^-1`` one of ``A``; those are exactly
    the letters that cannot be pushed past the stable letter.
    """

    kind = "hnn"

    def __init__(self, H, A, B, phi, stable="t", generators=None):
        self.H = H
        self.A = A if isinstance(A, SubgroupEmbedding) else SubgroupEmbedding(H, A)
        self.B = B if isinstance(B, SubgroupEmbedding) else SubgroupEmbedding(H, B)
        self.phi = dict(phi)
        _check_phi(self.A, self.B, self.phi)
        self.phi_inv = {b: a for a, b in self.phi.items()}
        if stable in H.index or "." in stable or not stable:
            raise PresentationError("stable_letter", f"stable letter {stable!r} clashes with H")
        self.t = stable
        self.t_inv = stable + "^-1"
        if generators is None:
            generators = [x for x in H.elements if x != IDENTITY] + [stable]
        for s in generators:
            if s not in H and s not in (self.t, self.t_inv):
                raise PresentationError("generators", f"unknown generator {s!r}")
        self.generators = list(generators)
        self.identity = HNNNormalForm()

    def act(self, nf: HNNNormalForm, letter: str) -> HNNNormalForm:
        syl, h = nf.syllables, nf.tail
        if letter in self.H.index:
            return HNNNormalForm(syl, self.H.mul(h, letter))
        if letter == self.t:
            # h t = r b t = r t phi^-1(b)
            r, b = self.B.decompose(h)
            a = self.phi_inv[b]
            if r == IDENTITY and syl and syl[-1][1] == -1:
                return HNNNormalForm(syl[:-1], self.H.mul(syl[-1][0], a))
            return HNNNormalForm(syl + ((r, 1),), a)
        if letter == self.t_inv:
            # h t^-1 = r a t^-1 = r t^-1 phi(a)
            r, a = self.A.decompose(h)
            b = self.phi[a]
            if r == IDENTITY and syl and syl[-1][1] == 1:
                return HNNNormalForm(syl[:-1], self.H.mul(syl[-1][0], b))
            return HNNNormalForm(syl + ((r, -1),), b)
        raise InputError(f"{letter!r} is not a letter of this HNN extension")

    def inverse_letter(self, x):
        if x == self.t:
            return self.t_inv
        if x == self.t_inv:
            return self.t
        return self.H.inv(x)

    def letters(self, nf):
        out = []
        for x, e in nf.syllables:
            if x != IDENTITY:
                out.append(x)
            out.append(self.t if e == 1 else self.t_inv)
        if nf.tail != IDENTITY:
            out.append(nf.tail)
        return tuple(out)

    def token(self, nf):
        return _tok(self.letters(nf))

    def validate(self, nf):
        assert nf.tail in self.H, f"tail {nf.tail!r} not in H"
        prev = None
        for x, e in nf.syllables:
            assert e in (1, -1)
            reps = self.B.transversal if e == 1 else self.A.transversal
            assert x in reps, f"{x!r} before t^{e} is not a coset representative"
            assert not (x == IDENTITY and prev == -e), "pinch t^e, 1, t^-e"
            prev = e

    def to_dict(self):
        return {"kind": "hnn", "H": self.H.to_dict(), "A": sorted(self.A.members),
                "B": sorted(self.B.members), "phi": dict(sorted(self.phi.items())),
                "stable_letter": self.t, "generators": list(self.generators)}


class FreeProductOfCyclics(Group):
    """Free product of cyclic groups; order 0 means infinite cyclic.

    A normal form is a tuple of ``(generator_index, exponent)`` syllables with
    no two consecutive syllables on the same generator.
    """

    kind = "free"

    def __init__(self, names, orders):
        if len(names) != len(orders) or len(set(names)) != len(names):
            raise PresentationError("generators", "names and orders must match and be distinct")
        for nm, o in zip(names, orders):
            if not nm or "." in nm or "^" in nm or nm == IDENTITY:
                raise PresentationError("generators", f"bad generator name {nm!r}")
            if o == 1 or o < 0:
                raise PresentationError("order", f"generator {nm!r} has order {o}")
        self.names = list(names)
        self.orders = list(orders)
        self.pos = {nm: i for i, nm in enumerate(names)}
        self.generators = list(names)
        self.identity = ()

    def _parse(self, letter):
        if letter.endswith("^-1"):
            return self.pos[letter[:-3]], -1
        return self.pos[letter], 1

    def _norm(self, i, e):
        o = self.orders[i]
        return e % o if o else e

    def act(self, nf, letter):
        try:
            i, e = self._parse(letter)
        except KeyError:
            raise InputError(f"{letter!r} is not a letter of this free product") from None
        if nf and nf[-1][0] == i:
            e2 = self._norm(i, nf[-1][1] + e)
            return nf[:-1] + ((i, e2),) if e2 else nf[:-1]
        return nf + ((i, self._norm(i, e)),)

    def inverse_letter(self, x):
        i, e = self._parse(x)
        if self.orders[i] == 2:
            return self.names[i]
        return self.names[i] if e == -1 else self.names[i] + "^-1"

    def letters(self, nf):
        out = []
        for i, e in nf:
            o = self.orders[i]
            if o and e > o // 2:
                e -= o
            out += [self.names[i] if e > 0 else self.names[i] + "^-1"] * abs(e)
        return tuple(out)

    def token(self, nf):
        parts = []
        for i, e in nf:
            parts.append(self.names[i] if e == 1 else f"{self.names[i]}^{e}")
        return _tok(parts)

    def validate(self, nf):
        prev = None
        for i, e in nf:
            assert i != prev and e != 0
            if self.orders[i]:
                assert 0 < e < self.orders[i]
            prev = i

    def to_dict(self):
        return {"kind": "free", "generators": list(self.names), "orders": list(self.orders)}


class FreeAbelianGroup(Group):
    """``Z^r x Z_m1 x ...``: normal forms are integer vectors.

    ``moduli[i] == 0`` marks a free coordinate.  ``generators`` maps a letter
    name to its vector.
    """

    kind = "abelian"

    def __init__(self, moduli, generators: dict):
        self.moduli = tuple(int(m) for m in moduli)
        if any(m < 0 or m == 1 for m in self.moduli):
            raise PresentationError("order", "moduli must be 0 (free) or >= 2")
        self.vectors = {}
        for nm, vec in generators.items():
            if len(vec) != len(self.moduli) or not nm or "^" in nm:
                raise PresentationError("generators", f"bad generator {nm!r}")
            self.vectors[nm] = self._reduce(tuple(int(x) for x in vec))
            self.vectors[nm + "^-1"] = self._reduce(tuple(-int(x) for x in vec))
        self.generators = list(generators)
        self.identity = tuple(0 for _ in self.moduli)

    def _reduce(self, v):
        return tuple(x % m if m else x for x, m in zip(v, self.moduli))

    def act(self, nf, letter):
        try:
            vec = self.vectors[letter]
        except KeyError:
            raise InputError(f"{letter!r} is not a letter of this abelian group") from None
        return self._reduce(tuple(a + b for a, b in zip(nf, vec)))

    def multiply(self, g, h):
        return self._reduce(tuple(a + b for a, b in zip(g, h)))

    def inverse(self, g):
        return self._reduce(tuple(-a for a in g))

    def inverse_letter(self, x):
        return x[:-3] if x.endswith("^-1") else x + "^-1"

    def letters(self, nf):
        # unit coordinate generators are not guaranteed; express via a
        # coordinate basis only when one exists
        basis = {}
        for nm in self.generators:
            v = self.vectors[nm]
            nz = [i for i, x in enumerate(v) if x]
            if len(nz) == 1 and v[nz[0]] == 1:
                basis.setdefault(nz[0], nm)
        if len(basis) < len(self.moduli):
            raise NotImplementedError("letters() needs unit coordinate generators")
        out = []
        for i, x in enumerate(nf):
            nm = basis[i]
            out += [nm if x > 0 else nm + "^-1"] * abs(x)
        return tuple(out)

    def token(self, nf):
        return ",".join(str(x) for x in nf)

    def to_dict(self):
        return {"kind": "abelian", "moduli": list(self.moduli),
                "generators": {nm: list(self.vectors[nm]) for nm in self.generators}}


def act_amalgam(nf: AmalgamNormalForm, h: str, pres: AmalgamPresentation) -> AmalgamNormalForm:
    return pres.act(nf, h)


def act_hnn(nf: HNNNormalForm, letter: str, pres: HNNPresentation) -> HNNNormalForm:
    return pres.act(nf, letter)


def normalize(word, pres: Group):
    """Normal form of a word: fold of the right action from the identity."""
    return pres.normalize(word)


def cayley_neighbours(nf, S, pres: Group) -> set:
    out = set()
    for s in S:
        for x in (s, pres.inverse_letter(s)):
            out.add(pres.act(nf, x))
    out.discard(nf)
    return out


# -- loading ---------------------------------------------------------------

_KEYS = {
    "amalgam": {"kind", "H", "J", "A", "B", "phi", "generators"},
    "hnn": {"kind", "H", "A", "B", "phi", "generators", "stable_letter"},
    "free": {"kind", "generators", "orders"},
    "abelian": {"kind", "moduli", "generators"},
}
_REQUIRED = {
    "amalgam": {"kind", "H", "J", "A", "B", "phi"},
    "hnn": {"kind", "H", "A", "B", "phi"},
    "free": {"kind", "generators"},
    "abelian": {"kind", "moduli", "generators"},
}


def presentation_from_dict(data) -> Group:
    if not isinstance(data, dict) or data.get("kind") not in _KEYS:
        raise InputError("presentation needs 'kind' in " + ", ".join(sorted(_KEYS)))
    kind = data["kind"]
    extra = set(data) - _KEYS[kind]
    if extra:
        raise InputError(f"unknown presentation keys {sorted(extra)}")
    missing = _REQUIRED[kind] - set(data)
    if missing:
        raise InputError(f"missing presentation keys {sorted(missing)}")
    if kind == "amalgam":
        H = FiniteGroupTable.from_dict(data["H"])
        J = FiniteGroupTable.from_dict(data["J"])
        return AmalgamPresentation(H, J, data["A"], data["B"], data["phi"], data.get("generators"))
    if kind == "hnn":
        H = FiniteGroupTable.from_dict(data["H"])
        return HNNPresentation(H, data["A"], data["B"], data["phi"],
                               data.get("stable_letter", "t"), data.get("generators"))
    if kind == "free":
        gens = data["generators"]
        return FreeProductOfCyclics(gens, data.get("orders", [0] * len(gens)))
    return FreeAbelianGroup(data["moduli"], data["generators"])


def load_presentation(path) -> Group:
    path = Path(path)
    if not path.exists():
        bundled = Path(__file__).parent / "data" / path.name
        if bundled.exists():
            path = bundled
        else:
            raise InputError(f"presentation file {str(path)!r} not found")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from None
    return presentation_from_dict(data)


def bundled_presentations() -> list[str]:
    return sorted(p.name for p in (Path(__file__).parent / "data").glob("*.json"))
