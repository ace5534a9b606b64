"""Group families with canonical normal forms.

Every element is a plain hashable Python value (int or nested tuples) in a
normal form that is unique per group element, so ``g == h`` as Python values
iff they are equal in the group.  That is what makes the identity coefficient
of a group ring element, and hence every trace computed in this package,
exactly decidable.

Normal forms by family:

* ``finite``       -- element index into the multiplication table
* ``free_abelian`` -- tuple of ``n`` ints
* ``free``         -- tuple of signed generator indices (``+i`` is generator
  ``i`` counted from 1, ``-i`` its inverse), freely reduced
* ``lamplighter``  -- ``(lamps, shift)`` with ``lamps`` a strictly increasing
  tuple of ints
* ``direct_product`` -- tuple of child elements
* ``free_product`` -- tuple of ``(factor_index, child_element)`` syllables,
  alternating factors, no identity syllables
"""
import itertools
import random


class GroupError(ValueError):
    """Invalid group data or an element that does not belong to a context."""


class GroupContext:
    """Base class for a group family.  Instances are immutable."""

    family = None

    @property
    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def is_element(self, g):
        raise NotImplementedError

    def normalize(self, g):
        """Bring a possibly non-reduced representative into normal form."""
        return g

    def word_length(self, g):
        raise NotImplementedError

    def sort_key(self, g):
        return g

    def check(self, g):
        if not self.is_element(g):
            raise GroupError(f"{g!r} is not a {self.family} element of {self!r}")
        return g

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        raise NotImplementedError


def compose(ctx, g, h):
    """Normal form of ``g*h`` in ``ctx``; raises GroupError on mismatch."""
    return ctx.mul(ctx.check(g), ctx.check(h))


def invert(ctx, g):
    """Normal form of ``g**-1`` in ``ctx``."""
    return ctx.inv(ctx.check(g))


class FiniteGroup(GroupContext):
    """A finite group given by its multiplication table.

    ``table[i][j]`` is the index of ``g_i * g_j``.
    """

    family = "finite"

    def __init__(self, table, identity=None, check_triples=2000, seed=0):
        table = tuple(tuple(int(x) for x in row) for row in table)
        order = len(table)
        if order == 0 or any(len(row) != order for row in table):
            raise GroupError("multiplication table must be square and non-empty")
        for row in table:
            for x in row:
                if not 0 <= x < order:
                    raise GroupError(f"table entry {x} out of range")
        if identity is None:
            identity = next(
                (e for e in range(order)
                 if all(table[e][g] == g and table[g][e] == g for g in range(order))),
                None,
            )
            if identity is None:
                raise GroupError("table has no two-sided identity")
        elif any(table[identity][g] != g or table[g][identity] != g for g in range(order)):
            raise GroupError(f"{identity} is not a two-sided identity")
        inverse = []
        for g in range(order):
            row = table[g]
            hits = [h for h in range(order) if row[h] == identity]
            if len(hits) != 1 or table[hits[0]][g] != identity:
                raise GroupError(f"element {g} has no unique two-sided inverse")
            inverse.append(hits[0])
        self.table = table
        self.order = order
        self._identity = identity
        self.inverse = tuple(inverse)
        self._check_associative(check_triples, seed)

    def _check_associative(self, n, seed):
        t = self.table
        if self.order ** 3 <= n:
            triples = itertools.product(range(self.order), repeat=3)
        else:
            rng = random.Random(seed)
            triples = ((rng.randrange(self.order), rng.randrange(self.order),
                        rng.randrange(self.order)) for _ in range(n))
        for a, b, c in triples:
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupError(f"table is not associative at {(a, b, c)}")

    @classmethod
    def cyclic(cls, n):
        return cls([[(i + j) % n for j in range(n)] for i in range(n)], identity=0)

    @classmethod
    def from_permutations(cls, perms):
        """Table of the group formed by an explicit, closed list of permutations.

        Product convention: ``(p*q)(x) = q(p(x))``, i.e. apply ``p`` first.
        """
        perms = [tuple(p) for p in perms]
        index = {p: i for i, p in enumerate(perms)}
        table = []
        for p in perms:
            row = []
            for q in perms:
                pq = tuple(q[p[x]] for x in range(len(p)))
                if pq not in index:
                    raise GroupError("permutation list is not closed under composition")
                row.append(index[pq])
            table.append(row)
        return cls(table)

    @classmethod
    def symmetric(cls, n):
        return cls.from_permutations(sorted(itertools.permutations(range(n))))

    @property
    def identity(self):
        return self._identity

    def elements(self):
        return range(self.order)

    def mul(self, g, h):
        return self.table[g][h]

    def inv(self, g):
        return self.inverse[g]

    def is_element(self, g):
        return isinstance(g, int) and not isinstance(g, bool) and 0 <= g < self.order

    def word_length(self, g):
        return 0 if g == self._identity else 1

    def _key(self):
        return (self.table, self._identity)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


class FreeAbelianGroup(GroupContext):
    """The group Z^n, written multiplicatively; elements are exponent vectors."""

    family = "free_abelian"

    def __init__(self, rank):
        if rank < 0:
            raise GroupError("rank must be non-negative")
        self.rank = int(rank)
        self._identity = (0,) * self.rank

    @property
    def identity(self):
        return self._identity

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def is_element(self, g):
        return (isinstance(g, tuple) and len(g) == self.rank
                and all(isinstance(a, int) and not isinstance(a, bool) for a in g))

    def word_length(self, g):
        return sum(abs(a) for a in g)

    def format(self, g):
        names = ["z"] if self.rank == 1 else (list("xyz") if self.rank <= 3
                                              else [f"x{i + 1}" for i in range(self.rank)])
        parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, g) if e]
        return "*".join(parts) if parts else "1"

    def generator(self, i):
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def _key(self):
        return self.rank

    def __repr__(self):
        return f"FreeAbelianGroup({self.rank})"


class FreeGroup(GroupContext):
    family = "free"

    def __init__(self, rank=None, generators=None):
        if generators is None:
            if rank is None:
                raise GroupError("need a rank or generator names")
            generators = [chr(ord("a") + i) if rank <= 26 else f"x{i}" for i in range(rank)]
        generators = tuple(generators)
        if rank is not None and rank != len(generators):
            raise GroupError("rank does not match the number of generator names")
        if len(generators) < 1:
            raise GroupError("free group needs rank >= 1")
        if len(set(generators)) != len(generators):
            raise GroupError("generator names must be distinct")
        self.generators = generators
        self.rank = len(generators)

    @property
    def identity(self):
        return ()

    def gen(self, name_or_index, power=1):
        """The element ``x**power`` for a single generator ``x``."""
        if isinstance(name_or_index, str):
            i = self.generators.index(name_or_index) + 1
        else:
            i = int(name_or_index) + 1
        s = i if power > 0 else -i
        return (s,) * abs(power)

    def mul(self, g, h):
        i = 0
        n = min(len(g), len(h))
        while i < n and g[-1 - i] == -h[i]:
            i += 1
        if i == 0:
            return g + h
        return g[:len(g) - i] + h[i:]

    def inv(self, g):
        return tuple(-s for s in reversed(g))

    def normalize(self, g):
        out = []
        for s in g:
            if out and out[-1] == -s:
                out.pop()
            else:
                out.append(s)
        return tuple(out)

    def is_element(self, g):
        if not isinstance(g, tuple):
            return False
        for k, s in enumerate(g):
            if not isinstance(s, int) or s == 0 or abs(s) > self.rank:
                return False
            if k and g[k - 1] == -s:
                return False
        return True

    def word_length(self, g):
        return len(g)

    def sort_key(self, g):
        return (len(g), g)

    def parse(self, word):
        """Parse e.g. ``"a b^-1 a"`` or ``"ab^-1a"`` (single-letter names)."""
        out = []
        tokens = word.replace("*", " ").split()
        if len(tokens) == 1 and all(len(x) == 1 for x in self.generators):
            tokens = _split_letters(tokens[0])
        for tok in tokens:
            name, _, power = tok.partition("^")
            out.extend(self.gen(name, int(power) if power else 1))
        return self.normalize(tuple(out))

    def format(self, g):
        parts = []
        for s in g:
            name = self.generators[abs(s) - 1]
            parts.append(name if s > 0 else name + "^-1")
        return " ".join(parts) if parts else "e"

    def _key(self):
        return self.generators

    def __repr__(self):
        return f"FreeGroup({list(self.generators)})"


def _split_letters(s):
    out = []
    i = 0
    while i < len(s):
        if s[i + 1:i + 3] == "^-":
            j = i + 3
            while j < len(s) and s[j].isdigit():
                j += 1
            out.append(s[i:j])
            i = j
        elif s[i + 1:i + 2] == "^":
            j = i + 2
            while j < len(s) and s[j].isdigit():
                j += 1
            out.append(s[i:j])
            i = j
        else:
            out.append(s[i])
            i += 1
    return out


class LamplighterGroup(GroupContext):
    """The lamplighter group (+_Z Z/2) x| Z.

    ``(S, m)`` is the lamp configuration ``S`` (finite set of lit positions)
    followed by the shift ``t**m``.  Conjugation by ``t`` moves lamp ``j`` to
    ``j + 1``, so ``(S1, m1)(S2, m2) = (S1 ^ (S2 + m1), m1 + m2)``.
    """

    family = "lamplighter"

    E0 = ((0,), 0)
    T = ((), 1)

    @property
    def identity(self):
        return ((), 0)

    @classmethod
    def element(cls, lamps=(), shift=0):
        return (tuple(sorted(set(lamps))), int(shift))

    def mul(self, g, h):
        s1, m1 = g
        s2, m2 = h
        if not s2:
            return (s1, m1 + m2)
        if not s1:
            if m1 == 0:
                return h
            return (tuple(x + m1 for x in s2), m1 + m2)
        lamps = set(s1)
        lamps.symmetric_difference_update(x + m1 for x in s2)
        return (tuple(sorted(lamps)), m1 + m2)

    def inv(self, g):
        s, m = g
        return (tuple(x - m for x in s), -m)

    def normalize(self, g):
        s, m = g
        lit = set()
        for x in s:
            lit ^= {x}
        return (tuple(sorted(lit)), m)

    def is_element(self, g):
        if not (isinstance(g, tuple) and len(g) == 2):
            return False
        s, m = g
        if not isinstance(s, tuple) or not isinstance(m, int):
            return False
        return all(isinstance(x, int) for x in s) and all(a < b for a, b in zip(s, s[1:]))

    def word_length(self, g):
        # word length for the generating set {t, e0}
        s, m = g
        if not s:
            return abs(m)
        lo = min(s[0], 0, m)
        hi = max(s[-1], 0, m)
        walk = min(-lo + (hi - lo) + (hi - m), hi + (hi - lo) + (m - lo))
        return len(s) + walk

    def sort_key(self, g):
        return (g[1], len(g[0]), g[0])

    def markov_support(self):
        """The four elements e0*t, t, (e0*t)^-1, t^-1."""
        a = self.mul(self.E0, self.T)
        return [a, self.T, self.inv(a), self.inv(self.T)]

    def _key(self):
        return ()

    def __repr__(self):
        return "LamplighterGroup()"


class DirectProduct(GroupContext):
    family = "direct_product"

    def __init__(self, factors):
        self.factors = tuple(factors)
        if not self.factors:
            raise GroupError("direct product needs at least one factor")
        self._identity = tuple(f.identity for f in self.factors)

    @property
    def identity(self):
        return self._identity

    def mul(self, g, h):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, g, h))

    def inv(self, g):
        return tuple(f.inv(a) for f, a in zip(self.factors, g))

    def normalize(self, g):
        return tuple(f.normalize(a) for f, a in zip(self.factors, g))

    def is_element(self, g):
        return (isinstance(g, tuple) and len(g) == len(self.factors)
                and all(f.is_element(a) for f, a in zip(self.factors, g)))

    def word_length(self, g):
        return sum(f.word_length(a) for f, a in zip(self.factors, g))

    def sort_key(self, g):
        return tuple(f.sort_key(a) for f, a in zip(self.factors, g))

    def _key(self):
        return self.factors

    def __repr__(self):
        return f"DirectProduct({list(self.factors)})"


class FreeProduct(GroupContext):
    family = "free_product"

    def __init__(self, factors):
        flat = []
        for f in factors:
            if isinstance(f, FreeProduct):
                flat.extend(f.factors)
            else:
                flat.append(f)
        if len(flat) < 1:
            raise GroupError("free product needs at least one factor")
        self.factors = tuple(flat)

    @property
    def identity(self):
        return ()

    def syllable(self, index, g):
        """Embed an element of factor ``index`` as a free product element."""
        f = self.factors[index]
        f.check(g)
        return () if g == f.identity else ((index, g),)

    def mul(self, g, h):
        out = list(g)
        for k, (j, b) in enumerate(h):
            if out and out[-1][0] == j:
                i, a = out.pop()
                f = self.factors[i]
                c = f.mul(a, b)
                if c != f.identity:
                    out.append((i, c))
                    out.extend(h[k + 1:])
                    break
            else:
                out.extend(h[k:])
                break
        return tuple(out)

    def inv(self, g):
        return tuple((i, self.factors[i].inv(a)) for i, a in reversed(g))

    def normalize(self, g):
        out = ()
        for i, a in g:
            out = self.mul(out, self.syllable(i, self.factors[i].normalize(a)))
        return out

    def is_element(self, g):
        if not isinstance(g, tuple):
            return False
        prev = None
        for syl in g:
            if not (isinstance(syl, tuple) and len(syl) == 2):
                return False
            i, a = syl
            if not isinstance(i, int) or not 0 <= i < len(self.factors) or i == prev:
                return False
            f = self.factors[i]
            if not f.is_element(a) or a == f.identity:
                return False
            prev = i
        return True

    def word_length(self, g):
        return sum(max(1, self.factors[i].word_length(a)) for i, a in g)

    def sort_key(self, g):
        return (len(g), tuple((i, self.factors[i].sort_key(a)) for i, a in g))

    def _key(self):
        return self.factors

    def __repr__(self):
        return f"FreeProduct({list(self.factors)})"
