"""A vectorized finite-group adapter and brute-force subgroup machinery.

Groups are given by index arithmetic: ``mul`` and ``inv`` act elementwise on
integer numpy arrays.  Subgroups are boolean membership masks of length
``size``.  Everything here is computed from the group operation alone.
"""

from math import lcm

import numpy as np

from .twisted import abelian_type_from_counts


class FiniteGroupTable:
    def __init__(self, size, mul, inv, identity=0, name=None):
        self.size = int(size)
        self._mul = mul
        self._inv = inv
        self.identity = int(identity)
        self.name = name

    def __repr__(self):
        return f"FiniteGroupTable(size={self.size}, name={self.name!r})"

    @classmethod
    def from_table(cls, table, name=None):
        """From an explicit Cayley table with table[a, b] = a*b."""
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        ident = int(np.flatnonzero((table == np.arange(n)).all(axis=1))[0])
        inv = np.empty(n, dtype=np.int64)
        rows, cols = np.nonzero(table == ident)
        inv[rows] = cols
        return cls(n, lambda a, b: table[a, b], lambda a: inv[a], ident, name)

    @classmethod
    def from_context(cls, ctx):
        return cls(ctx.order, ctx.add, ctx.neg, 0, name=f"G_{''.join(map(str, ctx.e))}")

    def mul(self, a, b):
        scalar = np.ndim(a) == 0 and np.ndim(b) == 0
        out = self._mul(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return int(out) if scalar else out

    def inv(self, a):
        scalar = np.ndim(a) == 0
        out = self._inv(np.asarray(a, dtype=np.int64))
        return int(out) if scalar else out

    @property
    def all(self):
        return np.arange(self.size, dtype=np.int64)

    def relabel(self, perm):
        """Isomorphic copy in which old element g is called perm[g]."""
        perm = np.asarray(perm, dtype=np.int64)
        back = np.empty_like(perm)
        back[perm] = np.arange(len(perm))
        return FiniteGroupTable(
            self.size,
            lambda a, b: perm[self._mul(back[a], back[b])],
            lambda a: perm[self._inv(back[a])],
            int(perm[self.identity]),
            name=f"relabelled {self.name}",
        )

    def check_axioms(self, samples=100_000, rng=None):
        """Identity and inverse laws exhaustively; associativity exhaustively
        for size <= 256, else on random triples.  Returns a list of failures."""
        problems = []
        g = self.all
        e = self.identity
        if not (np.array_equal(self.mul(g, e), g) and np.array_equal(self.mul(e, g), g)):
            problems.append("identity law")
        if not (np.all(self.mul(g, self.inv(g)) == e) and np.all(self.mul(self.inv(g), g) == e)):
            problems.append("inverse law")
        if self.size <= 256:
            a, b = np.meshgrid(g, g, indexing="ij")
            ab = self.mul(a, b)
            for c in g:
                if not np.array_equal(self.mul(ab, c), self.mul(a, self.mul(b, c))):
                    problems.append("associativity")
                    break
        else:
            rng = np.random.default_rng(rng)
            a, b, c = rng.integers(0, self.size, size=(3, samples))
            if not np.array_equal(self.mul(self.mul(a, b), c), self.mul(a, self.mul(b, c))):
                problems.append("associativity")
        return problems

    # -- derived operations ----------------------------------------------

    def commutator(self, x, y):
        """[x, y] = x^-1 y^-1 x y."""
        return self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))

    def conjugate(self, x, s):
        """s^-1 x s."""
        return self.mul(self.mul(self.inv(s), x), s)

    def power(self, x, m):
        x = np.asarray(x, dtype=np.int64)
        out = np.full(x.shape, self.identity, dtype=np.int64)
        base = x
        while m:
            if m & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            m >>= 1
        return out

    def element_orders(self, elements=None):
        x = self.all if elements is None else np.asarray(elements, dtype=np.int64)
        orders = np.zeros(len(x), dtype=np.int64)
        cur = x.copy()
        k = 1
        while True:
            hit = (cur == self.identity) & (orders == 0)
            orders[hit] = k
            if orders.all():
                return orders
            k += 1
            if k > self.size:
                raise RuntimeError("element order exceeds group size")
            cur = self.mul(cur, x)

    def exponent(self):
        return lcm(*(int(o) for o in np.unique(self.element_orders())))

    # -- subgroups ---------------------------------------------------------

    def mask(self, elements):
        m = np.zeros(self.size, dtype=bool)
        m[np.asarray(elements, dtype=np.int64)] = True
        return m

    def generate(self, gens, members=None):
        """Membership mask of the subgroup generated by gens (together with
        the subgroup ``members`` if given)."""
        if members is None:
            members = np.zeros(self.size, dtype=bool)
            members[self.identity] = True
        else:
            members = members.copy()
        used = []
        for g in np.unique(np.asarray(gens, dtype=np.int64)):
            if members[g]:
                continue
            used.append(int(g))
            gl = np.array(used, dtype=np.int64)
            frontier = np.flatnonzero(members)
            while len(frontier):
                prod = np.unique(self.mul(frontier[:, None], gl[None, :]).ravel())
                frontier = prod[~members[prod]]
                members[frontier] = True
        return members

    def generators_of(self, members):
        """Greedy generating list of a subgroup, in index order."""
        cur = np.zeros(self.size, dtype=bool)
        cur[self.identity] = True
        used = []
        for g in np.flatnonzero(members):
            if not cur[g]:
                used.append(int(g))
                cur = self.generate([g], cur)
        return np.array(used, dtype=np.int64)

    def normal_closure(self, members, gens):
        """Smallest normal subgroup containing the subgroup ``members``;
        ``gens`` generate the whole group."""
        gens = np.asarray(gens, dtype=np.int64)
        members = members.copy()
        while True:
            el = np.flatnonzero(members)
            conj = np.unique(self.conjugate(el[:, None], gens[None, :]).ravel())
            new = conj[~members[conj]]
            if not len(new):
                return members
            members = self.generate(new, members)

    def is_abelian(self, members=None):
        gens = self.generators_of(members) if members is not None else self.generators_of(np.ones(self.size, bool))
        if len(gens) < 2:
            return True
        a, b = np.meshgrid(gens, gens, indexing="ij")
        return bool(np.array_equal(self.mul(a, b), self.mul(b, a)))

    def center(self, gens):
        g = self.all
        ok = np.ones(self.size, dtype=bool)
        for s in np.asarray(gens, dtype=np.int64):
            ok &= self.mul(g, s) == self.mul(s, g)
        return ok

    def commutator_subgroup(self, a_members, gens):
        """[A, G] for a normal subgroup A, with G generated by gens."""
        gens = np.asarray(gens, dtype=np.int64)
        el = np.flatnonzero(a_members)
        comms = np.unique(self.commutator(el[:, None], gens[None, :]).ravel())
        return self.normal_closure(self.generate(comms), gens)

    def lower_central_series(self, gens, max_len=64):
        series = [np.ones(self.size, dtype=bool)]
        while len(series) <= max_len:
            nxt = self.commutator_subgroup(series[-1], gens)
            if np.array_equal(nxt, series[-1]):
                break
            series.append(nxt)
            if nxt.sum() == 1:
                break
        return series

    def nilpotency_class(self, gens):
        series = self.lower_central_series(gens)
        if series[-1].sum() != 1:
            return None
        return len(series) - 1

    def derived_subgroup(self, gens):
        return self.commutator_subgroup(np.ones(self.size, dtype=bool), gens)

    def frattini_by_squares(self):
        """Generated by all squares; equals the Frattini subgroup for
        finite 2-groups (the only groups used here)."""
        sq = np.unique(self.mul(self.all, self.all))
        return self.generate(sq)

    def abelian_type(self, members):
        """Invariant factors of an abelian 2-subgroup, or None when the
        subgroup is non-abelian."""
        if not self.is_abelian(members):
            return None
        el = np.flatnonzero(members)
        counts = [1]
        cur = el
        while counts[-1] < len(el):
            cur = self.mul(cur, cur)
            counts.append(int(np.count_nonzero(cur == self.identity)))
            if len(counts) > 64:
                raise ValueError("not a 2-group")
        return abelian_type_from_counts(counts)
