"""The twisted groups G_e = G_{e_1} + ... + G_{e_n} on (F4 x F4)^n.

A block (x, y) adds by (x, y) + (x', y') = (x + x', y + y' + eps*(x x')^2).
Elements are handled by their index: block i contributes the base-16 digit
4*code(x_i) + code(y_i), block 1 most significant.  Every operation here
accepts a scalar index or an integer numpy array of indices.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import gf4


def _block_add_table(eps):
    t = np.zeros((16, 16), dtype=np.int64)
    for d1 in range(16):
        x1, y1 = divmod(d1, 4)
        for d2 in range(16):
            x2, y2 = divmod(d2, 4)
            twist = gf4.square(gf4.mul(x1, x2)) if eps else 0
            t[d1, d2] = 4 * (x1 ^ x2) + (y1 ^ y2 ^ twist)
    return t


def _block_neg_table(eps):
    t = np.zeros(16, dtype=np.int64)
    for d in range(16):
        x, y = divmod(d, 4)
        t[d] = 4 * x + (y ^ (x if eps else 0))
    return t


BLOCK_ADD = (_block_add_table(0), _block_add_table(1))
BLOCK_NEG = (_block_neg_table(0), _block_neg_table(1))


class GroupContext:
    """The group G_e for a twist vector e of length n >= 1 (n = 0 is allowed
    only as a degenerate tail and gives the trivial group)."""

    def __init__(self, e):
        e = tuple(int(b) for b in e)
        if any(b not in (0, 1) for b in e):
            raise ValueError(f"twist bits must be 0/1, got {e}")
        self.e = e
        self.n = len(e)
        self.order = 16 ** self.n
        self._shifts = [4 * (self.n - 1 - i) for i in range(self.n)]

    @classmethod
    def parse(cls, s):
        return cls(gf4.parse_bits(s))

    def __repr__(self):
        return f"GroupContext(e={''.join(map(str, self.e))!r})"

    def __eq__(self, other):
        return isinstance(other, GroupContext) and self.e == other.e

    def __hash__(self):
        return hash(self.e)

    # -- indexing ---------------------------------------------------------

    @cached_property
    def all(self):
        return np.arange(self.order, dtype=np.int64)

    def index(self, blocks):
        """Index of the element with blocks [(x_1, y_1), ..., (x_n, y_n)]."""
        if len(blocks) != self.n:
            raise ValueError(f"expected {self.n} blocks, got {len(blocks)}")
        k = 0
        for x, y in blocks:
            if not (0 <= x < 4 and 0 <= y < 4):
                raise ValueError(f"bad GF(4) codes in block {(x, y)}")
            k = 16 * k + 4 * x + y
        return k

    def blocks(self, k):
        k = self._check_index(k)
        out = []
        for s in self._shifts:
            d = (k >> s) & 15
            out.append((d >> 2, d & 3))
        return out

    def coords(self, k):
        """Arrays x[i], y[i] of GF(4) codes, shape (n, *k.shape)."""
        k = np.asarray(k, dtype=np.int64)
        d = np.stack([(k >> s) & 15 for s in self._shifts]) if self.n else np.zeros((0,) + k.shape, np.int64)
        return d >> 2, d & 3

    def from_coords(self, x, y):
        k = 0
        for i, s in enumerate(self._shifts):
            k = k + ((4 * x[i] + y[i]) << s)
        return k

    def parse_element(self, s):
        if len(s) != 2 * self.n:
            raise ValueError(f"element literal must have {2 * self.n} characters: {s!r}")
        codes = gf4.parse_vector(s)
        return self.index(list(zip(codes[0::2], codes[1::2])))

    def format_element(self, k):
        return "".join(gf4.CHARS[x] + gf4.CHARS[y] for x, y in self.blocks(int(k)))

    def _check_index(self, k):
        if np.isscalar(k) or np.ndim(k) == 0:
            k = int(k)
            if not 0 <= k < self.order:
                raise IndexError(f"element index {k} out of range for order {self.order}")
        return k

    # -- group law --------------------------------------------------------

    def add(self, u, v):
        scalar = np.ndim(u) == 0 and np.ndim(v) == 0
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        out = np.zeros(np.broadcast_shapes(u.shape, v.shape), dtype=np.int64)
        for eps, s in zip(self.e, self._shifts):
            out |= BLOCK_ADD[eps][(u >> s) & 15, (v >> s) & 15] << s
        return int(out) if scalar else out

    def neg(self, u):
        scalar = np.ndim(u) == 0
        u = np.asarray(u, dtype=np.int64)
        out = np.zeros_like(u)
        for eps, s in zip(self.e, self._shifts):
            out |= BLOCK_NEG[eps][(u >> s) & 15] << s
        return int(out) if scalar else out

    def sub(self, u, v):
        return self.add(u, self.neg(v))

    def double(self, u):
        # deliberately the group law, not a closed formula
        return self.add(u, u)

    def multiple(self, m, u):
        out = np.zeros_like(np.asarray(u, dtype=np.int64))
        for _ in range(m):
            out = self.add(out, u)
        return out if np.ndim(u) else int(out)

    # -- Frattini quotient ------------------------------------------------

    @cached_property
    def functional_basis(self):
        """Bit positions spanning Hom(G_e, Z2), ordered by block then
        coordinate (x high bit, x low bit, then y bits when eps = 0)."""
        basis = []
        for eps, s in zip(self.e, self._shifts):
            basis += [s + 3, s + 2]
            if not eps:
                basis += [s + 1, s + 0]
        return tuple(basis)

    @property
    def frattini_rank(self):
        return len(self.functional_basis)

    @cached_property
    def functional_masks(self):
        """All nonzero homomorphisms G_e -> Z2 as bit masks; element k maps
        to parity(k & mask).  Coefficient vector c in 1..2^r-1 with the
        first basis position as its most significant bit."""
        r = self.frattini_rank
        c = np.arange(1, 2 ** r, dtype=np.int64)
        masks = np.zeros_like(c)
        for j, pos in enumerate(self.functional_basis):
            bit = (c >> (r - 1 - j)) & 1
            masks |= bit << pos
        return masks

    def functional(self, mask, k):
        return np.bitwise_count(np.asarray(k, dtype=np.int64) & mask) & 1

    # -- subgroups --------------------------------------------------------

    def closure(self, gens):
        return subgroup_closure(self, gens)

    def subgroup(self, members, generators=None):
        return Subgroup.from_members(self, members, generators)

    @cached_property
    def whole(self):
        return Subgroup(self, np.ones(self.order, dtype=bool), ())

    @cached_property
    def trivial(self):
        m = np.zeros(self.order, dtype=bool)
        m[0] = True
        return Subgroup(self, m, ())

    @cached_property
    def frattini(self):
        return subgroup_closure(self, np.unique(self.double(self.all)))

    def index2_subgroups(self):
        return [self.kernel_of_functional(int(m)) for m in self.functional_masks]

    def kernel_of_functional(self, mask):
        members = self.functional(mask, self.all) == 0
        return Subgroup(self, members, None)


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup of G_e stored as a dense membership mask over all indices."""

    ctx: GroupContext
    members: np.ndarray = field(repr=False)
    _generators: tuple | None = field(default=None, repr=False)

    @classmethod
    def from_members(cls, ctx, members, generators=None, validate=True):
        members = np.asarray(members)
        if members.dtype != bool:
            mask = np.zeros(ctx.order, dtype=bool)
            mask[members] = True
            members = mask
        sg = cls(ctx, members, None if generators is None else tuple(int(g) for g in generators))
        if validate:
            sg.validate()
        return sg

    def validate(self):
        if not self.members[0]:
            raise ValueError("subset does not contain zero")
        el = self.elements
        if not self.members[self.ctx.neg(el)].all():
            raise ValueError("subset not closed under negation")
        gens = self.generators
        for g in gens:
            if not self.members[self.ctx.add(el, g)].all():
                raise ValueError("subset not closed under addition")
        if self.ctx.order % self.order:
            raise ValueError("subset size does not divide the group order")

    @cached_property
    def elements(self):
        return np.flatnonzero(self.members).astype(np.int64)

    @property
    def order(self):
        return int(self.members.sum())

    @property
    def index(self):
        return self.ctx.order // self.order

    @cached_property
    def generators(self):
        if self._generators is not None:
            return self._generators
        return greedy_generators(self.ctx, self.elements)

    def __contains__(self, k):
        return bool(self.members[int(k)])

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.ctx == other.ctx and np.array_equal(self.members, other.members)

    def __hash__(self):
        return hash((self.ctx, self.members.tobytes()))

    def __le__(self, other):
        return bool(np.all(other.members[self.elements]))

    def __add__(self, other):
        return subgroup_closure(self.ctx, self.generators + other.generators)

    def __and__(self, other):
        return Subgroup(self.ctx, self.members & other.members, None)

    def image(self, table):
        """Image under an index table (assumed a homomorphism)."""
        return Subgroup.from_members(self.ctx, np.unique(table[self.elements]), validate=False)

    def abelian_type(self):
        return abelian_type(self.ctx, self)

    def __repr__(self):
        return f"Subgroup(order={self.order}, index={self.index})"


def extend_subgroup(ctx, members, g):
    """Members of <S, g> for S given by a membership mask (abelian)."""
    members = members.copy()
    base = np.flatnonzero(members)
    shift = g
    while not members[shift]:
        members[ctx.add(base, shift)] = True
        shift = ctx.add(shift, g)
    return members


def subgroup_closure(ctx, gens):
    members = np.zeros(ctx.order, dtype=bool)
    members[0] = True
    used = []
    for g in np.atleast_1d(np.asarray(gens, dtype=np.int64)):
        g = int(g)
        if not members[g]:
            members = extend_subgroup(ctx, members, g)
            used.append(g)
    return Subgroup(ctx, members, tuple(used))


def greedy_generators(ctx, elements):
    """A generating list picked in increasing index order."""
    members = np.zeros(ctx.order, dtype=bool)
    members[0] = True
    used = []
    for g in elements:
        if not members[g]:
            members = extend_subgroup(ctx, members, int(g))
            used.append(int(g))
    return tuple(used)


def abelian_type_from_counts(counts):
    """Invariant factors from n_k = #{g : 2^k g = 0}, k = 0, 1, 2, ...

    Returns {2^k: multiplicity}.
    """
    logs = [int(c).bit_length() - 1 for c in counts]
    for c in counts:
        if c & (c - 1):
            raise ValueError(f"count {c} is not a power of 2")
    d = [logs[k] - logs[k - 1] for k in range(1, len(logs))] + [0]
    out = {}
    for k in range(1, len(logs)):
        mult = d[k - 1] - d[k]
        if mult:
            out[2 ** k] = mult
    return out


def abelian_type(ctx, S):
    el = S.elements
    counts = [1]
    cur = el
    while counts[-1] < len(el):
        cur = ctx.double(cur)
        counts.append(int(np.count_nonzero(cur == 0)))
        if len(counts) > 64:
            raise ValueError("not a 2-group")
    return abelian_type_from_counts(counts)


def format_type(t):
    """'Z2^3xZ4^1' style rendering; the trivial group renders as '1'."""
    if t is None:
        return None
    if not t:
        return "1"
    return "x".join(f"Z{m}^{c}" for m, c in sorted(t.items()))


def type_order(t):
    out = 1
    for m, c in t.items():
        out *= m ** c
    return out
