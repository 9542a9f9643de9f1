"""Endomorphisms of G_e as full index tables.

Covers the named maps tau_v, rho_a and the block rotation pi, pointwise
arithmetic 1 + phi, 1 - phi, 1 + phi + phi^2 + phi^3 in End(G_e), images and
kernels, isometry tests, and the searches for phi-invariant subgroups of
index 2 and 4 that feed the regular group construction.
"""

import numpy as np

from . import gf4
from .forms import form_values
from .twisted import Subgroup, extend_subgroup, subgroup_closure


class SearchDiscrepancy(RuntimeError):
    """An existence argument predicted a witness that the search did not find."""


class EndoMap:
    def __init__(self, ctx, table, descriptor=None, check=True):
        self.ctx = ctx
        self.table = np.asarray(table, dtype=np.int64)
        self.table.setflags(write=False)
        self.descriptor = descriptor or {"kind": "table"}
        if self.table.shape != (ctx.order,):
            raise ValueError("table size does not match the group order")
        if check and not self.is_homomorphism():
            raise ValueError(f"{self.descriptor} is not an endomorphism of {ctx}")

    def __call__(self, g):
        out = self.table[g]
        return int(out) if np.ndim(g) == 0 else out

    def __eq__(self, other):
        return isinstance(other, EndoMap) and self.ctx == other.ctx and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __repr__(self):
        return f"EndoMap({self.descriptor})"

    def is_homomorphism(self, samples=100_000, rng=0):
        ctx, t = self.ctx, self.table
        if ctx.order <= 256:
            u, v = np.meshgrid(ctx.all, ctx.all, indexing="ij")
        else:
            u, v = np.random.default_rng(rng).integers(0, ctx.order, size=(2, samples))
        return bool(np.array_equal(t[ctx.add(u, v)], ctx.add(t[u], t[v])))

    @property
    def is_bijective(self):
        return len(np.unique(self.table)) == self.ctx.order

    @property
    def is_automorphism(self):
        return self.is_bijective and self.is_homomorphism()

    def order(self):
        """Multiplicative order (automorphisms only)."""
        if not self.is_bijective:
            raise ValueError("order is only defined for automorphisms")
        ident = self.ctx.all
        cur = self.table
        k = 1
        while not np.array_equal(cur, ident):
            cur = self.table[cur]
            k += 1
        return k

    def restricted_order(self, S):
        """Order of the restriction to an invariant subgroup S."""
        el = S.elements
        cur = self.table[el]
        k = 1
        while not np.array_equal(cur, el):
            cur = self.table[cur]
            k += 1
        return k

    def fixed(self):
        """Fix(phi) = Ker(phi - 1)."""
        return kernel_of(one_minus(self))


def identity(ctx):
    return EndoMap(ctx, ctx.all, {"kind": "identity"}, check=False)


def zero_map(ctx):
    return EndoMap(ctx, np.zeros(ctx.order, dtype=np.int64), {"kind": "zero"}, check=False)


def _blockwise(ctx, v, fn, kind, key):
    if len(v) != ctx.n:
        raise ValueError(f"expected {ctx.n} coefficients, got {len(v)}")
    x, y = ctx.coords(ctx.all)
    nx, ny = x.copy(), y.copy()
    for i, nu in enumerate(v):
        nx[i], ny[i] = fn(x[i], y[i], int(nu))
    desc = {"kind": kind, key: gf4.format_vector(v)}
    return EndoMap(ctx, ctx.from_coords(nx, ny), desc)


def make_tau(ctx, v):
    """tau_v(x, y) = (x, y + v x) blockwise."""
    return _blockwise(ctx, v, lambda x, y, nu: (x, y ^ gf4.MUL_TABLE[nu, x]), "tau", "v")


def make_rho(ctx, a):
    """rho_a(x, y) = (x^2, y^2 + a x^2) blockwise."""
    def fn(x, y, nu):
        x2 = gf4.SQUARE[x]
        return x2, gf4.SQUARE[y] ^ gf4.MUL_TABLE[nu, x2]
    return _blockwise(ctx, a, fn, "rho", "a")


def make_pi(ctx, v):
    """Rotate the first four blocks one place to the right; tau_v on the tail."""
    if ctx.n < 4 or len(set(ctx.e[:4])) != 1:
        raise ValueError("pi needs at least four leading blocks with equal twist bits")
    if len(v) != ctx.n - 4:
        raise ValueError(f"tail vector must have {ctx.n - 4} entries")
    x, y = ctx.coords(ctx.all)
    nx, ny = x.copy(), y.copy()
    for i in range(4):
        nx[(i + 1) % 4], ny[(i + 1) % 4] = x[i], y[i]
    for j, nu in enumerate(v):
        i = 4 + j
        ny[i] = y[i] ^ gf4.MUL_TABLE[int(nu), x[i]]
    return EndoMap(ctx, ctx.from_coords(nx, ny), {"kind": "pi", "v": gf4.format_vector(v)})


def from_descriptor(ctx, desc):
    kind = desc.get("kind")
    if kind == "tau":
        return make_tau(ctx, gf4.parse_vector(desc["v"], ctx.n))
    if kind == "rho":
        return make_rho(ctx, gf4.parse_vector(desc["a"], ctx.n))
    if kind == "pi":
        return make_pi(ctx, gf4.parse_vector(desc["v"], ctx.n - 4))
    if kind == "identity":
        return identity(ctx)
    raise ValueError(f"unknown map descriptor {desc!r}")


# -- arithmetic in End(G_e) ---------------------------------------------------

def compose(phi, psi):
    """phi o psi."""
    return EndoMap(phi.ctx, phi.table[psi.table],
                   {"kind": "composite", "of": [phi.descriptor, psi.descriptor]}, check=False)


def power(phi, k):
    t = phi.ctx.all
    for _ in range(k):
        t = phi.table[t]
    return EndoMap(phi.ctx, t, {"kind": "power", "of": phi.descriptor, "k": k}, check=False)


def one_plus(phi):
    g = phi.ctx.all
    return EndoMap(phi.ctx, phi.ctx.add(g, phi.table), {"kind": "1+", "of": phi.descriptor}, check=False)


def one_minus(phi):
    g = phi.ctx.all
    return EndoMap(phi.ctx, phi.ctx.sub(g, phi.table), {"kind": "1-", "of": phi.descriptor}, check=False)


def norm4(phi):
    """1 + phi + phi^2 + phi^3."""
    ctx = phi.ctx
    t1 = phi.table
    t2 = t1[t1]
    t3 = t1[t2]
    table = ctx.add(ctx.add(ctx.all, t1), ctx.add(t2, t3))
    return EndoMap(ctx, table, {"kind": "norm4", "of": phi.descriptor}, check=False)


def image_of(psi, S=None):
    """Im_S(psi), S defaulting to the whole group."""
    el = psi.ctx.all if S is None else S.elements
    if not psi.is_homomorphism():
        raise ValueError(f"{psi.descriptor} is not a homomorphism")
    return Subgroup.from_members(psi.ctx, np.unique(psi.table[el]), validate=False)


def kernel_of(psi, S=None):
    if not psi.is_homomorphism():
        raise ValueError(f"{psi.descriptor} is not a homomorphism")
    members = psi.table == 0
    if S is not None:
        members = members & S.members
    return Subgroup(psi.ctx, members, None)


def is_invariant(phi, S):
    return bool(S.members[phi.table[S.elements]].all())


# -- isometries -----------------------------------------------------------------

def is_isometry(phi, a):
    q = form_values(phi.ctx, a)
    return bool(np.array_equal(q[phi.table], q))


def is_generalized_isometry(phi, a):
    q = form_values(phi.ctx, a)
    qt = q[phi.table]
    return bool(np.array_equal(qt, q) or np.array_equal(qt, gf4.SQUARE[q]))


# -- invariant subgroup searches ------------------------------------------------

def _masks_vanishing_on(ctx, S, masks=None):
    """Functional masks (in canonical order) that vanish on the subgroup S."""
    masks = ctx.functional_masks if masks is None else masks
    ok = np.ones(len(masks), dtype=bool)
    for g in S.generators:
        ok &= np.bitwise_count(masks & g) & 1 == 0
    return masks[ok]


def _hyperplane_avoiding(ctx, H, M, u):
    """An index-2 subgroup K of H with M <= K and u not in K.

    Requires Phi(H) <= M and u in H \\ M.  K grows from M by the least-index
    element of H outside K + <u> until [H:K] = 2."""
    members = M.members.copy()
    target = H.order // 2
    Hel = H.elements
    shift = ctx.sub(ctx.all, u)
    while members.sum() < target:
        cand = Hel[~(members[Hel] | members[shift[Hel]])]
        if not len(cand):
            raise SearchDiscrepancy("no complement to <u> in H/M")
        members = extend_subgroup(ctx, members, int(cand[0]))
    K = Subgroup(ctx, members, None)
    if K.order != target or u in K:
        raise SearchDiscrepancy("hyperplane construction failed")
    return K


def invariant_index2(phi):
    """All phi-invariant subgroups of index 2: those containing Im(1+phi)."""
    ctx = phi.ctx
    im = image_of(one_plus(phi))
    out = []
    for m in _masks_vanishing_on(ctx, im):
        K = ctx.kernel_of_functional(int(m))
        if not is_invariant(phi, K):
            raise SearchDiscrepancy(f"index-2 subgroup for mask {int(m)} contains Im(1+phi) but is not invariant")
        out.append(K)
    return out


def order2_pair(phi):
    """(K, h) for an order-2 automorphism: first invariant index-2 K and the
    least-index h outside it."""
    subs = invariant_index2(phi)
    if not subs:
        raise SearchDiscrepancy("no phi-invariant maximal subgroup")
    K = subs[0]
    h = int(np.flatnonzero(~K.members)[0])
    return K, h


def frattini_of(ctx, S):
    return subgroup_closure(ctx, np.unique(ctx.double(S.elements)))


def order4_candidates(phi):
    """Index-2 H with Ker(1+phi) + Im(1+phi) <= H and Im(1+phi) not inside
    Phi(H) + Im_H(1+phi); yields (H, M) with M = Phi(H) + Im_H(1+phi)."""
    ctx = phi.ctx
    op = one_plus(phi)
    im = image_of(op)
    ki = kernel_of(op) + im
    for m in _masks_vanishing_on(ctx, ki):
        H = ctx.kernel_of_functional(int(m))
        M = frattini_of(ctx, H) + image_of(op, H)
        if not im <= M:
            yield H, M


def order4_pair(phi):
    """(K, h) of index 4 for an order-4 automorphism, or None when no
    index-2 subgroup H satisfies the existence condition."""
    ctx = phi.ctx
    for H, M in order4_candidates(phi):
        outside = np.flatnonzero(~H.members)
        u_all = ctx.add(outside, phi.table[outside])
        good = outside[~M.members[u_all]]
        if not len(good):
            raise SearchDiscrepancy("qualifying H has no h with h + phi(h) outside Phi(H) + Im_H(1+phi)")
        h = int(good[0])
        u = ctx.add(h, phi(h))
        K = _hyperplane_avoiding(ctx, H, M, u)
        return K, h
    return None


def order4_quotient_condition(phi):
    """(K, h) from a non-trivial action of phi on G_e/(Phi(G_e) + Im(1+phi^2)),
    with K = H & phi(H); None when that action is trivial."""
    ctx = phi.ctx
    phi2 = compose(phi, phi)
    M2 = ctx.frattini + image_of(one_plus(phi2))
    im = image_of(one_plus(phi))
    if im <= M2:
        return None
    u_all = ctx.add(ctx.all, phi.table)
    h = int(np.flatnonzero(~M2.members[u_all])[0])
    u = int(u_all[h])
    for m in _masks_vanishing_on(ctx, M2):
        if ctx.functional(int(m), u):
            H = ctx.kernel_of_functional(int(m))
            K = H & H.image(phi.table)
            return K, h
    raise SearchDiscrepancy("no index-2 subgroup over Phi + Im(1+phi^2) avoids h + phi(h)")
