"""Exhaustive property checks shared by the unit tests and the acceptance run.

Each check returns a list of failure strings; empty means the property holds.
"""

import itertools

import numpy as np

from pdslab import gf4
from pdslab.endo import (
    compose,
    image_of,
    is_invariant,
    kernel_of,
    make_rho,
    make_tau,
    norm4,
    one_minus,
    one_plus,
    order4_pair,
    order4_quotient_condition,
)
from pdslab.regular import check_gkt_conditions
from pdslab.twisted import GroupContext, subgroup_closure

W, W1 = gf4.W, gf4.W1


def _pairs(S):
    """Members of a subgroup of a one-block group as (x, y) code pairs."""
    return {divmod(int(k), 4) for k in S.elements}


def all_vectors(n, field=4):
    return list(itertools.product(range(field), repeat=n))


# -- single block image / kernel tables ---------------------------------------

def check_tau_tables():
    bad = []
    for eps in (0, 1):
        ctx = GroupContext((eps,))
        for nu in (0, 1):
            t = make_tau(ctx, (nu,))
            want_im_plus = {(0, gf4.mul(nu ^ eps, x)) for x in range(4)}
            want_im_minus = {(0, gf4.mul(nu, x)) for x in range(4)}
            want_ker = {(gf4.mul(nu ^ 1, x), y) for x in range(4) for y in range(4)}
            got = (_pairs(image_of(one_plus(t))), _pairs(image_of(one_minus(t))), _pairs(kernel_of(one_minus(t))))
            for name, g, w in zip(("Im(1+tau)", "Im(1-tau)", "Ker(1-tau)"), got, (want_im_plus, want_im_minus, want_ker)):
                if g != w:
                    bad.append(f"eps={eps} nu={nu} {name}: {sorted(g)} != {sorted(w)}")
    return bad


_SMALL = {(0, 0), (0, 1), (1, 0), (1, 1)}
_SHIFTED = {(0, 0), (0, 1), (1, W), (1, W1)}
_HALF = {(0, y) for y in range(4)} | {(1, y) for y in range(4)}
_TINY = {(0, 0), (0, 1)}


def _rho_case(c, on_zero, on_one, on_w):
    return on_zero if c == 0 else on_one if c == 1 else on_w


def check_rho_tables():
    bad = []
    for eps in (0, 1):
        ctx = GroupContext((eps,))
        for alpha in range(4):
            r = make_rho(ctx, (alpha,))
            want = {
                "Im(1+rho)": _rho_case(alpha, _SMALL, _SHIFTED, _HALF),
                "Ker(1+rho)": _rho_case(alpha ^ eps, _SMALL, _SHIFTED, _TINY),
                "Im(1-rho)": _rho_case(alpha ^ eps, _SMALL, _SHIFTED, _HALF),
                "Ker(1-rho)": _rho_case(alpha, _SMALL, _SHIFTED, _TINY),
            }
            got = {
                "Im(1+rho)": _pairs(image_of(one_plus(r))),
                "Ker(1+rho)": _pairs(kernel_of(one_plus(r))),
                "Im(1-rho)": _pairs(image_of(one_minus(r))),
                "Ker(1-rho)": _pairs(kernel_of(one_minus(r))),
            }
            for name in want:
                if got[name] != want[name]:
                    bad.append(f"eps={eps} alpha={gf4.CHARS[alpha]} {name}: {sorted(got[name])} != {sorted(want[name])}")
    return bad


def check_rho_squared(max_n=2):
    """rho_a o rho_a = tau_Tr(a) for every a, every twist vector."""
    bad = []
    for n in range(1, max_n + 1):
        for e in itertools.product((0, 1), repeat=n):
            ctx = GroupContext(e)
            for a in all_vectors(n):
                r = make_rho(ctx, a)
                t = make_tau(ctx, tuple(gf4.trace(x) for x in a))
                if not np.array_equal(compose(r, r).table, t.table):
                    bad.append(f"e={e} a={gf4.format_vector(a)}")
    return bad


# -- invariant subgroups ----------------------------------------------------------

def automorphisms(ctx):
    """tau_v for v over F2 and rho_a for all a, as a list of maps."""
    n = ctx.n
    maps = [make_tau(ctx, v) for v in all_vectors(n, 2)]
    maps += [make_rho(ctx, a) for a in all_vectors(n)]
    return maps


def check_index2_criterion(max_n=2):
    """K of index 2 is phi-invariant iff Im(1+phi) <= K, both directions."""
    bad = []
    counts = [0, 0]
    for n in range(1, max_n + 1):
        for e in itertools.product((0, 1), repeat=n):
            ctx = GroupContext(e)
            subs = ctx.index2_subgroups()
            for phi in automorphisms(ctx):
                im = image_of(one_plus(phi))
                for K in subs:
                    inv = is_invariant(phi, K)
                    counts[inv] += 1
                    if inv != (im <= K):
                        bad.append(f"e={e} {phi.descriptor} K={K.generators}")
    if not counts[0] or not counts[1]:
        bad.append(f"degenerate sample: invariant/non-invariant counts {counts}")
    return bad


def check_norm4_in_K(K, phi):
    """Im(1 + phi + phi^2 + phi^3) <= K for a phi-invariant K of index 4."""
    if K.index != 4 or not is_invariant(phi, K):
        return [f"{phi.descriptor}: K is not an invariant index-4 subgroup"]
    if not image_of(norm4(phi)) <= K:
        return [f"{phi.descriptor}: Im(norm) not inside K"]
    return []


def order4_maps(max_n=2):
    for n in range(1, max_n + 1):
        for e in itertools.product((0, 1), repeat=n):
            ctx = GroupContext(e)
            for a in all_vectors(n):
                if any(gf4.trace(x) for x in a):
                    yield make_rho(ctx, a)


def z4_matrix_maps():
    """Every automorphism of order 4 of G_1 = Z4 x Z4, from GL2(Z4) acting on
    the basis (1, 0), (w, 0).  Not isometries; the existence question for
    index-4 pairs is group theoretic only."""
    from pdslab.endo import EndoMap

    ctx = GroupContext((1,))
    b1, b2 = ctx.index([(1, 0)]), ctx.index([(W, 0)])
    coords = {}
    for i in range(4):
        for j in range(4):
            coords[(i, j)] = ctx.add(ctx.multiple(i, b1), ctx.multiple(j, b2))
    for m in itertools.product(range(4), repeat=4):
        a, b, c, d = m
        if (a * d - b * c) % 2 == 0:
            continue
        table = np.zeros(16, dtype=np.int64)
        for (i, j), k in coords.items():
            table[k] = coords[((a * i + b * j) % 4, (c * i + d * j) % 4)]
        phi = EndoMap(ctx, table, {"kind": "matrix", "m": list(m)})
        if phi.order() == 4:
            yield phi


def check_order4_pairs(max_n=2):
    """Every (K, h) from either search meets the construction conditions and
    the index-4 norm containment."""
    bad = []
    found = 0
    for phi in order4_maps(max_n):
        for search in (order4_pair, order4_quotient_condition):
            pair = search(phi)
            if pair is None:
                continue
            found += 1
            K, h = pair
            rep = check_gkt_conditions(K, phi, h)
            if not rep.ok:
                bad.append(f"{search.__name__} {phi.ctx} {phi.descriptor}: {rep.violations}")
            bad += check_norm4_in_K(K, phi)
    if not found:
        bad.append("no order-4 pair found at all")
    return bad


def _maximal_subgroups(ctx, H):
    """Every index-2 subgroup of H, from a basis of H modulo Phi(H)."""
    phi_h = subgroup_closure(ctx, np.unique(ctx.double(H.elements)))
    basis = []
    members = phi_h.members
    for g in H.elements:
        if not members[g]:
            basis.append(int(g))
            members = subgroup_closure(ctx, list(phi_h.generators) + basis).members
    for c in itertools.product((0, 1), repeat=len(basis)):
        if not any(c):
            continue
        pivot = basis[c.index(1)]
        gens = list(phi_h.generators)
        for b, ci in zip(basis, c):
            if not ci:
                gens.append(b)
            elif b != pivot:
                gens.append(ctx.add(b, pivot))
        yield subgroup_closure(ctx, gens)


def _index4_brute(phi):
    """Whether some phi-invariant K of index 4 and some h meet the
    construction conditions, over every index-4 subgroup (each lies in an
    index-2 subgroup) and every h."""
    ctx = phi.ctx
    t1 = phi.table
    t2, t3 = t1[t1], t1[t1[t1]]
    g = ctx.all
    h2 = ctx.add(g, t1)
    h3 = ctx.add(h2, t2)
    h4 = ctx.add(h3, t3)
    seen = set()
    for H in ctx.index2_subgroups():
        for K in _maximal_subgroups(ctx, H):
            if K in seen:
                continue
            seen.add(K)
            if K.index != 4 or not is_invariant(phi, K):
                continue
            m = K.members
            if np.any(~m[g] & ~m[h2] & ~m[h3] & m[h4]):
                return True
    return False


def check_order4_existence_bruteforce(max_n=2):
    """The index-2 H criterion agrees with exhaustive search over all
    index-4 subgroups.  Every map in this range turns out to admit a pair,
    so this guards against the search missing one, not the converse."""
    bad = []
    for phi in itertools.chain(order4_maps(max_n), z4_matrix_maps()):
        want = _index4_brute(phi)
        got = order4_pair(phi) is not None
        if want != got:
            bad.append(f"{phi.ctx} {phi.descriptor}: search {got}, brute force {want}")
    return bad


def check_trivial_frattini_criterion(max_n=2):
    """With Im(1+phi) & Phi(G_e) = 0: a pair exists iff Ker(1+phi) & Im(1+phi)
    is nontrivial iff Ker(1+phi) < Ker((1+phi)^2)."""
    bad = []
    tested = 0
    for phi in order4_maps(max_n):
        ctx = phi.ctx
        op = one_plus(phi)
        im, ker = image_of(op), kernel_of(op)
        if (im & ctx.frattini).order != 1:
            continue
        tested += 1
        exists = order4_pair(phi) is not None
        meet = (ker & im).order > 1
        ker2 = kernel_of(compose(op, op))
        grows = ker.order < ker2.order
        if not (exists == meet == grows):
            bad.append(f"{ctx} {phi.descriptor}: exists={exists} meet={meet} grows={grows}")
    if not tested:
        bad.append("no map with Im(1+phi) & Phi = 0 in range")
    return bad


ALL_CHECKS = {
    "tau image/kernel tables": check_tau_tables,
    "rho image/kernel tables": check_rho_tables,
    "rho^2 = tau_Tr": check_rho_squared,
    "index-2 invariance criterion": check_index2_criterion,
    "order-4 pairs and norm containment": check_order4_pairs,
    "order-4 existence vs brute force": check_order4_existence_bruteforce,
    "trivial-Frattini existence criterion": check_trivial_frattini_criterion,
}
