"""The regular groups G_{K,tau,h} = <R(K), R(h) tau> acting on G_e.

An element R(a) tau^i acts by p -> tau^i(p) + a.  Because K + h_0, ...,
K + h_{e-1} partition G_e, the translation part a alone determines the
element; internally elements are kept by a and the group index follows
index = i * |K| + rank of a in the sorted coset K + h_i.

Invariants (center, lower central series, Frattini subgroup, exponent) are
computed from the multiplication alone; the closed-form generating sets
for them are evaluated separately so the two can be compared.
"""

from dataclasses import dataclass, field

import numpy as np

from .endo import is_generalized_isometry, one_minus
from .finite_group import FiniteGroupTable
from .twisted import Subgroup, format_type, subgroup_closure


def partial_sums(tau, h, e):
    """h_0 = 0, h_i = h + tau(h) + ... + tau^{i-1}(h) for i = 1..e."""
    ctx = tau.ctx
    hs = [0]
    term = h
    for _ in range(e):
        hs.append(ctx.add(hs[-1], term))
        term = tau(term)
    return hs


@dataclass
class GktReport:
    ok: bool
    e: int
    violations: list = field(default_factory=list)
    nonabelian_advisory: bool = False
    fix_index: int = 0

    def to_json(self):
        return {
            "ok": self.ok,
            "e": self.e,
            "violations": self.violations,
            "fix_index": self.fix_index,
            "nonabelian_by_fix_index": self.nonabelian_advisory,
        }


def check_gkt_conditions(K, tau, h, a=None):
    """Conditions (a), (b), (c) for building G_{K,tau,h}.

    (a) tau is an automorphism of order e > 1 (and a generalized isometry of
    Q_a when a is given); (b) K is tau-invariant of index e; (c) h_e in K
    and h_1..h_{e-1} not in K.  Also reports whether [G_e : Fix(tau)] > e,
    which forces the group to be non-abelian.
    """
    ctx = tau.ctx
    viol = []
    e = 0
    if not tau.is_automorphism:
        viol.append({"condition": "a", "reason": "tau is not an automorphism"})
    else:
        e = tau.order()
        if e <= 1:
            viol.append({"condition": "a", "reason": "tau has order 1"})
        if a is not None and not is_generalized_isometry(tau, a):
            viol.append({"condition": "a", "reason": f"tau is not a generalized isometry of Q_{a}"})
    if K.index != e:
        viol.append({"condition": "b", "reason": f"K has index {K.index}, tau has order {e}"})
    moved = K.elements[~K.members[tau.table[K.elements]]]
    if len(moved):
        x = int(moved[0])
        viol.append({"condition": "b", "reason": "K is not tau-invariant", "witness": x, "image": int(tau(x))})
    fix_index = 0
    if e > 1:
        hs = partial_sums(tau, h, e)
        for i in range(1, e):
            if hs[i] in K:
                viol.append({"condition": "c", "reason": f"h_{i} lies in K", "witness": int(hs[i])})
        if hs[e] not in K:
            viol.append({"condition": "c", "reason": f"h_{e} is not in K", "witness": int(hs[e])})
        fix_index = ctx.order // tau.fixed().order
    return GktReport(not viol, e, viol, fix_index > e, fix_index)


class ConditionError(ValueError):
    def __init__(self, report):
        super().__init__(f"G_(K,tau,h) conditions fail: {report.violations}")
        self.report = report


class RegularGroup:
    def __init__(self, K, tau, h, a=None, validate=True):
        self.ctx = ctx = tau.ctx
        self.K, self.tau, self.h = K, tau, int(h)
        self.report = check_gkt_conditions(K, tau, h, a)
        if validate and not self.report.ok:
            raise ConditionError(self.report)
        self.e = e = self.report.e or tau.order()
        self.hs = partial_sums(tau, self.h, e)
        pw = [ctx.all]
        for _ in range(e - 1):
            pw.append(tau.table[pw[-1]])
        self.tau_pow = np.stack(pw)
        if not self.report.ok:
            return
        N = ctx.order
        size = K.order
        self.coset = np.full(N, -1, dtype=np.int64)
        self.index_of = np.empty(N, dtype=np.int64)
        for i in range(e):
            coset = np.sort(ctx.add(K.elements, self.hs[i]))
            self.coset[coset] = i
            self.index_of[coset] = i * size + np.arange(size)
        self.a_of = np.empty(N, dtype=np.int64)
        self.a_of[self.index_of] = ctx.all

    @property
    def order(self):
        return self.ctx.order

    # -- arithmetic on translation parts -------------------------------

    def mul_a(self, a, b):
        """(R(a) tau^i)(R(b) tau^j) = R(a + tau^i(b)) tau^{i+j}."""
        return self.ctx.add(a, self.tau_pow[self.coset[a], b])

    def inv_a(self, a):
        i = self.coset[a]
        return self.tau_pow[(self.e - i) % self.e, self.ctx.neg(a)]

    def element(self, a, i=None):
        """Group index of R(a) tau^i (i is implied by a and checked if given)."""
        if i is not None and self.coset[a] != i % self.e:
            raise ValueError(f"R({a}) tau^{i} is not in the group")
        return int(self.index_of[a])

    def translation(self, g):
        return self.a_of[g]

    def rotation(self, g):
        return self.coset[self.a_of[g]]

    def act(self, g, p):
        a = self.a_of[g]
        return self.ctx.add(self.tau_pow[self.coset[a], p], a)

    def group_table(self):
        ia, ai = self.index_of, self.a_of
        return FiniteGroupTable(
            self.order,
            lambda g1, g2: ia[self.mul_a(ai[g1], ai[g2])],
            lambda g: ia[self.inv_a(ai[g])],
            identity=0,
            name="G_(K,tau,h)",
        )

    @property
    def generators(self):
        """Group indices of R(k) for generators k of K, then R(h) tau."""
        return np.array([self.index_of[k] for k in self.K.generators] + [self.index_of[self.h]], dtype=np.int64)

    def R(self, xs):
        """Group indices of the translations R(x), x in K."""
        xs = np.asarray(xs, dtype=np.int64)
        if not self.K.members[xs].all():
            raise ValueError("R(x) is only in the group for x in K")
        return self.index_of[xs]


def build_regular(K, tau, h, a=None):
    return RegularGroup(K, tau, h, a)


# -- regularity ------------------------------------------------------------------

@dataclass
class RegularityReport:
    group_order: int
    orbit_size: int
    stabilizer_size: int
    classes_preserved: bool
    pairs_checked: int

    @property
    def ok(self):
        return self.orbit_size == self.group_order and self.stabilizer_size == 1 and self.classes_preserved

    def to_json(self):
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def generated_affine_group(K, tau, h, e):
    """Closure of {R(k) : k in gens(K)} + {R(h) tau} as pairs (a, i mod e),
    computed without the coset bookkeeping used by RegularGroup."""
    ctx = tau.ctx
    N = ctx.order
    pw = [ctx.all]
    for _ in range(e - 1):
        pw.append(tau.table[pw[-1]])
    pw = np.stack(pw)
    gens = [(int(k), 0) for k in K.generators] + [(int(h), 1 % e)]
    seen = np.zeros(N * e, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    while len(frontier):
        a, i = frontier % N, frontier // N
        new = []
        for b, j in gens:
            # (a, i)(b, j) = (a + tau^i(b), i + j)
            na = ctx.add(a, pw[i, b])
            new.append(((i + j) % e) * N + na)
        new = np.unique(np.concatenate(new))
        frontier = new[~seen[new]]
        seen[frontier] = True
    states = np.flatnonzero(seen)
    return states % N, states // N


def verify_regular_action(G, classes=None, samples=1_000_000, rng=0):
    """Regularity of <R(K), R(h) tau> on G_e and preservation of the given
    classes (index arrays over G_e) by every generator."""
    ctx = G.ctx
    a, i = generated_affine_group(G.K, G.tau, G.h, G.e)
    orbit = len(np.unique(a))
    stab = int(np.count_nonzero(a == 0))
    preserved = True
    checked = 0
    if classes is not None:
        lab = np.zeros(ctx.order, dtype=np.int64)
        for c_id, c in enumerate(classes, start=1):
            lab[np.asarray(c)] = c_id
        if ctx.order <= 256:
            p, q = (m.ravel() for m in np.meshgrid(ctx.all, ctx.all, indexing="ij"))
        else:
            p, q = np.random.default_rng(rng).integers(0, ctx.order, size=(2, samples))
        base = lab[ctx.sub(q, p)]
        gens = [(int(k), 0) for k in G.K.generators] + [(G.h, 1 % G.e)]
        for b, j in gens:
            gp = ctx.add(G.tau_pow[j][p], b)
            gq = ctx.add(G.tau_pow[j][q], b)
            if not np.array_equal(lab[ctx.sub(gq, gp)], base):
                preserved = False
            checked += len(p)
    return RegularityReport(len(a), orbit, stab, preserved, checked)


# -- invariants ------------------------------------------------------------------

def _summary(T, members):
    t = T.abelian_type(members)
    return {"order": int(members.sum()), "type": format_type(t)}


@dataclass
class DirectInvariants:
    order: int
    nilpotency_class: int | None
    exponent: int
    lower_central: list  # membership masks gamma_1 = G, gamma_2, ...
    center: np.ndarray
    frattini: np.ndarray

    @property
    def derived(self):
        return self.lower_central[1] if len(self.lower_central) > 1 else self.lower_central[0]


def direct_invariants(G):
    T = G.group_table()
    gens = G.generators
    lcs = T.lower_central_series(gens)
    cls = len(lcs) - 1 if lcs[-1].sum() == 1 else None
    return DirectInvariants(
        order=T.size,
        nilpotency_class=cls,
        exponent=T.exponent(),
        lower_central=lcs,
        center=T.center(gens),
        frattini=T.frattini_by_squares(),
    )


def center(G):
    T = G.group_table()
    return T.center(G.generators)


def lower_central_series(G):
    return G.group_table().lower_central_series(G.generators)


def nilpotency_class(G):
    return G.group_table().nilpotency_class(G.generators)


def derived_subgroup(G):
    return G.group_table().derived_subgroup(G.generators)


def frattini(G):
    return G.group_table().frattini_by_squares()


def exponent(G):
    return G.group_table().exponent()


@dataclass
class PredictedInvariants:
    """Subgroups generated by the closed-form generating sets."""

    commutator_series: list  # G^(1), G^(2), ... as masks (G^(0) omitted)
    center: np.ndarray
    center_order_formula: int
    t: int
    m: int
    frattini_minus: np.ndarray  # <R(2x), R(x - tau x), R(h_2) tau^2>
    frattini_plus: np.ndarray  # <R(2x), R(x + tau x), R(h_2) tau^2>


def predicted_invariants(G):
    ctx, K, tau = G.ctx, G.K, G.tau
    T = G.group_table()
    Kel = K.elements
    om = one_minus(tau)

    series = []
    cur = K
    while True:
        nxt = subgroup_closure(ctx, np.unique(om.table[cur.elements]))
        if series and nxt == series[-1]:
            break
        series.append(nxt)
        if nxt.order == 1:
            break
        cur = nxt
    series_masks = [T.mask(G.R(s.elements)) for s in series]

    t = tau.restricted_order(K)
    fix_k = Subgroup(ctx, tau.fixed().members & K.members, None)
    ht = G.element(G.hs[t])
    center_gens = np.concatenate([G.R(fix_k.elements), [ht]])
    center_pred = T.generate(center_gens)
    if t < G.e:
        he_order = subgroup_closure(ctx, [G.hs[G.e]]).order
        m = int(T.element_orders([ht])[0])
        center_formula = fix_k.order // he_order * m
    else:
        m = int(T.element_orders([ht])[0])
        center_formula = fix_k.order

    doubles = G.R(np.unique(ctx.double(Kel)))
    h2 = G.element(G.hs[2])
    minus = G.R(np.unique(om.table[Kel]))
    plus = G.R(np.unique(ctx.add(Kel, tau.table[Kel])))
    fr_minus = T.generate(np.concatenate([doubles, minus, [h2]]))
    fr_plus = T.generate(np.concatenate([doubles, plus, [h2]]))
    return PredictedInvariants(series_masks, center_pred, center_formula, t, m, fr_minus, fr_plus)


@dataclass
class InvariantReport:
    direct: DirectInvariants
    predicted: PredictedInvariants
    summary: dict

    def to_json(self):
        return self.summary


def invariant_report(G):
    """Direct invariants, the closed-form predictions, and their comparison."""
    T = G.group_table()
    d = direct_invariants(G)
    p = predicted_invariants(G)
    direct_series = d.lower_central[1:]
    series_ok = len(direct_series) == len(p.commutator_series) and all(
        np.array_equal(x, y) for x, y in zip(direct_series, p.commutator_series)
    )
    center_ok = bool(np.array_equal(p.center, d.center))
    center_order_ok = p.center_order_formula == int(d.center.sum())
    frattini_ok = bool(np.array_equal(p.frattini_minus, d.frattini) and np.array_equal(p.frattini_plus, d.frattini))
    summary = {
        "order": d.order,
        "class": d.nilpotency_class,
        "exponent": d.exponent,
        "derived": _summary(T, d.derived),
        "center": _summary(T, d.center),
        "frattini": _summary(T, d.frattini),
        "lower_central_orders": [int(m.sum()) for m in d.lower_central],
        "t": p.t,
        "m": p.m,
        "center_order_formula": p.center_order_formula,
        "commutator_series_match": bool(series_ok),
        "center_gens_match": center_ok,
        "center_order_match": bool(center_order_ok),
        "frattini_gens_match": frattini_ok,
    }
    return InvariantReport(d, p, summary)


# -- pulling PDS back -------------------------------------------------------------

def pds_pullback(G, D):
    """{g : g(0) in D} as group indices.  Since g(0) is the translation part
    of g this is index_of[D]."""
    D = np.asarray(D, dtype=np.int64)
    return np.sort(G.index_of[D])


def pullback_classes(G, classes):
    return [pds_pullback(G, c) for c in classes]


def cayley_isomorphism_spot_check(G, D, samples=1_000_000, rng=0):
    """Adjacency in Cay(G, D') against Cay(G_e, D) under g -> g(0).

    With the left action used here the matching Cayley graph joins g1, g2
    when g1^-1 g2 lies in D'.  (The g2 g1^-1 convention is the same graph
    up to g -> g^-1, since D' is inverse-closed.)"""
    T = G.group_table()
    Dp = np.zeros(T.size, dtype=bool)
    Dp[pds_pullback(G, D)] = True
    De = np.zeros(G.ctx.order, dtype=bool)
    De[np.asarray(D)] = True
    r = np.random.default_rng(rng)
    g1, g2 = r.integers(0, T.size, size=(2, samples))
    left = Dp[T.mul(T.inv(g1), g2)]
    p1, p2 = G.a_of[g1], G.a_of[g2]
    right = De[G.ctx.sub(p2, p1)]
    return bool(np.array_equal(left, right))
