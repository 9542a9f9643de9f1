import numpy as np
import pytest

from pdslab.endo import make_rho, make_tau, order2_pair, order4_pair
from pdslab.families import build_family
from pdslab.forms import level_set
from pdslab.regular import (
    RegularGroup,
    cayley_isomorphism_spot_check,
    check_gkt_conditions,
    direct_invariants,
    generated_affine_group,
    invariant_report,
    pds_pullback,
    verify_regular_action,
)
from pdslab.twisted import GroupContext, subgroup_closure

sympy = pytest.importorskip("sympy.combinatorics")


@pytest.fixture(scope="module")
def tau_group():
    ctx = GroupContext((1, 1))
    t = make_tau(ctx, (1, 1))
    K, h = order2_pair(t)
    return RegularGroup(K, t, h, (0, 0))


@pytest.fixture(scope="module")
def rho_group():
    ctx = GroupContext((0, 1))
    r = make_rho(ctx, (2, 0))
    K, h = order4_pair(r)
    return RegularGroup(K, r, h, (2, 0))


def test_group_axioms(tau_group, rho_group):
    for G in (tau_group, rho_group):
        T = G.group_table()
        assert T.check_axioms() == []


def test_multiplication_is_composition_of_actions(rho_group):
    G = rho_group
    T = G.group_table()
    rng = np.random.default_rng(0)
    g1, g2, p = rng.integers(0, G.order, size=(3, 500))
    assert np.array_equal(G.act(T.mul(g1, g2), p), G.act(g1, G.act(g2, p)))


def test_generated_group_matches_coset_bookkeeping(rho_group):
    G = rho_group
    a, i = generated_affine_group(G.K, G.tau, G.h, G.e)
    assert len(a) == G.order
    assert np.array_equal(G.coset[a], i)


def test_regular_on_scheme(tau_group):
    ctx = tau_group.ctx
    classes = [level_set(ctx, (0, 0), v) for v in range(4)]
    rep = verify_regular_action(tau_group, classes)
    assert rep.ok and rep.orbit_size == 256 and rep.stabilizer_size == 1


def test_condition_violations_named():
    ctx = GroupContext((1, 1))
    t = make_tau(ctx, (1, 1))
    K = subgroup_closure(ctx, [ctx.parse_element("1000")])
    rep = check_gkt_conditions(K, t, ctx.parse_element("w000"))
    assert not rep.ok
    assert {v["condition"] for v in rep.violations} == {"b"}
    K2, _ = order2_pair(t)
    inside = int(K2.elements[1])
    rep = check_gkt_conditions(K2, t, inside)
    assert [v["condition"] for v in rep.violations] == ["c"]


def to_sympy(G):
    """The same group as permutations of G_e, built only from the generators' actions."""
    from sympy.combinatorics import Permutation, PermutationGroup

    ctx = G.ctx
    gens = [Permutation(ctx.add(ctx.all, int(k)).tolist()) for k in G.K.generators]
    gens.append(Permutation(ctx.add(G.tau.table, G.h).tolist()))
    return PermutationGroup(gens), gens


SYMPY_CASES = [
    {"family": "A", "n": 2, "e": "11", "a": "00", "v": "11", "b": "10"},
    {"family": "B", "n": 2, "e": "11", "a": "11", "b": "10"},
    {"family": "C", "n": 2, "e": "00", "a": "w0", "b": "01"},
    {"family": "C", "n": 2, "e": "11", "a": "w0", "b": "10"},
    {"family": "C", "n": 2, "e": "11", "a": "ww", "b": "11"},
]


@pytest.mark.parametrize("spec", SYMPY_CASES, ids=lambda d: d["family"] + d["e"] + d["a"] + d["b"])
def test_invariants_against_sympy(spec):
    from sympy.combinatorics import PermutationGroup

    G = build_family(spec).group
    s = invariant_report(G).summary
    P, gens = to_sympy(G)
    assert P.order() == G.order
    assert [H.order() for H in P.lower_central_series()] == s["lower_central_orders"]
    assert P.center().order() == s["center"]["order"]
    # Frattini of a 2-group: derived subgroup plus squares of generators
    F = PermutationGroup(list(P.derived_subgroup().generators) + [g**2 for g in gens])
    assert F.order() == s["frattini"]["order"]
    assert max(g.order() for g in P.generate()) == s["exponent"]


def test_closed_form_generating_sets(tau_group, rho_group):
    for G in (tau_group, rho_group):
        s = invariant_report(G).summary
        assert s["commutator_series_match"] and s["center_gens_match"] and s["center_order_match"] and s["frattini_gens_match"]


def test_abelian_when_tau_trivial_on_K():
    # tau_v with v = 0 on the twisted block is trivial on a suitable K
    ctx = GroupContext((0, 0))
    t = make_tau(ctx, (1, 0))
    K, h = order2_pair(t)
    d = direct_invariants(RegularGroup(K, t, h))
    fixed_on_k = np.array_equal(t.table[K.elements], K.elements)
    assert (d.nilpotency_class == 1) == fixed_on_k


def test_pullback_and_cayley_graph(rho_group):
    G = rho_group
    T = G.group_table()
    from pdslab.pds import verify_pds
    from pdslab.finite_group import FiniteGroupTable

    ctx = G.ctx
    D = level_set(ctx, (2, 0), 1)
    base = verify_pds(FiniteGroupTable.from_context(ctx), D)
    pulled = verify_pds(T, pds_pullback(G, D))
    assert base.ok and pulled.ok and base.tuple == pulled.tuple
    assert not T.is_abelian()
    assert cayley_isomorphism_spot_check(G, D, samples=20_000)
