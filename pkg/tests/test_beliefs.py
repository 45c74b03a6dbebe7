from __future__ import annotations

import random
from itertools import combinations

from conftest import load_space, load_ta
from etopaq import prepare
from etopaq.beliefs import BOTTOM, DEAD, BeliefSpace
from etopaq.regions import RegionContext
from etopaq.ta import SILENT_KIND

A = frozenset({"a"})
NONE = frozenset()


def xproj(space, belief):
    return sorted({(r.location, r.ints[0]) for r in belief})


def test_initial_belief_with_a(opaque_space):
    b0 = opaque_space.initial(A)
    assert xproj(opaque_space, b0) == [
        ("l0", 0),
        ("lf", 0),
        ("lf^p", 0),
        ("lpriv", 0),
    ]


def test_initial_belief_without_a(opaque_space):
    b0p = opaque_space.initial(NONE)
    assert xproj(opaque_space, b0p) == [("l0", 0), ("lf^p", 0), ("lpriv", 0)]


def test_initial_belief_singleton_when_no_zero_edges():
    space = load_space("ta_counterex")
    b = space.initial(frozenset({"a", "b"}))
    # only the uncontrollable jump to the private location fires at time 0
    assert sorted({r.location for r in b}) == ["l0", "lpriv"]


def test_successor_interval_beliefs(opaque_space):
    b0 = opaque_space.initial(A)
    d = opaque_space.successor(b0, "1", NONE)
    assert xproj(opaque_space, d) == [("l0", 0), ("lpriv", 0)]
    c = opaque_space.successor(d, "0+", A)
    assert xproj(opaque_space, c) == [("l0", 0), ("lf", 0), ("lpriv", 0)]


def test_successor_dead_interval():
    from conftest import mortal_ta

    space = BeliefSpace(RegionContext(prepare(mortal_ta())))
    b0 = space.initial(NONE)
    mid = space.successor(b0, "1", NONE)
    point1 = space.successor(mid, "1", NONE)
    dead = space.successor(point1, "1", NONE)
    assert dead == DEAD
    assert space.successor(dead, "1", NONE) == DEAD
    assert space.successor(dead, "0+", frozenset({"a"})) == DEAD


def test_leaking_full_examples(opaque_space):
    b0 = opaque_space.initial(A)
    b0p = opaque_space.initial(NONE)
    assert not opaque_space.leaking_full(b0)
    assert opaque_space.leaking_full(b0p)
    no_finals = opaque_space.successor(b0, "1", NONE)
    assert not opaque_space.leaking_full(no_finals)


def test_leaking_weak_examples(opaque_space):
    b0 = opaque_space.initial(A)
    b0p = opaque_space.initial(NONE)
    assert opaque_space.leaking_weak(b0p)
    assert not opaque_space.leaking_weak(b0)
    assert not opaque_space.leaking_weak(DEAD)


def test_finals_present_examples(opaque_space):
    b0 = opaque_space.initial(A)
    interval = opaque_space.successor(b0, "1", NONE)
    assert opaque_space.finals_present(b0)
    assert not opaque_space.finals_present(interval)
    assert not opaque_space.finals_present(DEAD)


def test_successor_monotone_in_enabled():
    for name in ("ta_opaque", "ta1", "ta_counterex"):
        space = load_space(name)
        subsets = space.enabled_sets()
        graph = space.explore(include_dead=True)
        beliefs = [b for b in graph.states if b is not BOTTOM]
        for small, big in combinations(subsets, 2):
            if not small <= big:
                continue
            assert space.initial(small) <= space.initial(big)
            for b in beliefs:
                for tick in ("0+", "1"):
                    assert space.successor(b, tick, small) <= space.successor(
                        b, tick, big
                    )


def test_largest_set_property_random_paths(opaque_space):
    """Any region reachable by a first delay step tagged like the transition
    plus allowed zero-time/off-integer steps stays inside the computed
    successor."""
    rng = random.Random(5)
    space = opaque_space
    ctx = space.ctx
    b0 = space.initial(A)
    for tick in ("1",):
        for enabled in (A, NONE):
            target = space.successor(b0, tick, enabled)
            for _ in range(200):
                r = rng.choice(sorted(b0, key=ctx.format_region))
                hops = [r2 for tag, r2 in ctx.delay_steps(r) if tag == tick]
                if not hops:
                    continue
                cur = rng.choice(hops)
                assert cur in target
                for _ in range(rng.randint(0, 4)):
                    moves = [
                        t
                        for a, t in ctx.discrete_steps(cur)
                        if a.kind == SILENT_KIND
                        or a.name in space.uncontrollable
                        or a.name in enabled
                    ]
                    moves += [t for tag, t in ctx.delay_steps(cur) if tag == "0+"]
                    if not moves:
                        break
                    cur = rng.choice(moves)
                    assert cur in target


def test_successor_deterministic(opaque_space):
    fresh = BeliefSpace(RegionContext(prepare(load_ta("ta_opaque"))))
    b1 = opaque_space.initial(A)
    b2 = fresh.initial(A)
    assert b1 == b2
    assert opaque_space.successor(b1, "1", NONE) == fresh.successor(b2, "1", NONE)


def test_strict_initial_closure_flag():
    ta = load_ta("ta_opaque")
    strict = BeliefSpace(RegionContext(prepare(ta)), silent_in_initial=False)
    lax = BeliefSpace(RegionContext(prepare(ta)))
    # no silent edge fires at time zero here, so both agree
    assert strict.initial(A) == lax.initial(A)


def test_no_offinteger_moves_from_point_beliefs(opaque_space):
    b0 = opaque_space.initial(A)
    assert opaque_space.successor(b0, "0+", A) == DEAD


def _paper_edges_ta_opaque():
    return {
        ("bot", "0", "", "b0'"),
        ("bot", "0", "a", "b0"),
        ("b0", "1", "a", "b01"),
        ("b0", "1", "", "b01'"),
        ("b0'", "1", "a", "b01"),
        ("b0'", "1", "", "b01'"),
        ("b01", "1", "a", "b1"),
        ("b01", "1", "", "b1'"),
        ("b01", "0+", "", "b01'"),
        ("b01", "0+", "a", "b01"),
        ("b01'", "1", "a", "b1"),
        ("b01'", "1", "", "b1'"),
        ("b01'", "0+", "a", "b01"),
        ("b01'", "0+", "", "b01'"),
        ("b1", "1", "a", "b01"),
        ("b1", "1", "", "b01'"),
        ("b1'", "1", "a", "b01"),
        ("b1'", "1", "", "b01'"),
    }


def test_reconstruct_belief_automaton_ta_opaque(opaque_space):
    """The explored graph must match the published seven-state automaton
    exactly: states anchored by successor chains, edges compared as a set."""
    space = opaque_space
    b0 = space.initial(A)
    b0p = space.initial(NONE)
    b01 = space.successor(b0, "1", A)
    b01p = space.successor(b0, "1", NONE)
    b1 = space.successor(b01, "1", A)
    b1p = space.successor(b01, "1", NONE)
    anchors = [b0, b0p, b01, b01p, b1, b1p]
    assert len(set(anchors)) == 6
    names = {
        BOTTOM: "bot",
        b0: "b0",
        b0p: "b0'",
        b01: "b01",
        b01p: "b01'",
        b1: "b1",
        b1p: "b1'",
    }
    graph = space.explore()
    assert len(graph.states) == 7
    got = {
        (names[s], tick, "".join(sorted(e)), names[t])
        for (s, tick, e), t in graph.transitions.items()
    }
    assert got == _paper_edges_ta_opaque()


def test_reconstruct_belief_automaton_two_clock_variant():
    """The two-clock published figure: 15 states (bottom included) and the
    full edge set; the lasso returns to the (2,3) interval beliefs."""
    space = load_space("ta_opaque2")
    seq = {}
    seq["b0"], seq["b0'"] = space.initial(A), space.initial(NONE)
    chain = [
        ("b(0,1)", "b(0,1)'", "b0"),
        ("b1", "b1'", "b(0,1)"),
        ("b(1,2)", "b(1,2)'", "b1"),
        ("b2", "b2'", "b(1,2)"),
        ("b(2,3)", "b(2,3)'", "b2"),
        ("b3", "b3'", "b(2,3)"),
    ]
    for with_a, without, src in chain:
        seq[with_a] = space.successor(seq[src], "1", A)
        seq[without] = space.successor(seq[src], "1", NONE)
    assert len(set(seq.values())) == 14
    names = {belief: name for name, belief in seq.items()}
    names[BOTTOM] = "bot"
    graph = space.explore()
    assert len(graph.states) == 15
    got = {
        (names[s], tick, "".join(sorted(e)), names[t])
        for (s, tick, e), t in graph.transitions.items()
    }
    expected = {("bot", "0", "a", "b0"), ("bot", "0", "", "b0'")}
    ladder = ["b0", "b(0,1)", "b1", "b(1,2)", "b2", "b(2,3)", "b3"]
    for i, rung in enumerate(ladder):
        nxt = ladder[i + 1] if i + 1 < len(ladder) else "b(2,3)"
        for src in (rung, rung + "'"):
            expected.add((src, "1", "a", nxt))
            expected.add((src, "1", "", nxt + "'"))
    for rung in ("b(0,1)", "b(1,2)", "b(2,3)"):
        expected.add((rung, "0+", "a", rung))
        expected.add((rung, "0+", "", rung + "'"))
        expected.add((rung + "'", "0+", "a", rung))
        expected.add((rung + "'", "0+", "", rung + "'"))
    assert got == expected


def test_two_clock_belief_contents_match_published_lists():
    space = load_space("ta_opaque2")

    def proj(b):
        return sorted(
            {
                (
                    r.location,
                    -1 if r.ints[0] is None else r.ints[0],
                    -1 if r.ints[1] is None else r.ints[1],
                )
                for r in b
            }
        )

    b0 = space.initial(A)
    b01 = space.successor(b0, "1", A)
    b1 = space.successor(b01, "1", A)
    b1p = space.successor(b01, "1", NONE)
    b12 = space.successor(b1, "1", A)
    b2 = space.successor(b12, "1", A)
    b2p = space.successor(b12, "1", NONE)
    b23p = space.successor(b2, "1", NONE)
    b3p = space.successor(b23p, "1", NONE)
    assert proj(b0) == [("l0", 0, 0), ("lf", 0, 0), ("lpriv", 0, 0)]
    assert proj(b1p) == [("l0", 0, 1), ("l0", 1, 1), ("lpriv", 0, 1), ("lpriv", 1, 1)]
    assert proj(b12) == [("l0", 0, 1), ("lf", 0, 1), ("lpriv", -1, 1), ("lpriv", 0, 1)]
    assert proj(b2p) == [
        ("l0", 0, 2),
        ("l0", 1, 2),
        ("lf^p", 0, 2),
        ("lpriv", -1, 2),
        ("lpriv", 0, 2),
        ("lpriv", 1, 2),
    ]
    assert proj(b23p) == [("l0", 0, -1)]
    assert proj(b3p) == [("l0", 0, -1), ("l0", 1, -1)]


def test_initial_belief_singleton_without_zero_time_moves():
    from conftest import mortal_ta

    space = BeliefSpace(RegionContext(prepare(mortal_ta())))
    assert space.initial(NONE) == frozenset({space.ctx.initial_region()})


def test_strict_initial_closure_drops_silent_zero_edges():
    from etopaq.ta import (
        Action,
        Atom,
        Clock,
        Edge,
        SILENT,
        TimedAutomaton,
        make_finals_urgent,
    )

    u = Action("u", "uncontrollable")
    a = Action("a", "controllable")
    ta = make_finals_urgent(
        TimedAutomaton(
            name="eps0",
            actions=(a, u),
            locations=("l0", "lp", "lmid", "lf"),
            invariants={},
            init="l0",
            private="lp",
            finals=frozenset({"lf"}),
            clocks=(Clock(0, "x"),),
            edges=(
                Edge("l0", (Atom(0, "=", 0),), SILENT, frozenset(), "lmid"),
                Edge("lmid", (Atom(0, "=", 0),), u, frozenset(), "lf"),
            ),
        )
    )
    lax = BeliefSpace(RegionContext(prepare(ta)))
    strict = BeliefSpace(RegionContext(prepare(ta)), silent_in_initial=False)
    assert {r.location for r in lax.initial(NONE)} == {"l0", "lmid", "lf"}
    assert {r.location for r in strict.initial(NONE)} == {"l0"}
    # the flag only affects the initial instant: successors of the same
    # belief agree across both variants, silent edges included
    b = lax.initial(NONE)
    assert strict.successor(b, "1", NONE) == lax.successor(b, "1", NONE)
    assert {r.location for r in lax.successor(b, "1", NONE)} >= {"lmid"}
