"""Beliefs: the sets of regions an execution-time observer considers
possible, and their successor relation.

A belief transition bundles one delay step per member region (tagged '0+' or
'1' by how the tick clock's fractional part moved) with a closure under
zero-time actions and further off-integer delays.  The pre-initial state is a
dedicated bottom marker; the only moves out of it are zero-time closures of
the initial region.  The empty belief is kept as an absorbing dead state so
time can still be counted through intervals where no run survives.
"""
from __future__ import annotations

from typing import Iterable

from .regions import Region, RegionContext, encode
from .ta import SILENT_KIND

Belief = frozenset  # frozenset[Region]

BOTTOM = "__bottom__"
DEAD: Belief = frozenset()

TICKS = ("0+", "1")


class BeliefSpace:
    """Belief construction and predicates for one prepared automaton.

    ``silent_in_initial`` keeps silent edges inside the zero-time closure of
    the initial instant; the strict variant drops them there (they are always
    allowed later).
    """

    def __init__(self, ctx: RegionContext, silent_in_initial: bool = True):
        self.ctx = ctx
        self.silent_in_initial = silent_in_initial
        self.controllable = tuple(sorted(ctx.ta.controllable))
        self.uncontrollable = frozenset(ctx.ta.uncontrollable)
        self._succ: dict[tuple[Belief, str, frozenset[str]], Belief] = {}
        self._init: dict[frozenset[str], Belief] = {}
        self._subsets: tuple[frozenset[str], ...] | None = None

    # -- label helpers -------------------------------------------------------

    def enabled_sets(self) -> tuple[frozenset[str], ...]:
        """All controllable subsets, smallest first, then lexicographic."""
        if self._subsets is None:
            names = self.controllable
            out = [
                frozenset(n for i, n in enumerate(names) if mask >> i & 1)
                for mask in range(1 << len(names))
            ]
            self._subsets = tuple(
                sorted(out, key=lambda s: (len(s), tuple(sorted(s))))
            )
        return self._subsets

    def _action_allowed(self, action, enabled: frozenset[str], silent_ok: bool) -> bool:
        if action.kind == SILENT_KIND:
            return silent_ok
        return action.name in self.uncontrollable or action.name in enabled

    # -- construction --------------------------------------------------------

    def _closure(
        self,
        seed: Iterable[Region],
        enabled: frozenset[str],
        allow_offinteger_delay: bool,
        silent_ok: bool = True,
    ) -> Belief:
        seen = set(seed)
        todo = list(seen)
        while todo:
            r = todo.pop()
            for action, r2 in self.ctx.discrete_steps(r):
                if self._action_allowed(action, enabled, silent_ok) and r2 not in seen:
                    seen.add(r2)
                    todo.append(r2)
            if allow_offinteger_delay:
                for tag, r2 in self.ctx.delay_steps(r):
                    if tag == "0+" and r2 not in seen:
                        seen.add(r2)
                        todo.append(r2)
        return frozenset(seen)

    def initial(self, enabled: frozenset[str]) -> Belief:
        """Zero-time closure of the initial region under enabled and
        uncontrollable actions."""
        enabled = frozenset(enabled)
        cached = self._init.get(enabled)
        if cached is None:
            cached = self._closure(
                [self.ctx.initial_region()],
                enabled,
                allow_offinteger_delay=False,
                silent_ok=self.silent_in_initial,
            )
            self._init[enabled] = cached
        return cached

    def successor(self, belief: Belief, tick: str, enabled: frozenset[str]) -> Belief:
        """One delay step tagged ``tick`` per member region, then closure.
        The result may be the dead belief."""
        if tick not in TICKS:
            raise ValueError(f"bad tick {tick!r}")
        enabled = frozenset(enabled)
        key = (belief, tick, enabled)
        cached = self._succ.get(key)
        if cached is None:
            seed = [
                r2
                for r in belief
                for tag, r2 in self.ctx.delay_steps(r)
                if tag == tick
            ]
            cached = self._closure(seed, enabled, allow_offinteger_delay=True)
            self._succ[key] = cached
        return cached

    # -- leak predicates -----------------------------------------------------

    def has_private_final(self, belief: Belief) -> bool:
        return any(
            self.ctx.is_final(r) and self.ctx.is_secret(r) for r in belief
        )

    def has_public_final(self, belief: Belief) -> bool:
        return any(
            self.ctx.is_final(r) and self.ctx.is_public(r) for r in belief
        )

    def leaking_full(self, belief: Belief) -> bool:
        """Exactly one kind of final (private or public) is reachable."""
        return self.has_private_final(belief) != self.has_public_final(belief)

    def leaking_weak(self, belief: Belief) -> bool:
        """A private final is reachable but no public final is."""
        return self.has_private_final(belief) and not self.has_public_final(belief)

    def finals_present(self, belief: Belief) -> bool:
        return any(self.ctx.is_final(r) for r in belief)

    # -- exploration ----------------------------------------------------------

    def explore(self, include_dead: bool = False) -> "BeliefGraph":
        """Breadth-first materialization of the reachable belief graph,
        all enabled-set labels considered."""
        subsets = self.enabled_sets()
        transitions: dict[tuple[object, str, frozenset[str]], object] = {}
        states: list[object] = [BOTTOM]
        seen: set[object] = {BOTTOM}
        queue: list[object] = [BOTTOM]
        while queue:
            b = queue.pop(0)
            moves: list[tuple[str, frozenset[str], object]] = []
            if b is BOTTOM:
                for e in subsets:
                    moves.append(("0", e, self.initial(e)))
            elif b == DEAD:
                for tick in TICKS:
                    for e in subsets:
                        moves.append((tick, e, DEAD))
            else:
                for tick in TICKS:
                    for e in subsets:
                        moves.append((tick, e, self.successor(b, tick, e)))
            for tick, e, b2 in moves:
                if b2 == DEAD and not include_dead:
                    continue
                transitions[(b, tick, e)] = b2
                if b2 not in seen:
                    seen.add(b2)
                    states.append(b2)
                    queue.append(b2)
        return BeliefGraph(self, tuple(states), transitions)


class BeliefGraph:
    def __init__(self, space: BeliefSpace, states, transitions):
        self.space = space
        self.states = states
        self.transitions = transitions

    def edge_set(self) -> set[tuple[object, str, frozenset[str], object]]:
        return {(b, t, e, b2) for (b, t, e), b2 in self.transitions.items()}


def belief_key(belief: Belief) -> tuple:
    """Canonical sorted encoding, for stable naming and ordering."""
    return tuple(sorted(encode(r) for r in belief))
