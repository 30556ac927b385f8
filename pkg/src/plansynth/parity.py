"""Deterministic parity automata on infinite words, and the games they induce.

Acceptance is max-parity: a run is accepting when the highest state color
visited infinitely often is even.  Boolean combinations of two parity
automata go through a latest-appearance record over the joint color alphabet,
which turns the product's Muller condition back into a parity condition.

The induced games use the same round protocol as the finite case — the
environment reveals an environment state, the agent answers with an action —
but the play never stops, and winning means the infinite joint trace is
accepted.  Either participant can be cast as the accepting player, so
realizability for the two sides comes from two independently built arenas
rather than from complementing one solution.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass

from .dfa import CONNECTIVES, EXPLICIT_VAR_LIMIT, _check_same_vt
from .errors import LimitExceeded, VocabularyMismatch
from .games import AgentStrategy, EnvStrategy
from .logic import VarTable

COMBINE_STATE_LIMIT = 1_000_000
COMBINE_COLOR_LIMIT = 8


@dataclass(frozen=True)
class Dpw:
    """Total deterministic parity automaton; colors[q] is the color of q."""

    vt: VarTable
    transitions: tuple[tuple[int, ...], ...]
    initial: int
    colors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(tuple(row) for row in self.transitions))
        object.__setattr__(self, "colors", tuple(self.colors))
        if self.vt.n_vars > EXPLICIT_VAR_LIMIT:
            raise LimitExceeded(
                f"{self.vt.n_vars} variables; explicit alphabets stop at {EXPLICIT_VAR_LIMIT}"
            )
        n = len(self.transitions)
        if n == 0:
            raise ValueError("automata need at least one state")
        nsym = self.vt.n_symbols
        for row in self.transitions:
            if len(row) != nsym or any(not 0 <= t < n for t in row):
                raise ValueError("transition table must be total over states and symbols")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        if len(self.colors) != n or any(c < 0 for c in self.colors):
            raise ValueError("need one nonnegative color per state")

    @property
    def n_states(self) -> int:
        return len(self.transitions)


def accepts_lasso(m: Dpw, prefix, loop) -> bool:
    """Does m accept the infinite word prefix · loop^ω?"""
    loop = list(loop)
    if not loop:
        raise ValueError("lasso loop must be non-empty")
    nsym = m.vt.n_symbols
    for sym in list(prefix) + loop:
        if not 0 <= sym < nsym:
            raise VocabularyMismatch(f"symbol {sym} outside the joint alphabet")
    q = m.initial
    for sym in prefix:
        q = m.transitions[q][sym]
    seen: dict[tuple[int, int], int] = {}
    visited: list[int] = []
    idx = 0
    while (q, idx) not in seen:
        seen[(q, idx)] = len(visited)
        visited.append(q)
        q = m.transitions[q][loop[idx]]
        idx = (idx + 1) % len(loop)
    start = seen[(q, idx)]
    return max(m.colors[s] for s in visited[start:]) % 2 == 0


def normalize_colors(m: Dpw) -> Dpw:
    """Smallest equivalent coloring: collapse consecutive same-parity colors."""
    used = sorted(set(m.colors))
    mapping: dict[int, int] = {}
    current = used[0] % 2
    for c in used:
        if c % 2 != current % 2:
            current += 1
        mapping[c] = current
    return Dpw(m.vt, m.transitions, m.initial, tuple(mapping[c] for c in m.colors))


def dpw_complement(m: Dpw) -> Dpw:
    """Accept exactly the words m rejects: shift every color's parity."""
    return normalize_colors(Dpw(m.vt, m.transitions, m.initial, tuple(c + 1 for c in m.colors)))


def dpw_combine(m1: Dpw, m2: Dpw, connective: str) -> Dpw:
    """Boolean combination of two parity automata, as a parity automaton.

    The product emits, on every step, the colors of the two successor states,
    tagged by side.  A latest-appearance record over these tagged colors is
    carried in the state: the emitted pair moves to the front, and the hit
    position h (the larger of the two old positions) plus whether the first h
    record entries form a good set for the connective determine the state
    color as 2h or 2h+1.  The tagged colors seen infinitely often then sit at
    the front of the record at the maximal recurring h, so the biggest
    recurring color is even exactly when the combination accepts.
    """
    _check_same_vt(m1, m2)
    test = CONNECTIVES[connective]
    m1 = normalize_colors(m1)
    m2 = normalize_colors(m2)
    alphabet = sorted({("L", c) for c in m1.colors} | {("R", c) for c in m2.colors})
    d = len(alphabet)
    if d > COMBINE_COLOR_LIMIT:
        raise LimitExceeded(f"{d} tagged colors; products stop at {COMBINE_COLOR_LIMIT}")

    def good(window) -> bool:
        c1 = max(c for tag, c in window if tag == "L")
        c2 = max(c for tag, c in window if tag == "R")
        return test(c1 % 2 == 0, c2 % 2 == 0)

    nsym = m1.vt.n_symbols
    start = (m1.initial, m2.initial, tuple(alphabet), d)
    index = {start: 0}
    order = [start]
    rows = []
    queue = deque([start])
    while queue:
        q1, q2, record, _ = queue.popleft()
        row = []
        for sym in range(nsym):
            t1 = m1.transitions[q1][sym]
            t2 = m2.transitions[q2][sym]
            left = ("L", m1.colors[t1])
            right = ("R", m2.colors[t2])
            h = max(record.index(left), record.index(right)) + 1
            moved = (left, right) + tuple(x for x in record if x != left and x != right)
            target = (t1, t2, moved, h)
            if target not in index:
                if len(index) >= COMBINE_STATE_LIMIT:
                    raise LimitExceeded("parity product exceeded the state guard")
                index[target] = len(order)
                order.append(target)
                queue.append(target)
            row.append(index[target])
        rows.append(row)
    colors = tuple(
        2 * h if good(record[:h]) else 2 * h + 1 for _, _, record, h in order
    )
    return normalize_colors(Dpw(m1.vt, tuple(tuple(r) for r in rows), 0, colors))


# --- parity game solving ---------------------------------------------------


def _attract(alive, succ, pred, owner, player, base):
    """Player's attractor to base within alive, with the attraction moves.

    Nodes of the player join when some successor is attracted (recording that
    move); opposing nodes join when every alive successor is.
    """
    attr = set(base)
    strat: dict[int, int] = {}
    pending: dict[int, int] = {}
    queue = deque(sorted(base))
    while queue:
        u = queue.popleft()
        for v in pred[u]:
            if v not in alive or v in attr:
                continue
            if owner[v] == player:
                attr.add(v)
                strat[v] = u
                queue.append(v)
            else:
                if v not in pending:
                    pending[v] = sum(1 for w in succ[v] if w in alive)
                pending[v] -= 1
                if pending[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strat


def solve_game(succ, owner, priority):
    """Zielonka's algorithm with positional strategies for both players.

    Player 0 wins per max-parity: the highest priority visited infinitely
    often along the play must be even.  Returns (win0, win1, moves0, moves1),
    where moves are per-node choices covering each player's own nodes inside
    their winning region.  Assumes a total game graph (no dead ends), which
    attractor removal preserves.
    """
    n = len(succ)
    pred: list[list[int]] = [[] for _ in range(n)]
    for v, targets in enumerate(succ):
        for w in targets:
            pred[w].append(v)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 3 * n + 200))

    def solve(alive: set[int]):
        if not alive:
            return set(), set(), {}, {}
        p = max(priority[v] for v in alive)
        i = p % 2
        top = {v for v in alive if priority[v] == p}
        region_a, strat_a = _attract(alive, succ, pred, owner, i, top)
        w0, w1, s0, s1 = solve(alive - region_a)
        win_me, strat_me = (w0, s0) if i == 0 else (w1, s1)
        win_op = w1 if i == 0 else w0
        if not win_op:
            strat_me.update(strat_a)
            for v in sorted(top):
                if owner[v] == i and v not in strat_me:
                    strat_me[v] = min(w for w in succ[v] if w in alive)
            full = set(alive)
            return (full, set(), strat_me, {}) if i == 0 else (set(), full, {}, strat_me)
        strat_op = s1 if i == 0 else s0
        region_b, strat_b = _attract(alive, succ, pred, owner, 1 - i, win_op)
        w0b, w1b, s0b, s1b = solve(alive - region_b)
        op_all = (w1b if i == 0 else w0b) | region_b
        op_strat = s1b if i == 0 else s0b
        op_strat.update(strat_b)
        op_strat.update(strat_op)
        me_all = w0b if i == 0 else w1b
        me_strat = s0b if i == 0 else s1b
        if i == 0:
            return me_all, op_all, me_strat, op_strat
        return op_all, me_all, op_strat, me_strat

    return solve(set(range(n)))


def _arena(m: Dpw, env_seeks_even: bool):
    """Bipartite round arena: state nodes then one choice node per (q, e).

    The environment moves at state nodes, the agent at choice nodes; choice
    nodes carry priority 0, which never changes a cycle's maximum.
    """
    vt = m.vt
    n = m.n_states
    n_env = vt.n_env_states

    def choice(q: int, e: int) -> int:
        return n + q * n_env + e

    succ: list[list[int]] = []
    owner: list[int] = []
    priority: list[int] = []
    for q in range(n):
        succ.append([choice(q, e) for e in range(n_env)])
        owner.append(0 if env_seeks_even else 1)
        priority.append(m.colors[q])
    for q in range(n):
        for e in range(n_env):
            succ.append(
                sorted({m.transitions[q][vt.joint(e, a)] for a in range(vt.n_actions)})
            )
            owner.append(1 if env_seeks_even else 0)
            priority.append(0)
    return succ, owner, priority, choice


@dataclass
class ParityRegions:
    """Determinacy partition of the automaton states, with winning moves.

    From agent_states the agent forces acceptance, with agent_moves giving
    its answer to every environment choice there; env_states is the rest,
    where env_moves names the environment's winning choice.
    """

    agent_states: frozenset[int]
    env_states: frozenset[int]
    agent_moves: dict[tuple[int, int], int]
    env_moves: dict[int, int]


def solve_parity_game(m: Dpw) -> ParityRegions:
    """Solve the round game on the automaton with the agent as parity player."""
    m = normalize_colors(m)
    vt = m.vt
    n = m.n_states
    n_env = vt.n_env_states
    succ, owner, priority, choice = _arena(m, env_seeks_even=False)
    win0, win1, moves0, moves1 = solve_game(succ, owner, priority)
    agent_states = frozenset(q for q in range(n) if q in win0)
    env_states = frozenset(q for q in range(n) if q in win1)
    agent_moves = {}
    for q in sorted(agent_states):
        for e in range(n_env):
            target = moves0[choice(q, e)]
            agent_moves[(q, e)] = min(
                a for a in range(vt.n_actions) if m.transitions[q][vt.joint(e, a)] == target
            )
    env_moves = {q: moves1[q] - n - q * n_env for q in sorted(env_states)}
    return ParityRegions(agent_states, env_states, agent_moves, env_moves)


def dpw_agent_realizable(m: Dpw) -> tuple[bool, AgentStrategy | None]:
    """Can the agent force the infinite trace into the accepted language?

    The returned strategy is positional over automaton states: memory is the
    current state, and the table never stops the play.
    """
    vt = m.vt
    regions = solve_parity_game(m)
    if m.initial not in regions.agent_states:
        return False, None
    table: dict[tuple[int, int], tuple[int | None, int]] = {}
    queue = deque([m.initial])
    seen = {m.initial}
    while queue:
        q = queue.popleft()
        for e in range(vt.n_env_states):
            a = regions.agent_moves[(q, e)]
            target = m.transitions[q][vt.joint(e, a)]
            table[(q, e)] = (a, target)
            if target not in seen:
                seen.add(target)
                queue.append(target)
    return True, AgentStrategy(vt, m.n_states, m.initial, table)


def dpw_env_realizable(m: Dpw) -> tuple[bool, EnvStrategy | None]:
    """Can the environment force the infinite trace into the accepted language?

    Solved on its own arena with the environment as the parity player, so the
    answer does not lean on complementation.
    """
    m = normalize_colors(m)
    vt = m.vt
    succ, owner, priority, choice = _arena(m, env_seeks_even=True)
    win0, _, moves0, _ = solve_game(succ, owner, priority)
    if m.initial not in win0:
        return False, None
    n_env = vt.n_env_states

    def chosen(q: int) -> int:
        return moves0[q] - m.n_states - q * n_env

    table: dict[tuple[int, int], tuple[int, int]] = {}
    queue = deque([m.initial])
    seen = {m.initial}
    while queue:
        q = queue.popleft()
        e = chosen(q)
        for a in range(vt.n_actions):
            target = m.transitions[q][vt.joint(e, a)]
            table[(q, a)] = (chosen(target), target)
            if target not in seen:
                seen.add(target)
                queue.append(target)
    return True, EnvStrategy(vt, m.n_states, m.initial, chosen(m.initial), table)
