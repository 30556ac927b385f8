"""Turn-based games on DFAs for the finite-trace setting.

Protocol: in every round the environment reveals an environment state first,
then the agent either answers with an action (appending one joint symbol to
the trace) or stops the play.  The environment never stops.

The agent's objective is that the play stops with the accumulated trace
accepted; stopping before the first round completes produces the empty trace,
which is never accepted.  The environment's objective is dual in spirit but
not in form: it must keep every nonempty prefix of the play accepted, because
the agent may stop after any completed round.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .dfa import Dfa
from .logic import VarTable


@dataclass
class AgentStrategy:
    """Finite-memory agent strategy.

    ``table`` maps (memory, env_state) to (action, next_memory); an action of
    None means the agent stops without answering the pending environment
    state.  A missing row is read as stopping too, matching the view of a
    strategy as a partial function of the environment history.
    """

    vt: VarTable
    n_memory: int
    initial: int
    table: dict[tuple[int, int], tuple[int | None, int]]

    def step(self, memory: int, env_state: int) -> tuple[int | None, int]:
        return self.table.get((memory, env_state), (None, memory))


@dataclass
class EnvStrategy:
    """Finite-memory environment strategy.

    The environment opens the play with ``first_output``; afterwards
    ``table`` maps (memory, action) to (next output, next memory).
    """

    vt: VarTable
    n_memory: int
    initial: int
    first_output: int
    table: dict[tuple[int, int], tuple[int, int]]

    def step(self, memory: int, action: int) -> tuple[int, int]:
        return self.table[(memory, action)]


@dataclass
class Region:
    """Winning states of a fixpoint, each with the sweep where it entered.

    Agent game: rank 0 is the accepting states; the extracted strategy never
    increases the rank and strictly descends the order in which states
    entered the fixpoint (ranks iterates in that order), so every play stops
    within n rounds.  Environment game: the whole safe set sits at rank 0.
    """

    ranks: dict[int, int]

    @property
    def states(self) -> frozenset[int]:
        return frozenset(self.ranks)


def agent_ranks(m: Dfa) -> tuple[dict[int, int], int]:
    """Least fixpoint of the agent's winning region, with entry ranks.

    Rank 0 states are accepting (stop and win); a state gets rank i when the
    agent can force, for every environment state, some answer into a state of
    smaller rank.  Returns (rank by state, number of sweeps run).
    """
    vt = m.vt
    ranks = {q: 0 for q in range(m.n_states) if q in m.finals}
    sweeps = 0
    changed = True
    while changed:
        changed = False
        sweeps += 1
        for q in range(m.n_states):
            if q in ranks:
                continue
            row = m.transitions[q]
            if all(
                any(row[vt.joint(e, a)] in ranks for a in range(vt.n_actions))
                for e in range(vt.n_env_states)
            ):
                ranks[q] = sweeps
                changed = True
    return ranks, sweeps


def _agent_answer(m: Dfa, pos: dict[int, int], q: int, e: int) -> tuple[int, int] | None:
    """Winning answer from q to environment state e, if any.

    Picks the successor that entered the fixpoint earliest.  Ranks alone are
    not enough: two states of the same sweep may each hold a winning answer
    into the other, and choosing by rank could then bounce between them
    forever.  Entry order strictly decreases along such answers, because a
    state joins the fixpoint only on the strength of states already in it.
    """
    vt = m.vt
    best = None
    for a in range(vt.n_actions):
        t = m.transitions[q][vt.joint(e, a)]
        if t in pos and (best is None or pos[t] < pos[best[1]]):
            best = (a, t)
    return best


def agent_realizable(m: Dfa) -> tuple[bool, Region, AgentStrategy | None]:
    """Can the agent guarantee stopping inside the accepted language?

    The agent must complete at least one round, so an accepting initial state
    is not enough by itself.  The returned strategy uses the automaton state
    as memory plus one fresh-start token (index ``n_states``) that forbids
    stopping before the first answer; afterwards it stops exactly at
    accepting states.
    """
    vt = m.vt
    ranks, _ = agent_ranks(m)
    region = Region(ranks)
    pos = {q: i for i, q in enumerate(ranks)}
    fresh = m.n_states
    first = {e: _agent_answer(m, pos, m.initial, e) for e in range(vt.n_env_states)}
    if any(ans is None for ans in first.values()):
        return False, region, None
    table: dict[tuple[int, int], tuple[int | None, int]] = {}
    queue = deque()
    seen = set()
    for e, ans in sorted(first.items()):
        a, t = ans
        table[(fresh, e)] = (a, t)
        if t not in seen:
            seen.add(t)
            queue.append(t)
    while queue:
        q = queue.popleft()
        for e in range(vt.n_env_states):
            if q in m.finals:
                table[(q, e)] = (None, q)
                continue
            a, t = _agent_answer(m, pos, q, e)
            table[(q, e)] = (a, t)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return True, region, AgentStrategy(vt, m.n_states + 1, fresh, table)


def env_safe(m: Dfa) -> tuple[frozenset[int], int]:
    """Greatest fixpoint of states the environment can keep perpetually good.

    A state is safe when some environment state forces, for every action, a
    successor that is both accepting and safe.  Returns (safe set, sweeps).
    """
    vt = m.vt
    safe = set(range(m.n_states))
    sweeps = 0
    changed = True
    while changed:
        changed = False
        sweeps += 1
        for q in sorted(safe):
            row = m.transitions[q]
            if not any(
                all(
                    row[vt.joint(e, a)] in m.finals and row[vt.joint(e, a)] in safe
                    for a in range(vt.n_actions)
                )
                for e in range(vt.n_env_states)
            ):
                safe.discard(q)
                changed = True
    return frozenset(safe), sweeps


def env_realizable(m: Dfa) -> tuple[bool, Region, EnvStrategy | None]:
    """Can the environment keep every nonempty prefix accepted?

    The strategy uses the automaton state after each completed round as
    memory and always plays the smallest environment state that stays inside
    the safe region.
    """
    vt = m.vt
    safe, _ = env_safe(m)
    region = Region({q: 0 for q in sorted(safe)})
    if m.initial not in safe:
        return False, region, None

    def choice(q: int) -> int:
        row = m.transitions[q]
        for e in range(vt.n_env_states):
            if all(
                row[vt.joint(e, a)] in m.finals and row[vt.joint(e, a)] in safe
                for a in range(vt.n_actions)
            ):
                return e
        raise AssertionError("safe state without a safe move")

    table: dict[tuple[int, int], tuple[int, int]] = {}
    queue = deque([m.initial])
    seen = {m.initial}
    while queue:
        q = queue.popleft()
        e = choice(q)
        for a in range(vt.n_actions):
            t = m.transitions[q][vt.joint(e, a)]
            table[(q, a)] = (choice(t), t)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return True, region, EnvStrategy(vt, m.n_states, m.initial, choice(m.initial), table)


def play(agent: AgentStrategy, env, max_rounds: int = 10_000) -> tuple[list[int], bool]:
    """Run a play; returns (joint trace, whether the agent stopped).

    ``env`` may be any object with ``initial``, ``first_output`` and
    ``step(memory, action)``.
    """
    vt = agent.vt
    m_ag = agent.initial
    m_env = env.initial
    out = env.first_output
    trace: list[int] = []
    for _ in range(max_rounds):
        action, m_ag = agent.step(m_ag, out)
        if action is None:
            return trace, True
        trace.append(vt.joint(out, action))
        out, m_env = env.step(m_env, action)
    return trace, False
