"""Shared test fixtures: corpora, random generators, and independent oracles.

Everything here that double-checks the library is written from scratch
against the round protocol itself (safety fixpoints, value iteration,
positional enumeration, AND-OR search), not by calling the code under test.
Library calls appear only to build inputs (compiling formulas, validating
domains) whose own correctness is established by separate exhaustive tests.
"""

from __future__ import annotations

from itertools import product

from plansynth.compiler import compile_formula
from plansynth.dfa import Dfa
from plansynth.domain import Domain
from plansynth.games import AgentStrategy
from plansynth.logic import (
    FALSE,
    TRUE,
    And,
    Atom,
    Always,
    Eventually,
    Formula,
    Next,
    Not,
    Or,
    Release,
    Until,
    VarTable,
    WeakNext,
    conjoin,
    disjoin,
)
from plansynth.parity import Dpw

XY = VarTable(("y",), ("x",))


# --- formula corpus ----------------------------------------------------------


def corpus_formulas(vt: VarTable = XY) -> list[Formula]:
    """Every normal-form formula of nesting depth at most two over the
    variables: literals and constants, one temporal/boolean operator over
    them.  174 formulas for a 1+1 vocabulary."""
    base = [TRUE, FALSE]
    for name in vt.all_vars:
        base += [Atom(name), Not(Atom(name))]
    out = list(base)
    for f in base:
        out += [Next(f), WeakNext(f), Eventually(f), Always(f)]
    for f, g in product(base, repeat=2):
        out += [And(f, g), Or(f, g), Until(f, g), Release(f, g)]
    return out


def distinct_languages(vt: VarTable, formulas) -> list[tuple[Formula, Dfa]]:
    """One (formula, automaton) pair per distinct language, first wins.

    Compilation ends in canonical minimization, so language equality is
    literal equality of the automaton tables.
    """
    seen = {}
    for f in formulas:
        m = compile_formula(vt, f)
        key = (m.transitions, m.initial, m.finals)
        if key not in seen:
            seen[key] = (f, m)
    return list(seen.values())


# --- independent safety / under-assumption oracles ---------------------------


def oracle_safe_set(m: Dfa) -> frozenset[int]:
    """Greatest set S where the environment owns a move keeping every agent
    reply inside S and accepting — recomputed here from the round protocol."""
    vt = m.vt
    safe = set(range(m.n_states))
    while True:
        keep = set()
        for q in safe:
            for e in range(vt.n_env_states):
                succ = [m.transitions[q][vt.joint(e, a)] for a in range(vt.n_actions)]
                if all(t in safe and t in m.finals for t in succ):
                    keep.add(q)
                    break
        if keep == safe:
            return frozenset(safe)
        safe = keep


def oracle_env_realizable(m: Dfa) -> bool:
    return m.initial in oracle_safe_set(m)


def _oracle_safe_moves(m: Dfa, safe: frozenset[int], q: int) -> list[int]:
    vt = m.vt
    moves = []
    for e in range(vt.n_env_states):
        succ = [m.transitions[q][vt.joint(e, a)] for a in range(vt.n_actions)]
        if all(t in safe and t in m.finals for t in succ):
            moves.append(e)
    return moves


def oracle_under_assumption(mw: Dfa, mg: Dfa) -> bool:
    """Can the agent force a halt on a goal-accepted trace against every
    environment that keeps the assumption alive?  Bounded value iteration
    over assumption x goal states, with a stabilization cross-check."""
    vt = mw.vt
    safe = oracle_safe_set(mw)
    if mw.initial not in safe:
        raise ValueError("assumption side is not environment realizable")
    moves = {q: _oracle_safe_moves(mw, safe, q) for q in safe}
    win: set[tuple[int, int]] = set()
    horizon = len(safe) * mg.n_states + 1
    for _ in range(horizon + 1):
        new = set(win)
        for qw, qg in product(safe, range(mg.n_states)):
            if (qw, qg) in new:
                continue
            good = True
            for e in moves[qw]:
                answered = False
                for a in range(vt.n_actions):
                    sym = vt.joint(e, a)
                    qg2 = mg.transitions[qg][sym]
                    if qg2 in mg.finals or (mw.transitions[qw][sym], qg2) in win:
                        answered = True
                        break
                if not answered:
                    good = False
                    break
            if good:
                new.add((qw, qg))
        if new == win:
            break
        win = new
    else:  # pragma: no cover - monotone iteration must stabilize in range
        raise AssertionError("value iteration failed to stabilize")
    return (mw.initial, mg.initial) in win


# --- random structures --------------------------------------------------------


def random_dfa(rng, vt: VarTable, max_states: int = 6) -> Dfa:
    n = rng.randint(1, max_states)
    transitions = tuple(
        tuple(rng.randrange(n) for _ in range(vt.n_symbols)) for _ in range(n)
    )
    finals = frozenset(q for q in range(n) if rng.random() < 0.5)
    return Dfa(vt, transitions, rng.randrange(n), finals)


def random_dpw(rng, vt: VarTable, max_states: int = 6, n_colors: int = 3) -> Dpw:
    n = rng.randint(1, max_states)
    transitions = tuple(
        tuple(rng.randrange(n) for _ in range(vt.n_symbols)) for _ in range(n)
    )
    colors = tuple(rng.randrange(n_colors) for _ in range(n))
    return Dpw(vt, transitions, rng.randrange(n), colors)


def random_lasso(rng, vt: VarTable, max_prefix: int = 3, max_loop: int = 4):
    prefix = [rng.randrange(vt.n_symbols) for _ in range(rng.randint(0, max_prefix))]
    loop = [rng.randrange(vt.n_symbols) for _ in range(rng.randint(1, max_loop))]
    return prefix, loop


def random_formula(rng, vt: VarTable, depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.2:
        leaves = [TRUE, FALSE] + [Atom(v) for v in vt.all_vars]
        f = rng.choice(leaves)
        return Not(f) if rng.random() < 0.4 else f
    shape = rng.randrange(10)
    if shape < 5:
        ctor = (Next, WeakNext, Eventually, Always, Not)[shape]
        return ctor(random_formula(rng, vt, depth - 1))
    ctor = (And, Or, Until, Release, Until)[shape - 5]
    return ctor(random_formula(rng, vt, depth - 1), random_formula(rng, vt, depth - 1))


# --- random domains and their direct semantics --------------------------------


def env_minterm(vt: VarTable, state: int, primed: bool = False) -> Formula:
    literals = []
    for i, name in enumerate(vt.env_vars):
        atom = Atom(VarTable.primed(name)) if primed else Atom(name)
        literals.append(atom if state >> i & 1 else Not(atom))
    return conjoin(literals)


def pair_minterm(vt: VarTable, state: int, action: int) -> Formula:
    literals = [env_minterm(vt, state)]
    for i, name in enumerate(vt.agent_vars):
        atom = Atom(name)
        literals.append(atom if action >> i & 1 else Not(atom))
    return conjoin(literals)


def random_domain(rng, n_env: int, n_agent: int, max_effects: int = 3):
    """A random valid compact domain plus the explicit sets it encodes.

    Returns (domain, init_states, pre_pairs, delta) where the last three are
    the generator's own record, usable as an oracle for anything the library
    derives from the domain.
    """
    vt = VarTable(
        tuple(f"p{i}" for i in range(n_env)),
        tuple(f"m{i}" for i in range(n_agent)),
    )
    n_states, n_actions = vt.n_env_states, vt.n_actions
    init_states = frozenset(rng.sample(range(n_states), rng.randint(1, n_states)))
    delta: dict[tuple[int, int], tuple[int, ...]] = {}
    for s in range(n_states):
        n_avail = 1 + (rng.randrange(n_actions) if rng.random() < 0.5 else 0)
        for a in rng.sample(range(n_actions), min(n_avail, n_actions)):
            width = rng.randint(1, min(max_effects, n_states))
            delta[(s, a)] = tuple(sorted(rng.sample(range(n_states), width)))
    pre_pairs = frozenset(delta)
    init = disjoin([env_minterm(vt, s) for s in sorted(init_states)])
    pre = disjoin([pair_minterm(vt, s, a) for s, a in sorted(pre_pairs)])
    step = disjoin([
        And(pair_minterm(vt, s, a),
            disjoin([env_minterm(vt, t, primed=True) for t in effects]))
        for (s, a), effects in sorted(delta.items())
    ])
    return Domain(vt, init, pre, step), init_states, pre_pairs, delta


def domain_consistent(vt: VarTable, init_states, pre_pairs, delta, trace) -> bool:
    """Direct reading of 'the environment behaved like the domain': starts in
    an initial state and follows the transitions, except that one unavailable
    agent action releases it from all further constraints."""
    if not trace:
        return False
    if vt.env_part(trace[0]) not in init_states:
        return False
    for i, sym in enumerate(trace):
        s, a = vt.env_part(sym), vt.agent_part(sym)
        if (s, a) not in pre_pairs:
            return True
        if i + 1 == len(trace):
            return True
        if vt.env_part(trace[i + 1]) not in delta[(s, a)]:
            return False
    return True


def all_traces(vt: VarTable, max_len: int):
    for length in range(1, max_len + 1):
        yield from product(range(vt.n_symbols), repeat=length)


# --- parity oracle: positional enumeration ------------------------------------


def parity_regions_oracle(m: Dpw) -> tuple[frozenset[int], frozenset[int]]:
    """Winning automaton states for the agent (seeking an even top color)
    and the environment, by brute force over every positional agent map.

    The round arena is rebuilt here: a state node per automaton state
    (environment picks a move), a choice node per (state, move) pair (agent
    picks an action), colors carried by state nodes.  A state is
    agent-winning iff some positional map leaves no odd-dominated cycle
    reachable from it.
    """
    vt = m.vt
    n, n_env, n_act = m.n_states, vt.n_env_states, vt.n_actions
    total = n + n * n_env
    prio = list(m.colors) + [0] * (n * n_env)
    state_succ = [0] * n
    for q in range(n):
        for e in range(n_env):
            state_succ[q] |= 1 << (n + q * n_env + e)
    choice_target_masks = [
        [1 << m.transitions[q][vt.joint(e, a)] for a in range(n_act)]
        for q in range(n) for e in range(n_env)
    ]
    odd_colors = sorted({c for c in m.colors if c % 2 == 1})
    allowed_mask = {
        p: sum(1 << v for v in range(total) if prio[v] <= p) for p in odd_colors
    }
    top_nodes = {
        p: [v for v in range(total) if prio[v] == p] for p in odd_colors
    }

    agent_win: set[int] = set()
    for assign in product(range(n_act), repeat=n * n_env):
        succ = state_succ + [choice_target_masks[c][a] for c, a in enumerate(assign)]
        bad = 0
        for p in odd_colors:
            allowed = allowed_mask[p]
            for v in top_nodes[p]:
                reach = 0
                frontier = succ[v] & allowed
                while frontier & ~reach:
                    fresh = frontier & ~reach
                    reach |= fresh
                    frontier = 0
                    while fresh:
                        bit = fresh & -fresh
                        frontier |= succ[bit.bit_length() - 1]
                        fresh ^= bit
                    frontier &= allowed
                if reach >> v & 1:
                    bad |= 1 << v
        lose = bad
        changed = True
        while changed:
            changed = False
            for v in range(total):
                if not lose >> v & 1 and succ[v] & lose:
                    lose |= 1 << v
                    changed = True
        agent_win.update(q for q in range(n) if not lose >> q & 1)
        if len(agent_win) == n:
            break
    return frozenset(agent_win), frozenset(range(n)) - frozenset(agent_win)


# --- strong plans: AND-OR search ----------------------------------------------


def strong_plan_exists(init_states, pre_pairs, delta, goal_states) -> bool:
    """AND-OR reachability search with a path set for cycle detection; only
    wins are memoized (they are path-independent), failures are not."""
    available: dict[int, list[int]] = {}
    for s, a in sorted(pre_pairs):
        available.setdefault(s, []).append(a)
    wins: set[int] = set()

    def search(s: int, path: frozenset[int]) -> bool:
        if s in wins:
            return True
        if s in goal_states:
            wins.add(s)
            return True
        if s in path:
            return False
        deeper = path | {s}
        for a in available.get(s, ()):
            if all(search(t, deeper) for t in delta[(s, a)]):
                wins.add(s)
                return True
        return False

    return all(search(s, frozenset()) for s in sorted(init_states))


# --- round-robin lassos ---------------------------------------------------------


def drive_to_lasso(env, agent_map: dict[int, int]):
    """Run a positional agent map against a deterministic environment until
    the joint configuration repeats; returns (prefix, loop) of joint symbols."""
    vt = env.vt
    seen: dict = {}
    trace: list[int] = []
    memory = env.initial
    while memory not in seen:
        seen[memory] = len(trace)
        pending = memory[0]
        action = agent_map[pending]
        trace.append(vt.joint(pending, action))
        _, memory = env.step(memory, action)
    start = seen[memory]
    return trace[:start], trace[start:]


def fair_loop_ok(vt: VarTable, delta, loop) -> bool:
    """Does the loop schedule every effect of every available pair it
    contains?  (Each occurrence set of a pair must be followed, within the
    loop, by each of that pair's possible successor states.)"""
    k = len(loop)
    for sym in set(loop):
        s, a = vt.env_part(sym), vt.agent_part(sym)
        effects = delta.get((s, a))
        if not effects:
            continue
        followers = {
            vt.env_part(loop[(j + 1) % k]) for j in range(k) if loop[j] == sym
        }
        if not set(effects) <= followers:
            return False
    return True


# --- finite strategy families ---------------------------------------------------


def memoryless_agent_strategies(vt: VarTable):
    """Every one-memory agent strategy: each environment move is answered by
    a fixed action or by halting."""
    options = [None] + list(range(vt.n_actions))
    for picks in product(options, repeat=vt.n_env_states):
        table = {(0, e): (picks[e], 0) for e in range(vt.n_env_states)}
        yield AgentStrategy(vt, 1, 0, table)
