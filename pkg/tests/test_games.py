"""Round-based games on DFAs: fixpoints, extracted strategies, duality."""

import random

from plansynth.dfa import Dfa, accepts, complement, dfa_false, dfa_true
from plansynth.compiler import compile_formula
from plansynth.games import (
    AgentStrategy,
    EnvStrategy,
    agent_ranks,
    agent_realizable,
    env_realizable,
    env_safe,
    play,
)
from plansynth.logic import parse_formula

from helpers import XY, random_dfa


def assert_agent_strategy_wins(m: Dfa, strat: AgentStrategy) -> None:
    """The strategy must stop, with an accepted trace, against EVERY environment."""
    bound = m.n_states + 2
    vt = m.vt

    def walk(mem: int, q: int, depth: int) -> None:
        assert depth <= bound, "agent strategy does not force a timely stop"
        for e in range(vt.n_env_states):
            action, mem2 = strat.step(mem, e)
            if action is None:
                assert depth > 0, "stopped on the empty trace"
                assert q in m.finals, "stopped outside the accepted language"
            else:
                walk(mem2, m.transitions[q][vt.joint(e, action)], depth + 1)

    walk(strat.initial, m.initial, 0)


def assert_env_strategy_wins(m: Dfa, strat) -> None:
    """Every prefix of every play against the strategy must be accepted."""
    vt = m.vt
    seen = set()

    def walk(mem, out: int, q: int) -> None:
        key = (mem, out, q)
        if key in seen:
            return
        seen.add(key)
        for a in range(vt.n_actions):
            t = m.transitions[q][vt.joint(out, a)]
            assert t in m.finals, "environment let a prefix fall out of the language"
            out2, mem2 = strat.step(mem, a)
            walk(mem2, out2, t)

    walk(strat.initial, strat.first_output, m.initial)


def random_env_strategy(rng, vt, n_memory: int = 3) -> EnvStrategy:
    table = {
        (mem, a): (rng.randrange(vt.n_env_states), rng.randrange(n_memory))
        for mem in range(n_memory)
        for a in range(vt.n_actions)
    }
    return EnvStrategy(vt, n_memory, 0, rng.randrange(vt.n_env_states), table)


def test_agent_fixpoint_ranks():
    m = compile_formula(XY, parse_formula("F x", XY))
    ranks, _ = agent_ranks(m)
    assert {q for q, r in ranks.items() if r == 0} == m.finals
    assert set(ranks) == set(range(m.n_states))  # agent can always reach x


def test_agent_extracted_strategies_win():
    rng = random.Random(41)
    realized = 0
    for _ in range(60):
        m = random_dfa(rng, XY, 6)
        ok, region, strat = agent_realizable(m)
        assert {q for q, r in region.ranks.items() if r == 0} == m.finals & region.states
        if ok:
            realized += 1
            assert_agent_strategy_wins(m, strat)
            # answers never climb in rank and strictly descend the order in
            # which states entered the fixpoint, so plays cannot cycle
            pos = {q: i for i, q in enumerate(region.ranks)}
            for (mem, _e), (action, nxt) in strat.table.items():
                if action is not None and mem != strat.initial:
                    assert region.ranks[nxt] <= region.ranks[mem]
                    assert pos[nxt] < pos[mem]
        else:
            assert strat is None
    assert realized > 5


def test_equal_rank_answers_cannot_cycle():
    # two states of the same sweep each hold a winning answer into the other;
    # an extraction choosing by rank alone would bounce between them forever
    m = Dfa(XY, (
        (0, 0, 0, 0),  # goal
        (0, 0, 4, 4),  # both answers from here win immediately
        (3, 0, 1, 4),  # tempts the agent toward its same-rank twin
        (2, 2, 4, 4),  # the twin, whose only winning answers point back
        (4, 4, 4, 4),  # dead
    ), 2, frozenset({0}))
    ok, _, strat = agent_realizable(m)
    assert ok
    assert_agent_strategy_wins(m, strat)


def test_env_extracted_strategies_win():
    rng = random.Random(42)
    realized = 0
    for _ in range(60):
        m = random_dfa(rng, XY, 6)
        ok, region, strat = env_realizable(m)
        assert set(region.ranks.values()) <= {0}
        if ok:
            realized += 1
            assert m.initial in region.states
            assert_env_strategy_wins(m, strat)
        else:
            assert strat is None
    assert realized > 5


def test_duality_on_random_automata():
    rng = random.Random(43)
    outcomes = set()
    for _ in range(60):
        m = random_dfa(rng, XY, 6)
        ok_env, _, _ = env_realizable(m)
        ok_agent, _, _ = agent_realizable(complement(m))
        assert ok_env == (not ok_agent)
        outcomes.add(ok_env)
    assert outcomes == {True, False}


def test_agent_needs_one_completed_round():
    # the initial state is accepting but every move is losing: the agent
    # cannot win by stopping immediately, because the empty trace never counts
    dead = Dfa(XY, ((1, 1, 1, 1), (1, 1, 1, 1)), 0, frozenset({0}))
    ok, _, strat = agent_realizable(dead)
    assert not ok and strat is None


def test_trivial_games():
    ok, _, _ = agent_realizable(dfa_true(XY))
    assert ok
    ok, _, _ = agent_realizable(dfa_false(XY))
    assert not ok
    ok, _, _ = env_realizable(dfa_true(XY))
    assert ok
    ok, _, _ = env_realizable(dfa_false(XY))
    assert not ok


def test_env_first_move_is_forced_by_implication():
    # under y -> x the only safe opening is to keep y false: play y and the
    # agent may answer with x false, breaking the first prefix
    m = compile_formula(XY, parse_formula("y -> x", XY))
    ok, region, strat = env_realizable(m)
    assert ok
    assert strat.first_output == 0
    row = m.transitions[m.initial]
    safe_moves = [
        e
        for e in range(XY.n_env_states)
        if all(
            row[XY.joint(e, a)] in m.finals and row[XY.joint(e, a)] in region.states
            for a in range(XY.n_actions)
        )
    ]
    assert safe_moves == [0]


def test_conditional_goal_game_is_realizable():
    # assumption y -> x, goal y -> !x: the agent wins the implication game by
    # answering x, which breaks the assumption unless the environment kept y
    # false, in which case the goal is vacuous
    f = parse_formula("(y -> x) -> (y -> !x)", XY)
    ok, _, strat = agent_realizable(compile_formula(XY, f))
    assert ok
    assert_agent_strategy_wins(compile_formula(XY, f), strat)


def test_play_against_random_environments():
    rng = random.Random(44)
    checked = 0
    for _ in range(40):
        m = random_dfa(rng, XY, 5)
        ok, _, strat = agent_realizable(m)
        if not ok:
            continue
        checked += 1
        for _ in range(5):
            trace, halted = play(strat, random_env_strategy(rng, XY))
            assert halted
            assert accepts(m, trace)
    assert checked > 5


def test_play_extracted_env_against_extracted_agent():
    # when both sides can realize the same language the play never violates it
    rng = random.Random(45)
    both = 0
    for _ in range(60):
        m = random_dfa(rng, XY, 5)
        ok_a, _, agent = agent_realizable(m)
        ok_e, _, env = env_realizable(m)
        if not (ok_a and ok_e):
            continue
        both += 1
        trace, halted = play(agent, env)
        assert halted and accepts(m, trace)
    assert both > 3


def test_missing_row_reads_as_stop():
    strat = AgentStrategy(XY, 1, 0, {})
    assert strat.step(0, 1) == (None, 0)


def test_safe_set_is_a_fixpoint():
    rng = random.Random(46)
    for _ in range(30):
        m = random_dfa(rng, XY, 6)
        safe, _ = env_safe(m)
        for q in safe:
            row = m.transitions[q]
            assert any(
                all(
                    row[XY.joint(e, a)] in m.finals and row[XY.joint(e, a)] in safe
                    for a in range(XY.n_actions)
                )
                for e in range(XY.n_env_states)
            )
