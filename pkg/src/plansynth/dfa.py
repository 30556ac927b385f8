"""Deterministic finite automata over joint symbols.

The alphabet is always the full set of joint symbols of a VarTable, kept
explicit; vocabularies beyond 16 variables are rejected up front.  Words are
finite symbol sequences, and the empty word is uniformly not accepted by
`accepts`.  Language comparisons are therefore made over non-empty words.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import LimitExceeded, VocabularyMismatch
from .logic import VarTable

EXPLICIT_VAR_LIMIT = 16

CONNECTIVES = {
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
    "implies": lambda a, b: not a or b,
}


@dataclass(frozen=True)
class Dfa:
    """Total DFA; transitions[q][sym] is the successor of q on sym."""

    vt: VarTable
    transitions: tuple[tuple[int, ...], ...]
    initial: int
    finals: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(tuple(row) for row in self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
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
        if any(not 0 <= q < n for q in self.finals):
            raise ValueError("final state out of range")

    @property
    def n_states(self) -> int:
        return len(self.transitions)


def dfa_true(vt: VarTable) -> Dfa:
    """One accepting state; accepts every word."""
    return Dfa(vt, ((0,) * vt.n_symbols,), 0, frozenset({0}))


def dfa_false(vt: VarTable) -> Dfa:
    """One rejecting state; accepts nothing."""
    return Dfa(vt, ((0,) * vt.n_symbols,), 0, frozenset())


def run_dfa(m: Dfa, word) -> int:
    """State reached after reading word from the initial state."""
    state = m.initial
    nsym = m.vt.n_symbols
    for sym in word:
        if not 0 <= sym < nsym:
            raise VocabularyMismatch(f"symbol {sym} outside alphabet of size {nsym}")
        state = m.transitions[state][sym]
    return state


def accepts(m: Dfa, word) -> bool:
    """Word membership; the empty word is never a member."""
    if len(word) == 0:
        return False
    return run_dfa(m, word) in m.finals


def _check_same_vt(m1: Dfa, m2) -> None:
    if m1.vt != m2.vt:
        raise VocabularyMismatch("automata built over different variable tables")


def combine(m1: Dfa, m2: Dfa, connective: str) -> Dfa:
    """Reachable product with finals induced by the boolean connective."""
    _check_same_vt(m1, m2)
    op = CONNECTIVES[connective]
    nsym = m1.vt.n_symbols
    start = (m1.initial, m2.initial)
    index = {start: 0}
    order = [start]
    rows = []
    queue = deque([start])
    while queue:
        q1, q2 = queue.popleft()
        row = []
        for sym in range(nsym):
            target = (m1.transitions[q1][sym], m2.transitions[q2][sym])
            if target not in index:
                index[target] = len(order)
                order.append(target)
                queue.append(target)
            row.append(index[target])
        rows.append(row)
    finals = frozenset(
        i for i, (q1, q2) in enumerate(order) if op(q1 in m1.finals, q2 in m2.finals)
    )
    return Dfa(m1.vt, tuple(tuple(r) for r in rows), 0, finals)


def complement(m: Dfa) -> Dfa:
    return Dfa(m.vt, m.transitions, m.initial, frozenset(range(m.n_states)) - m.finals)


def minimize(m: Dfa) -> Dfa:
    """Minimal DFA for the same language, in a canonical state numbering.

    Trims unreachable states, merges equivalence classes by partition
    refinement, then renumbers classes in breadth-first symbol order, so
    isomorphic inputs produce identical outputs.
    """
    nsym = m.vt.n_symbols

    reach = [m.initial]
    seen = {m.initial}
    for q in reach:
        for sym in range(nsym):
            t = m.transitions[q][sym]
            if t not in seen:
                seen.add(t)
                reach.append(t)
    remap = {q: i for i, q in enumerate(reach)}
    trans = [[remap[m.transitions[q][sym]] for sym in range(nsym)] for q in reach]
    finals = [q in m.finals for q in reach]
    n = len(reach)

    block = [1 if finals[q] else 0 for q in range(n)]
    while True:
        signature = {}
        nxt = []
        for q in range(n):
            sig = (block[q], tuple(block[t] for t in trans[q]))
            if sig not in signature:
                signature[sig] = len(signature)
            nxt.append(signature[sig])
        if nxt == block:
            break
        block = nxt

    n_blocks = max(block) + 1
    rep = {}
    for q in range(n):
        rep.setdefault(block[q], q)
    order = [block[0]]
    seen_b = {block[0]}
    rows: list[list[int]] = []
    for b in order:
        q = rep[b]
        row = []
        for sym in range(nsym):
            tb = block[trans[q][sym]]
            if tb not in seen_b:
                seen_b.add(tb)
                order.append(tb)
            row.append(tb)
        rows.append(row)
    renumber = {b: i for i, b in enumerate(order)}
    table = tuple(tuple(renumber[tb] for tb in row) for row in rows)
    new_finals = frozenset(renumber[b] for b in order if finals[rep[b]])
    return Dfa(m.vt, table, 0, new_finals)


def language_equal(m1: Dfa, m2: Dfa) -> bool:
    """Exact equality of the accepted languages of non-empty words."""
    _check_same_vt(m1, m2)
    nsym = m1.vt.n_symbols
    start = (m1.initial, m2.initial)
    queue = deque([start])
    seen = {start}
    while queue:
        q1, q2 = queue.popleft()
        for sym in range(nsym):
            target = (m1.transitions[q1][sym], m2.transitions[q2][sym])
            # every successor is reached by a non-empty word, so it must agree
            if (target[0] in m1.finals) != (target[1] in m2.finals):
                return False
            if target not in seen:
                seen.add(target)
                queue.append(target)
    return True
