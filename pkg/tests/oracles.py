"""Reference implementations that share no code with the package.

Membership and equivalence go through a Thompson NFA, subset construction
and a breadth-first walk of the product DFA.  String and chain helpers read
raw table rows with plain loops.
"""

from collections import deque

from rexproof.terms import Kind


class NFA:
    def __init__(self):
        self.eps = []
        self.edges = []

    def state(self):
        self.eps.append([])
        self.edges.append([])
        return len(self.eps) - 1


def thompson(p, nfa=None):
    """Build fragments recursively; returns ``(nfa, start, accept)``."""
    nfa = nfa or NFA()

    def build(t):
        s, f = nfa.state(), nfa.state()
        k = t.kind
        if k is Kind.EMPTY:
            pass
        elif k is Kind.BLANK:
            nfa.eps[s].append(f)
        elif k is Kind.CHAR:
            nfa.edges[s].append((t.imm, f))
        elif k is Kind.CONCAT:
            a0, a1 = build(t.x)
            b0, b1 = build(t.y)
            nfa.eps[s].append(a0)
            nfa.eps[a1].append(b0)
            nfa.eps[b1].append(f)
        elif k is Kind.UNION:
            for child in (t.x, t.y):
                c0, c1 = build(child)
                nfa.eps[s].append(c0)
                nfa.eps[c1].append(f)
        elif k is Kind.STAR:
            c0, c1 = build(t.x)
            nfa.eps[s] += [c0, f]
            nfa.eps[c1] += [c0, f]
        else:
            raise ValueError("oracle handles plain regular expressions only")
        return s, f

    s, f = build(p)
    return nfa, s, f


def _closure(nfa, states):
    seen = set(states)
    todo = list(states)
    while todo:
        u = todo.pop()
        for v in nfa.eps[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return frozenset(seen)


def _step(nfa, states, c):
    nxt = [v for u in states for (d, v) in nfa.edges[u] if d == c]
    return _closure(nfa, nxt)


def nfa_matches(p, s) -> bool:
    nfa, start, acc = thompson(p)
    cur = _closure(nfa, [start])
    for c in s:
        cur = _step(nfa, cur, c)
    return acc in cur


def dfa_equivalent(p, q, n) -> bool:
    """Product of the two subset DFAs; any reachable pair disagreeing on
    acceptance is a counterexample."""
    na, sa, fa = thompson(p)
    nb, sb, fb = thompson(q)
    start = (_closure(na, [sa]), _closure(nb, [sb]))
    seen = {start}
    todo = deque([start])
    while todo:
        x, y = todo.popleft()
        if (fa in x) != (fb in y):
            return False
        for c in range(n):
            nxt = (_step(na, x, c), _step(nb, y, c))
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return True


# ------------------------------------------------------- table oracles

def string_at(strings, i, limit=10 ** 6):
    out = []
    while strings[i][2] != 0 and len(out) < limit:
        out.append(strings[i][0])
        i = strings[i][1]
    return tuple(out)


def chain_at(terms, i):
    """Characters of the maximal derivative chain, outermost first, and its base."""
    chars = []
    while terms[i][0] == Kind.DERIV:
        chars.append(terms[i][1])
        i = terms[i][2]
    return chars, i


def naive_reverse(terms, strings, chain, s, base=None) -> bool:
    want = list(string_at(strings, s))
    if base is None:
        chars, _ = chain_at(terms, chain)
        return list(reversed(chars)) == want
    chars = []
    i = chain
    for _ in range(len(want)):
        if terms[i][0] != Kind.DERIV:
            return False
        chars.append(terms[i][1])
        i = terms[i][2]
    return i == base and list(reversed(chars)) == want


def naive_append(strings, sc, s, c) -> bool:
    return string_at(strings, sc) == string_at(strings, s) + (c,)


def sorted_equal(a, b) -> bool:
    return sorted(a) == sorted(b)
