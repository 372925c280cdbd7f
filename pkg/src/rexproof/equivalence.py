"""Language equality by exhaustive derivative search with cycle detection."""

from __future__ import annotations

from typing import Optional

from .terms import Term, derive_char, epsilon_of, normalize

DEFAULT_BUDGET = 10 ** 6


class BudgetExceeded(RuntimeError):
    """The search made more recursive calls than its budget allows."""


def equiv(p: Term, q: Term, n: int, budget: int = DEFAULT_BUDGET,
          trace: Optional[list] = None) -> bool:
    """Decide ``L(p) == L(q)`` over the alphabet ``0..n-1``.

    The visited set is path-local: a pair counts as a cycle only if it was
    met on the way down to the current call.  ``trace``, when given, gets
    one entry per call: ``"equal"``, ``"cycle"``, ``"mismatch"`` or
    ``"expand"``.  Raises :class:`BudgetExceeded` after ``budget`` calls.
    """
    calls = 0
    path = set()

    def go(p, q):
        nonlocal calls
        calls += 1
        if calls > budget:
            raise BudgetExceeded(f"more than {budget} recursive calls")
        p1, q1 = normalize(p), normalize(q)
        if p1 is q1:
            trace is not None and trace.append("equal")
            return True
        key = (p1, q1)
        if key in path:
            trace is not None and trace.append("cycle")
            return True
        # reduce(E(x)) for a regular expression x is exactly epsilon_of(x)
        if normalize(epsilon_of(p1)) is not normalize(epsilon_of(q1)):
            trace is not None and trace.append("mismatch")
            return False
        trace is not None and trace.append("expand")
        path.add(key)
        try:
            for c in range(n):
                if not go(derive_char(c, p1), derive_char(c, q1)):
                    return False
            return True
        finally:
            path.discard(key)

    return go(p, q)
