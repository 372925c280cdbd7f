"""Single-cell table corruption and the soundness re-check for survivors."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .calculus import FormulaKind, check_proof_tree
from .equivalence import BudgetExceeded, equiv
from .tables import LiftError, ProofTables, lift_proof
from .terms import reduce
from .vm import validate

_TABLES = ("terms", "strings", "formulas", "steps")


def mutate_cell(t: ProofTables, rng: random.Random) -> tuple:
    """Copy ``t`` with one cell changed.  Returns ``(mutant, (table, row, col))``."""
    out = t.copy()
    name = rng.choice([n for n in _TABLES if getattr(out, n)])
    rows = getattr(out, name)
    i = rng.randrange(len(rows))
    j = rng.randrange(len(rows[i]))
    v = rows[i][j]
    roll = rng.random()
    if roll < 0.35:
        new = v + rng.choice((-1, 1))
    elif roll < 0.7:
        other = rows[rng.randrange(len(rows))][j]
        new = other if other != v else v + 1
    else:
        new = rng.randrange(max(len(rows), t.n, 8) + 1)
    new = max(new, 0)
    if new == v:
        new = v + 1
    row = list(rows[i])
    row[j] = new
    rows[i] = tuple(row)
    return out, (name, i, j)


@dataclass
class Recheck:
    sound: bool
    reason: str = ""


def recheck_accepted(t: ProofTables) -> Recheck:
    """Independent check of tables the validator accepted.

    Lifts the tables to a step graph, checks every step against any rule of
    the calculus, then confirms the assumed inequality really is false.
    """
    try:
        root = lift_proof(t)
    except LiftError as e:
        return Recheck(False, f"lift failed: {e}")
    v = check_proof_tree(root, t.n, any_rule=True)
    if not v:
        return Recheck(False, f"lifted proof rejected: {v.reason}")
    a = v.assumption
    if a.kind is not FormulaKind.NEQ:
        return Recheck(False, "assumption is not an inequality")
    try:
        if not equiv(reduce(a.p), reduce(a.q), t.n):
            return Recheck(False, "accepted a refutation of a true inequality")
    except BudgetExceeded:
        return Recheck(False, "could not confirm the assumption within budget")
    return Recheck(True)


@dataclass
class MutationStats:
    trials: int = 0
    rejected: int = 0
    accepted_sound: int = 0
    unsound: list = None

    @property
    def rejection_rate(self) -> float:
        return self.rejected / self.trials if self.trials else 0.0


def run_mutations(t: ProofTables, trials: int, seed: int = 0) -> MutationStats:
    rng = random.Random(seed)
    stats = MutationStats(unsound=[])
    for _ in range(trials):
        m, where = mutate_cell(t, rng)
        stats.trials += 1
        if not validate(m, seed=seed):
            stats.rejected += 1
            continue
        r = recheck_accepted(m)
        if r.sound:
            stats.accepted_sound += 1
        else:
            stats.unsound.append((where, r.reason))
    return stats
