"""Regular-expression equivalence with checkable proofs.

Pipeline: parse two regexes, decide equivalence with derivatives, build a
coinductive proof, flatten it into four tables, validate the tables.
"""

from .calculus import RuleId, check_proof_tree
from .equivalence import BudgetExceeded, equiv
from .mux import DEFAULT, FULL, NONE, MuxConfig
from .proofgen import NotEquivalent, prove
from .tables import ProofTables, load, lower_proof, save
from .terms import infer_alphabet, parse_regex
from .vm import ValidationReport, validate

__version__ = "0.1.0"

__all__ = ["RuleId", "check_proof_tree", "BudgetExceeded", "equiv", "DEFAULT", "FULL",
           "NONE", "MuxConfig", "NotEquivalent", "prove", "ProofTables", "load",
           "lower_proof", "save", "infer_alphabet", "parse_regex", "ValidationReport",
           "validate"]
