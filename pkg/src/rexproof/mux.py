"""Multiplexing categories: which checking instructions run on which step."""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import LINEAR_RULES, RuleId

MODES = ("default", "none", "full")

_CAT0 = frozenset({RuleId.Symm, RuleId.Trans, RuleId.FunCong2})
_BOOKENDS = frozenset({RuleId.Assume, RuleId.Contra})


@dataclass(frozen=True)
class MuxConfig:
    """A partition of the rules into categories, indexed by catId."""

    mode: str
    categories: tuple

    @classmethod
    def of(cls, mode: str) -> "MuxConfig":
        mode = mode.lower()
        if mode == "default":
            rest = frozenset(RuleId) - _CAT0 - LINEAR_RULES - _BOOKENDS
            cats = (_CAT0, rest, frozenset(LINEAR_RULES),
                    frozenset({RuleId.Assume}), frozenset({RuleId.Contra}))
        elif mode == "full":
            cats = (frozenset(RuleId) - _BOOKENDS,
                    frozenset({RuleId.Assume}), frozenset({RuleId.Contra}))
        elif mode == "none":
            cats = tuple(frozenset({r}) for r in RuleId)
        else:
            raise ValueError(f"unknown mux mode {mode!r}")
        return cls(mode, cats)

    def cat_of(self, rule: RuleId) -> int:
        for i, c in enumerate(self.categories):
            if rule in c:
                return i
        raise KeyError(rule)

    @property
    def assume_cat(self) -> int:
        return self.cat_of(RuleId.Assume)

    @property
    def contra_cat(self) -> int:
        return self.cat_of(RuleId.Contra)

    def sorted_rules(self, cat: int) -> tuple:
        return tuple(sorted(self.categories[cat]))


DEFAULT = MuxConfig.of("default")
FULL = MuxConfig.of("full")
NONE = MuxConfig.of("none")
