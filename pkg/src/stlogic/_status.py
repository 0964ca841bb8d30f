"""Distinguished solver outcomes shared across modules.

These are identity-compared sentinels (`result is UNSAT`); they are falsy
so code holding either an assignment/witness or a sentinel can branch on
truthiness when the positive payload is never empty.
"""


class Status:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return self.name

    def __bool__(self):
        return False


UNSAT = Status("UNSAT")
UNKNOWN = Status("UNKNOWN")
BUDGET_EXCEEDED = Status("BUDGET_EXCEEDED")
INCONSISTENT = Status("INCONSISTENT")
