"""Exception hierarchy shared by every jetcalc module."""

from __future__ import annotations


class JetcalcError(Exception):
    """Base class for all library errors."""


class MalformedInput(JetcalcError, ValueError):
    """Input data has the wrong shape, field or encoding."""


class DimensionMismatch(MalformedInput):
    pass


class AssociativityViolation(JetcalcError):
    def __init__(self, i: int, j: int, k: int):
        self.witness = (i, j, k)
        super().__init__(f"(e{i} e{j}) e{k} != e{i} (e{j} e{k})")


class UnitViolation(JetcalcError):
    def __init__(self, i: int | None, detail: str = ""):
        self.witness = i
        msg = f"unit law fails on basis element e{i}" if i is not None else "no unit element exists"
        super().__init__(msg + (f": {detail}" if detail else ""))


class AxiomViolation(JetcalcError):
    """A bimodule action fails one of its module axioms."""

    def __init__(self, identity: str, triple: tuple):
        self.identity = identity
        self.witness = triple
        super().__init__(f"{identity} fails at basis triple {triple}")


class CentralityViolation(AxiomViolation):
    def __init__(self, pair: tuple):
        super().__init__("a p = p a", pair)


class NoncommutativeBase(JetcalcError):
    """Raised where a construction only makes sense over a commutative algebra."""


class NotFirstOrder(JetcalcError):
    pass


class ActionDescentFailure(JetcalcError):
    pass


class NoSolution(JetcalcError):
    pass


class NonUnique(JetcalcError):
    pass


class InvalidWitness(JetcalcError):
    pass


class InvalidDerivation(JetcalcError):
    pass
