"""Inequality claims ``lhs(A, B) <| rhs(A, B)`` and their mini-language."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidInput
from ..means import MeanKind, MeanSpec, evaluate
from ..orders import OrderKind, OrderVerdict, decide


@dataclass(frozen=True)
class InequalityClaim:
    """``lhs(A, B) <| rhs(A, B)`` for one ordering ``<|``.

    Both sides must share the same weight ``alpha``.
    """

    lhs: MeanSpec
    rhs: MeanSpec
    order: OrderKind

    def __post_init__(self):
        if abs(self.lhs.alpha - self.rhs.alpha) > 1e-15:
            raise InvalidInput("both sides of a claim must use the same alpha")

    @property
    def alpha(self) -> float:
        return self.lhs.alpha

    @property
    def needs_nested_support(self) -> bool:
        return self.lhs.kind in (MeanKind.SPECTRAL_GEOMETRIC, MeanKind.SPECTRAL_GEOMETRIC_TILDE)

    def sides(self, A, B):
        return evaluate(self.lhs, A, B), evaluate(self.rhs, A, B)

    def evaluate(self, A, B) -> OrderVerdict:
        X, Y = self.sides(A, B)
        return decide(self.order, X, Y)

    def to_string(self) -> str:
        s = f"{self.lhs.kind.short}:{self.order.value}:{self.alpha:g}:{self.lhs.p:g}:{self.rhs.p:g}"
        if self.rhs.kind is not MeanKind.ARITHMETIC:
            s += f":{self.rhs.kind.short}"
        return s

    @classmethod
    def parse(cls, text: str) -> "InequalityClaim":
        """Parse ``<mean>:<order>:<alpha>:<p>:<q>[:<rhs-mean>]``.

        The right-hand mean defaults to the quasi arithmetic mean with
        exponent ``q``.
        """
        parts = text.strip().split(":")
        if len(parts) not in (5, 6):
            raise InvalidInput(f"claim {text!r} must look like <mean>:<order>:<alpha>:<p>:<q>")
        try:
            alpha, p, q = float(parts[2]), float(parts[3]), float(parts[4])
        except ValueError:
            raise InvalidInput(f"claim {text!r} has non-numeric parameters") from None
        rhs_kind = MeanKind.parse(parts[5]) if len(parts) == 6 else MeanKind.ARITHMETIC
        if MeanKind.KUBO_ANDO in (MeanKind.parse(parts[0]), rhs_kind):
            raise InvalidInput("claims do not support Kubo-Ando means")
        return cls(
            MeanSpec(MeanKind.parse(parts[0]), alpha, p),
            MeanSpec(rhs_kind, alpha, q),
            OrderKind.parse(parts[1]),
        )

    def with_order(self, order: OrderKind) -> "InequalityClaim":
        return InequalityClaim(self.lhs, self.rhs, order)
