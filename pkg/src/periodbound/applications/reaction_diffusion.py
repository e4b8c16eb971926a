"""Fractional exponent for ``u_t - Laplace u = f(u, u_x)`` under a growth condition.

If ``|f(t,x) - f(s,y)| <= C (1 + |t-s|^(p-1) + |x-y|^(q-1)) (|t-s| + |x-y|)`` on a
domain in ``R^n``, the Nemytskii operator maps ``D(A^alpha)`` into ``L^2`` with

    alpha = max(n (p - 1) / 4, 1/2 + n (q - 1) / 4),

which is below 1 exactly when ``p < 1 + 4/n`` and ``q < 1 + 2/n``.
"""

from __future__ import annotations

from dataclasses import dataclass

from periodbound.errors import ParameterError


@dataclass(frozen=True)
class ReactionDiffusionGrowth:
    n: int
    p: float
    q: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"dimension n must be a positive integer, got {self.n!r}")
        if not self.p > 1:
            raise ParameterError(f"growth exponent p must exceed 1, got {self.p!r}")
        if not self.q > 1:
            raise ParameterError(f"growth exponent q must exceed 1, got {self.q!r}")

    @property
    def p_valid(self) -> bool:
        return self.p < 1.0 + 4.0 / self.n

    @property
    def q_valid(self) -> bool:
        return self.q < 1.0 + 2.0 / self.n


@dataclass(frozen=True)
class RdAlpha:
    alpha: float
    valid: bool
    p_valid: bool
    q_valid: bool

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "valid": self.valid, "p_valid": self.p_valid, "q_valid": self.q_valid}


def rd_alpha(growth: ReactionDiffusionGrowth) -> RdAlpha:
    n, p, q = growth.n, growth.p, growth.q
    alpha = max(n * (p - 1.0) / 4.0, 0.5 + n * (q - 1.0) / 4.0)
    pv, qv = growth.p_valid, growth.q_valid
    return RdAlpha(alpha=alpha, valid=pv and qv, p_valid=pv, q_valid=qv)
