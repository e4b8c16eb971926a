"""Lipschitz and period bounds for the diffusive Lotka-Volterra system.

On the ball of radius ``R`` in ``H^alpha x H^alpha`` (zero-mean Sobolev space,
``alpha = N/2``) the reaction term has Lipschitz constant ``L(R)`` into ``L^2``:

    L(R)^2 = max(B1(R), B2(R)),
    B1(R) = 2 [ |lam|^2 + C^4 R^2 (2 |a|^2 + |b|^2 + |c|^2) ],
    B2(R) = 2 [ |mu|^2  + C^4 R^2 (2 |d|^2 + |b|^2 + |c|^2) ],

with sup norms of the coefficients and ``C`` the embedding constant of
``H^alpha`` in ``L^4``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

from periodbound.bounds import k_alpha
from periodbound.errors import ParameterError


@dataclass(frozen=True)
class LotkaVolterraParams:
    lam: float = 1.0
    mu: float = 1.0
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0
    d: float = 1.0
    C_alpha: float = 1.0
    R: float = 1.0
    N: int = 1
    M: float | None = None

    def __post_init__(self) -> None:
        for name in ("lam", "mu", "a", "b", "c", "d"):
            if not getattr(self, name) >= 0:
                raise ParameterError(f"sup norm {name} must be nonnegative")
        if not self.C_alpha > 0:
            raise ParameterError("embedding constant C_alpha must be positive")
        if not self.R >= 0:
            raise ParameterError("ball radius R must be nonnegative")
        if self.N not in (1, 2, 3):
            raise ParameterError(f"spatial dimension N must be 1, 2 or 3, got {self.N!r}")
        if self.M is not None and not self.M >= 0:
            raise ParameterError("L-infinity orbit bound M must be nonnegative")

    @property
    def alpha(self) -> float:
        return self.N / 2.0


def _b_terms(lam: float, mu: float, a: float, b: float, c: float, d: float, s: float) -> tuple[float, float]:
    cross = b * b + c * c
    return 2.0 * (lam**2 + s * (2.0 * a * a + cross)), 2.0 * (mu**2 + s * (2.0 * d * d + cross))


def lv_lipschitz(params: LotkaVolterraParams) -> float:
    """``L(R) = sqrt(max(B1(R), B2(R)))``."""
    s = params.C_alpha**4 * params.R**2
    b1, b2 = _b_terms(params.lam, params.mu, params.a, params.b, params.c, params.d, s)
    return math.sqrt(max(b1, b2))


def lv_linf_lipschitz(params: LotkaVolterraParams) -> float:
    """Lipschitz constant on an orbit bounded by ``M`` in ``L^infinity``.

    Same algebra as :func:`lv_lipschitz` with ``C^4 R^2`` replaced by ``M^2``,
    using the coefficient sup norms in place of the pointwise ess sup.
    """
    if params.M is None:
        raise ParameterError("the L-infinity variant needs the orbit bound M")
    b1, b2 = _b_terms(params.lam, params.mu, params.a, params.b, params.c, params.d, params.M**2)
    return math.sqrt(max(b1, b2))


@dataclass(frozen=True)
class LvPeriodBound:
    """Both period statements for the Lotka-Volterra system.

    ``direct_relation`` reads ``T**(1-alpha) > 1/(L C)``: for ``alpha < 1`` a lower
    bound ``T > (L C)**(-1/(1-alpha))``, for ``alpha > 1`` an upper bound
    ``T < (L C)**(1/(alpha-1))``, and no constraint on ``T`` at ``alpha = 1``.
    ``theorem_form`` is ``K_alpha L**(-1/(1-alpha))`` and exists only for ``alpha < 1``.
    """

    alpha: float
    lipschitz: float
    direct_relation: str
    direct_form: float | None
    theorem_form: float | None
    warning: str | None = None
    linf_lipschitz: float | None = None
    linf_bound: float | None = None
    linf_constant: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def lv_period_bound(params: LotkaVolterraParams, c: float = 1.0) -> LvPeriodBound:
    """Period bounds from ``L(R)``; ``c`` is the configured constant of ``T > c/L``."""
    L = lv_lipschitz(params)
    alpha = params.alpha
    LC = L * params.C_alpha
    msg = None
    if alpha < 1.0:
        relation, direct = ">", LC ** (-1.0 / (1.0 - alpha))
        theorem = k_alpha(alpha).k_value * L ** (-1.0 / (1.0 - alpha))
    else:
        msg = f"alpha = {alpha:g} is outside [0, 1); theorem form suppressed"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        theorem = None
        if alpha == 1.0:
            relation, direct = "none", None
        else:
            relation, direct = "<", LC ** (1.0 / (alpha - 1.0))

    linf_L = linf_T = None
    if params.M is not None:
        if not c > 0:
            raise ParameterError("the constant c must be positive")
        linf_L = lv_linf_lipschitz(params)
        linf_T = c / linf_L if linf_L > 0 else math.inf
    return LvPeriodBound(
        alpha=alpha,
        lipschitz=L,
        direct_relation=relation,
        direct_form=direct,
        theorem_form=theorem,
        warning=msg,
        linf_lipschitz=linf_L,
        linf_bound=linf_T,
        linf_constant=float(c) if params.M is not None else None,
    )
