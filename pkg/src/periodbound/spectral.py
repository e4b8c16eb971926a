"""Diagonal spectral calculus for self-adjoint operators with nonnegative spectrum.

A :class:`SpectrumModel` is a multiplication operator in its eigenbasis: a state
``u`` is the vector of its coefficients, ``A`` acts as ``lambda_k * u_k`` and every
function of ``A`` acts coordinatewise. Projections onto spectral sets are index
masks. States may carry trailing batch axes; the first axis is always the mode
index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from periodbound.errors import AlignmentError, ParameterError, UndefinedOperatorError


def _check_alpha(alpha: float, upper: float = 1.0) -> float:
    alpha = float(alpha)
    if not (0.0 <= alpha <= upper) or not np.isfinite(alpha):
        raise ParameterError(f"alpha must lie in [0, {upper:g}], got {alpha!r}")
    return alpha


def fractional_weights(eigenvalues: np.ndarray, alpha: float) -> np.ndarray:
    """``lambda_k**alpha`` with the convention ``0**0 = 1``."""
    if alpha == 0.0:
        return np.ones_like(eigenvalues)
    return np.power(eigenvalues, alpha)


@dataclass(frozen=True)
class SpectrumModel:
    """Finite diagonal model of a self-adjoint sectorial operator.

    :arg eigenvalues: nondecreasing, nonnegative eigenvalues ``lambda_1 <= ... <= lambda_n``.
    """

    eigenvalues: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        lam = np.array(self.eigenvalues, dtype=float).reshape(-1)
        if lam.size == 0:
            raise ParameterError("a spectrum model needs at least one eigenvalue")
        if not np.all(np.isfinite(lam)):
            raise ParameterError("eigenvalues must be finite")
        if np.any(lam < 0):
            raise ParameterError("eigenvalues must be nonnegative")
        if np.any(np.diff(lam) < 0):
            raise ParameterError("eigenvalues must be nondecreasing")
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

    def __repr__(self) -> str:
        return f"SpectrumModel(n={self.dim}, eigenvalues={self.eigenvalues.tolist()!r})"

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    def check(self, u: np.ndarray) -> np.ndarray:
        """Return *u* as a float array, raising if its mode axis is misaligned."""
        u = np.asarray(u, dtype=float)
        if u.ndim == 0 or u.shape[0] != self.dim:
            raise AlignmentError(
                f"state has leading dimension {u.shape[:1]}, model has {self.dim} modes"
            )
        return u

    def _col(self, values: np.ndarray, u: np.ndarray) -> np.ndarray:
        return values.reshape((-1,) + (1,) * (u.ndim - 1))

    def apply(self, u: np.ndarray) -> np.ndarray:
        u = self.check(u)
        return self._col(self.eigenvalues, u) * u

    def fractional(self, alpha: float, u: np.ndarray) -> np.ndarray:
        alpha = _check_alpha(alpha)
        u = self.check(u)
        return self._col(fractional_weights(self.eigenvalues, alpha), u) * u

    def semigroup(self, t: float, u: np.ndarray) -> np.ndarray:
        t = float(t)
        if not t >= 0.0:
            raise ParameterError(f"semigroup time must be nonnegative, got {t!r}")
        u = self.check(u)
        return self._col(np.exp(-self.eigenvalues * t), u) * u

    def smoothing_norm(self, alpha: float, t: float) -> float:
        """Operator norm of ``A**alpha exp(-A t)``, i.e. the largest ``lambda**alpha exp(-lambda t)``."""
        alpha = _check_alpha(alpha)
        if not t > 0:
            raise ParameterError("smoothing norm needs t > 0")
        lam = self.eigenvalues
        return float(np.max(fractional_weights(lam, alpha) * np.exp(-lam * t)))

    def with_modes(self, extra: np.ndarray) -> SpectrumModel:
        """Model with additional eigenvalues merged in sorted order."""
        return SpectrumModel(np.sort(np.concatenate([self.eigenvalues, np.ravel(extra)])))


def h_norm(u: np.ndarray) -> float | np.ndarray:
    """Euclidean norm over the mode axis."""
    return np.sqrt(np.sum(np.asarray(u, dtype=float) ** 2, axis=0))


def apply_fractional(model: SpectrumModel, alpha: float, u: np.ndarray) -> np.ndarray:
    return model.fractional(alpha, u)


def apply_semigroup(model: SpectrumModel, t: float, u: np.ndarray) -> np.ndarray:
    return model.semigroup(t, u)


@dataclass(frozen=True)
class SpectralSplit:
    """Low/high spectral projections ``P = P[0, mu)`` and ``Q = P[mu, inf)``."""

    mu: float
    low_mask: np.ndarray = field(repr=False)

    @property
    def high_mask(self) -> np.ndarray:
        return ~self.low_mask

    @property
    def low_indices(self) -> np.ndarray:
        return np.flatnonzero(self.low_mask)

    @property
    def high_indices(self) -> np.ndarray:
        return np.flatnonzero(self.high_mask)

    def _mask(self, mask: np.ndarray, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.ndim == 0 or u.shape[0] != mask.size:
            raise AlignmentError("state does not match the split dimension")
        return np.where(mask.reshape((-1,) + (1,) * (u.ndim - 1)), u, 0.0)

    def P(self, u: np.ndarray) -> np.ndarray:
        return self._mask(self.low_mask, u)

    def Q(self, u: np.ndarray) -> np.ndarray:
        return self._mask(self.high_mask, u)

    def low_norm(self, model: SpectrumModel) -> float:
        """``||A_P||``: the largest eigenvalue below ``mu``, or 0 when ``P = 0``."""
        lam = model.eigenvalues[self.low_mask]
        return float(lam.max()) if lam.size else 0.0


def split_at(model: SpectrumModel, mu: float) -> SpectralSplit:
    mu = float(mu)
    if not mu > 0:
        raise ParameterError(f"split threshold mu must be positive, got {mu!r}")
    low = model.eigenvalues < mu
    low.setflags(write=False)
    return SpectralSplit(mu=mu, low_mask=low)


def tail_resolvent_norm(split: SpectralSplit, model: SpectrumModel, T: float) -> float:
    """Norm of ``(I - exp(-A_Q T))**-1`` on the high block.

    The map ``lambda -> 1/(1 - exp(-lambda T))`` decreases in ``lambda``, so the
    norm is attained at the smallest high eigenvalue and never exceeds
    ``1/(1 - exp(-mu T))``.
    """
    T = float(T)
    if not T > 0:
        raise ParameterError(f"T must be positive, got {T!r}")
    lam = model.eigenvalues[split.high_mask]
    if lam.size == 0:
        raise UndefinedOperatorError("high spectral block is empty; Q = 0")
    return float(np.max(-1.0 / np.expm1(-lam * T)))


def lemma_resolvent_bound(mu: float, T: float) -> float:
    """``1/(1 - exp(-mu T))``."""
    return float(-1.0 / np.expm1(-mu * T))
