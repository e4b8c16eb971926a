"""Exponential time integration of ``u' = -Au + f(u)`` in spectral coordinates.

The linear part is integrated exactly (``exp(-A dt)`` is diagonal), so stiff
modes put no restriction on the step size. Three schemes are available:

``exponential-euler``
    ``v = e^{-hA} u + h phi1(-hA) f(u)``; first order.
``exponential-midpoint``
    two-stage exponential Runge-Kutta with ``c2 = 1/2`` and weights
    ``b1 = phi1 - 2 phi2``, ``b2 = 2 phi2``; second order.
``lawson-rk4``
    classical RK4 applied in the integrating-factor frame; fourth order, used
    for period measurement and shooting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from periodbound.errors import (
    AlignmentError,
    DivergenceError,
    InsufficientDataError,
    ParameterError,
)
from periodbound.spectral import SpectrumModel, h_norm

SCHEMES = ("exponential-euler", "exponential-midpoint", "lawson-rk4")

_PHI1_SERIES = 1e-4
_PHI2_SERIES = 1e-1


def phi1(z: np.ndarray) -> np.ndarray:
    """``(e^z - 1) / z`` with ``phi1(0) = 1``."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _PHI1_SERIES
    safe = np.where(small, 1.0, z)
    direct = np.expm1(safe) / safe
    series = 1.0 + z / 2.0 + z * z / 6.0 + z**3 / 24.0
    return np.where(small, series, direct)


def phi2(z: np.ndarray) -> np.ndarray:
    """``(e^z - 1 - z) / z^2`` with ``phi2(0) = 1/2``."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _PHI2_SERIES
    safe = np.where(small, 1.0, z)
    direct = (np.expm1(safe) - safe) / (safe * safe)
    series = np.zeros_like(z)
    term = np.full_like(z, 0.5)
    for j in range(1, 12):
        series = series + term
        term = term * z / (j + 2)
    return np.where(small, series, direct)


Nonlinearity = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SemilinearSystem:
    """``u' = -Au + f(u)`` with ``A`` given by *model*.

    :arg nonlinearity: maps a state of shape ``(n,)`` to ``(n,)``.
    :arg analytic_lipschitz: optional exact ``(alpha, L)`` with
        ``||f(u) - f(v)|| <= L ||A**alpha (u - v)||``.
    :arg vectorized: the nonlinearity also accepts ``(n, m)`` batches column-wise.
    """

    model: SpectrumModel
    nonlinearity: Nonlinearity = field(repr=False)
    analytic_lipschitz: tuple[float, float] | None = None
    vectorized: bool = False

    @property
    def dim(self) -> int:
        return self.model.dim

    def f(self, u: np.ndarray) -> np.ndarray:
        u = self.model.check(u)
        if u.ndim == 1 or self.vectorized:
            out = np.asarray(self.nonlinearity(u), dtype=float)
        else:
            flat = u.reshape(u.shape[0], -1)
            out = np.stack([np.asarray(self.nonlinearity(c), dtype=float) for c in flat.T], axis=1)
            out = out.reshape(u.shape)
        if out.shape != u.shape:
            raise AlignmentError(f"nonlinearity returned shape {out.shape}, expected {u.shape}")
        return out

    def vector_field(self, u: np.ndarray) -> np.ndarray:
        return -self.model.apply(u) + self.f(u)


class _Stepper:
    """Precomputed diagonal coefficients for a fixed step size.

    *h* may be a scalar or an array of per-column step sizes for batched states.
    """

    def __init__(self, system: SemilinearSystem, h: float | np.ndarray, scheme: str):
        if scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
        self.system, self.scheme = system, scheme
        lam = system.model.eigenvalues
        h = np.asarray(h, dtype=float)
        if np.any(~(h > 0)):
            raise ParameterError("step size must be positive")
        self.h = h
        z = -np.multiply.outer(lam, h) if h.ndim else -lam * h
        self.E = np.exp(z)
        if scheme == "exponential-euler":
            self.hphi1 = h * phi1(z)
        elif scheme == "exponential-midpoint":
            zh = z / 2.0
            self.E2 = np.exp(zh)
            self.a21 = (h / 2.0) * phi1(zh)
            p1, p2 = phi1(z), phi2(z)
            self.b1 = h * (p1 - 2.0 * p2)
            self.b2 = h * (2.0 * p2)
        else:
            self.E2 = np.exp(z / 2.0)
        self._columns = None

    def _as_columns(self) -> _Stepper:
        # scalar-h coefficients broadcast against (n, m) batches
        if self._columns is None:
            col = object.__new__(_Stepper)
            col.__dict__.update(
                {k: (v[:, None] if isinstance(v, np.ndarray) and v.ndim == 1 else v)
                 for k, v in self.__dict__.items()}
            )
            col._columns = col
            self._columns = col
        return self._columns

    def __call__(self, u: np.ndarray) -> np.ndarray:
        if u.ndim == 2 and self.E.ndim == 1:
            return self._as_columns()(u)
        f = self.system.f
        if self.scheme == "exponential-euler":
            return self.E * u + self.hphi1 * f(u)
        if self.scheme == "exponential-midpoint":
            k1 = f(u)
            u2 = self.E2 * u + self.a21 * k1
            k2 = f(u2)
            return self.E * u + self.b1 * k1 + self.b2 * k2
        h, E, E2 = self.h, self.E, self.E2
        k1 = f(u)
        k2 = f(E2 * (u + 0.5 * h * k1))
        k3 = f(E2 * u + 0.5 * h * k2)
        k4 = f(E * u + h * E2 * k3)
        return E * u + (h / 6.0) * (E * k1 + 2.0 * E2 * (k2 + k3) + k4)


def step(system: SemilinearSystem, u: np.ndarray, dt: float, scheme: str = "exponential-euler") -> np.ndarray:
    u = system.model.check(u)
    return _Stepper(system, float(dt), scheme)(u)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_end: float
    scheme: str = "exponential-midpoint"

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt!r}")
        if not self.t_end > 0:
            raise ParameterError(f"t_end must be positive, got {self.t_end!r}")
        if self.dt > self.t_end:
            raise ParameterError(f"dt = {self.dt!r} exceeds t_end = {self.t_end!r}")
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")

    @property
    def n_steps(self) -> int:
        # tolerate t_end being an integer multiple of dt up to rounding
        return max(1, math.ceil(self.t_end / self.dt - 1e-9))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution; ``states[i]`` is the state at ``times[i]``."""

    times: np.ndarray
    states: np.ndarray
    dt: float

    def __len__(self) -> int:
        return self.times.size

    def after(self, t0: float) -> Trajectory:
        """Drop samples before *t0* (transient removal)."""
        keep = self.times >= t0 - 1e-12 * max(1.0, abs(t0))
        return Trajectory(self.times[keep], self.states[keep], self.dt)


def integrate(system: SemilinearSystem, u0: np.ndarray, config: IntegratorConfig) -> Trajectory:
    u = system.model.check(u0).copy()
    if u.ndim != 1:
        raise AlignmentError("integrate expects a single state of shape (n,)")
    n_steps = config.n_steps
    stepper = _Stepper(system, config.dt, config.scheme)
    states = np.empty((n_steps + 1, u.size))
    states[0] = u
    for i in range(1, n_steps + 1):
        u = stepper(u)
        if not np.all(np.isfinite(u)):
            raise DivergenceError(i)
        states[i] = u
    times = config.dt * np.arange(n_steps + 1)
    return Trajectory(times=times, states=states, dt=config.dt)


def flow_map(
    system: SemilinearSystem,
    u: np.ndarray,
    T: float | np.ndarray,
    n_steps: int,
    scheme: str = "lawson-rk4",
) -> np.ndarray:
    """Time-*T* map with ``n_steps`` equal steps.

    *u* may be a batch of shape ``(n, m)``, in which case *T* may be an array of
    ``m`` per-column horizons.
    """
    u = system.model.check(u)
    T = np.asarray(T, dtype=float)
    if np.any(~(T > 0)):
        raise ParameterError("flow horizon must be positive")
    stepper = _Stepper(system, T / n_steps, scheme)
    for i in range(n_steps):
        u = stepper(u)
        if not np.all(np.isfinite(u)):
            raise DivergenceError(i + 1)
    return u


def dalpha_norm(model: SpectrumModel, alpha: float, u: np.ndarray) -> float | np.ndarray:
    """``||A**alpha u||`` over the mode axis."""
    return h_norm(model.fractional(alpha, u))


def dalpha_distance(model: SpectrumModel, alpha: float, u: np.ndarray, v: np.ndarray) -> float | np.ndarray:
    u, v = model.check(u), model.check(v)
    return dalpha_norm(model, alpha, u - v)


def lipschitz_estimate(
    system: SemilinearSystem,
    states: Sequence[np.ndarray] | np.ndarray,
    alpha: float,
    *,
    n_perturb: int = 0,
    radius: float = 1e-3,
    rng: np.random.Generator | None = None,
    min_distance: float = 1e-12,
) -> float:
    """Largest sampled ratio ``||f(u) - f(v)|| / ||A**alpha (u - v)||``.

    This is a lower bound on the best Lipschitz constant of ``f`` as a map from
    ``D(A**alpha)`` to ``H``. With ``n_perturb > 0`` each state is joined by
    that many random neighbours within *radius* (relative to the state norm).
    """
    X = np.atleast_2d(np.asarray(states, dtype=float))
    if X.shape[1] != system.dim:
        raise AlignmentError(f"states have {X.shape[1]} modes, model has {system.dim}")
    if n_perturb > 0:
        rng = np.random.default_rng() if rng is None else rng
        scale = radius * (1.0 + np.linalg.norm(X, axis=1))
        noise = rng.standard_normal((X.shape[0], n_perturb, system.dim))
        extra = X[:, None, :] + scale[:, None, None] * noise
        X = np.concatenate([X, extra.reshape(-1, system.dim)])
    if X.shape[0] < 2:
        raise InsufficientDataError("need at least two states")

    F = np.array([system.f(x) for x in X])
    W = system.model.fractional(alpha, X.T).T
    best, found = 0.0, False
    for i in range(X.shape[0] - 1):
        den = np.linalg.norm(W[i + 1:] - W[i], axis=1)
        ok = den >= min_distance
        if not np.any(ok):
            continue
        found = True
        num = np.linalg.norm(F[i + 1:] - F[i], axis=1)
        best = max(best, float(np.max(num[ok] / den[ok])))
    if not found:
        raise InsufficientDataError("all sampled pairs are degenerate in the D(A^alpha) norm")
    return best
