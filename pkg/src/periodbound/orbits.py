"""Periodic orbits with known data, period detection, shooting, and bound audits.

The rotation family puts a circle inside a two-dimensional eigenspace of ``A``
with eigenvalue ``lam``. With ``J`` the quarter turn on that block and ``Pi2``
the projection onto it, the nonlinearity

    f(u) = (A + omega J) Pi2 u

cancels the damping on the block, leaving ``w' = omega J w``: circles of any
radius with period ``2 pi / omega``. Since ``(lam I + omega J)`` is
``sqrt(lam^2 + omega^2)`` times a rotation and ``||Pi2 w|| <= lam**-alpha ||A**alpha w||``
(with equality on the block),

    ||f(u) - f(v)|| <= sqrt(lam^2 + omega^2) * lam**-alpha * ||A**alpha (u - v)||

and the constant is attained. These orbits therefore meet the hypotheses of
the main bound with exactly computable ``(T, L, alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterator, Literal, NamedTuple, Sequence

import numpy as np

from periodbound.bounds import (
    BoundParams,
    high_block_coefficient,
    k_alpha,
    low_block_coefficient,
)
from periodbound.errors import (
    ConvergenceError,
    DegenerateOrbitError,
    IllConditionedSectionError,
    NotPeriodicError,
    ParameterError,
    ResolutionError,
)
from periodbound.evolution import (
    IntegratorConfig,
    SemilinearSystem,
    Trajectory,
    flow_map,
    integrate,
)
from periodbound.spectral import SpectrumModel, split_at

Provenance = Literal["analytic", "detected", "refined"]

BOUND_RTOL = 1e-9


@dataclass(frozen=True)
class PeriodicOrbitCertificate:
    period: float
    alpha: float
    lipschitz: float
    bound: float
    slack: float
    provenance: Provenance = "analytic"

    @classmethod
    def from_data(cls, period: float, alpha: float, lipschitz: float,
                  provenance: Provenance = "analytic") -> PeriodicOrbitCertificate:
        bound = period_lower_bound(alpha, lipschitz)
        return cls(float(period), float(alpha), float(lipschitz), bound, float(period) / bound, provenance)

    def to_dict(self) -> dict:
        return asdict(self)


def period_lower_bound(alpha: float, lipschitz: float) -> float:
    """``K_alpha * L**(-1/(1-alpha))``."""
    if not lipschitz > 0:
        raise ParameterError(f"Lipschitz constant must be positive, got {lipschitz!r}")
    k = k_alpha(alpha)
    return k.k_value * float(lipschitz) ** (-1.0 / (1.0 - k.alpha))


class BoundCheck(NamedTuple):
    passed: bool
    slack: float
    bound: float


def verify_bound(cert: PeriodicOrbitCertificate) -> BoundCheck:
    """Check ``T >= K_alpha L**(-1/(1-alpha))`` with relative tolerance 1e-9.

    The bound is recomputed from ``(alpha, L)``; the stored ``bound`` field is
    not trusted.
    """
    bound = period_lower_bound(cert.alpha, cert.lipschitz)
    passed = bool(cert.period >= bound * (1.0 - BOUND_RTOL))
    return BoundCheck(passed, cert.period / bound, bound)


@dataclass(frozen=True)
class RotationOrbitSpec:
    lam: float
    omega: float
    radius: float = 1.0
    alpha: float = 0.0
    inert_eigenvalues: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ParameterError(f"active eigenvalue must be positive, got {self.lam!r}")
        if not self.omega > 0:
            raise ParameterError(f"rotation rate must be positive, got {self.omega!r}")
        if not self.radius > 0:
            raise ParameterError(f"radius must be positive, got {self.radius!r}")
        if not 0.0 <= self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        object.__setattr__(self, "inert_eigenvalues", tuple(float(x) for x in self.inert_eigenvalues))

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def lipschitz(self) -> float:
        return math.hypot(self.lam, self.omega) * self.lam ** (-self.alpha)


@dataclass(frozen=True)
class RotationSystem:
    system: SemilinearSystem
    initial_state: np.ndarray = field(repr=False)
    certificate: PeriodicOrbitCertificate
    active: tuple[int, int]

    def __iter__(self) -> Iterator:
        return iter((self.system, self.initial_state, self.certificate))


def make_rotation_system(spec: RotationOrbitSpec) -> RotationSystem:
    """Build the rotation orbit described by *spec*.

    Unpacks as ``(system, u0, certificate)``; ``u0`` sits at angle 0 on the
    circle of the given radius with inert modes at rest.
    """
    eig = np.sort(np.array((spec.lam, spec.lam) + spec.inert_eigenvalues))
    model = SpectrumModel(eig)
    i = int(np.searchsorted(model.eigenvalues, spec.lam, side="left"))
    a, b = i, i + 1
    lam, om = spec.lam, spec.omega

    def f(u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        out[a] = lam * u[a] - om * u[b]
        out[b] = om * u[a] + lam * u[b]
        return out

    system = SemilinearSystem(model, f, analytic_lipschitz=(spec.alpha, spec.lipschitz), vectorized=True)
    u0 = np.zeros(model.dim)
    u0[a] = spec.radius
    cert = PeriodicOrbitCertificate.from_data(spec.period, spec.alpha, spec.lipschitz, "analytic")
    return RotationSystem(system, u0, cert, (a, b))


def make_harmonic_oscillator(amplitude: float = 1.0) -> RotationSystem:
    """``(x', y') = (y, -x)`` with ``A = 0``: Lipschitz constant 1 and period ``2 pi``."""
    model = SpectrumModel(np.zeros(2))

    def f(u: np.ndarray) -> np.ndarray:
        return np.stack([u[1], -u[0]])

    system = SemilinearSystem(model, f, analytic_lipschitz=(0.0, 1.0), vectorized=True)
    u0 = np.array([float(amplitude), 0.0])
    cert = PeriodicOrbitCertificate.from_data(2.0 * math.pi, 0.0, 1.0, "analytic")
    return RotationSystem(system, u0, cert, (0, 1))


def rotation_grid(
    lams: Sequence[float] = (0.5, 1.0, 2.0, 4.0, 8.0),
    omegas: Sequence[float] = (0.5, 1.0, 2.0, 4.0),
    alphas: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 0.9),
    radius: float = 1.0,
) -> list[RotationOrbitSpec]:
    return [RotationOrbitSpec(l, w, radius, a) for l in lams for w in omegas for a in alphas]


# -- period detection ---------------------------------------------------------


def _interp_state(traj: Trajectory, t: float) -> np.ndarray:
    return np.array([np.interp(t, traj.times, traj.states[:, k]) for k in range(traj.states.shape[1])])


def detect_period(
    traj: Trajectory,
    reference: np.ndarray,
    *,
    direction: np.ndarray | None = None,
    proximity: float = 0.1,
    angle_tol: float = 1e-3,
    max_harmonic: int = 5,
) -> float:
    """Period from successive returns to the section through *reference*.

    The section is the hyperplane through *reference* normal to the flow
    direction there (estimated from the nearest trajectory samples unless
    *direction* is given). Only crossings in the flow direction that land within
    ``proximity`` times the trajectory spread of *reference* count. Crossing
    times are linearly interpolated. The mean return interval is checked
    against its subharmonics ``T/k`` before being returned.
    """
    X = np.asarray(traj.states, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if X.ndim != 2 or X.shape[1] != ref.size:
        raise ParameterError("reference does not match trajectory state dimension")
    if X.shape[0] < 3:
        raise NotPeriodicError("trajectory too short")
    dist = np.linalg.norm(X - ref, axis=1)
    scale = float(dist.max())
    if scale == 0.0 or float(np.ptp(X, axis=0).max()) == 0.0:
        raise NotPeriodicError("trajectory is stationary")

    if direction is None:
        i = int(np.clip(np.argmin(dist), 1, X.shape[0] - 2))
        direction = (X[i + 1] - X[i - 1]) / (2.0 * traj.dt)
    n = np.asarray(direction, dtype=float)
    n_norm = float(np.linalg.norm(n))
    if n_norm == 0.0:
        raise NotPeriodicError("flow direction vanishes at the reference point")
    n = n / n_norm

    g = (X - ref) @ n
    idx = np.flatnonzero((g[:-1] < 0.0) & (g[1:] >= 0.0))
    crossings: list[float] = []
    for i in idx:
        w = -g[i] / (g[i + 1] - g[i])
        point = X[i] + w * (X[i + 1] - X[i])
        if np.linalg.norm(point - ref) > proximity * scale:
            continue
        seg = X[i + 1] - X[i]
        angle = math.asin(min(1.0, float(seg @ n) / float(np.linalg.norm(seg))))
        if angle < angle_tol:
            raise IllConditionedSectionError(
                f"near-tangential crossing at t = {traj.times[i]:.6g} (angle {angle:.2e} rad)"
            )
        crossings.append(float(traj.times[i] + w * traj.dt))
    if len(crossings) < 2:
        raise NotPeriodicError(f"found {len(crossings)} return(s) to the section; need at least 2")

    T = float(np.mean(np.diff(crossings)))
    t0 = crossings[0]
    for k in range(max_harmonic, 1, -1):
        tk = t0 + T / k
        if tk > traj.times[-1]:
            continue
        if np.linalg.norm(_interp_state(traj, tk) - _interp_state(traj, t0)) < 1e-3 * scale:
            return T / k
    return T


def measure_period(
    system: SemilinearSystem,
    u0: np.ndarray,
    T_guess: float,
    *,
    samples_per_period: int = 1024,
    periods: float = 2.5,
    transient: float = 0.0,
    scheme: str = "lawson-rk4",
) -> float:
    """Integrate from *u0* and detect the period on the trajectory after *transient*."""
    dt = T_guess / samples_per_period
    traj = integrate(system, u0, IntegratorConfig(dt, transient + periods * T_guess, scheme))
    tail = traj.after(transient)
    return detect_period(tail, tail.states[0])


# -- shooting -----------------------------------------------------------------


def refine_orbit(
    system: SemilinearSystem,
    u_guess: np.ndarray,
    T_guess: float,
    *,
    n_steps: int = 4096,
    scheme: str = "lawson-rk4",
    tol: float = 1e-10,
    max_iter: int = 50,
    phase_index: int | None = None,
) -> tuple[np.ndarray, float]:
    """Newton shooting for ``Phi_T(u) = u`` with a phase condition.

    Unknowns are ``(u, T)``. The phase condition pins the coordinate along which
    the flow at *u_guess* is fastest. The Jacobian is built by central finite
    differences with step ``1e-6 (1 + ||u||)`` and the update is a least-squares
    solve, which tolerates the one-dimensional kernel of a family of orbits
    (such as the concentric circles of the rotation family).
    """
    u = system.model.check(u_guess).astype(float).copy()
    T = float(T_guess)
    if not T > 0:
        raise ParameterError(f"T_guess must be positive, got {T_guess!r}")
    n = u.size
    v = system.vector_field(u)
    if np.linalg.norm(v) <= 1e-12 * (1.0 + np.linalg.norm(u)):
        raise DegenerateOrbitError("initial guess is an equilibrium; phase condition is void")
    j = int(np.argmax(np.abs(v))) if phase_index is None else int(phase_index)
    pinned = u[j]

    def residual(u_: np.ndarray, T_: float) -> np.ndarray:
        return flow_map(system, u_, T_, n_steps, scheme) - u_

    history: list[float] = []
    # Correct T alone first. A full Newton step from a poor period guess is
    # pulled towards the trivial fixed point of the wrong-period map.
    for _ in range(max_iter):
        r = residual(u, T)
        res = float(np.linalg.norm(r))
        history.append(res)
        if res <= tol:
            return u, T
        eps_T = 1e-6 * (1.0 + T)
        pair = flow_map(system, np.stack([u, u], axis=1), np.array([T + eps_T, T - eps_T]), n_steps, scheme)
        r_T = (pair[:, 0] - pair[:, 1]) / (2.0 * eps_T)
        denom = float(r_T @ r_T)
        if denom == 0.0:
            break
        T_new = T - float(r @ r_T) / denom
        if not T_new > 0:
            break
        r_new = float(np.linalg.norm(residual(u, T_new)))
        if r_new > 0.9 * res:
            break
        T = T_new

    for _ in range(max_iter + 1):
        r = residual(u, T)
        res = float(np.linalg.norm(r))
        history.append(res)
        if res <= tol:
            return u, T
        if len(history) > max_iter:
            break
        eps = 1e-6 * (1.0 + np.linalg.norm(u))
        eps_T = 1e-6 * (1.0 + T)
        base = np.repeat(u[:, None], 2 * (n + 1), axis=1)
        horizons = np.full(2 * (n + 1), T)
        for k in range(n):
            base[k, 2 * k] += eps
            base[k, 2 * k + 1] -= eps
        horizons[2 * n] += eps_T
        horizons[2 * n + 1] -= eps_T
        phi = flow_map(system, base, horizons, n_steps, scheme) - base
        J = np.empty((n + 1, n + 1))
        J[:n, :n] = (phi[:, 0:2 * n:2] - phi[:, 1:2 * n:2]) / (2.0 * eps)
        J[:n, n] = (phi[:, 2 * n] - phi[:, 2 * n + 1]) / (2.0 * eps_T)
        J[n, :] = 0.0
        J[n, j] = 1.0
        sv = np.linalg.svd(J, compute_uv=False)
        if np.linalg.norm(J[:n, n]) <= 1e-12 or sv[n - 1] <= 1e-12 * sv[0]:
            raise DegenerateOrbitError("shooting Jacobian is singular beyond a one-parameter family")
        rhs = -np.concatenate([r, [u[j] - pinned]])
        delta = np.linalg.lstsq(J, rhs, rcond=1e-12)[0]
        u = u + delta[:n]
        T = T + float(delta[n])
        if not T > 0 or not np.all(np.isfinite(u)):
            raise ConvergenceError("Newton iterate left the admissible region", history)
    raise ConvergenceError(f"no convergence in {max_iter} iterations (residual {history[-1]:.3e})", history)


# -- proof-chain audit --------------------------------------------------------

MAX_LQ_EXPONENT = 64.0


def _lq_norm(values: np.ndarray, dt: float, q: float) -> float:
    """Periodic trapezoid ``(int g^q)^(1/q)``; max-norm surrogate for ``q > 64``."""
    top = float(np.max(values)) if values.size else 0.0
    if top == 0.0:
        return 0.0
    if q > MAX_LQ_EXPONENT:
        return top
    return top * float(dt * np.sum((values / top) ** q)) ** (1.0 / q)


@dataclass(frozen=True)
class Inequality:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-6)

    @property
    def slack(self) -> float:
        return self.rhs / self.lhs if self.lhs > 0 else math.inf

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "slack": self.slack}


@dataclass(frozen=True)
class ProofChainReport:
    tau: float
    mu: float
    delta: float
    p: float
    q: float
    alpha: float
    period: float
    lipschitz: float
    p_part: Inequality
    q_part: Inequality
    combined: Inequality
    triangle: Inequality
    hypothesis: Inequality
    degenerate: bool

    @property
    def passed(self) -> bool:
        return all(x.holds for x in (self.p_part, self.q_part, self.combined, self.triangle, self.hypothesis))

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in ("tau", "mu", "delta", "p", "q", "alpha", "period", "lipschitz")}
        for k in ("p_part", "q_part", "combined", "triangle", "hypothesis"):
            out[k] = getattr(self, k).to_dict()
        out["degenerate"] = self.degenerate
        out["passed"] = self.passed
        return out


def verify_proof_chain(
    system: SemilinearSystem,
    traj: Trajectory,
    period: float,
    tau: float,
    params: BoundParams,
    lipschitz: float | None = None,
) -> ProofChainReport:
    """Evaluate each estimate of the period-bound argument along a sampled orbit.

    With ``D(t) = u(t) - u(t + tau)``, ``mu = delta / T`` and ``P``, ``Q`` the
    spectral projections below/above ``mu``, the report holds lhs/rhs pairs of

    * low block:  ``|A^a P D|_q <= 2^(1-2a) / (1-(2 delta)^q)^(1/q) * T^(1-a) L |A^a D|_q``
    * high block: ``|A^a Q D|_q <= gamma M_a / (1 - a p)^(1/p) * T^(1-a) L |A^a D|_q``
    * combined:   ``|A^a D|_q <= (sum of both coefficients) * T^(1-a) L |A^a D|_q``

    plus the triangle step ``|A^a D|_q <= |A^a P D|_q + |A^a Q D|_q`` and the
    Lipschitz hypothesis ``||F(t)|| <= L ||A^a D(t)||`` sample by sample, where
    ``|.|_q`` is the ``L^q(0, T)`` norm by the periodic trapezoid rule.

    *traj* must be uniform and cover ``[0, 2T]``; ``tau`` is rounded to the grid.
    """
    if not isinstance(params, BoundParams):
        raise ParameterError("params must be BoundParams")
    T = float(period)
    if not T > 0:
        raise ParameterError("period must be positive")
    if not 0.0 < tau < T:
        raise ParameterError(f"tau must lie in (0, T), got {tau!r}")
    alpha = params.alpha
    if lipschitz is None:
        if system.analytic_lipschitz is None or not math.isclose(system.analytic_lipschitz[0], alpha):
            raise ParameterError("no analytic Lipschitz certificate for this alpha; pass lipschitz")
        lipschitz = system.analytic_lipschitz[1]
    L = float(lipschitz)

    dt = float(traj.dt)
    M = int(round(T / dt))
    if M < 256:
        raise ResolutionError(f"{M} samples per period; need at least 256")
    if abs(M * dt - T) > 1e-6 * T:
        raise ResolutionError("period is not an integer number of trajectory steps")
    shift = int(round(tau / dt))
    if len(traj) < M + shift + 1 or len(traj) < 2 * M:
        raise ResolutionError("trajectory must cover [0, 2T]")

    model = system.model
    U = traj.states[:M].T
    V = traj.states[shift:shift + M].T
    D = U - V
    F = system.f(U) - system.f(V)
    mu = params.delta / T
    split = split_at(model, mu)

    aD = np.linalg.norm(model.fractional(alpha, D), axis=0)
    aP = np.linalg.norm(model.fractional(alpha, split.P(D)), axis=0)
    aQ = np.linalg.norm(model.fractional(alpha, split.Q(D)), axis=0)
    nD, nP, nQ = (_lq_norm(x, dt, params.q) for x in (aD, aP, aQ))

    scale = T ** (1.0 - alpha) * L
    cP = low_block_coefficient(params)
    cQ = high_block_coefficient(params)
    nF = np.linalg.norm(F, axis=0)
    worst = int(np.argmax(nF - L * aD))

    return ProofChainReport(
        tau=shift * dt,
        mu=mu,
        delta=params.delta,
        p=params.p,
        q=params.q,
        alpha=alpha,
        period=T,
        lipschitz=L,
        p_part=Inequality(nP, cP * scale * nD),
        q_part=Inequality(nQ, cQ * scale * nD),
        combined=Inequality(nD, (cP + cQ) * scale * nD),
        triangle=Inequality(nD, nP + nQ),
        hypothesis=Inequality(float(nF[worst]), float(L * aD[worst])),
        degenerate=nD == 0.0,
    )
