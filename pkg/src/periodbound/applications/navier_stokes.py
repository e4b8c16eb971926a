"""Pseudo-spectral tools for the 2D periodic Navier-Stokes bilinear term.

Fields live on the ``2 pi``-periodic square with ``N x N`` collocation points and
are stored as Fourier series coefficients ``u_hat[c, ky, kx]`` (``numpy.fft``
layout divided by ``N**2``). Norms are ``L^2`` over the square, so
``||g||^2 = (2 pi)^2 sum |g_hat|^2``.

``B(u, v) = Pi[(u . grad) v]`` is evaluated with 2/3-rule dealiasing: inputs and
output are truncated to ``|kx|, |ky| < N/3``, which makes the retained output
modes equal to the exact convolution sum.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from periodbound.bounds import k_alpha
from periodbound.errors import AlignmentError, InsufficientDataError, ParameterError

TWO_PI = 2.0 * math.pi


def wavenumbers(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer wavenumber grids ``(kx, ky)`` of shape ``(N, N)``, indexed ``[ky, kx]``."""
    k = np.fft.fftfreq(N, d=1.0 / N)
    kx, ky = np.meshgrid(k, k, indexing="xy")
    return kx, ky


def dealias_mask(N: int) -> np.ndarray:
    kx, ky = wavenumbers(N)
    return (3 * np.abs(kx) < N) & (3 * np.abs(ky) < N)


def _nyquist_mask(N: int) -> np.ndarray:
    kx, ky = wavenumbers(N)
    if N % 2:
        return np.zeros((N, N), dtype=bool)
    return (np.abs(kx) == N // 2) | (np.abs(ky) == N // 2)


def leray_project(coeffs: np.ndarray) -> np.ndarray:
    """Remove the gradient part and the mean of a coefficient array ``(2, N, N)``."""
    N = coeffs.shape[-1]
    kx, ky = wavenumbers(N)
    k2 = kx**2 + ky**2
    k2[0, 0] = 1.0
    div = (kx * coeffs[0] + ky * coeffs[1]) / k2
    out = np.stack([coeffs[0] - kx * div, coeffs[1] - ky * div])
    out[:, 0, 0] = 0.0
    out[:, _nyquist_mask(N)] = 0.0
    return out


@dataclass(frozen=True)
class NseField:
    """Real, divergence-free, zero-mean velocity field in Fourier coefficients."""

    coeffs: np.ndarray = field(repr=False)
    tol: float = 1e-10

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[0] != 2 or c.shape[1] != c.shape[2]:
            raise AlignmentError(f"coefficients must have shape (2, N, N), got {c.shape}")
        N = c.shape[-1]
        scale = max(1.0, float(np.abs(c).max()))
        kx, ky = wavenumbers(N)
        if np.abs(kx * c[0] + ky * c[1]).max() > self.tol * scale * N:
            raise ParameterError("field is not divergence-free")
        if np.abs(c[:, 0, 0]).max() > self.tol * scale:
            raise ParameterError("field must have zero mean")
        flipped = np.roll(np.flip(c, axis=(1, 2)), 1, axis=(1, 2))
        if np.abs(flipped - np.conj(c)).max() > self.tol * scale:
            raise ParameterError("coefficients violate the reality symmetry")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return self.coeffs.shape[-1]

    @classmethod
    def from_coefficients(cls, coeffs: np.ndarray) -> NseField:
        """Project arbitrary coefficients onto the admissible set (real part,
        Leray projection, mean removal)."""
        c = np.asarray(coeffs, dtype=complex)
        real = np.fft.fft2(np.fft.ifft2(c, axes=(1, 2)).real, axes=(1, 2))
        return cls(leray_project(real))

    @classmethod
    def from_physical(cls, ux: np.ndarray, uy: np.ndarray) -> NseField:
        ux, uy = np.asarray(ux, dtype=float), np.asarray(uy, dtype=float)
        if ux.shape != uy.shape or ux.ndim != 2 or ux.shape[0] != ux.shape[1]:
            raise AlignmentError("velocity components must be square arrays of equal shape")
        N = ux.shape[0]
        return cls(leray_project(np.fft.fft2(np.stack([ux, uy]), axes=(1, 2)) / N**2))

    @classmethod
    def from_stream_function(cls, psi_hat: np.ndarray) -> NseField:
        """``u = (d psi / dy, -d psi / dx)``."""
        N = psi_hat.shape[-1]
        kx, ky = wavenumbers(N)
        return cls.from_coefficients(np.stack([1j * ky * psi_hat, -1j * kx * psi_hat]))

    def physical(self) -> np.ndarray:
        return np.fft.ifft2(self.coeffs * self.N**2, axes=(1, 2)).real

    def __add__(self, other: NseField) -> NseField:
        _check_grid(self, other)
        return NseField(self.coeffs + other.coeffs)

    def __sub__(self, other: NseField) -> NseField:
        _check_grid(self, other)
        return NseField(self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> NseField:
        return NseField(self.coeffs * float(s))

    __rmul__ = __mul__

    def l2_norm(self) -> float:
        return TWO_PI * float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def grad_norm(self) -> float:
        """``||D u||`` in ``L^2``."""
        kx, ky = wavenumbers(self.N)
        return TWO_PI * float(np.sqrt(np.sum((kx**2 + ky**2) * np.abs(self.coeffs) ** 2)))

    def inner(self, other: NseField) -> float:
        _check_grid(self, other)
        return TWO_PI**2 * float(np.sum(np.real(np.conj(self.coeffs) * other.coeffs)))

    def divergence(self) -> np.ndarray:
        kx, ky = wavenumbers(self.N)
        return 1j * (kx * self.coeffs[0] + ky * self.coeffs[1])


def _check_grid(u: NseField, v: NseField) -> None:
    if u.N != v.N:
        raise AlignmentError(f"grid mismatch: N = {u.N} and N = {v.N}")


def nse_bilinear(u: NseField, v: NseField) -> NseField:
    _check_grid(u, v)
    N = u.N
    mask = dealias_mask(N)
    kx, ky = wavenumbers(N)
    uh = np.where(mask, u.coeffs, 0.0) * N**2
    vh = np.where(mask, v.coeffs, 0.0) * N**2
    ux, uy = np.fft.ifft2(uh, axes=(1, 2)).real
    dvdx = np.fft.ifft2(1j * kx * vh, axes=(1, 2)).real
    dvdy = np.fft.ifft2(1j * ky * vh, axes=(1, 2)).real
    adv = ux * dvdx + uy * dvdy
    w = np.fft.fft2(adv, axes=(1, 2)) / N**2
    w = np.where(mask, w, 0.0)
    return NseField(leray_project(w))


def random_solenoidal_field(N: int, rng: np.random.Generator, *, slope: float = 2.0) -> NseField:
    """Random dealiased field with stream-function spectrum ``|k|^-(slope+1)``."""
    psi = np.fft.fft2(rng.standard_normal((N, N))) / N**2
    kx, ky = wavenumbers(N)
    kk = np.sqrt(kx**2 + ky**2)
    kk[0, 0] = 1.0
    psi = np.where(dealias_mask(N), psi * kk ** (-(slope + 1.0)), 0.0)
    psi[0, 0] = 0.0
    return NseField.from_stream_function(psi)


def _log_factor(G: float) -> float:
    return G * math.sqrt(1.0 + math.log(G))


def nse_lipschitz_ratio(pairs: Iterable[tuple[NseField, NseField]], G: float, *, min_pairs: int = 10) -> float:
    """Measured ``c`` in ``||B(u,u) - B(v,v)|| <= c G (1 + log G)^(1/2) ||D(u - v)||``.

    Every field must satisfy ``||D u|| <= G``; pairs with ``u = v`` are skipped.
    """
    G = float(G)
    if not G > 1.0:
        raise ParameterError(f"G must exceed 1, got {G!r}")
    pairs = list(pairs)
    if len(pairs) < min_pairs:
        raise InsufficientDataError(f"need at least {min_pairs} pairs, got {len(pairs)}")
    norm = _log_factor(G)
    best, used = 0.0, 0
    for u, v in pairs:
        for w in (u, v):
            if w.grad_norm() > G * (1.0 + 1e-12):
                raise ParameterError(f"field with ||Du|| = {w.grad_norm():.6g} exceeds G = {G:g}")
        dd = (u - v).grad_norm()
        if dd <= 1e-14 * max(1.0, u.grad_norm()):
            continue
        num = (nse_bilinear(u, u) - nse_bilinear(v, v)).l2_norm()
        best = max(best, num / (norm * dd))
        used += 1
    if used == 0:
        raise InsufficientDataError("all pairs are degenerate")
    return best


def sample_pairs(N: int, G: float, n_pairs: int, rng: np.random.Generator) -> list[tuple[NseField, NseField]]:
    """Independent random field pairs, each rescaled to ``||D u|| = G``."""
    out = []
    for _ in range(n_pairs):
        u = random_solenoidal_field(N, rng)
        v = random_solenoidal_field(N, rng)
        out.append((u * (G / u.grad_norm()), v * (G / v.grad_norm())))
    return out


def grashof_number(forcing: NseField, nu: float = 1.0, kappa1: float = 1.0) -> float:
    """``G = ||f||_{L^2} / (nu^2 kappa1^2)`` with ``kappa1`` the lowest wavenumber."""
    if not nu > 0 or not kappa1 > 0:
        raise ParameterError("viscosity and lowest wavenumber must be positive")
    return forcing.l2_norm() / (nu**2 * kappa1**2)


def nse_period_bound(G: float, c: float) -> float:
    """``K_{1/2} [c G (1 + log G)^(1/2)]^-2``."""
    G, c = float(G), float(c)
    if not G > 1.0:
        raise ParameterError(f"G must exceed 1, got {G!r}")
    if not c > 0:
        raise ParameterError(f"c must be positive, got {c!r}")
    return k_alpha(0.5).k_value / (c * _log_factor(G)) ** 2


# -- CSV exchange -------------------------------------------------------------


def field_to_csv(u: NseField) -> str:
    """Rows ``component,kx,ky,re,im`` after a ``# N=<N>`` header line."""
    buf = io.StringIO()
    buf.write(f"# N={u.N}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["component", "kx", "ky", "re", "im"])
    kx, ky = wavenumbers(u.N)
    for comp in (0, 1):
        for iy in range(u.N):
            for ix in range(u.N):
                z = u.coeffs[comp, iy, ix]
                w.writerow([comp, int(kx[iy, ix]), int(ky[iy, ix]), repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def field_from_csv(text: str) -> NseField:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# N="):
        raise ParameterError("field CSV must start with a '# N=<size>' header")
    N = int(lines[0][4:])
    coeffs = np.zeros((2, N, N), dtype=complex)
    reader = csv.DictReader(lines[1:])
    for row in reader:
        comp, kx, ky = int(row["component"]), int(row["kx"]), int(row["ky"])
        coeffs[comp, ky % N, kx % N] = complex(float(row["re"]), float(row["im"]))
    return NseField(coeffs)


def write_field_csv(u: NseField, path: str | os.PathLike) -> None:
    from periodbound.io import atomic_write_text

    atomic_write_text(path, field_to_csv(u))


def read_field_csv(path: str | os.PathLike) -> NseField:
    with open(path) as fh:
        return field_from_csv(fh.read())
