import math

import numpy as np
import pytest

from periodbound.applications import (
    LotkaVolterraParams,
    NseField,
    ReactionDiffusionGrowth,
    grashof_number,
    lv_linf_lipschitz,
    lv_lipschitz,
    lv_period_bound,
    nse_bilinear,
    nse_lipschitz_ratio,
    nse_period_bound,
    rd_alpha,
)
from periodbound.applications.navier_stokes import (
    dealias_mask,
    field_from_csv,
    field_to_csv,
    random_solenoidal_field,
    read_field_csv,
    sample_pairs,
    wavenumbers,
    write_field_csv,
)
from periodbound.bounds import k_alpha
from periodbound.errors import AlignmentError, InsufficientDataError, ParameterError


class TestReactionDiffusion:
    def test_limit_q_to_one(self):
        r = rd_alpha(ReactionDiffusionGrowth(1, 2.0, 1 + 1e-12))
        assert r.alpha == pytest.approx(0.5, abs=1e-12)

    def test_two_dimensional_example(self):
        r = rd_alpha(ReactionDiffusionGrowth(2, 2.0, 1.5))
        assert r.alpha == 0.75
        assert r.valid and r.p_valid and r.q_valid

    def test_p_boundary_invalid(self):
        r = rd_alpha(ReactionDiffusionGrowth(1, 5.0, 1.5))
        assert not r.p_valid and not r.valid
        assert r.alpha == 1.0

    @pytest.mark.parametrize("p,q", [(1.0, 1.5), (2.0, 1.0), (0.5, 2.0)])
    def test_rejects(self, p, q):
        with pytest.raises(ParameterError):
            ReactionDiffusionGrowth(1, p, q)

    def test_monotone(self):
        grid = np.linspace(1.01, 1.9, 12)
        for n in (1, 2, 3):
            a = [[rd_alpha(ReactionDiffusionGrowth(n, p, q)).alpha for q in grid] for p in grid]
            a = np.array(a)
            assert np.all(np.diff(a, axis=0) >= 0) and np.all(np.diff(a, axis=1) >= 0)
        for p, q in [(1.2, 1.1), (1.5, 1.3)]:
            vals = [rd_alpha(ReactionDiffusionGrowth(n, p, q)).alpha for n in (1, 2, 3)]
            assert vals == sorted(vals)

    def test_validity_matches_alpha_below_one(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 4))
            p, q = 1 + 5 * rng.random(2)
            r = rd_alpha(ReactionDiffusionGrowth(n, p, q))
            assert r.valid == (r.alpha < 1)


class TestLotkaVolterra:
    def test_unit_norms(self):
        assert abs(lv_lipschitz(LotkaVolterraParams()) - math.sqrt(10)) <= 1e-12

    def test_zero_radius(self):
        p = LotkaVolterraParams(lam=3.0, mu=2.0, R=0.0)
        assert lv_lipschitz(p) == pytest.approx(math.sqrt(2 * 9.0), rel=1e-15)

    def test_increasing_in_radius(self):
        Rs = np.linspace(0, 5, 30)
        Ls = [lv_lipschitz(LotkaVolterraParams(R=r)) for r in Rs]
        assert all(b > a for a, b in zip(Ls, Ls[1:]))
        assert lv_lipschitz(LotkaVolterraParams(R=2.0)) > lv_lipschitz(LotkaVolterraParams(R=1.0))

    def test_asymmetric_coefficients(self):
        p = LotkaVolterraParams(lam=1.0, mu=0.0, a=0.0, d=2.0, b=1.0, c=0.0, R=1.0)
        b1 = 2 * (1 + 1 * (0 + 1))
        b2 = 2 * (0 + 1 * (8 + 1))
        assert lv_lipschitz(p) == pytest.approx(math.sqrt(max(b1, b2)), rel=1e-15)

    def test_period_forms(self):
        res = lv_period_bound(LotkaVolterraParams())
        assert res.alpha == 0.5
        assert res.direct_relation == ">"
        assert res.direct_form == pytest.approx(0.1, rel=1e-14)
        assert res.theorem_form == pytest.approx(k_alpha(0.5).k_value / 10, rel=1e-14)
        assert res.theorem_form == pytest.approx(0.0098889, abs=1e-7)

    @pytest.mark.parametrize("N,relation", [(2, "none"), (3, "<")])
    def test_outside_theorem_range(self, N, relation):
        with pytest.warns(RuntimeWarning):
            res = lv_period_bound(LotkaVolterraParams(N=N))
        assert res.theorem_form is None
        assert res.direct_relation == relation
        assert res.warning

    def test_linf_variant(self):
        p = LotkaVolterraParams(M=1.0)
        assert lv_linf_lipschitz(p) == pytest.approx(math.sqrt(10), rel=1e-15)
        res = lv_period_bound(p, c=2.5)
        assert res.linf_bound == pytest.approx(2.5 / math.sqrt(10), rel=1e-15)
        assert res.linf_constant == 2.5

    def test_linf_needs_m(self):
        with pytest.raises(ParameterError):
            lv_linf_lipschitz(LotkaVolterraParams())

    @pytest.mark.parametrize("kw", [dict(a=-1.0), dict(C_alpha=0.0), dict(N=4), dict(R=-1.0)])
    def test_rejects(self, kw):
        with pytest.raises(ParameterError):
            LotkaVolterraParams(**kw)


# -- Navier-Stokes ------------------------------------------------------------


def taylor_green(N):
    x = 2 * np.pi * np.arange(N) / N
    X, Y = np.meshgrid(x, x, indexing="xy")
    return NseField.from_physical(np.cos(X) * np.sin(Y), -np.sin(X) * np.cos(Y))


def convolution_oracle(u: NseField, v: NseField) -> np.ndarray:
    """Direct triadic sum of Pi[(u . grad) v] over the retained modes."""
    N = u.N
    kx, ky = wavenumbers(N)
    mask = dealias_mask(N)
    modes = [(int(kx[i, j]), int(ky[i, j]), i, j) for i, j in zip(*np.nonzero(mask))]
    out = np.zeros((2, N, N), dtype=complex)
    for mx, my, mi, mj in modes:
        um = u.coeffs[:, mi, mj]
        for nx, ny, ni, nj in modes:
            px, py = mx + nx, my + ny
            if 3 * abs(px) >= N or 3 * abs(py) >= N:
                continue
            adv = um[0] * 1j * nx + um[1] * 1j * ny
            out[:, py % N, px % N] += adv * v.coeffs[:, ni, nj]
    k2 = kx**2 + ky**2
    k2[0, 0] = 1.0
    div = (kx * out[0] + ky * out[1]) / k2
    out = np.stack([out[0] - kx * div, out[1] - ky * div])
    out[:, 0, 0] = 0.0
    return out


class TestNseField:
    def test_taylor_green_is_admissible(self):
        u = taylor_green(16)
        assert np.abs(u.divergence()).max() <= 1e-14
        np.testing.assert_allclose(u.physical()[0], taylor_green(16).physical()[0])

    def test_rejects_divergent(self):
        N = 8
        c = np.zeros((2, N, N), dtype=complex)
        c[0, 0, 1] = c[0, 0, -1] = 0.5  # cos x in the x component
        with pytest.raises(ParameterError):
            NseField(c)

    def test_rejects_mean_and_asymmetry(self):
        N = 8
        c = np.zeros((2, N, N), dtype=complex)
        c[0, 0, 0] = 1.0
        with pytest.raises(ParameterError):
            NseField(c)
        c = np.zeros((2, N, N), dtype=complex)
        c[0, 1, 0] = 1.0  # ky = 1 with no conjugate partner
        with pytest.raises(ParameterError):
            NseField(c)

    def test_rejects_shape(self):
        with pytest.raises(AlignmentError):
            NseField(np.zeros((3, 4, 4)))

    def test_norms(self):
        u = taylor_green(16)
        # |u|^2 integrates to (2 pi)^2 / 2; each component has |k|^2 = 2
        assert u.l2_norm() == pytest.approx(2 * math.pi / math.sqrt(2), rel=1e-13)
        assert u.grad_norm() == pytest.approx(2 * math.pi, rel=1e-13)

    def test_csv_roundtrip(self, rng, tmp_path):
        u = random_solenoidal_field(16, rng)
        v = field_from_csv(field_to_csv(u))
        np.testing.assert_array_equal(u.coeffs, v.coeffs)
        path = tmp_path / "u.csv"
        write_field_csv(u, path)
        np.testing.assert_array_equal(read_field_csv(path).coeffs, u.coeffs)

    def test_csv_header_required(self):
        with pytest.raises(ParameterError):
            field_from_csv("component,kx,ky,re,im\n")


class TestNseBilinear:
    def test_shear_is_steady(self):
        N = 16
        x = 2 * np.pi * np.arange(N) / N
        _, Y = np.meshgrid(x, x, indexing="xy")
        u = NseField.from_physical(np.sin(2 * Y), np.zeros((N, N)))
        assert nse_bilinear(u, u).l2_norm() <= 1e-14

    def test_taylor_green_against_oracle(self):
        u = taylor_green(16)
        B = nse_bilinear(u, u)
        ref = convolution_oracle(u, u)
        assert abs(B.l2_norm() - 2 * np.pi * np.sqrt(np.sum(np.abs(ref) ** 2))) <= 1e-12
        assert np.abs(B.coeffs - ref).max() <= 1e-12

    def test_random_against_oracle(self, rng):
        u, v = random_solenoidal_field(16, rng), random_solenoidal_field(16, rng)
        B = nse_bilinear(u, v)
        ref = convolution_oracle(u, v)
        assert np.abs(B.coeffs - ref).max() <= 1e-12 * max(1.0, np.abs(ref).max())

    def test_bilinearity(self, rng):
        u, v, w = (random_solenoidal_field(16, rng) for _ in range(3))
        np.testing.assert_allclose(nse_bilinear(2.0 * u, v).coeffs, 2.0 * nse_bilinear(u, v).coeffs, atol=1e-14)
        np.testing.assert_allclose(nse_bilinear(u + w, v).coeffs,
                                   (nse_bilinear(u, v) + nse_bilinear(w, v)).coeffs, atol=1e-14)

    @pytest.mark.parametrize("N", [16, 32])
    def test_invariants_and_energy(self, N, rng):
        for _ in range(5):
            u = random_solenoidal_field(N, rng)
            B = nse_bilinear(u, u)
            assert np.abs(B.divergence()).max() <= 1e-14
            assert abs(B.inner(u)) <= 1e-12 * max(1.0, B.l2_norm() * u.l2_norm())
            assert np.abs(B.coeffs[:, 0, 0]).max() == 0.0

    def test_grid_mismatch(self, rng):
        with pytest.raises(AlignmentError):
            nse_bilinear(random_solenoidal_field(16, rng), random_solenoidal_field(32, rng))


class TestNseLipschitz:
    def test_identical_pairs_skipped(self, rng):
        u = random_solenoidal_field(16, rng)
        u = u * (2.0 / u.grad_norm())
        pairs = [(u, u)] * 10
        with pytest.raises(InsufficientDataError):
            nse_lipschitz_ratio(pairs, 2.0)

    def test_finite_at_g8(self, rng):
        c = nse_lipschitz_ratio(sample_pairs(32, 8.0, 50, rng), 8.0)
        assert np.isfinite(c) and c > 0

    def test_stable_over_g(self, rng):
        cs = [nse_lipschitz_ratio(sample_pairs(32, G, 20, rng), G) for G in (2.0, 8.0, 32.0, 128.0)]
        assert max(cs) / min(cs) <= 4.0

    def test_scaling_linear(self, rng):
        u, v = random_solenoidal_field(16, rng), random_solenoidal_field(16, rng)

        def raw(s):
            a, b = s * u, s * v
            return (nse_bilinear(a, a) - nse_bilinear(b, b)).l2_norm() / (a - b).grad_norm()

        base = raw(1.0)
        for s in (0.5, 3.0, 10.0):
            assert raw(s) == pytest.approx(s * base, rel=1e-6)

    def test_preconditions(self, rng):
        pairs = sample_pairs(16, 2.0, 10, rng)
        with pytest.raises(ParameterError):
            nse_lipschitz_ratio(pairs, 1.0)
        with pytest.raises(InsufficientDataError):
            nse_lipschitz_ratio(pairs[:5], 2.0)
        with pytest.raises(ParameterError):
            nse_lipschitz_ratio(sample_pairs(16, 4.0, 10, rng), 2.0)


class TestNsePeriodBound:
    def test_example(self):
        val = nse_period_bound(10.0, 1.0)
        assert val == pytest.approx(k_alpha(0.5).k_value * 0.01 / (1 + math.log(10)), rel=1e-14)
        assert val == pytest.approx(2.9943e-4, abs=1e-8)

    def test_small_g(self):
        val = nse_period_bound(math.e - 1, 1.0)
        assert math.isfinite(val) and val > 0

    def test_c_scaling(self):
        assert nse_period_bound(5.0, 2.0) == pytest.approx(nse_period_bound(5.0, 1.0) / 4, rel=1e-15)

    @pytest.mark.parametrize("G,c", [(1.0, 1.0), (2.0, 0.0), (0.5, 1.0)])
    def test_rejects(self, G, c):
        with pytest.raises(ParameterError):
            nse_period_bound(G, c)

    def test_grashof(self):
        f = taylor_green(16)
        assert grashof_number(f, nu=0.5) == pytest.approx(f.l2_norm() / 0.25, rel=1e-15)
        with pytest.raises(ParameterError):
            grashof_number(f, nu=0.0)
