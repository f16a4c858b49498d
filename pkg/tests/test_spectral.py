"""Spectral core: transforms, multipliers, norms, dealiased products."""

import numpy as np
import pytest

from specenergy import (
    Grid,
    SpectralField,
    apply_multiplier,
    dealias_product,
    fractional_laplacian,
    inner_product,
    interpolation_check,
    l2_norm,
    semigroup_apply,
    sobolev_norm,
    to_physical,
    to_spectral,
)
from specenergy.spectral import (
    compose_symbols,
    gradient_symbol,
    halfwave_symbol,
    identity_symbol,
    leray_symbol,
    operator_gain,
    partial_derivative,
    riesz_perp_symbol,
)
from conftest import random_field

PI = np.pi


class TestGrid:
    def test_defaults(self):
        g = Grid.make(8)
        assert g.dimension == 1
        assert g.periods == (2 * PI,)
        assert g.volume == pytest.approx(2 * PI)

    def test_validation(self):
        with pytest.raises(ValueError, match="even"):
            Grid.make(9)
        with pytest.raises(ValueError, match=">= 4"):
            Grid.make(2)
        with pytest.raises(ValueError, match="positive"):
            Grid((8,), (-1.0,))
        with pytest.raises(ValueError, match="dimension"):
            Grid.make((8, 8, 8, 8))

    def test_wavenumbers_symmetric_except_nyquist(self):
        g = Grid.make(8)
        m = g.mode_numbers[0]
        assert sorted(m) == [-4, -3, -2, -1, 0, 1, 2, 3]
        assert g.nyquist_mask.sum() == 1

    def test_dealias_cutoff(self):
        # keep |m| <= (N-1)//3 so quadratic products are alias-free
        for n, kc in ((8, 2), (16, 5), (64, 21), (256, 85)):
            g = Grid.make(n)
            kept = np.abs(g.mode_numbers[0][g.dealias_mask[:]]).max()
            assert kept == kc == (n - 1) // 3


class TestTransforms:
    def test_cosine_single_mode(self):
        g = Grid.make(8)
        x, = g.coordinates()
        f = to_spectral(np.cos(x), g)
        c = f.coeffs[0]
        assert c[1] == pytest.approx(0.5, abs=1e-14)
        assert c[-1] == pytest.approx(0.5, abs=1e-14)
        rest = c.copy()
        rest[1] = rest[-1] = 0
        assert np.max(np.abs(rest)) < 1e-14

    def test_zero_samples(self):
        g = Grid.make(8)
        f = to_spectral(np.zeros(8), g)
        assert np.all(f.coeffs == 0)
        assert f.mean_zero

    @pytest.mark.parametrize("shape,period", [((64,), None), ((16, 16), None),
                                              ((8, 8, 8), None), ((32,), 4 * PI)])
    def test_round_trip_random(self, shape, period):
        # random real samples of a field representable in the class
        # (Nyquist modes are forced to zero on construction)
        g = Grid.make(shape, period)
        x = to_physical(random_field(g, seed=42, mean_zero=False))
        back = to_physical(to_spectral(x, g))
        assert np.max(np.abs(back - x)) <= 1e-12 * np.max(np.abs(x))

    def test_shape_mismatch(self):
        g = Grid.make(8)
        with pytest.raises(ValueError, match="does not match"):
            to_spectral(np.zeros(16), g)

    def test_parseval(self):
        g = Grid.make((32, 32))
        f = random_field(g, seed=1, mean_zero=False)
        phys = to_physical(f)
        physical_l2 = np.sqrt(g.volume * np.mean(phys**2))
        assert l2_norm(f) == pytest.approx(physical_l2, rel=1e-12)

    def test_hermitian_symmetry(self):
        f = random_field(Grid.make((16, 16)), seed=3)
        assert f.hermitian_defect() < 1e-15

    def test_nyquist_zeroed_on_construction(self):
        g = Grid.make(8)
        c = np.ones((1, 8), dtype=complex)
        f = SpectralField(g, c)
        assert f.coeffs[0, 4] == 0

    def test_mean_zero_flag_enforced(self):
        g = Grid.make(8)
        c = np.zeros((1, 8), dtype=complex)
        c[0, 0] = 3.0
        with pytest.raises(ValueError, match="mean_zero"):
            SpectralField(g, c, mean_zero=True)


class TestMultipliers:
    def test_derivative_on_cosine(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x), g)
        df = apply_multiplier(f, partial_derivative(0))
        assert np.max(np.abs(to_physical(df) + np.sin(x))) < 1e-13

    def test_riesz_pair_hand_evaluation(self):
        # symbol (-i k2, i k1)/|k| at k = (+-1, 0) sends cos(x1) to (0, -sin(x1))
        g = Grid.make((16, 16))
        X, _ = g.coordinates()
        f = to_spectral(np.cos(X), g)
        v = to_physical(apply_multiplier(f, riesz_perp_symbol()))
        assert np.max(np.abs(v[0])) < 1e-14
        assert np.max(np.abs(v[1] + np.sin(X))) < 1e-13

    def test_zero_field(self):
        g = Grid.make((16, 16))
        f = SpectralField(g, np.zeros((1, 16, 16), dtype=complex))
        out = apply_multiplier(f, gradient_symbol(2))
        assert np.all(out.coeffs == 0)
        assert out.components == 2

    def test_component_mismatch(self):
        g = Grid.make((16, 16))
        f = random_field(g, components=2, seed=0)
        with pytest.raises(ValueError, match="components"):
            apply_multiplier(f, gradient_symbol(2))

    def test_halfwave_composition(self):
        # |k|^a |k|^b = |k|^(a+b) away from the zero mode
        g = Grid.make(32)
        f = random_field(g, seed=5)
        a, b = 0.7, -0.3
        lhs = apply_multiplier(apply_multiplier(f, halfwave_symbol(a)), halfwave_symbol(b))
        rhs = apply_multiplier(f, halfwave_symbol(a + b))
        scale = np.max(np.abs(rhs.coeffs))
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-12 * scale

    def test_exact_homogeneity_on_lattice(self):
        g = Grid.make(32)
        for sym in (partial_derivative(0), halfwave_symbol(0.5), halfwave_symbol(-1.0)):
            arr = sym.on_grid(g)[0, 0]
            k = np.abs(g.wavenumbers[0]).ravel()
            vals = np.abs(arr).ravel()
            mask = (k > 0) & ~g.nyquist_mask.ravel()
            ratio = vals[mask] / k[mask] ** float(sym.degree)
            assert np.allclose(ratio, ratio[0], rtol=1e-12)

    def test_operator_gain_known_values(self):
        g = Grid.make((16, 16))
        assert operator_gain(identity_symbol(1), g) == pytest.approx(1.0)
        assert operator_gain(riesz_perp_symbol(), g) == pytest.approx(1.0)
        assert operator_gain(leray_symbol(2), g) == pytest.approx(1.0)
        assert operator_gain(gradient_symbol(2), g) == pytest.approx(1.0)

    def test_compose_shape_check(self):
        with pytest.raises(ValueError, match="compose"):
            compose_symbols(partial_derivative(0), gradient_symbol(2))


class TestFractionalLaplacian:
    def test_half_power_is_modulus(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(2 * x), g)
        out = to_physical(fractional_laplacian(f, 0.5))
        assert np.max(np.abs(out - 2 * np.cos(2 * x))) < 1e-13

    def test_negative_power(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x), g)
        out = to_physical(fractional_laplacian(f, -0.25))
        assert np.max(np.abs(out - np.cos(x))) < 1e-13

    def test_sum_of_modes(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x) + np.cos(3 * x), g)
        out = to_physical(fractional_laplacian(f, 1.0))
        assert np.max(np.abs(out - (np.cos(x) + 9 * np.cos(3 * x)))) < 1e-12

    def test_negative_power_requires_mean_zero(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x) + 3.0, g)
        with pytest.raises(ValueError, match="mean-zero"):
            fractional_laplacian(f, -0.5)


class TestSemigroup:
    def test_single_mode_decay(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x), g)
        out = to_physical(semigroup_apply(f, 1.0, 1.0))
        assert np.max(np.abs(out - np.exp(-1.0) * np.cos(x))) < 1e-14

    def test_identity_at_t0(self):
        g = Grid.make(32)
        f = random_field(g, seed=2)
        out = semigroup_apply(f, 1.0, 0.0)
        assert np.array_equal(out.coeffs, f.coeffs)

    def test_fractional_order(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(2 * x), g)
        out = to_physical(semigroup_apply(f, 0.5, 1.0))
        assert np.max(np.abs(out - np.exp(-2.0) * np.cos(2 * x))) < 1e-14

    def test_negative_time_rejected(self):
        g = Grid.make(32)
        f = random_field(g, seed=2)
        with pytest.raises(ValueError, match="nonnegative"):
            semigroup_apply(f, 1.0, -0.1)

    def test_composition_property(self):
        g = Grid.make(32)
        f = random_field(g, seed=7)
        for theta in (0.5, 1.0):
            one = semigroup_apply(f, theta, 0.9)
            two = semigroup_apply(semigroup_apply(f, theta, 0.4), theta, 0.5)
            scale = max(np.max(np.abs(one.coeffs)), 1e-300)
            assert np.max(np.abs(one.coeffs - two.coeffs)) <= 1e-13 * scale


class TestNorms:
    def test_cosine_all_orders(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x), g)
        for s in (-1.0, -0.5, 0.0, 0.5, 1.0, 2.5):
            assert sobolev_norm(f, s) == pytest.approx(np.sqrt(PI), rel=1e-13)

    def test_single_mode_scaling(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(2 * x), g)
        for s in (-0.5, 0.0, 1.0, 1.5):
            assert sobolev_norm(f, s) == pytest.approx(2.0**s * np.sqrt(PI), rel=1e-13)

    def test_zero_field(self):
        g = Grid.make(32)
        f = SpectralField(g, np.zeros((1, 32), dtype=complex), mean_zero=True)
        assert sobolev_norm(f, 1.0) == 0.0

    def test_l2_equals_order_zero_for_mean_zero(self):
        g = Grid.make((16, 16))
        f = random_field(g, seed=9)
        assert sobolev_norm(f, 0.0) == pytest.approx(l2_norm(f), rel=1e-14)

    def test_negative_order_requires_mean_zero(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x) + 1.0, g)
        with pytest.raises(ValueError, match="mean-zero"):
            sobolev_norm(f, -0.5)


class TestInnerProduct:
    def test_cos_with_itself(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x), g)
        assert inner_product(f, f) == pytest.approx(PI, rel=1e-14)

    def test_orthogonality(self):
        g = Grid.make(32)
        x, = g.coordinates()
        c = to_spectral(np.cos(x), g)
        s = to_spectral(np.sin(x), g)
        c2 = to_spectral(np.cos(2 * x), g)
        assert abs(inner_product(c, s)) < 1e-14
        assert abs(inner_product(c, c2)) < 1e-14

    def test_symmetry_and_norm(self):
        g = Grid.make((16, 16))
        f = random_field(g, seed=4)
        h = random_field(g, seed=5)
        assert inner_product(f, h) == pytest.approx(inner_product(h, f), rel=1e-14)
        assert inner_product(f, f) == pytest.approx(l2_norm(f) ** 2, rel=1e-13)

    def test_grid_mismatch(self):
        f = random_field(Grid.make(32), seed=0)
        h = random_field(Grid.make(64), seed=0)
        with pytest.raises(ValueError, match="grids"):
            inner_product(f, h)


def brute_force_truncated_convolution(f, g):
    """Direct spectral convolution restricted to the 2/3-kept modes."""
    grid = f.grid
    keep = grid.dealias_mask
    cf = (f.coeffs * keep)[0]
    cg = (g.coeffs * keep)[0]
    shape = grid.shape
    out = np.zeros(shape, dtype=complex)
    idx = list(np.ndindex(shape))
    for k in idx:
        if not keep[k]:
            continue
        acc = 0.0 + 0.0j
        for p in idx:
            q = tuple((ki - pi) % ni for ki, pi, ni in zip(k, p, shape))
            acc += cf[p] * cg[q]
        out[k] = acc
    return out


class TestDealiasProduct:
    def test_sine_squared(self):
        g = Grid.make(32)
        x, = g.coordinates()
        s = to_spectral(np.sin(x), g)
        prod = dealias_product(s, s)
        expected = 0.5 - 0.5 * np.cos(2 * x)
        assert np.max(np.abs(to_physical(prod) - expected)) < 1e-14
        # mean retained unless projected
        assert prod.coeffs[0, 0] == pytest.approx(0.5, abs=1e-14)

    def test_zero_factor(self):
        g = Grid.make(32)
        f = random_field(g, seed=0)
        z = SpectralField(g, np.zeros_like(f.coeffs))
        assert np.all(dealias_product(f, z).coeffs == 0)

    @pytest.mark.parametrize("shape", [(16,), (8, 8)])
    def test_matches_convolution_oracle(self, shape):
        g = Grid.make(shape)
        f = random_field(g, seed=11, mean_zero=False)
        h = random_field(g, seed=12, mean_zero=False)
        oracle = brute_force_truncated_convolution(f, h)
        prod = dealias_product(f, h)
        scale = max(np.max(np.abs(oracle)), 1e-300)
        assert np.max(np.abs(prod.coeffs[0] - oracle)) <= 1e-12 * scale

    def test_grid_mismatch(self):
        f = random_field(Grid.make(32), seed=0)
        h = random_field(Grid.make(64), seed=0)
        with pytest.raises(ValueError, match="grids"):
            dealias_product(f, h)


class TestInterpolation:
    def test_single_mode_equality(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(2 * x), g)
        lhs, rhs = interpolation_check(f, 0.0, 1.0, 0.5)
        assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_two_mode_inequality(self):
        g = Grid.make(32)
        x, = g.coordinates()
        f = to_spectral(np.cos(x) + np.cos(4 * x), g)
        lhs, rhs = interpolation_check(f, 0.0, 1.0, 0.5)
        assert lhs <= rhs * (1 + 1e-12)
        assert lhs < rhs  # strict for a genuinely multi-mode field

    def test_endpoint(self):
        g = Grid.make(32)
        f = random_field(g, seed=13)
        lhs, rhs = interpolation_check(f, 0.5, 2.0, 0.0)
        assert lhs == pytest.approx(sobolev_norm(f, 0.5), rel=1e-14)
        assert rhs == pytest.approx(sobolev_norm(f, 0.5), rel=1e-14)

    def test_bad_arguments(self):
        f = random_field(Grid.make(32), seed=0)
        with pytest.raises(ValueError):
            interpolation_check(f, 1.0, 0.0, 0.5)
        with pytest.raises(ValueError):
            interpolation_check(f, 0.0, 1.0, 1.5)
