"""Periodic-torus spectral representation.

Fields live on a uniform grid over [0, L_1) x ... x [0, L_d), d <= 3, and are
stored as normalized Fourier coefficients c_k = (1/prod N_i) FFT(samples), so
that for a trigonometric polynomial f(x) = sum_k c_k exp(i k.x) the continuum
L^2 norm satisfies

    int |f|^2 dx = vol * sum_k |c_k|^2,      vol = prod L_i.

All norms below use this continuum convention, so single-mode values like
||cos x||^2 = pi on L = 2*pi hold exactly.  Homogeneous Sobolev norms exclude
the k = 0 mode; every Fourier multiplier annihilates it (value at zero fixed
to the zero matrix), and Nyquist modes are forced to zero on construction so
Hermitian symmetry and derivative symbols are unambiguous.

Products use the 2/3 rule: modes with |m_i| > (N_i - 1)//3 on any axis are
zeroed on both inputs and the output, which makes quadratic collocation
products alias-free and preserves the discrete skew-symmetry identities to
roundoff.

Every operation is a pure function of its inputs and fields are immutable
after construction (coefficient buffers are write-protected), so concurrent
use on shared or distinct inputs is safe; cached symbol evaluations are
read-only after creation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, cached_property
from numbers import Real
from typing import Callable

import numpy as np

__all__ = [
    "Grid",
    "SpectralField",
    "MultiplierSymbol",
    "to_spectral",
    "to_physical",
    "apply_multiplier",
    "fractional_laplacian",
    "semigroup_apply",
    "sobolev_norm",
    "l2_norm",
    "inner_product",
    "dealias_product",
    "dealias_truncate",
    "interpolation_check",
    "identity_symbol",
    "partial_derivative",
    "gradient_symbol",
    "divergence_symbol",
    "riesz_symbol",
    "riesz_perp_symbol",
    "halfwave_symbol",
    "leray_symbol",
    "grad_inv_laplacian_symbol",
    "tensor_divergence_symbol",
    "compose_symbols",
    "operator_gain",
]

# Relative threshold below which a zero mode counts as roundoff, not a mean.
_MEAN_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: per-axis mode counts and periods."""

    modes: tuple[int, ...]
    periods: tuple[float, ...]

    def __post_init__(self):
        if not 1 <= len(self.modes) <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {len(self.modes)}")
        if len(self.periods) != len(self.modes):
            raise ValueError("modes and periods must have equal length")
        for n in self.modes:
            if n < 4 or n % 2 != 0:
                raise ValueError(f"mode count must be even and >= 4, got {n}")
        for L in self.periods:
            if not L > 0:
                raise ValueError(f"period must be positive, got {L}")

    @staticmethod
    def make(modes, periods=None) -> "Grid":
        """Build a grid from ints or sequences; default period 2*pi per axis."""
        if isinstance(modes, int):
            modes = (modes,)
        modes = tuple(int(n) for n in modes)
        if periods is None:
            periods = (2.0 * np.pi,) * len(modes)
        elif isinstance(periods, Real):
            periods = (float(periods),) * len(modes)
        else:
            periods = tuple(float(L) for L in periods)
        return Grid(modes, periods)

    @property
    def dimension(self) -> int:
        return len(self.modes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.modes

    @property
    def volume(self) -> float:
        return float(np.prod(self.periods))

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.periods, self.modes))

    @cached_property
    def mode_numbers(self) -> tuple[np.ndarray, ...]:
        """Integer mode index m_i per axis, in FFT order."""
        return tuple(
            np.rint(np.fft.fftfreq(n) * n).astype(int) for n in self.modes
        )

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Physical wavenumber array per axis, broadcastable over the lattice."""
        out = []
        d = self.dimension
        for axis, (n, L) in enumerate(zip(self.modes, self.periods)):
            k = (2.0 * np.pi / L) * self.mode_numbers[axis].astype(float)
            shape = [1] * d
            shape[axis] = n
            out.append(k.reshape(shape))
        return tuple(out)

    @cached_property
    def k_squared(self) -> np.ndarray:
        ksq = np.zeros(self.shape)
        for k in self.wavenumbers:
            ksq = ksq + k**2
        return ksq

    @cached_property
    def k_modulus(self) -> np.ndarray:
        return np.sqrt(self.k_squared)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True on modes that touch a Nyquist frequency on any axis."""
        mask = np.zeros(self.shape, dtype=bool)
        for axis, (n, m) in enumerate(zip(self.modes, self.mode_numbers)):
            shape = [1] * self.dimension
            shape[axis] = n
            mask |= (m == -n // 2).reshape(shape)
        return mask

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True on modes kept by the 2/3 rule: |m_i| <= (N_i - 1)//3."""
        keep = np.ones(self.shape, dtype=bool)
        for axis, (n, m) in enumerate(zip(self.modes, self.mode_numbers)):
            shape = [1] * self.dimension
            shape[axis] = n
            keep &= (np.abs(m) <= (n - 1) // 3).reshape(shape)
        return keep

    @property
    def zero_index(self) -> tuple[int, ...]:
        return (0,) * self.dimension

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Physical coordinate arrays (meshgrid, ij indexing)."""
        axes = [
            np.linspace(0.0, L, n, endpoint=False)
            for n, L in zip(self.modes, self.periods)
        ]
        if self.dimension == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))


def _reflect(coeffs: np.ndarray, d: int) -> np.ndarray:
    """Index map k -> -k on the trailing d axes of an FFT-ordered array."""
    out = coeffs
    for axis in range(-d, 0):
        out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return out


@dataclass(frozen=True)
class SpectralField:
    """Immutable spectral state: complex coefficients over the grid lattice.

    coeffs has shape (components,) + grid.shape and is Hermitian-symmetric
    (the physical field is real).  Nyquist modes are zeroed on construction.
    If mean_zero is set, the k = 0 coefficient is required to vanish up to
    roundoff and is then pinned to exactly zero.
    """

    grid: Grid
    coeffs: np.ndarray
    mean_zero: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape == self.grid.shape:
            c = c[np.newaxis]
        if c.ndim != self.grid.dimension + 1 or c.shape[1:] != self.grid.shape:
            raise ValueError(
                f"coefficient shape {np.shape(self.coeffs)} does not match "
                f"grid shape {self.grid.shape}"
            )
        c = c.copy()
        c[:, self.grid.nyquist_mask] = 0.0
        if self.mean_zero:
            zero = (slice(None),) + self.grid.zero_index
            scale = np.max(np.abs(c)) if c.size else 0.0
            if np.any(np.abs(c[zero]) > _MEAN_TOL * max(scale, 1e-300)):
                raise ValueError(
                    "field declared mean_zero but has a nonzero k=0 mode; "
                    "project it explicitly"
                )
            c[zero] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    def with_coeffs(self, coeffs: np.ndarray, mean_zero: bool | None = None) -> "SpectralField":
        if mean_zero is None:
            mean_zero = self.mean_zero
        return SpectralField(self.grid, coeffs, mean_zero)

    def remove_mean(self) -> "SpectralField":
        """Project out the k = 0 mode (explicit, never implicit)."""
        c = self.coeffs.copy()
        c[(slice(None),) + self.grid.zero_index] = 0.0
        return SpectralField(self.grid, c, mean_zero=True)

    def has_zero_mean(self) -> bool:
        zero = (slice(None),) + self.grid.zero_index
        scale = max(float(np.max(np.abs(self.coeffs))), 1e-300)
        return bool(np.all(np.abs(self.coeffs[zero]) <= _MEAN_TOL * scale))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_compatible(self, other)
        return SpectralField(
            self.grid, self.coeffs + other.coeffs,
            self.mean_zero and other.mean_zero,
        )

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_compatible(self, other)
        return SpectralField(
            self.grid, self.coeffs - other.coeffs,
            self.mean_zero and other.mean_zero,
        )

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * float(scalar), self.mean_zero)

    __rmul__ = __mul__

    def hermitian_defect(self) -> float:
        """Max |c(-k) - conj(c(k))|; zero for real physical fields."""
        mirrored = _reflect(self.coeffs, self.grid.dimension)
        return float(np.max(np.abs(mirrored - np.conj(self.coeffs))))


def _check_compatible(f: SpectralField, g: SpectralField):
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    if f.components != g.components:
        raise ValueError(
            f"component mismatch: {f.components} vs {g.components}"
        )


# ---------------------------------------------------------------------------
# transforms

def to_spectral(samples, grid: Grid, mean_zero: bool | None = None) -> SpectralField:
    """Forward transform of real physical samples.

    samples has shape grid.shape (one component) or (m,) + grid.shape.
    mean_zero=None auto-detects a roundoff-level mean and pins it to zero.
    """
    x = np.asarray(samples, dtype=float)
    if x.shape == grid.shape:
        x = x[np.newaxis]
    if x.ndim != grid.dimension + 1 or x.shape[1:] != grid.shape:
        raise ValueError(
            f"sample shape {np.shape(samples)} does not match grid shape {grid.shape}"
        )
    axes = tuple(range(1, grid.dimension + 1))
    c = np.fft.fftn(x, axes=axes) / float(np.prod(grid.modes))
    if mean_zero is None:
        zero = (slice(None),) + grid.zero_index
        scale = max(float(np.max(np.abs(c))), 1e-300)
        mean_zero = bool(np.all(np.abs(c[zero]) <= _MEAN_TOL * scale))
        if mean_zero:
            c[zero] = 0.0
    return SpectralField(grid, c, mean_zero)


def to_physical(field: SpectralField) -> np.ndarray:
    """Inverse transform to real samples; drops the component axis for scalars."""
    grid = field.grid
    axes = tuple(range(1, grid.dimension + 1))
    x = np.fft.ifftn(field.coeffs * float(np.prod(grid.modes)), axes=axes).real
    return x[0] if field.components == 1 else x


# ---------------------------------------------------------------------------
# multiplier symbols

@dataclass(frozen=True, eq=False)
class MultiplierSymbol:
    """Fourier multiplier of homogeneous degree, possibly matrix-valued.

    build(grid) returns the symbol evaluated on the lattice with shape
    (out_components, in_components) + grid.shape; the k = 0 entry must be the
    zero matrix.  All symbols (derivatives, Riesz, Leray, |k|^s scalings) are
    exactly homogeneous: ||symbol(c*k)|| = c**degree * ||symbol(k)||.
    """

    name: str
    degree: Fraction
    out_components: int
    in_components: int
    build: Callable[[Grid], np.ndarray]

    def on_grid(self, grid: Grid) -> np.ndarray:
        return _symbol_on_grid(self, grid)


@lru_cache(maxsize=256)
def _symbol_on_grid(sym: MultiplierSymbol, grid: Grid) -> np.ndarray:
    arr = np.asarray(sym.build(grid), dtype=np.complex128)
    expected = (sym.out_components, sym.in_components) + grid.shape
    if arr.shape != expected:
        raise ValueError(
            f"symbol {sym.name!r} built shape {arr.shape}, expected {expected}"
        )
    arr = arr.copy()
    arr[(slice(None), slice(None)) + grid.zero_index] = 0.0
    arr.setflags(write=False)
    return arr


def _deg(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def identity_symbol(m: int = 1) -> MultiplierSymbol:
    """Identity away from k = 0; doubles as the mean-removal projector."""
    def build(grid: Grid) -> np.ndarray:
        arr = np.zeros((m, m) + grid.shape, dtype=np.complex128)
        for i in range(m):
            arr[i, i] = 1.0
        return arr
    return MultiplierSymbol("I", Fraction(0), m, m, build)


def partial_derivative(axis: int) -> MultiplierSymbol:
    def build(grid: Grid) -> np.ndarray:
        return (1j * grid.wavenumbers[axis] * np.ones(grid.shape))[None, None]
    return MultiplierSymbol(f"d/dx{axis}", Fraction(1), 1, 1, build)


def gradient_symbol(d: int) -> MultiplierSymbol:
    def build(grid: Grid) -> np.ndarray:
        arr = np.zeros((d, 1) + grid.shape, dtype=np.complex128)
        for i in range(d):
            arr[i, 0] = 1j * grid.wavenumbers[i]
        return arr
    return MultiplierSymbol("grad", Fraction(1), d, 1, build)


def divergence_symbol(d: int) -> MultiplierSymbol:
    def build(grid: Grid) -> np.ndarray:
        arr = np.zeros((1, d) + grid.shape, dtype=np.complex128)
        for i in range(d):
            arr[0, i] = 1j * grid.wavenumbers[i]
        return arr
    return MultiplierSymbol("div", Fraction(1), 1, d, build)


def _safe_inv_modulus(grid: Grid, power: float) -> np.ndarray:
    kmod = grid.k_modulus.copy()
    kmod[grid.zero_index] = 1.0
    inv = kmod**(-power)
    inv[grid.zero_index] = 0.0
    return inv


def riesz_symbol(axis: int, d: int) -> MultiplierSymbol:
    """Single Riesz component i*k_axis/|k| (degree 0)."""
    def build(grid: Grid) -> np.ndarray:
        inv = _safe_inv_modulus(grid, 1.0)
        return (1j * grid.wavenumbers[axis] * inv)[None, None]
    return MultiplierSymbol(f"riesz{axis}", Fraction(0), 1, 1, build)


def riesz_perp_symbol() -> MultiplierSymbol:
    """2D velocity-from-scalar pair with symbol (-i k_2, i k_1)/|k|."""
    def build(grid: Grid) -> np.ndarray:
        inv = _safe_inv_modulus(grid, 1.0)
        arr = np.zeros((2, 1) + grid.shape, dtype=np.complex128)
        arr[0, 0] = -1j * grid.wavenumbers[1] * inv
        arr[1, 0] = 1j * grid.wavenumbers[0] * inv
        return arr
    return MultiplierSymbol("riesz_perp", Fraction(0), 2, 1, build)


def halfwave_symbol(s, m: int = 1) -> MultiplierSymbol:
    """|k|^s scaling on m components (degree s)."""
    s_frac = _deg(s)
    def build(grid: Grid) -> np.ndarray:
        if float(s_frac) >= 0:
            gain = grid.k_modulus ** float(s_frac)
        else:
            gain = _safe_inv_modulus(grid, -float(s_frac))
        arr = np.zeros((m, m) + grid.shape, dtype=np.complex128)
        for i in range(m):
            arr[i, i] = gain
        return arr
    return MultiplierSymbol(f"|k|^{s}", s_frac, m, m, build)


def leray_symbol(d: int) -> MultiplierSymbol:
    """Projection onto divergence-free fields: I - k k^T / |k|^2."""
    def build(grid: Grid) -> np.ndarray:
        inv2 = _safe_inv_modulus(grid, 2.0)
        arr = np.zeros((d, d) + grid.shape, dtype=np.complex128)
        for i in range(d):
            for j in range(d):
                arr[i, j] = -grid.wavenumbers[i] * grid.wavenumbers[j] * inv2
            arr[i, i] += np.where(grid.k_squared > 0, 1.0, 0.0)
        return arr
    return MultiplierSymbol("leray", Fraction(0), d, d, build)


def grad_inv_laplacian_symbol(d: int) -> MultiplierSymbol:
    """Drift-from-density operator grad(Laplacian^-1), symbol -i k/|k|^2."""
    def build(grid: Grid) -> np.ndarray:
        inv2 = _safe_inv_modulus(grid, 2.0)
        arr = np.zeros((d, 1) + grid.shape, dtype=np.complex128)
        for i in range(d):
            arr[i, 0] = -1j * grid.wavenumbers[i] * inv2
        return arr
    return MultiplierSymbol("grad_inv_lap", Fraction(-1), d, 1, build)


def tensor_divergence_symbol(d: int) -> MultiplierSymbol:
    """Contraction of a flattened outer product w_(i,j) = a_i b_j into
    sum_i d_i w_(i,j); input index (i, j) is flattened as i*d + j."""
    def build(grid: Grid) -> np.ndarray:
        arr = np.zeros((d, d * d) + grid.shape, dtype=np.complex128)
        for i in range(d):
            for j in range(d):
                arr[j, i * d + j] = 1j * grid.wavenumbers[i]
        return arr
    return MultiplierSymbol("tensor_div", Fraction(1), d, d * d, build)


def compose_symbols(outer: MultiplierSymbol, inner: MultiplierSymbol) -> MultiplierSymbol:
    if outer.in_components != inner.out_components:
        raise ValueError(
            f"cannot compose {outer.name!r} ({outer.in_components} in) with "
            f"{inner.name!r} ({inner.out_components} out)"
        )
    def build(grid: Grid) -> np.ndarray:
        return np.einsum(
            "ab...,bc...->ac...", outer.on_grid(grid), inner.on_grid(grid)
        )
    return MultiplierSymbol(
        f"{outer.name}*{inner.name}",
        outer.degree + inner.degree,
        outer.out_components,
        inner.in_components,
        build,
    )


def operator_gain(sym: MultiplierSymbol, grid: Grid) -> float:
    """Operator-bound constant: sup over the lattice of ||symbol(k)|| / |k|^degree."""
    arr = sym.on_grid(grid)
    d = grid.dimension
    mat = np.moveaxis(arr.reshape(arr.shape[:2] + (-1,)), -1, 0)
    sv = np.linalg.svd(mat, compute_uv=False)[:, 0]
    kmod = grid.k_modulus.reshape(-1)
    mask = kmod > 0
    return float(np.max(sv[mask] / kmod[mask] ** float(sym.degree)))


# ---------------------------------------------------------------------------
# operations

def apply_multiplier(field: SpectralField, sym: MultiplierSymbol) -> SpectralField:
    """Pointwise symbol application: out(k) = symbol(k) . coeffs(k)."""
    if sym.in_components != field.components:
        raise ValueError(
            f"symbol {sym.name!r} expects {sym.in_components} components, "
            f"field has {field.components}"
        )
    if sym.degree < 0 and not field.has_zero_mean():
        raise ValueError(
            f"negative-degree symbol {sym.name!r} requires a mean-zero field"
        )
    out = np.einsum("oi...,i...->o...", sym.on_grid(field.grid), field.coeffs)
    return SpectralField(field.grid, out, mean_zero=True)


def fractional_laplacian(field: SpectralField, s: float) -> SpectralField:
    """(-Laplacian)^s: multiply by |k|^(2s); the zero mode maps to zero."""
    if s < 0 and not field.has_zero_mean():
        raise ValueError("negative fractional Laplacian needs a mean-zero field")
    grid = field.grid
    if s >= 0:
        gain = grid.k_modulus ** (2.0 * s)
    else:
        gain = _safe_inv_modulus(grid, -2.0 * s)
    gain = gain.copy()
    gain[grid.zero_index] = 0.0
    return SpectralField(grid, field.coeffs * gain, mean_zero=True)


def semigroup_apply(field: SpectralField, theta: float, t: float) -> SpectralField:
    """Exact dissipative semigroup: coeffs(k) -> exp(-t |k|^(2*theta)) coeffs(k)."""
    if t < 0:
        raise ValueError(f"semigroup time must be nonnegative, got {t}")
    if theta <= 0:
        raise ValueError(f"dissipation order must be positive, got {theta}")
    factor = np.exp(-t * field.grid.k_squared ** float(theta))
    return SpectralField(field.grid, field.coeffs * factor, field.mean_zero)


def sobolev_norm(field: SpectralField, s: float) -> float:
    """Homogeneous Sobolev norm of order s, zero mode excluded, all components."""
    if s < 0 and not field.has_zero_mean():
        raise ValueError("negative-order Sobolev norm needs a mean-zero field")
    return _sobolev_from_coeffs(field.grid, field.coeffs, s)


def _sobolev_from_coeffs(grid: Grid, coeffs: np.ndarray, s: float) -> float:
    if s >= 0:
        gain = grid.k_modulus ** (2.0 * s)
        gain = gain.copy()
        gain[grid.zero_index] = 0.0
    else:
        gain = _safe_inv_modulus(grid, -2.0 * s)
    total = np.sum(gain * np.sum(np.abs(coeffs) ** 2, axis=0))
    return float(np.sqrt(grid.volume * total))


def l2_norm(field: SpectralField) -> float:
    """Plain L^2 norm including the mean mode (for monitoring)."""
    total = np.sum(np.abs(field.coeffs) ** 2)
    return float(np.sqrt(field.grid.volume * total))


def inner_product(f: SpectralField, g: SpectralField) -> float:
    """Real L^2 pairing; inner_product(f, f) == l2_norm(f)**2."""
    _check_compatible(f, g)
    return float(f.grid.volume * np.sum(np.conj(f.coeffs) * g.coeffs).real)


def dealias_truncate(field: SpectralField) -> SpectralField:
    c = field.coeffs * field.grid.dealias_mask
    return SpectralField(field.grid, c, field.mean_zero)


def _dealiased_physical(field: SpectralField) -> np.ndarray:
    grid = field.grid
    axes = tuple(range(1, grid.dimension + 1))
    c = field.coeffs * grid.dealias_mask
    return np.fft.ifftn(c * float(np.prod(grid.modes)), axes=axes).real


def _physical_to_truncated(grid: Grid, samples: np.ndarray) -> np.ndarray:
    axes = tuple(range(1, grid.dimension + 1))
    c = np.fft.fftn(samples, axes=axes) / float(np.prod(grid.modes))
    return c * grid.dealias_mask


def dealias_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Alias-free pointwise product with 2/3 truncation on inputs and output.

    Components multiply elementwise; a single-component factor broadcasts.
    The k = 0 mode of the product is retained (project explicitly if needed).
    """
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    if f.components != g.components and 1 not in (f.components, g.components):
        raise ValueError(
            f"cannot broadcast products of {f.components} and {g.components} components"
        )
    fp = _dealiased_physical(f)
    gp = _dealiased_physical(g)
    c = _physical_to_truncated(f.grid, fp * gp)
    return SpectralField(f.grid, c, mean_zero=False)


def interpolation_check(
    field: SpectralField, s1: float, s2: float, lam: float
) -> tuple[float, float]:
    """Evaluate both sides of the Sobolev interpolation inequality.

    Returns (lhs, rhs) with lhs = ||f|| at order (1-lam)*s1 + lam*s2 and
    rhs = ||f||_{s1}^(1-lam) * ||f||_{s2}^lam; lhs <= rhs * (1 + 1e-12).
    """
    if not s1 < s2:
        raise ValueError(f"need s1 < s2, got {s1}, {s2}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"interpolation parameter must lie in [0, 1], got {lam}")
    s_mid = (1.0 - lam) * s1 + lam * s2
    lhs = sobolev_norm(field, s_mid)
    rhs = sobolev_norm(field, s1) ** (1.0 - lam) * sobolev_norm(field, s2) ** lam
    return lhs, rhs
