import numpy as np
import pytest

from specenergy import Grid, SpectralField, dealias_truncate, to_spectral
from specenergy.models import project_subspace


def random_field(grid, components=1, seed=0, kmax=None, mean_zero=True):
    """Seeded random real field, optionally band-limited to lattice radius kmax."""
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((components,) + grid.shape)
    f = to_spectral(samples, grid)
    if mean_zero:
        f = f.remove_mean()
    if kmax is not None:
        r2 = np.zeros(grid.shape)
        for axis, m in enumerate(grid.mode_numbers):
            shape = [1] * grid.dimension
            shape[axis] = grid.modes[axis]
            r2 = r2 + m.reshape(shape).astype(float) ** 2
        c = f.coeffs * (np.sqrt(r2) <= kmax)
        f = SpectralField(grid, c, f.mean_zero)
    return f


def random_model_field(spec, grid, seed=0, kmax=None, target_norm=None, norm_space=None):
    """Random field adapted to a model: projected, dealiased, optionally scaled."""
    from specenergy import sobolev_norm

    f = random_field(grid, components=spec.components, seed=seed, kmax=kmax)
    f = dealias_truncate(project_subspace(spec, f))
    if target_norm is not None:
        s = float(spec.critical_index) if norm_space is None else norm_space
        f = f * (target_norm / sobolev_norm(f, s))
    return f


@pytest.fixture
def grid1d():
    return Grid.make(64)


@pytest.fixture
def grid2d():
    return Grid.make((32, 32))
