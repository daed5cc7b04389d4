"""Independent reference computations: closed forms and dense assemblies on small grids.

Nothing here shares code with the spectral operators it is compared against.
"""
import math

import numpy as np
import scipy.linalg

from .models import layer_thickness


def boundary_condition_coefficients(params):
    """k1..k4 from the 4x4 linear system of the boundary conditions, for f > 0.

    Rows: v_1'(0) = tau_1, v_2'(0) = tau_2, v_1(-h) = vg_1, v_2(-h) = vg_2.
    """
    d = layer_thickness(params)
    s = -params.h / d
    sin, cos = math.sin(s), math.cos(s)
    decay, growth = math.exp(-s), math.exp(s)
    system = np.array([
        [1.0 / d, -1.0 / d, 1.0 / d, 1.0 / d],
        [-1.0 / d, -1.0 / d, -1.0 / d, 1.0 / d],
        [sin * decay, cos * decay, sin * growth, cos * growth],
        [cos * decay, -sin * decay, -cos * growth, sin * growth],
    ])
    rhs = np.array([params.tau[0], params.tau[1], params.v_g[0], params.v_g[1]])
    return scipy.linalg.solve(system, rhs)


def vertical_eigenvalues(h, count):
    """mu_j = ((2j+1) pi / 2h)^2 of -d_z^2 with u'(0) = 0, u(-h) = 0."""
    return np.array([((2 * j + 1) * math.pi / (2 * h)) ** 2 for j in range(count)])


def slowest_diffusive_rate(params, grid, vertical_modes=4):
    """Least negative -(nu_H |k|^2 + nu_z mu_j) over the resolved admissible modes."""
    k2 = np.unique(grid.k2)
    mu = vertical_eigenvalues(params.h, vertical_modes)
    rates = -(params.nu_h * k2[:, None] + params.nu_z * mu[None, :])
    return float(np.max(rates))


def fourier_diff_matrix(n, length, order=1):
    """Fourier collocation derivative on n uniform points of a period ``length``."""
    rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    offset = rows - cols
    matrix = np.zeros((n, n))
    off = offset != 0
    matrix[off] = (2 * math.pi / length * 0.5 * (-1.0) ** offset[off]
                   / np.tan(math.pi * offset[off] / n))
    return np.linalg.matrix_power(matrix, order)


def chebyshev_diff_matrix(nz, h, order=1):
    """Collocation derivative on z_j = h (cos(pi j / nz) - 1) / 2, by the explicit formula."""
    x = np.cos(math.pi * np.arange(nz + 1) / nz)
    c = np.ones(nz + 1)
    c[0] = c[nz] = 2.0
    matrix = np.zeros((nz + 1, nz + 1))
    for j in range(nz + 1):
        for k in range(nz + 1):
            if j != k:
                matrix[j, k] = c[j] * (-1.0) ** (j + k) / (c[k] * (x[j] - x[k]))
            elif j in (0, nz):
                matrix[j, k] = x[j] * (2.0 * nz ** 2 + 1) / 6.0
            else:
                matrix[j, k] = -x[j] / (2.0 * (1.0 - x[j] ** 2))
    return np.linalg.matrix_power(matrix * (2.0 / h), order)


def clenshaw_curtis_weights(nz, h):
    """Quadrature weights on the same nodes, by the closed cosine-series formula."""
    theta = math.pi * np.arange(nz + 1) / nz
    weights = np.zeros(nz + 1)
    interior = np.ones(nz - 1)
    inner_theta = theta[1:nz]
    if nz % 2 == 0:
        weights[0] = weights[nz] = 1.0 / (nz ** 2 - 1)
        for k in range(1, nz // 2):
            interior -= 2 * np.cos(2 * k * inner_theta) / (4 * k ** 2 - 1)
        interior -= np.cos(nz * inner_theta) / (nz ** 2 - 1)
    else:
        weights[0] = weights[nz] = 1.0 / nz ** 2
        for k in range(1, (nz - 1) // 2 + 1):
            interior -= 2 * np.cos(2 * k * inner_theta) / (4 * k ** 2 - 1)
    weights[1:nz] = 2 * interior / nz
    return weights * h / 2.0


def dense_poisson(rhs, lx, ly):
    """Zero-mean solution of Delta_H p = rhs on a uniform periodic grid, via dense matrices."""
    nx, ny = rhs.shape
    dxx = fourier_diff_matrix(nx, lx, 2)
    dyy = fourier_diff_matrix(ny, ly, 2)
    laplacian = np.kron(dxx, np.eye(ny)) + np.kron(np.eye(nx), dyy)
    constraint = np.vstack([laplacian, np.ones((1, nx * ny))])
    target = np.concatenate([rhs.ravel(), [0.0]])
    solution, *_ = scipy.linalg.lstsq(constraint, target)
    return solution.reshape(nx, ny)


def dense_apply_A_xz(params, grid, values):
    """A v for a y-independent field when v_E = 0, assembled with dense matrices.

    ``values`` has shape (2, N_x, N_z + 1); returns the same shape.
    """
    dxx = fourier_diff_matrix(grid.nx, grid.lx, 2)
    dzz = chebyshev_diff_matrix(grid.nz, grid.h, 2)
    weights = clenshaw_curtis_weights(grid.nz, grid.h)
    diffused = np.stack([params.nu_h * dxx @ c + params.nu_z * c @ dzz.T for c in values])
    rotated = params.f * np.stack([-values[1], values[0]])
    total = diffused - rotated
    # With no y dependence the gradient part of the average is the x-varying part of its first component.
    average = total[0] @ weights / grid.h
    total[0] -= (average - average.mean())[:, None]
    return total


def apply_F_closed_form(x, z, h):
    """F(v, v) for v = (sin x (z + h)^2, 0) on a 2 pi periodic x."""
    return np.stack([np.sin(2 * x) / 6.0 * ((z + h) ** 4 - h ** 4 / 5.0), np.zeros_like(x * z)])
