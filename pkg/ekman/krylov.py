"""Arnoldi iteration on a black-box linear map."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class ArnoldiResult:
    basis: np.ndarray
    hessenberg: np.ndarray
    steps: int

    @property
    def breakdown(self):
        return self.hessenberg[self.steps, self.steps - 1] == 0


def arnoldi(matvec, start, steps, breakdown_tol=1e-14):
    """Build an orthonormal Krylov basis of ``matvec`` from ``start``.

    Gram-Schmidt is applied twice per step. The iteration stops early when the
    new direction vanishes, which means an invariant subspace was found.
    """
    start = np.asarray(start, dtype=float)
    norm = np.linalg.norm(start)
    if norm == 0:
        raise ValueError("start vector must be nonzero")
    basis = np.zeros((start.size, steps + 1))
    hessenberg = np.zeros((steps + 1, steps))
    basis[:, 0] = start / norm

    for j in range(steps):
        w = np.asarray(matvec(basis[:, j]), dtype=float)
        for _ in range(2):
            coefficients = basis[:, :j + 1].T @ w
            w = w - basis[:, :j + 1] @ coefficients
            hessenberg[:j + 1, j] += coefficients
        hessenberg[j + 1, j] = np.linalg.norm(w)
        if hessenberg[j + 1, j] <= breakdown_tol * np.linalg.norm(hessenberg[:j + 2, j]):
            hessenberg[j + 1, j] = 0.0
            return ArnoldiResult(basis[:, :j + 2], hessenberg[:j + 2, :j + 1], j + 1)
        basis[:, j + 1] = w / hessenberg[j + 1, j]

    return ArnoldiResult(basis, hessenberg, steps)


def ritz_pairs(result):
    """Ritz values and their residual norms |h_{m+1,m} y_m|."""
    m = result.steps
    values, vectors = scipy.linalg.eig(result.hessenberg[:m, :m])
    residuals = abs(result.hessenberg[m, m - 1]) * np.abs(vectors[-1, :])
    return values, residuals
