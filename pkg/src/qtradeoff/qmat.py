"""Small dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of shape ``(d, d)`` and complex dtype.
Everything here is a pure function; inputs are never modified in place.

The Hermitian eigensolver is self-contained: a closed-form quadratic
solution for ``d == 2`` and cyclic complex Jacobi rotations for ``d >= 3``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotHermitian, NotPsd, WrongDim

DEFAULT_TOL = 1e-10

_MAX_SWEEPS = 60


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise WrongDim(f"expected a square matrix, got shape {a.shape}")
    return a


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def trace(m) -> complex:
    return complex(np.trace(as_matrix(m)))


def mul(a, b) -> np.ndarray:
    return as_matrix(a) @ as_matrix(b)


def add(a, b) -> np.ndarray:
    return as_matrix(a) + as_matrix(b)


def scale(c, m) -> np.ndarray:
    return complex(c) * as_matrix(m)


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(as_matrix(m)))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(m)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol * max(1.0, frobenius_norm(a)))


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(m)
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)


def is_psd(m, tol: float = DEFAULT_TOL) -> bool:
    if not is_hermitian(m, tol):
        return False
    vals, _ = eig_hermitian(m, tol)
    return bool(vals[-1] >= -tol)


def _eig2(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p, q = a[0, 0].real, a[1, 1].real
    b = a[0, 1]
    half_gap = 0.5 * (p - q)
    mean = 0.5 * (p + q)
    radius = float(np.hypot(half_gap, abs(b)))
    vals = np.array([mean + radius, mean - radius])
    if abs(b) == 0.0:
        if p >= q:
            vecs = np.eye(2, dtype=complex)
        else:
            vecs = np.array([[0, 1], [1, 0]], dtype=complex)
            vals = np.array([q, p])
        return vals, vecs
    lam = vals[0]
    # two candidate null vectors of (A - lam); take the better conditioned one
    v1 = np.array([b, lam - p], dtype=complex)
    v2 = np.array([lam - q, np.conj(b)], dtype=complex)
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    v = v / np.linalg.norm(v)
    w = np.array([-np.conj(v[1]), np.conj(v[0])])
    return vals, np.column_stack([v, w])


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # scalar complex arithmetic on nested lists; numpy slicing overhead
    # dominates for the 3x3 to 6x6 matrices this is used on
    d = a.shape[0]
    a = (0.5 * (a + a.conj().T)).tolist()
    v = [[1.0 + 0j if i == j else 0j for j in range(d)] for i in range(d)]
    scale_ = max(math.sqrt(sum(abs(z) ** 2 for row in a for z in row)), np.finfo(float).tiny)
    for _ in range(_MAX_SWEEPS):
        off = math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(d) for j in range(d) if i != j))
        if off <= 1e-15 * scale_:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p][q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                w = phase.conjugate()
                tau = (a[q][q].real - a[p][p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # phase fix on column q, then a real rotation in the (p, q) plane
                sw, cw, sph, cph = s * w, c * w, s * phase, c * phase
                for k in range(d):
                    ap, aq = a[k][p], a[k][q]
                    a[k][p] = c * ap - sw * aq
                    a[k][q] = s * ap + cw * aq
                rp, rq = a[p], a[q]
                a[p] = [c * x - sph * y for x, y in zip(rp, rq)]
                a[q] = [s * x + cph * y for x, y in zip(rp, rq)]
                a[p][q] = a[q][p] = 0j
                for k in range(d):
                    vp, vq = v[k][p], v[k][q]
                    v[k][p] = c * vp - sw * vq
                    v[k][q] = s * vp + cw * vq
    return np.array([a[i][i].real for i in range(d)]), np.array(v, dtype=complex)


def eig_hermitian(m, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like, shape (d, d)
        Hermitian within ``tol`` (relative to ``max(1, ||m||_F)``).
    tol : float

    Returns
    -------
    vals : ndarray, shape (d,)
        Real eigenvalues, non-increasing; ties keep first-encountered order.
    vecs : ndarray, shape (d, d)
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = as_matrix(m)
    if not is_hermitian(a, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    if a.shape[0] == 1:
        return np.array([a[0, 0].real]), np.ones((1, 1), dtype=complex)
    if a.shape[0] == 2:
        return _eig2(a)
    vals, vecs = _jacobi(a)
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def eigvalsh(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    return eig_hermitian(m, tol)[0]


def psd_sqrt(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything more negative
    raises :class:`NotPsd`.
    """
    vals, vecs = eig_hermitian(m, tol)
    if vals[-1] < -tol:
        raise NotPsd(f"smallest eigenvalue {vals[-1]:.3e} below -{tol:g}")
    roots = np.sqrt(np.clip(vals, 0.0, None))
    s = (vecs * roots) @ vecs.conj().T
    return 0.5 * (s + s.conj().T)


def singular_values(m) -> np.ndarray:
    """Singular values, non-increasing."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def largest_eigenvalue(m, tol: float = DEFAULT_TOL) -> float:
    return float(eig_hermitian(m, tol)[0][0])


def top_eigenvector(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    return eig_hermitian(m, tol)[1][:, 0]
