"""Bures-Uhlmann fidelity of rotated qubit elements in the Bloch picture.

For an element ``U A`` with ``A = diag(sqrt(1+x), sqrt(1-x))`` the integrand
``sqrt(<A^dag A>) |<U A>|`` can be written through the Bloch vector ``r`` of
the input, the rotation ``O`` induced by ``U``, the matrix
``Abl = diag(sqrt(1-x^2), sqrt(1-x^2), 1)`` and ``a = (0, 0, x)``. Averaging
over the azimuth and bounding with Cauchy-Schwarz leaves a one-dimensional
integral in ``t = cos(theta)`` that depends on the rotation only through two
angles; this module evaluates all of these forms and scans the tilt angle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeRadicand, OutOfRange
from .states import PAULI
from .tradeoff import b_closed

BETA_POINTS = 181
RADICAND_SLACK = 1e-12


@dataclass(frozen=True)
class BlochChannelParams:
    x: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0):
            raise OutOfRange(f"x={self.x} outside [0, 1]")

    @property
    def A(self) -> np.ndarray:
        c = np.sqrt(1.0 - self.x**2)
        return np.diag([c, c, 1.0])

    @property
    def a(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.x])

    @property
    def rotation(self) -> np.ndarray:
        return rot_z(self.alpha) @ rot_x(self.beta)

    @property
    def unitary(self) -> np.ndarray:
        return unitary_z(self.alpha) @ unitary_x(self.beta)

    def kraus(self) -> np.ndarray:
        """``U A`` in Hilbert space."""
        return self.unitary @ np.diag([np.sqrt(1 + self.x), np.sqrt(1 - self.x)])


def rot_x(beta: float) -> np.ndarray:
    c, s = np.cos(beta), np.sin(beta)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def rot_z(alpha: float) -> np.ndarray:
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def unitary_x(beta: float) -> np.ndarray:
    """``exp(-i beta sigma_x / 2)``, rotating Bloch vectors by ``beta`` about x."""
    return np.cos(beta / 2) * np.eye(2) - 1j * np.sin(beta / 2) * PAULI[0]


def unitary_z(alpha: float) -> np.ndarray:
    return np.cos(alpha / 2) * np.eye(2) - 1j * np.sin(alpha / 2) * PAULI[2]


def rotation_from_unitary(u) -> np.ndarray:
    """``O_ij = Tr(sigma_i U sigma_j U^dag) / 2``."""
    u = np.asarray(u, dtype=complex)
    return np.real(np.einsum("iab,bc,jcd,ad->ij", PAULI, u, PAULI, u.conj()) / 2)


def bu_integrand(params: BlochChannelParams, r, rotation=None) -> np.ndarray:
    """``sqrt((1 + a.r)^2 + (1 + a.r) r.O(Abl r + a)) / sqrt(2)`` for unit ``r``.

    ``r`` may be a single vector or an ``(n, 3)`` array. Radicands down to
    ``-1e-12`` are rounding noise and clamp to zero.
    """
    r = np.asarray(r, dtype=float)
    o = params.rotation if rotation is None else np.asarray(rotation, dtype=float)
    ar = r @ params.a
    image = r @ params.A.T + params.a
    rad = (1 + ar) ** 2 + (1 + ar) * np.einsum("...i,ij,...j->...", r, o, image)
    if np.any(rad < -RADICAND_SLACK):
        raise NegativeRadicand(f"radicand {np.min(rad):.3e} is negative")
    out = np.sqrt(np.maximum(rad, 0.0) / 2)
    return float(out) if out.ndim == 0 else out


def hilbert_integrand(params: BlochChannelParams, psi, unitary=None) -> np.ndarray:
    """The same integrand evaluated directly on state vectors."""
    psi = np.atleast_2d(np.asarray(psi, dtype=complex))
    a = np.diag([np.sqrt(1 + params.x), np.sqrt(1 - params.x)])
    ua = (params.unitary if unitary is None else np.asarray(unitary)) @ a
    norm2 = np.einsum("ni,ij,nj->n", psi.conj(), a.conj().T @ a, psi).real
    amp = np.einsum("ni,ij,nj->n", psi.conj(), ua, psi)
    out = np.sqrt(np.maximum(norm2, 0.0)) * np.abs(amp)
    return out if out.size > 1 else float(out[0])


def v_matrix(x: float, theta: float) -> np.ndarray:
    s2 = np.sin(theta) ** 2
    return np.diag([0.5 * s2, 0.5 * s2, x * np.cos(theta) + np.cos(theta) ** 2])


def v_matrix_average(x: float, theta: float, n_phi: int = 64) -> np.ndarray:
    """Azimuthal average of ``(r + a) r^T``; the trapezoid rule is exact here."""
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    r = np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.full_like(phi, np.cos(theta))],
        axis=1,
    )
    a = np.array([0.0, 0.0, x])
    return np.einsum("ni,nj->ij", r + a, r) / n_phi


def trace_term(x: float, theta: float, alpha: float, beta: float) -> float:
    """Closed form of ``Tr(O Abl V)`` for ``O = R_z(alpha) R_x(beta)``."""
    s2, c = np.sin(theta) ** 2, np.cos(theta)
    return float(
        0.5 * np.sqrt(1 - x * x) * s2 * np.cos(alpha) * (1 + np.cos(beta)) + (c * c + x * c) * np.cos(beta)
    )


def trace_term_matrix(x: float, theta: float, alpha: float, beta: float) -> float:
    p = BlochChannelParams(x, alpha, beta)
    return float(np.trace(p.rotation @ p.A @ v_matrix(x, theta)))


def azimuthal_average(params: BlochChannelParams, theta: float, n_phi: int = 256) -> float:
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    r = np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.full_like(phi, np.cos(theta))],
        axis=1,
    )
    return float(np.mean(bu_integrand(params, r)))


def azimuthal_bound(params: BlochChannelParams, theta: float) -> float:
    """Cauchy-Schwarz upper bound on :func:`azimuthal_average`."""
    ar = params.x * np.cos(theta)
    tr = float(np.trace(params.rotation @ params.A @ v_matrix(params.x, theta)))
    return float(np.sqrt(max((1 + ar) ** 2 + (1 + ar) * tr, 0.0) / 2))


def _theta_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    z, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * np.pi * (z + 1.0), 0.5 * np.pi * w


_THETA128 = _theta_rule(128)


def bures_beta_integral(x: float, beta: float, n_nodes: int = 128) -> float:
    """``1/4 int_{-1}^{1} dt sqrt(2(1+xt)^2 + (1+xt)[...])`` with ``alpha = 0``.

    The radicand vanishes like ``1 - t^2`` at the ends when ``beta -> pi``,
    which caps Gauss-Legendre in ``t`` near ``1e-7``. Nodes are placed in
    ``theta`` with ``t = cos(theta)`` instead, where the integrand is smooth.
    """
    if not (0.0 <= x <= 1.0):
        raise OutOfRange(f"x={x} outside [0, 1]")
    theta, w = _THETA128 if n_nodes == 128 else _theta_rule(n_nodes)
    t = np.cos(theta)
    cb = np.cos(beta)
    u = 1 + x * t
    inner = np.sqrt(1 - x * x) * (1 - t * t) * (1 + cb) + 2 * (t * t + x * t) * cb
    rad = 2 * u * u + u * inner
    return float(0.25 * np.dot(w, np.sin(theta) * np.sqrt(np.maximum(rad, 0.0))))


def _golden_max(fn, a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    inv = (np.sqrt(5) - 1) / 2
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
    xm = 0.5 * (a + b)
    return xm, fn(xm)


@dataclass
class BetaScanReport:
    x: list
    value_at_zero: list
    best_beta: list
    worst_margin: float
    passed: bool
    details: list = field(default_factory=list)


def verify_beta_maximum(x_grid, beta_grid=None, *, tol: float = 1e-10) -> BetaScanReport:
    """Scan the tilt angle and confirm the integral peaks at ``beta = 0``.

    For each ``x`` the coarse argmax over ``beta_grid`` is refined by golden
    section on its neighbouring cell. The margin is
    ``I(x, 0) - max_beta I(x, beta)``; it must stay above ``-tol``.
    """
    if beta_grid is None:
        beta_grid = np.linspace(0.0, np.pi, BETA_POINTS)
    beta_grid = np.asarray(beta_grid, dtype=float)
    if len(x_grid) == 0 or beta_grid.size == 0:
        raise ValueError("grids must be non-empty")
    if beta_grid.min() > 0 or beta_grid.max() < np.pi:
        raise ValueError("beta grid must span [0, pi]")
    margins, at_zero, best = [], [], []
    for x in x_grid:
        vals = np.array([bures_beta_integral(x, b) for b in beta_grid])
        k = int(np.argmax(vals))
        lo = beta_grid[max(k - 1, 0)]
        hi = beta_grid[min(k + 1, beta_grid.size - 1)]
        b_star, v_star = _golden_max(lambda b: bures_beta_integral(x, b), lo, hi)
        if vals[k] > v_star:
            b_star, v_star = float(beta_grid[k]), float(vals[k])
        v0 = bures_beta_integral(x, 0.0)
        margins.append(v0 - v_star)
        at_zero.append(v0)
        best.append(b_star)
    worst = float(min(margins))
    return BetaScanReport(list(map(float, x_grid)), at_zero, best, worst, worst >= -tol)


def beta_zero_matches_closed_form(x_grid) -> float:
    """Largest ``|I(x, 0) - b(x)|`` over ``x_grid``."""
    return float(max(abs(bures_beta_integral(x, 0.0) - b_closed(x)) for x in x_grid))


def alpha_optimality_margin(x: float, theta: float, alpha: float, beta: float) -> float:
    """``Tr(O A V)`` at ``alpha = 0`` minus its value at ``alpha``; never negative."""
    return trace_term(x, theta, 0.0, beta) - trace_term(x, theta, alpha, beta)


def pair_operation(x: float, beta: float = 0.0):
    """Two-element operation ``U(beta) A(+-x) / sqrt(2)`` with ``U = exp(-i beta sigma_x / 2)``.

    Its Bures fidelity equals :func:`bures_beta_integral` at ``beta = 0``
    and is bounded above by it otherwise.
    """
    from .channels import kraus_from_matrices

    if not (0.0 <= x <= 1.0):
        raise OutOfRange(f"x={x} outside [0, 1]")
    u = unitary_x(beta)
    up = np.diag([np.sqrt(1 + x), np.sqrt(1 - x)]) / np.sqrt(2)
    down = np.diag([np.sqrt(1 - x), np.sqrt(1 + x)]) / np.sqrt(2)
    return kraus_from_matrices([u @ up, u @ down])


def beta_scan_table(x_grid, beta_grid=None) -> list[tuple[float, float, float]]:
    """Rows ``(x, beta, integral)`` for CSV export."""
    if beta_grid is None:
        beta_grid = np.linspace(0.0, np.pi, BETA_POINTS)
    return [(float(x), float(b), bures_beta_integral(x, b)) for x in x_grid for b in beta_grid]
