"""Pure states, Haar sampling, Bloch conversions and the qubit quadrature grid.

Monte Carlo helpers live here as well. Every random quantity is drawn from
per-chunk generators seeded by ``(seed, chunk_index)``, so a Monte Carlo
estimate depends only on ``(seed, n, chunk_size)`` and never on how many
workers evaluated the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import InvalidState, OutOfRange, WrongDim

DEFAULT_N_THETA = 64
DEFAULT_N_PHI = 64
DEFAULT_CHUNK = 1 << 16

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class PureState:
    """Unit-norm state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size < 1 or abs(np.vdot(amp, amp).real - 1.0) > 1e-12:
            raise InvalidState("amplitudes must have unit norm")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def expectation(self, m) -> complex:
        return complex(self.amplitudes.conj() @ np.asarray(m) @ self.amplitudes)


def normalize(v) -> PureState:
    v = np.asarray(v, dtype=complex)
    return PureState(v / np.linalg.norm(v))


def haar_states(dim: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random pure states as rows of an ``(n, dim)`` array."""
    if dim < 2:
        raise WrongDim("dimension must be at least 2")
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_sample(dim: int, rng: np.random.Generator) -> PureState:
    return PureState(haar_states(dim, 1, rng)[0])


def from_bloch_angles(theta: float, phi: float) -> PureState:
    if not (0.0 <= theta <= np.pi):
        raise OutOfRange(f"theta={theta} outside [0, pi]")
    if not (0.0 <= phi < 2 * np.pi):
        raise OutOfRange(f"phi={phi} outside [0, 2pi)")
    return PureState(np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]))


def bloch_vectors(psi: np.ndarray) -> np.ndarray:
    """Bloch vectors of qubit states given as rows of an ``(n, 2)`` array."""
    a, b = psi[..., 0], psi[..., 1]
    ab = np.conj(a) * b
    return np.stack([2 * ab.real, 2 * ab.imag, (np.abs(a) ** 2 - np.abs(b) ** 2)], axis=-1)


def to_bloch(state: PureState) -> np.ndarray:
    """Bloch vector ``r`` with ``|psi><psi| = (1 + r.sigma)/2``."""
    if state.dim != 2:
        raise WrongDim("Bloch vectors are defined for qubits only")
    return bloch_vectors(state.amplitudes)


def from_bloch_vector(r) -> PureState:
    r = np.asarray(r, dtype=float)
    theta = float(np.arccos(np.clip(r[2] / np.linalg.norm(r), -1.0, 1.0)))
    phi = float(np.arctan2(r[1], r[0]) % (2 * np.pi))
    return from_bloch_angles(theta, phi)


def bloch_angles(state: PureState) -> tuple[float, float]:
    r = to_bloch(state)
    theta = float(np.arccos(np.clip(r[2], -1.0, 1.0)))
    phi = float(np.arctan2(r[1], r[0]) % (2 * np.pi))
    return theta, phi


@dataclass(frozen=True)
class QubitGrid:
    """Product quadrature on the Bloch sphere for the normalized uniform measure.

    Gauss-Legendre in ``t = cos(theta)`` and the periodic trapezoid rule in
    ``phi``.  ``states`` holds one amplitude row per node.
    """

    states: np.ndarray
    weights: np.ndarray
    n_theta: int
    n_phi: int
    bloch: np.ndarray
    # complex rows (1, r) so one product yields all expectations
    nodes: np.ndarray

    def expect(self, m) -> np.ndarray:
        """``<psi|m|psi>`` at every node, via ``(Tr m + r . Tr(sigma m)) / 2``.

        A stack of ``K`` matrices gives an ``(n, K)`` array.
        """
        return self.nodes @ pauli_coefficients(m).T

    def __len__(self) -> int:
        return self.weights.size

    def __iter__(self) -> Iterator[tuple[PureState, float]]:
        for psi, w in zip(self.states, self.weights):
            yield PureState(psi), float(w)

    def integrate(self, integrand: Callable[[Callable], np.ndarray]) -> float:
        """Integrate ``integrand(expect)``, where ``expect(m)`` gives the nodal values."""
        return float(np.dot(self.weights, integrand(self.expect)))


_GRID_CACHE: dict[tuple[int, int], QubitGrid] = {}


def qubit_quadrature_grid(n_theta: int = DEFAULT_N_THETA, n_phi: int = DEFAULT_N_PHI) -> QubitGrid:
    if n_theta < 1 or n_phi < 1:
        raise ValueError("grid sizes must be positive")
    key = (n_theta, n_phi)
    if key not in _GRID_CACHE:
        t, wt = np.polynomial.legendre.leggauss(n_theta)
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        tt, pp = np.meshgrid(t, phi, indexing="ij")
        cos_half = np.sqrt((1 + tt) / 2)
        sin_half = np.sqrt((1 - tt) / 2)
        states = np.stack([cos_half + 0j, np.exp(1j * pp) * sin_half], axis=-1).reshape(-1, 2)
        weights = np.repeat(wt / 2, n_phi) / n_phi
        sin_t = np.sqrt(1 - tt * tt)
        bloch = np.stack([sin_t * np.cos(pp), sin_t * np.sin(pp), tt], axis=-1).reshape(-1, 3)
        nodes = np.hstack([np.ones((bloch.shape[0], 1)), bloch]).astype(complex)
        for a in (states, weights, bloch, nodes):
            a.setflags(write=False)
        _GRID_CACHE[key] = QubitGrid(states, weights, n_theta, n_phi, bloch, nodes)
    return _GRID_CACHE[key]


def expectations(psi: np.ndarray, m) -> np.ndarray:
    """``<psi|m|psi>`` for every row of ``psi``; complex in general.

    A stack of ``K`` matrices gives an ``(n, K)`` array.
    """
    return np.einsum("ni,...ij,nj->n...", psi.conj(), np.asarray(m), psi)


def pauli_coefficients(m) -> np.ndarray:
    """``(Tr m, Tr(sigma_x m), Tr(sigma_y m), Tr(sigma_z m)) / 2`` along the last axis."""
    m = np.asarray(m)
    tr = np.trace(m, axis1=-2, axis2=-1)[..., None]
    return 0.5 * np.concatenate([tr, np.einsum("kij,...ji->...k", PAULI, m)], axis=-1)


def qubit_expectations(bloch: np.ndarray, m) -> np.ndarray:
    """Same as :func:`expectations` for qubits, from Bloch vectors."""
    c = pauli_coefficients(m)
    return c[..., 0] + bloch @ c[..., 1:].T


# -- Monte Carlo over the Haar measure ------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(chunk)]))


def haar_mc(
    integrand: Callable[[np.ndarray], np.ndarray],
    dim: int,
    n: int,
    seed: int,
    *,
    chunk_size: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> McEstimate:
    """Monte Carlo average of ``integrand`` over Haar-random pure states.

    The integrand receives an ``expect`` callable mapping an operator to its
    expectation values on a chunk of sampled states, and returns one real
    value per state. Partial sums are combined in chunk order.
    """
    if n < 1:
        raise ValueError("n must be positive")
    sizes = [min(chunk_size, n - k) for k in range(0, n, chunk_size)]

    def run(k: int) -> tuple[float, float]:
        psi = haar_states(dim, sizes[k], chunk_rng(seed, k))
        vals = np.asarray(integrand(lambda m: expectations(psi, m)), dtype=float)
        return float(vals.sum()), float(np.dot(vals, vals))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(k) for k in range(len(sizes))]
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return McEstimate(mean, float(np.sqrt(var / n)), n)
