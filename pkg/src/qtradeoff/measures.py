"""Information-gain and disturbance functionals.

Four measures are provided, each as a sum of per-element components:

* Shannon gain ``H = sum_r Hc(M_r)`` (bits),
* operation fidelity ``F = sum Fc(A^dag A)`` (closed form for any ``d``),
* estimation fidelity ``G = sum_r Gc(M_r)``,
* Bures-Uhlmann fidelity ``B``.

All averages are over the uniform (Haar) prior on pure states. Each
measure can be evaluated by several independent routes, recorded in
:attr:`MeasureValue.method`:

``closed_form``
    Closed expressions. For qubits the Shannon and Bures components reduce
    to the one-parameter functions in :mod:`qtradeoff.tradeoff`.
``quadrature``
    Product Gauss-Legendre/trapezoid grid on the Bloch sphere for ``d == 2``;
    for ``d == 3`` an exact one-dimensional reduction over the spectrum
    (see :func:`spectral_average`).
``monte_carlo``
    Haar sampling with a standard error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import qmat
from .channels import KrausOperation, Povm, random_psd, random_unitary
from .errors import NegativeInput, NotPsd, WrongDim
from .states import DEFAULT_CHUNK, QubitGrid, haar_mc, qubit_quadrature_grid

LOG_FLOOR = 1e-300
DEFAULT_MC_SAMPLES = 10**6


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class MeasureValue:
    value: float
    method: Method
    mc_std_error: float = 0.0

    def __float__(self) -> float:
        return self.value


def _psd_eigs(m) -> np.ndarray:
    vals = qmat.eigvalsh(m)
    if vals[-1] < -qmat.DEFAULT_TOL * max(1.0, abs(vals[0])):
        raise NotPsd(f"smallest eigenvalue {vals[-1]:.3e} is negative")
    return np.clip(vals, 0.0, None)


def _xlog2(p: np.ndarray, mean: float) -> np.ndarray:
    p = np.maximum(p, 0.0)
    return p * np.log2(np.maximum(p, LOG_FLOOR) / mean)


def _qubit_params(vals: np.ndarray) -> tuple[float, float]:
    """Half-trace weight and eigenvalue imbalance of a 2x2 PSD spectrum."""
    tr = float(vals[0] + vals[1])
    if tr <= 0.0:
        return 0.0, 0.0
    return 0.5 * tr, min(float((vals[0] - vals[1]) / tr), 1.0)


# -- spectral reduction ---------------------------------------------------------------

_GL20 = np.polynomial.legendre.leggauss(20)


def _graded_nodes(lo: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    """GL nodes/weights on ``u in [0, 1]`` graded toward ``u = 0``.

    ``lo`` is the distance of the integrable singularity from ``u = 0``
    measured in units of ``width``; subintervals double in length from there.
    """
    edges = [0.0]
    if width > 0 and lo < 0.5 * width:
        step = max(lo / width, 1e-16)
        while step < 0.5:
            edges.append(step)
            step *= 2.0
    edges.append(1.0)
    t, w = _GL20
    us, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        us.append(0.5 * (b - a) * t + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(us), np.concatenate(ws)


def spectral_average(vals, g: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
    """Haar average of ``g(s, q)`` for a ``d = 3`` operator with spectrum ``vals``.

    With ``p_i = |<i|psi>|^2`` uniform on the simplex, ``s = sum l_i p_i`` has a
    piecewise-linear density with knots at the eigenvalues and, conditioned on
    ``s``, ``p`` is uniform on a segment. ``q`` is the conditional mean of
    ``p`` (one column per eigenvalue, ascending order), so any integrand that
    is affine in ``p`` for fixed ``s`` reduces to a one-dimensional integral.
    """
    l1, l2, l3 = np.sort(np.asarray(vals, dtype=float))
    span = l3 - l1
    if span <= 1e-15 * max(l3, 1e-300):
        s = np.array([(l1 + l2 + l3) / 3])
        return float(g(s, np.full((1, 3), 1 / 3))[0])
    total = 0.0
    # lower piece s in [l1, l2]; endpoints on edges (1,2) and (1,3)
    if l2 > l1:
        u, w = _graded_nodes(l1, l2 - l1)
        s = l1 + (l2 - l1) * u
        dens = 2.0 * u * (l2 - l1) / span
        b = (l3 - s) / span
        q = 0.5 * np.stack([(1 - u) + b, u, 1 - b], axis=1)
        total += float(np.dot(w * dens, g(s, q)))
    if l3 > l2:
        u, w = _graded_nodes(l2, l3 - l2)
        s = l2 + (l3 - l2) * u
        dens = 2.0 * (1 - u) * (l3 - l2) / span
        b = (l3 - s) / span
        q = 0.5 * np.stack([b, 1 - u, (1 - b) + u], axis=1)
        total += float(np.dot(w * dens, g(s, q)))
    return total


def _shannon_spectral(vals) -> float:
    mean = float(np.sum(vals)) / 3
    if mean <= 0:
        return 0.0
    return spectral_average(vals, lambda s, q: _xlog2(s, mean))


def _bures_spectral(vals) -> float:
    roots = np.sqrt(np.sort(np.asarray(vals, dtype=float)))
    return spectral_average(vals, lambda s, q: np.sqrt(s) * (q @ roots))


# -- components -----------------------------------------------------------------------


def fidelity_component(m) -> float:
    """``(Tr M + (Tr sqrt M)^2) / (d (d + 1))`` for PSD ``M``."""
    return phi_fidelity(_psd_eigs(m))


def estimation_component(m) -> float:
    """``(Tr M + ||M||) / (d (d + 1))``, the operator norm being the top eigenvalue."""
    vals = _psd_eigs(m)
    d = vals.size
    return float((np.sum(vals) + vals[0]) / (d * (d + 1)))


def phi_fidelity(u) -> float:
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise NegativeInput("phi is defined on non-negative vectors")
    d = u.size
    return float((np.sum(u) + np.sum(np.sqrt(u)) ** 2) / (d * (d + 1)))


def _resolve(method) -> Method:
    return Method(method)


def shannon_component(
    m,
    method: str | Method = Method.QUADRATURE,
    *,
    grid: QubitGrid | None = None,
    seed: int = 0,
    n_samples: int = DEFAULT_MC_SAMPLES,
) -> float:
    """Shannon-gain contribution of one PSD element, in bits.

    ``quadrature`` integrates the raw matrix on the Bloch-sphere grid for a
    qubit and uses :func:`spectral_average` for ``d == 3``.
    """
    m = qmat.as_matrix(m)
    method = _resolve(method)
    d = m.shape[0]
    if method is Method.MONTE_CARLO:
        return _shannon_mc((m,), seed, n_samples).mean
    vals = _psd_eigs(m)
    if method is Method.CLOSED_FORM:
        if d != 2:
            raise WrongDim("closed-form Shannon component exists for qubits only")
        from .tradeoff import h_closed

        xi, x = _qubit_params(vals)
        return xi * h_closed(x) if xi > 0 else 0.0
    if d == 2:
        grid = grid or qubit_quadrature_grid()
        p = grid.expect(m).real
        mean = float(np.dot(grid.weights, p))
        if mean <= 0:
            return 0.0
        return float(np.dot(grid.weights, _xlog2(p, mean)))
    if d == 3:
        return _shannon_spectral(vals)
    raise WrongDim("deterministic Shannon component available for d <= 3; use monte_carlo")


def bures_component(
    m,
    method: str | Method = Method.QUADRATURE,
    *,
    grid: QubitGrid | None = None,
    seed: int = 0,
    n_samples: int = DEFAULT_MC_SAMPLES,
) -> float:
    """``int dpsi sqrt(<psi|M|psi>) <psi|sqrt(M)|psi>`` for PSD ``M``."""
    m = qmat.as_matrix(m)
    method = _resolve(method)
    d = m.shape[0]
    if method is Method.MONTE_CARLO:
        return _bures_mc((qmat.psd_sqrt(m),), seed, n_samples).mean
    vals = _psd_eigs(m)
    if method is Method.CLOSED_FORM:
        if d != 2:
            raise WrongDim("closed-form Bures component exists for qubits only")
        from .tradeoff import b_closed

        xi, x = _qubit_params(vals)
        return xi * b_closed(x) if xi > 0 else 0.0
    if d == 2:
        grid = grid or qubit_quadrature_grid()
        root = qmat.psd_sqrt(m)
        return grid.integrate(lambda expect: _bures_integrand(expect, root))
    if d == 3:
        return _bures_spectral(vals)
    raise WrongDim("deterministic Bures component available for d <= 3; use monte_carlo")


# -- integrands over batches of states -----------------------------------------------


def _bures_integrand(expect, a: np.ndarray) -> np.ndarray:
    norm2 = expect(a.conj().T @ a).real
    return np.sqrt(np.maximum(norm2, 0.0)) * np.abs(expect(a))


def _shannon_integrand(elements) -> Callable:
    d = elements[0].shape[0]
    means = [float(np.trace(m).real) / d for m in elements]

    def f(expect):
        out = 0.0
        for m, mean in zip(elements, means):
            if mean > 0:
                out = out + _xlog2(expect(m).real, mean)
        return out

    return f


def _fidelity_integrand(mats) -> Callable:
    stack = np.asarray(mats)

    def f(expect):
        return np.sum(np.abs(expect(stack)) ** 2, axis=-1)

    return f


def _estimation_integrand(elements) -> Callable:
    guesses = [qmat.top_eigenvector(m) for m in elements]
    projectors = [np.outer(v, v.conj()) for v in guesses]

    def f(expect):
        return sum(expect(m).real * expect(p).real for m, p in zip(elements, projectors))

    return f


def _bures_sum_integrand(mats) -> Callable:
    stack = np.asarray(mats)
    norms = np.conj(np.swapaxes(stack, -1, -2)) @ stack

    def f(expect):
        norm2 = expect(norms).real
        return np.sum(np.sqrt(np.maximum(norm2, 0.0)) * np.abs(expect(stack)), axis=-1)

    return f


def _mc(integrand, dim, seed, n, chunk_size=DEFAULT_CHUNK, workers=1):
    return haar_mc(integrand, dim, n, seed, chunk_size=chunk_size, workers=workers)


def _shannon_mc(elements, seed, n, **kw):
    return _mc(_shannon_integrand(elements), elements[0].shape[0], seed, n, **kw)


def _bures_mc(mats, seed, n, **kw):
    return _mc(_bures_sum_integrand(mats), mats[0].shape[0], seed, n, **kw)


# -- measures -------------------------------------------------------------------------


def shannon_gain(
    povm: Povm,
    method: str | Method = Method.QUADRATURE,
    *,
    grid: QubitGrid | None = None,
    seed: int = 0,
    n_samples: int = DEFAULT_MC_SAMPLES,
    workers: int = 1,
) -> MeasureValue:
    """Average Shannon information gain of a POVM, in bits."""
    method = _resolve(method)
    if method is Method.MONTE_CARLO:
        est = _shannon_mc(povm.elements, seed, n_samples, workers=workers)
        return MeasureValue(est.mean, method, est.std_error)
    total = sum(shannon_component(m, method, grid=grid) for m in povm.elements)
    return MeasureValue(float(max(total, 0.0)), method)


def operation_fidelity_closed(op: KrausOperation) -> MeasureValue:
    """``sum (Tr A^dag A + |Tr A|^2) / (d (d + 1))``."""
    d = op.dim
    total = 0.0
    for a in op.matrices():
        total += float(np.real(np.trace(a.conj().T @ a))) + abs(np.trace(a)) ** 2
    return MeasureValue(total / (d * (d + 1)), Method.CLOSED_FORM)


def operation_fidelity_mc(
    op: KrausOperation, seed: int = 0, n: int = DEFAULT_MC_SAMPLES, *, workers: int = 1
) -> MeasureValue:
    est = _mc(_fidelity_integrand(op.matrices()), op.dim, seed, n, workers=workers)
    return MeasureValue(est.mean, Method.MONTE_CARLO, est.std_error)


def operation_fidelity(
    op: KrausOperation,
    method: str | Method = Method.CLOSED_FORM,
    *,
    grid: QubitGrid | None = None,
    seed: int = 0,
    n_samples: int = DEFAULT_MC_SAMPLES,
    workers: int = 1,
) -> MeasureValue:
    method = _resolve(method)
    if method is Method.CLOSED_FORM:
        return operation_fidelity_closed(op)
    if method is Method.MONTE_CARLO:
        return operation_fidelity_mc(op, seed, n_samples, workers=workers)
    if op.dim != 2:
        raise WrongDim("grid quadrature is qubit-only")
    grid = grid or qubit_quadrature_grid()
    return MeasureValue(grid.integrate(_fidelity_integrand(op.matrices())), method)


def estimation_fidelity(
    povm: Povm,
    method: str | Method = Method.CLOSED_FORM,
    *,
    grid: QubitGrid | None = None,
    seed: int = 0,
    n_samples: int = DEFAULT_MC_SAMPLES,
    workers: int = 1,
) -> MeasureValue:
    """Mean fidelity of the best guess (top eigenvector of ``M_r``) with the input."""
    method = _resolve(method)
    if method is Method.CLOSED_FORM:
        return MeasureValue(sum(estimation_component(m) for m in povm.elements), method)
    integrand = _estimation_integrand(povm.elements)
    if method is Method.MONTE_CARLO:
        est = _mc(integrand, povm.dim, seed, n_samples, workers=workers)
        return MeasureValue(est.mean, method, est.std_error)
    if povm.dim != 2:
        raise WrongDim("grid quadrature is qubit-only")
    return MeasureValue((grid or qubit_quadrature_grid()).integrate(integrand), method)


def bures_fidelity(
    op: KrausOperation,
    method: str | Method = Method.QUADRATURE,
    *,
    grid: QubitGrid | None = None,
    seed: int = 0,
    n_samples: int = DEFAULT_MC_SAMPLES,
    workers: int = 1,
) -> MeasureValue:
    """Average Bures-Uhlmann fidelity.

    ``quadrature`` and ``monte_carlo`` integrate the defining expression for
    arbitrary Kraus elements. ``closed_form`` is only valid for Hermitian PSD
    elements, where it sums the per-element closed forms.
    """
    method = _resolve(method)
    mats = op.matrices()
    if method is Method.MONTE_CARLO:
        est = _bures_mc(mats, seed, n_samples, workers=workers)
        return MeasureValue(est.mean, method, est.std_error)
    if method is Method.CLOSED_FORM:
        if not all(qmat.is_psd(a) for a in mats):
            raise NotPsd("closed-form Bures fidelity needs Hermitian PSD Kraus elements")
        return MeasureValue(sum(bures_component(a.conj().T @ a, method) for a in mats), method)
    if op.dim == 2:
        grid = grid or qubit_quadrature_grid()
        return MeasureValue(grid.integrate(_bures_sum_integrand(mats)), method)
    if op.dim == 3 and all(qmat.is_psd(a) for a in mats):
        return MeasureValue(sum(_bures_spectral(_psd_eigs(a @ a)) for a in mats), method)
    raise WrongDim("deterministic Bures fidelity is qubit-only for general elements")


# -- convexity probe ------------------------------------------------------------------

COMPONENTS = ("H", "F", "G", "B")
# +1: sub-additive under merging (concave), -1: super-additive (convex)
_DIRECTION = {"H": -1, "G": -1, "F": +1, "B": +1}


def spectral_component(name: str, vals) -> float:
    """Component value from the spectrum of ``M`` (closed forms, ``d <= 3``)."""
    vals = np.clip(np.sort(np.asarray(vals, dtype=float))[::-1], 0.0, None)
    d = vals.size
    if name == "F":
        return phi_fidelity(vals)
    if name == "G":
        return float((np.sum(vals) + vals[0]) / (d * (d + 1)))
    if d == 2:
        from .tradeoff import b_closed, h_closed

        xi, x = _qubit_params(vals)
        if xi == 0:
            return 0.0
        return xi * (h_closed(x) if name == "H" else b_closed(x))
    if d == 3:
        return _shannon_spectral(vals) if name == "H" else _bures_spectral(vals)
    raise WrongDim("spectral components implemented for d <= 3")


def component_value(name: str, m, method: str | Method = Method.QUADRATURE, **kw) -> float:
    if name == "H":
        return shannon_component(m, method, **kw)
    if name == "B":
        return bures_component(m, method, **kw)
    if name == "F":
        return fidelity_component(m)
    if name == "G":
        return estimation_component(m)
    raise ValueError(f"unknown component {name!r}")


@dataclass
class ProbeReport:
    component: str
    mode: str
    trials: int
    worst_margin: float
    threshold: float
    passed: bool
    dims: tuple = (2, 3)
    margins: list = field(default_factory=list, repr=False)


def merge_margin(name: str, v1: float, v2: float, v12: float) -> float:
    """Signed slack of the merging inequality; non-negative when it holds."""
    if _DIRECTION[name] > 0:
        return v12 - v1 - v2
    return v1 + v2 - v12


def random_pair(mode: str, dim: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    if mode == "commuting":
        u = random_unitary(dim, rng)
        l1 = np.sort(np.linalg.eigvalsh(random_psd(dim, rng)))[::-1]
        l2 = rng.permutation(np.sort(np.linalg.eigvalsh(random_psd(dim, rng))))
        return (u * l1) @ u.conj().T, (u * l2) @ u.conj().T
    if mode == "general":
        return random_psd(dim, rng), random_psd(dim, rng)
    raise ValueError(f"unknown mode {mode!r}")


def convexity_probe(
    component: str,
    mode: str,
    trials: int,
    rng: np.random.Generator,
    *,
    dims: tuple = (2, 3),
    threshold: float | None = None,
) -> ProbeReport:
    """Check the merging inequality on random PSD pairs.

    ``H`` and ``G`` must lose value when two elements are merged, ``F`` and
    ``B`` must gain. Components are evaluated from the spectrum with closed
    forms (qubits) or the exact spectral reduction (``d = 3``).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if threshold is None:
        threshold = -1e-12 if mode == "commuting" else -1e-9
    margins = []
    for k in range(trials):
        d = dims[k % len(dims)]
        m1, m2 = random_pair(mode, d, rng)
        e1, e2, e12 = (qmat.eigvalsh(m) for m in (m1, m2, m1 + m2))
        v1, v2, v12 = (spectral_component(component, e) for e in (e1, e2, e12))
        margins.append(merge_margin(component, v1, v2, v12))
    worst = float(min(margins))
    return ProbeReport(component, mode, trials, worst, threshold, worst >= threshold, tuple(dims), margins)
