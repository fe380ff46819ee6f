"""POVMs, Kraus operations and the maps between them."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import qmat
from .errors import CompletenessViolated, InvalidState, NotPsd, OutOfRange, ZeroProbabilityOutcome

COMPLETENESS_TOL = 1e-10
ZERO_PROBABILITY = 1e-14


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def completeness_residual(products: Iterable[np.ndarray], dim: int) -> float:
    total = np.zeros((dim, dim), dtype=complex)
    for p in products:
        total = total + p
    return float(np.max(np.abs(total - np.eye(dim))))


@dataclass(frozen=True)
class Povm:
    """Finite POVM ``{M_r}``; the outcome label is the list index."""

    elements: tuple
    tol: float = COMPLETENESS_TOL

    def __post_init__(self):
        els = tuple(_frozen(qmat.as_matrix(m)) for m in self.elements)
        if not els:
            raise ValueError("a POVM needs at least one element")
        dim = els[0].shape[0]
        if any(m.shape != (dim, dim) for m in els):
            raise ValueError("POVM elements must share one dimension")
        for r, m in enumerate(els):
            if not qmat.is_psd(m, self.tol):
                raise NotPsd(f"POVM element {r} is not PSD")
        res = completeness_residual(els, dim)
        if res > self.tol:
            raise CompletenessViolated(f"sum of POVM elements deviates from identity by {res:.3e}")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class KrausElement:
    r: int
    mu: int
    a: np.ndarray


@dataclass(frozen=True)
class KrausOperation:
    """Trace-preserving operation ``{A_{r mu}}`` with outcome and refinement labels."""

    elements: tuple
    tol: float = COMPLETENESS_TOL

    def __post_init__(self):
        els = []
        for e in self.elements:
            if isinstance(e, KrausElement):
                r, mu, a = e.r, e.mu, e.a
            else:
                r, mu, a = e
            els.append(KrausElement(int(r), int(mu), _frozen(qmat.as_matrix(a))))
        if not els:
            raise ValueError("an operation needs at least one element")
        dim = els[0].a.shape[0]
        if any(e.a.shape != (dim, dim) for e in els):
            raise ValueError("Kraus elements must share one dimension")
        res = completeness_residual((e.a.conj().T @ e.a for e in els), dim)
        if res > self.tol:
            raise CompletenessViolated(f"sum of A^dag A deviates from identity by {res:.3e}")
        object.__setattr__(self, "elements", tuple(els))

    @property
    def dim(self) -> int:
        return self.elements[0].a.shape[0]

    @property
    def outcomes(self) -> list[int]:
        return sorted({e.r for e in self.elements})

    def matrices(self) -> list[np.ndarray]:
        return [e.a for e in self.elements]

    def __len__(self) -> int:
        return len(self.elements)


def identity_operation(dim: int = 2) -> KrausOperation:
    return KrausOperation(((0, 0, np.eye(dim)),))


def kraus_from_matrices(mats: Sequence, refinements: Sequence[int] | None = None) -> KrausOperation:
    """Each matrix becomes its own outcome unless ``refinements`` groups them."""
    if refinements is None:
        return KrausOperation(tuple((r, 0, a) for r, a in enumerate(mats)))
    out, k = [], 0
    for r, count in enumerate(refinements):
        for mu in range(count):
            out.append((r, mu, mats[k]))
            k += 1
    return KrausOperation(tuple(out))


def induced_povm(op: KrausOperation) -> Povm:
    """``M_r = sum_mu A_{r mu}^dag A_{r mu}``, one element per outcome label."""
    dim = op.dim
    sums: dict[int, np.ndarray] = {}
    for e in op.elements:
        sums[e.r] = sums.get(e.r, np.zeros((dim, dim), dtype=complex)) + e.a.conj().T @ e.a
    els = [0.5 * (m + m.conj().T) for _, m in sorted(sums.items())]
    return Povm(tuple(els), tol=max(op.tol, COMPLETENESS_TOL))


def refined_povm(op: KrausOperation) -> Povm:
    """The finer measurement that keeps both ``r`` and ``mu``."""
    els = [0.5 * (e.a.conj().T @ e.a + (e.a.conj().T @ e.a).conj().T) for e in op.elements]
    return Povm(tuple(els), tol=max(op.tol, COMPLETENESS_TOL))


def _check_density(rho) -> np.ndarray:
    rho = qmat.as_matrix(rho)
    if not qmat.is_psd(rho, COMPLETENESS_TOL) or abs(np.trace(rho).real - 1.0) > COMPLETENESS_TOL:
        raise InvalidState("rho must be a density matrix (PSD, unit trace)")
    return rho


def outcome_probability(povm: Povm, r: int, rho) -> float:
    rho = _check_density(rho)
    p = float(np.real(np.trace(povm.elements[r] @ rho)))
    return min(max(p, 0.0), 1.0)


def conditional_state(op: KrausOperation, r: int, rho) -> np.ndarray:
    """Post-measurement state for outcome ``r``, renormalized."""
    rho = _check_density(rho)
    out = np.zeros_like(rho)
    for e in op.elements:
        if e.r == r:
            out = out + e.a @ rho @ e.a.conj().T
    p = float(np.real(np.trace(out)))
    if p <= ZERO_PROBABILITY:
        raise ZeroProbabilityOutcome(f"outcome {r} has probability {p:.3e}")
    out = out / p
    return 0.5 * (out + out.conj().T)


def efficient_from_povm(povm: Povm) -> KrausOperation:
    return KrausOperation(tuple((r, 0, qmat.psd_sqrt(m)) for r, m in enumerate(povm.elements)))


def hermitianize(op: KrausOperation) -> KrausOperation:
    """Replace each ``A`` by ``sqrt(A^dag A)``; the induced POVM is unchanged."""
    return KrausOperation(
        tuple((e.r, e.mu, qmat.psd_sqrt(e.a.conj().T @ e.a)) for e in op.elements), tol=op.tol
    )


# -- random generators ----------------------------------------------------------------


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the phase-fixed QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_psd(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = rng.standard_normal((dim, rank or dim)) + 1j * rng.standard_normal((dim, rank or dim))
    m = g @ g.conj().T
    return 0.5 * (m + m.conj().T)


def _inv_sqrt(s: np.ndarray) -> np.ndarray:
    vals, vecs = qmat.eig_hermitian(s)
    return (vecs / np.sqrt(vals)) @ vecs.conj().T


def random_povm(dim: int, n_outcomes: int, rng: np.random.Generator) -> Povm:
    """``M_r = S^{-1/2} G_r S^{-1/2}`` with random PSD ``G_r`` and ``S = sum G_r``."""
    gs = [random_psd(dim, rng) for _ in range(n_outcomes)]
    k = _inv_sqrt(sum(gs))
    els = [k @ g @ k for g in gs]
    return Povm(tuple(0.5 * (m + m.conj().T) for m in els))


def random_operation(
    povm: Povm, refinements_per_outcome: int, rng: np.random.Generator
) -> KrausOperation:
    """Random operation inducing ``povm``: ``A_{r mu} = U_{r mu} sqrt(q_{r mu}) sqrt(M_r)``."""
    if refinements_per_outcome < 1:
        raise ValueError("refinements_per_outcome must be >= 1")
    out = []
    for r, m in enumerate(povm.elements):
        root = qmat.psd_sqrt(m)
        q = rng.dirichlet(np.ones(refinements_per_outcome))
        for mu in range(refinements_per_outcome):
            u = random_unitary(povm.dim, rng)
            out.append((r, mu, np.sqrt(q[mu]) * u @ root))
    return KrausOperation(tuple(out), tol=1e-9)


def random_kraus(dim: int, n_elements: int, rng: np.random.Generator) -> KrausOperation:
    """Arbitrary random operation (generic non-Hermitian elements)."""
    gs = [rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)) for _ in range(n_elements)]
    k = _inv_sqrt(sum(g.conj().T @ g for g in gs))
    return kraus_from_matrices([g @ k for g in gs])


# -- saturating families --------------------------------------------------------------


def _check_unit(name: str, v: float) -> float:
    if not (0.0 <= v <= 1.0):
        raise OutOfRange(f"{name}={v} outside [0, 1]")
    return float(v)


def saturating_pair(x: float) -> tuple[np.ndarray, np.ndarray]:
    x = _check_unit("x", x)
    hi, lo = np.sqrt((1 + x) / 2), np.sqrt((1 - x) / 2)
    return np.diag([hi, lo]).astype(complex), np.diag([lo, hi]).astype(complex)


def saturating_operation(x: float) -> KrausOperation:
    a1, a2 = saturating_pair(x)
    return KrausOperation(((0, 0, a1), (1, 0, a2)))


def mixed_saturating_operation(t: float, x1: float, x2: float) -> KrausOperation:
    """Four-outcome mixture ``sqrt(t) A(x1) + sqrt(1-t) A(x2)`` of two saturating pairs."""
    t = _check_unit("t", t)
    a1, a2 = saturating_pair(x1)
    b1, b2 = saturating_pair(x2)
    st, su = np.sqrt(t), np.sqrt(1 - t)
    return KrausOperation(((0, 0, st * a1), (1, 0, st * a2), (2, 0, su * b1), (3, 0, su * b2)))


def povm_from_weights(xis: Sequence[float], xs: Sequence[float], axes: Sequence) -> Povm:
    """Qubit POVM with elements ``xi_r (1 + x_r n_r . sigma)``."""
    from .states import PAULI

    els = []
    for xi, x, n in zip(xis, xs, axes):
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        els.append(xi * (np.eye(2) + x * np.einsum("k,kij->ij", n, PAULI)))
    return Povm(tuple(els))


# -- JSON scenario files --------------------------------------------------------------


def _matrix_json(a: np.ndarray) -> dict:
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def to_json(obj: KrausOperation | Povm) -> str:
    if isinstance(obj, KrausOperation):
        els = [{"r": e.r, "mu": e.mu, **_matrix_json(e.a)} for e in obj.elements]
        kind = "kraus"
    else:
        els = [{"r": r, "mu": 0, **_matrix_json(m)} for r, m in enumerate(obj.elements)]
        kind = "povm"
    return json.dumps({"dim": obj.dim, "kind": kind, "elements": els})


class SchemaError(ValueError):
    """Scenario document does not follow the serialization schema."""


def from_json(text: str, tol: float = 1e-8) -> KrausOperation | Povm:
    """Parse a scenario document.

    Raises :class:`SchemaError` for malformed documents and the usual
    :mod:`qtradeoff.errors` types when the content violates an invariant.
    """
    try:
        doc = json.loads(text)
        dim = int(doc["dim"])
        kind = doc.get("kind", "kraus")
        els = []
        for e in doc["elements"]:
            re = np.asarray(e["re"], dtype=float)
            im = np.asarray(e.get("im", np.zeros_like(re)), dtype=float)
            if re.shape != (dim, dim) or im.shape != (dim, dim):
                raise SchemaError(f"element matrix must be {dim}x{dim}")
            els.append((int(e["r"]), int(e.get("mu", 0)), re + 1j * im))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed scenario: {exc}") from exc
    if kind not in ("kraus", "povm") or not els:
        raise SchemaError(f"unknown kind {kind!r} or empty element list")
    if kind == "povm":
        return Povm(tuple(m for _, _, m in sorted(els, key=lambda e: e[0])), tol=tol)
    return KrausOperation(tuple(els), tol=tol)
