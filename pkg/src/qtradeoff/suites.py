"""Randomized verification suites behind ``qtradeoff verify``.

Every suite draws its randomness from generators seeded by
``(seed, check, block)``; blocks have a fixed size, so a report depends on
the seed and trial count but not on how many workers ran the blocks.
Reports are plain dicts ready for JSON.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bloch_bures as bb
from .channels import (
    efficient_from_povm,
    mixed_saturating_operation,
    random_kraus,
    random_operation,
    random_povm,
    random_psd,
    random_unitary,
    refined_povm,
    saturating_operation,
)
from .measures import (
    COMPONENTS,
    bures_fidelity,
    component_value,
    convexity_probe,
    operation_fidelity_closed,
    shannon_gain,
)
from .states import bloch_vectors, haar_states, qubit_quadrature_grid
from .tradeoff import (
    BOUND_TOL,
    DEFAULT_RESOLUTION,
    Pairing,
    ScalarCurve,
    check_all_bounds,
    chord_sup,
    composite_concavity_check,
    composite_curve,
    concave_envelope,
    equality_condition_check,
)

SUITES = ("bound", "convexity", "efficiency", "appendixA", "appendixB")
BLOCK = 250

_CHECK_IDS = {
    "bound": 1,
    "saturation": 2,
    "equality": 3,
    "convexity": 4,
    "homogeneity": 5,
    "unitary_invariance": 6,
    "efficiency": 7,
    "beta_scan": 8,
    "dual_integrand": 9,
    "alpha_optimality": 10,
    "azimuthal_bound": 11,
    "trace_term": 12,
}


@dataclass
class Check:
    """One named sub-check: passes when ``worst_margin >= -tol``."""

    name: str
    n: int
    worst_margin: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.worst_margin) and self.worst_margin >= -self.tol)

    def as_dict(self) -> dict:
        return {
            "check": self.name,
            "n": self.n,
            "worst_margin": float(self.worst_margin) + 0.0,
            "tol": float(self.tol),
            "pass": self.passed,
        }


def block_rng(seed: int, check: str, block: int, sub: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), _CHECK_IDS[check], int(block), int(sub)])
    return np.random.default_rng(ss)


def _blocks(n: int) -> list[tuple[int, int]]:
    return [(b, min(BLOCK, n - b * BLOCK)) for b in range((n + BLOCK - 1) // BLOCK)]


def _run_blocks(fn: Callable[[int, int], float], n: int, workers: int) -> float:
    """Minimum of ``fn(block, size)`` over all blocks, in block order."""
    blocks = _blocks(n)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda bs: fn(*bs), blocks))
    else:
        parts = [fn(b, s) for b, s in blocks]
    return float(min(parts))


def _tol(override: float | None, default: float) -> float:
    return default if override is None else float(override)


# -- bound -----------------------------------------------------------------------------


def _random_qubit_operation(rng: np.random.Generator):
    u = rng.uniform()
    if u < 0.125:
        # mixtures of saturating pairs land on envelope chords
        t, x1, x2 = rng.uniform(size=3)
        return mixed_saturating_operation(t, x1, x2)
    if u < 0.375:
        return random_kraus(2, int(rng.integers(1, 5)), rng)
    povm = random_povm(2, int(rng.integers(2, 5)), rng)
    return random_operation(povm, int(rng.integers(1, 4)), rng)


def bound_checks(seed: int, trials: int, workers: int = 1, tol: float | None = None) -> list[Check]:
    """Trade-off bound on random qubit operations, saturation and the equality condition."""

    def block(b: int, size: int) -> float:
        rng = block_rng(seed, "bound", b)
        worst = np.inf
        for _ in range(size):
            for rep in check_all_bounds(_random_qubit_operation(rng)).values():
                worst = min(worst, rep.margin)
        return worst

    out = [Check("bound", trials, _run_blocks(block, trials, workers), _tol(tol, BOUND_TOL))]
    xs = np.linspace(0.1, 0.9, 9)
    sat = max(abs(r.margin) for x in xs for r in check_all_bounds(saturating_operation(x)).values())
    out.append(Check("saturation", len(xs), -sat, _tol(tol, BOUND_TOL)))
    n_eq = min(trials, 200)
    eq = equality_condition_check(block_rng(seed, "equality", 0), n_eq)
    out.append(Check("equal_ratio_saturates", n_eq, -eq.saturating_worst, _tol(tol, BOUND_TOL)))
    # unequal ratios must stay at least 1e-6 below the bound
    out.append(Check("unequal_ratio_gap", n_eq, -1e-6 - eq.unequal_worst, 0.0))
    return out


# -- convexity ---------------------------------------------------------------------------


def convexity_checks(seed: int, trials: int, workers: int = 1, tol: float | None = None) -> list[Check]:
    """Merging inequalities, positive homogeneity and unitary invariance of the components."""
    out = []
    for mode, default in (("commuting", 1e-12), ("general", 1e-9)):
        for k, comp in enumerate(COMPONENTS):

            def block(b: int, size: int, comp=comp, mode=mode, k=k) -> float:
                rng = block_rng(seed, "convexity", b, sub=2 * k + (mode == "general"))
                return convexity_probe(comp, mode, size, rng, threshold=-np.inf).worst_margin

            out.append(Check(f"merge_{comp}_{mode}", trials, _run_blocks(block, trials, workers), _tol(tol, default)))

    n_inv = min(trials, 200)
    grid = qubit_quadrature_grid(256, 256)

    def value(comp: str, m) -> float:
        return component_value(comp, m, grid=grid) if m.shape[0] == 2 else component_value(comp, m)

    for comp in COMPONENTS:
        rng = block_rng(seed, "homogeneity", COMPONENTS.index(comp))
        hom = inv = 0.0
        for k in range(n_inv):
            d = 2 + k % 2
            m = random_psd(d, rng)
            m = m / np.real(np.trace(m))
            c = float(rng.uniform(0.1, 3.0))
            u = random_unitary(d, rng)
            base = value(comp, m)
            hom = max(hom, abs(value(comp, c * m) - c * base))
            inv = max(inv, abs(value(comp, u @ m @ u.conj().T) - base))
        out.append(Check(f"homogeneity_{comp}", n_inv, -hom, _tol(tol, 1e-9)))
        out.append(Check(f"unitary_invariance_{comp}", n_inv, -inv, _tol(tol, 1e-9)))
    return out


# -- efficiency --------------------------------------------------------------------------

REFINEMENTS = 10


def efficiency_checks(seed: int, trials: int, workers: int = 1, tol: float | None = None) -> list[Check]:
    """Efficient operations beat every other operation inducing the same POVM."""

    def block(b: int, size: int) -> tuple[float, float, float]:
        rng = block_rng(seed, "efficiency", b)
        wf = wb = wh = np.inf
        for _ in range(size):
            povm = random_povm(2, int(rng.integers(2, 5)), rng)
            eff = efficient_from_povm(povm)
            f_eff = operation_fidelity_closed(eff).value
            b_eff = bures_fidelity(eff, "closed_form").value
            h_coarse = shannon_gain(povm, "closed_form").value
            for _ in range(REFINEMENTS):
                op = random_operation(povm, int(rng.integers(1, 4)), rng)
                wf = min(wf, f_eff - operation_fidelity_closed(op).value)
                wb = min(wb, b_eff - bures_fidelity(op).value)
                wh = min(wh, shannon_gain(refined_povm(op), "closed_form").value - h_coarse)
        return wf, wb, wh

    blocks = _blocks(trials)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda bs: block(*bs), blocks))
    else:
        parts = [block(b, s) for b, s in blocks]
    n = trials * REFINEMENTS
    return [
        Check("efficiency_F", n, min(p[0] for p in parts), _tol(tol, 1e-9)),
        Check("efficiency_B", n, min(p[1] for p in parts), _tol(tol, 1e-7)),
        Check("refinement_H", n, min(p[2] for p in parts), _tol(tol, 1e-9)),
    ]


# -- second derivative and envelopes -----------------------------------------------------


def synthetic_envelope_error(n: int = 401) -> float:
    """Envelope engine against a brute-force chord supremum on a non-concave curve."""
    t = np.linspace(0.0, 1.0, n)
    y = np.sin(6 * t) * np.exp(-t) + 0.3 * np.cos(17 * t)
    curve = ScalarCurve(t, y, "synthetic")
    return float(np.max(np.abs(concave_envelope(curve).y - chord_sup(curve))))


def concavity_checks(seed: int, trials: int, workers: int = 1, tol: float | None = None) -> list[Check]:
    """Second derivative of ``h(sqrt(1-x^2))`` and envelope equality of the composites."""
    rep = composite_concavity_check(64)
    # positive margin: negative on the grid and closed form agrees with differences
    out = [Check("second_derivative", len(rep.x), rep.worst_margin, _tol(tol, 0.0))]
    for p in Pairing:
        c = composite_curve(p, DEFAULT_RESOLUTION)
        gap = float(np.max(c.envelope - c.info_bound))
        out.append(Check(f"envelope_{p.value}", DEFAULT_RESOLUTION, -gap, _tol(tol, 1e-9)))
    out.append(Check("envelope_engine", 401, -synthetic_envelope_error(), _tol(tol, 1e-9)))
    return out


# -- Bloch-picture Bures integral --------------------------------------------------------


def bloch_bures_checks(seed: int, trials: int, workers: int = 1, tol: float | None = None) -> list[Check]:
    """Beta scan, dual integrand, trace term closed form and the azimuthal bound."""
    out = []
    xs = np.linspace(0.0, 1.0, 64)
    scan = bb.verify_beta_maximum(xs)
    out.append(Check("beta_scan", len(xs), scan.worst_margin, _tol(tol, 1e-10)))
    zero = bb.beta_zero_matches_closed_form(xs)
    out.append(Check("beta_zero_closed_form", len(xs), -zero, _tol(tol, 1e-8)))

    def dual(b: int, size: int) -> float:
        rng = block_rng(seed, "dual_integrand", b)
        worst = 0.0
        for _ in range(size):
            p = bb.BlochChannelParams(rng.uniform(), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi))
            psi = haar_states(2, 1, rng)
            r = bloch_vectors(psi)[0]
            worst = max(worst, abs(bb.bu_integrand(p, r) - bb.hilbert_integrand(p, psi)))
        return -worst

    out.append(Check("dual_integrand", trials, _run_blocks(dual, trials, workers), _tol(tol, 1e-12)))

    rng = block_rng(seed, "trace_term", 0)
    tr = vm = 0.0
    for _ in range(trials):
        x, th, a, b = rng.uniform(), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi)
        tr = max(tr, abs(bb.trace_term(x, th, a, b) - bb.trace_term_matrix(x, th, a, b)))
        vm = max(vm, float(np.max(np.abs(bb.v_matrix(x, th) - bb.v_matrix_average(x, th)))))
    out.append(Check("trace_term", trials, -tr, _tol(tol, 1e-12)))
    out.append(Check("v_matrix", trials, -vm, _tol(tol, 1e-12)))

    rng = block_rng(seed, "alpha_optimality", 0)
    worst = np.inf
    for _ in range(trials):
        x, th, a, b = rng.uniform(), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi)
        worst = min(worst, bb.alpha_optimality_margin(x, th, a, b))
    out.append(Check("alpha_optimality", trials, worst, _tol(tol, 1e-12)))

    rng = block_rng(seed, "azimuthal_bound", 0)
    n_az = min(trials, 1000)
    worst = np.inf
    for _ in range(n_az):
        p = bb.BlochChannelParams(rng.uniform(), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi))
        th = rng.uniform(0, np.pi)
        worst = min(worst, bb.azimuthal_bound(p, th) - bb.azimuthal_average(p, th))
    out.append(Check("azimuthal_bound", n_az, worst, _tol(tol, 1e-10)))
    return out


_RUNNERS = {
    "bound": bound_checks,
    "convexity": convexity_checks,
    "efficiency": efficiency_checks,
    "appendixA": concavity_checks,
    "appendixB": bloch_bures_checks,
}


def run_suite(suite: str, seed: int, trials: int, workers: int = 1, tol: float | None = None) -> dict:
    """Run one suite (or ``"all"``) and return the JSON report."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    names = SUITES if suite == "all" else (suite,)
    if any(n not in _RUNNERS for n in names):
        raise ValueError(f"unknown suite {suite!r}")
    details = []
    for name in names:
        for c in _RUNNERS[name](seed, trials, workers, tol):
            details.append({"suite": name, **c.as_dict()})
    worst = min(d["worst_margin"] for d in details) + 0.0
    return {
        "suite": suite,
        "trials": int(trials),
        "worst_margin": float(worst),
        "pass": all(d["pass"] for d in details),
        "details": details,
    }
