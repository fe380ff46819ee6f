"""One-parameter qubit reductions, concave envelopes and the trade-off bound.

A qubit POVM element normalized to trace 2 has eigenvalues ``1 +/- x`` with
``x`` in ``[0, 1]``. Every measure used here is positively homogeneous and
unitarily invariant, so an element contributes ``xi * k(x)`` with
``xi = Tr(M)/2`` and ``k`` one of

* ``f(x) = (2 + sqrt(1 - x^2)) / 3``  (operation fidelity),
* ``h(x)``                            (Shannon gain, bits),
* ``g(x) = (x + 3) / 6``              (estimation fidelity),
* ``b(x)``                            (Bures-Uhlmann fidelity).

The achievable (disturbance, information) region is bounded by the concave
envelope of ``info o disturbance^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from .channels import KrausOperation, Povm, induced_povm, povm_from_weights, random_povm
from .errors import DegenerateInput, OutOfImage, OutOfRange
from .measures import (
    Method,
    MeasureValue,
    bures_fidelity,
    estimation_fidelity,
    operation_fidelity,
    shannon_gain,
)

LN2 = np.log(2.0)
H_MAX = 1.0 - 1.0 / (2.0 * LN2)
DEFAULT_RESOLUTION = 4096
BOUND_TOL = 1e-7
# truncation error of both series is below x^12 ~ 1e-24 here
SERIES_CUTOFF = 1e-2


def _unit(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise OutOfRange(f"{name} must lie in [0, 1]")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def f_closed(x):
    x = _unit(x)
    return _out((2.0 + np.sqrt(1.0 - x * x)) / 3.0)


def h_closed(x):
    """Shannon gain of ``diag(1 + x, 1 - x)`` in bits.

    Uses ``((1+x)^2 log(1+x) - (1-x)^2 log(1-x)) / 4x - 1/2`` (natural logs,
    then divided by ``ln 2``); below ``SERIES_CUTOFF`` the even power series
    ``x^2/6 + x^4/60 + x^6/210 + x^8/504 + x^10/990`` avoids the 0/0.
    """
    x = _unit(x)
    small = x < SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    om = 1.0 - xs
    edge = om < 1e-12
    lo = np.where(edge, 0.0, om * om * np.log(np.where(edge, 1.0, om)))
    direct = ((1.0 + xs) ** 2 * np.log1p(xs) - lo) / (4.0 * xs) - 0.5
    x2 = x * x
    series = x2 * (1 / 6 + x2 * (1 / 60 + x2 * (1 / 210 + x2 * (1 / 504 + x2 / 990))))
    return _out(np.where(small, series, direct) / LN2)


def g_closed(x):
    x = _unit(x)
    return _out((x + 3.0) / 6.0)


def b_closed(x):
    """Bures-Uhlmann fidelity of ``diag(1 + x, 1 - x)``.

    The closed form loses digits to cancellation as ``x -> 0``; below
    ``SERIES_CUTOFF`` its Taylor series is used instead.
    """
    x = _unit(x)
    small = x < SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    direct = 2.0 / (15.0 * xs * xs) * ((1 + xs * xs) * np.sqrt(1 - xs * xs) + 7 * xs * xs - 1)
    x2 = x * x
    series = 1.0 - x2 * (1 / 12 + x2 * (1 / 40 + x2 * (13 / 960 + x2 * (17 / 1920 + x2 * 49 / 7680))))
    return _out(np.where(small, series, direct))


def f_inverse(y):
    """``x = sqrt(1 - (3F - 2)^2)`` on ``[2/3, 1]``."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 2 / 3 - 1e-12) or np.any(y > 1 + 1e-12):
        raise OutOfImage("operation fidelity of an efficient qubit operation lies in [2/3, 1]")
    s = np.clip(3.0 * y - 2.0, 0.0, 1.0)
    return _out(np.sqrt(np.maximum(1.0 - s * s, 0.0)))


def g_inverse(y):
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.5 - 1e-12) or np.any(y > 2 / 3 + 1e-12):
        raise OutOfImage("estimation fidelity of a qubit lies in [1/2, 2/3]")
    return _out(np.clip(6.0 * y - 3.0, 0.0, 1.0))


FUNCTIONS: dict[str, Callable] = {"f": f_closed, "h": h_closed, "g": g_closed, "b": b_closed}


def invert_monotone(fn: Callable[[float], float], y: float, lo: float = 0.0, hi: float = 1.0) -> float:
    """Solve ``fn(x) = y`` for strictly monotone ``fn`` on ``[lo, hi]``.

    Bisection down to adjacent floats, then a Newton polish that is kept
    only if it lowers the residual.
    """
    flo, fhi = fn(lo), fn(hi)
    increasing = fhi > flo
    ymin, ymax = min(flo, fhi), max(flo, fhi)
    slack = 1e-14 * max(1.0, abs(ymax))
    if not (ymin - slack <= y <= ymax + slack):
        raise OutOfImage(f"{y} outside [{ymin}, {ymax}]")
    if y <= ymin:
        return lo if increasing else hi
    if y >= ymax:
        return hi if increasing else lo
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if (fn(mid) < y) == increasing:
            a = mid
        else:
            b = mid
    x = a if abs(fn(a) - y) <= abs(fn(b) - y) else b
    step = 1e-7
    for _ in range(3):
        xa, xb = max(lo, x - step), min(hi, x + step)
        slope = (fn(xb) - fn(xa)) / (xb - xa)
        if slope == 0:
            break
        cand = min(max(x - (fn(x) - y) / slope, lo), hi)
        if abs(fn(cand) - y) < abs(fn(x) - y):
            x = cand
        else:
            break
    return float(x)


def b_inverse(y):
    """Inverse of the decreasing ``b`` on ``[0.8, 1]`` by vectorized bisection."""
    y = np.asarray(y, dtype=float)
    slack = 1e-14
    if np.any(~np.isfinite(y)) or np.any(y < 0.8 - slack) or np.any(y > 1.0 + slack):
        raise OutOfImage("Bures fidelity of an efficient qubit operation lies in [0.8, 1]")
    a, b = np.zeros_like(y), np.ones_like(y)
    for _ in range(64):
        mid = 0.5 * (a + b)
        right = b_closed(mid) > y
        a = np.where(right, mid, a)
        b = np.where(right, b, mid)
    x = np.where(np.abs(b_closed(a) - y) <= np.abs(b_closed(b) - y), a, b)
    return _out(x)


# -- curves and envelopes -------------------------------------------------------------


@dataclass(frozen=True)
class ScalarCurve:
    x: np.ndarray
    y: np.ndarray
    name: str = ""
    hull: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise DegenerateInput("x and y must be 1-D arrays of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.size

    def __call__(self, t):
        return np.interp(t, self.x, self.y)


def upper_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the upper convex hull vertices (monotone chain, ``x`` sorted)."""
    hull: list[int] = []
    for i in range(x.size):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=int)


def concave_envelope(curve: ScalarCurve) -> ScalarCurve:
    """Least concave majorant of sampled data, linear between hull vertices."""
    x, y = curve.x, curve.y
    if x.size < 2:
        raise DegenerateInput("need at least two samples")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DegenerateInput("samples must be finite")
    if np.any(np.diff(x) <= 0):
        raise DegenerateInput("x must be strictly increasing")
    idx = upper_hull(x, y)
    env = np.interp(x, x[idx], y[idx])
    env[idx] = y[idx]
    return ScalarCurve(x, env, f"envelope({curve.name})", hull=idx)


def chord_point(curve: ScalarCurve, t: float, i: int, j: int) -> tuple[float, float]:
    """Point ``(t x_i + (1-t) x_j, t y_i + (1-t) y_j)`` on a chord of the samples."""
    return (t * curve.x[i] + (1 - t) * curve.x[j], t * curve.y[i] + (1 - t) * curve.y[j])


def chord_sup(curve: ScalarCurve) -> np.ndarray:
    """Brute-force envelope: at each ``x_k`` the sup over all chords spanning it.

    Quadratic memory per node, cubic time overall; meant as an oracle for
    small curves.
    """
    x, y = curve.x, curve.y
    out = np.empty_like(y)
    for k in range(x.size):
        xi, yi = x[: k + 1, None], y[: k + 1, None]
        xj, yj = x[None, k:], y[None, k:]
        span = xj - xi
        with np.errstate(invalid="ignore", divide="ignore"):
            val = np.where(span > 0, yi + (yj - yi) * (x[k] - xi) / span, y[k])
        out[k] = val.max()
    return out


class Pairing(str, Enum):
    H_vs_F = "HF"
    G_vs_F = "GF"
    H_vs_B = "HB"
    G_vs_B = "GB"

    @property
    def info(self) -> str:
        return self.value[0]

    @property
    def disturbance(self) -> str:
        return self.value[1]

    @property
    def domain(self) -> tuple[float, float]:
        return (2.0 / 3.0, 1.0) if self.disturbance == "F" else (0.8, 1.0)

    @property
    def info_max(self) -> float:
        return H_MAX if self.info == "H" else 2.0 / 3.0


def as_pairing(p) -> Pairing:
    if isinstance(p, Pairing):
        return p
    try:
        return Pairing(p)
    except ValueError:
        return Pairing[p]


def disturbance_inverse(pairing: Pairing, d):
    return f_inverse(d) if pairing.disturbance == "F" else b_inverse(d)


def composite(pairing, d):
    """``info(disturbance^{-1}(d))`` on the disturbance image."""
    pairing = as_pairing(pairing)
    x = disturbance_inverse(pairing, d)
    return h_closed(x) if pairing.info == "H" else g_closed(x)


@dataclass(frozen=True)
class TradeoffCurve:
    pairing: Pairing
    disturbance: np.ndarray
    info_bound: np.ndarray
    envelope: np.ndarray
    x: np.ndarray

    def rows(self):
        return zip(self.disturbance, self.info_bound, self.envelope, self.x)


def composite_curve(pairing, n_samples: int = DEFAULT_RESOLUTION) -> TradeoffCurve:
    """Sample the composite uniformly in disturbance and attach its envelope."""
    pairing = as_pairing(pairing)
    if n_samples < 2:
        raise DegenerateInput("need at least two samples")
    lo, hi = pairing.domain
    d = np.linspace(lo, hi, n_samples)
    x = np.asarray(disturbance_inverse(pairing, d), dtype=float)
    info = np.asarray(h_closed(x) if pairing.info == "H" else g_closed(x), dtype=float)
    env = concave_envelope(ScalarCurve(d, info, pairing.value)).y
    return TradeoffCurve(pairing, d, info, env, x)


@lru_cache(maxsize=8)
def _cached_curve(pairing: Pairing, n: int) -> TradeoffCurve:
    return composite_curve(pairing, n)


def bound_at(pairing, disturbance: float, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Concave-envelope bound on information at a given disturbance.

    Below the efficient-operation domain the bound saturates at the maximal
    information; between grid points it is the larger of the sampled
    envelope's chord and the composite itself (both lie below the true
    envelope).
    """
    pairing = as_pairing(pairing)
    lo, hi = pairing.domain
    if disturbance <= lo:
        return pairing.info_max
    d = min(float(disturbance), hi)
    curve = _cached_curve(pairing, resolution)
    chord = float(np.interp(d, curve.disturbance, curve.envelope))
    return max(chord, float(composite(pairing, d)))


@dataclass
class BoundReport:
    pairing: str
    info: float
    disturbance: float
    bound: float
    satisfied: bool
    margin: float
    tol: float
    info_method: str = ""
    disturbance_method: str = ""


def measure_info(pairing: Pairing, povm: Povm, method=Method.QUADRATURE, **kw) -> MeasureValue:
    if pairing.info == "H":
        return shannon_gain(povm, method, **kw)
    return estimation_fidelity(povm, Method.CLOSED_FORM if method == Method.QUADRATURE else method, **kw)


def measure_disturbance(pairing: Pairing, op: KrausOperation, method=Method.QUADRATURE, **kw) -> MeasureValue:
    if pairing.disturbance == "F":
        return operation_fidelity(op, Method.CLOSED_FORM if method == Method.QUADRATURE else method, **kw)
    return bures_fidelity(op, method, **kw)


def check_bound(op: KrausOperation, pairing, method=Method.QUADRATURE, **kw) -> BoundReport:
    """Compare an operation's information gain with the trade-off bound."""
    pairing = as_pairing(pairing)
    info = measure_info(pairing, induced_povm(op), method, **kw)
    dist = measure_disturbance(pairing, op, method, **kw)
    bound = bound_at(pairing, dist.value)
    tol = BOUND_TOL + 4.0 * (info.mc_std_error + dist.mc_std_error)
    margin = bound - info.value
    return BoundReport(
        pairing.value, info.value, dist.value, bound, margin >= -tol, margin, tol,
        info.method.value, dist.method.value,
    )



def check_all_bounds(op: KrausOperation, method=Method.QUADRATURE, **kw) -> dict[str, BoundReport]:
    """:func:`check_bound` for every pairing, evaluating each measure once."""
    povm = induced_povm(op)
    first = {p.info: p for p in Pairing} | {p.disturbance: p for p in Pairing}
    vals = {"H": measure_info(first["H"], povm, method, **kw), "G": measure_info(first["G"], povm, method, **kw)}
    vals["F"] = measure_disturbance(first["F"], op, method, **kw)
    vals["B"] = measure_disturbance(first["B"], op, method, **kw)
    out = {}
    for p in Pairing:
        info, dist = vals[p.info], vals[p.disturbance]
        bound = bound_at(p, dist.value)
        tol = BOUND_TOL + 4.0 * (info.mc_std_error + dist.mc_std_error)
        margin = bound - info.value
        out[p.value] = BoundReport(
            p.value, info.value, dist.value, bound, margin >= -tol, margin, tol,
            info.method.value, dist.method.value,
        )
    return out

# -- analytic checks ------------------------------------------------------------------


def concavity_second_derivative(x):
    """Closed-form second derivative of ``h(sqrt(1 - x^2))`` on ``(0, 1)``."""
    x = np.asarray(x, dtype=float)
    c = np.sqrt(1.0 - x * x)
    bracket = np.log2((1.0 - c) / (1.0 + c)) + (4.0 * x * x + 2.0) * c / (3.0 * x * x * LN2)
    return _out(-3.0 * x * x / (4.0 * (1.0 - x * x) ** 2.5) * bracket)


def _h_of_sqrt(x):
    return h_closed(np.sqrt(np.clip(1.0 - np.asarray(x) ** 2, 0.0, 1.0)))


def finite_difference_second_derivative(x, step: float = 1e-4):
    x = np.asarray(x, dtype=float)
    return _out((_h_of_sqrt(x + step) - 2.0 * _h_of_sqrt(x) + _h_of_sqrt(x - step)) / (step * step))


@dataclass
class ConcavityReport:
    x: np.ndarray
    closed: np.ndarray
    finite_difference: np.ndarray
    max_mismatch: float
    worst_margin: float
    passed: bool


def composite_concavity_check(n_grid: int = 64) -> ConcavityReport:
    """Dual evaluation of ``d^2/dx^2 h(sqrt(1 - x^2))`` on an interior grid."""
    if n_grid < 64:
        raise ValueError("n_grid must be >= 64")
    x = np.arange(1, n_grid + 1) / (n_grid + 1)
    closed = np.asarray(concavity_second_derivative(x))
    fd = np.asarray(finite_difference_second_derivative(x))
    allowed = np.maximum(1e-6, 1e-4 * np.abs(closed))
    mismatch = np.abs(closed - fd)
    ok = bool(np.all(mismatch <= allowed) and np.all(closed < 0) and np.all(fd < 0))
    # margin > 0 means negative second derivative and agreement
    margin = float(min(np.min(-closed), np.min(-fd), np.min(allowed - mismatch)))
    return ConcavityReport(x, closed, fd, float(mismatch.max()), margin, ok)


@dataclass
class EqualityReport:
    trials: int
    saturating_worst: float
    unequal_worst: float
    passed: bool
    details: list = field(default_factory=list)


def _hf_excess(povm: Povm) -> float:
    """``H - bound`` for the efficient operation of ``povm``; zero at saturation."""
    from .channels import efficient_from_povm

    return -check_bound(efficient_from_povm(povm), Pairing.H_vs_F).margin


def qubit_povm_parameters(povm: Povm) -> tuple[np.ndarray, np.ndarray]:
    """Half-trace weights ``xi_r`` and imbalances ``x_r`` of a qubit POVM."""
    from .qmat import eigvalsh

    xis, xs = [], []
    for m in povm.elements:
        lam = eigvalsh(m)
        tr = lam[0] + lam[1]
        xis.append(0.5 * tr)
        xs.append((lam[0] - lam[1]) / tr if tr > 0 else 0.0)
    return np.array(xis), np.array(xs)


def equality_condition_check(rng: np.random.Generator, trials: int) -> EqualityReport:
    """Saturation iff all elements share the same eigenvalue ratio.

    Each trial builds one equal-ratio POVM (antipodal pairs with an arbitrary
    weight split) and one unequal-ratio POVM, either a two-outcome POVM with
    distinct imbalances or a random POVM whose imbalances spread by at least
    0.1.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sat, gap = [], []
    for k in range(trials):
        x = float(rng.uniform(0.05, 0.95))
        n_pairs = int(rng.integers(1, 4))
        w = rng.dirichlet(np.ones(n_pairs))
        axes = [rng.standard_normal(3) for _ in range(n_pairs)]
        xis = np.repeat(w / 2, 2)
        dirs = [s * a for a in axes for s in (1, -1)]
        sat.append(abs(_hf_excess(povm_from_weights(xis, [x] * len(xis), dirs))))
        if k % 2 == 0:
            x1, x2 = sorted(rng.uniform(0.05, 0.95, 2))
            if x2 - x1 < 0.1:
                x2 = min(x1 + 0.1 + 0.5 * (0.95 - x1 - 0.1), 0.95)
            axis = rng.standard_normal(3)
            xi1 = x2 / (x1 + x2)
            povm = povm_from_weights([xi1, 1 - xi1], [x1, x2], [axis, -axis])
        else:
            while True:
                povm = random_povm(2, int(rng.integers(2, 6)), rng)
                _, xs = qubit_povm_parameters(povm)
                if np.ptp(xs) >= 0.1:
                    break
        gap.append(_hf_excess(povm))
    sat_worst = float(max(sat))
    gap_worst = float(max(gap))
    return EqualityReport(trials, sat_worst, gap_worst, sat_worst < BOUND_TOL and gap_worst < -1e-6)
