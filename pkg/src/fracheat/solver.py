"""Mild solutions of ``u_t + (-Delta)^alpha u = sum_j d_j (u^2)``.

Two independent discretizations of the same solution:

* :func:`march`, second-order exponential time differencing (Cox-Matthews
  ETD2) on a uniform grid;
* :func:`picard_iterate`, fixed-point iteration of the Duhamel operator
  ``T u (t) = W_t u0 + int_0^t W_{t - tau} D u^2(tau) dtau`` with the time
  integral by the trapezoid rule on the same nodes.

Residuals and contraction factors are measured in the weighted norm
``L_{2 alpha v}((0,T), a / 2 alpha, A^s_{p,q})``. One space dimension is
allowed although the well-posedness theory assumes ``n >= 2``; it exists to
compare against the Cole-Hopf solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import nnls

from . import _kernels
from . import regimes
from .grid import GridSpec, SpatialField
from .semigroup import symbol_power
from .spaces import (
    SpaceParams,
    Trajectory,
    dyadic_system,
    space_norm,
    weighted_time_integral,
)

__all__ = [
    "SolverConfig",
    "PicardReport",
    "PicardDivergence",
    "BlowUp",
    "nonlinearity",
    "march",
    "picard_iterate",
    "duhamel",
    "contraction_estimate",
    "stability_experiment",
    "StabilityReport",
    "initial_trace_check",
    "TraceReport",
    "weighted_norm",
    "solve",
    "apply_operator",
]


class BlowUp(RuntimeError):
    pass


class PicardDivergence(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class SolverConfig:
    """Horizon, time grid, solution space ``A^s_{p,q}`` and weight parameters ``(a, v, d)``.

    ``a``, ``v`` and ``d`` left as ``None`` are filled from the representative
    point of the admissible ranges for ``s0 = s`` (see
    :func:`regimes.solution_space_ranges`) when the config is resolved.
    """

    alpha: float
    T: float
    M: int = 128
    mode: str = "picard"
    dealias: bool = True
    s: float = 1.0
    p: float = 2.0
    q: float = 2.0
    A: str = "B"
    a: float | None = None
    v: float | None = None
    d: float | None = None
    s0: float | None = None
    tol: float = 1e-10
    max_iter: int = 100
    blowup: float = 1e6
    substeps: int = 1
    check_regime: bool = True

    def __post_init__(self):
        if not self.alpha > 0.5:
            raise ValueError(f"alpha must exceed 1/2, got {self.alpha}")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if self.mode not in ("picard", "march"):
            raise ValueError(f"mode must be 'picard' or 'march', got {self.mode!r}")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ValueError("substeps must be a positive integer")
        SpaceParams(self.A, self.s, self.p, self.q)

    @property
    def space(self) -> SpaceParams:
        return SpaceParams(self.A, self.s, self.p, self.q)

    @property
    def initial_s(self) -> float:
        return self.s if self.s0 is None else self.s0

    @property
    def h(self) -> float:
        return self.T / self.M

    def times(self) -> np.ndarray:
        return self.h * np.arange(self.M + 1)

    def resolve(self, n: int) -> "SolverConfig":
        """Fill ``a``, ``v``, ``d`` and validate the weight conditions for dimension ``n``."""
        R = regimes.RegimeInput.make(n, self.alpha, _inf_str(self.p), _inf_str(self.q), self.initial_s)
        if self.check_regime:
            res = regimes.solution_space_ranges(R, s=self.s)
            if not res.supercritical.ok:
                raise ValueError("; ".join(res.supercritical.violations))
            if res.s_range is None or res.s_range.empty or self.s not in res.s_range:
                raise ValueError(f"s = {self.s} outside the admissible range {res.s_range}")
            pt = res.point
        else:
            pt = {}
        cfg = self
        if cfg.v is None:
            inv_v = pt.get("inv_v", Fraction(0))
            cfg = replace(cfg, v=math.inf if inv_v == 0 else float(1 / inv_v))
        if cfg.a is None:
            cfg = replace(cfg, a=float(pt.get("a", 0)))
        if cfg.d is None:
            cfg = replace(cfg, d=float(pt.get("d", 1 + max(n / self.p - self.s, 0) + 1e-3)))
        cfg.check_weights(n)
        return cfg

    def check_weights(self, n: int):
        """Raise unless ``1/alpha < v``, ``a + 1/v < alpha`` and ``1 + (n/p - s)_+ < d < 2 (alpha - 1/v)``."""
        inv_v = 0.0 if math.isinf(self.v) else 1.0 / self.v
        problems = []
        if not self.v > 1.0 / self.alpha:
            problems.append(f"v > 1/alpha fails: v = {self.v}, 1/alpha = {1 / self.alpha}")
        if not self.a + inv_v < self.alpha:
            problems.append(f"a + 1/v < alpha fails: a + 1/v = {self.a + inv_v}, alpha = {self.alpha}")
        lo = 1 + max(n / self.p - self.s, 0.0)
        hi = 2 * (self.alpha - inv_v)
        if not lo < self.d < hi:
            problems.append(f"1 + (n/p - s)_+ < d < 2*(alpha - 1/v) fails: {lo} < {self.d} < {hi}")
        if problems:
            raise ValueError("; ".join(problems))


def _inf_str(x):
    return "inf" if math.isinf(x) else x


@lru_cache(maxsize=16)
def _dealias_mask(spec: GridSpec) -> np.ndarray:
    cut = (spec.N - 1) // 3
    keep = np.abs(spec.k1) <= cut
    mask = np.ones(spec.shape, dtype=bool)
    for axis in range(spec.n):
        shp = [1] * spec.n
        shp[axis] = spec.N
        mask = mask & keep.reshape(shp)
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=16)
def _derivative_symbols(spec: GridSpec) -> tuple:
    """``i xi_j`` per axis, with the Nyquist mode zeroed (odd derivative)."""
    xi = spec.xi1.copy()
    xi[spec.N // 2] = 0.0
    out = []
    for axis in range(spec.n):
        shp = [1] * spec.n
        shp[axis] = spec.N
        out.append(1j * xi.reshape(shp))
    return tuple(out)


def _nonlinear_hat(coeffs: np.ndarray, spec: GridSpec, dealias: bool) -> np.ndarray:
    """FFT of ``sum_j d_j (u^2)`` from the FFT of ``u`` (unnormalized numpy convention)."""
    if dealias:
        mask = _dealias_mask(spec)
        coeffs = coeffs * mask
    u = np.fft.ifftn(coeffs).real
    sq = np.fft.fftn(u * u)
    out = np.zeros_like(sq)
    for sym in _derivative_symbols(spec):
        out = out + sym * sq
    if dealias:
        out = out * mask
    return out


def nonlinearity(u: SpatialField, dealias: bool = True) -> SpatialField:
    """``sum_j d_j (u^2)``: square in physical space, differentiate spectrally.

    With ``dealias`` the input is truncated to ``|k_j| <= (N-1)/3`` before squaring
    and the result is projected onto the same band.
    """
    out = _nonlinear_hat(np.fft.fftn(u.values), u.spec, dealias)
    return SpatialField(u.spec, np.fft.ifftn(out).real)


def _phi_functions(z: np.ndarray):
    """``phi1(z) = (e^z - 1)/z`` and ``phi2(z) = (e^z - 1 - z)/z^2`` with Taylor fallback near 0."""
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    ez = np.exp(zs)
    phi1 = np.where(small, 1 + z / 2 + z * z / 6, (ez - 1) / zs)
    phi2 = np.where(small, 0.5 + z / 6 + z * z / 24, (ez - 1 - zs) / (zs * zs))
    return phi1, phi2


def march(u0: SpatialField, C: SolverConfig, linear: bool = False) -> Trajectory:
    """ETD2 reference integrator; returns the solution at the ``M`` nodes ``t_i = i T / M``.

    ``linear=True`` drops the nonlinearity, so each step is the exact
    semigroup factor.
    """
    spec = u0.spec
    h = C.h / C.substeps
    lam = -symbol_power(spec, 2.0 * C.alpha)
    E = np.exp(h * lam)
    phi1, phi2 = _phi_functions(h * lam)
    uh = np.fft.fftn(u0.values.real)
    limit = C.blowup * max(float(np.max(np.abs(u0.values))), 1e-300)
    fields = []
    for _ in range(C.M):
        for _ in range(C.substeps):
            if linear:
                uh = E * uh
                continue
            Nu = _nonlinear_hat(uh, spec, C.dealias)
            a = E * uh + h * phi1 * Nu
            Na = _nonlinear_hat(a, spec, C.dealias)
            uh = a + h * phi2 * (Na - Nu)
        vals = np.fft.ifftn(uh).real
        if not np.all(np.isfinite(vals)) or np.max(np.abs(vals)) > limit:
            raise BlowUp(f"|u| exceeded {C.blowup:g} times its initial maximum")
        fields.append(SpatialField(spec, vals))
    return Trajectory(spec, C.times()[1:], fields, initial=SpatialField(spec, u0.values.real))


def duhamel(source_hat: np.ndarray, spec: GridSpec, alpha: float, h: float) -> np.ndarray:
    """Trapezoid Duhamel integrals ``int_0^{t_i} W_{t_i - tau} F(tau) dtau`` on uniform nodes.

    ``source_hat`` has shape ``(M+1,) + spec.shape`` and holds FFTs of ``F``
    at ``t_0 = 0, ..., t_M``; the result has the same shape.
    """
    decay = np.exp(-h * symbol_power(spec, 2.0 * alpha)).ravel()
    flat = source_hat.reshape(source_hat.shape[0], -1)
    out = _kernels.duhamel_trapezoid(decay, flat, h)
    return out.reshape(source_hat.shape)


@dataclass
class PicardReport:
    residuals: list = field(default_factory=list)
    contraction_factors: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    tol: float = 0.0

    def to_json(self) -> dict:
        return {
            "residuals": [float(r) for r in self.residuals],
            "contraction_factors": [float(c) for c in self.contraction_factors],
            "converged": self.converged,
            "iterations": self.iterations,
            "tol": self.tol,
        }


def _node_norms(stack_hat: np.ndarray, spec: GridSpec, P: SpaceParams, D) -> np.ndarray:
    """``||f(t_i) | A^s_{p,q}||`` for each row of an FFT stack."""
    out = np.empty(stack_hat.shape[0])
    for i, row in enumerate(stack_hat):
        out[i] = space_norm(SpatialField(spec, np.fft.ifftn(row)), P, D)
    return out


def weighted_norm(values: np.ndarray, times: np.ndarray, C: SolverConfig, T: float | None = None) -> float:
    """``L_{2 alpha v}((0,T), a / 2 alpha)`` norm from per-node space norms at ``times > 0``."""
    return weighted_time_integral(times, values, 2 * C.alpha * C.v, C.a / (2 * C.alpha), C.T if T is None else T)


def _to_trajectory(stack_hat, spec, C, u0):
    fields = [SpatialField(spec, np.fft.ifftn(row).real) for row in stack_hat[1:]]
    return Trajectory(spec, C.times()[1:], fields, initial=SpatialField(spec, u0.values.real))


def picard_iterate(u0: SpatialField, C: SolverConfig, raise_on_failure: bool = True):
    """Fixed-point iteration from ``u^(0) = 0``; returns ``(Trajectory, PicardReport)``.

    Iterates ``u^(m+1)(t_i) = W_{t_i} u0 + sum_j w_ij W_{t_i - tau_j} D u^(m)(tau_j)^2``
    until the weighted-norm change drops below ``C.tol``.
    """
    spec = u0.spec
    C = C if C.a is not None and C.v is not None and C.d is not None else C.resolve(spec.n)
    P = C.space
    D = dyadic_system(spec)
    t = C.times()
    h = C.h
    r2a = symbol_power(spec, 2.0 * C.alpha)
    u0h = np.fft.fftn(u0.values.real)
    free = np.exp(-t.reshape((-1,) + (1,) * spec.n) * r2a[None]) * u0h[None]
    current = np.zeros_like(free)
    report = PicardReport(tol=C.tol)
    for it in range(1, C.max_iter + 1):
        if it == 1:
            new = free.copy()
        else:
            src = np.stack([_nonlinear_hat(row, spec, C.dealias) for row in current])
            new = free + duhamel(src, spec, C.alpha, h)
        diff = new - current
        res = weighted_norm(_node_norms(diff[1:], spec, P, D), t[1:], C)
        report.residuals.append(res)
        if len(report.residuals) >= 2 and report.residuals[-2] > 0:
            report.contraction_factors.append(res / report.residuals[-2])
        current = new
        report.iterations = it
        if not np.all(np.isfinite(res)):
            break
        if res <= C.tol:
            report.converged = True
            break
    if not report.converged and raise_on_failure:
        raise PicardDivergence(
            f"Picard iteration did not reach {C.tol:g} in {report.iterations} iterations; T may be too large for contraction",
            report,
        )
    return _to_trajectory(current, spec, C, u0), report


def _stack_hat(tr: Trajectory) -> np.ndarray:
    if tr.initial is None:
        raise ValueError("the trajectory needs its t = 0 value")
    return np.stack([np.fft.fftn(tr.initial.values)] + [np.fft.fftn(f.values) for f in tr.fields])


def apply_operator(tr: Trajectory, u0: SpatialField, C: SolverConfig) -> Trajectory:
    """``T_{u0} u`` on the trajectory's own grid (uniform, ``t_i = i h``)."""
    spec = tr.spec
    stack = _stack_hat(tr)
    t = np.concatenate([[0.0], tr.times])
    h = t[1]
    if not np.allclose(np.diff(t), h, rtol=1e-9, atol=0):
        raise ValueError("the operator needs a uniform time grid starting at 0")
    r2a = symbol_power(spec, 2.0 * C.alpha)
    free = np.exp(-t.reshape((-1,) + (1,) * spec.n) * r2a[None]) * np.fft.fftn(u0.values.real)[None]
    src = np.stack([_nonlinear_hat(row, spec, C.dealias) for row in stack])
    out = free + duhamel(src, spec, C.alpha, h)
    return _to_trajectory(out, spec, replace(C, T=t[-1], M=len(t) - 1), u0)


def contraction_estimate(u: Trajectory, v: Trajectory, C: SolverConfig) -> dict:
    """``||T u - T v|| / (||u + v|| ||u - v||)`` in the weighted norm.

    The data term cancels in ``T u - T v``, so no initial datum is needed.
    """
    spec = u.spec
    if v.spec != spec or not np.array_equal(u.times, v.times):
        raise ValueError("trajectories must share grid and times")
    C = C if C.a is not None and C.v is not None and C.d is not None else C.resolve(spec.n)
    P = C.space
    D = dyadic_system(spec)
    su, sv = _stack_hat(u), _stack_hat(v)
    t = np.concatenate([[0.0], u.times])
    h = t[1]
    diff_norm = weighted_norm(_node_norms((su - sv)[1:], spec, P, D), t[1:], C, t[-1])
    if diff_norm <= 1e-300:
        raise ValueError("u and v coincide; the contraction factor is undefined")
    sum_norm = weighted_norm(_node_norms((su + sv)[1:], spec, P, D), t[1:], C, t[-1])
    src = np.stack([_nonlinear_hat(a, spec, C.dealias) - _nonlinear_hat(b, spec, C.dealias) for a, b in zip(su, sv)])
    image = duhamel(src, spec, C.alpha, h)
    num = weighted_norm(_node_norms(image[1:], spec, P, D), t[1:], C, t[-1])
    inv_v = 0.0 if math.isinf(C.v) else 1.0 / C.v
    kappa = (2 * C.alpha - inv_v - C.d - C.a) * C.v if not math.isinf(C.v) else math.inf
    power = kappa / (2 * C.alpha * C.v) if not math.isinf(C.v) else (2 * C.alpha - C.d - C.a) / (2 * C.alpha)
    return {
        "factor": num / (sum_norm * diff_norm),
        "numerator": num,
        "sum_norm": sum_norm,
        "diff_norm": diff_norm,
        "T": float(t[-1]),
        "T_power": power,
        "T_factor": float(t[-1]) ** power,
    }


def solve(u0: SpatialField, C: SolverConfig):
    """Run the configured mode; returns ``(Trajectory, PicardReport | None)``."""
    if C.mode == "march":
        return march(u0, C), None
    return picard_iterate(u0, C)


@dataclass
class StabilityReport:
    times: np.ndarray
    differences: np.ndarray
    initial_difference: float
    bound_data_coeff: float
    bound_time_coeff: float
    bound_exponent: float
    measured_exponent: float

    @property
    def sup_difference(self) -> float:
        return float(np.max(self.differences))

    def rows(self):
        return [{"t": float(t), "difference": float(d)} for t, d in zip(self.times, self.differences)]


def stability_experiment(u0a: SpatialField, u0b: SpatialField, C: SolverConfig) -> StabilityReport:
    """Per-node ``||u_1(t) - u_2(t) | A^{s0}_{p,q}||`` and the fitted bound ``c1 ||u0a - u0b|| + c2 t^e``.

    ``e = 1 - d / 2 alpha - a / alpha``. ``measured_exponent`` is the log-log
    slope, between ``T/2`` and ``T``, of the difference minus its free
    (linear) part.
    """
    spec = u0a.spec
    C = C.resolve(spec.n) if (C.a is None or C.v is None or C.d is None) else C
    tr1, _ = solve(u0a, C)
    tr2, _ = solve(u0b, C)
    P0 = SpaceParams(C.A, C.initial_s, C.p, C.q)
    D = dyadic_system(spec)
    diffs = np.array([space_norm(f - g, P0, D) for f, g in zip(tr1.fields, tr2.fields)])
    delta0 = u0a - u0b
    init = space_norm(delta0, P0, D)
    expo = 1 - C.d / (2 * C.alpha) - C.a / C.alpha
    t = tr1.times
    A = np.column_stack([np.full(len(t), init), t**expo])
    (c1, c2), _ = nnls(A, diffs)
    r2a = symbol_power(spec, 2.0 * C.alpha)
    dh = np.fft.fftn(delta0.values)
    free = np.array([space_norm(SpatialField(spec, np.fft.ifftn(np.exp(-ti * r2a) * dh)), P0, D) for ti in t])
    second = np.abs(diffs - free)
    i_half = int(np.argmin(np.abs(t - t[-1] / 2)))
    if second[i_half] > 0 and second[-1] > 0:
        measured = math.log(second[-1] / second[i_half]) / math.log(t[-1] / t[i_half])
    else:
        measured = math.nan
    return StabilityReport(t, diffs, init, float(c1), float(c2), expo, measured)


@dataclass
class TraceReport:
    ms: np.ndarray
    times: np.ndarray
    values: np.ndarray
    threshold: float

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) < 0))

    @property
    def below_threshold(self) -> bool:
        return bool(self.values[-1] < self.threshold)

    @property
    def slope(self) -> float:
        """Least-squares slope of ``log value`` against ``log t``."""
        keep = self.values > 0
        if np.count_nonzero(keep) < 2:
            return math.nan
        return float(np.polyfit(np.log(self.times[keep]), np.log(self.values[keep]), 1)[0])

    def rows(self):
        return [{"m": int(m), "t": float(t), "value": float(v)} for m, t, v in zip(self.ms, self.times, self.values)]


def initial_trace_check(
    tr: Trajectory,
    u0: SpatialField,
    P: SpaceParams,
    levels: int = 8,
    threshold: float | None = None,
    tol: float = 1e-10,
) -> TraceReport:
    """``||u(t) - u0 | A^{s0}_{p,q}||`` at ``t = T 2^{-m}``, ``m = 1..levels``.

    The nodes must be on the trajectory grid. ``threshold`` defaults to
    ten times ``tol``.
    """
    if math.isinf(max(P.p, P.q)):
        raise ValueError("trace convergence needs max(p, q) < inf")
    D = dyadic_system(tr.spec)
    T = tr.times[-1]
    ms = np.arange(1, levels + 1)
    times = T * 2.0 ** (-ms)
    vals = []
    for ti in times:
        i = int(np.argmin(np.abs(tr.times - ti)))
        if abs(tr.times[i] - ti) > 1e-9 * T:
            raise ValueError(f"t = {ti} is not a node of the trajectory")
        vals.append(space_norm(tr.fields[i] - u0, P, D))
    return TraceReport(ms, times, np.array(vals), 10 * tol if threshold is None else threshold)
