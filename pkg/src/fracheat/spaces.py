"""Besov and Triebel-Lizorkin norms on the periodic grid.

Dyadic (Littlewood-Paley) norms, their split equivalents, the thermic norms
built from time derivatives of the fractional Gauss-Weierstrass semigroup,
and weighted Bochner norms of trajectories.

All block norms with ``p = 2`` in the B family (and F with ``q = 2``) are
evaluated in frequency space by Plancherel; everything else goes through
physical-space blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .grid import GridSpec, SpatialField, lp_norm

__all__ = [
    "SpaceParams",
    "DyadicSystem",
    "ThermicParams",
    "Trajectory",
    "DivergentWeight",
    "cutoff",
    "dyadic_system",
    "space_norm",
    "homogeneous_norm",
    "split_norm",
    "thermic_norm",
    "thermic_seminorm",
    "time_weighted_norm",
    "weighted_time_integral",
    "minimal_order",
    "equivalence_constants",
]

INF = math.inf


@dataclass(frozen=True)
class SpaceParams:
    """Label of ``B^s_{p,q}`` or ``F^s_{p,q}``."""

    A: str
    s: float
    p: float
    q: float

    def __post_init__(self):
        if self.A not in ("B", "F"):
            raise ValueError(f"family must be 'B' or 'F', got {self.A!r}")
        for name in ("p", "q"):
            val = getattr(self, name)
            if not 1 <= val <= INF:
                raise ValueError(f"{name} must lie in [1, inf], got {val}")
        if self.A == "F" and math.isinf(self.p):
            raise ValueError("F-spaces with p = inf are not supported")

    def with_s(self, s: float) -> "SpaceParams":
        return SpaceParams(self.A, s, self.p, self.q)


def cutoff(r: np.ndarray) -> np.ndarray:
    """Radial profile equal to 1 on ``|xi| <= 1`` and 0 on ``|xi| >= 3/2``."""
    return _kernels.smooth_transition(r, 1.0, 1.5)


@dataclass
class DyadicSystem:
    """Dyadic resolution of unity sampled on the frequency lattice.

    ``cutoffs[i]`` is the block with index ``indices[i]``. For the
    inhomogeneous kind index 0 is the low-pass cutoff.
    """

    spec: GridSpec
    kind: str
    indices: np.ndarray
    cutoffs: np.ndarray

    @property
    def j_min(self) -> int:
        return int(self.indices[0])

    @property
    def j_max(self) -> int:
        return int(self.indices[-1])


def dyadic_system(spec: GridSpec, kind: str = "inhomogeneous") -> DyadicSystem:
    if kind not in ("inhomogeneous", "homogeneous"):
        raise ValueError(f"kind must be 'inhomogeneous' or 'homogeneous', got {kind!r}")
    r = spec.xi_abs
    j_max = math.ceil(math.log2(spec.xi_max)) + 1
    if kind == "inhomogeneous":
        j_lo = 0
    else:
        j_lo = math.floor(math.log2(spec.xi_min)) - 1
    idx = np.arange(j_lo, j_max + 1)
    # phi_0(2^{-j} xi) for j = j_lo - 1 .. j_max; consecutive differences give the annuli
    levels = [cutoff(r * 2.0 ** (-j)) for j in range(j_lo - 1, j_max + 1)]
    blocks = []
    for i, j in enumerate(idx):
        if kind == "inhomogeneous" and j == 0:
            blocks.append(levels[1])
        else:
            blocks.append(levels[i + 1] - levels[i])
    return DyadicSystem(spec, kind, idx, np.stack(blocks))


def _fast_l2(P: SpaceParams) -> bool:
    return P.p == 2 and (P.A == "B" or P.q == 2)


def _spectral_block_l2(coeffs: np.ndarray, D: DyadicSystem) -> np.ndarray:
    """``||(phi_j f^)^vee||_2`` for every block, via Plancherel on unnormalized FFT coefficients."""
    spec = D.spec
    power = np.abs(coeffs) ** 2
    cell = (spec.L / spec.N) ** spec.n / spec.N**spec.n
    sums = np.tensordot(D.cutoffs**2, power, axes=spec.n)
    return np.sqrt(np.maximum(sums, 0.0) * cell)


def _physical_blocks(coeffs: np.ndarray, D: DyadicSystem) -> np.ndarray:
    axes = tuple(range(1, D.spec.n + 1))
    return np.fft.ifftn(D.cutoffs * coeffs[None], axes=axes)


def _combine(block_norms_or_stack, weights_log2, P: SpaceParams, spec: GridSpec, pointwise: bool):
    """Weighted l^q combination; ``weights_log2`` holds ``j * s`` per block."""
    q = P.q
    if math.isinf(q):
        w = 2.0**weights_log2
    else:
        w = 2.0 ** (weights_log2 * q)
    if not pointwise:
        vals = np.asarray(block_norms_or_stack, dtype=float)[:, None]
        acc = _kernels.weighted_power_sum(vals, w, q)[0]
        return float(acc if math.isinf(q) else acc ** (1.0 / q))
    stack = np.abs(block_norms_or_stack).reshape(len(weights_log2), -1)
    acc = _kernels.weighted_power_sum(stack, w, q)
    if not math.isinf(q):
        acc = acc ** (1.0 / q)
    return lp_norm(acc.reshape(spec.shape), P.p, spec)


def _dyadic_norm(f: SpatialField, P: SpaceParams, D: DyadicSystem) -> float:
    coeffs = np.fft.fftn(f.values)
    wlog = D.indices.astype(float) * P.s
    if _fast_l2(P):
        return _combine(_spectral_block_l2(coeffs, D), wlog, P, D.spec, False)
    blocks = _physical_blocks(coeffs, D)
    if P.A == "B":
        norms = [lp_norm(b, P.p, D.spec) for b in blocks]
        return _combine(norms, wlog, P, D.spec, False)
    return _combine(blocks, wlog, P, D.spec, True)


def space_norm(f: SpatialField, P: SpaceParams, D: DyadicSystem) -> float:
    """Inhomogeneous dyadic norm ``||f | A^s_{p,q}||``."""
    if D.kind != "inhomogeneous":
        raise ValueError("space_norm needs an inhomogeneous dyadic system")
    return _dyadic_norm(f, P, D)


def homogeneous_norm(f: SpatialField, P: SpaceParams, D: DyadicSystem) -> float:
    """Truncated homogeneous dyadic norm; the zero mode is invisible to it."""
    if D.kind != "homogeneous":
        raise ValueError("homogeneous_norm needs a homogeneous dyadic system")
    return _dyadic_norm(f, P, D)


def split_norm(f: SpatialField, P: SpaceParams, D: DyadicSystem, variant: str = "Lp") -> float:
    """``||f||_p + homogeneous`` (variant ``"Lp"``) or ``||(phi_0 f^)^vee||_p + homogeneous`` (``"phi0"``)."""
    if not P.s > 0:
        raise ValueError(f"split norms need s > 0, got {P.s}")
    if variant not in ("Lp", "phi0"):
        raise ValueError(f"variant must be 'Lp' or 'phi0', got {variant!r}")
    if D.kind != "homogeneous":
        raise ValueError("split_norm needs a homogeneous dyadic system")
    return _first_term(f, P.p, variant) + homogeneous_norm(f, P, D)


def _first_term(f: SpatialField, p: float, variant: str) -> float:
    if variant == "Lp":
        return lp_norm(f, p)
    low = np.fft.ifftn(cutoff(f.spec.xi_abs) * np.fft.fftn(f.values))
    return lp_norm(low, p, f.spec)


@dataclass(frozen=True)
class ThermicParams:
    """Order ``k`` and log-spaced time nodes on ``[t_lo, t_hi]``."""

    alpha: float
    k: int
    t_lo: float
    t_hi: float
    nodes: int = 200

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if not 0 < self.t_lo < self.t_hi:
            raise ValueError("need 0 < t_lo < t_hi")
        if self.nodes < 3:
            raise ValueError("need at least 3 time nodes")

    @classmethod
    def for_grid(cls, spec: GridSpec, alpha: float, k: int, nodes: int = 200, margin: float = 1e4):
        """Window ``[xi_max^{-2a} / margin, xi_min^{-2a} * 100]`` resolving every lattice frequency."""
        t_lo = spec.xi_max ** (-2 * alpha) / margin
        t_hi = 100.0 * spec.xi_min ** (-2 * alpha)
        return cls(alpha, int(k), t_lo, t_hi, nodes)

    def times(self) -> np.ndarray:
        return np.geomspace(self.t_lo, self.t_hi, self.nodes)

    def check(self, spec: GridSpec, P: SpaceParams):
        """Raise unless ``k`` and the window are admissible for ``P`` on ``spec``."""
        order = 2 * self.alpha * self.k
        if P.A == "B" and not order > P.s:
            raise ValueError(f"need 2*alpha*k > s, got 2*alpha*k = {order} and s = {P.s}")
        if P.A == "F" and not order > P.s + spec.n:
            raise ValueError(f"need 2*alpha*k > s + n, got 2*alpha*k = {order} and s + n = {P.s + spec.n}")
        if self.t_lo > spec.xi_max ** (-2 * self.alpha) / 100 * (1 + 1e-12):
            raise ValueError("t_lo must be at most xi_max^(-2 alpha) / 100")
        if self.t_hi < 100 * spec.xi_min ** (-2 * self.alpha) * (1 - 1e-12):
            raise ValueError("t_hi must be at least 100 xi_min^(-2 alpha)")


def _derivative_stack(f: SpatialField, T: ThermicParams, physical: bool, chunk: int = 32):
    """Return ``d^k/dt^k W_t f`` for every node, in physical space or as FFT power.

    ``physical=False`` returns ``||d^k W_t f||_2`` per node (Plancherel);
    otherwise an array of shape (nodes, N^n) holding the fields.
    """
    spec = f.spec
    t = T.times()
    r2a = spec.xi_abs ** (2 * T.alpha)
    coeffs = np.fft.fftn(f.values)
    sym = (-1.0) ** T.k * r2a**T.k
    if not physical:
        # collapse to distinct radii: the integrand depends on |xi| only
        power = np.abs(coeffs * sym) ** 2
        radii, inv = np.unique(r2a.ravel(), return_inverse=True)
        shell = np.bincount(inv, weights=power.ravel())
        keep = shell > 0
        radii, shell = radii[keep], shell[keep]
        cell = (spec.L / spec.N) ** spec.n / spec.N**spec.n
        out = np.empty(len(t))
        for i, ti in enumerate(t):
            out[i] = math.sqrt(float(np.sum(shell * np.exp(-2 * ti * radii))) * cell)
        return out
    axes = tuple(range(1, spec.n + 1))
    base = coeffs * sym
    out = np.empty((len(t), spec.N**spec.n))
    for start in range(0, len(t), chunk):
        ts = t[start : start + chunk]
        mult = np.exp(-ts.reshape((-1,) + (1,) * spec.n) * r2a[None])
        vals = np.fft.ifftn(mult * base[None], axes=axes)
        out[start : start + len(ts)] = np.abs(vals).reshape(len(ts), -1)
    return out


def _log_trapezoid_weights(t: np.ndarray, power: float) -> np.ndarray:
    """Weights for ``int_0^inf t^power g(t) dt/t`` from samples of ``g`` on log-spaced ``t``.

    Trapezoid in ``log t`` on the nodes; the part below ``t[0]`` assumes
    ``g`` constant there and is added in closed form.
    """
    h = math.log(t[1] / t[0])
    w = np.full(len(t), h)
    w[0] = w[-1] = 0.5 * h
    w = w * t**power
    w[0] += t[0] ** power / power
    return w


def thermic_seminorm(f: SpatialField, P: SpaceParams, T: ThermicParams) -> float:
    """Second summand of the thermic norm (integral term only)."""
    T.check(f.spec, P)
    gamma = T.k - P.s / (2 * T.alpha)
    t = T.times()
    q = P.q
    if P.A == "B":
        if P.p == 2:
            vals = _derivative_stack(f, T, physical=False)
        else:
            stack = _derivative_stack(f, T, physical=True)
            vals = np.array([lp_norm(row.reshape(f.spec.shape), P.p, f.spec) for row in stack])
        if math.isinf(q):
            return float(np.max(t**gamma * vals))
        w = _log_trapezoid_weights(t, gamma * q)
        return float(_kernels.weighted_power_sum(vals[:, None], w, q)[0] ** (1.0 / q))
    stack = _derivative_stack(f, T, physical=True)
    if math.isinf(q):
        point = _kernels.weighted_power_sum(stack, t**gamma, INF)
    else:
        w = _log_trapezoid_weights(t, gamma * q)
        point = _kernels.weighted_power_sum(stack, w, q) ** (1.0 / q)
    return lp_norm(point.reshape(f.spec.shape), P.p, f.spec)


def thermic_norm(f: SpatialField, P: SpaceParams, T: ThermicParams, first_term: str = "Lp") -> float:
    """Thermic norm ``||f||_p + (int_0^inf t^{(k - s/2a) q} ||d_t^k W_t f||_p^q dt/t)^{1/q}``.

    ``P.A`` selects the B form (L_p inside the time integral) or the F form
    (time integral pointwise, then L_p). ``first_term="phi0"`` replaces
    ``||f||_p`` with the low-frequency block.
    """
    if not P.s > 0:
        raise ValueError(f"thermic norms need s > 0, got {P.s}")
    if first_term not in ("Lp", "phi0"):
        raise ValueError(f"first_term must be 'Lp' or 'phi0', got {first_term!r}")
    return _first_term(f, P.p, first_term) + thermic_seminorm(f, P, T)


@dataclass
class Trajectory:
    spec: GridSpec
    times: np.ndarray
    fields: list = field(default_factory=list)
    initial: SpatialField | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or len(self.times) != len(self.fields):
            raise ValueError("times and fields must have matching length")
        if len(self.times) and (self.times[0] <= 0 or np.any(np.diff(self.times) <= 0)):
            raise ValueError("times must be positive and strictly increasing")
        for f in self.fields:
            if f.spec != self.spec:
                raise ValueError("all fields must share the trajectory grid")
        if self.initial is not None and self.initial.spec != self.spec:
            raise ValueError("the initial field must share the trajectory grid")

    def __len__(self):
        return len(self.times)


class DivergentWeight(ArithmeticError):
    """The time weight ``t^{b v}`` is not integrable at 0."""


def time_weighted_norm(
    tr: Trajectory,
    v: float,
    b: float,
    T: float,
    P: SpaceParams | None = None,
    D: DyadicSystem | None = None,
    norm: Callable[[SpatialField], float] | None = None,
) -> float:
    """``(int_0^T t^{b v} ||f(t) | X||^v dt)^{1/v}``; ``v = inf`` gives the sup of ``t^b ||f(t)||`` over nodes.

    ``X`` is ``A^s_{p,q}`` from ``(P, D)`` or any ``norm`` callable.
    """
    if norm is None:
        if P is None or D is None:
            raise ValueError("pass (P, D) or a norm callable")
        norm = lambda f: space_norm(f, P, D)  # noqa: E731
    if not T <= tr.times[-1] * (1 + 1e-12):
        raise ValueError(f"T = {T} exceeds the trajectory horizon {tr.times[-1]}")
    upto = int(np.searchsorted(tr.times, T * (1 + 1e-12), side="right"))
    count = min(upto + 1, len(tr.times))
    values = [norm(f) for f in tr.fields[:count]]
    return weighted_time_integral(tr.times[:count], values, v, b, T)


def weighted_time_integral(times, values, v: float, b: float, T: float) -> float:
    """``(int_0^T t^{b v} g(t)^v dt)^{1/v}`` from samples ``g(t_i)`` at ``0 < t_1 < ...``.

    Trapezoid on the nodes; the panel from 0 to the first node integrates the
    weight exactly with ``g`` frozen at its first value, and a node grid
    overshooting ``T`` contributes a linearly interpolated partial panel.
    """
    if not 1 <= v <= INF:
        raise ValueError(f"v must lie in [1, inf], got {v}")
    times = np.asarray(times, dtype=float)
    vals = np.asarray(values, dtype=float)
    if len(times) != len(vals) or len(times) == 0:
        raise ValueError("times and values must be nonempty and of equal length")
    if times[0] <= 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be positive and strictly increasing")
    inside = times <= T * (1 + 1e-12)
    t, g_vals = times[inside], vals[inside]
    if len(t) == 0:
        raise ValueError("no node lies in (0, T]")
    if math.isinf(v):
        return float(np.max(t**b * g_vals))
    bv = b * v
    if bv <= -1:
        raise DivergentWeight(f"t^(b v) with b v = {bv} <= -1 is not integrable at 0")
    g = t**bv * g_vals**v
    total = t[0] ** (bv + 1) / (bv + 1) * g_vals[0] ** v
    total += float(np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(t)))
    if T > t[-1] * (1 + 1e-12) and len(t) < len(times):
        # partial last panel, integrand interpolated linearly
        t_next = times[len(t)]
        g_next = t_next**bv * vals[len(t)] ** v
        g_T = g[-1] + (g_next - g[-1]) * (T - t[-1]) / (t_next - t[-1])
        total += 0.5 * (g[-1] + g_T) * (T - t[-1])
    return float(total ** (1.0 / v))


def minimal_order(P: SpaceParams, alpha: float, n: int) -> int:
    """Smallest ``k`` with ``2 alpha k > s`` (B) or ``> s + n`` (F)."""
    need = P.s + (n if P.A == "F" else 0)
    return int(math.floor(need / (2 * alpha))) + 1


def equivalence_constants(fields, P: SpaceParams, alpha: float, k: int | None = None) -> dict:
    """Ratios of the thermic and split norms to the dyadic norm over ``fields``.

    Returns per-field ratios and the smallest ``C`` with every ratio in
    ``[1/C, C]``, for each alternative norm.
    """
    if not fields:
        raise ValueError("empty ensemble")
    spec = fields[0].spec
    if k is None:
        k = minimal_order(P, alpha, spec.n)
    T = ThermicParams.for_grid(spec, alpha, k)
    T.check(spec, P)
    D = dyadic_system(spec)
    H = dyadic_system(spec, "homogeneous")
    thermic, split = [], []
    for f in fields:
        base = space_norm(f, P, D)
        if not base > 0:
            raise ValueError("ensemble member with zero norm")
        thermic.append(thermic_norm(f, P, T) / base)
        split.append(split_norm(f, P, H) / base)
    out = {"k": k}
    for name, r in (("thermic", np.array(thermic)), ("split", np.array(split))):
        out[name] = {"ratios": r, "C": float(max(r.max(), 1.0 / r.min()))}
    return out
