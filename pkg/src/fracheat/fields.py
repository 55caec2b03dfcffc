"""Field descriptors and the reproducible random test ensemble.

A descriptor is a small arithmetic expression over the coordinates, parsed
with :mod:`ast` and evaluated against a whitelist (grammar in
``docs/field_grammar.md``)::

    0.1*sin(x)
    exp(-(x**2 + y**2)) + 0.2*cos(2*y)
    gauss(0.5, 1.0) - random(7, 6)
"""

from __future__ import annotations

import ast
import operator

import numpy as np

from .grid import GridSpec, SpatialField

__all__ = ["parse_field", "random_bandlimited", "random_power_law", "ensemble", "FieldSyntaxError"]


class FieldSyntaxError(ValueError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_COORDS = ("x", "y", "z")


def random_bandlimited(
    spec: GridSpec,
    seed: int,
    kmax: int,
    slope: float | None = None,
) -> np.ndarray:
    """Real random field with Fourier modes ``|k|_inf <= kmax`` and amplitude ``(1+|k|^2)^{slope/2}``.

    The coefficients depend only on ``(n, seed, kmax, slope)``, not on ``N``,
    so two grids with the same ``L`` sample the same continuous function.
    The default slope is ``-(n/2 + 1)``; the coefficient vector is scaled to
    unit Euclidean norm.
    """
    n = spec.n
    if slope is None:
        slope = -(n / 2 + 1)
    if not 1 <= kmax < spec.N // 3:
        raise ValueError(f"kmax must lie in [1, N/3), got {kmax} for N={spec.N}")
    rng = np.random.default_rng(seed)
    side = 2 * kmax + 1
    coef = rng.normal(size=(side,) * n) + 1j * rng.normal(size=(side,) * n)
    ks = np.meshgrid(*([np.arange(-kmax, kmax + 1)] * n), indexing="ij")
    ksq = sum(k * k for k in ks)
    coef = coef * (1.0 + ksq) ** (slope / 2)
    coef[(kmax,) * n] = 0.0
    coef /= np.sqrt(np.sum(np.abs(coef) ** 2))
    full = np.zeros(spec.shape, dtype=complex)
    idx = np.ix_(*([np.arange(-kmax, kmax + 1) % spec.N] * n))
    full[idx] = coef
    # f(x) = Re sum_k c_k e^{i 2 pi k (x + L/2) / L}
    vals = np.fft.ifftn(full) * spec.N**n
    return vals.real


def random_power_law(spec: GridSpec, exponent: float, seed: int, band: float = 2.0 / 3.0) -> np.ndarray:
    """Real random-phase field with ``|f^(xi)|`` proportional to ``|xi|^exponent``.

    Modes with ``0 < |xi| <= band * xi_max`` are populated; the result is
    scaled to unit maximum.
    """
    rng = np.random.default_rng(seed)
    r = spec.xi_abs
    live = (r > 0) & (r <= band * spec.xi_max)
    amp = np.zeros(spec.shape)
    amp[live] = r[live] ** exponent
    phase = np.exp(2j * np.pi * rng.random(spec.shape))
    vals = np.fft.ifftn(amp * phase).real
    return vals / np.max(np.abs(vals))


def ensemble(spec: GridSpec, size: int = 50, seed: int = 20240601, kmax: int | None = None):
    """The fixed test ensemble: ``size`` real band-limited fields with default slope."""
    if kmax is None:
        kmax = max(1, min(spec.N // 3 - 1, 10))
    return [SpatialField(spec, random_bandlimited(spec, seed + i, kmax)) for i in range(size)]


class _Evaluator:
    def __init__(self, spec: GridSpec):
        self.spec = spec
        coords = spec.coords()
        self.names = {"pi": np.pi, "e": np.e}
        for i, name in enumerate(_COORDS[: spec.n]):
            self.names[name] = coords[i]
        self.r2 = sum(c * c for c in coords)
        self.funcs = {
            "sin": np.sin,
            "cos": np.cos,
            "exp": np.exp,
            "gauss": self._gauss,
            "random": self._random,
        }

    def _gauss(self, width, amplitude=1.0):
        return amplitude * np.exp(-self.r2 / (2.0 * width * width))

    def _random(self, seed, kmax, amplitude=1.0):
        if int(seed) != seed or int(kmax) != kmax:
            raise FieldSyntaxError("random(seed, kmax) needs integer arguments")
        vals = random_bandlimited(self.spec, int(seed), int(kmax))
        return amplitude * vals / np.max(np.abs(vals))

    def eval(self, node):
        if isinstance(node, ast.Expression):
            return self.eval(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id in self.names:
                return self.names[node.id]
            raise FieldSyntaxError(f"unknown name {node.id!r}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](self.eval(node.left), self.eval(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](self.eval(node.operand))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            fn = self.funcs.get(node.func.id)
            if fn is None:
                raise FieldSyntaxError(f"unknown function {node.func.id!r}")
            args = [self.eval(a) for a in node.args]
            try:
                return fn(*args)
            except TypeError as exc:
                raise FieldSyntaxError(f"bad arguments to {node.func.id}: {exc}") from None
        raise FieldSyntaxError(f"unsupported syntax: {ast.dump(node)[:60]}")


def parse_field(text: str, spec: GridSpec) -> SpatialField:
    """Evaluate a field descriptor on the grid."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise FieldSyntaxError(f"cannot parse {text!r}: {exc.msg}") from None
    with np.errstate(divide="raise", over="raise", invalid="raise"):
        try:
            vals = _Evaluator(spec).eval(tree)
        except (FloatingPointError, OverflowError, ZeroDivisionError) as exc:
            raise FieldSyntaxError(f"floating point error evaluating {text!r}: {exc}") from None
    vals = np.broadcast_to(np.asarray(vals, dtype=float), spec.shape).copy()
    return SpatialField(spec, vals)
