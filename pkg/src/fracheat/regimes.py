"""Exact classification of parameter regimes for local well-posedness.

Every inequality is evaluated on :class:`fractions.Fraction` values, so
boundary cases fail strict inequalities deterministically. Inputs may be
integers, fractions, decimal strings such as ``"1.25"``, fraction strings
such as ``"5/4"`` or ``"inf"`` (for ``p``, ``q``, ``v``). Floats are read
through their shortest decimal representation.

Notation: ``(x)_+ = max(x, 0)``; ``inv_p = 1/p`` and ``inv_v = 1/v``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

__all__ = [
    "to_fraction",
    "inverse",
    "Interval",
    "RegimeInput",
    "SupercriticalVerdict",
    "RegimeResult",
    "Exponents",
    "LpRegimeResult",
    "supercritical_check",
    "solution_space_ranges",
    "exponents",
    "lp_regime",
    "sample_interior",
    "figure_slice",
    "case_tag",
    "DEFAULT_EPS",
]

DEFAULT_EPS = Fraction(1, 1000)
ZERO = Fraction(0)


def to_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal/fraction string or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"expected a finite number, got {x}")
        return Fraction(repr(x))
    if isinstance(x, str):
        text = x.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot read {x!r} as an exact rational") from None
    raise TypeError(f"unsupported number type {type(x).__name__}")


def inverse(x) -> Fraction:
    """``1/x`` exactly, with ``inf`` mapped to 0."""
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo"):
        return ZERO
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return ZERO
    val = to_fraction(x)
    if val <= 0:
        raise ValueError(f"expected a positive number, got {x}")
    return 1 / val


def _pos(x: Fraction) -> Fraction:
    return x if x > 0 else ZERO


@dataclass(frozen=True)
class Interval:
    """Real interval with exact rational endpoints; ``hi=None`` means unbounded above."""

    lo: Fraction
    hi: Fraction | None
    lo_closed: bool = False
    hi_closed: bool = False

    @property
    def empty(self) -> bool:
        if self.hi is None:
            return False
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    def __contains__(self, x) -> bool:
        x = to_fraction(x)
        above = x >= self.lo if self.lo_closed else x > self.lo
        if self.hi is None:
            return above
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lc = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lc = other.lo, other.lo_closed
        else:
            lo, lc = self.lo, self.lo_closed and other.lo_closed
        if self.hi is None:
            hi, hc = other.hi, other.hi_closed
        elif other.hi is None or self.hi < other.hi:
            hi, hc = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hc = other.hi, other.hi_closed
        else:
            hi, hc = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lc, hc)

    def interior_point(self, eps: Fraction = DEFAULT_EPS) -> Fraction:
        """Midpoint, or ``lo + eps`` when unbounded; ``lo`` itself if closed and the interval is a point."""
        if self.empty:
            raise ValueError("empty interval")
        if self.hi is None:
            return self.lo + (0 if self.lo_closed else eps)
        if self.lo == self.hi:
            return self.lo
        return (self.lo + self.hi) / 2

    def sample(self, rng: random.Random, denominator: int = 10**6) -> Fraction:
        """Exact rational drawn from the interior (closed ends included as a lattice point)."""
        if self.empty:
            raise ValueError("empty interval")
        hi = self.hi if self.hi is not None else self.lo + 10
        k = rng.randint(0 if self.lo_closed else 1, denominator - (0 if self.hi_closed else 1))
        return self.lo + (hi - self.lo) * Fraction(k, denominator)

    def to_json(self) -> dict:
        return {
            "lo": _num(self.lo),
            "hi": None if self.hi is None else _num(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
            "text": str(self),
        }

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        hi = "inf" if self.hi is None else _fmt(self.hi)
        return f"{left}{_fmt(self.lo)}, {hi}{right}"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _num(x: Fraction):
    """JSON form: exact string plus float value."""
    return {"exact": _fmt(x), "value": float(x)}


@dataclass(frozen=True)
class RegimeInput:
    n: int
    alpha: Fraction
    inv_p: Fraction
    inv_q: Fraction
    s0: Fraction

    @classmethod
    def make(cls, n, alpha, p, q, s0) -> "RegimeInput":
        if int(n) != n or n < 1:
            raise ValueError(f"n must be a positive integer, got {n}")
        alpha = to_fraction(alpha)
        if not alpha > Fraction(1, 2):
            raise ValueError(f"alpha must exceed 1/2, got {_fmt(alpha)}")
        inv_p, inv_q = inverse(p), inverse(q)
        for name, val in (("p", inv_p), ("q", inv_q)):
            if not 0 <= val <= 1:
                raise ValueError(f"{name} must lie in [1, inf]")
        return cls(int(n), alpha, inv_p, inv_q, to_fraction(s0))

    @property
    def n_over_p(self) -> Fraction:
        return self.n * self.inv_p

    @property
    def outside_hypotheses(self) -> bool:
        """Well-posedness results are stated for n >= 2."""
        return self.n < 2

    def critical_line(self) -> Fraction:
        """``n/p - 2 alpha + 1``."""
        return self.n_over_p - 2 * self.alpha + 1

    def embedding_excess(self) -> Fraction:
        """``(n/p - n/2)_+``."""
        return _pos(self.n_over_p - Fraction(self.n, 2))


def case_tag(n: int, alpha) -> str:
    """Regime label from the alpha breakpoints 1, (n+2)/4 and n/2 + 1."""
    alpha = to_fraction(alpha)
    if alpha <= Fraction(1, 2):
        raise ValueError("alpha must exceed 1/2")
    if alpha <= 1:
        return "R4.1"
    if alpha <= Fraction(n + 2, 4):
        return "R4.2"
    if alpha <= Fraction(n, 2) + 1:
        return "R4.3"
    return "R4.4"


def _breakpoint_flags(n: int, alpha: Fraction) -> list[str]:
    flags = []
    if alpha == 1:
        flags.append("alpha = 1")
    if alpha == Fraction(n + 2, 4):
        flags.append("alpha = (n+2)/4")
    if alpha == Fraction(n, 2) + 1:
        flags.append("alpha = n/2 + 1")
    return flags


@dataclass
class SupercriticalVerdict:
    ok: bool
    margin_critical: Fraction
    margin_embedding: Fraction
    violations: list[str]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "margin_critical": _num(self.margin_critical),
            "margin_embedding": _num(self.margin_embedding),
            "violations": list(self.violations),
        }


def supercritical_check(R: RegimeInput) -> SupercriticalVerdict:
    """``s0 > n/p - 2 alpha + 1`` and ``(n/p - n/2)_+ < s0 + alpha``, with exact margins."""
    crit = R.critical_line()
    emb = R.embedding_excess()
    m1 = R.s0 - crit
    m2 = R.s0 + R.alpha - emb
    violations = []
    if not m1 > 0:
        violations.append(
            f"s0 > n/p - 2*alpha + 1 fails: s0 = {_fmt(R.s0)}, n/p - 2*alpha + 1 = {_fmt(crit)}"
        )
    if not m2 > 0:
        violations.append(
            f"(n/p - n/2)_+ < s0 + alpha fails: (n/p - n/2)_+ = {_fmt(emb)}, s0 + alpha = {_fmt(R.s0 + R.alpha)}"
        )
    return SupercriticalVerdict(not violations, m1, m2, violations)


@dataclass
class Exponents:
    delta: Fraction
    kappa: Fraction
    per_v: bool = False

    @property
    def delta_positive(self) -> bool:
        return self.delta > 0

    @property
    def kappa_positive(self) -> bool:
        return self.kappa > 0

    def to_json(self) -> dict:
        return {
            "delta": _num(self.delta),
            "kappa": _num(self.kappa),
            "delta_positive": self.delta_positive,
            "kappa_positive": self.kappa_positive,
            "per_v": self.per_v,
        }


def exponents(s, s0, a, v, d, alpha) -> Exponents:
    """``delta = (a - s + s0) v + 1`` and ``kappa = (2 alpha - 1/v - d - a) v``.

    For ``v = inf`` the exponents are returned divided by ``v`` (``per_v=True``),
    i.e. ``a - s + s0`` and ``2 alpha - d - a``; their signs decide positivity.
    """
    s, s0, a, d, alpha = map(to_fraction, (s, s0, a, d, alpha))
    inv_v = inverse(v)
    if inv_v == 0:
        return Exponents(a - s + s0, 2 * alpha - d - a, per_v=True)
    vv = 1 / inv_v
    return Exponents((a - s + s0) * vv + 1, (2 * alpha - inv_v - d - a) * vv)


def _s_range(R: RegimeInput) -> Interval:
    width = min(R.alpha, 2 * R.alpha - 1)
    band = Interval(R.s0, R.s0 + width, True, False)
    floor = max(R.embedding_excess(), _pos(R.critical_line()))
    return band.intersect(Interval(floor, None, False, False))


def _inv_v_range(R: RegimeInput, s: Fraction) -> Interval:
    return Interval(ZERO, (2 * R.alpha - 1 - _pos(R.n_over_p - s)) / 2, True, False)


def _a_range(R: RegimeInput, s: Fraction, inv_v: Fraction) -> Interval:
    hi = min(R.alpha, 2 * R.alpha - 1 - _pos(R.n_over_p - s)) - inv_v
    return Interval(s - R.s0 - inv_v, hi, False, False)


def _d_range(R: RegimeInput, s: Fraction, a: Fraction, inv_v: Fraction) -> Interval:
    lo = 1 + _pos(R.n_over_p - s)
    hi = min(2 * R.alpha - a - inv_v, 2 * R.alpha - 2 * inv_v)
    return Interval(lo, hi, False, False)


def _coverage(R: RegimeInput) -> bool:
    """Every s0 above the critical line also satisfies the embedding condition."""
    return R.critical_line() >= R.embedding_excess() - R.alpha


@dataclass
class RegimeResult:
    input: RegimeInput
    admissible: bool
    case: str
    coverage: bool
    supercritical: SupercriticalVerdict
    s_range: Interval | None
    inv_v_range: Interval | None = None
    a_range: Interval | None = None
    d_range: Interval | None = None
    point: dict = field(default_factory=dict)
    exponents: Exponents | None = None
    violations: list[str] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        R = self.input
        return {
            "input": {
                "n": R.n,
                "alpha": _num(R.alpha),
                "inv_p": _num(R.inv_p),
                "inv_q": _num(R.inv_q),
                "s0": _num(R.s0),
            },
            "admissible": self.admissible,
            "case": self.case,
            "coverage": self.coverage,
            "supercritical": self.supercritical.to_json(),
            "s_range": None if self.s_range is None else self.s_range.to_json(),
            "inv_v_range": None if self.inv_v_range is None else self.inv_v_range.to_json(),
            "a_range": None if self.a_range is None else self.a_range.to_json(),
            "d_range": None if self.d_range is None else self.d_range.to_json(),
            "point": {k: _num(v) for k, v in self.point.items()},
            "exponents": None if self.exponents is None else self.exponents.to_json(),
            "violations": list(self.violations),
            "flags": list(self.flags),
        }


def solution_space_ranges(
    R: RegimeInput,
    s=None,
    inv_v=None,
    a=None,
    d=None,
    eps: Fraction = DEFAULT_EPS,
) -> RegimeResult:
    """Admissible solution spaces and proof parameters for the given initial regularity.

    The ranges for ``1/v``, ``a`` and ``d`` depend on the earlier choices; they
    are evaluated at a representative point that uses any of ``s``, ``inv_v``,
    ``a``, ``d`` supplied by the caller and midpoints otherwise (``s`` defaults
    to ``s0`` when admitted, else the lower end plus ``eps``).
    """
    eps = to_fraction(eps)
    case = case_tag(R.n, R.alpha)
    flags = _breakpoint_flags(R.n, R.alpha)
    if R.outside_hypotheses:
        flags.append("n < 2 lies outside the well-posedness hypotheses")
    sc = supercritical_check(R)
    cov = _coverage(R)
    if not sc.ok:
        return RegimeResult(R, False, case, cov, sc, None, violations=list(sc.violations), flags=flags)
    srange = _s_range(R)
    if srange.empty:
        msg = f"empty s-range {srange}: need s0 <= s < s0 + min(alpha, 2*alpha - 1) and s > max((n/p - n/2)_+, (n/p - 2*alpha + 1)_+)"
        return RegimeResult(R, False, case, cov, sc, srange, violations=[msg], flags=flags)
    violations = []
    if s is None:
        s_pt = srange.lo if srange.lo_closed else srange.lo + min(eps, (srange.hi - srange.lo) / 2)
    else:
        s_pt = to_fraction(s)
        if s_pt not in srange:
            violations.append(f"s = {_fmt(s_pt)} outside the admissible range {srange}")
    vrange = _inv_v_range(R, s_pt)
    v_pt = vrange.interior_point(eps) if inv_v is None else to_fraction(inv_v)
    if inv_v is not None and v_pt not in vrange:
        violations.append(f"1/v = {_fmt(v_pt)} outside {vrange}")
    arange = _a_range(R, s_pt, v_pt)
    a_pt = arange.interior_point(eps) if (a is None and not arange.empty) else (to_fraction(a) if a is not None else None)
    if arange.empty:
        violations.append(f"empty a-range {arange}")
    elif a is not None and a_pt not in arange:
        violations.append(f"a = {_fmt(a_pt)} outside {arange}")
    drange = None
    ex = None
    point = {"s": s_pt, "inv_v": v_pt}
    if a_pt is not None:
        point["a"] = a_pt
        drange = _d_range(R, s_pt, a_pt, v_pt)
        if drange.empty:
            violations.append(f"empty d-range {drange}")
        else:
            d_pt = drange.interior_point(eps) if d is None else to_fraction(d)
            if d is not None and d_pt not in drange:
                violations.append(f"d = {_fmt(d_pt)} outside {drange}")
            point["d"] = d_pt
            v_arg = "inf" if v_pt == 0 else 1 / v_pt
            ex = exponents(s_pt, R.s0, a_pt, v_arg, d_pt, R.alpha)
            if not (ex.delta_positive and ex.kappa_positive):
                violations.append("exponents not positive at the chosen point")
    return RegimeResult(
        R,
        not violations,
        case,
        cov,
        sc,
        srange,
        vrange,
        arange,
        drange,
        point,
        ex,
        violations,
        flags,
    )


def sample_interior(R: RegimeInput, count: int, seed: int = 0) -> Iterator[dict]:
    """Exact random points ``(s, 1/v, a, d)`` drawn from the nested ranges."""
    res = solution_space_ranges(R)
    if res.s_range is None or res.s_range.empty or not res.supercritical.ok:
        return
    rng = random.Random(seed)
    produced = 0
    attempts = 0
    while produced < count and attempts < 50 * count:
        attempts += 1
        s = res.s_range.sample(rng)
        vr = _inv_v_range(R, s)
        if vr.empty:
            continue
        inv_v = vr.sample(rng)
        ar = _a_range(R, s, inv_v)
        if ar.empty:
            continue
        a = ar.sample(rng)
        dr = _d_range(R, s, a, inv_v)
        if dr.empty:
            continue
        d = dr.sample(rng)
        produced += 1
        yield {"s": s, "inv_v": inv_v, "a": a, "d": d}


@dataclass
class LpRegimeResult:
    n: int
    alpha: Fraction
    inv_p: Fraction
    case: str
    lam_range: Interval | None
    inv_r_range: Interval | None
    two_over_v_range: Interval | None
    unweighted: bool

    def mu_lower_sup(self, lam) -> Fraction:
        """Lower bound for ``mu`` with the sup-norm embedding: ``lambda + n/p``."""
        return to_fraction(lam) + self.n * self.inv_p

    def mu_lower_r(self, inv_r) -> Fraction:
        """Lower bound for ``mu`` with the L_r embedding: ``n/p - n/r``."""
        return self.n * (self.inv_p - to_fraction(inv_r))

    def two_over_v_range_r(self, inv_r) -> Interval:
        """Range of ``2/v`` for the L_r statement: ``[0, 2 alpha - 1 - n/r)``."""
        return Interval(ZERO, 2 * self.alpha - 1 - self.n * to_fraction(inv_r), True, False)

    def to_json(self) -> dict:
        def iv(x):
            return None if x is None else x.to_json()

        return {
            "n": self.n,
            "alpha": _num(self.alpha),
            "inv_p": _num(self.inv_p),
            "case": self.case,
            "lambda_range": iv(self.lam_range),
            "inv_r_range": iv(self.inv_r_range),
            "two_over_v_range": iv(self.two_over_v_range),
            "mu_lower": {
                "sup_embedding": "mu > lambda + n/p" if self.lam_range is not None else None,
                "r_embedding": "mu > n/p - n/r" if self.inv_r_range is not None else None,
            },
            "unweighted": self.unweighted,
        }


def lp_regime(n: int, alpha, p) -> LpRegimeResult:
    """Cases for initial data in ``A^0_{p,q}`` with ``1 < p < inf``."""
    alpha = to_fraction(alpha)
    inv_p = inverse(p)
    if not 0 < inv_p < 1:
        raise ValueError("p must satisfy 1 < p < inf")
    if not alpha > Fraction(1, 2):
        raise ValueError("alpha must exceed 1/2")
    n_over_p = n * inv_p
    upper = (2 * alpha - 1) / n
    half = Fraction(1, 2)
    unweighted = inv_p < (2 * alpha - 1) / (2 * n) <= half
    two_v = Interval(ZERO, 2 * alpha - 1, True, False)
    if alpha < 1 and inv_p < upper:
        return LpRegimeResult(
            n, alpha, inv_p, "1",
            Interval(ZERO, 2 * alpha - 1 - n_over_p, True, False),
            Interval(ZERO, inv_p, False, False),
            two_v, unweighted,
        )
    if alpha >= 1 and inv_p < alpha / n:
        return LpRegimeResult(
            n, alpha, inv_p, "2",
            Interval(ZERO, alpha - n_over_p, True, False),
            Interval(ZERO, min(inv_p, half), False, False),
            two_v, unweighted,
        )
    if alpha >= 1 and alpha / n <= inv_p < upper:
        return LpRegimeResult(
            n, alpha, inv_p, "3",
            None,
            Interval(inv_p - alpha / n, min(inv_p, half), False, False),
            None, unweighted,
        )
    return LpRegimeResult(n, alpha, inv_p, "none", None, None, None, unweighted)


def figure_slice(n: int, alpha, inv_p_values) -> dict:
    """Region boundaries in the ``(1/p, s)`` plane for fixed ``n`` and ``alpha``.

    For each ``1/p`` returns the lower bound of admitted ``s0``, the lower
    bound of solution smoothness ``s`` and the band width
    ``min(alpha, 2 alpha - 1)``, plus the case tag of ``alpha``.
    """
    alpha = to_fraction(alpha)
    rows = []
    for ip in inv_p_values:
        ip = to_fraction(ip)
        np_ = n * ip
        s0_lo = max(np_ - 2 * alpha + 1, _pos(np_ - Fraction(n, 2)) - alpha)
        s_lo = max(_pos(np_ - Fraction(n, 2)), _pos(np_ - 2 * alpha + 1))
        covered = np_ - 2 * alpha + 1 >= _pos(np_ - Fraction(n, 2)) - alpha
        rows.append({"inv_p": ip, "s0_lower": s0_lo, "s_lower": s_lo, "covered": covered})
    return {
        "case": case_tag(n, alpha),
        "band_width": min(alpha, 2 * alpha - 1),
        "breakpoints": {"one": Fraction(1), "quarter": Fraction(n + 2, 4), "half_plus_one": Fraction(n, 2) + 1},
        "rows": rows,
    }
