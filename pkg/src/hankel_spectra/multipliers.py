"""Entrywise (Schur-Hadamard) truncation families and their N-scalings.

Each family is a bounded function tau on [0, inf)^2; the N-th truncation of a
matrix A multiplies entry (j, k) by tau(j/N, k/N).  Built-ins:

    square            1 on the half-open unit square [0,1)^2
    abel_poisson      exp(-(x+y))
    dirichlet         1 on {x+y < 1}        (main triangle projection)
    fejer             (1-(x+y)) on {x+y < 1}
    oblique(b, g)     1 on {(x,y) in [0,1]^2 : x <= -b*y + g}

All built-ins take values in [0, 1].  Square, abel_poisson, dirichlet and
fejer depend on j+k only, so they preserve Hankel structure; oblique with
b != 1 does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

ANTIDIAGONAL_KINDS = ("abel_poisson", "dirichlet", "fejer")
SUPPORTED_KINDS = ("square", "abel_poisson", "dirichlet", "fejer", "oblique", "custom")


class MultiplierError(ValueError):
    """Invalid multiplier parameters or an unsupported request."""


@dataclass(frozen=True)
class MultiplierSpec:
    kind: str
    beta: float = 0.0
    gamma: float = 0.0
    rule: Callable[[float, float], complex] | None = None
    custom_hermitian: bool = False
    # for custom rules: x,y beyond which the rule vanishes (enables sizing)
    support_bound: float | None = None

    def __post_init__(self):
        if self.kind not in SUPPORTED_KINDS:
            raise MultiplierError(f"unknown multiplier kind {self.kind!r}")
        if self.kind == "custom" and self.rule is None:
            raise MultiplierError("custom multiplier needs a rule")

    @property
    def hermitian(self) -> bool:
        """True iff tau(x,y) = conj(tau(y,x)) is guaranteed by the family."""
        if self.kind in ("square", "abel_poisson", "dirichlet", "fejer"):
            return True
        if self.kind == "oblique":
            return self.beta == 1.0
        return self.custom_hermitian

    @property
    def antidiagonal(self) -> bool:
        """True iff tau(j/N, k/N) depends on j+k only."""
        return self.kind in ANTIDIAGONAL_KINDS

    @property
    def label(self) -> str:
        if self.kind == "oblique":
            return f"oblique(beta={self.beta:g},gamma={self.gamma:g})"
        return self.kind


def square() -> MultiplierSpec:
    return MultiplierSpec("square")


def abel_poisson() -> MultiplierSpec:
    return MultiplierSpec("abel_poisson")


def dirichlet_triangle() -> MultiplierSpec:
    return MultiplierSpec("dirichlet")


def fejer() -> MultiplierSpec:
    return MultiplierSpec("fejer")


def oblique(beta: float, gamma: float) -> MultiplierSpec:
    return MultiplierSpec("oblique", beta=float(beta), gamma=float(gamma))


def custom(rule: Callable[[float, float], complex], hermitian: bool = False,
           support_bound: float | None = None) -> MultiplierSpec:
    return MultiplierSpec("custom", rule=rule, custom_hermitian=hermitian,
                          support_bound=support_bound)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(mult: MultiplierSpec, x: float, y: float) -> complex:
    """tau(x, y) for x, y >= 0."""
    if x < 0 or y < 0:
        raise MultiplierError("evaluate requires x, y >= 0")
    if mult.kind == "square":
        return 1.0 if (x < 1.0 and y < 1.0) else 0.0
    if mult.kind == "abel_poisson":
        return math.exp(-(x + y))
    if mult.kind == "dirichlet":
        return 1.0 if x + y < 1.0 else 0.0
    if mult.kind == "fejer":
        s = x + y
        return (1.0 - s) if s < 1.0 else 0.0
    if mult.kind == "oblique":
        inside = x <= 1.0 and y <= 1.0 and x <= -mult.beta * y + mult.gamma
        return 1.0 if inside else 0.0
    return mult.rule(x, y)


def scaled_value(mult: MultiplierSpec, N: int, j: int, k: int) -> complex:
    """tau_N(j, k) = tau(j/N, k/N)."""
    if N < 1:
        raise MultiplierError("scaled_value requires N >= 1")
    return evaluate(mult, j / N, k / N)


def antidiagonal_profile(mult: MultiplierSpec, N: int, smax: int) -> np.ndarray:
    """tau_N along antidiagonals s = j+k = 0..smax-1, for j+k-only families.

    For abel_poisson the damping is computed as r**s with r = exp(-1/N), so
    that Poisson sections built from r and N-scaled sections are bit-identical.
    """
    s = np.arange(smax, dtype=float)
    if mult.kind == "abel_poisson":
        r = math.exp(-1.0 / N)
        return np.power(r, s)
    if mult.kind == "dirichlet":
        return (s < N).astype(float)
    if mult.kind == "fejer":
        return np.where(s < N, 1.0 - s / N, 0.0)
    raise MultiplierError(f"{mult.kind} is not an antidiagonal family")


# ---------------------------------------------------------------------------
# Sizing
# ---------------------------------------------------------------------------

def effective_dimension(mult: MultiplierSpec, N: int, tol: float) -> int:
    """Finite realization size for the N-th truncation.

    Compactly supported families return their exact row/column support bound
    (square/dirichlet/fejer: N; oblique: from the region geometry).  For
    abel_poisson the dimension is ceil(N*(ln N + ln 1/tol)), beyond which the
    discarded wedge of any Hankel matrix with O(1/(j+k+1)) entries has
    Frobenius mass far below tol.
    """
    if N < 1:
        raise MultiplierError("effective_dimension requires N >= 1")
    if not 0.0 < tol < 1.0:
        raise MultiplierError("effective_dimension requires tol in (0, 1)")
    if mult.kind in ("square", "dirichlet", "fejer"):
        return N
    if mult.kind == "abel_poisson":
        return math.ceil(N * (math.log(N) + math.log(1.0 / tol)))
    if mult.kind == "oblique":
        b, g = mult.beta, mult.gamma
        # row support: x <= min(1, max_{admissible y} (-b*y + g));
        # column support: exists x >= 0 with x <= -b*y + g, i.e. b*y <= g.
        max_x = min(1.0, g) if b >= 0 else min(1.0, g - b)
        if b > 0:
            max_y = min(1.0, g / b)
        else:
            max_y = 1.0
        if max_x < 0 or max_y < 0:
            return 1  # empty region: 1x1 zero section keeps the op total
        return max(math.floor(N * max_x), math.floor(N * max_y)) + 1
    if mult.support_bound is not None:
        return math.ceil(N * mult.support_bound) + 1
    raise MultiplierError(
        "effective_dimension for a custom rule needs a declared support_bound"
    )


def discarded_tail_mass(mult: MultiplierSpec, N: int, dim: int,
                        coeff_bound: np.ndarray | None = None) -> float:
    """Frobenius mass of the wedge j+k >= dim under the coefficient bound
    |a(s)| <= 1/(pi*(s+1)) (or a caller-supplied bound array).

    Exact zero for compactly supported families once dim covers the support.
    For abel_poisson the geometric sum is accumulated until it is exhausted.
    """
    if mult.kind in ("square", "dirichlet", "fejer"):
        return 0.0 if dim >= N else math.inf
    if mult.kind == "oblique":
        return 0.0 if dim >= effective_dimension(mult, N, 0.5) else math.inf
    if mult.kind != "abel_poisson":
        if mult.support_bound is not None and dim >= N * mult.support_bound:
            return 0.0
        raise MultiplierError("tail mass undefined for this multiplier")
    r = math.exp(-1.0 / N)
    total = 0.0
    s = dim
    block = 65536
    while True:
        ss = np.arange(s, s + block, dtype=float)
        if coeff_bound is not None and s + block <= coeff_bound.size:
            bound = coeff_bound[s:s + block]
        else:
            bound = 1.0 / (math.pi * (ss + 1.0))
        term = (ss + 1.0) * np.power(r, 2.0 * ss) * bound * bound
        chunk = float(term.sum())
        total += chunk
        s += block
        if chunk < 1e-300 or r ** (2 * s) < 1e-320:
            break
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# Assumption checks (best effort: a pass is evidence, not proof)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssumptionReport:
    tau00_ok: bool
    near_origin_ok: bool          # |tau - 1| <= |log(x+y)|^-beta on (0, eps]^2
    decay_ok: bool                # |tau| <= log(x+y+2)^-alpha on the far grid
    c_beta: float                 # smallest admissible constant, clause (B)
    c_alpha: float                # smallest admissible constant, clause (C)
    worst_near: tuple[float, float]
    worst_far: tuple[float, float]

    @property
    def passed(self) -> bool:
        return self.tau00_ok and self.near_origin_ok and self.decay_ok


def validate_assumptions(mult: MultiplierSpec, eps: float = 0.1,
                         beta: float = 1.0, alpha: float = 1.0,
                         grid_size: int = 64) -> AssumptionReport:
    """Numerically probe the two regularity assumptions used by the density
    theorems: tau(0,0) = 1 with |tau-1| <= C|log(x+y)|^-beta near the origin,
    and |tau| <= C log(x+y+2)^-alpha globally.

    A clause passes when the bound holds with C = 1 on the probe grid (the
    smallest admissible constants are reported either way).  Finite sampling
    cannot certify an asymptotic statement; treat a pass as evidence only.
    """
    if eps <= 0 or beta <= 0.5 or alpha <= 0.5 or grid_size < 16:
        raise MultiplierError(
            "validate_assumptions needs eps > 0, beta > 1/2, alpha > 1/2, "
            "grid_size >= 16"
        )

    tau00_ok = abs(evaluate(mult, 0.0, 0.0) - 1.0) <= 1e-12

    # clause (B): geometric grid on (0, eps]^2
    xs = eps * np.power(10.0, -4.0 * np.arange(grid_size)[::-1] / (grid_size - 1))
    c_beta = 0.0
    worst_near = (0.0, 0.0)
    for x in xs:
        for y in xs:
            s = x + y
            if s >= 1.0:
                continue
            weight = abs(math.log(s)) ** beta
            val = abs(evaluate(mult, float(x), float(y)) - 1.0) * weight
            if val > c_beta:
                c_beta = val
                worst_near = (float(x), float(y))

    # clause (C): geometric grid out to x+y = 1e6
    xs = np.concatenate([
        np.linspace(0.0, 2.0, grid_size),
        np.power(10.0, np.linspace(0.33, 6.0, grid_size)) / 2.0,
    ])
    c_alpha = 0.0
    worst_far = (0.0, 0.0)
    for x in xs:
        for y in xs:
            weight = math.log(x + y + 2.0) ** alpha
            val = abs(evaluate(mult, float(x), float(y))) * weight
            if val > c_alpha:
                c_alpha = val
                worst_far = (float(x), float(y))

    return AssumptionReport(
        tau00_ok=tau00_ok,
        near_origin_ok=c_beta <= 1.0,
        decay_ok=c_alpha <= 1.0,
        c_beta=c_beta,
        c_alpha=c_alpha,
        worst_near=worst_near,
        worst_far=worst_far,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_KIND_ALIASES = {
    "square": "square",
    "abel_poisson": "abel_poisson",
    "dirichlet": "dirichlet",
    "fejer": "fejer",
    "oblique": "oblique",
}


def multiplier_to_json(mult: MultiplierSpec) -> dict:
    if mult.kind == "custom":
        raise MultiplierError("custom multipliers are not serializable")
    out: dict = {"kind": mult.kind}
    if mult.kind == "oblique":
        out["beta"] = mult.beta
        out["gamma"] = mult.gamma
    return out


def multiplier_from_json(data: Mapping) -> MultiplierSpec:
    kind = _KIND_ALIASES.get(str(data.get("kind", "")).lower())
    if kind is None:
        raise MultiplierError(f"unknown multiplier kind {data.get('kind')!r}")
    if kind == "oblique":
        return oblique(float(data["beta"]), float(data["gamma"]))
    return MultiplierSpec(kind)
