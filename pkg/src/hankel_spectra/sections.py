"""Dense finite realizations of truncated Hankel matrices and the Fourier-side
operator windows (Riesz projection, flip, Toeplitz multiplication, sign
operator) that realize the Hankel operator as P+ (omega .) J P+ on L2 of the
circle.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.linalg import hankel as _hankel
from scipy.linalg import toeplitz as _toeplitz

from .multipliers import MultiplierSpec, antidiagonal_profile, effective_dimension
from .symbols import (
    PCSymbol,
    DomainError,
    check_symmetry_condition,
    coeff_array,
    fourier_coeff_ext,
    symbol_id,
)

#: Dense sections larger than this are refused (override with the max_dim
#: argument or the HANKEL_SPECTRA_MAX_DIM environment variable).
DEFAULT_MAX_DIM = 14_000

#: Cap on elements of the rectangular work blocks in window compositions.
MAX_WINDOW_ELEMS = 400_000_000

_REAL_EPS = 1e-15


class SectionResourceError(RuntimeError):
    """Requested dense section exceeds the configured memory cap."""


class SectionAccuracyError(RuntimeError):
    """Window too small for the symbol's coefficient tail."""

    def __init__(self, message: str, bound: float):
        super().__init__(message)
        self.bound = bound


class PreconditionError(ValueError):
    """A stated operation precondition is violated."""


def _max_dim(override: int | None) -> int:
    if override is not None:
        return override
    return int(os.environ.get("HANKEL_SPECTRA_MAX_DIM", DEFAULT_MAX_DIM))


@dataclass(frozen=True)
class SectionMeta:
    symbol: str
    multiplier: str
    N: int
    dim: int
    tol: float
    tail_bound: float
    hermitian: bool


@dataclass(frozen=True)
class FiniteSection:
    entries: np.ndarray
    meta: SectionMeta

    def __post_init__(self):
        self.entries.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _as_real_if_possible(a: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(a):
        scale = float(np.max(np.abs(a))) if a.size else 0.0
        if scale == 0.0 or float(np.max(np.abs(a.imag))) <= _REAL_EPS * scale:
            return np.ascontiguousarray(a.real)
    return a


def _coeff_tail_bound_sq(sym: PCSymbol, s: np.ndarray) -> np.ndarray:
    # beyond the smooth degree only the jump part survives
    return (sym.total_jump_mass / (math.pi * (s + 1.0))) ** 2


def _abel_tail_mass(sym: PCSymbol, r: float, dim: int) -> float:
    """Frobenius mass of the discarded wedge j+k >= dim of {r^(j+k) w(j+k)}."""
    total = 0.0
    s0 = dim
    block = 1 << 16
    while True:
        s = np.arange(s0, s0 + block, dtype=float)
        damp = np.power(r, 2.0 * s)
        if damp[0] < 1e-320:
            break
        total += float(np.sum((s + 1.0) * damp * _coeff_tail_bound_sq(sym, s)))
        if damp[-1] * (s0 + block) < 1e-300:
            break
        s0 += block
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# Hankel sections
# ---------------------------------------------------------------------------

def build_hankel_section(sym: PCSymbol, mult: MultiplierSpec, N: int,
                         tol: float = 1e-8, *, max_dim: int | None = None,
                         sym_id: str | None = None) -> FiniteSection:
    """Dense matrix with entries tau(j/N, k/N) * omega_hat(j+k).

    The dimension is the multiplier's effective dimension at the given tol;
    the Frobenius mass of the discarded wedge is recorded in the metadata.
    """
    if N < 1:
        raise DomainError("build_hankel_section requires N >= 1")
    dim = effective_dimension(mult, N, tol)
    cap = _max_dim(max_dim)
    if dim > cap:
        raise SectionResourceError(
            f"section dimension {dim} exceeds the memory cap {cap} "
            f"(HANKEL_SPECTRA_MAX_DIM)"
        )

    coeffs = coeff_array(sym, 2 * dim - 1)
    if mult.kind == "square":
        h = coeffs
        tail = 0.0
    elif mult.antidiagonal:
        h = antidiagonal_profile(mult, N, 2 * dim - 1) * coeffs
        if mult.kind == "abel_poisson":
            tail = _abel_tail_mass(sym, math.exp(-1.0 / N), dim)
        else:
            tail = 0.0
    else:
        h = coeffs
        tail = 0.0

    h = _as_real_if_possible(h)
    entries = _hankel(h[:dim], h[dim - 1:])

    if not (mult.kind == "square" or mult.antidiagonal):
        x = np.arange(dim, dtype=float) / N
        if mult.kind == "oblique":
            mask = (x[:, None] <= 1.0) & (x[None, :] <= 1.0) & (
                x[:, None] <= -mult.beta * x[None, :] + mult.gamma)
            entries = entries * mask
        else:
            from .multipliers import evaluate
            tau = np.array([[evaluate(mult, xi, xj) for xj in x] for xi in x])
            entries = entries * _as_real_if_possible(tau)

    hermitian = mult.hermitian and check_symmetry_condition(sym).symmetric
    meta = SectionMeta(
        symbol=sym_id or symbol_id(sym), multiplier=mult.label, N=N, dim=dim,
        tol=tol, tail_bound=tail, hermitian=hermitian,
    )
    return FiniteSection(entries=entries, meta=meta)


def build_poisson_section(sym: PCSymbol, r: float, M: int = 0,
                          tol: float = 1e-8, *, max_dim: int | None = None,
                          sym_id: str | None = None) -> FiniteSection:
    """Dense matrix {r^(j+k) omega_hat(j+k)}, the smoothed truncation whose
    r = exp(-1/N) case coincides with the abel_poisson family.

    M = 0 selects the default size ceil(log(1/tol)/(1-r)).
    """
    if not 0.0 < r < 1.0:
        raise DomainError("build_poisson_section requires r in (0, 1)")
    if M == 0:
        M = math.ceil(math.log(1.0 / tol) / (1.0 - r))
    if M < 1:
        raise DomainError("build_poisson_section requires M >= 1")
    cap = _max_dim(max_dim)
    if M > cap:
        raise SectionResourceError(
            f"section dimension {M} exceeds the memory cap {cap} "
            f"(HANKEL_SPECTRA_MAX_DIM)"
        )
    s = np.arange(2 * M - 1, dtype=float)
    h = _as_real_if_possible(np.power(r, s) * coeff_array(sym, 2 * M - 1))
    entries = _hankel(h[:M], h[M - 1:])
    hermitian = check_symmetry_condition(sym).symmetric
    meta = SectionMeta(
        symbol=sym_id or symbol_id(sym), multiplier=f"poisson(r={r:.17g})",
        N=0, dim=M, tol=tol, tail_bound=_abel_tail_mass(sym, r, M),
        hermitian=hermitian,
    )
    return FiniteSection(entries=entries, meta=meta)


# ---------------------------------------------------------------------------
# Fourier-side windows (monomial basis z^n, modes -M .. M-1)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierWindow:
    matrix: np.ndarray
    lo: int
    hi: int
    dropped_modes: tuple[int, ...] = ()

    def __post_init__(self):
        self.matrix.flags.writeable = False


def toeplitz_window(coeffs: Mapping[int, complex] | Callable[[int], complex],
                    M: int) -> FourierWindow:
    """Window of the multiplication operator with the given Fourier data:
    T[a, b] = coeff(m_a - m_b) over modes m = -M .. M-1."""
    if M < 1:
        raise DomainError("toeplitz_window requires M >= 1")
    if isinstance(coeffs, Mapping):
        get = lambda n: coeffs.get(n, 0.0)  # noqa: E731
    else:
        get = coeffs
    col = np.array([get(i) for i in range(2 * M)])
    row = np.array([get(-i) for i in range(2 * M)])
    return FourierWindow(matrix=_toeplitz(col, row), lo=-M, hi=M - 1)


def riesz_projection_window(M: int) -> FourierWindow:
    d = np.zeros(2 * M)
    d[M:] = 1.0
    return FourierWindow(matrix=np.diag(d), lo=-M, hi=M - 1)


def flip_window(M: int) -> FourierWindow:
    """Window of J f(v) = f(conj(v)), i.e. mode n -> -n.  The mode -M has no
    partner inside the window and maps to zero (recorded)."""
    W = 2 * M
    J = np.zeros((W, W))
    for b in range(1, W):  # input mode n = b - M; n = -M has no partner
        J[2 * M - b, b] = 1.0
    return FourierWindow(matrix=J, lo=-M, hi=M - 1, dropped_modes=(-M,))


def sign_symbol_coeff(n: int) -> complex:
    """Fourier coefficients of sign(Im v) on the circle: -2i/(pi*n) for odd n,
    zero for even n (including 0)."""
    if n % 2 == 0:
        return 0.0 + 0.0j
    return -2j / (math.pi * n)


def _poisson_ext_coeffs(sym: PCSymbol, r: float, umax: int) -> dict[int, complex]:
    return {
        u: (r ** abs(u)) * fourier_coeff_ext(sym, u)
        for u in range(-umax, umax + 1)
    }


def hankel_via_projections(sym: PCSymbol, r: float, M: int,
                           margin: int | None = None,
                           tol: float = 1e-6) -> FiniteSection:
    """Hankel section recovered from the operator composition P+ (omega_r .) J P+
    windowed over modes -M .. M-1; returns the nonnegative-mode block.

    The block must agree with build_poisson_section on the interior
    M' = M - margin, within the recorded coefficient-tail bound.
    """
    if not 0.0 < r < 1.0:
        raise DomainError("hankel_via_projections requires r in (0, 1)")
    if M < 4:
        raise DomainError("hankel_via_projections requires M >= 4")
    if margin is None:
        margin = M // 4

    # coefficients the window cannot see start at |u| = 2M; bound their
    # weighted l1 mass: jump part by the geometric tail of r^u/(u-1), smooth
    # part exactly (finite support)
    jm = sym.total_jump_mass
    tail = (2.0 * jm / math.pi) * (r ** (2 * M)) / ((2 * M - 1) * (1.0 - r))
    for n, c in sym.smooth.coeffs.items():
        if abs(n) >= 2 * M:
            tail += (r ** abs(n)) * abs(c)
    if tail > tol:
        raise SectionAccuracyError(
            f"coefficient tail {tail:.3e} beyond the window exceeds tol={tol:g}; "
            f"increase M", bound=tail)

    T = toeplitz_window(_poisson_ext_coeffs(sym, r, 2 * M - 1), M).matrix
    J = flip_window(M).matrix
    comp = T @ J
    comp[:M, :] = 0.0  # left P+: kill output modes < 0
    comp[:, :M] = 0.0  # right P+: kill input modes < 0
    block = np.ascontiguousarray(comp[M:, M:])
    block = _as_real_if_possible(block)
    meta = SectionMeta(
        symbol=symbol_id(sym), multiplier=f"projections(r={r:.17g})", N=0,
        dim=M, tol=tol, tail_bound=tail,
        hermitian=check_symmetry_condition(sym).symmetric,
    )
    return FiniteSection(entries=block, meta=meta)


def anticommutator_window(sym: PCSymbol, r: float, M: int,
                          depth: float = 45.0) -> np.ndarray:
    """Window over modes -M .. M-1 of s H + H s, where s multiplies by
    sign(Im v) and H is the Hankel operator of the Poisson-smoothed symbol.

    Requires the symbol to have no jump at angle 0 or pi.  Inner mode sums are
    carried to l < M + depth/(1-r), where the smoothed coefficients are below
    exp(-depth) of scale; the result is exact to that tail.  Uses the identity
    H s = -(s H)^T (the sign kernel is odd, Hankel data is symmetric), so a
    single rectangular product suffices.
    """
    if not 0.0 < r < 1.0:
        raise DomainError("anticommutator_window requires r in (0, 1)")
    for jp in sym.jumps:
        d0 = min(jp.angle, 2.0 * math.pi - jp.angle)
        dpi = abs(jp.angle - math.pi)
        if d0 < 1e-9 or dpi < 1e-9:
            raise PreconditionError(
                "anticommutator_window requires no jump at angle 0 or pi "
                f"(found one at {jp.angle:.6g})"
            )
    W = 2 * M
    L = M + math.ceil(depth / (1.0 - r))
    if W * L > MAX_WINDOW_ELEMS:
        raise SectionResourceError(
            f"window work block {W}x{L} exceeds {MAX_WINDOW_ELEMS} elements"
        )

    s = np.arange(L + M - 1, dtype=float)
    hvals = _as_real_if_possible(np.power(r, s) * coeff_array(sym, L + M - 1))
    G = _hankel(hvals[:L], hvals[L - 1:])              # G[l, n] = h(l+n), L x M

    m = np.arange(-M, M)                               # output modes
    ell = np.arange(L)
    diff = m[:, None] - ell[None, :]
    with np.errstate(divide="ignore"):
        S = np.where(diff % 2 != 0, 1.0 / np.where(diff == 0, 1, diff), 0.0)
    P = S @ G                                          # W x M

    K = np.zeros((W, W), dtype=complex)
    K[:, M:] = (-2j / math.pi) * P
    K = K - K.T
    return K
