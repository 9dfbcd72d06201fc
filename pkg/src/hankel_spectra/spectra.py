"""Eigen/singular decompositions of sections, counting functions, nuclear
norms, trace moments, and log-density estimation.

Counting uses strict inequality with a guard band: values within the band of
the threshold set a tie flag so callers can re-run at perturbed thresholds.
All decompositions are dense LAPACK calls; Hermitian sections go through the
symmetric eigensolver and reuse |eigenvalues| as singular values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .multipliers import MultiplierSpec
from .sections import FiniteSection, build_hankel_section
from .symbols import (
    PCSymbol,
    DomainError,
    check_symmetry_condition,
    predicted_logdens,
    predicted_logdens_signed,
)

DEFAULT_GUARD = 1e-8
HERMITIAN_ENTRY_TOL = 1e-12
TRACE_POWER_CAP = 8


class SpectraNumericError(RuntimeError):
    """Dense decomposition failed to converge."""


class ModeError(ValueError):
    """Signed counting requested on a summary without eigenvalues."""


@dataclass(frozen=True)
class SpectralSummary:
    singular_values: np.ndarray            # descending, >= 0
    eigenvalues: np.ndarray | None = None  # descending, Hermitian input only
    guard: float = DEFAULT_GUARD

    @property
    def hermitian(self) -> bool:
        return self.eigenvalues is not None


def _is_hermitian(a: np.ndarray) -> bool:
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        return True
    return float(np.max(np.abs(a - a.conj().T))) <= HERMITIAN_ENTRY_TOL * scale


def spectral_summary(section: FiniteSection | np.ndarray,
                     guard: float = DEFAULT_GUARD) -> SpectralSummary:
    """Singular values of a section, plus eigenvalues when it is Hermitian
    (entrywise within 1e-12 relative)."""
    a = section.entries if isinstance(section, FiniteSection) else np.asarray(section)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DomainError("spectral_summary needs a square section of dim >= 1")
    try:
        if _is_hermitian(a):
            sym_part = a if not np.iscomplexobj(a) else a
            eigs = np.linalg.eigvalsh(sym_part)
            eigs = np.sort(eigs)[::-1]
            sv = np.sort(np.abs(eigs))[::-1]
            return SpectralSummary(singular_values=sv, eigenvalues=eigs, guard=guard)
        sv = np.linalg.svd(a, compute_uv=False)
        return SpectralSummary(singular_values=np.sort(sv)[::-1], guard=guard)
    except np.linalg.LinAlgError as exc:
        raise SpectraNumericError(
            f"decomposition failed for a {a.shape[0]}x{a.shape[1]} section: {exc}"
        ) from exc


def count(summary: SpectralSummary, t: float, mode: str = "singular"
          ) -> tuple[int, bool]:
    """Strict count of values above t; the flag records whether any value lies
    within the guard band of the threshold."""
    if t <= 0:
        raise DomainError("count requires t > 0")
    if mode == "singular":
        vals = summary.singular_values
    elif mode in ("plus", "minus"):
        if summary.eigenvalues is None:
            raise ModeError(f"mode {mode!r} needs eigenvalues (Hermitian section)")
        vals = summary.eigenvalues if mode == "plus" else -summary.eigenvalues
    else:
        raise ModeError(f"unknown mode {mode!r}")
    n = int(np.count_nonzero(vals > t))
    tie = bool(np.any(np.abs(vals - t) <= summary.guard))
    return n, tie


def nuclear_norm(section: FiniteSection | np.ndarray) -> float:
    """Sum of singular values (Hermitian input reduces to sum |eigenvalues|)."""
    a = section.entries if isinstance(section, FiniteSection) else np.asarray(section)
    if a.size == 0:
        return 0.0
    if a.ndim != 2:
        raise DomainError("nuclear_norm needs a matrix")
    if a.shape[0] == a.shape[1] and _is_hermitian(a):
        return float(np.sum(np.abs(np.linalg.eigvalsh(a))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def trace_moment(section: FiniteSection | np.ndarray, m: int,
                 cap: int = TRACE_POWER_CAP) -> complex:
    """Tr(A^m).  m = 1, 2 are entrywise sums; Hermitian sections of any m go
    through eigenvalues; otherwise repeated multiplication (m <= cap)."""
    a = section.entries if isinstance(section, FiniteSection) else np.asarray(section)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("trace_moment needs a square section")
    if m < 1:
        raise DomainError("trace_moment requires m >= 1")
    if m > cap:
        raise DomainError(f"trace power m={m} exceeds the cap {cap}")
    if m == 1:
        return complex(np.trace(a))
    if m == 2:
        return complex(np.sum(a * a.T))
    if _is_hermitian(a):
        eigs = np.linalg.eigvalsh(a)
        return complex(np.sum(eigs ** m))
    p = a
    for _ in range(m - 1):
        p = p @ a
    return complex(np.trace(p))


# ---------------------------------------------------------------------------
# Log-density sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    N: int
    n: int
    tie: bool
    n_plus: int | None = None
    n_minus: int | None = None


@dataclass(frozen=True)
class DensityFit:
    t: float
    rows: tuple[SweepRow, ...]
    ratios: tuple[float, ...]
    slope: float
    predicted: float
    predicted_plus: float | None = None
    predicted_minus: float | None = None
    slope_plus: float | None = None
    slope_minus: float | None = None


def ols_slope(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x - x.mean()
    denom = float(np.dot(xm, xm))
    if denom == 0.0:
        return 0.0
    return float(np.dot(xm, y - y.mean()) / denom)


def summaries_over_grid(sym: PCSymbol, mult: MultiplierSpec, N_list,
                        tol: float, *, max_dim: int | None = None,
                        guard: float = DEFAULT_GUARD) -> list[SpectralSummary]:
    """One decomposition per grid point; sections are released eagerly."""
    out = []
    for N in N_list:
        try:
            section = build_hankel_section(sym, mult, int(N), tol,
                                           max_dim=max_dim)
            out.append(spectral_summary(section, guard=guard))
            del section
        except (SpectraNumericError, MemoryError) as exc:
            raise SpectraNumericError(f"at N={N}: {exc}") from exc
    return out


def logdens_sweep(sym: PCSymbol, mult: MultiplierSpec, t_list, N_list,
                  tol: float = 1e-8, *, max_dim: int | None = None,
                  guard: float = DEFAULT_GUARD) -> list[DensityFit]:
    """Counting data n(t; .)/log N over an N-grid, with the least-squares
    slope of n against log N and the closed-form prediction per threshold.

    For a symmetric symbol and a Hermitian multiplier the signed counts and
    signed predictions are included.
    """
    t_list = [float(t) for t in t_list]
    N_list = [int(N) for N in N_list]
    if any(t <= 0 for t in t_list):
        raise DomainError("all thresholds must be positive")
    if len(N_list) < 3:
        raise DomainError("N grid needs at least 3 points")
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise DomainError("N grid must be strictly increasing")

    signed = mult.hermitian and check_symmetry_condition(sym).symmetric
    summaries = summaries_over_grid(sym, mult, N_list, tol, max_dim=max_dim,
                                    guard=guard)
    logs = np.log(np.array(N_list, dtype=float))

    fits = []
    for t in t_list:
        rows = []
        for N, summ in zip(N_list, summaries):
            n, tie = count(summ, t, "singular")
            if signed:
                np_, tie_p = count(summ, t, "plus")
                nm, tie_m = count(summ, t, "minus")
                rows.append(SweepRow(N=N, n=n, tie=tie or tie_p or tie_m,
                                     n_plus=np_, n_minus=nm))
            else:
                rows.append(SweepRow(N=N, n=n, tie=tie))
        ns = np.array([r.n for r in rows], dtype=float)
        fit = DensityFit(
            t=t,
            rows=tuple(rows),
            ratios=tuple(float(v) for v in ns / logs),
            slope=ols_slope(logs, ns),
            predicted=predicted_logdens(sym, t),
            predicted_plus=predicted_logdens_signed(sym, t, +1) if signed else None,
            predicted_minus=predicted_logdens_signed(sym, t, -1) if signed else None,
            slope_plus=ols_slope(logs, np.array([r.n_plus for r in rows], float))
            if signed else None,
            slope_minus=ols_slope(logs, np.array([r.n_minus for r in rows], float))
            if signed else None,
        )
        fits.append(fit)
    return fits


def invariance_gap(sym: PCSymbol, mult_a: MultiplierSpec, mult_b: MultiplierSpec,
                   t: float, N_list, tol: float = 1e-8, *,
                   max_dim: int | None = None) -> list[int]:
    """|n(t; A-section) - n(t; B-section)| per grid point.  The invariance
    principle predicts these stay O(1) while the counts grow like log N."""
    if t <= 0:
        raise DomainError("invariance_gap requires t > 0")
    sa = summaries_over_grid(sym, mult_a, N_list, tol, max_dim=max_dim)
    sb = summaries_over_grid(sym, mult_b, N_list, tol, max_dim=max_dim)
    return [abs(count(x, t)[0] - count(y, t)[0]) for x, y in zip(sa, sb)]


def symmetry_gap(sym: PCSymbol, mult: MultiplierSpec, t: float, N_list,
                 tol: float = 1e-8, *, max_dim: int | None = None) -> list[int]:
    """|n_plus - n_minus| per grid point for a symmetric symbol with no jump
    on the real axis; predicted O(1)."""
    if t <= 0:
        raise DomainError("symmetry_gap requires t > 0")
    report = check_symmetry_condition(sym)
    if not report.symmetric:
        raise DomainError("symmetry_gap needs a symmetric symbol: "
                          + "; ".join(report.violations))
    for jp in sym.jumps:
        d0 = min(jp.angle, 2.0 * math.pi - jp.angle)
        if d0 < 1e-9 or abs(jp.angle - math.pi) < 1e-9:
            raise DomainError(
                "symmetry_gap requires no jump at angle 0 or pi "
                f"(found one at {jp.angle:.6g})")
    if not mult.hermitian:
        raise DomainError("symmetry_gap needs a Hermitian multiplier family")
    gaps = []
    for summ in summaries_over_grid(sym, mult, N_list, tol, max_dim=max_dim):
        gaps.append(abs(count(summ, t, "plus")[0] - count(summ, t, "minus")[0]))
    return gaps


# ---------------------------------------------------------------------------
# Seeded random matrices for the inequality suites
# ---------------------------------------------------------------------------

def random_unit_norm_matrix(rng: np.random.Generator, dim: int,
                            hermitian: bool = False) -> np.ndarray:
    """Gaussian matrix scaled to unit spectral norm (Hermitian on request)."""
    a = rng.standard_normal((dim, dim))
    if hermitian:
        a = (a + a.T) / 2.0
    norm = float(np.linalg.norm(a, 2))
    return a / norm if norm > 0 else a


def schatten_norm(a: np.ndarray, p: float) -> float:
    sv = np.linalg.svd(np.asarray(a), compute_uv=False)
    if math.isinf(p):
        return float(sv[0]) if sv.size else 0.0
    return float(np.sum(sv ** p) ** (1.0 / p))
