"""Closed-form oracles for the Hilbert-matrix model operator.

The smoothed Hilbert matrix {r^(j+k)/(pi*(j+k+1))} factors as W*W with
(W x)(s) = pi^(-1/2) * sum_j x_j (r s)^j on L2(0,1), so its nonzero spectrum,
trace moments, and products with rotated copies reduce to Nystrom matrices of
the kernels

    g0(s, u) = 1/(pi * (1 - r^2 s u)),
    gphi(s, u) = 1/(pi * (1 - r^2 s u e^(i phi))),

discretised on a dyadic-panel Gauss-Legendre grid graded toward s = 1 (where
the kernel mass concentrates as r -> 1).  The same moment trick gives an exact
finite-rank factorisation of the smoothed half-circle-step Hankel matrix,
which makes the sign-operator anticommutator computable at r values far beyond
dense reach.  Also here: sech moments, the trace-moment prediction, the
heuristic eigenvalue profile, and the projection/trace-difference inequality
check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .symbols import DomainError

SECH_TOL = 1e-10


class NumericError(RuntimeError):
    """Quadrature or decomposition failure in an oracle."""


def hilbert_entry(j: int, k: int) -> float:
    """Entry 1/(pi*(j+k+1)) of the Hilbert matrix; equals the moment integral
    pi^-1 * int_0^1 s^(j+k) ds."""
    return 1.0 / (math.pi * (j + k + 1))


# ---------------------------------------------------------------------------
# sech moments and trace predictions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SechMoment:
    m: int
    value: float


def _sech_quad(m: int, half_width: float, panels: int) -> float:
    # composite Gauss-Legendre on [-T, T]; integrand is even and analytic
    nodes, weights = np.polynomial.legendre.leggauss(12)
    edges = np.linspace(0.0, half_width, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        x = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        w = 0.5 * (b - a) * weights
        total += float(np.sum(w / np.cosh(math.pi * x) ** m))
    return 2.0 * total


def sech_moment(m: int) -> SechMoment:
    """int_R sech^m(pi*eta) d eta by panel doubling until two refinements
    agree to 1e-10 absolute.  Strictly decreasing in m; value 1 at m = 1."""
    if m < 1:
        raise DomainError("sech_moment requires m >= 1")
    # sech(pi*T)^m < 1e-14  <=>  T > (14*ln10/m + ln 2)/pi
    T = (14.0 * math.log(10.0) / m + math.log(2.0)) / math.pi + 1.0
    panels = 8
    prev = _sech_quad(m, T, panels)
    for _ in range(12):
        panels *= 2
        cur = _sech_quad(m, T, panels)
        if abs(cur - prev) <= SECH_TOL:
            return SechMoment(m=m, value=cur)
        prev = cur
    raise NumericError(f"sech moment m={m} did not stabilise to {SECH_TOL}")


def trace_moment_prediction(m: int, r: float) -> float:
    """Leading term |log(1-r)| * sech_moment(m) / (2 pi r^m) of the m-th trace
    moment of the smoothed Hilbert matrix as r -> 1 (the remainder is
    o(|log(1-r)|), so this is a prediction, not an identity)."""
    if m < 1:
        raise DomainError("trace_moment_prediction requires m >= 1")
    if not 0.0 < r < 1.0:
        raise DomainError("trace_moment_prediction requires r in (0, 1)")
    return abs(math.log(1.0 - r)) * sech_moment(m).value / (2.0 * math.pi * r ** m)


def widom_eigenvalue_profile(k: int, N: int) -> float:
    """Heuristic k-th eigenvalue sech(pi^2 k / log N) of the N-th Hilbert
    section, obtained by inverting k = log(N) * c(lambda).  Diagnostic only;
    the counting law is asymptotic."""
    if k < 1:
        raise DomainError("widom_eigenvalue_profile requires k >= 1")
    if N < 3:
        raise DomainError("widom_eigenvalue_profile requires N >= 3")
    return 1.0 / math.cosh(math.pi ** 2 * k / math.log(N))


# ---------------------------------------------------------------------------
# Graded quadrature and Nystrom kernels
# ---------------------------------------------------------------------------

def graded_quadrature(r: float, nodes_per_panel: int = 16,
                      extra_levels: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on (0,1) on dyadic panels [1-2^-l, 1-2^-l-1]
    refined until the last panel is narrower than (1-r)/2^extra_levels."""
    if not 0.0 < r < 1.0:
        raise DomainError("graded_quadrature requires r in (0, 1)")
    levels = max(4, math.ceil(math.log2(1.0 / (1.0 - r))) + extra_levels)
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes_per_panel)
    edges = [0.0] + [1.0 - 2.0 ** (-l) for l in range(1, levels + 1)] + [1.0]
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (b - a) * gl_x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * gl_w)
    return np.concatenate(xs), np.concatenate(ws)


def _nystrom_kernel(r: float, phase: float | None,
                    quad: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    x, w = quad
    sw = np.sqrt(w)
    outer = np.multiply.outer(x, x) * r * r
    if phase is None:
        kern = 1.0 / (math.pi * (1.0 - outer))
    else:
        kern = 1.0 / (math.pi * (1.0 - outer * np.exp(1j * phase)))
    return kern * np.multiply.outer(sw, sw)


def poisson_hilbert_spectrum(r: float, nodes_per_panel: int = 16) -> np.ndarray:
    """Descending nonzero eigenvalues of the full smoothed Hilbert matrix
    {r^(j+k)/(pi*(j+k+1))}, computed from the L2(0,1) kernel g0."""
    quad = graded_quadrature(r, nodes_per_panel)
    k0 = _nystrom_kernel(r, None, quad)
    eigs = np.linalg.eigvalsh(k0)
    return np.sort(eigs)[::-1]


def poisson_hilbert_trace_moment(r: float, m: int) -> float:
    """Tr of the m-th power of the full smoothed Hilbert matrix (spectral sum;
    exact closed forms exist at m = 1, 2 and are used as agreement tests)."""
    if m < 1:
        raise DomainError("trace moment requires m >= 1")
    eigs = poisson_hilbert_spectrum(r)
    return float(np.sum(np.clip(eigs, 0.0, None) ** m))


def rotated_pair_product_nuclear(r: float, phase: float,
                                 nodes_per_panel: int = 16) -> float:
    """Nuclear norm of Gamma_r(z)^* Gamma_r(w) for two unit-height rotated
    copies of the Hilbert symbol, where phase = angle(z) - angle(w).

    Diagonal unitaries reduce the product to Gamma F Gamma with
    F = diag(e^(ij*phase)), whose singular values are those of
    g0^(1/2) gphi g0^(1/2) on L2(0,1).
    """
    quad = graded_quadrature(r, nodes_per_panel)
    k0 = _nystrom_kernel(r, None, quad)
    kphi = _nystrom_kernel(r, phase, quad)
    lam, vec = np.linalg.eigh(k0)
    lam = np.clip(lam, 0.0, None)
    root = (vec * np.sqrt(lam)) @ vec.T
    x = root @ kphi @ root
    return float(np.sum(np.linalg.svd(x, compute_uv=False)))


# ---------------------------------------------------------------------------
# Sign-operator anticommutator for the half-circle step, at large r
# ---------------------------------------------------------------------------

def halfcircle_anticommutator_nuclear(r: float, M: int | None = None,
                                      depth: float = 25.0,
                                      nodes_per_panel: int = 16) -> float:
    """Nuclear norm of the window (modes -M..M-1) of s H + H s for the
    half-circle step symbol at smoothing r, via an exact low-rank path.

    The smoothed coefficients psi_hat_r(m) = r^m (i^m - (-i)^m)/(i pi m) are
    moments: 1/m = int_0^1 s^(m-1) ds, so the Hankel data factors through the
    complex Vandermonde columns (+-i r x_q)^l over the graded quadrature grid
    (plus a rank-one piece for the m = 0 entry).  The sign-operator Toeplitz
    kernel is applied to the factors by FFT convolution, and the window of
    s H + H s = (SH) - (SH)^T is assembled as Z [[0, I], [-I, 0]] Z^T, whose
    singular values are read off a (small) core after one QR.

    Matches the dense window construction to quadrature accuracy; both use
    inner sums carried depth/(1-r) modes past the window.
    """
    if not 0.0 < r < 1.0:
        raise DomainError("halfcircle_anticommutator_nuclear requires r in (0,1)")
    if M is None:
        M = math.ceil(4.0 / (1.0 - r))
    W = 2 * M
    L = M + math.ceil(depth / (1.0 - r))

    x, w = graded_quadrature(r, nodes_per_panel)
    Q = x.size
    ell = np.arange(L)

    # columns (i r x)^l and (-i r x)^l, scaled by the moment weights w/(i pi x)
    base = np.log(r * x)  # real, negative
    mag = np.exp(np.multiply.outer(ell, base))
    phase = np.exp(1j * (math.pi / 2.0) * ell)
    V1 = mag * phase[:, None]
    V2 = mag * phase.conj()[:, None]
    F = np.concatenate([V1, V2], axis=1)                      # L x 2Q
    scale = np.concatenate([w / x, -w / x]) / (1j * math.pi)
    Fs = F * scale[None, :]

    # sanity: reconstructed coefficients must match r^m psi_hat(m)
    probe = np.array([1, 2, 3, 7, min(L - 1, 101)])
    recon = (Fs[probe, :] * F[np.zeros_like(probe), :]).sum(axis=1)
    from .symbols import psi_hat
    want = np.power(r, probe) * psi_hat(probe)
    if not np.allclose(recon, want, atol=1e-10):
        raise NumericError("quadrature factorisation drifted from the "
                           "half-circle coefficients")

    # sign kernel s(d) = -2i/(pi d) for odd d, on offsets d = m - l
    offs = np.arange(-(L - 1), W - M + M)                     # -(L-1) .. W-1
    offs = np.arange(-(L - 1), W)                             # length W+L-1
    with np.errstate(divide="ignore"):
        ker = np.where(offs % 2 != 0, -2j / (math.pi * np.where(offs == 0, 1, offs)), 0)

    def sign_convolve(cols: np.ndarray) -> np.ndarray:
        # out[m, c] = sum_l ker(m - l) cols[l, c], m = -M .. M-1
        full = fftconvolve(cols, ker[:, None], axes=0)
        return full[L - 1 - M: L - 1 + M, :]

    SF = sign_convolve(Fs)                                    # W x 2Q
    s_e0 = np.where(np.arange(-M, M) % 2 != 0,
                    -2j / (math.pi * np.where(np.arange(-M, M) == 0, 1,
                                              np.arange(-M, M))), 0)

    # P carries the SH column factors, B the plain H column factors embedded
    # into window columns (input modes n >= 0)
    P = np.concatenate([SF, s_e0[:, None]], axis=1)           # W x (2Q+1)
    B = np.zeros((W, 2 * Q + 1), dtype=complex)
    B[M:, :2 * Q] = F[:M, :]
    B[M, 2 * Q] = 1.0
    Z = np.concatenate([P, B], axis=1)                        # W x 2R
    R = P.shape[1]
    _, rz = np.linalg.qr(Z, mode="reduced")
    core = rz[:, :R] @ rz[:, R:].conj().T
    core = core - core.conj().T \
        if False else rz[:, :R] @ rz[:, R:].T - rz[:, R:] @ rz[:, :R].T
    sv = np.linalg.svd(core, compute_uv=False)
    return float(np.sum(sv))


# ---------------------------------------------------------------------------
# Projection trace-difference inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceDifferenceReport:
    lhs: float                     # |Tr phi(PBP) - Tr P phi(B) P|
    bound: float                   # ||phi''|| * ||P B (I-P)||_F^2
    phi_second_derivative_max: float
    holds: bool


def trace_difference_check(B: np.ndarray, P: np.ndarray,
                           phi_coeffs) -> TraceDifferenceReport:
    """Check |Tr phi(PBP) - Tr P phi(B) P| <= max|phi''| * ||PB(I-P)||_F^2
    for Hermitian B, a diagonal 0/1 projection P, and a polynomial phi with
    phi(0) = 0 (so compressions do not pick up spurious constants).

    max|phi''| is taken over [-||B||, ||B||], evaluated exactly via the
    critical points of phi''.
    """
    B = np.asarray(B)
    P = np.asarray(P)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise DomainError("B must be square")
    scale = float(np.max(np.abs(B))) if B.size else 0.0
    if scale > 0 and float(np.max(np.abs(B - B.conj().T))) > 1e-12 * scale:
        raise DomainError("B must be Hermitian")
    diag = np.diag(np.diag(P))
    if not np.array_equal(P, diag) or not np.all(np.isin(np.diag(P), (0, 1))):
        raise DomainError("P must be a diagonal 0/1 projection")

    poly = np.polynomial.Polynomial(np.asarray(phi_coeffs, dtype=float))
    if abs(poly(0.0)) > 1e-14:
        raise DomainError("phi(0) must vanish")

    eigB, vecB = np.linalg.eigh(B)
    radius = float(np.max(np.abs(eigB))) if eigB.size else 0.0

    d2 = poly.deriv(2)
    candidates = [-radius, radius]
    if d2.degree() >= 1:
        crit = d2.deriv(1).roots()
        candidates.extend(float(c.real) for c in crit
                          if abs(c.imag) < 1e-12 and -radius <= c.real <= radius)
    phi2max = max(abs(float(d2(c))) for c in candidates) if candidates else 0.0

    mask = np.diag(P).astype(bool)
    pbp = B[np.ix_(mask, mask)]
    eig_pbp = np.linalg.eigvalsh(pbp) if pbp.size else np.zeros(0)
    tr_phi_pbp = float(np.sum(poly(eig_pbp)))

    phiB_diag = (vecB * poly(eigB)[None, :]) @ vecB.conj().T
    tr_p_phiB = float(np.real(np.trace(phiB_diag[np.ix_(mask, mask)])))

    off = B[np.ix_(mask, ~mask)]
    hs2 = float(np.sum(np.abs(off) ** 2))

    lhs = abs(tr_phi_pbp - tr_p_phiB)
    bound = phi2max * hs2
    return TraceDifferenceReport(
        lhs=lhs, bound=bound, phi_second_derivative_max=phi2max,
        holds=lhs <= bound + 1e-10 * max(1.0, abs(bound)),
    )
