"""Piecewise-continuous symbols on the unit circle, stored in canonical form.

A symbol is kept as a finite list of jump discontinuities plus a trigonometric
polynomial remainder:

    omega(v) = sum_z kappa_z * g_z(v) + eta(v),        g_z(v) = -i * g(conj(z) v),

where g is the model symbol with Fourier coefficients 1/(pi*(j+1)) and a single
jump of half-height i at v = 1 (its Hankel matrix is the Hilbert matrix), and
eta has finitely many nonzero Fourier coefficients.  With that normalisation
g_z has half-height exactly 1 at z, so the stored jump list *is* the jump data
of the symbol, and every spectral prediction below is a closed form in it.

Fourier coefficients of the jump part are exact:

    omega_hat(j) = (-i / (pi*(j+1))) * sum_z kappa_z * conj(z)**j + eta_hat(j),  j >= 0.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

TWO_PI = 2.0 * math.pi

# Two jump angles closer than this (mod 2*pi) count as the same point; symbol
# constructors reject such pairs instead of silently merging them.
ANGLE_TOL = 1e-12

# Tolerance for "real" / "purely imaginary" checks in the symmetry report.
REAL_TOL = 1e-12


class SymbolError(ValueError):
    """Invalid symbol data (zero jumps, duplicate angles, bad domain)."""


class DomainError(ValueError):
    """Argument outside an operation's domain (e.g. threshold t <= 0)."""


@dataclass(frozen=True)
class Jump:
    """A jump discontinuity at v = exp(i*angle) with half-height kappa != 0."""

    angle: float
    half_height: complex

    def __post_init__(self):
        a = float(self.angle) % TWO_PI
        object.__setattr__(self, "angle", a)
        object.__setattr__(self, "half_height", complex(self.half_height))
        if abs(self.half_height) == 0.0:
            raise SymbolError("a jump with zero half-height must be omitted")

    @property
    def point(self) -> complex:
        return cmath.exp(1j * self.angle)


@dataclass(frozen=True)
class SmoothPart:
    """Finitely supported Fourier data eta_hat(n), |n| <= degree."""

    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for n, c in dict(self.coeffs).items():
            c = complex(c)
            if c != 0:
                clean[int(n)] = c
        object.__setattr__(self, "coeffs", clean)

    @property
    def degree(self) -> int:
        return max((abs(n) for n in self.coeffs), default=0)

    def coeff(self, n: int) -> complex:
        return self.coeffs.get(int(n), 0.0 + 0.0j)


@dataclass(frozen=True)
class PCSymbol:
    """Canonical jump-plus-smooth representation of a PC symbol."""

    jumps: tuple[Jump, ...] = ()
    smooth: SmoothPart = field(default_factory=SmoothPart)

    def __post_init__(self):
        jumps = tuple(self.jumps)
        object.__setattr__(self, "jumps", jumps)
        angles = [j.angle for j in jumps]
        for i in range(len(angles)):
            for k in range(i + 1, len(angles)):
                d = abs(angles[i] - angles[k]) % TWO_PI
                if min(d, TWO_PI - d) < ANGLE_TOL:
                    raise SymbolError(
                        f"jump angles {angles[i]} and {angles[k]} coincide "
                        f"within {ANGLE_TOL}"
                    )

    def jump_at(self, angle: float) -> complex:
        """Half-height stored at the given angle (0 if no jump there)."""
        a = float(angle) % TWO_PI
        for j in self.jumps:
            d = abs(j.angle - a) % TWO_PI
            if min(d, TWO_PI - d) < ANGLE_TOL:
                return j.half_height
        return 0.0 + 0.0j

    @property
    def total_jump_mass(self) -> float:
        return sum(abs(j.half_height) for j in self.jumps)


# ---------------------------------------------------------------------------
# Fourier coefficients
# ---------------------------------------------------------------------------

def canonical_fourier_coeff(sym: PCSymbol, j: int) -> complex:
    """Exact Fourier coefficient omega_hat(j) of the canonical form, j >= 0.

    The jump part contributes (-i/(pi*(j+1))) * sum_z kappa_z conj(z)^j, whose
    modulus is at most (sum |kappa_z|)/(pi*(j+1)).
    """
    if j < 0:
        raise DomainError("canonical_fourier_coeff requires j >= 0")
    return _jump_coeff(sym, j) + sym.smooth.coeff(j)


def fourier_coeff_ext(sym: PCSymbol, n: int) -> complex:
    """omega_hat(n) for any integer n (used by Fourier-side windows).

    The model symbol g has g_hat(n) = 1/(pi*(n+1)) for every n != -1 and
    g_hat(-1) = 0, so the jump part keeps the same closed form away from
    n = -1 and vanishes there.
    """
    return _jump_coeff(sym, n) + sym.smooth.coeff(n)


def _jump_coeff(sym: PCSymbol, n: int) -> complex:
    if n == -1 or not sym.jumps:
        return 0.0 + 0.0j
    acc = 0.0 + 0.0j
    for jp in sym.jumps:
        acc += jp.half_height * cmath.exp(-1j * n * jp.angle)
    return -1j * acc / (math.pi * (n + 1))


def coeff_array(sym: PCSymbol, count: int) -> np.ndarray:
    """Vectorised omega_hat(0..count-1) as a complex array."""
    if count <= 0:
        return np.zeros(0, dtype=complex)
    n = np.arange(count)
    out = np.zeros(count, dtype=complex)
    for jp in sym.jumps:
        out += (-1j * jp.half_height / math.pi) * np.exp(-1j * n * jp.angle) / (n + 1)
    for idx, c in sym.smooth.coeffs.items():
        if 0 <= idx < count:
            out[idx] += c
    return out


def coeff_bound_array(sym: PCSymbol, count: int) -> np.ndarray:
    """Upper bounds |omega_hat(s)| <= jump mass/(pi*(s+1)) + |eta_hat(s)|."""
    n = np.arange(count)
    out = sym.total_jump_mass / (math.pi * (n + 1))
    for idx, c in sym.smooth.coeffs.items():
        if 0 <= idx < count:
            out[idx] += abs(c)
    return out


# ---------------------------------------------------------------------------
# Symmetry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryReport:
    symmetric: bool
    violations: tuple[str, ...]


def check_symmetry_condition(sym: PCSymbol, probe: int = 64) -> SymmetryReport:
    """Check omega(v) = conj(omega(conj(v))), which makes the Hankel matrix
    self-adjoint.

    Operationally: (a) the jump set is closed under conjugation with
    kappa_conj(z) = -conj(kappa_z); (b) jumps at angles 0 and pi (if present)
    have purely imaginary half-height; (c) omega_hat(j) is real for all
    j <= 2*degree + probe.
    """
    violations: list[str] = []

    for jp in sym.jumps:
        partner_angle = (-jp.angle) % TWO_PI
        partner = sym.jump_at(partner_angle)
        want = -jp.half_height.conjugate()
        if abs(partner - want) > REAL_TOL * max(1.0, abs(want)):
            violations.append(
                f"clause (a): jump at angle {jp.angle:.6g} needs a conjugate "
                f"partner with half-height {want:.6g}, found {partner:.6g}"
            )

    for jp in sym.jumps:
        on_axis = min(jp.angle, TWO_PI - jp.angle) < ANGLE_TOL or \
            abs(jp.angle - math.pi) < ANGLE_TOL
        if on_axis and abs(jp.half_height.real) > REAL_TOL * abs(jp.half_height):
            violations.append(
                f"clause (b): half-height {jp.half_height:.6g} at angle "
                f"{jp.angle:.6g} is not purely imaginary"
            )

    jmax = 2 * sym.smooth.degree + probe
    coeffs = coeff_array(sym, jmax + 1)
    scale = max(1.0, float(np.max(np.abs(coeffs))) if coeffs.size else 1.0)
    bad = np.nonzero(np.abs(coeffs.imag) > REAL_TOL * scale)[0]
    if bad.size:
        j0 = int(bad[0])
        violations.append(
            f"clause (c): omega_hat({j0}) = {coeffs[j0]:.6g} has nonzero "
            f"imaginary part"
        )

    return SymmetryReport(symmetric=not violations, violations=tuple(violations))


# ---------------------------------------------------------------------------
# Spectral-density closed forms
# ---------------------------------------------------------------------------

def hilbert_density(t: float) -> float:
    """Density c(t) = pi^-2 * log((1 + sqrt(1-t^2))/t) on (0,1], 0 for t > 1.

    Strictly decreasing on (0,1], c(1) = 0, and c(t) -> infinity as t -> 0+.
    """
    if t <= 0:
        raise DomainError("hilbert_density requires t > 0")
    if t >= 1.0:
        return 0.0
    return math.log((1.0 + math.sqrt(1.0 - t * t)) / t) / (math.pi ** 2)


def predicted_logdens(sym: PCSymbol, t: float) -> float:
    """Predicted limit of n(t; truncation)/log N: sum_z c(t/|kappa_z|)."""
    if t <= 0:
        raise DomainError("predicted_logdens requires t > 0")
    total = 0.0
    for jp in sym.jumps:
        ratio = t / abs(jp.half_height)
        if ratio < 1.0:
            total += hilbert_density(ratio)
    return total


def predicted_logdens_signed(sym: PCSymbol, t: float, sign: int) -> float:
    """Predicted limit of n_pm(t; truncation)/log N for a symmetric symbol.

    Jumps in the open upper half-circle each contribute c(t/|kappa_z|) to both
    signs; jumps at +1 / -1 contribute only to the sign of -i*kappa.
    """
    if t <= 0:
        raise DomainError("predicted_logdens_signed requires t > 0")
    if sign not in (+1, -1):
        raise DomainError("sign must be +1 or -1")
    report = check_symmetry_condition(sym)
    if not report.symmetric:
        raise DomainError(
            "predicted_logdens_signed needs a symmetric symbol; "
            + "; ".join(report.violations)
        )
    total = 0.0
    for jp in sym.jumps:
        if ANGLE_TOL < jp.angle < math.pi - ANGLE_TOL:
            ratio = t / abs(jp.half_height)
            if ratio < 1.0:
                total += hilbert_density(ratio)
    for axis_angle in (0.0, math.pi):
        kappa = sym.jump_at(axis_angle)
        if kappa == 0:
            continue
        level = (-1j * kappa).real
        if sign * level > 0:
            ratio = t / abs(kappa)
            if ratio < 1.0:
                total += hilbert_density(ratio)
    return total


# ---------------------------------------------------------------------------
# Essential / a.c. spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Band:
    """A line segment [a, b] in the complex plane contributed by jump data."""

    a: complex
    b: complex
    angles: tuple[float, ...]
    degenerate: bool = False

    @property
    def endpoints(self) -> tuple[complex, complex]:
        return (self.a, self.b)


def essential_spectrum_bands(sym: PCSymbol) -> list[Band]:
    """Band decomposition of the essential spectrum of the Hankel matrix.

    Jumps at +-1 give segments [0, -i*kappa]; each conjugate-unordered pair
    {z, conj(z)} off the real axis gives [-i*sqrt(kappa_z*kappa_zbar),
    +i*sqrt(...)] with the principal square root (the segment is symmetric
    under negation, so the branch does not change the set).  An off-axis jump
    without a stored partner uses kappa_zbar = 0, producing the degenerate
    segment {0}, and is flagged.
    """
    bands: list[Band] = []
    seen: set[int] = set()
    ordered = sorted(range(len(sym.jumps)), key=lambda i: sym.jumps[i].angle)
    for idx in ordered:
        if idx in seen:
            continue
        jp = sym.jumps[idx]
        on_axis = min(jp.angle, TWO_PI - jp.angle) < ANGLE_TOL or \
            abs(jp.angle - math.pi) < ANGLE_TOL
        if on_axis:
            seen.add(idx)
            bands.append(Band(0.0 + 0.0j, -1j * jp.half_height, (jp.angle,)))
            continue
        partner_angle = (-jp.angle) % TWO_PI
        partner_idx = None
        for k, other in enumerate(sym.jumps):
            if k in seen or k == idx:
                continue
            d = abs(other.angle - partner_angle) % TWO_PI
            if min(d, TWO_PI - d) < ANGLE_TOL:
                partner_idx = k
                break
        seen.add(idx)
        if partner_idx is None:
            bands.append(Band(0.0 + 0.0j, 0.0 + 0.0j, (jp.angle,), degenerate=True))
            continue
        seen.add(partner_idx)
        other = sym.jumps[partner_idx]
        root = cmath.sqrt(jp.half_height * other.half_height)
        bands.append(Band(-1j * root, 1j * root, (jp.angle, other.angle)))
    return bands


@dataclass(frozen=True)
class ACSpectrumReport:
    """Modulus a.c. spectrum: union [0, max |kappa|] with one band per jump."""

    union: tuple[float, float] | None
    moduli: tuple[float, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.moduli)


def ac_spectrum_modulus(sym: PCSymbol) -> ACSpectrumReport:
    moduli = tuple(sorted((abs(j.half_height) for j in sym.jumps), reverse=True))
    if not moduli:
        return ACSpectrumReport(union=None, moduli=())
    return ACSpectrumReport(union=(0.0, moduli[0]), moduli=moduli)


def dyadic_jump_classes(sym: PCSymbol) -> list[tuple[int, list[Jump]]]:
    """Partition jumps by magnitude: class 0 holds |kappa| >= 1/2, class n >= 1
    holds 2^-(n+1) <= |kappa| < 2^-n.  Exact at powers of two via frexp."""
    classes: dict[int, list[Jump]] = {}
    for jp in sym.jumps:
        _, e = math.frexp(abs(jp.half_height))  # |kappa| in [2^(e-1), 2^e)
        n = max(0, -e)
        classes.setdefault(n, []).append(jp)
    return sorted(classes.items())


# ---------------------------------------------------------------------------
# Built-in symbols
# ---------------------------------------------------------------------------

def hilbert_symbol() -> PCSymbol:
    """The symbol of the Hilbert matrix: single jump i at angle 0, no smooth
    part; omega_hat(j) = 1/(pi*(j+1))."""
    return PCSymbol(jumps=(Jump(0.0, 1j),))


def psi_hat(j) -> np.ndarray:
    """Fourier coefficients 2*sin(pi*j/2)/(pi*j) of the doubled indicator of
    the right half-circle {cos theta > 0}, with value 1 at j = 0."""
    j = np.asarray(j, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = 2.0 * np.sin(math.pi * j / 2.0) / (math.pi * j)
    return np.where(j == 0, 1.0, vals)


#: Bound on the smooth coefficients discarded beyond HALFCIRCLE_DEGREE.
HALFCIRCLE_DEGREE = 10_000
HALFCIRCLE_TAIL_BOUND = 2.0 / (math.pi * HALFCIRCLE_DEGREE * (HALFCIRCLE_DEGREE + 1))


def halfcircle_step_symbol(degree: int = HALFCIRCLE_DEGREE) -> PCSymbol:
    """2 * indicator of the right half-circle: jumps -1 at i and +1 at -i.

    The smooth remainder is chosen so that the canonical coefficients equal
    2*sin(pi*j/2)/(pi*j) exactly (value 1 at j = 0): eta_hat(n) is materialised
    for |n| <= degree and dropped beyond, where |eta_hat(n)| decays like
    2/(pi*n^2) (bound recorded in HALFCIRCLE_TAIL_BOUND for the default
    degree).  Coefficients at even n != 0 vanish identically.
    """
    jumps = (Jump(math.pi / 2.0, -1.0), Jump(3.0 * math.pi / 2.0, 1.0))
    base = PCSymbol(jumps=jumps)
    coeffs: dict[int, complex] = {}
    n_odd = np.arange(1, degree + 1, 2)
    target = psi_hat(n_odd)
    jump_part = np.array([_jump_coeff(base, int(n)) for n in n_odd])
    eta = target - jump_part
    for n, v in zip(n_odd, eta):
        coeffs[int(n)] = complex(v)
    # negative modes: the symbol is real and even in theta, so hat(-n) = hat(n)
    jump_part_neg = np.array([_jump_coeff(base, -int(n)) for n in n_odd])
    eta_neg = target - jump_part_neg
    for n, v in zip(n_odd, eta_neg):
        coeffs[-int(n)] = complex(v)
    coeffs[0] = 1.0 - _jump_coeff(base, 0)  # jump part vanishes at 0; eta_hat(0)=1
    return PCSymbol(jumps=jumps, smooth=SmoothPart(coeffs))


def conjugate_pair_symbol(angle: float, half_height: complex = 1j) -> PCSymbol:
    """Symmetric symbol with jumps kappa at +-angle, kappa_conj = -conj(kappa)."""
    if not ANGLE_TOL < angle % TWO_PI < math.pi - ANGLE_TOL:
        raise SymbolError("conjugate_pair_symbol needs an angle strictly inside (0, pi)")
    kappa = complex(half_height)
    return PCSymbol(jumps=(Jump(angle, kappa), Jump(-angle, -kappa.conjugate())))


def rotated_hilbert_symbol(angle: float) -> PCSymbol:
    """Single jump of half-height 1 at the given angle (g_z in canonical form)."""
    return PCSymbol(jumps=(Jump(angle, 1.0),))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def symbol_to_json(sym: PCSymbol) -> dict:
    ns = sorted(sym.smooth.coeffs)
    return {
        "jumps": [
            {"angle": j.angle, "re": j.half_height.real, "im": j.half_height.imag}
            for j in sym.jumps
        ],
        "smooth": {
            "n": [int(n) for n in ns],
            "re": [sym.smooth.coeffs[n].real for n in ns],
            "im": [sym.smooth.coeffs[n].imag for n in ns],
        },
    }


def symbol_from_json(data: Mapping) -> PCSymbol:
    try:
        jumps = tuple(
            Jump(float(j["angle"]), complex(float(j["re"]), float(j["im"])))
            for j in data.get("jumps", [])
        )
        sm = data.get("smooth", {}) or {}
        ns = sm.get("n", [])
        res = sm.get("re", [])
        ims = sm.get("im", [])
        if not (len(ns) == len(res) == len(ims)):
            raise SymbolError("smooth arrays n/re/im must have equal length")
        coeffs = {int(n): complex(float(r), float(i)) for n, r, i in zip(ns, res, ims)}
    except (KeyError, TypeError, ValueError) as exc:
        raise SymbolError(f"malformed symbol JSON: {exc}") from exc
    return PCSymbol(jumps=jumps, smooth=SmoothPart(coeffs))


def symbol_id(sym: PCSymbol) -> str:
    """Stable short identifier derived from the canonical serialization."""
    payload = json.dumps(symbol_to_json(sym), sort_keys=True).encode()
    return hashlib.blake2s(payload, digest_size=6).hexdigest()
