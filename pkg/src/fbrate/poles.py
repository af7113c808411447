"""Pole set, partial-fraction residues, and the closed-form SNR density.

For integer shadowing index m and even integer cluster count mu the MGF is a
rational function of s built from four first-order factors:

    M(s) = (1 + g*s/(O/eta))^e (1 + g*s/O)^e (1 + g*s/c1)^-m (1 + g*s/c2)^-m

with e = m - mu/2.  The pole groups are always {c1: m, c2: m}; when
mu/2 > m the two omega points join them as poles of order mu/2 - m, and when
mu/2 < m they are numerator polynomials folded into the residue derivatives.
Coincident poles (within the root-merge tolerance) are merged by summing
multiplicities, which is what makes the unit-eta and zero-LoS degeneracies
work without special cases.

Residues are computed exactly - no numerical differentiation.  Writing
u = 1 + g*s/theta_i, every other factor becomes affine in u, so the partial
fraction coefficient A_ij is the Taylor coefficient of u**(w_i - j) of an
explicit product of affine powers, obtained by the logarithmic-derivative
recursion for power series.  The g (mean SNR) cancels entirely: A_ij depends
only on pole-location ratios.

The inverse transform of each basis term (1 + g*s/theta)^-j is
(theta/g)^j gamma^{j-1} e^{-theta*gamma/g} / (j-1)!, which fixes the density
normalization; sum_ij A_ij = M(0) = 1 keeps the density integrating to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ClosedFormUnavailableError
from .mgf import log_mgf
from .model import ROOT_MERGE_RTOL, ChannelParams, DerivedParams

#: Reject closed forms whose total pole multiplicity explodes (factorials in
#: the residue recursion and alternating coefficient growth make very high
#: multiplicities useless in double precision anyway).
MAX_TOTAL_MULTIPLICITY = 500

_INT_TOL = 1e-9


@dataclass(frozen=True)
class PoleSet:
    """Merged poles of the MGF plus the numerator factors the residues need.

    ``poles``: tuple of (location, multiplicity); locations have positive
    real part and complex entries come in conjugate pairs (for every valid
    parameter set they are in fact real).  ``group_count`` is the pre-merge
    structural count: 2 when the omega points are not poles, 4 when they are.
    ``numerator``: tuple of (location, positive integer exponent) for
    first-order numerator factors, present only when mu/2 < m.
    """

    poles: tuple[tuple[complex, int], ...]
    group_count: int
    numerator: tuple[tuple[complex, int], ...] = ()


@dataclass(frozen=True)
class PartialFractionExpansion:
    """Coefficient table A_ij of M(s) = sum_i sum_j A_ij (1 + g*s/theta_i)^-j.

    ``terms``: tuple of (theta_i, multiplicity_i, coeffs) with
    coeffs[j-1] = A_ij for j = 1..multiplicity_i.
    """

    terms: tuple[tuple[complex, int, tuple[complex, ...]], ...]


def _as_int(x: float, what: str) -> int:
    n = round(x)
    if abs(x - n) > _INT_TOL:
        raise ClosedFormUnavailableError(
            f"{what} must be an integer for the closed form, got {x!r}")
    return int(n)


def _merge(points: list[tuple[complex, int]]) -> list[tuple[complex, int]]:
    """Sum multiplicities of points closer than the root-merge tolerance."""
    merged: list[list] = []
    for theta, mult in points:
        for entry in merged:
            if abs(theta - entry[0]) <= ROOT_MERGE_RTOL * max(abs(theta), abs(entry[0])):
                entry[1] += mult
                break
        else:
            merged.append([theta, mult])
    return [(t, m) for t, m in merged]


def build_pole_set(params: ChannelParams, derived: DerivedParams) -> PoleSet:
    """Construct the pole/numerator structure of the rational MGF.

    Requires integer m and even integer mu, except that kappa = 0 removes the
    LoS fluctuation from the MGF altogether (the m-dependent factors cancel
    exactly), so only even integer mu is required there and m may be anything,
    including the resolved no-fluctuation sentinel.
    """
    mu_int = round(params.mu)
    if abs(params.mu - mu_int) > _INT_TOL or mu_int < 2 or mu_int % 2:
        raise ClosedFormUnavailableError(
            f"closed form requires a positive even integer mu, got {params.mu!r}")
    mu_half2 = int(mu_int)
    mu_half = mu_half2 // 2

    omega = derived.omega_cap
    if params.kappa == 0.0:
        # The c-roots coincide with the omega points and every m cancels;
        # equivalent to m = mu/2, which zeroes the numerator exponents.
        m_eff = mu_half
    else:
        m_eff = _as_int(params.m, "m")
        if 2 * m_eff + mu_half2 > MAX_TOTAL_MULTIPLICITY:
            raise ClosedFormUnavailableError(
                f"total multiplicity 2*m + mu = {2 * m_eff + mu_half2} exceeds "
                f"{MAX_TOTAL_MULTIPLICITY}; use the quadrature engine")

    pole_points: list[tuple[complex, int]] = [(derived.c1, m_eff), (derived.c2, m_eff)]
    numerator: list[tuple[complex, int]] = []
    if mu_half > m_eff:
        order = mu_half - m_eff
        pole_points.append((complex(omega / params.eta), order))
        pole_points.append((complex(omega), order))
        group_count = 4
    else:
        group_count = 2
        if mu_half < m_eff:
            power = m_eff - mu_half
            numerator.append((complex(omega / params.eta), power))
            numerator.append((complex(omega), power))

    merged = _merge(pole_points)
    if any(p.real <= 0 for p, _ in merged):  # pragma: no cover - defensive
        raise ClosedFormUnavailableError("pole with nonpositive real part")
    return PoleSet(poles=tuple(merged), group_count=group_count,
                   numerator=tuple(numerator))


def _taylor_coefficients(factors: list[tuple[complex, complex, int]], n_terms: int
                         ) -> list[complex]:
    """Taylor coefficients around u = 0 of prod_k (a_k + b_k u)**e_k.

    Uses T_0 = prod a_k**e_k and the logarithmic-derivative recursion
    n*T_n = sum_{r=1..n} c_r T_{n-r} with c_r = (-1)^{r-1} sum_k e_k (b_k/a_k)^r.
    All a_k must be nonzero (coincident factors are stripped beforehand).
    """
    t0 = complex(1.0)
    ratios: list[tuple[complex, int]] = []
    for a, b, e in factors:
        t0 *= a**e
        ratios.append((b / a, e))
    coeffs = [t0]
    if n_terms > 1:
        c = [0.0j]
        for r in range(1, n_terms):
            sign = 1.0 if (r % 2) else -1.0  # (-1)^(r-1)
            c.append(sign * sum(e * rho**r for rho, e in ratios))
        for n in range(1, n_terms):
            coeffs.append(sum(c[r] * coeffs[n - r] for r in range(1, n + 1)) / n)
    return coeffs


def residues(params: ChannelParams, derived: DerivedParams,
             pole_set: PoleSet) -> PartialFractionExpansion:
    """Exact partial-fraction coefficients of the MGF over the pole set.

    For pole theta_i of multiplicity w, substitute u = 1 + g*s/theta_i; each
    remaining factor (1 + g*s/theta_k)^e becomes (a + b*u)^e with
    a = 1 - theta_i/theta_k and b = theta_i/theta_k.  A numerator factor
    sitting exactly on the pole (a ~ 0) contributes a plain u-power shift.
    A_ij is then the u**(w-j) Taylor coefficient of the product.
    """
    terms = []
    for i, (theta_i, w) in enumerate(pole_set.poles):
        factors: list[tuple[complex, complex, int]] = []
        shift = 0
        scale = complex(1.0)
        others = [(t, -m) for k, (t, m) in enumerate(pole_set.poles) if k != i]
        others.extend((t, e) for t, e in pole_set.numerator)
        for theta_k, expo in others:
            b = theta_i / theta_k
            a = 1.0 - b
            if abs(a) <= ROOT_MERGE_RTOL * abs(b):
                if expo < 0:  # pragma: no cover - poles were merged already
                    raise ClosedFormUnavailableError("unmerged coincident poles")
                shift += expo
                scale *= b**expo
            else:
                factors.append((a, b, expo))
        n_terms = w - shift
        taylor = _taylor_coefficients(factors, n_terms) if n_terms > 0 else []
        coeffs = []
        for j in range(1, w + 1):
            idx = w - j - shift
            coeffs.append(scale * taylor[idx] if 0 <= idx < len(taylor) else 0.0j)
        terms.append((theta_i, w, tuple(coeffs)))
    return PartialFractionExpansion(terms=tuple(terms))


def reconstruct(expansion: PartialFractionExpansion, gamma_bar: float, s):
    """Evaluate sum_ij A_ij (1 + g*s/theta_i)^-j (should reproduce the MGF)."""
    s = np.asarray(s, dtype=float)
    total = np.zeros(s.shape, dtype=complex)
    for theta, _, coeffs in expansion.terms:
        base = 1.0 / (1.0 + gamma_bar * s / theta)
        powered = np.ones_like(total)
        for a_ij in coeffs:
            powered = powered * base
            total = total + a_ij * powered
    return total


def decompose(params: ChannelParams, derived: DerivedParams) -> PartialFractionExpansion:
    """Pole set + residues in one step."""
    return residues(params, derived, build_pole_set(params, derived))


_IMAG_RTOL = 1e-10
_IMAG_FLOOR = 1e-300


def _require_real(value: complex, what: str) -> float:
    if abs(value.imag) >= _IMAG_RTOL * abs(value.real) + _IMAG_FLOOR:
        raise ArithmeticError(
            f"{what} has non-cancelling imaginary part: {value!r}")
    return value.real


def pdf(params: ChannelParams, derived: DerivedParams,
        expansion: PartialFractionExpansion, gamma) -> np.ndarray | float:
    """SNR density f(gamma) from the partial-fraction expansion.

    f(g) = sum_ij A_ij (theta_i/gbar)^j g^{j-1} e^{-theta_i g/gbar} / (j-1)!
    Conjugate-pole imaginary parts must cancel; a tiny negative excursion is
    clipped, anything beyond -1e-12 signals a residue bug and raises.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("gamma must be >= 0")
    gbar = params.gamma_bar
    total = np.zeros(g.shape, dtype=complex)
    for theta, _, coeffs in expansion.terms:
        z = theta / gbar
        decay = np.exp(-z * g)
        poly = np.zeros(g.shape, dtype=complex)
        for j in range(len(coeffs), 0, -1):  # Horner in g
            a_ij = coeffs[j - 1] * z**j / math.factorial(j - 1)
            poly = poly * g + a_ij
        total = total + decay * poly
    scale = float(np.max(np.abs(total))) if total.size else 0.0
    if float(np.max(np.abs(total.imag), initial=0.0)) >= _IMAG_RTOL * scale + _IMAG_FLOOR:
        raise ArithmeticError("density has non-cancelling imaginary part")
    real = total.real
    if np.any(real < -1e-12):
        raise ArithmeticError(
            f"density went negative ({real.min():.3e}); residue table is inconsistent")
    result = np.maximum(real, 0.0)
    return result if result.shape else float(result)


def reconstruction_error(params: ChannelParams, derived: DerivedParams,
                         expansion: PartialFractionExpansion,
                         n_points: int = 32, seed: int = 0) -> float:
    """Max relative error of the expansion against the MGF at random s points.

    Points are drawn on the transform's own scale (gamma_bar * s up to 10):
    far beyond it the MGF underflows through cancellation of the
    partial-fraction terms, which no double-precision evaluation of the sum
    can represent, while the expansion coefficients themselves stay exact.
    """
    rng = np.random.default_rng(seed)
    s = rng.uniform(0.0, 10.0, size=n_points) / params.gamma_bar
    truth = np.exp(log_mgf(params, derived, s))
    approx = reconstruct(expansion, params.gamma_bar, s)
    return float(np.max(np.abs(approx - truth) / truth))
