"""Shared fixtures, independent oracles, and frozen golden values.

Golden constants were computed before the implementation existed, with
mpmath at 40 significant digits: the rate integral by adaptive quadrature of
the explicit integrand s**(A-1) e**(-s) M(s), the exponential integral by its
power series, and the Tricomi U values by high-resolution quadrature of the
defining integral (cross-checked against a 200k-point trapezoid rule).  The
oracles below are coded independently of the package internals.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gammainc

from fbrate import ChannelParams

# --- frozen goldens ----------------------------------------------------------

# Fig-1-style configuration: mu=2, m=1, kappa=1, eta=0.1, rho2=0.1, gamma_bar=1
FIG1 = dict(mu=2.0, m=1.0, kappa=1.0, eta=0.1, rho2=0.1)
FIG1_OMEGA = 2.2
FIG1_ALPHA1 = 0.061983471074380165
FIG1_BETA = -1.0
FIG1_C1 = 15.06222081039093476
FIG1_C2 = 1.071112522942398573
FIG1_MGF_AT_1 = 0.48496993987975952
FIG1_A11 = -0.0765566601970550627
FIG1_A21 = 1.0765566601970550627
FIG1_U_C1 = 0.05897733195077076724    # U(1; 0; c1)
FIG1_U_C2 = 0.39046097059192996872    # U(1; 0; c2)
FIG1_J_A2 = 0.38223819920982843384    # A = 2, 0 dB
FIG1_R_A2 = 0.69372806637498491411

# same kappa/eta/rho2/m at 0 dB, A=2, other cluster counts (quadrature route)
FIG1_J_MU1 = 0.45172746639826679901
FIG1_R_MU1 = 0.57323772910825050565
FIG1_J_MU4 = 0.33777076593451548996
FIG1_R_MU4 = 0.78294181331246692479

# mu=1.5 sweep at 0 dB, A=2 (kappa=1, eta=0.1, rho2=0.1)
FIG2_J_BY_M = {0.5: 0.42465243905911804835,
               1.0: 0.40790635246490488556,
               3.0: 0.39284231208502887653}

# Rayleigh, gamma_bar=1, A=2: J = 1 - e*E1(1)
E1_AT_1 = 0.21938393439552027368
J_RAYLEIGH = 0.40365263767680592566
R_RAYLEIGH = 0.65440688791771564054

# Nakagami-style degeneration mu=2, m=1, eta=1, kappa=0 at gamma_bar=1, A=2:
# density 4 g e^{-2g}, J = 4*U(2;1;2)
J_NAKAGAMI_MU2 = 0.33594340265867101637
U_2_1_2 = 0.08398585066466775409

# U(3; 0.5; 2), high-resolution quadrature of the defining integral
U_3_HALF_2 = 0.011037962739750986804

# z e^z E1(z) at z = 0.5  (Rayleigh gamma_bar=2 at A=1)
J_RAYLEIGH_G2_A1 = 0.46145531624186523442

# merged double pole: mu=2, m=2, eta=1, kappa=0, gamma_bar=3, A=0.5
J_MERGED_G3_A05 = 0.55005758560518021080


def fig1_params(gamma_bar: float = 1.0, mu: float = 2.0) -> ChannelParams:
    return ChannelParams(mu=mu, m=1.0, kappa=1.0, eta=0.1, rho2=0.1,
                         gamma_bar=gamma_bar)


# --- independent oracles ------------------------------------------------------


def unit_eta_shadowed_mgf(kappa, mu, m, gamma_bar, s):
    """LoS-shadowed MGF for eta = 1, from the cluster model directly.

    With equal in-phase/quadrature variances the conditional power is
    noncentral chi-square and the gamma-mixed MGF collapses to
    (1+x)^(m-mu) (1 + (1 + kappa*mu/m) x)^-m with x = gbar*s/(mu(1+kappa)).
    Shares nothing with the package's root/quadratic machinery.
    """
    x = gamma_bar * np.asarray(s, dtype=float) / (mu * (1.0 + kappa))
    return (1.0 + x) ** (m - mu) * (1.0 + (1.0 + kappa * mu / m) * x) ** -m


def unit_eta_shadowed_j(kappa, mu, m, gamma_bar, a_exponent):
    """Rate expectation for the eta = 1 oracle MGF by adaptive quadrature."""
    lg = math.gamma(a_exponent)

    def bare(s):
        return math.exp(-s) * float(unit_eta_shadowed_mgf(kappa, mu, m, gamma_bar, s)) / lg

    def full(s):
        return s ** (a_exponent - 1.0) * bare(s)

    v1, _ = quad(bare, 0.0, 1.0, weight="alg", wvar=(a_exponent - 1.0, 0.0),
                 epsabs=0.0, epsrel=1e-12, limit=200)
    v2, _ = quad(full, 1.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return v1 + v2


def cluster_model_mgf(params: ChannelParams, s):
    """Analytic MGF straight from the physical cluster geometry.

    Chains the Gaussian MGF of each squared component with the gamma mixing
    of the LoS field; independent of the quadratic-root formulation.
    """
    sx2 = params.eta
    sy2 = 1.0
    q2 = params.kappa * params.mu * (sx2 + sy2) / (1.0 + params.rho2)
    p2 = params.rho2 * q2
    norm = (1.0 + params.kappa) * params.mu * (sx2 + sy2)
    t = np.asarray(s, dtype=float) * params.gamma_bar / norm
    g1 = 1.0 + 2.0 * t * sx2
    g2 = 1.0 + 2.0 * t * sy2
    u = p2 * t / g1 + q2 * t / g2
    return g1 ** (-params.mu / 2.0) * g2 ** (-params.mu / 2.0) * (1.0 + u / params.m) ** -params.m


def expansion_cdf(expansion, gamma_bar):
    """CDF from a partial-fraction expansion (real poles), for KS tests."""
    terms = []
    for theta, _, coeffs in expansion.terms:
        assert abs(theta.imag) <= 1e-9 * abs(theta.real)
        for j, a_ij in enumerate(coeffs, start=1):
            if a_ij != 0:
                assert abs(a_ij.imag) <= 1e-9 * abs(a_ij.real) + 1e-300
                terms.append((a_ij.real, j, theta.real / gamma_bar))

    def cdf(x):
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape)
        for weight, j, z in terms:
            total += weight * gammainc(j, z * x)
        return total

    return cdf


def ks_distance(samples: np.ndarray, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance of samples against a CDF."""
    x = np.sort(samples)
    n = x.size
    f = cdf(x)
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return max(upper, lower)


def random_valid_params(rng: np.random.Generator, gamma_bar=None) -> ChannelParams:
    """Draw one broadly ranged valid parameter set."""
    return ChannelParams(
        mu=float(rng.uniform(0.3, 8.0)),
        m=float(rng.uniform(0.3, 10.0)),
        kappa=float(rng.uniform(0.0, 5.0)),
        eta=float(10.0 ** rng.uniform(-1.5, 1.5)),
        rho2=float(rng.uniform(0.0, 5.0)),
        gamma_bar=float(10.0 ** rng.uniform(-1.0, 3.0)) if gamma_bar is None else gamma_bar,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
