"""Cross-engine and Monte-Carlo concordance grids.

These drive both the ``validate`` / ``mc-validate`` CLI subcommands and the
acceptance tests: every closed-form-eligible grid point must agree between
the quadrature and residue engines to 1e-6 relative, and the sampled
estimates must sit within four standard errors of the quadrature values on
at least 95% of the concordance grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mc import McConfig, estimate_er
from .model import ChannelParams, derive, preset, resolve_shadowing
from .poles import build_pole_set, residues
from .rate import expectation_closed_form, expectation_quadrature

CROSS_REL_TOL = 1e-6
MC_Z_LIMIT = 4.0
MC_PASS_FRACTION = 0.95

#: Cartesian axes of the closed-form cross-check grid.
GRID_M = (1, 2, 3)
GRID_MU = (2, 4, 6)
GRID_KAPPA = (0.5, 1.0, 2.0)
GRID_ETA = (0.1, 0.5, 1.0)
GRID_RHO2 = (0.1, 1.0)
GRID_SNR_DB = (-10.0, 0.0, 10.0, 20.0, 30.0)
GRID_A = (0.5, 1.0, 2.0, 5.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(linear: float) -> float:
    return 10.0 * math.log10(linear)


def closed_form_grid() -> list[tuple[ChannelParams, float]]:
    """All (params, A) combinations of the cross-check grid."""
    grid = []
    for m in GRID_M:
        for mu in GRID_MU:
            for kappa in GRID_KAPPA:
                for eta in GRID_ETA:
                    for rho2 in GRID_RHO2:
                        for snr_db in GRID_SNR_DB:
                            params = ChannelParams(
                                mu=float(mu), m=float(m), kappa=kappa, eta=eta,
                                rho2=rho2, gamma_bar=db_to_linear(snr_db))
                            for a in GRID_A:
                                grid.append((params, a))
    return grid


@dataclass(frozen=True)
class CrossCheckReport:
    n_configs: int
    max_rel_diff: float
    worst: tuple[ChannelParams, float] | None

    @property
    def passed(self) -> bool:
        return self.max_rel_diff <= CROSS_REL_TOL


def run_cross_check(grid=None, rel_tol: float = 1e-8) -> CrossCheckReport:
    """Quadrature vs closed form over the grid; reports the worst config."""
    if grid is None:
        grid = closed_form_grid()
    worst = None
    max_diff = 0.0
    for params, a in grid:
        derived = derive(params)
        expansion = residues(params, derived, build_pole_set(params, derived))
        j_closed = expectation_closed_form(params, derived, expansion, a)
        j_quad, _ = expectation_quadrature(params, derived, a, rel_tol)
        diff = abs(j_quad - j_closed) / j_closed
        if diff > max_diff:
            max_diff = diff
            worst = (params, a)
    return CrossCheckReport(n_configs=len(grid), max_rel_diff=max_diff, worst=worst)


def mc_grid() -> list[tuple[ChannelParams, float]]:
    """40 integer-cluster configurations for sampling concordance.

    Includes the two figure-reproduction sweeps (restricted to integer
    cluster counts), the named presets, and assorted corners of the
    closed-form grid.
    """
    grid: list[tuple[ChannelParams, float]] = []
    for mu in (1, 2, 4):  # figure-1 style sweep
        for snr_db in (-10.0, 0.0, 10.0, 20.0):
            grid.append((ChannelParams(mu=float(mu), m=1.0, kappa=1.0, eta=0.1,
                                       rho2=0.1, gamma_bar=db_to_linear(snr_db)), 2.0))
    for gbar in (1.0, 10.0):
        for a in (0.5, 2.0):
            grid.append((preset("rayleigh", gamma_bar=gbar), a))
    for mu in (2, 3):
        for gbar in (1.0, 10.0):
            grid.append((preset("nakagami-m", mu=mu, gamma_bar=gbar), 1.0))
    for gbar in (0.1, 1.0, 10.0):
        grid.append((preset("kappa-mu-shadowed", kappa=2.0, mu=3.0, m=2.0,
                            gamma_bar=gbar), 2.0))
    for gbar in (1.0, 10.0):
        for a in (1.0, 5.0):
            grid.append((preset("eta-mu", eta=0.5, mu=2.0, gamma_bar=gbar), a))
    for gbar in (1.0, 10.0):
        grid.append((preset("rician", kappa=3.0, gamma_bar=gbar), 2.0))
    for gbar in (1.0, 10.0):
        grid.append((preset("beckmann", kappa=1.0, eta=0.5, rho2=2.0,
                            gamma_bar=gbar), 2.0))
    for gbar in (0.1, 1.0, 10.0):
        for a in (0.5, 2.0):
            grid.append((ChannelParams(mu=4.0, m=2.0, kappa=0.5, eta=0.5,
                                       rho2=1.0, gamma_bar=gbar), a))
    for gbar in (1.0, 100.0):
        grid.append((ChannelParams(mu=6.0, m=3.0, kappa=2.0, eta=0.1, rho2=0.1,
                                   gamma_bar=gbar), 5.0))
    grid.append((ChannelParams(mu=2.0, m=1.0, kappa=1.0, eta=1.0, rho2=1.0,
                               gamma_bar=1.0), 0.5))
    assert len(grid) == 40
    return grid


@dataclass(frozen=True)
class McCheckResult:
    params: ChannelParams
    a_exponent: float
    j_quad: float
    j_hat: float
    j_stderr: float

    @property
    def z_score(self) -> float:
        return (self.j_hat - self.j_quad) / self.j_stderr


@dataclass(frozen=True)
class McCheckReport:
    results: tuple[McCheckResult, ...]

    @property
    def n_within(self) -> int:
        return sum(abs(r.z_score) <= MC_Z_LIMIT for r in self.results)

    @property
    def max_abs_z(self) -> float:
        return max(abs(r.z_score) for r in self.results)

    @property
    def passed(self) -> bool:
        return self.n_within >= math.ceil(MC_PASS_FRACTION * len(self.results))


def run_mc_check(grid=None, n_samples: int = 1_000_000, seed: int = 42,
                 n_workers: int = 1) -> McCheckReport:
    """Sampled vs quadrature expectations over the concordance grid."""
    if grid is None:
        grid = mc_grid()
    config = McConfig(n_samples=n_samples, seed=seed)
    results = []
    for params, a in grid:
        resolved = resolve_shadowing(params)
        j_quad, _ = expectation_quadrature(resolved, derive(resolved), a)
        estimate = estimate_er(resolved, a, config, n_workers=n_workers)
        results.append(McCheckResult(params=params, a_exponent=a, j_quad=j_quad,
                                     j_hat=estimate.j_hat,
                                     j_stderr=estimate.j_stderr))
    return McCheckReport(results=tuple(results))
