"""Second-order statistics and Monte Carlo synthesis of scattered fields.

The field is a zero-mean stationary circularly-symmetric Gaussian process
over the plane with unit power per point.  Its spatial autocorrelation is
the hemisphere integral of the squared spectral factor against the plane
wave phase; for isotropic scattering this reduces to the classic
``sinc(2|r|/wavelength)`` profile.  Realizations are synthesized as finite
sums of plane waves with directions drawn from the scenario's angular
density and independent complex Gaussian gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._io import write_csv, write_json
from ._quad import ConvergenceError, gauss_legendre
from .geometry import TWO_PI, Wavenumber
from .scattering import ScatteringScenario, _factor_sq_arrays

__all__ = [
    "Acf",
    "ClarkeAcf",
    "NumericAcf",
    "FieldRealization",
    "EnergyReport",
    "acf_clarke",
    "acf_numeric",
    "synthesize",
    "average_energy",
]

_ACF_LEVELS = ((64, 128), (128, 256), (256, 512), (512, 1024))
_NODE_CHUNK = 32768
_ROW_CHUNK = 512


class Acf:
    """Spatial autocorrelation: displacement -> complex correlation.

    Subclasses provide ``eval_many`` on an (N, 2) displacement array;
    calling with a single displacement returns a complex scalar.
    ``c(0) = 1`` by the unit-power convention.
    """

    kn: Wavenumber
    scenario: ScatteringScenario | None = None

    def eval_many(self, disp: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, r) -> complex:
        disp = np.asarray(r, dtype=float).reshape(1, 2)
        return complex(self.eval_many(disp)[0])


class ClarkeAcf(Acf):
    """Isotropic-scattering autocorrelation ``sinc(2|r|/wavelength)``."""

    def __init__(self, kn: Wavenumber):
        self.kn = kn
        self.scenario = None

    def eval_many(self, disp: np.ndarray) -> np.ndarray:
        disp = np.asarray(disp, dtype=float)
        rad = np.hypot(disp[..., 0], disp[..., 1])
        return np.sinc(2.0 * rad / self.kn.wavelength).astype(complex)


def acf_clarke(r, kn: Wavenumber) -> float:
    """Isotropic autocorrelation at displacement ``r``: sinc(2|r|/wavelength)."""
    disp = np.asarray(r, dtype=float).reshape(2)
    return float(np.sinc(2.0 * math.hypot(disp[0], disp[1]) / kn.wavelength))


def _phase_sum(disp: np.ndarray, k: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum_j w_j exp(i disp . k_j) accumulated in fixed chunk order."""
    out = np.zeros(len(disp), dtype=complex)
    for r0 in range(0, len(disp), _ROW_CHUNK):
        d = disp[r0:r0 + _ROW_CHUNK]
        acc = np.zeros(len(d), dtype=complex)
        for c0 in range(0, len(k), _NODE_CHUNK):
            acc += np.exp(1j * (d @ k[c0:c0 + _NODE_CHUNK].T)) @ w[c0:c0 + _NODE_CHUNK]
        out[r0:r0 + _ROW_CHUNK] = acc
    return out


class NumericAcf(Acf):
    """Autocorrelation of an arbitrary scenario by hemisphere quadrature.

    Gauss-Legendre nodes over (theta, phi) are refined by doubling until two
    successive levels agree within ``tol`` on the requested displacements;
    values are normalized by the same-level value at zero displacement so
    that ``c(0) = 1`` exactly.
    """

    def __init__(self, scenario: ScatteringScenario, tol: float = 1e-6):
        self.scenario = scenario
        self.kn = scenario.kn
        self.tol = tol

    def _level_nodes(self, nt: int, nf: int) -> tuple[np.ndarray, np.ndarray]:
        th, wth = gauss_legendre(nt, 0.0, math.pi / 2.0)
        ph, wph = gauss_legendre(nf, 0.0, TWO_PI)
        tg, pg = np.meshgrid(th, ph, indexing="ij")
        factor = _factor_sq_arrays(self.scenario, tg, pg)
        w = (factor * np.sin(tg) * wth[:, None] * wph[None, :]).ravel()
        st = np.sin(tg).ravel()
        k = self.kn.kappa * np.column_stack(
            [st * np.cos(pg).ravel(), st * np.sin(pg).ravel()]
        )
        return k, w

    def eval_many(self, disp: np.ndarray) -> np.ndarray:
        disp = np.atleast_2d(np.asarray(disp, dtype=float))
        if disp.shape[-1] != 2:
            raise ValueError("displacements must have two components")
        ext = np.vstack([disp, [[0.0, 0.0]]])
        prev = None
        achieved = math.inf
        for nt, nf in _ACF_LEVELS:
            k, w = self._level_nodes(nt, nf)
            cur = _phase_sum(ext, k, w)
            cur = cur / cur[-1].real
            if prev is not None:
                achieved = float(np.abs(cur - prev).max())
                if achieved < self.tol:
                    return cur[:-1]
            prev = cur
        raise ConvergenceError(
            f"autocorrelation quadrature did not reach tol={self.tol:g}; "
            f"achieved {achieved:.3e} at {_ACF_LEVELS[-1]} (theta, phi) nodes",
            achieved=achieved,
        )


_NUMERIC_CACHE: dict[ScatteringScenario, NumericAcf] = {}


def acf_numeric(s: ScatteringScenario, r, tol: float = 1e-6) -> complex:
    """Autocorrelation of scenario ``s`` at displacement ``r`` by quadrature."""
    key = s
    inst = _NUMERIC_CACHE.get(key)
    if inst is None or inst.tol > tol:
        inst = NumericAcf(s, tol=tol)
        _NUMERIC_CACHE[key] = inst
    return inst(r)


@dataclass(frozen=True)
class EnergyReport:
    """Average per-point field energy implied by a scenario."""

    sigma_sq: float


def average_energy(s: ScatteringScenario) -> EnergyReport:
    """Hemisphere integral of the squared spectral factor.

    Equals one under the scenario normalization; computed by quadrature so
    it doubles as a consistency check of the normalization constants.
    """
    prev = None
    for nt, nf in _ACF_LEVELS:
        th, wth = gauss_legendre(nt, 0.0, math.pi / 2.0)
        ph, wph = gauss_legendre(nf, 0.0, TWO_PI)
        tg, pg = np.meshgrid(th, ph, indexing="ij")
        vals = _factor_sq_arrays(s, tg, pg) * np.sin(tg)
        cur = float(wth @ vals @ wph)
        if prev is not None and abs(cur - prev) < 1e-10:
            return EnergyReport(sigma_sq=cur)
        prev = cur
    raise ConvergenceError("energy quadrature did not converge", estimate=prev)


@dataclass(frozen=True)
class FieldRealization:
    """One synthesized field realization sampled at a set of positions.

    Regenerating with the same scenario, positions, seed and wave count
    reproduces the values bit for bit.
    """

    positions: np.ndarray
    values: np.ndarray
    seed: object
    n_waves: int
    scenario_hash: str

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        val = np.asarray(self.values)
        if pos.ndim != 2 or pos.shape[1] != 2 or val.shape != (len(pos),):
            raise ValueError("positions must be (N, 2) with one value per position")

    def to_csv(self, path) -> None:
        """Write positions and field values as CSV columns x,y,re,im."""
        rows = (
            (p[0], p[1], v.real, v.imag)
            for p, v in zip(self.positions, self.values)
        )
        write_csv(path, ["x", "y", "re", "im"], rows)

    def sidecar(self) -> dict:
        return {
            "seed": list(self.seed) if isinstance(self.seed, (tuple, list)) else self.seed,
            "n_waves": self.n_waves,
            "scenario_hash": self.scenario_hash,
        }

    def to_sidecar_json(self, path) -> None:
        write_json(path, self.sidecar())


def _cluster_directions(cluster, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n unit arrival directions from one cluster's hemisphere density."""
    a = cluster.alpha
    if a == 0.0 or cluster.theta_r == 0.0:
        v = rng.random(n)
        if a == 0.0:
            ct = 1.0 - v
        else:
            ct = 1.0 + np.log1p(-v * (1.0 - math.exp(-a))) / a
        st = np.sqrt(np.clip(1.0 - ct * ct, 0.0, None))
        ph = TWO_PI * rng.random(n)
        return np.column_stack([st * np.cos(ph), st * np.sin(ph), ct])

    # Rotated cluster: draw from the full-sphere density about the modal
    # direction, keep upper-hemisphere draws.
    xi = cluster.modal_direction
    e1 = np.cross([0.0, 0.0, 1.0], xi)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(xi, e1)
    out = np.empty((n, 3))
    filled = 0
    while filled < n:
        batch = max(64, int(1.5 * (n - filled)) + 16)
        v = rng.random(batch)
        w = 1.0 + np.log(v + (1.0 - v) * math.exp(-2.0 * a)) / a
        st = np.sqrt(np.clip(1.0 - w * w, 0.0, None))
        tang = TWO_PI * rng.random(batch)
        dirs = (w[:, None] * xi[None, :]
                + (st * np.cos(tang))[:, None] * e1[None, :]
                + (st * np.sin(tang))[:, None] * e2[None, :])
        dirs = dirs[dirs[:, 2] >= 0.0]
        take = min(len(dirs), n - filled)
        out[filled:filled + take] = dirs[:take]
        filled += take
    return out


def _plane_wave_sum(positions: np.ndarray, k: np.ndarray, gains: np.ndarray) -> np.ndarray:
    """sum_m g_m exp(i r . k_m) evaluated with real trigonometric products.

    Splitting into cos/sin parts keeps every matrix product in real
    arithmetic, which is substantially faster than forming the complex
    phase matrix.
    """
    phase = positions @ k.T
    c, sn = np.cos(phase), np.sin(phase)
    out = np.empty(len(positions), dtype=complex)
    out.real = c @ gains.real - sn @ gains.imag
    out.imag = c @ gains.imag + sn @ gains.real
    return out


def _scenario_directions(s: ScatteringScenario, rng: np.random.Generator, n: int) -> np.ndarray:
    cum = np.cumsum([c.weight for c in s.clusters])
    cum[-1] = 1.0
    pick = np.searchsorted(cum, rng.random(n), side="right")
    out = np.empty((n, 3))
    for i, cluster in enumerate(s.clusters):
        sel = np.flatnonzero(pick == i)
        if sel.size:
            out[sel] = _cluster_directions(cluster, rng, sel.size)
    return out


def _draw_waves(s: ScatteringScenario, rng: np.random.Generator,
                n_waves: int) -> tuple[np.ndarray, np.ndarray]:
    """In-plane wavevectors and complex Gaussian gains for one realization."""
    dirs = _scenario_directions(s, rng, n_waves)
    k = s.kn.kappa * dirs[:, :2]
    gains = (rng.standard_normal(n_waves) + 1j * rng.standard_normal(n_waves)) / math.sqrt(2.0)
    return k, gains


def synthesize(s: ScatteringScenario, positions, seed, n_waves: int = 1024) -> FieldRealization:
    """Synthesize one field realization as a finite sum of plane waves.

    ``n_waves`` directions are drawn from the scenario's angular density and
    combined with i.i.d. standard complex Gaussian gains, scaled by
    ``1/sqrt(n_waves)`` so the per-point power is one.  Every drawn in-plane
    wavevector lies inside the wavevector disk.

    Parameters
    ----------
    s : ScatteringScenario
    positions : (N, 2) array_like
        Plane positions at which the field is evaluated.
    seed : int or sequence of int
        Feeds ``numpy.random.default_rng``; the full draw is deterministic.
    n_waves : int
        Number of plane waves in the sum (default 1024).
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    if positions.shape[-1] != 2:
        raise ValueError("positions must have two columns")
    if n_waves < 1:
        raise ValueError(f"n_waves must be positive, got {n_waves!r}")
    rng = np.random.default_rng(seed)
    k, gains = _draw_waves(s, rng, n_waves)
    values = _plane_wave_sum(positions, k, gains) / math.sqrt(n_waves)
    return FieldRealization(
        positions=positions,
        values=values,
        seed=seed,
        n_waves=n_waves,
        scenario_hash=s.scenario_hash,
    )
