"""Directional scattering scenarios and the wavenumber spectrum they induce.

A scenario is a mixture of von Mises-Fisher clusters on the upper hemisphere
of arrival directions.  Each cluster is normalized so that the squared
angular spectral factor integrates to one against the hemisphere measure
``sin(theta) dtheta dphi``, which fixes the field power to one per point.
The power spectral density over the wavevector disk follows by the change of
variables from arrival angles to in-plane wavevectors, which contributes the
``1/kz`` Jacobian.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._quad import ConvergenceError, gauss_legendre
from .geometry import TWO_PI, EllipseShape, WaveVector, Wavenumber, _as_xy

__all__ = [
    "VmfCluster",
    "ScatteringScenario",
    "PsdSample",
    "spectral_factor_sq",
    "psd",
    "support_at_threshold",
    "support_area_at_threshold",
]


@dataclass(frozen=True)
class VmfCluster:
    """One von Mises-Fisher cluster of arrival directions.

    Attributes
    ----------
    weight : float
        Mixture weight in (0, 1].
    theta_r, phi_r : float
        Modal arrival direction in radians; polar angle in [0, pi/2],
        azimuth in [0, 2*pi).
    alpha : float
        Concentration; 0 gives an isotropic (hemisphere-uniform) cluster.
    """

    weight: float
    theta_r: float
    phi_r: float
    alpha: float

    def __post_init__(self):
        for name in ("weight", "theta_r", "phi_r", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"cluster {name} must be finite")
        if not (0.0 < self.weight <= 1.0):
            raise ValueError(f"cluster weight must be in (0, 1], got {self.weight!r}")
        if not (0.0 <= self.theta_r <= math.pi / 2.0):
            raise ValueError(f"theta_r must lie in [0, pi/2], got {self.theta_r!r}")
        if not (0.0 <= self.phi_r < TWO_PI):
            raise ValueError(f"phi_r must lie in [0, 2*pi), got {self.phi_r!r}")
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha!r}")

    @property
    def modal_direction(self) -> np.ndarray:
        """Unit 3-vector of the modal arrival direction."""
        st, ct = math.sin(self.theta_r), math.cos(self.theta_r)
        return np.array([st * math.cos(self.phi_r), st * math.sin(self.phi_r), ct])


@dataclass(frozen=True)
class ScatteringScenario:
    """Mixture of vMF clusters plus the operating wavenumber."""

    kn: Wavenumber
    clusters: tuple[VmfCluster, ...]

    def __post_init__(self):
        if not self.clusters:
            raise ValueError("scenario needs at least one cluster")
        object.__setattr__(self, "clusters", tuple(self.clusters))
        total = math.fsum(c.weight for c in self.clusters)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"cluster weights must sum to 1 within 1e-9, got {total!r}")

    @classmethod
    def isotropic(cls, kn: Wavenumber) -> "ScatteringScenario":
        """Single zero-concentration cluster: uniform arrivals over the hemisphere."""
        return cls(kn=kn, clusters=(VmfCluster(1.0, 0.0, 0.0, 0.0),))

    @classmethod
    def from_dict(cls, data: dict) -> "ScatteringScenario":
        """Build from the JSON layout {"lambda": ..., "clusters": [...]}.

        Cluster angles are given in degrees at this boundary and stored in
        radians internally.
        """
        if not isinstance(data, dict):
            raise ValueError("scenario document must be a JSON object")
        extra = set(data) - {"lambda", "clusters"}
        if extra:
            raise ValueError(f"unknown scenario keys: {sorted(extra)}")
        try:
            kn = Wavenumber.from_wavelength(float(data["lambda"]))
            raw = data["clusters"]
        except KeyError as exc:
            raise ValueError(f"scenario document missing key {exc}") from exc
        clusters = []
        for i, c in enumerate(raw):
            extra = set(c) - {"weight", "theta_deg", "phi_deg", "alpha"}
            if extra:
                raise ValueError(f"cluster {i} has unknown keys: {sorted(extra)}")
            try:
                clusters.append(VmfCluster(
                    weight=float(c["weight"]),
                    theta_r=math.radians(float(c["theta_deg"])),
                    phi_r=math.radians(float(c["phi_deg"]) % 360.0),
                    alpha=float(c["alpha"]),
                ))
            except KeyError as exc:
                raise ValueError(f"cluster {i} missing key {exc}") from exc
        return cls(kn=kn, clusters=tuple(clusters))

    def to_dict(self) -> dict:
        return {
            "lambda": self.kn.wavelength,
            "clusters": [
                {
                    "weight": c.weight,
                    "theta_deg": math.degrees(c.theta_r),
                    "phi_deg": math.degrees(c.phi_r),
                    "alpha": c.alpha,
                }
                for c in self.clusters
            ],
        }

    @classmethod
    def from_json(cls, path) -> "ScatteringScenario":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @property
    def scenario_hash(self) -> str:
        """SHA-256 of the canonical JSON document; identifies the scenario."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class PsdSample:
    """Power spectral density value at one wavevector."""

    k: WaveVector
    value: float


def _hemisphere_exp_integral(cluster: VmfCluster) -> float:
    """Integral of exp(alpha*(mode.u - 1)) sin(theta) over the hemisphere."""
    a = cluster.alpha
    if a == 0.0:
        return TWO_PI
    if cluster.theta_r == 0.0:
        return TWO_PI * (1.0 - math.exp(-a)) / a
    xi = cluster.modal_direction
    prev = None
    for n in (32, 64, 128, 256, 512, 1024):
        th, wth = gauss_legendre(n, 0.0, math.pi / 2.0)
        ph, wph = gauss_legendre(2 * n, 0.0, TWO_PI)
        st, ct = np.sin(th), np.cos(th)
        dot = (st[:, None] * np.cos(ph)[None, :] * xi[0]
               + st[:, None] * np.sin(ph)[None, :] * xi[1]
               + ct[:, None] * xi[2])
        cur = float((wth * st) @ np.exp(a * (dot - 1.0)) @ wph)
        if prev is not None and abs(cur - prev) <= 1e-11 * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise ConvergenceError(
        f"cluster normalization integral did not converge (alpha={a!r})",
        estimate=prev,
    )


@lru_cache(maxsize=128)
def _cluster_norms(s: ScatteringScenario) -> tuple[float, ...]:
    """Per-cluster constants making each unit-power on the hemisphere."""
    return tuple(1.0 / _hemisphere_exp_integral(c) for c in s.clusters)


def _factor_sq_arrays(s: ScatteringScenario, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    st, ct = np.sin(theta), np.cos(theta)
    ux, uy = st * np.cos(phi), st * np.sin(phi)
    out = np.zeros_like(st)
    for cluster, norm in zip(s.clusters, _cluster_norms(s)):
        xi = cluster.modal_direction
        dot = ux * xi[0] + uy * xi[1] + ct * xi[2]
        out += cluster.weight * norm * np.exp(cluster.alpha * (dot - 1.0))
    return out


def spectral_factor_sq(s: ScatteringScenario, theta: float, phi: float) -> float:
    """Squared angular spectral factor at arrival direction (theta, phi).

    A mixture of exponentials of the cosine between the direction and each
    cluster mode, with every cluster individually normalized to unit
    hemisphere power; the zero-concentration value is ``1/(2*pi)``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(theta < 0.0) or np.any(theta > math.pi / 2.0):
        raise ValueError("theta must lie in [0, pi/2]")
    if np.any(phi < 0.0) or np.any(phi >= TWO_PI):
        raise ValueError("phi must lie in [0, 2*pi)")
    out = _factor_sq_arrays(s, theta, phi)
    return float(out) if out.ndim == 0 else out


def _angles_of_wavevectors(kxy: np.ndarray, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    rad = np.hypot(kxy[..., 0], kxy[..., 1])
    theta = np.arcsin(np.clip(rad / kappa, 0.0, 1.0))
    phi = np.mod(np.arctan2(kxy[..., 1], kxy[..., 0]), TWO_PI)
    return theta, phi


def psd(s: ScatteringScenario, k) -> float:
    """Power spectral density of the field at in-plane wavevector ``k``.

    Squared spectral factor divided by the propagating ``kz``; identically
    zero on and outside the wavevector disk boundary, where no propagating
    plane wave maps.
    """
    kx, ky = _as_xy(k)
    kap = s.kn.kappa
    rad2 = kx * kx + ky * ky
    if rad2 >= kap * kap:
        return 0.0
    theta, phi = _angles_of_wavevectors(np.array([kx, ky]), kap)
    return float(_factor_sq_arrays(s, theta, phi) / math.sqrt(kap * kap - rad2))


_FIT_GRID_N = 200


def _threshold_mask(s: ScatteringScenario, threshold_db: float, on_psd: bool):
    """Grid wavevectors above the relative threshold, and the grid step."""
    if not (math.isfinite(threshold_db) and threshold_db < 0.0):
        raise ValueError(f"threshold_db must be negative, got {threshold_db!r}")
    kap = s.kn.kappa
    step = kap / _FIT_GRID_N
    axis = np.arange(-_FIT_GRID_N, _FIT_GRID_N + 1) * step
    kx, ky = np.meshgrid(axis, axis, indexing="ij")
    rad2 = kx * kx + ky * ky
    inside = rad2 < kap * kap if on_psd else rad2 <= kap * kap
    pts = np.column_stack([kx[inside], ky[inside]])
    theta, phi = _angles_of_wavevectors(pts, kap)
    vals = _factor_sq_arrays(s, theta, phi)
    if on_psd:
        vals = vals / np.sqrt(kap * kap - (pts[:, 0] ** 2 + pts[:, 1] ** 2))
    keep = vals >= vals.max() * 10.0 ** (threshold_db / 10.0)
    if not np.any(keep):
        raise ValueError("threshold leaves no wavevectors above it")
    return pts[keep], step


def support_at_threshold(s: ScatteringScenario, threshold_db: float = -20.0,
                         on_psd: bool = False) -> EllipseShape:
    """Smallest centered ellipse covering the super-threshold wavevector set.

    The squared spectral factor (or, with ``on_psd``, the spectral density)
    is evaluated on a ``kappa/200`` grid over the wavevector disk; grid
    points within ``threshold_db`` of the maximum are kept.  Axis directions
    come from the principal components of the kept set about the origin,
    axis lengths from its extremal projections, inflated uniformly so every
    kept point is covered.

    Returns
    -------
    EllipseShape
        Fitted shape; an isotropic scenario yields a1 = a2 = 1.
    """
    pts, _ = _threshold_mask(s, threshold_db, on_psd)
    kap = s.kn.kappa
    second = pts.T @ pts / len(pts)
    _, vecs = np.linalg.eigh(second)
    proj = pts @ vecs  # columns: ascending principal variance
    extent = np.abs(proj).max(axis=0)
    if extent.min() <= 0.0:
        raise ValueError("super-threshold set is degenerate; cannot fit an ellipse")
    inflate = np.hypot(proj[:, 0] / extent[0], proj[:, 1] / extent[1]).max()
    hi = int(np.argmax(extent))
    major, minor = extent[hi] * inflate, extent[1 - hi] * inflate
    v_major = vecs[:, hi]
    phi = math.atan2(v_major[1], v_major[0]) % TWO_PI
    return EllipseShape(a1=min(major / kap, 1.0), a2=min(minor / kap, 1.0), phi=phi)


def support_area_at_threshold(s: ScatteringScenario, threshold_db: float = -20.0,
                              on_psd: bool = False) -> float:
    """Measured area of the super-threshold wavevector set, in (rad/m)^2."""
    pts, step = _threshold_mask(s, threshold_db, on_psd)
    return len(pts) * step * step
