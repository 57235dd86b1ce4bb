"""Shared test utilities: brute-force counters, CLI runner, scenario builders."""

import json
import subprocess
import sys

import numpy as np

from fieldsamp import ScatteringScenario, VmfCluster, Wavenumber


def brute_force_lattice_count(qmat, side):
    """Count lattice points in a centered square by scanning an integer box.

    Independent of the production enumeration: the integer range is bounded
    through the rows of Q^-1 rather than by mapping region corners, and the
    membership test is done componentwise on the generated positions.  The
    boundary rule matches production: closed, with 1e-12 relative slack.
    """
    qmat = np.asarray(qmat, dtype=float)
    qinv = np.linalg.inv(qmat)
    half = 0.5 * side * (1.0 + 1e-12)
    bound = int(np.ceil(np.abs(qinv).sum(axis=1).max() * half)) + 2
    n = np.arange(-bound, bound + 1)
    n1, n2 = np.meshgrid(n, n, indexing="ij")
    pts = np.stack([n1.ravel(), n2.ravel()], axis=1) @ qmat.T
    keep = (np.abs(pts[:, 0]) <= half) & (np.abs(pts[:, 1]) <= half)
    return int(np.count_nonzero(keep))


def brute_force_disk_modes(rho):
    """Count integer pairs inside the closed disk of radius rho (pure loops)."""
    bound = int(np.ceil(rho)) + 1
    limit_sq = (rho * (1.0 + 1e-12)) ** 2
    count = 0
    for lx in range(-bound, bound + 1):
        for ly in range(-bound, bound + 1):
            if lx * lx + ly * ly <= limit_sq:
                count += 1
    return count


def run_cli(args, cwd):
    """Run the installed CLI in a subprocess and capture its output."""
    return subprocess.run(
        [sys.executable, "-m", "fieldsamp", *[str(a) for a in args]],
        cwd=cwd, capture_output=True, text=True,
    )


def write_scenario(path, data):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
    return str(path)


def broadside_cluster(alpha, lam=1.0):
    """Single cluster pointing at the zenith with the given concentration."""
    return ScatteringScenario(
        kn=Wavenumber.from_wavelength(lam),
        clusters=(VmfCluster(weight=1.0, theta_r=0.0, phi_r=0.0, alpha=alpha),),
    )


def two_cluster_scenario(lam=1.0):
    """Two tilted clusters with a strongly directional mixture spectrum."""
    return ScatteringScenario.from_dict({
        "lambda": lam,
        "clusters": [
            {"weight": 0.5, "theta_deg": 0.0, "phi_deg": 180.0, "alpha": 200.0},
            {"weight": 0.5, "theta_deg": 10.0, "phi_deg": 0.0, "alpha": 100.0},
        ],
    })


def broadside_json(alpha, lam=1.0):
    return {
        "lambda": lam,
        "clusters": [
            {"weight": 1.0, "theta_deg": 0.0, "phi_deg": 0.0, "alpha": alpha},
        ],
    }


def two_cluster_json(lam=1.0):
    return {
        "lambda": lam,
        "clusters": [
            {"weight": 0.5, "theta_deg": 0.0, "phi_deg": 180.0, "alpha": 200.0},
            {"weight": 0.5, "theta_deg": 10.0, "phi_deg": 0.0, "alpha": 100.0},
        ],
    }
