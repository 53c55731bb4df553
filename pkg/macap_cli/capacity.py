"""Spectral machinery: truncated SVD, water-filling, capacity and channel metrics."""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from macap_cli.errors import AllZeroChannel, InvalidCovariance

# Singular values at or below RANK_TOL * largest are treated as zero
RANK_TOL = 1e-10

@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    left: np.ndarray
    singular: np.ndarray
    right: np.ndarray

    @property
    def rank(self):
        return len(self.singular)

@dataclass(frozen=True, eq=False)
class WaterFilling:
    powers: np.ndarray
    water_level: float

    @property
    def active(self):
        return int(np.count_nonzero(self.powers > 0))

@dataclass(frozen=True, eq=False)
class CapacityResult:
    """Eigenmode transmission over one channel"""
    capacity: float
    singular: np.ndarray
    powers: np.ndarray
    covariance: np.ndarray

@dataclass(frozen=True)
class ChannelMetrics:
    capacity: float
    total_power: float
    strongest_eig_power: float
    condition_number: float

def truncated_svd(H, tol=RANK_TOL):
    H = np.asarray(H, dtype=complex)
    U, s, Vh = linalg.svd(H, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        raise AllZeroChannel("Channel matrix has no nonzero singular value")
    keep = s > tol * s[0]
    return SpectralDecomposition(U[:, keep], s[keep], Vh[keep].conj().T)

def water_fill(singular, power, noise):
    """Allocate power over eigenchannels with gains singular**2

    Exact active-set sweep: try k = S..1 active streams and accept the first
    whose water level exceeds the noise-to-gain ratio of its weakest stream.
    """
    singular = np.asarray(singular, dtype=float)
    floors = noise / singular ** 2
    count = len(singular)
    for k in range(count, 0, -1):
        level = (power + floors[:k].sum()) / k
        if level > floors[k - 1]:
            powers = np.zeros(count)
            powers[:k] = level - floors[:k]
            return WaterFilling(powers, float(level))
    # Unreachable for power > 0: one stream always accepts
    raise ValueError("water_fill needs positive power, got {}".format(power))

def log_det_identity_plus(X):
    """log2 det(I + X) for a Hermitian positive semi-definite X, from its spectrum"""
    X = np.asarray(X, dtype=complex)
    X = (X + X.conj().T) / 2
    eigenvalues = linalg.eigvalsh(X)
    return float(np.sum(np.log2(1 + eigenvalues)))

def capacity_of(H, Q, noise):
    H = np.asarray(H, dtype=complex)
    return log_det_identity_plus(H @ Q @ H.conj().T / noise)

def eigenmode_transmission(H, power, noise, tol=RANK_TOL):
    spectrum = truncated_svd(H, tol)
    allocation = water_fill(spectrum.singular, power, noise)
    V = spectrum.right
    covariance = (V * allocation.powers) @ V.conj().T
    capacity = float(np.sum(np.log2(1 + spectrum.singular ** 2 * allocation.powers / noise)))
    return CapacityResult(capacity, spectrum.singular, allocation.powers, covariance)

def optimal_covariance(H, power, noise, tol=RANK_TOL):
    """Return (Q, capacity) for eigenmode transmission with water-filled powers"""
    result = eigenmode_transmission(H, power, noise, tol)
    return result.covariance, result.capacity

def receive_side_covariance(H, power, noise, tol=RANK_TOL):
    """Optimal covariance S for the reciprocal channel H^H"""
    return optimal_covariance(np.asarray(H, dtype=complex).conj().T, power, noise, tol)[0]

def water_filled_capacity(H, power, noise, tol=RANK_TOL):
    """Capacity of H under eigenmode transmission

    Shares truncated_svd with eigenmode_transmission so both report bit-identical values.
    """
    s = truncated_svd(H, tol).singular
    allocation = water_fill(s, power, noise)
    return float(np.sum(np.log2(1 + s ** 2 * allocation.powers / noise)))

def metrics_of(H, power, noise, tol=RANK_TOL):
    H = np.asarray(H, dtype=complex)
    result = eigenmode_transmission(H, power, noise, tol)
    s = result.singular
    return ChannelMetrics(
        capacity=result.capacity,
        total_power=float(np.linalg.norm(H, 'fro') ** 2),
        strongest_eig_power=float(s[0] ** 2),
        condition_number=float(s[0] / s[-1]),
    )

def strongest_right_vector(H):
    """Unit right singular vector of the largest singular value

    Ties are broken by taking the first vector in the SVD ordering.
    """
    spectrum = truncated_svd(H)
    return spectrum.right[:, 0]

def check_covariance(Q, power=None, tol=1e-9):
    """Validate shape, Hermitian symmetry and (when power is given) the trace bound"""
    Q = np.asarray(Q, dtype=complex)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise InvalidCovariance("covariance must be square, got shape {}".format(Q.shape))
    if not np.allclose(Q, Q.conj().T, atol=1e-10 * max(1.0, np.abs(Q).max(initial=0))):
        raise InvalidCovariance("covariance is not Hermitian")
    if power is not None and np.trace(Q).real > power + tol:
        raise InvalidCovariance("covariance trace {:.6g} exceeds power {:.6g}".format(np.trace(Q).real, power))
    return Q

def covariance_factor(Q, tol=1e-9):
    """Return U V^(1/2) from the EVD Q = U V U^H

    Eigenvalues in [-tol, 0) are clamped to zero; anything more negative means
    Q is not positive semi-definite.
    """
    Q = check_covariance(Q)
    eigenvalues, U = linalg.eigh((Q + Q.conj().T) / 2)
    if eigenvalues.size and eigenvalues.min() < -tol:
        raise InvalidCovariance("covariance has negative eigenvalue {:.3g}".format(eigenvalues.min()))
    eigenvalues = np.clip(eigenvalues, 0, None)
    return U * np.sqrt(eigenvalues)
