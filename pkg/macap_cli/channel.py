"""Far-field field-response channel model.

H(t, r) = F(r)^H . Sigma . G(t), where G and F stack the per-antenna field
response vectors of the transmit and receive sides and Sigma couples the
transmit paths to the receive paths.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from macap_cli.errors import ShapeMismatch
from macap_cli.geometry import AntennaLayout, Position, Rectangle, Region

@dataclass(frozen=True, eq=False)
class PathSet:
    """Elevation and azimuth angles (radians, in [0, pi]) of L propagation paths"""
    elevation: np.ndarray
    azimuth: np.ndarray

    def __post_init__(self):
        elevation = np.asarray(self.elevation, dtype=float).reshape(-1)
        azimuth = np.asarray(self.azimuth, dtype=float).reshape(-1)
        if elevation.shape != azimuth.shape:
            raise ShapeMismatch("elevation and azimuth must have equal lengths, got {} and {}".format(
                len(elevation), len(azimuth)))
        for name, angles in (('elevation', elevation), ('azimuth', azimuth)):
            if np.any(angles < 0) or np.any(angles > np.pi) or not np.all(np.isfinite(angles)):
                raise ValueError("{} angles must lie in [0, pi]".format(name))
        object.__setattr__(self, 'elevation', elevation)
        object.__setattr__(self, 'azimuth', azimuth)

    def __len__(self):
        return len(self.elevation)

    @property
    def direction_x(self):
        """x component of each path's wave vector, sin(theta) cos(phi)"""
        return np.sin(self.elevation) * np.cos(self.azimuth)

    @property
    def direction_y(self):
        """y component of each path's wave vector, cos(theta)"""
        return np.cos(self.elevation)

@dataclass(frozen=True, eq=False)
class ChannelScene:
    tx_paths: PathSet
    rx_paths: PathSet
    sigma: np.ndarray
    wavelength: float
    tx_region: Region
    rx_region: Region
    min_distance: float

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=complex)
        if sigma.shape != (len(self.rx_paths), len(self.tx_paths)):
            raise ShapeMismatch("sigma must have shape (L_r, L_t) = ({}, {}), got {}".format(
                len(self.rx_paths), len(self.tx_paths), sigma.shape))
        if not np.all(np.isfinite(sigma)):
            raise ValueError("sigma entries must be finite")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        object.__setattr__(self, 'sigma', sigma)

    def translated(self, dx, dy):
        """The same channel with both regions moved by (dx, dy)

        Moving the phase reference rotates every path gain. sigma is counter-rotated
        so that layouts shifted along with the regions see exactly the original
        channel matrix.
        """
        shift = Position(dx, dy)
        d_rx = field_response(shift, self.rx_paths, self.wavelength)
        d_tx = field_response(shift, self.tx_paths, self.wavelength)
        return ChannelScene(
            tx_paths=self.tx_paths,
            rx_paths=self.rx_paths,
            sigma=d_rx[:, None] * self.sigma * d_tx.conj()[None, :],
            wavelength=self.wavelength,
            tx_region=self.tx_region.shifted(dx, dy),
            rx_region=self.rx_region.shifted(dx, dy),
            min_distance=self.min_distance,
        )

def _as_positions(positions):
    if isinstance(positions, AntennaLayout):
        return positions.array
    array = np.asarray(positions, dtype=float)
    if array.ndim == 1:
        array = array.reshape(1, -1)
    if array.ndim != 2 or array.shape[1] != 2:
        raise ShapeMismatch("positions must have shape (count, 2), got {}".format(array.shape))
    return array

def propagation_offset(p, k, paths):
    """Path length difference of path k between p and the region origin"""
    return p.x * paths.direction_x[k] + p.y * paths.direction_y[k]

def field_response(p, paths, wavelength):
    rho = p.x * paths.direction_x + p.y * paths.direction_y
    return np.exp(1j * 2 * np.pi * rho / wavelength)

def field_response_matrix(positions, paths, wavelength):
    """Field responses of every antenna as the columns of an (L, count) matrix"""
    array = _as_positions(positions)
    rho = np.outer(paths.direction_x, array[:, 0]) + np.outer(paths.direction_y, array[:, 1])
    return np.exp(1j * 2 * np.pi * rho / wavelength)

def assemble_channel(scene, tx, rx):
    """The (M, N) channel matrix between the transmit and receive antennas"""
    G = field_response_matrix(tx, scene.tx_paths, scene.wavelength)
    F = field_response_matrix(rx, scene.rx_paths, scene.wavelength)
    if G.shape[1] == 0 or F.shape[1] == 0:
        raise ShapeMismatch("both layouts need at least one antenna")
    return F.conj().T @ scene.sigma @ G

def _random_paths(rng, count):
    elevation = rng.uniform(0, np.pi, size=count)
    azimuth = rng.uniform(0, np.pi, size=count)
    return PathSet(elevation, azimuth)

def random_scene(paths, wavelength, region_size, min_distance, seed):
    """Draw a scene with L_t = L_r = paths and a diagonal path response matrix

    The diagonal entries are CN(0, 1/paths) and all angles are uniform on
    [0, pi]. seed (an int or a numpy SeedSequence) is split into three
    independent streams consumed in a fixed order: sigma, transmit angles,
    receive angles.
    """
    if paths < 1:
        raise ValueError("paths must be at least 1")
    if isinstance(seed, np.random.SeedSequence):
        # Fresh copy: spawning mutates the sequence and would change repeated draws
        seq = np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key)
    else:
        seq = np.random.SeedSequence(seed)
    sigma_rng, tx_rng, rx_rng = (np.random.default_rng(s) for s in seq.spawn(3))

    scale = math.sqrt(1 / (2 * paths))
    gains = scale * (sigma_rng.standard_normal(paths) + 1j * sigma_rng.standard_normal(paths))
    region = Rectangle.square(region_size)
    scene = ChannelScene(
        tx_paths=_random_paths(tx_rng, paths),
        rx_paths=_random_paths(rx_rng, paths),
        sigma=np.diag(gains),
        wavelength=wavelength,
        tx_region=region,
        rx_region=region,
        min_distance=min_distance,
    )
    logging.debug("random scene: L={} A={:.4g} D={:.4g}".format(paths, region_size, min_distance))
    return scene
