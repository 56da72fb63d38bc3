"""Link geometry: receive-array construction and ray path gains.

Models a rectangular room with a fixed transmitter, a four-element receive
array (uniform linear or Pi-shaped), free-space line-of-sight propagation
and a single wall-reflected replica ray computed by the image method.
"""

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0

WALLS = ("-x", "+x", "-y", "+y")


class InvalidGeometryError(ValueError):
    """Array or scenario parameters are geometrically inconsistent."""


class SingularGeometryError(ValueError):
    """An element coincides with the transmitter."""


class InvalidRayError(ValueError):
    """A replica ray does not reflect off a wall of the room."""


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise InvalidGeometryError(f"expected a 3-vector, got shape {a.shape}")
    return a


def _unit3(v, what: str) -> np.ndarray:
    a = _vec3(v)
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > 1e-9:
        raise InvalidGeometryError(f"{what} must be a unit vector, |v| = {norm}")
    return a


@dataclass(frozen=True)
class ElementPlacement:
    """One receive dipole: arm-axis direction and position in meters."""

    position: np.ndarray
    polarization: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _vec3(self.position))
        object.__setattr__(
            self, "polarization", _unit3(self.polarization, "element polarization")
        )


@dataclass(frozen=True)
class ArrayLayout:
    """Ordered receive elements; indexing follows the 1-based dipole numbers."""

    kind: str
    elements: tuple

    def __post_init__(self):
        if self.kind not in ("ula", "pi", "custom"):
            raise InvalidGeometryError(f"unknown array kind {self.kind!r}")
        elements = tuple(self.elements)
        if len(elements) < 2:
            raise InvalidGeometryError("array needs at least two elements")
        positions = np.stack([e.position for e in elements])
        for i in range(len(elements)):
            for j in range(i + 1, len(elements)):
                if np.linalg.norm(positions[i] - positions[j]) == 0.0:
                    raise InvalidGeometryError(
                        f"elements {i + 1} and {j + 1} share a position"
                    )
        if self.kind == "ula":
            _check_uniform_line(positions)
        object.__setattr__(self, "elements", elements)

    def __len__(self):
        return len(self.elements)

    def positions(self) -> np.ndarray:
        return np.stack([e.position for e in self.elements])


def _check_uniform_line(positions: np.ndarray, tol: float = 1e-9):
    steps = np.diff(positions, axis=0)
    first = steps[0]
    for k, step in enumerate(steps[1:], start=2):
        if np.linalg.norm(step - first) > tol:
            raise InvalidGeometryError(
                f"ULA spacing breaks between elements {k} and {k + 1}"
            )


@dataclass(frozen=True)
class Scenario:
    """Room, carrier and link placement for one measurement campaign."""

    tx_position: np.ndarray
    rx_centroid: np.ndarray
    tx_polarization: np.ndarray = (0.0, 0.0, 1.0)
    frequency_hz: float = 2.4e9
    tx_rx_distance_m: float = 4.5
    antenna_height_m: float = 1.5
    room_width_m: float = 9.0
    room_length_m: float = 12.0

    def __post_init__(self):
        object.__setattr__(self, "tx_position", _vec3(self.tx_position))
        object.__setattr__(self, "rx_centroid", _vec3(self.rx_centroid))
        object.__setattr__(
            self, "tx_polarization", _unit3(self.tx_polarization, "tx polarization")
        )
        if self.frequency_hz <= 0.0:
            raise InvalidGeometryError("carrier frequency must be positive")
        d = float(np.linalg.norm(self.tx_position - self.rx_centroid))
        if abs(d - self.tx_rx_distance_m) > 1e-6:
            raise InvalidGeometryError(
                f"tx-rx separation {d} m disagrees with "
                f"tx_rx_distance_m = {self.tx_rx_distance_m} m"
            )

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @classmethod
    def standard(cls, frequency_hz: float = 2.4e9, tx_rx_distance_m: float = 4.5,
                 antenna_height_m: float = 1.5, room_width_m: float = 9.0,
                 room_length_m: float = 12.0, link_offset_x_m: float = 0.0,
                 tx_polarization=(0.0, 0.0, 1.0)) -> "Scenario":
        """Link along the room's long axis, centered unless offset sideways."""
        x = room_width_m / 2.0 + link_offset_x_m
        y0 = (room_length_m - tx_rx_distance_m) / 2.0
        tx = np.array([x, y0, antenna_height_m])
        rx = np.array([x, y0 + tx_rx_distance_m, antenna_height_m])
        return cls(
            tx_position=tx,
            rx_centroid=rx,
            tx_polarization=tx_polarization,
            frequency_hz=frequency_hz,
            tx_rx_distance_m=tx_rx_distance_m,
            antenna_height_m=antenna_height_m,
            room_width_m=room_width_m,
            room_length_m=room_length_m,
        )


@dataclass(frozen=True)
class RayPath:
    """One propagation path: direct line of sight or a wall-reflected replica.

    For replicas, ``wall`` names the reflecting plane and ``polarization``
    gives the reflected-field orientation (the reflection may rotate it);
    ``blocked_elements`` lists 1-based element indices that the replica
    cannot reach.
    """

    kind: str
    wall: str | None = None
    reflection_point: np.ndarray | None = None
    amplitude_scale: float = 0.5
    blocked_elements: frozenset = field(default_factory=frozenset)
    polarization: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("los", "replica"):
            raise InvalidRayError(f"unknown ray kind {self.kind!r}")
        if self.amplitude_scale < 0.0:
            raise InvalidRayError("amplitude_scale must be non-negative")
        object.__setattr__(self, "blocked_elements", frozenset(self.blocked_elements))
        if self.kind == "replica" and self.wall is None and self.reflection_point is None:
            raise InvalidRayError("replica ray needs a wall or a reflection point")
        if self.wall is not None and self.wall not in WALLS:
            raise InvalidRayError(f"unknown wall {self.wall!r}; expected one of {WALLS}")
        if self.reflection_point is not None:
            object.__setattr__(self, "reflection_point", _vec3(self.reflection_point))
        if self.polarization is not None:
            object.__setattr__(
                self, "polarization", _unit3(self.polarization, "replica polarization")
            )


def build_ula(spacing_m: float, centroid, polarization=(0.0, 0.0, 1.0),
              axis=(1.0, 0.0, 0.0), n_elements: int = 4) -> ArrayLayout:
    """Collinear elements with uniform spacing and a common polarization."""
    if spacing_m <= 0.0:
        raise InvalidGeometryError(f"ULA spacing must be positive, got {spacing_m}")
    if n_elements < 2:
        raise InvalidGeometryError("ULA needs at least two elements")
    centroid = _vec3(centroid)
    axis = _unit3(axis, "array axis")
    pol = _unit3(polarization, "element polarization")
    elements = []
    for i in range(n_elements):
        offset = (i - (n_elements - 1) / 2.0) * spacing_m
        elements.append(ElementPlacement(centroid + offset * axis, pol))
    return ArrayLayout("ula", tuple(elements))


def build_pi(leg_m: float, top_m: float, centroid, bar_axis=(1.0, 0.0, 0.0),
             leg_axis=(0.0, 0.0, -1.0),
             parallel_polarization=(0.0, 0.0, 1.0)) -> ArrayLayout:
    """Four elements on the corners of a Pi shape.

    Elements 2 and 3 sit on the top bar and keep the co-polarized
    orientation; elements 1 and 4 sit at the leg ends with their arms
    turned along the bar, i.e. perpendicular to the transmit dipole.
    """
    if leg_m <= 0.0 or top_m <= 0.0:
        raise InvalidGeometryError(
            f"Pi dimensions must be positive, got leg={leg_m}, top={top_m}"
        )
    centroid = _vec3(centroid)
    bar = _unit3(bar_axis, "bar axis")
    leg = _unit3(leg_axis, "leg axis")
    if abs(float(np.dot(bar, leg))) > 1e-9:
        raise InvalidGeometryError("bar and leg axes must be perpendicular")
    par_pol = _unit3(parallel_polarization, "parallel polarization")
    top_corner_l = centroid - (top_m / 2.0) * bar - (leg_m / 2.0) * leg
    top_corner_r = centroid + (top_m / 2.0) * bar - (leg_m / 2.0) * leg
    elements = (
        ElementPlacement(top_corner_l + leg_m * leg, bar),
        ElementPlacement(top_corner_l, par_pol),
        ElementPlacement(top_corner_r, par_pol),
        ElementPlacement(top_corner_r + leg_m * leg, bar),
    )
    return ArrayLayout("pi", elements)


def polarization_match(tx_pol, el_pol, direction=None) -> float:
    """|cos| coupling between transmit and element polarizations.

    With ``direction`` given, both axes are first projected onto the plane
    transverse to the propagation direction, so an arm pointing along the
    ray contributes nothing. The gain models use the plain |cos| (ideal
    match between the dipole arms); imperfect cross-polarization isolation
    enters through the explicit leakage floor instead.
    """
    t = _vec3(tx_pol)
    e = _vec3(el_pol)
    if direction is not None:
        k = _vec3(direction)
        k = k / np.linalg.norm(k)
        t = t - np.dot(t, k) * k
        e = e - np.dot(e, k) * k
    return abs(float(np.dot(t, e)))


def los_gains(scenario: Scenario, layout: ArrayLayout,
              leakage: float = 0.0) -> np.ndarray:
    """Free-space line-of-sight complex gain per element.

    h_i = (lambda / 4 pi d_i) * m_i * exp(-j 2 pi d_i / lambda), with m_i
    the polarization-match factor floored at ``leakage`` to model imperfect
    cross-polarization isolation.
    """
    lam = scenario.wavelength_m
    tx = scenario.tx_position
    gains = np.empty(len(layout), dtype=np.complex128)
    for i, el in enumerate(layout.elements):
        delta = el.position - tx
        d = float(np.linalg.norm(delta))
        if d == 0.0:
            raise SingularGeometryError(f"element {i + 1} coincides with the transmitter")
        m = polarization_match(scenario.tx_polarization, el.polarization)
        m = max(m, leakage)
        amp = lam / (4.0 * math.pi * d) * m
        gains[i] = amp * np.exp(-2j * math.pi * d / lam)
    return gains


def _wall_plane(scenario: Scenario, wall: str) -> tuple:
    """(axis index, plane coordinate) of a wall."""
    if wall == "-x":
        return 0, 0.0
    if wall == "+x":
        return 0, scenario.room_width_m
    if wall == "-y":
        return 1, 0.0
    if wall == "+y":
        return 1, scenario.room_length_m
    raise InvalidRayError(f"unknown wall {wall!r}")


def _infer_wall(scenario: Scenario, point: np.ndarray) -> str:
    for wall in WALLS:
        axis, coord = _wall_plane(scenario, wall)
        if abs(point[axis] - coord) <= 1e-6:
            return wall
    raise InvalidRayError(f"reflection point {point} does not lie on a room wall")


def _mirror(point: np.ndarray, axis: int, coord: float) -> np.ndarray:
    out = point.copy()
    out[axis] = 2.0 * coord - out[axis]
    return out


def replica_gains(scenario: Scenario, layout: ArrayLayout,
                  ray: RayPath) -> np.ndarray:
    """Single wall-bounce complex gain per element via the image method.

    Free-space loss over the full reflected path, scaled by the reflection
    coefficient; blocked elements are exactly zero. The per-element
    reflection points must land on the wall inside the room.
    """
    if ray.kind != "replica":
        raise InvalidRayError(f"expected a replica ray, got kind {ray.kind!r}")
    wall = ray.wall
    if wall is None:
        wall = _infer_wall(scenario, ray.reflection_point)
    elif ray.reflection_point is not None:
        axis, coord = _wall_plane(scenario, wall)
        if abs(ray.reflection_point[axis] - coord) > 1e-6:
            raise InvalidRayError(
                f"reflection point {ray.reflection_point} is not on wall {wall}"
            )
    axis, coord = _wall_plane(scenario, wall)
    image = _mirror(scenario.tx_position, axis, coord)
    lam = scenario.wavelength_m
    field_pol = (
        ray.polarization if ray.polarization is not None else scenario.tx_polarization
    )
    lateral_axis = 1 if axis == 0 else 0
    lateral_extent = scenario.room_length_m if axis == 0 else scenario.room_width_m
    gains = np.zeros(len(layout), dtype=np.complex128)
    for i, el in enumerate(layout.elements):
        if (i + 1) in ray.blocked_elements:
            continue
        delta = el.position - image
        path = float(np.linalg.norm(delta))
        if path == 0.0:
            raise SingularGeometryError(
                f"element {i + 1} coincides with the transmitter image"
            )
        # Where the image ray pierces the wall plane; must stay inside the room.
        t = (coord - image[axis]) / delta[axis] if delta[axis] != 0.0 else math.inf
        if not 0.0 <= t <= 1.0:
            raise InvalidRayError(
                f"replica to element {i + 1} never crosses wall {wall}"
            )
        hit = image + t * delta
        if not 0.0 <= hit[lateral_axis] <= lateral_extent or hit[2] < 0.0:
            raise InvalidRayError(
                f"replica reflection point {hit} for element {i + 1} "
                f"falls outside wall {wall}"
            )
        m = abs(float(np.dot(field_pol, el.polarization)))
        amp = ray.amplitude_scale * lam / (4.0 * math.pi * path) * m
        gains[i] = amp * np.exp(-2j * math.pi * path / lam)
    return gains
