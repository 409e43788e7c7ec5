"""Material tensors, Voigt machinery and frame rotations.

The module owns three things:

* Voigt 6-vector conventions (order 11, 22, 33, 23, 13, 12; engineering
  shear for strain, plain components for stress) and the conversions
  between 3x3 tensors and 6-vectors.
* Frame rotations plus the 6x6 stress bond-transformation matrix, used to
  express the film's piezoelectric tensor in an arbitrary device frame.
* The shipped literature-constant database (elastic compliance of the
  emitter host, piezoelectric tensor of the film, deformation potentials),
  loaded at runtime from a structured text file so that no physical
  constant is hard-coded in an operation.

Everything here works in SI units: compliance in 1/Pa, piezoelectric
constants in C/m^2, deformation potentials in eV.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import NonOrthogonalRotation, ParseError
from .textio import parse_blocks_file

__all__ = [
    "VOIGT_PAIRS",
    "stress_to_voigt", "voigt_to_stress",
    "strain_to_voigt", "voigt_to_strain",
    "bond_stress_matrix",
    "FrameRotation", "xcut_device_frame", "rotate_piezo_to_xcut",
    "ComplianceMatrix", "PiezoTensor", "DeformationPotentials",
    "MaterialsDatabase", "load_materials", "default_database_path",
]

# Voigt index -> symmetric tensor index pair, order 11 22 33 23 13 12
VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))


def stress_to_voigt(stress):
    """3x3 symmetric stress tensor -> Voigt 6-vector (no shear factors)."""
    s = np.asarray(stress, dtype=np.float64)
    return np.array([s[i, j] for i, j in VOIGT_PAIRS])


def voigt_to_stress(v):
    """Voigt stress 6-vector -> symmetric 3x3 tensor."""
    v = np.asarray(v, dtype=np.float64)
    out = np.empty((3, 3))
    for k, (i, j) in enumerate(VOIGT_PAIRS):
        out[i, j] = v[k]
        out[j, i] = v[k]
    return out


def strain_to_voigt(strain):
    """3x3 symmetric strain tensor -> engineering Voigt 6-vector.

    Shear entries carry the factor 2 (gamma = 2 * eps_ij).
    """
    e = np.asarray(strain, dtype=np.float64)
    out = np.array([e[i, j] for i, j in VOIGT_PAIRS])
    out[3:] *= 2.0
    return out


def voigt_to_strain(v):
    """Engineering Voigt strain 6-vector -> symmetric 3x3 tensor."""
    v = np.asarray(v, dtype=np.float64)
    out = np.empty((3, 3))
    for k, (i, j) in enumerate(VOIGT_PAIRS):
        comp = v[k] if k < 3 else 0.5 * v[k]
        out[i, j] = comp
        out[j, i] = comp
    return out


def bond_stress_matrix(rotation):
    """6x6 stress bond-transformation matrix M for a 3x3 rotation.

    M satisfies voigt(A s A^T) = M voigt(s) for any symmetric stress s.
    Closed form (no factor-2 rows; those belong to the strain variant,
    which equals inv(M)^T under the engineering-shear convention).
    """
    a = np.asarray(rotation, dtype=np.float64)
    m = np.empty((6, 6))
    pairs = VOIGT_PAIRS[3:]  # (1,2), (0,2), (0,1)
    for i in range(3):
        for j in range(3):
            m[i, j] = a[i, j] ** 2
        for jj, (p, q) in enumerate(pairs):
            m[i, 3 + jj] = 2.0 * a[i, p] * a[i, q]
    for ii, (r, s) in enumerate(pairs):
        for j in range(3):
            m[3 + ii, j] = a[r, j] * a[s, j]
        for jj, (p, q) in enumerate(pairs):
            m[3 + ii, 3 + jj] = a[r, p] * a[s, q] + a[r, q] * a[s, p]
    return m


@dataclass(frozen=True)
class FrameRotation:
    """Proper rotation taking crystal-frame components to device-frame ones.

    matrix rows are the device basis vectors expressed in crystal
    coordinates, so v_device = matrix @ v_crystal.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (3, 3):
            raise NonOrthogonalRotation("rotation must be 3x3")
        if not np.allclose(m @ m.T, np.eye(3), atol=1e-9):
            raise NonOrthogonalRotation("matrix is not orthogonal")
        if np.linalg.det(m) < 0.0:
            raise NonOrthogonalRotation("improper rotation (det = -1)")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    @classmethod
    def from_axes(cls, x_axis, z_axis):
        """Build a frame from its x and z axes given in crystal coordinates.

        The y axis completes the right-handed triad.
        """
        x = np.asarray(x_axis, dtype=np.float64)
        z = np.asarray(z_axis, dtype=np.float64)
        nx = np.linalg.norm(x)
        nz = np.linalg.norm(z)
        if nx == 0.0 or nz == 0.0:
            raise NonOrthogonalRotation("axis vectors must be nonzero")
        x = x / nx
        z = z / nz
        if abs(float(x @ z)) > 1e-9:
            raise NonOrthogonalRotation("x and z axes must be orthogonal")
        y = np.cross(z, x)
        return cls(np.vstack([x, y, z]))

    def compose(self, other: "FrameRotation") -> "FrameRotation":
        """Rotation equivalent to applying `other` first, then self."""
        return FrameRotation(self.matrix @ other.matrix)

    def inverse(self) -> "FrameRotation":
        return FrameRotation(self.matrix.T)


def xcut_device_frame():
    """Device frame convention for the x-cut film.

    Device x is the wafer normal (crystal X) and device z is the in-plane
    polar axis (crystal Z), the direction along which tuning voltages are
    applied.  With this labeling the device frame coincides with the
    crystal frame, so the rotation is the identity; the machinery stays
    fully general for any other cut via FrameRotation.from_axes.
    """
    return FrameRotation.identity()


def rotate_piezo_to_xcut(e_zcut, frame=None):
    """Express a 3x6 piezoelectric tensor (stress-charge form) in a device
    frame.

    Applies e_device = A @ e_crystal @ M^T where A is the frame rotation
    and M the stress bond matrix built from it.  `frame` defaults to the
    documented x-cut device frame.
    """
    if frame is None:
        frame = xcut_device_frame()
    e = np.asarray(e_zcut, dtype=np.float64)
    if e.shape != (3, 6):
        raise ParseError(f"piezo tensor must be 3x6, got {e.shape}")
    a = frame.matrix
    m = bond_stress_matrix(a)
    return a @ e @ m.T


@dataclass(frozen=True)
class ComplianceMatrix:
    """Elastic compliance in Voigt form, 1/Pa.

    Attributes:
        matrix: 6x6 symmetric positive-definite compliance.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (6, 6):
            raise ParseError("compliance must be 6x6")
        if not np.allclose(m, m.T, rtol=1e-9, atol=0.0):
            raise ParseError("compliance must be symmetric")
        if np.any(np.linalg.eigvalsh(m) <= 0.0):
            raise ParseError("compliance must be positive definite")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def cubic(cls, s11, s12, s44):
        """Cubic-symmetry compliance from its three independent constants."""
        m = np.zeros((6, 6))
        m[:3, :3] = s12
        np.fill_diagonal(m[:3, :3], s11)
        m[3, 3] = m[4, 4] = m[5, 5] = s44
        return cls(m)


@dataclass(frozen=True)
class PiezoTensor:
    """Piezoelectric tensor in stress-charge (e) form, C/m^2, 3x6 Voigt."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (3, 6):
            raise ParseError("piezo tensor must be 3x6")
        if not np.all(np.isfinite(m)):
            raise ParseError("piezo tensor has non-finite entries")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class DeformationPotentials:
    """Hydrostatic and shear deformation potentials of the emitter host, eV.

    Attributes:
        a_c: conduction-band hydrostatic potential.
        a_v: valence-band hydrostatic potential.
        b: tetragonal shear potential.
        d: rhombohedral shear potential.
    """

    a_c: float
    a_v: float
    b: float
    d: float


@dataclass(frozen=True)
class MaterialsDatabase:
    """Literature constants loaded from the shipped database file."""

    host_compliance: ComplianceMatrix
    film_piezo_zcut: PiezoTensor
    host_potentials: DeformationPotentials
    source_path: str


def default_database_path():
    return str(resources.files("ringqed") / "data" / "ln_gaas_materials.txt")


def load_materials(path=None):
    """Load the material database from a structured text file.

    The file needs three sections: a 6x6 compliance block, a 3x6
    piezoelectric block and a deformation-potential key/value block.
    Errors carry the offending line number.
    """
    if path is None:
        path = default_database_path()
    sections = parse_blocks_file(path)
    for name in ("host.compliance", "film.piezo_zcut",
                 "host.deformation_potentials"):
        if name not in sections:
            raise ParseError(f"missing section [{name}]", path=str(path))

    comp_sec = sections["host.compliance"]
    compliance = ComplianceMatrix(np.array(comp_sec.matrix(6, 6)))

    piezo_sec = sections["film.piezo_zcut"]
    piezo = PiezoTensor(np.array(piezo_sec.matrix(3, 6)))

    pot_sec = sections["host.deformation_potentials"]
    potentials = DeformationPotentials(
        a_c=pot_sec.get_float("a_c_ev"),
        a_v=pot_sec.get_float("a_v_ev"),
        b=pot_sec.get_float("b_ev"),
        d=pot_sec.get_float("d_ev"),
    )
    return MaterialsDatabase(
        host_compliance=compliance,
        film_piezo_zcut=piezo,
        host_potentials=potentials,
        source_path=str(path),
    )
