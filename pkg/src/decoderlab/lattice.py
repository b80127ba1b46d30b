"""Rotated surface code lattice: qubits, stabilizer faces, logical operators.

The code is the [[d^2, 1, d]] rotated surface code on a d x d grid of data
qubits, d odd.  Data qubits sit at integer coordinates (x, y) in
{0, ..., d-1}^2.  Stabilizers are X- or Z-type faces: weight-4 squares in the
bulk and weight-2 digons on the boundary.  X digons sit on the x = 0 and
x = d-1 sides, Z digons on the y = 0 and y = d-1 sides.

Indexing convention
-------------------
Qubits are 0-indexed, (x, y) in {0, ..., d-1}^2, and every index range [m]
below means {0, ..., m-1}.  The face inventory is

    X bulk:    squares S(x, y) for (x, y) in [d-1]^2 with x + y odd
    Z bulk:    squares S(x, y) for (x, y) in [d-1]^2 with x + y even
    X at x=0:    vertical digons  {(0, 2i), (0, 2i+1)},        i in [(d-1)/2]
    X at x=d-1:  vertical digons  {(d-1, 2i+1), (d-1, 2i+2)},  i in [(d-1)/2]
    Z at y=0:    horizontal digons {(2i+1, 0), (2i+2, 0)},     i in [(d-1)/2]
    Z at y=d-1:  horizontal digons {(2i, d-1), (2i+1, d-1)},   i in [(d-1)/2]

where S(x, y) = {(x, y), (x+1, y), (x, y+1), (x+1, y+1)}.

All coordinates are stored as *doubled* integers (x2, y2) = (2x, 2y) so that
the half-integer measurement-qubit positions are exact.  A bulk square S(x, y)
has its measurement qubit at (x + 1/2, y + 1/2), i.e. doubled (2x+1, 2y+1);
boundary digons place theirs just outside the lattice edge.

Logical representatives: logical Z is Z on the column x = 0, logical X is X
on the row y = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

Coord = tuple[int, int]  # doubled coordinates (x2, y2)


def coord(x2: int, y2: int) -> Coord:
    return (x2, y2)


@dataclass(frozen=True)
class Face:
    """One stabilizer face: its Pauli kind, lattice region, and support."""

    kind: str  # "X" or "Z"
    region: str  # "bulk" or "digon"
    qubits: frozenset[Coord]  # data-qubit support, doubled coords
    meas_coord: Coord  # measurement-qubit position, doubled coords

    def __post_init__(self) -> None:
        if self.kind not in ("X", "Z"):
            raise ValueError(f"face kind must be 'X' or 'Z', got {self.kind!r}")
        expected = 4 if self.region == "bulk" else 2
        if len(self.qubits) != expected:
            raise ValueError(
                f"{self.region} face must have {expected} qubits, got {len(self.qubits)}"
            )

    @property
    def weight(self) -> int:
        return len(self.qubits)


@dataclass
class SurfaceCode:
    """Distance-d rotated surface code geometry.

    Immutable after construction; safe to share between threads/processes.
    """

    d: int
    data_qubits: list[Coord]  # sorted, doubled coords; length d^2
    faces: list[Face]  # X faces first, then Z faces, each sorted by meas coord
    logical_z_support: frozenset[Coord]  # column x = 0
    logical_x_support: frozenset[Coord]  # row y = 0
    qubit_index: dict[Coord, int] = field(repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        if not self.qubit_index:
            self.qubit_index = {q: i for i, q in enumerate(self.data_qubits)}

    @property
    def n(self) -> int:
        return len(self.data_qubits)

    @property
    def x_faces(self) -> list[Face]:
        return [f for f in self.faces if f.kind == "X"]

    @property
    def z_faces(self) -> list[Face]:
        return [f for f in self.faces if f.kind == "Z"]

    def faces_containing(self, q: Coord, kind: str | None = None) -> list[Face]:
        return [
            f
            for f in self.faces
            if q in f.qubits and (kind is None or f.kind == kind)
        ]

    def to_json(self) -> str:
        """Export the geometry as JSON (doubled coordinates throughout)."""
        payload = {
            "d": self.d,
            "qubits": [list(q) for q in self.data_qubits],
            "faces": [
                {
                    "kind": f.kind,
                    "region": f.region,
                    "qubits": sorted(list(q) for q in f.qubits),
                    "meas": list(f.meas_coord),
                }
                for f in self.faces
            ],
            "logical_z": sorted(list(q) for q in self.logical_z_support),
            "logical_x": sorted(list(q) for q in self.logical_x_support),
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _square(x: int, y: int) -> frozenset[Coord]:
    return frozenset(
        {(2 * x, 2 * y), (2 * x + 2, 2 * y), (2 * x, 2 * y + 2), (2 * x + 2, 2 * y + 2)}
    )


def build_surface_code(d: int) -> SurfaceCode:
    """Build the distance-d rotated surface code (d odd, d >= 3)."""
    if d < 3:
        raise ValueError(f"distance must be at least 3, got d={d}")
    if d % 2 == 0:
        raise ValueError(
            f"only odd distances are supported, got even d={d}"
        )

    half = (d - 1) // 2
    x_faces: list[Face] = []
    z_faces: list[Face] = []

    # Bulk squares: kind decided by the (x + y) parity of the lower-left corner.
    for x in range(d - 1):
        for y in range(d - 1):
            face = Face(
                kind="X" if (x + y) % 2 == 1 else "Z",
                region="bulk",
                qubits=_square(x, y),
                meas_coord=(2 * x + 1, 2 * y + 1),
            )
            (x_faces if face.kind == "X" else z_faces).append(face)

    # X digons on the x = 0 and x = d-1 sides (vertical qubit pairs).
    for i in range(half):
        z0 = 2 * i
        x_faces.append(
            Face(
                kind="X",
                region="digon",
                qubits=frozenset({(0, 2 * z0), (0, 2 * z0 + 2)}),
                meas_coord=(-1, 2 * z0 + 1),
            )
        )
        z1 = 2 * i + 1
        x_faces.append(
            Face(
                kind="X",
                region="digon",
                qubits=frozenset({(2 * (d - 1), 2 * z1), (2 * (d - 1), 2 * z1 + 2)}),
                meas_coord=(2 * d - 1, 2 * z1 + 1),
            )
        )

    # Z digons on the y = 0 and y = d-1 sides (horizontal qubit pairs).
    for i in range(half):
        x1 = 2 * i + 1
        z_faces.append(
            Face(
                kind="Z",
                region="digon",
                qubits=frozenset({(2 * x1, 0), (2 * x1 + 2, 0)}),
                meas_coord=(2 * x1 + 1, -1),
            )
        )
        x0 = 2 * i
        z_faces.append(
            Face(
                kind="Z",
                region="digon",
                qubits=frozenset({(2 * x0, 2 * (d - 1)), (2 * x0 + 2, 2 * (d - 1))}),
                meas_coord=(2 * x0 + 1, 2 * d - 1),
            )
        )

    x_faces.sort(key=lambda f: f.meas_coord)
    z_faces.sort(key=lambda f: f.meas_coord)
    faces = x_faces + z_faces

    data_qubits = sorted((2 * x, 2 * y) for x in range(d) for y in range(d))
    code = SurfaceCode(
        d=d,
        data_qubits=data_qubits,
        faces=faces,
        logical_z_support=frozenset((0, 2 * y) for y in range(d)),
        logical_x_support=frozenset((2 * x, 0) for x in range(d)),
    )

    assert code.n == d * d
    assert len(faces) == d * d - 1
    assert len(x_faces) == len(z_faces) == (d * d - 1) // 2
    _check_group(code)
    return code


def stabilizer_of(code: SurfaceCode, face: Face) -> dict[Coord, str]:
    """Pauli operator of a face: {qubit: 'X'|'Z'} on its support, identity elsewhere."""
    if face not in code.faces:
        raise ValueError("face does not belong to this code")
    return {q: face.kind for q in face.qubits}


def pauli_commutes(a: dict[Coord, str], b: dict[Coord, str]) -> bool:
    """Symplectic commutation test for Pauli dicts {qubit: 'X'|'Y'|'Z'}."""
    anti = 0
    for q, pa in a.items():
        pb = b.get(q)
        if pb is not None and pa != pb:
            anti ^= 1
    return anti == 0


def pauli_product_support(ops: Iterable[dict[Coord, str]]) -> dict[Coord, str]:
    """Multiply single-type Pauli dicts over GF(2); returns the surviving support."""
    acc: dict[Coord, list[int]] = {}
    for op in ops:
        for q, p in op.items():
            x = 1 if p in ("X", "Y") else 0
            z = 1 if p in ("Z", "Y") else 0
            cur = acc.setdefault(q, [0, 0])
            cur[0] ^= x
            cur[1] ^= z
    out: dict[Coord, str] = {}
    for q, (x, z) in acc.items():
        if x and z:
            out[q] = "Y"
        elif x:
            out[q] = "X"
        elif z:
            out[q] = "Z"
    return out


def _check_group(code: SurfaceCode) -> None:
    """Construction-time sanity: abelian generators, logicals commute with them."""
    # X and Z faces of the same type trivially commute; cross pairs must
    # overlap on an even number of qubits.
    for fx in code.x_faces:
        for fz in code.z_faces:
            if len(fx.qubits & fz.qubits) % 2 != 0:
                raise AssertionError(
                    f"anticommuting generator pair: {fx.meas_coord} vs {fz.meas_coord}"
                )
    lz = {q: "Z" for q in code.logical_z_support}
    lx = {q: "X" for q in code.logical_x_support}
    for f in code.faces:
        s = {q: f.kind for q in f.qubits}
        if not pauli_commutes(lz, s) or not pauli_commutes(lx, s):
            raise AssertionError(f"logical operator anticommutes with face {f.meas_coord}")
    if pauli_commutes(lz, lx):
        raise AssertionError("logical Z and logical X must anticommute")


def stabilizer_matrix(code: SurfaceCode, kind: str) -> np.ndarray:
    """Binary support matrix of the kind-'X' or kind-'Z' generators, shape (m, n)."""
    faces = code.x_faces if kind == "X" else code.z_faces
    mat = np.zeros((len(faces), code.n), dtype=np.uint8)
    for i, f in enumerate(faces):
        for q in f.qubits:
            mat[i, code.qubit_index[q]] = 1
    return mat
