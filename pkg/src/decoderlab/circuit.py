"""Syndrome-extraction circuit, fault model, and Pauli-frame simulation.

Each round has six steps:

    step 0:   reset every measurement qubit (X faces to |+>, Z faces to |0>)
    steps 1-4: CNOT layers; X-face ancillas are controls, Z-face ancillas
               targets, with the data-qubit offsets below
    step 5:   measure every measurement qubit (X faces in X, Z faces in Z)

CNOT layer offsets (doubled coordinates; LT = left-top etc.):

    layer 1: X faces (bulk and x=d-1 side) read LT; Z faces (bulk, y=0) read LT
    layer 2: X faces (bulk and x=d-1 side) read LB; Z faces (bulk, y=0) read RT
    layer 3: X faces (bulk and x=0 side) read RT; Z faces (bulk, y=d-1) read LB
    layer 4: X faces (bulk and x=0 side) read RB; Z faces (bulk, y=d-1) read RB

Fault model: independent stochastic Pauli noise.  The fault-location
inventory covers the output of every reset, both qubits of every CNOT, every
measurement input, and data qubits at initialization, once per round while
resting, and before the final readout.  Sampling afflicts each circuit
element (reset, CNOT, measurement, idle/init/final slot) independently with
probability p; a hit on a one-qubit element draws uniformly from {X, Y, Z}
and a hit on a CNOT draws uniformly from the 15 nontrivial two-qubit Paulis.

Locations are split into two groups.  Graph locations (data-qubit slots plus
the ancilla record flips after reset and before measurement) are the
mechanisms that define decoding-graph edges: each flips at most two
same-type detectors within spacetime radius sqrt(3).  Mid-round ancilla gate
faults are sampled like everything else but are composites from the decoding
graph's point of view: an X landing on an X-face ancilla between CNOT layers
spreads to two data qubits and flips a detector pair two lattice units
apart, which the decoder resolves as a two-edge combination.

Simulation is by Pauli-frame propagation: the frame tracks the X/Z flips a
fault pattern induces relative to the noiseless reference run, which is exact
for Clifford circuits.  Measurement and detector bits in `ShotOutcome` are
therefore flips relative to the noiseless reference record.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import Coord, Face, SurfaceCode

# Doubled-coordinate corner offsets.
E_LT = (-1, 1)
E_LB = (-1, -1)
E_RT = (1, 1)
E_RB = (1, -1)

# Per-layer read directions and boundary-group participation.
_X_LAYERS = [(E_LT, "hi"), (E_LB, "hi"), (E_RT, "lo"), (E_RB, "lo")]
_Z_LAYERS = [(E_LT, "lo"), (E_RT, "lo"), (E_LB, "hi"), (E_RB, "hi")]

PAULIS = ("X", "Y", "Z")
_PAULI_XZ = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
# The 15 nontrivial two-qubit Paulis, as (pauli_on_A, pauli_on_B) with None = I.
TWO_QUBIT_PAULIS = [
    (a, b)
    for a in (None, "X", "Y", "Z")
    for b in (None, "X", "Y", "Z")
    if not (a is None and b is None)
]

RESET_STEP = 0
MEASURE_STEP = 5
N_STEPS = 6


@dataclass(frozen=True)
class CircuitOp:
    round: int
    step: int
    kind: str  # "RX", "RZ", "CNOT", "MX", "MZ"
    qubits: tuple[int, ...]  # (ancilla,) or (control, target)


@dataclass(frozen=True)
class FaultLocation:
    id: int
    slot: str  # after_reset | gate_a | gate_b | before_measure | data_init | data_idle | data_final
    qubit: int
    round: int  # -1 for data_init, `rounds` for data_final
    step: int  # -1 for data_init/data_final
    op_index: int  # index into Circuit.ops, -1 for non-op slots


@dataclass
class FaultSet:
    """Sampled faults: (location id, Pauli) entries with distinct locations."""

    entries: list[tuple[int, str]]

    def __post_init__(self) -> None:
        ids = [loc for loc, _ in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("fault locations must be distinct")

    def to_text(self) -> str:
        return "".join(f"{loc} {p}\n" for loc, p in self.entries)

    @classmethod
    def from_text(cls, text: str) -> "FaultSet":
        entries = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            loc, p = line.split()
            if p not in PAULIS:
                raise ValueError(f"bad Pauli {p!r}")
            entries.append((int(loc), p))
        return cls(entries)


class Circuit:
    """A `rounds`-round syndrome-extraction circuit with its fault inventory."""

    def __init__(self, code: SurfaceCode, rounds: int):
        if rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {rounds}")
        self.code = code
        self.rounds = rounds
        self.n_data = code.n
        self.n_faces = len(code.faces)
        self.nq = self.n_data + self.n_faces

        # Qubit indexing: data qubits first (sorted coords), then one ancilla
        # per face in code.faces order.
        self.data_index = dict(code.qubit_index)
        self.anc_index = {f: self.n_data + i for i, f in enumerate(code.faces)}
        self.qubit_coord: list[Coord] = list(code.data_qubits) + [
            f.meas_coord for f in code.faces
        ]
        self.face_kind = np.array(
            [0 if f.kind == "X" else 1 for f in code.faces], dtype=np.uint8
        )

        self.ops: list[CircuitOp] = []
        self._layer_gates: list[list[tuple[int, int]]] = [[] for _ in range(5)]
        self._build_round_template()
        self._expand_rounds()
        self._build_fault_inventory()

        # Numpy views used by the dense simulator.
        self._layer_ctrl = [
            np.array([c for c, _ in self._layer_gates[s]], dtype=np.int64)
            for s in range(1, 5)
        ]
        self._layer_tgt = [
            np.array([t for _, t in self._layer_gates[s]], dtype=np.int64)
            for s in range(1, 5)
        ]
        self._anc_arr = np.arange(self.n_data, self.nq, dtype=np.int64)
        self._data_arr = np.arange(self.n_data, dtype=np.int64)

        # Z/X face bookkeeping for measurement records.
        self.z_faces = self.code.z_faces
        self.x_faces = self.code.x_faces
        self.z_face_anc = np.array([self.anc_index[f] for f in self.z_faces])
        self.x_face_anc = np.array([self.anc_index[f] for f in self.x_faces])
        self._z_face_qubit_idx = [
            np.array(sorted(self.data_index[q] for q in f.qubits)) for f in self.z_faces
        ]
        self._x_face_qubit_idx = [
            np.array(sorted(self.data_index[q] for q in f.qubits)) for f in self.x_faces
        ]
        self.logical_z_idx = np.array(
            sorted(self.data_index[q] for q in code.logical_z_support)
        )
        self.logical_x_idx = np.array(
            sorted(self.data_index[q] for q in code.logical_x_support)
        )
        self.logical_z_set = frozenset(int(i) for i in self.logical_z_idx)
        self.logical_x_set = frozenset(int(i) for i in self.logical_x_idx)

        # Sparse-propagation lookups.
        self.anc_to_zface = {
            int(a): j for j, a in enumerate(self.z_face_anc)
        }
        self.anc_to_xface = {
            int(a): j for j, a in enumerate(self.x_face_anc)
        }
        self.zfaces_of_data: list[tuple[int, ...]] = [() for _ in range(self.n_data)]
        self.xfaces_of_data: list[tuple[int, ...]] = [() for _ in range(self.n_data)]
        for j, idx in enumerate(self._z_face_qubit_idx):
            for q in idx:
                self.zfaces_of_data[int(q)] = self.zfaces_of_data[int(q)] + (j,)
        for j, idx in enumerate(self._x_face_qubit_idx):
            for q in idx:
                self.xfaces_of_data[int(q)] = self.xfaces_of_data[int(q)] + (j,)

    # -- construction -------------------------------------------------------

    def _boundary_group(self, face: Face) -> str:
        """'bulk', or 'lo'/'hi' for the face's boundary side."""
        if face.region == "bulk":
            return "bulk"
        x2, y2 = face.meas_coord
        if face.kind == "X":
            return "lo" if x2 < 0 else "hi"
        return "lo" if y2 < 0 else "hi"

    def _build_round_template(self) -> None:
        code = self.code
        for layer in range(1, 5):
            gates: list[tuple[int, int]] = []
            for f in code.faces:
                group = self._boundary_group(f)
                if f.kind == "X":
                    off, participating = _X_LAYERS[layer - 1]
                    if group not in ("bulk", participating):
                        continue
                    anc = self.anc_index[f]
                    dq = (f.meas_coord[0] + off[0], f.meas_coord[1] + off[1])
                    gates.append((anc, self.data_index[dq]))  # ancilla controls
                else:
                    off, participating = _Z_LAYERS[layer - 1]
                    if group not in ("bulk", participating):
                        continue
                    anc = self.anc_index[f]
                    dq = (f.meas_coord[0] + off[0], f.meas_coord[1] + off[1])
                    gates.append((self.data_index[dq], anc))  # data controls
            used: set[int] = set()
            for c, t in gates:
                if c in used or t in used:
                    raise AssertionError(f"layer {layer}: qubit used twice in one step")
                used.update((c, t))
            self._layer_gates[layer] = gates

        # Per-step qubit -> (control, target) lookup for sparse propagation.
        self.gate_at: list[dict[int, tuple[int, int]]] = [dict() for _ in range(5)]
        for s in range(1, 5):
            for c, t in self._layer_gates[s]:
                self.gate_at[s][c] = (c, t)
                self.gate_at[s][t] = (c, t)

    def _expand_rounds(self) -> None:
        code = self.code
        for r in range(self.rounds):
            for f in code.faces:
                self.ops.append(
                    CircuitOp(r, RESET_STEP, "RX" if f.kind == "X" else "RZ",
                              (self.anc_index[f],))
                )
            for s in range(1, 5):
                for c, t in self._layer_gates[s]:
                    self.ops.append(CircuitOp(r, s, "CNOT", (c, t)))
            for f in code.faces:
                self.ops.append(
                    CircuitOp(r, MEASURE_STEP, "MX" if f.kind == "X" else "MZ",
                              (self.anc_index[f],))
                )

    def _build_fault_inventory(self) -> None:
        locs: list[FaultLocation] = []
        elements: list[tuple[int, ...]] = []

        def add(slot: str, qubit: int, rnd: int, step: int, op_index: int) -> int:
            loc = FaultLocation(len(locs), slot, qubit, rnd, step, op_index)
            locs.append(loc)
            return loc.id

        op_index = {op: i for i, op in enumerate(self.ops)}
        ops_by_round: list[list[CircuitOp]] = [[] for _ in range(self.rounds)]
        for op in self.ops:
            ops_by_round[op.round].append(op)

        for q in range(self.n_data):
            elements.append((add("data_init", q, -1, -1, -1),))

        for r in range(self.rounds):
            ops_r = ops_by_round[r]
            for op in ops_r:
                if op.step == RESET_STEP:
                    elements.append(
                        (add("after_reset", op.qubits[0], r, RESET_STEP, op_index[op]),)
                    )
            # One resting location per data qubit per round.
            for q in range(self.n_data):
                elements.append((add("data_idle", q, r, RESET_STEP, -1),))
            for s in range(1, 5):
                for op in ops_r:
                    if op.step == s:
                        a = add("gate_a", op.qubits[0], r, s, op_index[op])
                        b = add("gate_b", op.qubits[1], r, s, op_index[op])
                        elements.append((a, b))
            for op in ops_r:
                if op.step == MEASURE_STEP:
                    elements.append(
                        (add("before_measure", op.qubits[0], r, MEASURE_STEP,
                             op_index[op]),)
                    )

        for q in range(self.n_data):
            elements.append((add("data_final", q, self.rounds, -1, -1),))

        self.fault_locations = locs
        self.elements = elements
        # (round, step, qubit) -> location id, for fast fault scheduling.
        self.loc_by_point: dict[tuple[int, int, int], int] = {}
        for loc in locs:
            self.loc_by_point[(loc.round, loc.step, loc.qubit)] = loc.id

    def is_graph_location(self, loc_id: int) -> bool:
        """True for mechanisms that define decoding-graph edges.

        Data-qubit slots always qualify; ancilla slots qualify only as record
        flips (after reset, before measurement).  Mid-round ancilla gate
        faults are composite mechanisms.
        """
        loc = self.fault_locations[loc_id]
        if loc.qubit < self.n_data:
            return True
        return loc.slot in ("after_reset", "before_measure")

    # -- text export ----------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for op in self.ops:
            coords = []
            for q in op.qubits:
                coords.extend(self.qubit_coord[q])
            lines.append(f"{op.round} {op.step} {op.kind} " + " ".join(map(str, coords)))
        return "\n".join(lines) + "\n"


def build_syndrome_circuit(code: SurfaceCode, rounds: int) -> Circuit:
    return Circuit(code, rounds)


def circuit_from_text(text: str, code: SurfaceCode) -> Circuit:
    """Rebuild a circuit from its text form and check it against `code`."""
    rounds = 0
    parsed: list[tuple[int, int, str, tuple[int, ...]]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        r, s, kind = int(parts[0]), int(parts[1]), parts[2]
        nums = [int(v) for v in parts[3:]]
        coords = [(nums[i], nums[i + 1]) for i in range(0, len(nums), 2)]
        parsed.append((r, s, kind, tuple(coords)))
        rounds = max(rounds, r + 1)
    circ = Circuit(code, rounds)
    coord_index = {c: i for i, c in enumerate(circ.qubit_coord)}
    rebuilt = [
        CircuitOp(r, s, kind, tuple(coord_index[c] for c in coords))
        for r, s, kind, coords in parsed
    ]
    if rebuilt != circ.ops:
        raise ValueError("text does not describe the standard schedule for this code")
    return circ


# -- sampling -----------------------------------------------------------------


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Counter-based per-shot stream; shots are independent and order-free."""
    key = np.array([int(seed) % 2**64, int(shot) % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_faults(circuit: Circuit, p: float, rng: np.random.Generator) -> FaultSet:
    """Afflict each circuit element independently with probability p.

    Equivalent to per-element Bernoulli draws: the number of afflicted
    elements is Binomial(n, p) and the afflicted subset is uniform among
    subsets of that size, which is the same joint distribution.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability must be in [0, 1], got {p}")
    elements = circuit.elements
    n = len(elements)
    entries: list[tuple[int, str]] = []
    if p == 0.0 or n == 0:
        return FaultSet(entries)
    k = int(rng.binomial(n, p)) if p < 1.0 else n
    if k == 0:
        return FaultSet(entries)
    hit = rng.choice(n, size=k, replace=False) if k < n else np.arange(n)
    for ei in sorted(int(i) for i in hit):
        el = elements[ei]
        if len(el) == 1:
            entries.append((el[0], PAULIS[int(rng.integers(0, 3))]))
        else:
            pa, pb = TWO_QUBIT_PAULIS[int(rng.integers(0, 15))]
            if pa is not None:
                entries.append((el[0], pa))
            if pb is not None:
                entries.append((el[1], pb))
    return FaultSet(entries)


# -- simulation ---------------------------------------------------------------


@dataclass
class ShotOutcome:
    """Flip record of one shot relative to the noiseless reference run."""

    circuit: Circuit
    z_meas: np.ndarray  # (n_z_faces, rounds) measurement flips
    x_meas: np.ndarray  # (n_x_faces, rounds)
    final_data: np.ndarray  # (n_data,) Z-basis readout flips
    final_data_x: np.ndarray  # (n_data,) X-basis readout flips (mirror experiment)
    _z_det: np.ndarray | None = field(default=None, repr=False)
    _x_det: np.ndarray | None = field(default=None, repr=False)

    def z_detectors(self) -> np.ndarray:
        """Z-face detectors, shape (n_z_faces, rounds + 1).

        Column i is m[i-1] xor m[i] (column 0 is m[0]); the final column is
        synthetic, closed by reconstructing face parities from the Z-basis
        data readout.
        """
        if self._z_det is None:
            self._z_det = _detector_array(
                self.z_meas, self.final_data, self.circuit._z_face_qubit_idx
            )
        return self._z_det

    def x_detectors(self) -> np.ndarray:
        """X-face detectors with the synthetic column from the X-basis readout."""
        if self._x_det is None:
            self._x_det = _detector_array(
                self.x_meas, self.final_data_x, self.circuit._x_face_qubit_idx
            )
        return self._x_det

    def meas_dict(self) -> dict[tuple[Face, int], int]:
        out: dict[tuple[Face, int], int] = {}
        for j, f in enumerate(self.circuit.z_faces):
            for r in range(self.circuit.rounds):
                out[(f, r)] = int(self.z_meas[j, r])
        for j, f in enumerate(self.circuit.x_faces):
            for r in range(self.circuit.rounds):
                out[(f, r)] = int(self.x_meas[j, r])
        return out

    def detector_dict(self) -> dict[tuple[Face, int], int]:
        out: dict[tuple[Face, int], int] = {}
        zd = self.z_detectors()
        xd = self.x_detectors()
        for j, f in enumerate(self.circuit.z_faces):
            for r in range(zd.shape[1]):
                out[(f, r)] = int(zd[j, r])
        for j, f in enumerate(self.circuit.x_faces):
            for r in range(xd.shape[1]):
                out[(f, r)] = int(xd[j, r])
        return out

    def final_data_dict(self) -> dict[Coord, int]:
        code = self.circuit.code
        return {q: int(self.final_data[i]) for q, i in code.qubit_index.items()}

    def logical_z_readout_flip(self) -> int:
        return int(self.final_data[self.circuit.logical_z_idx].sum() % 2)


def _detector_array(meas: np.ndarray, final_flips: np.ndarray,
                    face_qubits: list[np.ndarray]) -> np.ndarray:
    n_f, rounds = meas.shape
    det = np.zeros((n_f, rounds + 1), dtype=np.uint8)
    det[:, 0] = meas[:, 0]
    det[:, 1:rounds] = meas[:, 1:] ^ meas[:, :-1]
    synth = np.array([final_flips[idx].sum() % 2 for idx in face_qubits], dtype=np.uint8)
    det[:, rounds] = meas[:, rounds - 1] ^ synth
    return det


def _faults_by_point(circuit: Circuit, faults: FaultSet) -> dict[tuple[int, int], list[tuple[int, str]]]:
    """Group fault entries by (round, step) application point."""
    out: dict[tuple[int, int], list[tuple[int, str]]] = {}
    for loc_id, pauli in faults.entries:
        loc = circuit.fault_locations[loc_id]
        out.setdefault((loc.round, loc.step), []).append((loc.qubit, pauli))
    return out


def simulate_shot(circuit: Circuit, faults: FaultSet) -> ShotOutcome:
    """Reference Pauli-frame simulation over the full circuit."""
    nq = circuit.nq
    fx = np.zeros(nq, dtype=np.uint8)
    fz = np.zeros(nq, dtype=np.uint8)
    by_point = _faults_by_point(circuit, faults)

    def apply(point: tuple[int, int]) -> None:
        for q, pauli in by_point.get(point, ()):
            px, pz = _PAULI_XZ[pauli]
            fx[q] ^= px
            fz[q] ^= pz

    n_z, n_x = len(circuit.z_faces), len(circuit.x_faces)
    z_meas = np.zeros((n_z, circuit.rounds), dtype=np.uint8)
    x_meas = np.zeros((n_x, circuit.rounds), dtype=np.uint8)

    apply((-1, -1))
    for r in range(circuit.rounds):
        fx[circuit._anc_arr] = 0
        fz[circuit._anc_arr] = 0
        apply((r, RESET_STEP))
        for s in range(1, 5):
            ctrl, tgt = circuit._layer_ctrl[s - 1], circuit._layer_tgt[s - 1]
            fx[tgt] ^= fx[ctrl]
            fz[ctrl] ^= fz[tgt]
            apply((r, s))
        apply((r, MEASURE_STEP))
        z_meas[:, r] = fx[circuit.z_face_anc]  # MZ flips on X or Y frame
        x_meas[:, r] = fz[circuit.x_face_anc]  # MX flips on Z or Y frame
    apply((circuit.rounds, -1))

    return ShotOutcome(
        circuit=circuit,
        z_meas=z_meas,
        x_meas=x_meas,
        final_data=fx[circuit._data_arr].copy(),
        final_data_x=fz[circuit._data_arr].copy(),
    )


@dataclass(frozen=True)
class FaultResponse:
    """Detector and logical effect of a single Pauli fault."""

    z_flips: tuple[tuple[int, int], ...]  # (z_face_index, detector_row)
    x_flips: tuple[tuple[int, int], ...]  # (x_face_index, detector_row)
    z_action: int  # flips logical-Z readout parity
    x_action: int  # flips logical-X readout parity (mirror experiment)


def single_fault_response(circuit: Circuit, loc_id: int, pauli: str) -> FaultResponse:
    """Detector flips of one fault, via sparse propagation with early stop.

    Propagation runs from the fault's application point and stops once the
    frame is steady: after a full round in which the frame lives only on data
    qubits, every later round's measurement flips repeat identically, so no
    further detectors flip and the synthetic-row contributions cancel.
    Exactness against `simulate_shot` is checked exhaustively in the tests.
    """
    loc = circuit.fault_locations[loc_id]
    px, pz = _PAULI_XZ[pauli]
    R = circuit.rounds
    n_data = circuit.n_data

    frame: dict[int, int] = {loc.qubit: px | (pz << 1)}  # bit0 = X, bit1 = Z

    z_mflips: dict[tuple[int, int], int] = {}
    x_mflips: dict[tuple[int, int], int] = {}
    anc_face = circuit.anc_to_zface
    x_anc_face = circuit.anc_to_xface

    start_round = 0 if loc.round < 0 else loc.round
    start_step = 0 if loc.round < 0 else loc.step + 1
    if loc.slot == "before_measure":
        start_step = MEASURE_STEP
    if loc.slot == "data_final":
        start_round, start_step = R, 0  # skip the loop entirely

    r = start_round
    while r < R:
        s0 = start_step if r == start_round else 0
        for s in range(s0, N_STEPS):
            if s == RESET_STEP:
                for q in [q for q in frame if q >= n_data]:
                    del frame[q]
            elif s == MEASURE_STEP:
                for q, v in list(frame.items()):
                    if q < n_data:
                        continue
                    j = anc_face.get(q)
                    if j is not None and (v & 1):
                        z_mflips[(j, r)] = z_mflips.get((j, r), 0) ^ 1
                    jx = x_anc_face.get(q)
                    if jx is not None and (v & 2):
                        x_mflips[(jx, r)] = x_mflips.get((jx, r), 0) ^ 1
            else:
                gate_map = circuit.gate_at[s]
                touched = {gate_map[q] for q in frame if q in gate_map}
                for c, t in touched:
                    v_c = frame.get(c, 0)
                    v_t = frame.get(t, 0)
                    new_t = v_t ^ (v_c & 1)  # X propagates control -> target
                    new_c = v_c ^ (v_t & 2)  # Z propagates target -> control
                    for qq, vv in ((c, new_c), (t, new_t)):
                        if vv:
                            frame[qq] = vv
                        else:
                            frame.pop(qq, None)
        # Early stop: frame on data only for one full completed round beyond
        # the fault round means the flip pattern has become periodic.
        if r > start_round and all(q < n_data for q in frame):
            break
        r += 1

    # Last round whose measurement flips are explicitly known (simulated, or
    # known zero because the fault happens after all measurements).
    sim_through = min(r, R - 1)

    data_x = {q for q, v in frame.items() if q < n_data and (v & 1)}
    data_z = {q for q, v in frame.items() if q < n_data and (v & 2)}

    z_flips = _fold_detectors(z_mflips, R, sim_through, data_x,
                              circuit.zfaces_of_data)
    x_flips = _fold_detectors(x_mflips, R, sim_through, data_z,
                              circuit.xfaces_of_data)
    z_action = len(data_x & circuit.logical_z_set) % 2
    x_action = len(data_z & circuit.logical_x_set) % 2
    return FaultResponse(tuple(sorted(z_flips)), tuple(sorted(x_flips)),
                         z_action, x_action)


def _fold_detectors(mflips: dict[tuple[int, int], int], rounds: int,
                    sim_through: int, steady_data: set[int],
                    faces_of_data: list[tuple[int, ...]]) -> set[tuple[int, int]]:
    """Turn measurement flips into detector flips, closing the synthetic row.

    Rounds up to `sim_through` have explicitly known flips; later rounds and
    the synthetic final row each flip by the steady per-round pattern (face
    parity of the residual data-qubit frame).
    """
    flips: set[tuple[int, int]] = set()
    by_face: dict[int, dict[int, int]] = {}
    for (j, r), v in mflips.items():
        if v:
            by_face.setdefault(j, {})[r] = 1

    steady_faces: dict[int, int] = {}
    for q in steady_data:
        for j in faces_of_data[q]:
            steady_faces[j] = steady_faces.get(j, 0) ^ 1
    steady_faces = {j: v for j, v in steady_faces.items() if v}

    faces = set(by_face) | set(steady_faces)
    for j in faces:
        rows = by_face.get(j, {})
        steady = steady_faces.get(j, 0)
        prev = 0
        for rr in range(rounds + 1):
            if rr <= sim_through:
                cur = rows.get(rr, 0)
            else:  # unsimulated tail rounds and the synthetic row
                cur = steady
            if cur ^ prev:
                flips.add((j, rr))
            prev = cur
    return flips


def response_table(circuit: Circuit) -> dict[tuple[int, str], FaultResponse]:
    """Single-fault responses for every (location, Pauli) pair."""
    table: dict[tuple[int, str], FaultResponse] = {}
    for loc in circuit.fault_locations:
        for p in PAULIS:
            table[(loc.id, p)] = single_fault_response(circuit, loc.id, p)
    return table
