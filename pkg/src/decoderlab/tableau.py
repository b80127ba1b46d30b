"""Stabilizer tableau simulator (Aaronson-Gottesman CHP construction).

Used as an independent oracle: it simulates Clifford circuits exactly,
including measurement randomness and post-measurement state updates, which
lets tests check that the syndrome-extraction circuit really implements a
projective measurement of every stabilizer generator.

The tableau holds n destabilizer rows, n stabilizer rows, and one scratch
row.  Row vectors are numpy uint8 arrays, so all row operations are
vectorized.
"""

from __future__ import annotations

import numpy as np


class Tableau:
    def __init__(self, n: int, rng: np.random.Generator | None = None):
        self.n = n
        self.rng = rng if rng is not None else np.random.default_rng(0)
        # Rows 0..n-1: destabilizers; n..2n-1: stabilizers; 2n: scratch.
        self.x = np.zeros((2 * n + 1, n), dtype=np.uint8)
        self.z = np.zeros((2 * n + 1, n), dtype=np.uint8)
        self.r = np.zeros(2 * n + 1, dtype=np.uint8)
        for i in range(n):
            self.x[i, i] = 1  # destabilizer X_i
            self.z[n + i, i] = 1  # stabilizer Z_i

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.rng = self.rng
        t.x = self.x.copy()
        t.z = self.z.copy()
        t.r = self.r.copy()
        return t

    # -- gates ------------------------------------------------------------

    def h(self, a: int) -> None:
        self.r ^= self.x[:, a] & self.z[:, a]
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def s(self, a: int) -> None:
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def sdg(self, a: int) -> None:
        self.s(a)
        self.s(a)
        self.s(a)

    def cnot(self, a: int, b: int) -> None:
        self.r ^= self.x[:, a] & self.z[:, b] & (self.x[:, b] ^ self.z[:, a] ^ 1)
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def pauli_x(self, a: int) -> None:
        self.r ^= self.z[:, a]

    def pauli_z(self, a: int) -> None:
        self.r ^= self.x[:, a]

    # -- internals ----------------------------------------------------------

    def _rowsum(self, h: int, i: int) -> None:
        """Row h <- row h * row i, tracking the global phase mod 4."""
        x1, z1 = self.x[i], self.z[i]
        x2, z2 = self.x[h], self.z[h]
        # g exponent per qubit, summed mod 4.
        g = np.zeros(self.n, dtype=np.int64)
        y1 = x1 & z1
        only_x1 = x1 & ~z1 & 1
        only_z1 = ~x1 & z1 & 1
        g += np.where(y1 == 1, z2.astype(np.int64) - x2.astype(np.int64), 0)
        g += np.where(only_x1 == 1, z2.astype(np.int64) * (2 * x2.astype(np.int64) - 1), 0)
        g += np.where(only_z1 == 1, x2.astype(np.int64) * (1 - 2 * z2.astype(np.int64)), 0)
        total = (2 * int(self.r[h]) + 2 * int(self.r[i]) + int(g.sum())) % 4
        # Real phase is guaranteed for stabilizer and scratch rows; destabilizer
        # rows may collect an imaginary factor, whose phase bit is never read.
        if h >= self.n:
            assert total in (0, 2), "rowsum produced an imaginary phase"
        self.r[h] = (total % 4) // 2
        self.x[h] ^= x1
        self.z[h] ^= z1

    # -- measurement --------------------------------------------------------

    def measure(self, a: int, force: int | None = None) -> tuple[int, bool]:
        """Measure qubit a in the Z basis.

        Returns (outcome, deterministic).  Random outcomes are drawn from the
        tableau's generator unless `force` pins them (post-selection); the
        post-measurement state is updated in place.
        """
        n = self.n
        stab_rows = np.nonzero(self.x[n : 2 * n, a])[0]
        if stab_rows.size > 0:
            p = int(stab_rows[0]) + n
            for i in range(2 * n):
                if i != p and self.x[i, a]:
                    self._rowsum(i, p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, a] = 1
            outcome = int(self.rng.integers(0, 2)) if force is None else int(force)
            self.r[p] = outcome
            return outcome, False
        # Deterministic: accumulate destabilizer products in the scratch row.
        self.x[2 * n] = 0
        self.z[2 * n] = 0
        self.r[2 * n] = 0
        for i in range(n):
            if self.x[i, a]:
                self._rowsum(2 * n, i + n)
        return int(self.r[2 * n]), True

    def measure_x(self, a: int, force: int | None = None) -> tuple[int, bool]:
        self.h(a)
        out = self.measure(a, force)
        self.h(a)
        return out

    def reset(self, a: int) -> None:
        """Reset qubit a to |0>."""
        outcome, _ = self.measure(a)
        if outcome:
            self.pauli_x(a)

    def reset_plus(self, a: int) -> None:
        """Reset qubit a to |+>."""
        self.reset(a)
        self.h(a)

    def measure_pauli(self, pauli: dict[int, str], force: int | None = None) -> tuple[int, bool]:
        """Measure a multi-qubit Pauli product, e.g. {0: 'X', 3: 'X'}.

        Conjugates the operator to a single-qubit Z, measures, and undoes the
        conjugation, so the post-measurement state is the proper projection.
        """
        if not pauli:
            raise ValueError("empty Pauli operator")
        qubits = sorted(pauli)
        pre: list[tuple[str, int]] = []
        for q in qubits:
            p = pauli[q]
            if p == "X":
                pre.append(("h", q))
            elif p == "Y":
                pre.append(("sdg", q))
                pre.append(("h", q))
            elif p != "Z":
                raise ValueError(f"bad Pauli letter {p!r}")
        target = qubits[0]
        for q in qubits[1:]:
            pre.append(("cnot", (q, target)))

        for kind, arg in pre:
            if kind == "cnot":
                self.cnot(*arg)  # type: ignore[misc]
            else:
                getattr(self, kind)(arg)
        outcome, deterministic = self.measure(target, force)
        for kind, arg in reversed(pre):
            if kind == "cnot":
                self.cnot(*arg)  # type: ignore[misc]
            else:
                getattr(self, kind)(arg)
        return outcome, deterministic

    def canonical_stabilizers(self) -> tuple[tuple[bytes, int], ...]:
        """Canonical form of the stabilizer group, including signs.

        Two tableaus describe the same state iff their canonical forms agree.
        Row reduction uses `_rowsum`, so signs stay consistent.
        """
        t = self.copy()
        n = t.n
        order = list(range(n, 2 * n))

        def bit(row: int, col: int) -> int:
            return int(t.x[row, col]) if col < n else int(t.z[row, col - n])

        def swap(i: int, j: int) -> None:
            for arr in (t.x, t.z):
                arr[[i, j]] = arr[[j, i]]
            t.r[[i, j]] = t.r[[j, i]]

        pivot = n
        for col in range(2 * n):
            rows = [i for i in range(pivot, 2 * n) if bit(i, col)]
            if not rows:
                continue
            if rows[0] != pivot:
                swap(rows[0], pivot)
            for i in range(n, 2 * n):
                if i != pivot and bit(i, col):
                    t._rowsum(i, pivot)
            pivot += 1
            if pivot == 2 * n:
                break
        del order
        rows_out = []
        for i in range(n, 2 * n):
            rows_out.append(
                (t.x[i].tobytes() + t.z[i].tobytes(), int(t.r[i]))
            )
        return tuple(sorted(rows_out))


def random_state(n: int, rng: np.random.Generator, depth: int | None = None) -> Tableau:
    """A pseudorandom stabilizer state reached by a random Clifford circuit."""
    t = Tableau(n, rng=rng)
    if depth is None:
        depth = 4 * n * max(3, int(np.log2(n + 1)))
    for _ in range(depth):
        kind = rng.integers(0, 3)
        if kind == 0:
            t.h(int(rng.integers(0, n)))
        elif kind == 1:
            t.s(int(rng.integers(0, n)))
        else:
            a, b = rng.choice(n, size=2, replace=False)
            t.cnot(int(a), int(b))
    return t
