"""Dense statevector simulator.

Basis index ``i`` corresponds to the bit string of :func:`qubofolio.qubo.index_to_bits`,
so qubit 0 is the most significant bit and maps to variable ``x_0``.
"""

from __future__ import annotations

import numpy as np

from ..errors import CapacityError, DimensionError

MAX_QUBITS = 26
NORM_TOLERANCE = 1e-10


def _check_qubits(q: int) -> None:
    if q < 1:
        raise DimensionError("at least one qubit is required")
    if q > MAX_QUBITS:
        raise CapacityError(f"{q} qubits exceed the simulator cap of {MAX_QUBITS}", MAX_QUBITS)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


class StateVector:
    """Amplitudes of ``n_qubits`` qubits; all gates act in place."""

    def __init__(self, amplitudes):
        amp = np.array(amplitudes, dtype=np.complex128).ravel()
        q = int(round(np.log2(amp.size))) if amp.size else 0
        if amp.size != 1 << q:
            raise DimensionError(f"amplitude count {amp.size} is not a power of two")
        _check_qubits(q)
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise DimensionError(f"state is not normalized (norm {norm:.3g})")
        self.n_qubits = q
        self.amplitudes = amp

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        _check_qubits(n_qubits)
        amp = np.zeros(1 << n_qubits, dtype=np.complex128)
        amp[0] = 1.0
        return cls(amp)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        _check_qubits(n_qubits)
        amp = np.zeros(1 << n_qubits, dtype=np.complex128)
        amp[index] = 1.0
        return cls(amp)

    @classmethod
    def uniform(cls, n_qubits: int) -> "StateVector":
        _check_qubits(n_qubits)
        N = 1 << n_qubits
        return cls(np.full(N, 1.0 / np.sqrt(N), dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def copy(self) -> "StateVector":
        out = object.__new__(StateVector)
        out.n_qubits = self.n_qubits
        out.amplitudes = self.amplitudes.copy()
        return out

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def apply_gate(self, gate, qubit: int) -> "StateVector":
        """Apply a 2x2 unitary to one qubit."""
        if not 0 <= qubit < self.n_qubits:
            raise DimensionError(f"qubit {qubit} out of range")
        psi = self.amplitudes.reshape(1 << qubit, 2, -1)
        g = np.asarray(gate, dtype=np.complex128)
        out = np.empty_like(psi)
        out[:, 0, :] = g[0, 0] * psi[:, 0, :] + g[0, 1] * psi[:, 1, :]
        out[:, 1, :] = g[1, 0] * psi[:, 0, :] + g[1, 1] * psi[:, 1, :]
        self.amplitudes = out.ravel()
        return self

    def apply_layer(self, gates) -> "StateVector":
        for q, g in enumerate(gates):
            self.apply_gate(g, q)
        return self

    def ry_layer(self, thetas) -> "StateVector":
        thetas = np.broadcast_to(np.asarray(thetas, dtype=np.float64), (self.n_qubits,))
        return self.apply_layer(ry_matrix(t) for t in thetas)

    def rx_layer(self, thetas) -> "StateVector":
        thetas = np.broadcast_to(np.asarray(thetas, dtype=np.float64), (self.n_qubits,))
        return self.apply_layer(rx_matrix(t) for t in thetas)

    def cz(self, a: int, b: int) -> "StateVector":
        if a == b or not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
            raise DimensionError(f"invalid controlled-Z qubits ({a}, {b})")
        psi = self._tensor()
        idx = [slice(None)] * self.n_qubits
        idx[a] = 1
        idx[b] = 1
        psi[tuple(idx)] *= -1
        return self

    def cz_chain(self) -> "StateVector":
        for q in range(self.n_qubits - 1):
            self.cz(q, q + 1)
        return self

    def apply_phases(self, phases) -> "StateVector":
        """Multiply amplitude ``i`` by ``exp(1j * phases[i])``."""
        phases = np.asarray(phases, dtype=np.float64)
        if phases.shape != (self.dim,):
            raise DimensionError("one phase per basis state is required")
        self.amplitudes = self.amplitudes * np.exp(1j * phases)
        return self

    def flip_marked(self, marked) -> "StateVector":
        """Oracle: negate the amplitudes where the boolean mask is set."""
        self.amplitudes = np.where(marked, -self.amplitudes, self.amplitudes)
        return self

    def diffuse(self) -> "StateVector":
        """Inversion about the mean, ``2|s><s| - I`` with ``|s>`` uniform."""
        self.amplitudes = 2.0 * self.amplitudes.mean() - self.amplitudes
        return self

    def sample(self, shots: int, rng) -> np.ndarray:
        """Basis indices drawn from the measurement distribution."""
        p = self.probabilities()
        return rng.choice(self.dim, size=shots, p=p / p.sum())
