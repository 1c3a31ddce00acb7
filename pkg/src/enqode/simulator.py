"""Dense statevector and density-matrix simulation with depolarizing noise.

Statevector evolution is exact gate-by-gate application from |0...0>. The
noisy simulator evolves a density matrix and applies a depolarizing channel
on each physical gate's support; RZ is treated as a virtual frame change and
evolves unitarily with no channel. Qubit q is bit q of the basis index.

Density matrices are capped at 10 qubits (a 1024 x 1024 complex matrix);
the intended working size is 8.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import Circuit, Gate, GateKind, TWO_QUBIT_KINDS

_MAX_DENSITY_QUBITS = 10

_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CY = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, -1j], [0, 0, 1j, 0]], dtype=complex
)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
# Echoed cross-resonance, in the (qubits[0], qubits[1]) = (row-major) basis
# used throughout this module: index = 2*bit(qubits[0]) + bit(qubits[1]).
_ECR = (1.0 / np.sqrt(2.0)) * np.array(
    [
        [0, 0, 1, 1j],
        [0, 0, 1j, 1],
        [1, -1j, 0, 0],
        [-1j, 1, 0, 0],
    ],
    dtype=complex,
)


def rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def gate_matrix(gate: Gate, theta: np.ndarray | None = None) -> np.ndarray:
    """Unitary of one gate in its own (qubits[0], qubits[1], ...) basis."""
    if gate.kind in (GateKind.RZ, GateKind.RX, GateKind.RY):
        angle = gate.angle
        if angle is None:
            if theta is None:
                raise ValueError("parameterized gate needs a theta vector")
            angle = float(theta[gate.slot])
        return {GateKind.RZ: rz_matrix, GateKind.RX: rx_matrix, GateKind.RY: ry_matrix}[
            gate.kind
        ](angle)
    return {
        GateKind.SX: _SX,
        GateKind.X: _X,
        GateKind.CX: _CX,
        GateKind.CY: _CY,
        GateKind.SWAP: _SWAP,
        GateKind.ECR: _ECR,
    }[gate.kind]


def apply_unitary(state: np.ndarray, u: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Apply u on the given qubits of a statevector (qubit q = index bit q)."""
    m = len(qubits)
    axes = [n - 1 - q for q in qubits]
    tensor = np.moveaxis(state.reshape([2] * n), axes, range(m))
    tensor = (u @ tensor.reshape(2**m, -1)).reshape([2] * m + [2] * (n - m))
    return np.moveaxis(tensor, range(m), axes).reshape(-1)


def simulate_ideal(circuit: Circuit, theta: np.ndarray | None = None) -> np.ndarray:
    """Exact statevector of circuit applied to |0...0>."""
    if circuit.num_params > 0:
        if theta is None:
            raise ValueError("circuit has parameter slots; theta is required")
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (circuit.num_params,):
            raise ValueError(f"expected {circuit.num_params} parameters")
    state = np.zeros(1 << circuit.num_qubits, dtype=complex)
    state[0] = 1.0
    for gate in circuit.gates:
        state = apply_unitary(state, gate_matrix(gate, theta), gate.qubits, circuit.num_qubits)
    return state


@dataclass
class NoiseModel:
    """Per-arity depolarizing error rates; RZ is always noiseless."""

    p1: float = 2e-4
    p2: float = 7e-3

    def __post_init__(self):
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


@dataclass
class DensityMatrix:
    num_qubits: int
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        self.validate()

    def validate(self, psd_tol: float = 1e-9) -> None:
        d = 1 << self.num_qubits
        if self.data.shape != (d, d):
            raise ValueError("density matrix shape mismatch")
        if abs(np.trace(self.data) - 1.0) > 1e-10:
            raise ValueError(f"trace is {np.trace(self.data)}, expected 1")
        if np.max(np.abs(self.data - self.data.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(self.data).min() < -psd_tol:
            raise ValueError("density matrix is not positive semidefinite")


@lru_cache(maxsize=256)
def _support_indices(qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Row (d, 2^(n-m)) of basis indices grouped by support value s, where
    s uses the same bit order as gate matrices: s bit (m-1-j) = qubits[j]."""
    m = len(qubits)
    mask = 0
    for q in qubits:
        mask |= 1 << q
    idx = np.arange(1 << n)
    rest = idx[idx & mask == 0]
    rows = []
    for s in range(1 << m):
        offset = 0
        for j, q in enumerate(qubits):
            if (s >> (m - 1 - j)) & 1:
                offset |= 1 << q
        rows.append(rest | offset)
    out = np.stack(rows)
    out.flags.writeable = False
    return out


def _evolve_gate(rho: np.ndarray, u: np.ndarray, qubits: tuple[int, ...], p: float, n: int) -> np.ndarray:
    """rho -> U rho U^dag followed by the depolarizing channel
    rho -> (1-p) rho + p (I/d (x) tr_support rho) on the gate support.

    Row indices with equal support value form d contiguous-gather slabs
    mixed by one GEMM; the column side reuses the row code after a
    transpose copy: (conj(U) (U rho)^T)^T = U rho U^dag. Diagonal gates
    (RZ) skip the slab machinery for a fused elementwise pass.
    """
    groups = _support_indices(qubits, n)
    d = len(groups)
    if not np.any(u - np.diag(np.diagonal(u))):
        phases = np.empty(1 << n, dtype=complex)
        for s in range(d):
            phases[groups[s]] = u[s, s]
        rho = phases[:, None] * rho
        rho *= phases.conj()[None, :]
    else:
        flat = groups.reshape(-1)
        for mat in (u, u.conj()):
            slabs = rho[flat].reshape(d, -1)
            rho[flat] = (mat @ slabs).reshape(flat.size, -1)
            rho = np.ascontiguousarray(rho.T)
    if p != 0.0:
        traced = rho[np.ix_(groups[0], groups[0])].copy()
        for s in range(1, d):
            traced += rho[np.ix_(groups[s], groups[s])]
        rho *= 1.0 - p
        scale = p / d
        for s in range(d):
            rho[np.ix_(groups[s], groups[s])] += scale * traced
    return rho


_PHYSICAL_BASIS = frozenset({GateKind.RZ, GateKind.SX, GateKind.X, GateKind.CX, GateKind.ECR})


def simulate_noisy(circuit: Circuit, theta: np.ndarray | None, noise: NoiseModel) -> DensityMatrix:
    """Density-matrix evolution with a depolarizing channel after each
    physical gate (p1 on one-qubit support, p2 on two-qubit support)."""
    n = circuit.num_qubits
    if n > _MAX_DENSITY_QUBITS:
        raise ValueError(f"density simulation capped at {_MAX_DENSITY_QUBITS} qubits")
    for gate in circuit.gates:
        if gate.kind not in _PHYSICAL_BASIS:
            raise ValueError(f"{gate.kind.value} is not basis-lowered; lower the circuit first")
    if circuit.num_params > 0 and theta is None:
        raise ValueError("circuit has parameter slots; theta is required")
    if theta is not None:
        theta = np.asarray(theta, dtype=float)

    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    rho[0, 0] = 1.0
    for gate in circuit.gates:
        if gate.is_virtual:
            p = 0.0
        else:
            p = noise.p2 if gate.kind in TWO_QUBIT_KINDS else noise.p1
        rho = _evolve_gate(rho, gate_matrix(gate, theta), gate.qubits, p, n)
    return DensityMatrix(n, rho)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Hermitian square root with small eigenvalues clamped to zero.

    The clamp threshold is relative to the largest eigenvalue: sqrt turns
    O(eps) rounding noise in true-zero eigenvalues into O(sqrt(eps)) trace
    error otherwise, which would swamp tight fidelity tolerances.
    """
    vals, vecs = np.linalg.eigh(matrix)
    tol = vals.size * np.finfo(float).eps * max(float(vals[-1]), 0.0)
    vals = np.where(vals > tol, vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def state_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, in [0, 1]."""
    if rho.num_qubits != sigma.num_qubits:
        raise ValueError("dimension mismatch")
    rho.validate()
    sigma.validate()
    root = _psd_sqrt(rho.data)
    inner = _psd_sqrt(root @ sigma.data @ root)
    fid = float(np.real(np.trace(inner)) ** 2)
    return min(max(fid, 0.0), 1.0)


def fidelity_to_pure(rho: DensityMatrix, target: np.ndarray) -> float:
    """Fast path for a pure comparison state: <x|rho|x>."""
    target = np.asarray(target, dtype=complex)
    fid = float(np.real(np.conj(target) @ rho.data @ target))
    return min(max(fid, 0.0), 1.0)


def pure_density(state: np.ndarray) -> DensityMatrix:
    state = np.asarray(state, dtype=complex)
    n = int(np.log2(state.size))
    return DensityMatrix(n, np.outer(state, state.conj()))
