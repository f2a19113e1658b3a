"""ADAPT-VQE: grow the ansatz one pool operator at a time."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..qop import PauliSum, cnot_count
from ..qsim import AnsatzCircuit, energy_and_gradient, expectation_exact
from .optimize import bfgs
from .pool import OperatorPool

log = logging.getLogger(__name__)

TIE_TOL = 1e-12


def adapt_gradient_screen(psi, H: PauliSum, pool: OperatorPool) -> np.ndarray:
    """|<psi|[H, A_i]|psi>| = |2 Re <H psi | A_i psi>| for every pool generator."""
    hpsi = H.apply(psi)
    return np.array([abs(2.0 * np.vdot(hpsi, g.apply(psi)).real) for g in pool])


def select_operator(grads: np.ndarray) -> int:
    """Largest gradient; near-ties (< 1e-12 apart) go to the lower pool index."""
    top = np.max(grads)
    return int(np.nonzero(grads >= top - TIE_TOL)[0][0])


@dataclass
class VQEResult:
    theta: np.ndarray
    energy: float
    gradient: np.ndarray
    converged: bool
    nit: int


def vqe_minimize(circuit: AnsatzCircuit, H: PauliSum, theta0=None, tol: float = 1e-8, max_iter: int = 1000) -> VQEResult:
    theta0 = circuit.parameters if theta0 is None else np.asarray(theta0, dtype=float)
    shift = float(np.real(H.identity_coefficient()))

    def fg(theta):
        e, g = energy_and_gradient(circuit, H, theta)
        return e - shift, g

    res = bfgs(fg, theta0, gtol=tol, max_iter=max_iter)
    return VQEResult(res.x, res.fun + shift, res.grad, res.converged, res.nit)


@dataclass
class AdaptState:
    circuit: AnsatzCircuit
    history: list[tuple[int, float]] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    converged: bool = False
    max_gradient: float = np.inf
    theta_gradient: np.ndarray = field(default_factory=lambda: np.zeros(0))
    message: str = ""

    @property
    def theta(self) -> np.ndarray:
        return self.circuit.parameters

    @property
    def n_operators(self) -> int:
        return len(self.circuit.generators)

    @property
    def energy(self) -> float:
        return self.energies[-1]

    @property
    def cnots(self) -> int:
        return cnot_count(p for p, _ in self.circuit.rotations)


def run_adapt(
    H: PauliSum,
    pool: OperatorPool,
    circuit: AnsatzCircuit,
    eps: float = 1e-3,
    max_operators: int = 50,
    vqe_tol: float = 1e-8,
    history=None,
) -> AdaptState:
    """Append the steepest pool operator until every pool gradient is below ``eps``.

    ``circuit`` may already hold operators (warm start); its parameters are
    re-optimized first.
    """
    history = list(history or [])
    if circuit.generators:
        r = vqe_minimize(circuit, H, tol=vqe_tol)
        circuit = circuit.with_parameters(r.theta)
        energies = [r.energy]
        gtheta = r.gradient
    else:
        energies = [expectation_exact(circuit.state(), H)]
        gtheta = np.zeros(0)
    state = AdaptState(circuit, history, energies, theta_gradient=gtheta)
    while True:
        grads = adapt_gradient_screen(state.circuit.state(), H, pool)
        i = select_operator(grads)
        state.max_gradient = float(grads[i])
        if grads[i] < eps:
            state.converged = True
            state.message = "pool gradient below threshold"
            break
        if state.n_operators >= max_operators:
            state.message = f"reached {max_operators} operators with pool gradient {grads[i]:.2e}"
            break
        circ = state.circuit.append(pool[i], 0.0)
        r = vqe_minimize(circ, H, tol=vqe_tol)
        if r.energy > state.energies[-1] + 1e-9:
            # never accept a step that raises the energy; keep the old point
            state.message = "operator did not lower the energy"
            break
        state.circuit = circ.with_parameters(r.theta)
        state.theta_gradient = r.gradient
        state.history.append((i, float(grads[i])))
        state.energies.append(r.energy)
        log.debug("adapt: op %d (%s) |g|=%.3e E=%.12f", i, pool[i].label, grads[i], r.energy)
    return state
