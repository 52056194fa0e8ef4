"""
Fonctions d'ordre supérieur : SWITCH à contrôle classique, oracle à contrôle
classique, unitaire à contrôle quantique et son extension aux canaux de Kraus.

Convention : « f puis g » est la matrice U_g·U_f. Le contrôle x = 1 place f
dans le premier emplacement et donne l'ordre « f puis g ».
"""

import logging

import numpy as np

from apps.channels.domain import KrausChannel, UnitaryBox
from apps.channels.library import P0, P1
from apps.channels.utils import require_cptp
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError
from apps.higher_order.domain import ControlBit, as_control_state
from apps.linalg.domain import DensityMatrix, as_density
from apps.linalg.utils import conjugate_on_qubits, partial_trace

logger = logging.getLogger(__name__)

KET0_ROW = np.array([[1, 0]], dtype=np.complex128)
KET1_ROW = np.array([[0, 1]], dtype=np.complex128)


def _as_unitary(box, label):
    if isinstance(box, UnitaryBox):
        return box
    if isinstance(box, KrausChannel) and len(box.kraus_ops) == 1:
        return UnitaryBox(box.kraus_ops[0], name=box.name)
    try:
        return UnitaryBox(box, name=label)
    except (InvalidOperatorError, DimensionMismatchError, TypeError, ValueError) as exc:
        raise InvalidOperatorError(f"La boîte {label} doit être unitaire : {exc}")


def _as_channel(box):
    if isinstance(box, KrausChannel):
        return box
    if isinstance(box, UnitaryBox):
        return box.as_channel()
    return UnitaryBox(box).as_channel()


def _qubits(box):
    return box.qubit_count if isinstance(box, UnitaryBox) else box.input_qubits


def _same_size(f, g):
    if _qubits(f) != _qubits(g):
        raise DimensionMismatchError(
            f"Les boîtes f et g doivent agir sur le même nombre de qubits ({_qubits(f)} et {_qubits(g)})"
        )
    return _qubits(f)


def switch_compose(x, f, g):
    """
    SWITCH à contrôle classique : x = 1 donne « f puis g », x = 0 « g puis f ».

    Deux unitaires donnent une UnitaryBox, sinon le résultat est une KrausChannel.
    """
    x = x if isinstance(x, ControlBit) else ControlBit(x)
    if not isinstance(f, (UnitaryBox, KrausChannel)):
        f = UnitaryBox(f, name='f')
    if not isinstance(g, (UnitaryBox, KrausChannel)):
        g = UnitaryBox(g, name='g')
    _same_size(f, g)
    first, second = (f, g) if x.value == 1 else (g, f)
    name = f"{first.name or '?'} puis {second.name or '?'}"
    if isinstance(f, UnitaryBox) and isinstance(g, UnitaryBox):
        return UnitaryBox(second.matrix @ first.matrix, name=name)
    channel = _as_channel(first).then(_as_channel(second))
    return KrausChannel(channel.kraus_ops, deterministic=channel.deterministic, name=name)


def classical_oracle(f, g, phi, rho1, rho2):
    """
    Oracle à contrôle classique :
    |⟨1|φ⟩|² · f(ρ1) ⊗ g(ρ2) + |⟨0|φ⟩|² · g(ρ1) ⊗ f(ρ2).

    Le contrôle est consommé, la sortie vit sur les deux emplacements.
    """
    f = _as_unitary(f, 'f')
    g = _as_unitary(g, 'g')
    size = _same_size(f, g)
    phi = as_control_state(phi)
    rho1, rho2 = as_density(rho1), as_density(rho2)
    if rho1.qubit_count != size or rho2.qubit_count != size:
        raise DimensionMismatchError(
            f"Les états d'entrée doivent avoir {size} qubit(s), reçu {rho1.qubit_count} et {rho2.qubit_count}"
        )
    w0, w1 = phi.weights

    def branch(first, second):
        return np.kron(
            first.matrix @ rho1.matrix @ first.matrix.conj().T,
            second.matrix @ rho2.matrix @ second.matrix.conj().T,
        )

    return DensityMatrix(w1 * branch(f, g) + w0 * branch(g, f))


def classical_oracle_channel(f, g):
    """
    Oracle à contrôle classique comme canal (2N+1 qubits -> 2N qubits) :
    Kraus ⟨1| ⊗ F_i ⊗ G_j et ⟨0| ⊗ G_j ⊗ F_i. Le contrôle est déphasé puis consommé.
    """
    f, g = _as_channel(f), _as_channel(g)
    _same_size(f, g)
    ops = []
    for fi in f.kraus_ops:
        for gj in g.kraus_ops:
            ops.append(np.kron(KET1_ROW, np.kron(fi, gj)))
            ops.append(np.kron(KET0_ROW, np.kron(gj, fi)))
    return KrausChannel(
        tuple(ops),
        deterministic=f.deterministic and g.deterministic,
        name=f"O[{f.name or 'f'}, {g.name or 'g'}]",
    )


def quantum_control_unitary(f, g):
    """
    W = |1⟩⟨1| ⊗ U_f ⊗ U_g + |0⟩⟨0| ⊗ U_g ⊗ U_f sur contrôle ⊗ emplacement 1 ⊗ emplacement 2.
    """
    f = _as_unitary(f, 'f')
    g = _as_unitary(g, 'g')
    _same_size(f, g)
    matrix = np.kron(P1, np.kron(f.matrix, g.matrix)) + np.kron(P0, np.kron(g.matrix, f.matrix))
    return UnitaryBox(matrix, name=f"W[{f.name or 'f'}, {g.name or 'g'}]")


def switched_unitary(f, g):
    """|1⟩⟨1| ⊗ U_g·U_f + |0⟩⟨0| ⊗ U_f·U_g sur contrôle ⊗ cible."""
    f = _as_unitary(f, 'f')
    g = _as_unitary(g, 'g')
    _same_size(f, g)
    matrix = np.kron(P1, g.matrix @ f.matrix) + np.kron(P0, f.matrix @ g.matrix)
    return UnitaryBox(matrix, name=f"S[{f.name or 'f'}, {g.name or 'g'}]")


def switched_channel(f, g):
    """Famille de Kraus S_ij = |1⟩⟨1| ⊗ G_j·F_i + |0⟩⟨0| ⊗ F_i·G_j."""
    f, g = _as_channel(f), _as_channel(g)
    _same_size(f, g)
    require_cptp(f, 'canal f')
    require_cptp(g, 'canal g')
    ops = tuple(
        np.kron(P1, gj @ fi) + np.kron(P0, fi @ gj)
        for fi in f.kraus_ops
        for gj in g.kraus_ops
    )
    return KrausChannel(ops, name=f"S[{f.name or 'f'}, {g.name or 'g'}]")


def quantum_control_output(f, g, phi, rho1, rho2):
    """W (φ ⊗ ρ1 ⊗ ρ2) W†, contrôle conservé."""
    unitary = quantum_control_unitary(f, g)
    phi = as_control_state(phi)
    rho1, rho2 = as_density(rho1), as_density(rho2)
    if rho1.dim != rho2.dim or rho1.dim * rho2.dim * 2 != unitary.dim:
        raise DimensionMismatchError(
            f"États d'entrée de dimensions {rho1.dim} et {rho2.dim} pour une boîte de dimension {unitary.dim}"
        )
    joint = np.kron(np.outer(phi.vector, phi.vector.conj()), np.kron(rho1.matrix, rho2.matrix))
    count = unitary.qubit_count
    return DensityMatrix(conjugate_on_qubits(unitary.matrix, joint, list(range(count)), count))


def reduce_to_classical(f, g, phi, rho1, rho2):
    """Oracle à contrôle quantique suivi de l'oubli du contrôle."""
    joint = quantum_control_output(f, g, phi, rho1, rho2)
    rho1 = as_density(rho1)
    return partial_trace(joint, [2, rho1.dim, rho1.dim], keep=[1, 2])
