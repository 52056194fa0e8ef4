import logging

import numpy as np

from apps.channels.domain import BipartiteBox, CptpReport, KrausChannel, NonSignalingReport
from apps.common.conf import cptp_tolerance, tolerance
from apps.common.exceptions import DimensionMismatchError, InvalidOperatorError
from apps.common.rng import as_generator
from apps.linalg.domain import DensityMatrix, as_density
from apps.linalg.utils import dagger, max_deviation, partial_trace_matrix, random_unitary

logger = logging.getLogger(__name__)


def apply_channel(channel, rho):
    """Σ K ρ K†."""
    rho = as_density(rho)
    if channel.input_qubits != rho.qubit_count:
        raise DimensionMismatchError(
            f"Le canal attend {channel.input_qubits} qubit(s), l'état en a {rho.qubit_count}"
        )
    if channel.deterministic:
        deviation = max_deviation(channel.completeness(), np.eye(channel.input_dim))
        if deviation > cptp_tolerance():
            raise InvalidOperatorError(
                f"Le canal {channel.name or ''} ne conserve pas la trace (écart de complétude {deviation:.3e})"
            )
    output = sum(op @ rho.matrix @ dagger(op) for op in channel.kraus_ops)
    normalized = rho.normalized and channel.deterministic
    return DensityMatrix(output, normalized=normalized)


def choi_matrix(channel):
    """
    Matrice de Choi (canal ⊗ id) appliqué à Σ |ii⟩⟨jj| non normalisé.

    Ordre des facteurs : sortie ⊗ entrée. CP ⇔ Choi semi-définie positive.
    """
    vectors = np.stack([op.reshape(-1) for op in channel.kraus_ops], axis=1)
    return vectors @ dagger(vectors)


def verify_cptp(channel, tol=None):
    """
    Rapport de complétude (écart de Σ K†K à l'identité) et positivité de Choi.

    Pour un élément d'instrument, l'écart mesure le défaut de positivité de I - Σ K†K.
    """
    tol = cptp_tolerance(tol)
    completeness = channel.completeness()
    identity = np.eye(channel.input_dim)
    if channel.deterministic:
        deviation = max_deviation(completeness, identity)
    else:
        deficiency = identity - completeness
        deviation = max(0.0, -float(np.linalg.eigvalsh((deficiency + dagger(deficiency)) / 2).min()))
    min_eigenvalue = float(np.linalg.eigvalsh(choi_matrix(channel)).min())
    passed = deviation <= tol and min_eigenvalue >= -tol
    if not passed:
        logger.warning(
            f"Canal {channel.name or ''} non valide : écart {deviation:.3e}, "
            f"valeur propre de Choi minimale {min_eigenvalue:.3e}"
        )
    return CptpReport(
        passed=passed,
        deviation=deviation,
        min_choi_eigenvalue=min_eigenvalue,
        deterministic=channel.deterministic,
        tolerance=tol,
    )


def require_cptp(channel, label='canal'):
    report = verify_cptp(channel)
    if not (channel.deterministic and report.passed):
        raise InvalidOperatorError(
            f"Le {label} {channel.name or ''} n'est pas CPTP (écart de complétude {report.deviation:.3e})"
        )
    return channel


def channel_deviation(first, second):
    """Écart maximal entre les matrices de Choi de deux canaux."""
    if (first.input_qubits, first.output_qubits) != (second.input_qubits, second.output_qubits):
        raise DimensionMismatchError("Canaux de dimensions différentes")
    return max_deviation(choi_matrix(first), choi_matrix(second))


def _independence_deviation(reduced, dims, other):
    """
    Écart entre une Choi réduite (facteurs ``dims`` : sortie, entrée A, entrée B)
    et la forme où la sortie ne dépend pas de l'entrée ``other`` :
    Choi marginale ⊗ I / d, identité réinsérée à la position ``other``.
    """
    keep = [k for k in range(3) if k != other]
    marginal = partial_trace_matrix(reduced, dims, keep)
    d_other = dims[other]
    expected = np.kron(marginal, np.eye(d_other)) / d_other
    order = keep + [other]
    current = [dims[k] for k in order]
    source = list(np.argsort(order))
    expected = (
        expected.reshape(current + current)
        .transpose(source + [3 + s for s in source])
        .reshape(reduced.shape)
    )
    return max_deviation(reduced, expected)


def is_non_signaling(box, tol=None):
    """
    Non-signalisation exacte d'une boîte bipartite, par comparaison de blocs de Choi.

    A→B : la sortie réduite sur B ne dépend pas de l'entrée de A (et réciproquement).
    """
    tol = tolerance(tol)
    if not isinstance(box, BipartiteBox):
        raise InvalidOperatorError("is_non_signaling attend une BipartiteBox")
    d_a, d_b = 2 ** box.qubits_a, 2 ** box.qubits_b
    dims = [d_a, d_b, d_a, d_b]
    choi = choi_matrix(box.channel)
    # A→B : sortie B' gardée, facteurs [B', A, B], indépendance vis-à-vis de A
    a_to_b = _independence_deviation(partial_trace_matrix(choi, dims, [1, 2, 3]), [d_b, d_a, d_b], other=1)
    b_to_a = _independence_deviation(partial_trace_matrix(choi, dims, [0, 2, 3]), [d_a, d_a, d_b], other=2)
    report = NonSignalingReport(
        passed=a_to_b <= tol and b_to_a <= tol,
        a_to_b_deviation=a_to_b,
        b_to_a_deviation=b_to_a,
        a_to_b_passed=a_to_b <= tol,
        b_to_a_passed=b_to_a <= tol,
        tolerance=tol,
    )
    logger.debug(f"Non-signalisation : A→B {a_to_b:.3e}, B→A {b_to_a:.3e}")
    return report


def dephase_qubit(rho, qubit_index):
    """Annule les cohérences entre |0⟩ et |1⟩ du qubit ``qubit_index``."""
    rho = as_density(rho)
    count = rho.qubit_count
    if not 0 <= qubit_index < count:
        raise DimensionMismatchError(f"Qubit {qubit_index} hors du registre de {count} qubit(s)")
    tensor_form = rho.matrix.reshape((2,) * (2 * count)).copy()
    row = [slice(None)] * (2 * count)
    for a, b in ((0, 1), (1, 0)):
        row[qubit_index] = a
        row[count + qubit_index] = b
        tensor_form[tuple(row)] = 0
    return DensityMatrix(tensor_form.reshape(rho.matrix.shape), normalized=rho.normalized)


def random_cptp_channel(qubit_count, rng=None, env_qubits=2):
    """
    Canal CPTP aléatoire par dilatation de Stinespring.

    Unitaire de Haar sur système ⊗ environnement, environnement préparé
    dans |0⟩ puis tracé : K_k = (I ⊗ ⟨k|) U (I ⊗ |0⟩).
    """
    rng = as_generator(rng)
    d, d_env = 2 ** qubit_count, 2 ** env_qubits
    unitary = random_unitary(d * d_env, rng)
    isometry = unitary[:, ::d_env]
    ops = tuple(isometry[k::d_env, :] for k in range(d_env))
    return KrausChannel(ops, name='stinespring')


def random_unitary_channel(qubit_count, rng=None):
    rng = as_generator(rng)
    return KrausChannel((random_unitary(2 ** qubit_count, rng),), name='haar')


def random_non_signaling_box(qubits_a, qubits_b, rng=None, components=2):
    """Mélange convexe aléatoire de boîtes produits : non signalisant par construction."""
    rng = as_generator(rng)
    boxes = [
        random_cptp_channel(qubits_a, rng.spawn(2 * k)).tensor(random_cptp_channel(qubits_b, rng.spawn(2 * k + 1)))
        for k in range(components)
    ]
    weights = rng.uniform(size=components)
    weights = weights / weights.sum()
    return BipartiteBox(KrausChannel.mixture(boxes, weights), qubits_a, qubits_b)
