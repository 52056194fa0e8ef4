"""
Vérifications d'admissibilité d'une construction d'ordre supérieur sur des
paires de canaux CPTP aléatoires : sortie CPTP, linéarité vis-à-vis des
mélanges, application locale à une boîte bipartite non signalisante.
"""

import logging

import numpy as np
from tqdm import tqdm

from apps.channels.domain import KrausChannel
from apps.channels.utils import choi_matrix, random_cptp_channel, random_non_signaling_box, verify_cptp
from apps.common.conf import cptp_tolerance
from apps.common.exceptions import UnknownConstructionError
from apps.common.rng import SeededGenerator
from apps.higher_order.domain import AdmissibilityReport
from apps.higher_order.utils import classical_oracle_channel, switched_channel
from apps.linalg.utils import max_deviation

logger = logging.getLogger(__name__)

# Constructions « canal -> canal » vérifiables
CHANNEL_CONSTRUCTIONS = {
    'switched_channel': switched_channel,
    'classical_oracle': classical_oracle_channel,
}


def channel_construction(construction_id):
    try:
        return CHANNEL_CONSTRUCTIONS[construction_id]
    except KeyError:
        raise UnknownConstructionError(
            f"Construction non vérifiable : {construction_id!r} "
            f"(attendu : {', '.join(CHANNEL_CONSTRUCTIONS)})"
        )


def linearity_deviation(build, f1, f2, g, weight):
    """Écart de Choi entre build(λ f1 + (1-λ) f2, g) et λ build(f1, g) + (1-λ) build(f2, g)."""
    mixed = build(KrausChannel.mixture([f1, f2], [weight, 1 - weight]), g)
    expected = weight * choi_matrix(build(f1, g)) + (1 - weight) * choi_matrix(build(f2, g))
    return max_deviation(choi_matrix(mixed), expected)


def local_application(build, box, g):
    """
    Applique la construction à la partie A d'une boîte bipartite A ⊗ E :
    f := la boîte entière, g := g ⊗ id_E.
    """
    extended = g.tensor(KrausChannel.identity(box.qubits_b))
    return build(box.channel, extended)


def admissibility_check(construction, trials=100, seed=None, tol=None, progress=False):
    """
    Rapport agrégé sur ``trials`` essais ; l'essai t tire ses canaux du générateur (seed, t).
    """
    build = channel_construction(construction)
    tol = cptp_tolerance(tol)
    root = SeededGenerator(seed)
    cptp_failures = local_failures = 0
    max_cptp = max_linearity = max_local = 0.0
    min_eigenvalue = np.inf
    for trial in tqdm(range(trials), desc=construction, disable=not progress):
        rng = root.spawn(trial)
        f = random_cptp_channel(1, rng.spawn(0))
        g = random_cptp_channel(1, rng.spawn(1))

        report = verify_cptp(build(f, g), tol)
        cptp_failures += not report.passed
        max_cptp = max(max_cptp, report.deviation)
        min_eigenvalue = min(min_eigenvalue, report.min_choi_eigenvalue)

        weight = float(rng.uniform())
        linearity = linearity_deviation(build, f, random_cptp_channel(1, rng.spawn(2)), g, weight)
        max_linearity = max(max_linearity, linearity)

        box = random_non_signaling_box(1, 1, rng.spawn(3))
        local = verify_cptp(local_application(build, box, g), tol)
        local_failures += not local.passed
        max_local = max(max_local, local.deviation)

        logger.debug(
            f"Essai {trial} : CPTP {report.deviation:.3e}, linéarité {linearity:.3e}, local {local.deviation:.3e}"
        )

    result = AdmissibilityReport(
        construction=construction,
        trials=trials,
        cptp_failures=cptp_failures,
        max_cptp_deviation=max_cptp,
        min_choi_eigenvalue=float(min_eigenvalue) if trials else 0.0,
        max_linearity_deviation=max_linearity,
        local_failures=local_failures,
        max_local_deviation=max_local,
        tolerance=tol,
    )
    if result.passed:
        logger.info(f"Admissibilité de {construction} vérifiée sur {trials} essai(s)")
    else:
        logger.warning(
            f"Admissibilité de {construction} en échec : {cptp_failures} sortie(s) non CPTP, "
            f"{local_failures} application(s) locale(s) non CPTP, linéarité {max_linearity:.3e}"
        )
    return result
