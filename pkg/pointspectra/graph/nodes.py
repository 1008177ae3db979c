import logging
from typing import Any, Dict

from pointspectra.algebra.permact import (
    MAX_SWEEP_PAIRS,
    Verdict,
    distance_stabilizer,
    double_cosets,
    find_certificate,
    generic_probes,
    group_order,
    induced_generators,
    preserves_distances,
)
from pointspectra.errors import RankDeficientError, SizeMismatchError, TooLargeError
from pointspectra.graph.state import CertificationState
from pointspectra.services.storage import CertificateEntry, CertificationReport

logger = logging.getLogger(__name__)


def hypotheses_node(state: CertificationState) -> Dict[str, Any]:
    """
    Checks 2 <= m <= n-2, the size bound of the double coset sweep and the
    generic rank of the relation matrix.
    """
    P = state["configuration"]
    if not 2 <= P.m <= P.n - 2:
        reason = f"certification needs 2 <= m <= n-2, got n={P.n}, m={P.m}"
        logger.info(reason)
        return {"applicable": False, "reason": reason}
    if P.n * (P.n - 1) // 2 > MAX_SWEEP_PAIRS:
        raise TooLargeError(f"certification sweeps all pair permutations and is limited to n <= 5, got {P.n}")
    rank = P.relation_matrix().rank()
    if rank != P.m:
        raise RankDeficientError(f"relation matrix has rank {rank}, the generic rank is {P.m}")
    return {"applicable": True, "reason": None}


def groups_node(state: CertificationState) -> Dict[str, Any]:
    P = state["configuration"]
    stabilizer = state.get("stabilizer")
    if stabilizer is None:
        g_generators = distance_stabilizer(P)
    else:
        for phi in stabilizer:
            if phi.n != P.n:
                raise SizeMismatchError(f"stabilizer element {phi} acts on pairs of {phi.n} points")
            if not preserves_distances(phi, P):
                raise ValueError(f"{phi} does not preserve the labeled distances")
        g_generators = list(stabilizer)
    h_generators = induced_generators(P.n)
    stabilizer_order = group_order(g_generators, P.n)
    induced_order = group_order(h_generators, P.n)
    logger.info(f"|G| = {stabilizer_order}, |H| = {induced_order}")
    return {
        "g_generators": g_generators,
        "h_generators": h_generators,
        "stabilizer_order": stabilizer_order,
        "induced_order": induced_order,
    }


def cosets_node(state: CertificationState) -> Dict[str, Any]:
    P = state["configuration"]
    decomposition = double_cosets(state["g_generators"], state["h_generators"], P.n)
    return {"decomposition": decomposition}


def search_node(state: CertificationState) -> Dict[str, Any]:
    """
    Looks for a certificate on every non-trivial double coset, stopping at the
    first coset without one.
    """
    P = state["configuration"]
    decomposition = state["decomposition"]
    probes = generic_probes(P.n, P.m)
    records = []
    for psi, size in zip(decomposition.representatives, decomposition.sizes):
        if psi.is_identity():
            continue
        record = find_certificate(P, psi, probes=probes, budget=state.get("budget"), coset_size=size)
        records.append(record)
        if record.candidate is None:
            logger.info(f"No certificate for the double coset of {psi}")
            break
    return {"records": records}


def verdict_node(state: CertificationState) -> Dict[str, Any]:
    P = state["configuration"]
    if not state.get("applicable"):
        report = CertificationReport(verdict=Verdict.NOT_APPLICABLE, n=P.n, m=P.m, reason=state.get("reason"))
        return {"report": report}

    polynomials: dict[str, str] = {}
    entries = []
    for record in state["records"]:
        text = None
        if record.candidate is not None:
            key = str(record.candidate)
            if key not in polynomials:
                polynomials[key] = str(record.candidate.polynomial())
            text = polynomials[key]
        entries.append(CertificateEntry.from_record(record, polynomial=text))

    failed = next((r for r in state["records"] if r.candidate is None), None)
    if failed is None:
        verdict, reason = Verdict.CERTIFIED, None
    else:
        verdict = Verdict.INCONCLUSIVE
        reason = f"no ideal element with non-zero image found for psi = {failed.psi} after {failed.tried} candidates"
    report = CertificationReport(
        verdict=verdict,
        n=P.n,
        m=P.m,
        reason=reason,
        stabilizer_order=state["stabilizer_order"],
        induced_order=state["induced_order"],
        cosets=len(state["decomposition"]),
        entries=entries,
    )
    logger.info(f"Certification verdict: {verdict.value}")
    return {"report": report}
