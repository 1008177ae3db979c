from typing import List, Optional, TypedDict

from pointspectra.algebra.permact import CertificateRecord, DoubleCosetDecomposition, PairPermutation
from pointspectra.geometry.configuration import PointConfiguration


class CertificationState(TypedDict, total=False):
    """
    Represents the state of one certification run in the LangGraph workflow.
    """
    configuration: PointConfiguration
    stabilizer: Optional[List[PairPermutation]]  # caller-supplied subgroup of the stabilizer
    budget: Optional[int]
    applicable: bool
    reason: Optional[str]
    g_generators: List[PairPermutation]
    h_generators: List[PairPermutation]
    stabilizer_order: int
    induced_order: int
    decomposition: DoubleCosetDecomposition
    records: List[CertificateRecord]
    report: object  # CertificationReport
