"""
JSON documents and CSV tables exchanged with the command line.

Scalars are always written as canonical strings so that a round trip through
a file is exact.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from pointspectra.algebra.permact import CertificateRecord, Verdict
from pointspectra.errors import DocumentParseError, MixedFieldError
from pointspectra.geometry.configuration import Histogram, PointConfiguration, Spectrum, SpectrumKind
from pointspectra.geometry.scalar import parse_scalar
from pointspectra.tools.congruence import AffineWitness, EquivalenceResult, RigidWitness
from pointspectra.tools.miner import MiningResult
from pointspectra.tools.recon import DistanceClass, LocalProbeResult, ReconstructionResult

logger = logging.getLogger(__name__)


def _locate(text: str, token: str) -> tuple[int | None, int | None]:
    """1-based line and column of the first occurrence of token in text."""
    offset = text.find(token)
    if offset < 0:
        return None, None
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _strings(values) -> list[str]:
    return [str(v) for v in values]


# configuration documents ------------------------------------------------


class ConfigurationDocument(BaseModel):
    dim: int = Field(..., ge=1, description="Dimension m of the ambient space")
    sqrt_base: int = Field(1, ge=1, description="Square-free d of the coordinate field Q(sqrt d)")
    points: list[list[Union[int, str]]] = Field(..., description="Coordinates as canonical scalar strings")
    weights: Optional[list[Union[int, str]]] = Field(
        None, description="Positive diagonal of the bilinear form; omitted means the standard form"
    )
    name: Optional[str] = Field(None, description="Short label of the configuration")
    provenance: Optional[str] = Field(None, description="Where the configuration comes from")

    @classmethod
    def from_configuration(
        cls, P: PointConfiguration, name: str | None = None, provenance: str | None = None
    ) -> ConfigurationDocument:
        return cls(
            dim=P.m,
            sqrt_base=P.d,
            points=[_strings(p) for p in P.points],
            weights=None if P.weights is None else _strings(P.weights),
            name=name,
            provenance=provenance,
        )

    def to_configuration(self) -> PointConfiguration:
        if any(len(p) != self.dim for p in self.points):
            raise DocumentParseError(f"every point needs {self.dim} coordinates")
        return PointConfiguration.from_coordinates(
            [[str(x) for x in p] for p in self.points],
            d=self.sqrt_base,
            weights=None if self.weights is None else [str(w) for w in self.weights],
        )


def parse_configuration(text: str) -> PointConfiguration:
    """Build a configuration from JSON text; errors carry the line and column."""
    try:
        document = ConfigurationDocument.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        field = next((str(part) for part in first["loc"] if isinstance(part, str)), "")
        line, column = _locate(text, f'"{field}"') if field else (None, None)
        if first["type"] == "json_invalid":
            try:
                json.loads(text)
            except json.JSONDecodeError as decode:
                raise DocumentParseError(decode.msg, decode.lineno, decode.colno) from e
        raise DocumentParseError(f"invalid configuration document: {first['msg']}", line, column) from e

    for point in document.points + [document.weights or []]:
        for x in point:
            try:
                parse_scalar(str(x), document.sqrt_base)
            except MixedFieldError as e:
                line, column = _locate(text, f'"{x}"')
                raise DocumentParseError(str(e), line, column) from e
            except (ValueError, ZeroDivisionError) as e:
                line, column = _locate(text, f'"{x}"' if isinstance(x, str) else str(x))
                raise DocumentParseError(f"malformed scalar {x!r}", line, column) from e
    return document.to_configuration()


def load_configuration(path: str | Path) -> PointConfiguration:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Failed to read configuration {path}: {e}")
        raise
    P = parse_configuration(text)
    logger.debug(f"Loaded {P.n} points in {P.m}-space from {path}")
    return P


def dump_configuration(P: PointConfiguration, name: str | None = None, provenance: str | None = None) -> str:
    document = ConfigurationDocument.from_configuration(P, name=name, provenance=provenance)
    return document.model_dump_json(indent=2, exclude_none=True)


def save_configuration(P: PointConfiguration, path: str | Path, name: str | None = None) -> None:
    Path(path).write_text(dump_configuration(P, name=name) + "\n", encoding="utf-8")


# CSV tables -------------------------------------------------------------


def spectrum_frame(S: Spectrum) -> pd.DataFrame:
    return pd.DataFrame({"value": _strings(S.values), "approx": S.as_floats()})


def write_spectrum_csv(S: Spectrum, path: str | Path | None = None) -> str:
    """CSV text with one value per row; also written to path when given."""
    text = spectrum_frame(S).to_csv(index=False, float_format="%.17g")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_spectrum_csv(path: str | Path, kind: SpectrumKind | str, d: int = 1) -> Spectrum:
    try:
        frame = pd.read_csv(path, dtype=str)
    except (OSError, pd.errors.ParserError) as e:
        logger.error(f"Failed to read spectrum {path}: {e}")
        raise DocumentParseError(f"unreadable spectrum file {path}: {e}") from e
    if "value" not in frame.columns:
        raise DocumentParseError("spectrum CSV needs a 'value' column", 1, 1)
    column = list(frame.columns).index("value") + 1
    values = []
    for row, text in enumerate(frame["value"], start=2):
        try:
            values.append(parse_scalar(str(text).strip(), d))
        except (ValueError, ZeroDivisionError) as e:
            raise DocumentParseError(str(e), row, column) from e
    return Spectrum.of(values, kind)


def histogram_frame(H: Histogram) -> pd.DataFrame:
    return pd.DataFrame(list(H.counts), columns=["bin_lower", "count"])


def write_histogram_csv(H: Histogram, path: str | Path | None = None) -> str:
    text = histogram_frame(H).to_csv(index=False, float_format="%.10g")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# reports ----------------------------------------------------------------


class CertificateEntry(BaseModel):
    psi: str = Field(..., description="Double coset representative in cycle notation on pair numbers")
    coset_size: int = Field(..., description="Number of pair permutations in the double coset")
    candidate: Optional[str] = Field(None, description="Chosen ideal element, as minor indices")
    polynomial: Optional[str] = Field(None, description="Chosen ideal element in polynomial text form")
    value: Optional[str] = Field(None, description="Its value at the distances of the configuration")
    permuted_value: Optional[str] = Field(None, description="Value of its psi-image at the distances")
    generic_nonmember: bool = Field(..., description="psi-image non-zero at some generic probe")
    tried: int = Field(..., description="Candidates evaluated for this coset")

    @classmethod
    def from_record(cls, record: CertificateRecord, polynomial: str | None = None) -> CertificateEntry:
        return cls(
            psi=str(record.psi),
            coset_size=record.coset_size,
            candidate=None if record.candidate is None else str(record.candidate),
            polynomial=polynomial,
            value=None if record.value is None else str(record.value),
            permuted_value=None if record.permuted_value is None else str(record.permuted_value),
            generic_nonmember=record.generic_nonmember,
            tried=record.tried,
        )


class CertificationReport(BaseModel):
    verdict: Verdict
    n: int
    m: int
    reason: Optional[str] = Field(None, description="Why the verdict is not Certified")
    stabilizer_order: Optional[int] = Field(None, description="|G|, the distance stabilizer used")
    induced_order: Optional[int] = Field(None, description="|H|, the pair permutations induced by relabelings")
    cosets: int = Field(0, description="Number of double cosets G psi H")
    entries: list[CertificateEntry] = Field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return {Verdict.CERTIFIED: 0, Verdict.INCONCLUSIVE: 2, Verdict.NOT_APPLICABLE: 2}[self.verdict]


class EquivalenceReport(BaseModel):
    group: str = Field(..., description="rigid or affine")
    equivalent: Optional[bool] = Field(None, description="None when the question is degenerate")
    reason: Optional[str] = None
    permutation: Optional[list[int]] = Field(None, description="Q_i corresponds to P_{permutation[i]}")
    linear: Optional[list[list[str]]] = None
    translation: Optional[list[str]] = None
    approximate_linear: Optional[list[list[float]]] = None
    approximate_translation: Optional[list[float]] = None
    residual: Optional[float] = None
    sign: Optional[int] = Field(None, description="Determinant of the affine map")

    @classmethod
    def from_result(cls, group: str, result: EquivalenceResult) -> EquivalenceReport:
        report = cls(group=group, equivalent=result.equivalent)
        witness = result.witness
        if isinstance(witness, RigidWitness):
            report.permutation = list(witness.permutation)
            if witness.exact:
                report.linear = [_strings(row) for row in witness.linear]
                report.translation = _strings(witness.translation)
            else:
                report.approximate_linear = witness.approximate_linear.tolist()
                report.approximate_translation = witness.approximate_translation.tolist()
                report.residual = witness.residual
        elif isinstance(witness, AffineWitness):
            report.permutation = list(witness.permutation)
            report.linear = [_strings(row) for row in witness.linear]
            report.translation = _strings(witness.translation)
            report.sign = witness.sign
        return report

    @property
    def exit_code(self) -> int:
        if self.equivalent is None:
            return 2
        return 0 if self.equivalent else 1


class ReconstructedClass(BaseModel):
    distances: Optional[list[str]] = Field(None, description="Labeled squared distances in pair order")
    points: Optional[list[list[str]]] = Field(None, description="Exact coordinates of a representative")
    coordinates: Optional[list[list[float]]] = Field(None, description="Float embedding of the distances")
    residual: Optional[float] = None


class ReconstructionReport(BaseModel):
    kind: SpectrumKind
    n: int
    m: int
    count: int = Field(..., description="Number of equivalence classes realizing the spectrum")
    experimental: bool = Field(False, description="Set when 4 <= n <= m+1, where no generic claim exists")
    nodes: int = 0
    leaves: int = 0
    classes: list[ReconstructedClass] = Field(default_factory=list)

    @classmethod
    def from_result(cls, result: ReconstructionResult) -> ReconstructionReport:
        classes = []
        for item in result.classes:
            if isinstance(item, DistanceClass):
                classes.append(
                    ReconstructedClass(
                        distances=_strings(item.distances),
                        coordinates=item.coordinates.tolist(),
                        residual=item.residual,
                    )
                )
            else:
                classes.append(ReconstructedClass(points=[_strings(p) for p in item.points]))
        return cls(
            kind=result.kind,
            n=result.n,
            m=result.m,
            count=result.count,
            experimental=result.experimental,
            nodes=result.nodes,
            leaves=result.leaves,
            classes=classes,
        )

    @property
    def exit_code(self) -> int:
        return 0 if self.count == 1 else 1


class CollisionEntry(BaseModel):
    left: list[list[str]]
    right: list[list[str]]
    digest: str
    rigid_equivalent: Optional[bool] = None
    affine_equivalent: Optional[bool] = None


class MiningReport(BaseModel):
    width: int
    height: int
    n: int
    kind: str
    enumerated: int = Field(..., description="Grid subsets visited")
    distinct: int = Field(..., description="Subsets left after removing lattice symmetries")
    buckets: int = Field(..., description="Spectra shared by at least two subsets")
    partial: bool = False
    pairs: list[CollisionEntry] = Field(default_factory=list)

    @classmethod
    def from_result(cls, result: MiningResult) -> MiningReport:
        return cls(
            width=result.width,
            height=result.height,
            n=result.n,
            kind=result.kind.value,
            enumerated=result.enumerated,
            distinct=result.distinct,
            buckets=result.buckets,
            partial=result.partial,
            pairs=[
                CollisionEntry(
                    left=[_strings(p) for p in pair.left.points],
                    right=[_strings(p) for p in pair.right.points],
                    digest=pair.digest,
                    rigid_equivalent=pair.rigid_equivalent,
                    affine_equivalent=pair.affine_equivalent,
                )
                for pair in result.collisions
            ],
        )


class LocalProbeReport(BaseModel):
    levels: list[float]
    violations: list[int]
    samples: int
    hypothesis_met: bool
    checked: list[int] = Field(default_factory=list, description="Samples per level with nearly equal distances")
    largest_clean_noise: Optional[float] = None

    @classmethod
    def from_result(cls, result: LocalProbeResult) -> LocalProbeReport:
        return cls(
            levels=list(result.levels),
            violations=list(result.violations),
            samples=result.samples,
            hypothesis_met=result.hypothesis_met,
            checked=list(result.checked),
            largest_clean_noise=result.largest_clean_noise,
        )


class RelationCheckReport(BaseModel):
    n: int
    m: int
    checked: int = Field(..., description="Alternating sums evaluated")
    violated: list[list[int]] = Field(default_factory=list, description="(m+2)-subsets whose sum is non-zero")

    @property
    def exit_code(self) -> int:
        return 0 if not self.violated else 1
