"""Parsing and validation of the study-accuracy dataset and screening schedules.

Everything here is schema-level: a parse either returns fully validated,
immutable records or raises a ``ParseError`` naming the offending line or key.
Statistical validity (e.g. a disease pool with zero negatives) is the
estimator's concern, not the parser's.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

STUDY_CSV_HEADER = ["study_id", "disease_id", "tp", "fn", "tn", "fp", "source"]


class ParseError(ValueError):
    """Base class for all ingest failures. Carries a location string."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class MalformedRow(ParseError):
    pass


class UnknownDisease(ParseError):
    pass


class UnknownSubpopulation(ParseError):
    pass


class EmptyDataset(ParseError):
    pass


class DuplicateStudyId(ParseError):
    pass


class DuplicatePair(ParseError):
    pass


class InvalidDerivation(ParseError):
    pass


@dataclass(frozen=True)
class Disease:
    disease_id: str
    display_name: str
    procedure_name: str


#: The canonical disease registry: id -> Disease, in report order.
DISEASES: dict[str, Disease] = {
    d.disease_id: d
    for d in [
        Disease("breast_cancer", "Breast cancer", "Mammogram"),
        Disease("cervical_cancer", "Cervical cancer", "Pap test"),
        Disease("chlamydia", "Chlamydia", "NAAT"),
        Disease("colorectal_cancer", "Colorectal cancer", "Colonoscopy"),
        Disease("gonorrhea", "Gonorrhea", "NAAT"),
        Disease("hepatitis_b", "Hepatitis B", "HBsAg test"),
        Disease("hepatitis_c", "Hepatitis C", "Anti-HCV antibody test"),
        Disease("hiv", "HIV", "Antigen/antibody test"),
        Disease("lung_cancer", "Lung cancer", "Low-dose CT scan"),
        Disease("prostate_cancer", "Prostate cancer", "PSA test"),
        Disease("syphilis", "Syphilis", "RPR test"),
    ]
}


@dataclass(frozen=True)
class StudyRecord:
    """Confusion-matrix counts for one study of one disease's screening test."""

    study_id: str
    disease_id: str
    tp: int
    fn_: int
    tn: int
    fp: int
    source_label: str = ""

    def __post_init__(self):
        for name in ("tp", "fn_", "tn", "fp"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        if self.total_n == 0:
            raise ValueError("study has zero total sample size")

    @property
    def total_n(self) -> int:
        """Total sample size: tp + fn + tn + fp."""
        return self.tp + self.fn_ + self.tn + self.fp

    @property
    def negatives_n(self) -> int:
        """Size of the disease-free pool: tn + fp. Always recomputed."""
        return self.tn + self.fp

    def cell_fractions(self) -> tuple[Fraction, Fraction, Fraction]:
        """Exact (false-positive, true-negative, positive-class) proportions.

        The three fractions sum to 1 exactly; they parameterize the
        per-study multinomial used by the bootstrap.
        """
        n = self.total_n
        return (
            Fraction(self.fp, n),
            Fraction(self.tn, n),
            Fraction(self.tp + self.fn_, n),
        )


def parse_study_csv(data: bytes) -> list[StudyRecord]:
    """Parse the study-accuracy CSV into validated records, preserving row order.

    Expects a UTF-8 CSV with header ``study_id,disease_id,tp,fn,tn,fp,source``
    (RFC 4180 quoting allowed in ``source``). Raises ``MalformedRow``,
    ``UnknownDisease``, ``DuplicateStudyId`` or ``EmptyDataset``; every error
    message carries the 1-based line number.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedRow(f"input is not valid UTF-8: {exc}", "byte stream")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("no header row", "line 1")
    except csv.Error as exc:
        raise MalformedRow(f"unreadable CSV: {exc}", "line 1")
    if [h.strip() for h in header] != STUDY_CSV_HEADER:
        raise MalformedRow(
            f"header must be {','.join(STUDY_CSV_HEADER)!r}, got {','.join(header)!r}",
            "line 1",
        )

    records = []
    seen: set[tuple[str, str]] = set()
    while True:
        try:
            row = next(reader)
        except StopIteration:
            break
        except csv.Error as exc:
            raise MalformedRow(f"unreadable CSV: {exc}", f"line {reader.line_num}")
        lineno = reader.line_num  # 1-based, header is line 1
        where = f"line {lineno}"
        if not row:
            continue
        if len(row) != len(STUDY_CSV_HEADER):
            raise MalformedRow(
                f"expected {len(STUDY_CSV_HEADER)} columns, got {len(row)}", where
            )
        study_id, disease_id, *counts, source = [c.strip() for c in row[:2]] + row[2:]
        if not study_id:
            raise MalformedRow("empty study_id", where)
        if disease_id not in DISEASES:
            raise UnknownDisease(f"unknown disease_id {disease_id!r}", where)
        values = []
        for name, cell in zip(("tp", "fn", "tn", "fp"), counts):
            try:
                v = int(cell.strip())
            except ValueError:
                raise MalformedRow(f"{name} is not an integer: {cell!r}", where)
            if v < 0:
                raise MalformedRow(f"{name} is negative: {v}", where)
            values.append(v)
        if sum(values) == 0:
            raise MalformedRow("all four counts are zero", where)
        key = (disease_id, study_id)
        if key in seen:
            raise DuplicateStudyId(
                f"study_id {study_id!r} repeated for disease {disease_id!r}", where
            )
        seen.add(key)
        records.append(
            StudyRecord(study_id, disease_id, values[0], values[1], values[2], values[3], source)
        )
    if not records:
        raise EmptyDataset("no data rows", "line 1")
    return records


def serialize_study_csv(records: Iterable[StudyRecord]) -> bytes:
    """Inverse of :func:`parse_study_csv` (round-trips field-for-field)."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STUDY_CSV_HEADER)
    for r in records:
        writer.writerow([r.study_id, r.disease_id, r.tp, r.fn_, r.tn, r.fp, r.source_label])
    return buf.getvalue().encode("utf-8")


@dataclass(frozen=True)
class ScheduleEntry:
    """Lifetime screening-occasion spec for one (subpopulation, disease) pair.

    Either a direct ``occasions`` count or an inclusive age-range derivation
    (``start_age``/``end_age``/``interval_years``), plus optional additive
    occasions per pregnancy experienced.
    """

    subpopulation_id: str
    disease_id: str
    occasions: Optional[int] = None
    start_age: Optional[float] = None
    end_age: Optional[float] = None
    interval_years: Optional[float] = None
    per_pregnancy_occasions: int = 0

    def __post_init__(self):
        derived = (self.start_age, self.end_age, self.interval_years)
        if self.occasions is None and any(v is None for v in derived):
            raise ValueError(
                "entry needs either occasions or start_age/end_age/interval_years"
            )
        if self.occasions is not None and any(v is not None for v in derived):
            raise ValueError("entry cannot mix occasions with an age derivation")
        if self.occasions is not None and self.occasions < 0:
            raise ValueError("occasions must be >= 0")
        if self.occasions is None:
            if self.end_age < self.start_age:
                raise ValueError("end_age < start_age")
            if self.interval_years <= 0:
                raise ValueError("interval_years must be > 0")
        if self.per_pregnancy_occasions < 0:
            raise ValueError("per_pregnancy_occasions must be >= 0")


@dataclass(frozen=True)
class ScheduleConfig:
    """Validated screening schedule: at most one entry per (subpopulation, disease)."""

    version_label: str
    subpopulations: tuple[str, ...]
    entries: tuple[ScheduleEntry, ...]
    _index: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        index: dict[str, list[ScheduleEntry]] = {}
        for e in self.entries:
            index.setdefault(e.subpopulation_id, []).append(e)
        object.__setattr__(self, "_index", index)

    def entries_for(self, subpopulation_id: str) -> list[ScheduleEntry]:
        """Entries for one subpopulation; absent pairs mean 'not screened'."""
        return list(self._index.get(subpopulation_id, ()))


def parse_schedule_config(data: bytes) -> ScheduleConfig:
    """Parse and validate the JSON schedule document.

    Raises ``DuplicatePair``, ``UnknownDisease``, ``UnknownSubpopulation`` or
    ``InvalidDerivation``; errors name the offending entry by index and pair.
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedRow(f"schedule is not valid UTF-8 JSON: {exc}", "document")
    if not isinstance(doc, dict):
        raise MalformedRow("top level must be an object", "document")

    version = str(doc.get("version", ""))
    subpops = doc.get("subpopulations")
    diseases = doc.get("diseases")
    raw_entries = doc.get("entries")
    if not isinstance(subpops, list) or not all(isinstance(s, str) for s in subpops):
        raise MalformedRow("'subpopulations' must be a list of ids", "key subpopulations")
    if not isinstance(diseases, list) or not all(isinstance(d, str) for d in diseases):
        raise MalformedRow("'diseases' must be a list of ids", "key diseases")
    if not isinstance(raw_entries, list):
        raise MalformedRow("'entries' must be a list", "key entries")
    for d in diseases:
        if d not in DISEASES:
            raise UnknownDisease(f"unknown disease_id {d!r}", "key diseases")

    declared_subpops = set(subpops)
    declared_diseases = set(diseases)
    entries = []
    seen: set[tuple[str, str]] = set()
    for i, raw in enumerate(raw_entries):
        where = f"entries[{i}]"
        if not isinstance(raw, dict):
            raise MalformedRow("entry must be an object", where)
        sub = raw.get("subpopulation")
        dis = raw.get("disease")
        if sub not in declared_subpops:
            raise UnknownSubpopulation(f"unknown subpopulation {sub!r}", where)
        if dis not in declared_diseases:
            raise UnknownDisease(f"unknown disease {dis!r}", where)
        if (sub, dis) in seen:
            raise DuplicatePair(f"second entry for ({sub}, {dis})", where)
        seen.add((sub, dis))
        try:
            entry = ScheduleEntry(
                subpopulation_id=sub,
                disease_id=dis,
                occasions=raw.get("occasions"),
                start_age=raw.get("start_age"),
                end_age=raw.get("end_age"),
                interval_years=raw.get("interval_years"),
                per_pregnancy_occasions=raw.get("per_pregnancy_occasions", 0),
            )
        except (ValueError, TypeError) as exc:
            raise InvalidDerivation(str(exc), where)
        entries.append(entry)

    return ScheduleConfig(
        version_label=version,
        subpopulations=tuple(subpops),
        entries=tuple(entries),
    )
