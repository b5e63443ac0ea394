"""Revocation assertions from CA CRLs and vendor-controlled lists.

Selectors are heterogeneous: issuer+serial (classic CRL entry), SPKI digest
(key-level block, catches every cross-sign of the key), or an exact
certificate fingerprint. A view models one consumer's accepted sources.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Optional

from .certmodel import CertRecord
from .names import NormalizedName, normalize_name
from .timeutil import format_rfc3339, parse_rfc3339

SOURCE_KINDS = ("ca_crl", "vendor")


@dataclass(frozen=True)
class RevocationSource:
    kind: str
    name: str

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown revocation source kind {self.kind!r}")


@dataclass(frozen=True)
class IssuerSerial:
    issuer: NormalizedName
    serial: str

    def matches(self, cert: CertRecord) -> bool:
        return cert.issuer == self.issuer and cert.serial == self.serial


@dataclass(frozen=True)
class SpkiDigest:
    digest: str

    def matches(self, cert: CertRecord) -> bool:
        return cert.spki_digest == self.digest


@dataclass(frozen=True)
class Fingerprint:
    digest: str

    def matches(self, cert: CertRecord) -> bool:
        return cert.fingerprint == self.digest


@dataclass(frozen=True)
class RevocationRecord:
    source: RevocationSource
    selector: object
    effective_date: datetime
    reason: Optional[str] = None

    def matches(self, cert: CertRecord) -> bool:
        return self.selector.matches(cert)

    def to_json(self) -> dict:
        if isinstance(self.selector, IssuerSerial):
            sel = {"type": "issuer_serial", "issuer": str(self.selector.issuer),
                   "serial": self.selector.serial}
        elif isinstance(self.selector, SpkiDigest):
            sel = {"type": "spki", "digest": self.selector.digest}
        elif isinstance(self.selector, Fingerprint):
            sel = {"type": "fingerprint", "digest": self.selector.digest}
        else:
            raise TypeError(f"unknown selector {self.selector!r}")
        out = {
            "source": {"kind": self.source.kind, "name": self.source.name},
            "selector": sel,
            "effective": format_rfc3339(self.effective_date),
        }
        if self.reason is not None:
            out["reason"] = self.reason
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RevocationRecord":
        sel = obj["selector"]
        sel_type = sel.get("type")
        if sel_type == "issuer_serial":
            selector = IssuerSerial(normalize_name(sel["issuer"]),
                                    str(sel["serial"]).lower())
        elif sel_type == "spki":
            selector = SpkiDigest(str(sel["digest"]).lower())
        elif sel_type == "fingerprint":
            selector = Fingerprint(str(sel["digest"]).lower())
        else:
            raise ValueError(f"unknown selector type {sel_type!r}")
        return cls(
            source=RevocationSource(obj["source"]["kind"], obj["source"]["name"]),
            selector=selector,
            effective_date=parse_rfc3339(obj["effective"]),
            reason=obj.get("reason"),
        )


@dataclass(frozen=True)
class RevocationView:
    """One consumer's revocation perspective: which sources it applies."""

    consumer_id: str
    accepted_sources: frozenset[str]

    def accepts(self, record: RevocationRecord) -> bool:
        return record.source.name in self.accepted_sources


VIEW_ALL_ID = "all"
VIEW_NONE_ID = "none"


def view_for(consumer_id: str, sources: Iterable[str]) -> RevocationView:
    return RevocationView(consumer_id, frozenset(sources))


def all_sources_view(records: Iterable[RevocationRecord]) -> RevocationView:
    return RevocationView(VIEW_ALL_ID,
                          frozenset(r.source.name for r in records))


def none_view() -> RevocationView:
    return RevocationView(VIEW_NONE_ID, frozenset())


def matching_records(cert: CertRecord, view: RevocationView,
                     records: Iterable[RevocationRecord]) -> list[RevocationRecord]:
    """Accepted records matching the certificate, regardless of date."""
    hits = [r for r in records if view.accepts(r) and r.matches(cert)]
    hits.sort(key=lambda r: (r.effective_date, r.source.name))
    return hits


def is_revoked(cert: CertRecord, view: RevocationView,
               records: Iterable[RevocationRecord],
               at: datetime) -> tuple[bool, list[RevocationRecord]]:
    """Revoked iff an accepted record matches with effective_date <= at.

    Returns the matching records as evidence (all accepted matches, so the
    caller can see pending-but-not-yet-effective entries too).
    """
    hits = matching_records(cert, view, records)
    return any(r.effective_date <= at for r in hits), hits


def revocation_onset(cert: CertRecord, view: RevocationView,
                     records: Iterable[RevocationRecord]) -> Optional[datetime]:
    """Earliest instant from which the certificate counts as revoked in the
    view, or None if never."""
    hits = matching_records(cert, view, records)
    return hits[0].effective_date if hits else None
