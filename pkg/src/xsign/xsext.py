"""Cross-sign motivation extension: encoding, decoding, and operational
lints.

The payload is canonical UTF-8 JSON (sorted keys, no insignificant
whitespace) carried under a fixed private extension identifier, which makes
round-trips byte-exact. Unknown motivation kinds survive decode/re-encode
unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Mapping, Optional, Sequence

from .certmodel import CertRecord
from .revocation import RevocationRecord, RevocationView
from .timeutil import format_rfc3339, parse_rfc3339
from .truststore import RootStoreTimeline
from .xsdetect import XSCertGroup
from . import findings as _findings

# Private arc; structural tools treat the payload as opaque bytes.
XS_EXTENSION_OID = "1.3.6.1.4.1.55555.1.1"

DEFAULT_MAX_VALIDITY_DAYS = 398
SHORT_LIVED_VALIDITY_DAYS = 4


class MalformedExtension(ValueError):
    pass


@dataclass(frozen=True)
class Bootstrapping:
    bootstrapped_cert: str
    target_stores: tuple[str, ...]
    inclusion_request_ref: str
    kind = "bootstrapping"


@dataclass(frozen=True)
class ExpandingTrust:
    target_stores: tuple[str, ...]
    kind = "expanding_trust"


@dataclass(frozen=True)
class FallBack:
    target_stores: tuple[str, ...]
    fallback_for: str
    kind = "fall_back"


@dataclass(frozen=True)
class MultipleAlgorithms:
    algorithm_set: tuple[str, ...]
    path_certs: tuple[str, ...]
    kind = "multiple_algorithms"


@dataclass(frozen=True)
class OpaqueMotivation:
    """Unknown future variant; payload is preserved verbatim on re-encode."""

    payload_json: str

    @property
    def kind(self) -> str:
        return json.loads(self.payload_json).get("kind", "unknown")


Motivation = object


@dataclass(frozen=True)
class LogTimestamp:
    log_id: str
    timestamp: datetime


@dataclass(frozen=True)
class XsExtension:
    motivations: tuple[Motivation, ...]
    issuance_timestamps: tuple[LogTimestamp, ...] = ()

    def __post_init__(self):
        if not self.motivations:
            raise MalformedExtension("extension requires at least one motivation")
        for m in self.motivations:
            if isinstance(m, (Bootstrapping, ExpandingTrust, FallBack)):
                if not m.target_stores:
                    raise MalformedExtension(
                        f"{m.kind} motivation requires target stores")
            if isinstance(m, MultipleAlgorithms):
                if not m.algorithm_set:
                    raise MalformedExtension(
                        "multiple_algorithms requires an algorithm set")
                if not m.path_certs:
                    raise MalformedExtension(
                        "multiple_algorithms requires path certificates")
            if isinstance(m, Bootstrapping) and not m.inclusion_request_ref.strip():
                raise MalformedExtension(
                    "bootstrapping requires an inclusion request reference")

    def log_ids(self) -> frozenset[str]:
        return frozenset(ts.log_id for ts in self.issuance_timestamps)


def _motivation_to_obj(m: Motivation) -> dict:
    if isinstance(m, Bootstrapping):
        return {"kind": m.kind, "bootstrapped_cert": m.bootstrapped_cert,
                "target_stores": list(m.target_stores),
                "inclusion_request_ref": m.inclusion_request_ref}
    if isinstance(m, ExpandingTrust):
        return {"kind": m.kind, "target_stores": list(m.target_stores)}
    if isinstance(m, FallBack):
        return {"kind": m.kind, "target_stores": list(m.target_stores),
                "fallback_for": m.fallback_for}
    if isinstance(m, MultipleAlgorithms):
        return {"kind": m.kind, "algorithm_set": list(m.algorithm_set),
                "path_certs": list(m.path_certs)}
    if isinstance(m, OpaqueMotivation):
        return json.loads(m.payload_json)
    raise MalformedExtension(f"unknown motivation object {m!r}")


def _motivation_from_obj(obj: dict) -> Motivation:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedExtension("motivation requires a 'kind' tag")
    kind = obj["kind"]
    try:
        if kind == "bootstrapping":
            return Bootstrapping(
                bootstrapped_cert=str(obj["bootstrapped_cert"]),
                target_stores=tuple(obj["target_stores"]),
                inclusion_request_ref=str(obj["inclusion_request_ref"]))
        if kind == "expanding_trust":
            return ExpandingTrust(target_stores=tuple(obj["target_stores"]))
        if kind == "fall_back":
            return FallBack(target_stores=tuple(obj["target_stores"]),
                            fallback_for=str(obj["fallback_for"]))
        if kind == "multiple_algorithms":
            return MultipleAlgorithms(
                algorithm_set=tuple(obj["algorithm_set"]),
                path_certs=tuple(obj["path_certs"]))
    except KeyError as exc:
        raise MalformedExtension(f"{kind} motivation missing {exc}") from exc
    return OpaqueMotivation(_canonical(obj))


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


def encode_xs_extension(ext: XsExtension) -> bytes:
    doc = {
        "motivations": [_motivation_to_obj(m) for m in ext.motivations],
        "issuance_timestamps": [
            {"log_id": ts.log_id, "timestamp": format_rfc3339(ts.timestamp)}
            for ts in ext.issuance_timestamps
        ],
    }
    return _canonical(doc).encode("utf-8")


def decode_xs_extension(data: bytes) -> XsExtension:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedExtension(f"undecodable extension payload: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedExtension("extension payload must be a JSON object")
    motivations = tuple(_motivation_from_obj(m)
                        for m in doc.get("motivations", []))
    timestamps = []
    for ts in doc.get("issuance_timestamps", []):
        try:
            timestamps.append(LogTimestamp(str(ts["log_id"]),
                                           parse_rfc3339(ts["timestamp"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedExtension(f"bad issuance timestamp: {ts!r}") from exc
    return XsExtension(motivations=motivations,
                       issuance_timestamps=tuple(timestamps))


# --- linting ------------------------------------------------------------------

VERDICTS = {
    "V1": "ValidityTooLong",
    "V2": "MissingExtension",
    "V3": "BootstrapComplete",
    "V4": "RedundantExpansion",
    "V5": "AlgorithmPathImpure",
    "V6": "LogSplit",
    "V7": "UnexplainedInconsistency",
}


@dataclass(frozen=True)
class LintVerdict:
    code: str
    member: str
    detail: str

    @property
    def name(self) -> str:
        return VERDICTS[self.code]

    def to_json(self) -> dict:
        return {"verdict": f"{self.code}_{self.name}", "member": self.member,
                "detail": self.detail}


def _ordered_members(group: XSCertGroup,
                     lookup: Mapping[str, CertRecord]) -> list[CertRecord]:
    return sorted((lookup[fp] for fp in group.members if fp in lookup),
                  key=lambda r: (r.not_before, r.fingerprint))


def lint_cross_sign(group: XSCertGroup,
                    stores: Sequence[RootStoreTimeline],
                    exts: Mapping[str, XsExtension],
                    revocations: Sequence[RevocationRecord],
                    max_validity_days: int = DEFAULT_MAX_VALIDITY_DAYS,
                    *,
                    lookup: Mapping[str, CertRecord],
                    coverage: Optional[Mapping[str, set[str]]] = None,
                    views: Sequence[RevocationView] = (),
                    explanations: Iterable[str] = (),
                    at: Optional[datetime] = None,
                    index=None,
                    operator_map=None) -> list[LintVerdict]:
    """Operational lints V1..V7 for one cross-sign group.

    `lookup` resolves fingerprints to records (extension path references may
    point outside the group). `coverage` maps member fingerprints to the
    store ids they provide valid paths to; `explanations` carries group keys
    (subject|spki) or member fingerprints with published explanations for
    revocation inconsistencies. `at` is the lint reference instant, default
    the latest store snapshot."""
    verdicts: list[LintVerdict] = []
    members = _ordered_members(group, lookup)
    if not members:
        return []
    if at is None:
        dates = [s.effective_date for store in stores for s in store.snapshots]
        at = max(dates) if dates else max(m.not_before for m in members)
    store_map = {s.store_id: s for s in stores}
    qualified = {fp for p in group.qualifying_pairs for fp in (p.a, p.b)}

    limit = timedelta(days=max_validity_days)
    for member in members:
        if member.not_after - member.not_before > limit:
            days = (member.not_after - member.not_before).days
            verdicts.append(LintVerdict(
                "V1", member.fingerprint,
                f"validity {days}d exceeds limit {max_validity_days}d"))

    # The "original" member needs no motivation extension: self-signed
    # members, plus the earliest member issued within the subject's own
    # operator (earliest overall when no operator data is available).
    exempt = {m.fingerprint for m in members if m.self_signed}
    internal = []
    if operator_map is not None:
        for m in members:
            subj_op = operator_map.operator_of(m, m.not_before)
            issuer_op = operator_map.operator_for_name(m.issuer, m.not_before)
            if subj_op is not None and subj_op == issuer_op:
                internal.append(m)
    exempt.add((internal[0] if internal else members[0]).fingerprint)
    for member in members:
        if (member.fingerprint in qualified
                and member.fingerprint not in exempt
                and member.fingerprint not in exts):
            verdicts.append(LintVerdict(
                "V2", member.fingerprint,
                "cross-sign member lacks a motivation extension"))

    for member in members:
        ext = exts.get(member.fingerprint)
        if ext is None:
            continue
        for m in ext.motivations:
            if isinstance(m, Bootstrapping):
                missing = [sid for sid in m.target_stores
                           if sid not in store_map
                           or m.bootstrapped_cert not in store_map[sid].active_roots(at)]
                if not missing:
                    verdicts.append(LintVerdict(
                        "V3", member.fingerprint,
                        f"bootstrapped cert {m.bootstrapped_cert[:16]} now in all "
                        f"target stores; cross-sign must not be renewed"))
            elif isinstance(m, ExpandingTrust) and coverage is not None:
                earlier = [o for o in members
                           if (o.not_before, o.fingerprint)
                           < (member.not_before, member.fingerprint)]
                for sid in m.target_stores:
                    for other in earlier:
                        other_ext = exts.get(other.fingerprint)
                        is_fallback = other_ext is not None and any(
                            isinstance(om, FallBack) for om in other_ext.motivations)
                        if is_fallback:
                            continue
                        if sid in coverage.get(other.fingerprint, set()):
                            verdicts.append(LintVerdict(
                                "V4", member.fingerprint,
                                f"store {sid} already covered by "
                                f"{other.fingerprint[:16]}"))
                            break
            elif isinstance(m, MultipleAlgorithms):
                allowed = set(m.algorithm_set)
                chain = [member.fingerprint, *m.path_certs]
                outside = sorted({
                    lookup[fp].signature_algorithm for fp in chain
                    if fp in lookup
                    and lookup[fp].signature_algorithm not in allowed})
                if outside:
                    verdicts.append(LintVerdict(
                        "V5", member.fingerprint,
                        f"declared path uses algorithms outside the set: "
                        f"{', '.join(outside)}"))

    with_logs = [(m, exts[m.fingerprint].log_ids()) for m in members
                 if m.fingerprint in exts and exts[m.fingerprint].log_ids()]
    if len(with_logs) >= 2:
        common = frozenset.intersection(*(logs for _, logs in with_logs))
        if not common:
            verdicts.append(LintVerdict(
                "V6", with_logs[-1][0].fingerprint,
                "group members report to disjoint CT logs"))

    if index is not None:
        inconsistent = _findings.find_revocation_inconsistency(
            group, revocations, list(views), index)
        if inconsistent:
            keys = set(explanations)
            group_key = f"{group.subject}|{group.spki_digest}"
            explained = group_key in keys or any(
                fp in keys for fp in group.members)
            if not explained:
                verdicts.append(LintVerdict(
                    "V7", members[-1].fingerprint,
                    "revocation inconsistency without a published explanation"))

    verdicts.sort(key=lambda v: (v.code, v.member, v.detail))
    return verdicts
