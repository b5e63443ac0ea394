"""Certificate relationship index, all-paths enumeration, and per-store
trust assessment over time.

Paths are built by name matching (child.issuer == parent.subject after
normalization), never by shortest-path search: every candidate chain up to
the depth bound is enumerated. Cycles are prevented by forbidding a repeated
SPKI digest within one path, which also tames mutual cross-sign pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Optional, Sequence

from . import intervals
from .certmodel import CertRecord, CryptoUnavailable, dns_identities, verify_signature
from .names import NormalizedName
from .revocation import RevocationRecord, RevocationView, matching_records
from .timeutil import DT_MAX, format_rfc3339
from .truststore import RootStoreTimeline, UnknownStore

DEFAULT_MAX_DEPTH = 12
MODES = ("structural", "cryptographic", "strict")

# Path flags
NC_VIOLATION_CRITICAL = "nc_violation_critical"
NC_VIOLATION_NONCRITICAL = "nc_violation_noncritical"
NC_UNEVALUATED = "nc_unevaluated"
UNKNOWN_CRITICAL = "unknown_critical"
NON_CA_ISSUER = "non_ca_issuer"
PATHLEN_EXCEEDED = "pathlen_exceeded"
EMPTY_VALIDITY = "empty_validity"


class CertIndex:
    """Immutable-after-build maps over a certificate corpus."""

    def __init__(self):
        self.records: dict[str, CertRecord] = {}
        self.by_subject: dict[NormalizedName, list[str]] = {}
        self.by_issuer: dict[NormalizedName, list[str]] = {}
        self.by_spki: dict[str, list[str]] = {}

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, fingerprint: str) -> bool:
        return fingerprint in self.records

    def add(self, record: CertRecord) -> bool:
        """Idempotent by fingerprint; returns True when newly added."""
        if record.fingerprint in self.records:
            return False
        self.records[record.fingerprint] = record
        self.by_subject.setdefault(record.subject, []).append(record.fingerprint)
        self.by_issuer.setdefault(record.issuer, []).append(record.fingerprint)
        self.by_spki.setdefault(record.spki_digest, []).append(record.fingerprint)
        return True

    def get(self, fingerprint: str) -> CertRecord:
        return self.records[fingerprint]

    def subjects(self, name: NormalizedName) -> list[CertRecord]:
        return [self.records[fp] for fp in sorted(self.by_subject.get(name, ()))]

    def issuers_of(self, record: CertRecord) -> list[CertRecord]:
        """Candidate parents: records whose subject matches the issuer name."""
        return self.subjects(record.issuer)

    def sorted_records(self) -> list[CertRecord]:
        return [self.records[fp] for fp in sorted(self.records)]


def build_index(certs: Iterable[CertRecord]) -> CertIndex:
    index = CertIndex()
    for record in certs:
        index.add(record)
    return index


@dataclass(frozen=True)
class TrustPath:
    """One candidate chain, leaf-side first, root-side last."""

    chain: tuple[str, ...]
    validity: Optional[tuple[datetime, datetime]]
    structural_ok: bool
    crypto_ok: Optional[bool]
    constraints_ok: bool
    flags: frozenset[str] = frozenset()

    def __len__(self) -> int:
        return len(self.chain)

    @property
    def leaf(self) -> str:
        return self.chain[0]

    @property
    def root(self) -> str:
        return self.chain[-1]

    def usable(self) -> bool:
        """Valid for trust computation under the mode it was enumerated in."""
        return (self.structural_ok and self.constraints_ok
                and self.validity is not None and self.crypto_ok is not False)


@dataclass
class PathEnumeration:
    paths: list[TrustPath]
    truncated: bool = False

    def usable_paths(self) -> list[TrustPath]:
        return [p for p in self.paths if p.usable()]


def _dns_matches_subtree(identity: str, subtree: str) -> bool:
    # RFC 5280 dNSName semantics: adding labels on the left satisfies the
    # constraint.
    return identity == subtree or identity.endswith("." + subtree)


def _nc_flags(records: Sequence[CertRecord]) -> set[str]:
    """Evaluate name constraints of every CA member against the certificates
    below it in the chain (records are leaf first)."""
    flags: set[str] = set()
    for idx in range(1, len(records)):
        nc = records[idx].name_constraints
        if nc is None:
            continue
        if any(s.kind not in ("dns", "dirname") for s in nc.permitted + nc.excluded):
            flags.add(NC_UNEVALUATED)
        below = records[:idx]
        violated = False
        dns_permitted = [s.value for s in nc.permitted if s.kind == "dns"]
        dir_permitted = [s.value for s in nc.permitted if s.kind == "dirname"]
        for member in below:
            idents = dns_identities(member)
            if dns_permitted and idents:
                if not all(any(_dns_matches_subtree(i, p) for p in dns_permitted)
                           for i in idents):
                    violated = True
            if dir_permitted and not member.subject.is_empty:
                if not any(member.subject.startswith(p) for p in dir_permitted):
                    violated = True
            for sub in nc.excluded:
                if sub.kind == "dns" and any(
                        _dns_matches_subtree(i, sub.value) for i in idents):
                    violated = True
                elif sub.kind == "dirname" and member.subject.startswith(sub.value):
                    violated = True
        if violated:
            flags.add(NC_VIOLATION_CRITICAL if nc.critical else NC_VIOLATION_NONCRITICAL)
    return flags


def _pathlen_ok(records: Sequence[CertRecord]) -> bool:
    # For the CA at position j (leaf first), the intermediates below it are
    # positions 1..j-1; self-issued members do not count (RFC 5280 style).
    for j in range(1, len(records)):
        limit = records[j].path_len_constraint
        if limit is None:
            continue
        below = sum(1 for r in records[1:j] if r.subject != r.issuer)
        if below > limit:
            return False
    return True


def _make_path(records: Sequence[CertRecord], mode: str) -> Optional[TrustPath]:
    flags: set[str] = set()

    start = max(r.not_before for r in records)
    end = min(r.not_after for r in records)
    validity = (start, end) if start < end else None
    if validity is None:
        flags.add(EMPTY_VALIDITY)

    ca_ok = all(r.ca_capable for r in records[1:])
    if not ca_ok:
        flags.add(NON_CA_ISSUER)
    pathlen_ok = _pathlen_ok(records)
    if not pathlen_ok:
        flags.add(PATHLEN_EXCEEDED)
    flags |= _nc_flags(records)
    if any(r.unknown_critical for r in records):
        flags.add(UNKNOWN_CRITICAL)

    if mode == "strict":
        if UNKNOWN_CRITICAL in flags:
            return None
        constraints_ok = (ca_ok and pathlen_ok
                          and NC_VIOLATION_CRITICAL not in flags
                          and NC_VIOLATION_NONCRITICAL not in flags)
    else:
        constraints_ok = (ca_ok and pathlen_ok
                          and NC_VIOLATION_CRITICAL not in flags)

    crypto_ok: Optional[bool] = None
    if mode == "cryptographic":
        crypto_ok = True
        for child, parent in zip(records, records[1:]):
            try:
                if not verify_signature(child, parent):
                    crypto_ok = False
                    break
            except CryptoUnavailable:
                crypto_ok = False
                break
        if not crypto_ok:
            return None

    return TrustPath(
        chain=tuple(r.fingerprint for r in records),
        validity=validity,
        structural_ok=True,
        crypto_ok=crypto_ok,
        constraints_ok=constraints_ok,
        flags=frozenset(flags),
    )


def enumerate_paths(cert: CertRecord, index: CertIndex,
                    max_depth: int = DEFAULT_MAX_DEPTH,
                    mode: str = "structural",
                    anchors: frozenset[str] = frozenset()) -> PathEnumeration:
    """All name-matching chains from `cert` to a terminal record.

    A chain terminates at a self-signed record or at a record listed in
    `anchors` (roots ever present in some store); terminal records with
    further parents also extend into longer chains. Hitting the depth bound
    with extensions left marks the enumeration truncated, which is data,
    not an error.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if cert.fingerprint not in index:
        raise KeyError(f"certificate {cert.fingerprint} not in index")

    result = PathEnumeration(paths=[])

    def walk(records: list[CertRecord], spkis: set[str]):
        current = records[-1]
        if current.self_signed or current.fingerprint in anchors:
            path = _make_path(records, mode)
            if path is not None:
                result.paths.append(path)
        parents = [p for p in index.issuers_of(current)
                   if p.spki_digest not in spkis]
        if not parents:
            return
        if len(records) >= max_depth:
            result.truncated = True
            return
        for parent in parents:
            spkis.add(parent.spki_digest)
            records.append(parent)
            walk(records, spkis)
            records.pop()
            spkis.discard(parent.spki_digest)

    walk([cert], {cert.spki_digest})
    result.paths.sort(key=lambda p: (len(p.chain), p.chain))
    return result


@dataclass
class TrustInterval:
    start: datetime
    end: datetime
    paths: list[tuple[str, ...]] = field(default_factory=list)
    blocked_by: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "from": format_rfc3339(self.start),
            "to": format_rfc3339(self.end),
            "paths": [list(chain) for chain in self.paths],
            "blocked_by": self.blocked_by,
        }


@dataclass
class TrustAssessment:
    fingerprint: str
    view_id: str
    stores: dict[str, list[TrustInterval]] = field(default_factory=dict)
    truncated: bool = False

    def intervals_for(self, store_id: str) -> list[intervals.Interval]:
        return [(ti.start, ti.end) for ti in self.stores.get(store_id, [])]

    def covered_stores(self) -> set[str]:
        return {sid for sid, items in self.stores.items() if items}

    def to_json(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "view": self.view_id,
            "stores": {sid: [ti.to_json() for ti in items]
                       for sid, items in sorted(self.stores.items())},
        }


def _boundary_events(path_records: Sequence[CertRecord],
                     store: RootStoreTimeline,
                     revocations: Sequence[RevocationRecord],
                     view: RevocationView) -> list[tuple[datetime, dict]]:
    """Instants at which this path's trust can change, with their causes."""
    events: list[tuple[datetime, dict]] = []
    root = path_records[-1]
    validity_end = min(r.not_after for r in path_records)
    expiring = min(path_records, key=lambda r: r.not_after)
    events.append((validity_end, {
        "kind": "path_expiry", "member": expiring.fingerprint}))
    for member in path_records:
        for rec in matching_records(member, view, revocations):
            events.append((rec.effective_date, {
                "kind": "revocation", "member": member.fingerprint,
                "source": rec.source.name,
                "reason": rec.reason or "",
            }))
    for rule in store.distrust_rules:
        if rule.matches_anchor(root) and path_records[0].not_before > rule.issued_after:
            events.append((rule.effective_from, {
                "kind": "distrust_rule", "description": rule.description}))
    presence = store.presence_intervals(root.fingerprint)
    for _, end in presence:
        if end != DT_MAX:
            events.append((end, {
                "kind": "store_removal", "store": store.store_id,
                "root": root.fingerprint}))
    return events


def assess_trust(cert: CertRecord, index: CertIndex,
                 stores: Sequence[RootStoreTimeline],
                 revocations: Sequence[RevocationRecord],
                 view: RevocationView,
                 max_depth: int = DEFAULT_MAX_DEPTH,
                 mode: str = "structural") -> TrustAssessment:
    """Per store, the maximal intervals during which some enumerated path
    makes `cert` trusted: path validity covers the instant, the path root is
    in the store, no member is revoked in the view, and no distrust rule
    blocks the path."""
    anchors = frozenset().union(*(s.ever_roots() for s in stores)) if stores else frozenset()
    enumeration = enumerate_paths(cert, index, max_depth=max_depth,
                                  mode=mode, anchors=anchors)
    assessment = TrustAssessment(cert.fingerprint, view.consumer_id,
                                 truncated=enumeration.truncated)

    usable = enumeration.usable_paths()
    for store in stores:
        per_path: list[tuple[TrustPath, list[intervals.Interval]]] = []
        events: list[tuple[datetime, dict]] = []
        for path in usable:
            records = [index.get(fp) for fp in path.chain]
            root = records[-1]
            allowed = intervals.intersect(
                [path.validity], store.presence_intervals(root.fingerprint))
            if not allowed:
                continue
            blocks: list[intervals.Interval] = []
            for member in records:
                for rec in matching_records(member, view, revocations):
                    blocks.append((rec.effective_date, DT_MAX))
            for rule in store.distrust_rules:
                if rule.matches_anchor(root) and records[0].not_before > rule.issued_after:
                    blocks.append((rule.effective_from, DT_MAX))
            allowed = intervals.subtract(allowed, blocks)
            if allowed:
                per_path.append((path, allowed))
                events.extend(_boundary_events(records, store, revocations, view))

        merged = intervals.normalize(
            [iv for _, ivs in per_path for iv in ivs])
        out: list[TrustInterval] = []
        for start, end in merged:
            supporting = sorted(
                {p.chain for p, ivs in per_path
                 if intervals.intersect(ivs, [(start, end)])},
                key=lambda c: (len(c), c))
            causes = sorted(
                {tuple(sorted(cause.items())) for at, cause in events if at == end})
            out.append(TrustInterval(
                start=start, end=end, paths=list(supporting),
                blocked_by=[dict(c) for c in causes]))
        assessment.stores[store.store_id] = out
    return assessment


def stores_by_id(stores: Iterable[RootStoreTimeline]) -> dict[str, RootStoreTimeline]:
    out: dict[str, RootStoreTimeline] = {}
    for store in stores:
        if store.store_id in out:
            raise ValueError(f"duplicate store id {store.store_id!r}")
        out[store.store_id] = store
    return out


def select_stores(stores: Sequence[RootStoreTimeline],
                  store_ids: Optional[Sequence[str]]) -> list[RootStoreTimeline]:
    if store_ids is None:
        return list(stores)
    known = stores_by_id(stores)
    missing = [sid for sid in store_ids if sid not in known]
    if missing:
        raise UnknownStore(f"unknown store(s): {', '.join(missing)}")
    return [known[sid] for sid in store_ids]
