"""On-disk analysis workspace: content-addressed certificate records,
store/revocation/operator/view configs, and report caching keyed by an
input hash."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Optional

from .certmodel import (CertRecord, MalformedInput, load_pem_bundle,
                        parse_certificate, record_from_json, record_to_json)
from .revocation import RevocationRecord, RevocationView
from .truststore import OperatorMap, RootStoreTimeline
from .xsext import XsExtension, decode_xs_extension


class SchemaError(ValueError):
    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None):
        super().__init__(message)
        self.path = path
        self.line = line

    def to_json(self) -> dict:
        out = {"error": "schema", "detail": str(self)}
        if self.path is not None:
            out["path"] = self.path
        if self.line is not None:
            out["line"] = self.line
        return out


_CONFIG_FILES = {
    "stores": "stores.json",
    "operators": "operators.json",
    "views": "views.json",
    "revocations": "revocations.jsonl",
    "extensions": "extensions.jsonl",
    "explanations": "explanations.jsonl",
}


class Workspace:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.certs_dir = self.root / "certs"
        self.config_dir = self.root / "config"
        self.reports_dir = self.root / "reports"
        for d in (self.certs_dir, self.config_dir, self.reports_dir):
            d.mkdir(parents=True, exist_ok=True)

    # -- certificates --

    def add_record(self, record: CertRecord) -> bool:
        """Content-addressed by fingerprint; re-ingestion is idempotent.
        Raw bytes are attached even when the metadata record already
        exists."""
        path = self.certs_dir / f"{record.fingerprint}.json"
        der = self.certs_dir / f"{record.fingerprint}.der"
        if record.raw is not None and not der.exists():
            der.write_bytes(record.raw)
        if path.exists():
            return False
        path.write_text(json.dumps(record_to_json(record), sort_keys=True) + "\n",
                        encoding="utf-8")
        return True

    def load_records(self) -> list[CertRecord]:
        records = []
        for path in sorted(self.certs_dir.glob("*.json")):
            record = record_from_json(json.loads(path.read_text()))
            der = path.with_suffix(".der")
            if der.exists():
                record = parse_certificate(der.read_bytes())
            records.append(record)
        return records

    # -- ingestion --

    def ingest_paths(self, paths: Iterable[Path], fmt: str) -> dict:
        summary = {"added": 0, "duplicates": 0, "revocations": 0, "stores": 0,
                   "operators": 0, "views": 0, "extensions": 0,
                   "explanations": 0}
        for path in paths:
            path = Path(path)
            if path.is_dir():
                children = sorted(p for p in path.rglob("*") if p.is_file())
                self._ingest_files(children, fmt, summary)
            else:
                self._ingest_files([path], fmt, summary)
        return summary

    def _ingest_files(self, files: list[Path], fmt: str, summary: dict):
        for path in files:
            if path.suffix == ".json":
                self._ingest_config_json(path, summary)
            elif fmt == "jsonl" or path.suffix == ".jsonl":
                self._ingest_jsonl(path, summary)
            elif fmt == "pem" or path.suffix == ".pem":
                try:
                    records = load_pem_bundle(path.read_bytes())
                except MalformedInput as exc:
                    raise SchemaError(str(exc), path=str(path)) from exc
                for record in records:
                    self._count_add(record, summary)
            elif fmt == "der":
                try:
                    record = parse_certificate(path.read_bytes())
                except MalformedInput as exc:
                    raise SchemaError(str(exc), path=str(path)) from exc
                self._count_add(record, summary)
            else:
                raise SchemaError(f"cannot ingest {path.name} as {fmt}",
                                  path=str(path))

    def _count_add(self, record: CertRecord, summary: dict):
        if self.add_record(record):
            summary["added"] += 1
        else:
            summary["duplicates"] += 1

    def _ingest_config_json(self, path: Path, summary: dict):
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}", path=str(path)) from exc
        if not isinstance(doc, dict):
            raise SchemaError("top-level JSON must be an object", path=str(path))
        try:
            if "stores" in doc or "store_id" in doc:
                stores = doc.get("stores", [doc] if "store_id" in doc else [])
                existing = {s.store_id: s for s in self.load_stores()}
                for obj in stores:
                    store = RootStoreTimeline.from_json(obj)
                    existing[store.store_id] = store
                payload = {"stores": [existing[k].to_json()
                                      for k in sorted(existing)]}
                (self.config_dir / _CONFIG_FILES["stores"]).write_text(
                    json.dumps(payload, sort_keys=True, indent=1) + "\n")
                summary["stores"] += len(stores)
            elif "operators" in doc or "ownership_events" in doc:
                OperatorMap.from_json(doc)
                (self.config_dir / _CONFIG_FILES["operators"]).write_text(
                    json.dumps(doc, sort_keys=True, indent=1) + "\n")
                summary["operators"] += 1
            elif "views" in doc:
                for view in doc["views"]:
                    if "consumer_id" not in view:
                        raise SchemaError("view requires consumer_id",
                                          path=str(path))
                (self.config_dir / _CONFIG_FILES["views"]).write_text(
                    json.dumps(doc, sort_keys=True, indent=1) + "\n")
                summary["views"] += len(doc["views"])
            elif "scenario_id" in doc:
                pass  # bundle metadata, nothing to ingest
            else:
                raise SchemaError(f"unrecognized config document {path.name}",
                                  path=str(path))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"bad config: {exc}", path=str(path)) from exc

    def _ingest_jsonl(self, path: Path, summary: dict):
        records: list[CertRecord] = []
        revocation_lines: list[dict] = []
        extension_lines: list[dict] = []
        explanation_lines: list[dict] = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"invalid JSON: {exc}",
                                      path=str(path), line=lineno) from exc
                try:
                    if "selector" in obj:
                        RevocationRecord.from_json(obj)
                        revocation_lines.append(obj)
                    elif "extension" in obj:
                        extension_lines.append(obj)
                    elif "explained" in obj:
                        explanation_lines.append(obj)
                    elif "fingerprint" in obj:
                        records.append(record_from_json(obj))
                    else:
                        raise ValueError("unrecognized record shape")
                except (MalformedInput, KeyError, TypeError, ValueError) as exc:
                    raise SchemaError(f"bad record: {exc}",
                                      path=str(path), line=lineno) from exc
        for record in records:
            self._count_add(record, summary)
        if revocation_lines:
            self._append_jsonl("revocations", revocation_lines)
            summary["revocations"] += len(revocation_lines)
        if extension_lines:
            self._append_jsonl("extensions", extension_lines)
            summary["extensions"] += len(extension_lines)
        if explanation_lines:
            self._append_jsonl("explanations", explanation_lines)
            summary["explanations"] += len(explanation_lines)

    def _append_jsonl(self, kind: str, lines: list[dict]):
        path = self.config_dir / _CONFIG_FILES[kind]
        seen = set()
        if path.exists():
            seen = {ln for ln in path.read_text().splitlines() if ln}
        with open(path, "a", encoding="utf-8") as fh:
            for obj in lines:
                text = json.dumps(obj, sort_keys=True)
                if text not in seen:
                    fh.write(text + "\n")
                    seen.add(text)

    # -- config loading --

    def load_stores(self) -> list[RootStoreTimeline]:
        path = self.config_dir / _CONFIG_FILES["stores"]
        if not path.exists():
            return []
        doc = json.loads(path.read_text())
        return [RootStoreTimeline.from_json(s) for s in doc["stores"]]

    def load_revocations(self) -> list[RevocationRecord]:
        path = self.config_dir / _CONFIG_FILES["revocations"]
        if not path.exists():
            return []
        out = []
        for line in path.read_text().splitlines():
            if line.strip():
                out.append(RevocationRecord.from_json(json.loads(line)))
        return out

    def load_operator_map(self) -> Optional[OperatorMap]:
        path = self.config_dir / _CONFIG_FILES["operators"]
        if not path.exists():
            return None
        return OperatorMap.from_json(json.loads(path.read_text()))

    def load_views(self) -> list[RevocationView]:
        path = self.config_dir / _CONFIG_FILES["views"]
        if not path.exists():
            return []
        doc = json.loads(path.read_text())
        return [RevocationView(v["consumer_id"], frozenset(v["accepted_sources"]))
                for v in doc["views"]]

    def load_extensions(self) -> dict[str, XsExtension]:
        path = self.config_dir / _CONFIG_FILES["extensions"]
        if not path.exists():
            return {}
        out = {}
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            payload = json.dumps(obj["extension"], sort_keys=True,
                                 separators=(",", ":"),
                                 ensure_ascii=False).encode()
            out[obj["member"]] = decode_xs_extension(payload)
        return out

    def load_explanations(self) -> list[str]:
        path = self.config_dir / _CONFIG_FILES["explanations"]
        if not path.exists():
            return []
        out = []
        for line in path.read_text().splitlines():
            if line.strip():
                out.append(json.loads(line)["explained"])
        return out

    # -- caching --

    def input_hash(self, options: dict) -> str:
        digest = hashlib.sha256()
        for path in sorted(self.certs_dir.glob("*")):
            digest.update(path.name.encode())
        for name in sorted(_CONFIG_FILES.values()):
            path = self.config_dir / name
            if path.exists():
                digest.update(name.encode())
                digest.update(path.read_bytes())
        digest.update(json.dumps(options, sort_keys=True).encode())
        return digest.hexdigest()

    def reports_current(self, options: dict, names: Iterable[str]) -> bool:
        stamp = self.reports_dir / "stamp.json"
        if not stamp.exists():
            return False
        try:
            recorded = json.loads(stamp.read_text())
        except json.JSONDecodeError:
            return False
        if recorded.get("input_hash") != self.input_hash(options):
            return False
        return all((self.reports_dir / name).exists() for name in names)

    def write_stamp(self, options: dict):
        (self.reports_dir / "stamp.json").write_text(json.dumps(
            {"input_hash": self.input_hash(options), "options": options},
            sort_keys=True, indent=1) + "\n")

    def write_report(self, name: str, lines: Iterable[str]):
        with open(self.reports_dir / name, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")

    def read_report(self, name: str) -> Optional[str]:
        path = self.reports_dir / name
        return path.read_text(encoding="utf-8") if path.exists() else None
