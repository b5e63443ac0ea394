import json
import subprocess

import pytest

from xsign.certmodel import (CryptoUnavailable, MalformedInput,
                             parse_certificate, record_from_json, record_to_json,
                             verify_signature)


def test_self_signed_v3_ca(figure1_crypto):
    root = figure1_crypto.record("R1")
    assert root.is_ca
    assert root.self_signed
    assert root.subject == root.issuer
    assert not root.legacy_v1


def test_interchange_rejects_inverted_validity():
    obj = {
        "fingerprint": "ab" * 32, "subject": "CN=x", "issuer": "CN=x",
        "spki": "cd" * 32, "serial": "1",
        "not_before": "2020-01-01T00:00:00Z",
        "not_after": "2019-01-01T00:00:00Z",
        "is_ca": False,
    }
    with pytest.raises(MalformedInput):
        record_from_json(obj)


def test_interchange_rejects_inconsistent_self_signed():
    obj = {
        "fingerprint": "ab" * 32, "subject": "CN=x", "issuer": "CN=y",
        "spki": "cd" * 32, "serial": "1",
        "not_before": "2019-01-01T00:00:00Z",
        "not_after": "2020-01-01T00:00:00Z",
        "is_ca": False, "self_signed": True,
    }
    with pytest.raises(MalformedInput):
        record_from_json(obj)


def test_undecodable_input():
    with pytest.raises(MalformedInput):
        parse_certificate(b"not a certificate")


def test_interchange_unknown_keys_ignored(figure1):
    obj = record_to_json(figure1.record("L1"))
    obj["future_field"] = {"x": 1}
    assert record_from_json(obj) == figure1.record("L1")


def test_interchange_round_trip_idempotent(figure1_crypto):
    # Everything except raw bytes survives JSON interchange.
    for record in figure1_crypto.records:
        back = record_from_json(json.loads(json.dumps(record_to_json(record))))
        assert back == record.without_raw()
        assert record_to_json(back) == record_to_json(record)


def test_generated_leaf_against_standard_tooling(figure1_crypto):
    # Independent decode of the same DER bytes via the openssl CLI.
    leaf = figure1_crypto.record("L1")
    ca = figure1_crypto.record("I1")
    assert leaf.issuer == ca.subject
    assert verify_signature(leaf, ca)

    out = subprocess.run(
        ["openssl", "x509", "-inform", "DER", "-noout", "-serial",
         "-fingerprint", "-sha256", "-dates"],
        input=leaf.raw, capture_output=True, check=True).stdout.decode()
    fields = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert fields["serial"].lower().lstrip("0") == leaf.serial.lstrip("0")
    openssl_fp = fields["sha256 Fingerprint"].replace(":", "").lower()
    assert openssl_fp == leaf.fingerprint
    # openssl prints validity as e.g. "Jan  1 00:00:00 2015 GMT"
    from datetime import datetime, timezone
    nb = datetime.strptime(fields["notBefore"], "%b %d %H:%M:%S %Y %Z").replace(
        tzinfo=timezone.utc)
    assert nb == leaf.not_before


def test_verify_rejects_same_name_different_key(figure1_crypto):
    # R1 and R2 carry different keys; a chain edge between unrelated certs
    # must fail even though both are plausible CA records.
    leaf = figure1_crypto.record("L1")
    wrong = figure1_crypto.record("R2")
    assert not verify_signature(leaf, wrong)


def test_mutual_cross_sign_edges_verify(mutual_crypto):
    b = mutual_crypto
    edges = [("R1x", "R2"), ("R1x", "R2x"), ("R2x", "R1"), ("R2x", "R1x")]
    for child, issuer in edges:
        assert verify_signature(b.record(child), b.record(issuer)), (child, issuer)


def test_verify_requires_raw_bytes(figure1):
    leaf = figure1.record("L1")
    root = figure1.record("R1")
    with pytest.raises(CryptoUnavailable):
        verify_signature(leaf, root)


def test_legacy_v1_self_signed_is_ca_capable(tmp_path):
    # openssl's legacy req-signing path emits X509v1 (no extensions at all).
    key = tmp_path / "key.pem"
    csr = tmp_path / "csr.pem"
    pem = tmp_path / "cert.pem"
    subprocess.run(["openssl", "ecparam", "-name", "prime256v1", "-genkey",
                    "-noout", "-out", str(key)], check=True,
                   capture_output=True)
    subprocess.run(["openssl", "req", "-new", "-key", str(key), "-subj",
                    "/CN=Old Root", "-out", str(csr)], check=True,
                   capture_output=True)
    subprocess.run(["openssl", "x509", "-req", "-in", str(csr), "-signkey",
                    str(key), "-days", "365", "-out", str(pem)], check=True,
                   capture_output=True)
    record = parse_certificate(pem.read_bytes())
    assert record.legacy_v1
    assert record.self_signed
    assert record.is_ca


def test_unknown_critical_extension_flagged_not_fatal():
    from cryptography import x509
    from cryptography.hazmat.primitives import hashes, serialization
    from cryptography.hazmat.primitives.asymmetric import ec
    from cryptography.x509.oid import NameOID, ObjectIdentifier
    from datetime import datetime, timezone

    key = ec.generate_private_key(ec.SECP256R1())
    name = x509.Name([x509.NameAttribute(NameOID.COMMON_NAME, "Odd CA")])
    cert = (x509.CertificateBuilder()
            .subject_name(name).issuer_name(name)
            .public_key(key.public_key()).serial_number(8)
            .not_valid_before(datetime(2020, 1, 1, tzinfo=timezone.utc))
            .not_valid_after(datetime(2030, 1, 1, tzinfo=timezone.utc))
            .add_extension(x509.BasicConstraints(ca=True, path_length=None),
                           critical=True)
            .add_extension(x509.UnrecognizedExtension(
                ObjectIdentifier("1.2.3.4.5.6.7.8.1"), b"\x01"), critical=True)
            .sign(key, hashes.SHA256()))
    record = parse_certificate(cert.public_bytes(serialization.Encoding.DER))
    assert record.unknown_critical
    assert record.is_ca
