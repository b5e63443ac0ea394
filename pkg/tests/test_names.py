import random

from hypothesis import given
from hypothesis import strategies as st

from xsign.names import EMPTY_NAME, format_name, normalize_name

value_text = st.text(
    alphabet=st.sampled_from("abcXYZ019 \t-._"), min_size=1, max_size=12
).filter(lambda s: s.strip())
rdn = st.lists(st.tuples(st.sampled_from(["CN", "O", "OU", "C"]), value_text),
               min_size=1, max_size=2)
name_parts = st.lists(rdn, min_size=0, max_size=4)


def test_case_and_whitespace_insensitive():
    a = normalize_name("CN=Example CA, O=Example")
    b = normalize_name("cn=example  ca, o=EXAMPLE")
    assert a == b


def test_empty_name_equals_only_empty():
    assert normalize_name("") == EMPTY_NAME
    assert normalize_name("").is_empty
    assert normalize_name("") != normalize_name("CN=x")


def test_component_order_significant():
    a = normalize_name("CN=a, O=b")
    b = normalize_name("O=b, CN=a")
    assert a != b


def test_multivalued_rdn_is_a_set():
    a = normalize_name("CN=a+O=b, C=us")
    b = normalize_name("O=b+CN=a, C=us")
    assert a == b


def test_escaped_separators():
    name = normalize_name(r"CN=Example\, Inc, O=Acme")
    assert len(name.rdns) == 2
    assert name.attr_values("cn") == ["example, inc"]


def test_format_round_trip(figure1):
    for record in figure1.records:
        assert normalize_name(format_name(record.subject)) == record.subject


@given(name_parts)
def test_normalize_idempotent(parts):
    once = normalize_name(parts)
    assert normalize_name(once) == once
    assert normalize_name(format_name(once)) == once


@given(name_parts)
def test_perturbed_case_equal(parts):
    upper = [[(t, v.upper()) for t, v in r] for r in parts]
    assert normalize_name(parts) == normalize_name(upper)


def test_order_matches_strict_order_oracle():
    # Independent oracle: ordered tuple comparison of normalized components.
    rng = random.Random(7)
    attrs = ["CN", "O", "OU", "C", "L"]
    for _ in range(100):
        n = rng.randrange(2, 5)
        parts = [[(rng.choice(attrs), f"v{rng.randrange(5)}")] for _ in range(n)]
        shuffled = parts[:]
        rng.shuffle(shuffled)
        a, b = normalize_name(parts), normalize_name(shuffled)
        oracle_equal = [sorted(r) for r in a.rdns] == [sorted(r) for r in b.rdns]
        assert (a == b) == oracle_equal


def test_startswith_prefix_semantics():
    full = normalize_name("C=ch, O=Swiss Government PKI, CN=Anything")
    prefix = normalize_name("C=ch, O=swiss  government pki")
    other = normalize_name("C=us")
    assert full.startswith(prefix)
    assert not full.startswith(other)
    assert not prefix.startswith(full)
