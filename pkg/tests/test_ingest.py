import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csirec.ingest import (
    IngestError,
    RatingFormat,
    RatingRecord,
    load_like_graph,
    parse_ratings,
    read_links,
    threshold_links,
    write_links,
)

ML = RatingFormat.parse("ml-100k")
THREE = RatingFormat.parse("sep=tab;fields=user,object,rating")


def test_parse_movielens_line():
    recs = parse_ratings(io.BytesIO(b"196\t242\t3\t881250949\n"), ML)
    assert recs == [RatingRecord("196", "242", 3.0)]


def test_arity_error_reports_line():
    src = io.BytesIO(b"1\t2\t3\n196;242\n")
    with pytest.raises(IngestError) as err:
        parse_ratings(src, THREE)
    assert err.value.line == 2


def test_out_of_scale_rating_rejected():
    with pytest.raises(IngestError, match="line 1"):
        parse_ratings(io.BytesIO(b"1\t2\t9\n"), THREE)


def test_non_numeric_rating_rejected():
    with pytest.raises(IngestError, match="not a number"):
        parse_ratings(io.BytesIO(b"1\t2\tgood\n"), THREE)


def test_empty_input_is_empty():
    assert parse_ratings(io.BytesIO(b""), THREE) == []


def test_header_and_blank_lines():
    fmt = RatingFormat.parse("csv")
    recs = parse_ratings(io.BytesIO(b"user,item,rating\n\n1,2,4\n"), fmt)
    assert recs == [RatingRecord("1", "2", 4.0)]


def test_duplicates_pass_through():
    recs = parse_ratings(io.BytesIO(b"u\to\t2\nu\to\t4\n"), THREE)
    assert [r.rating for r in recs] == [2.0, 4.0]


def test_binary_stream_left_open():
    src = io.BytesIO(b"1\t2\t3\n")
    parse_ratings(src, THREE)
    assert not src.closed


def test_format_spec_round_trip():
    fmt = RatingFormat.parse("sep=comma;fields=object,-,user,rating;header=2;scale=1:10")
    assert fmt.sep == "," and fmt.fields == ("object", "-", "user", "rating")
    assert fmt.header == 2 and fmt.scale == (1.0, 10.0)
    assert RatingFormat.parse(fmt.describe()) == fmt


@pytest.mark.parametrize("spec", ["sep=tab;fields=user,rating", "bogus", "colour=red"])
def test_bad_format_specs(spec):
    with pytest.raises(IngestError):
        RatingFormat.parse(spec)


def rec(rating, user="u", obj="o"):
    return RatingRecord(user, obj, rating)


def test_below_threshold_gives_empty_graph():
    g, summary, _ = threshold_links([rec(2)], 3)
    assert g.num_links == 0 and summary.links == 0


def test_at_threshold_is_a_link():
    g, _, _ = threshold_links([rec(3)], 3)
    assert g.num_links == 1


def test_any_record_rule():
    # enumerate both orders of the two-record case
    for pair in ([rec(2), rec(4)], [rec(4), rec(2)]):
        g, _, _ = threshold_links(pair, 3)
        assert g.num_links == 1


def test_dislike_only_entities_dropped_and_indices_by_first_appearance():
    records = [rec(1, "a", "x"), rec(5, "b", "y"), rec(4, "a", "y"), rec(2, "c", "z"), rec(3, "b", "x")]
    g, summary, ids = threshold_links(records, 3)
    assert ids.users == ("a", "b")
    assert ids.objects == ("x", "y")
    assert g.links == {(1, 1), (1, 0), (0, 1)}
    assert (summary.users, summary.objects, summary.links) == (2, 2, 3)
    assert summary.sparsity == 0.75


@given(st.lists(st.tuples(st.sampled_from("abcd"), st.sampled_from("wxyz"), st.integers(1, 5)), max_size=30),
       st.integers(1, 5), st.integers(1, 5))
def test_threshold_monotone(rows, t1, t2):
    lo, hi = sorted((t1, t2))
    records = [RatingRecord(u, o, float(r)) for u, o, r in rows]
    g_lo, _, ids_lo = threshold_links(records, lo)
    g_hi, _, ids_hi = threshold_links(records, hi)
    named = lambda g, ids: {(ids.objects[o], ids.users[u]) for o, u in g.links}
    assert named(g_hi, ids_hi) <= named(g_lo, ids_lo)


def test_canonical_file_round_trip(tmp_path):
    src = tmp_path / "r.tsv"
    src.write_text("10\t100\t5\n11\t100\t1\n11\t101\t3\n12\t102\t4\n")
    g, _, ids = load_like_graph(src, THREE, 3)
    path = tmp_path / "links.tsv"
    write_links(path, g, ids)
    assert path.read_text().splitlines()[0] == "0\t0"
    g2, ids2 = read_links(path)
    assert g2 == g and ids2 == ids


def test_threshold_outside_scale(tmp_path):
    src = tmp_path / "r.tsv"
    src.write_text("1\t1\t3\n")
    with pytest.raises(IngestError):
        load_like_graph(src, THREE, 7)
