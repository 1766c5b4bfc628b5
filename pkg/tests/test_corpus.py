import datetime as dt
import json

from hypothesis import given, strategies as st

from prevcast.corpus import (
    Document,
    DocumentKind,
    RecordError,
    filter_kinds,
    parse_documents,
    preprocess_text,
)


class TestParseDocuments:
    def test_well_formed_line(self):
        line = '{"id":"1","timestamp":"2020-03-01T10:00:00Z","text":"hola","kind":"original"}'
        [doc] = list(parse_documents([line]))
        assert isinstance(doc, Document)
        assert doc.id == "1"
        assert doc.kind is DocumentKind.ORIGINAL
        assert doc.timestamp == dt.datetime(2020, 3, 1, 10, tzinfo=dt.timezone.utc)
        assert doc.date == dt.date(2020, 3, 1)

    def test_missing_timestamp_continues_stream(self):
        lines = [
            '{"id":"1","text":"hola"}',
            '{"id":"2","timestamp":"2020-03-01T10:00:00Z","text":"chau"}',
        ]
        out = list(parse_documents(lines))
        assert isinstance(out[0], RecordError)
        assert out[0].line == 1
        assert "timestamp" in out[0].reason
        assert isinstance(out[1], Document)

    def test_empty_stream(self):
        assert list(parse_documents([])) == []

    def test_kind_defaults_to_original(self):
        line = '{"id":"1","timestamp":"2020-03-01T10:00:00Z","text":"x"}'
        [doc] = list(parse_documents([line]))
        assert doc.kind is DocumentKind.ORIGINAL

    def test_invalid_json_and_bad_kind(self):
        lines = ['{oops', '{"id":"1","timestamp":"2020-03-01T00:00:00Z","text":"x","kind":"quote"}']
        errors = list(parse_documents(lines))
        assert [e.line for e in errors] == [1, 2]
        assert all(isinstance(e, RecordError) for e in errors)

    def test_bytes_input_and_blank_lines(self):
        lines = [b'{"id":"1","timestamp":"2020-03-01T00:00:00Z","text":"x"}', b"", b"   "]
        out = list(parse_documents(lines))
        assert len(out) == 1 and isinstance(out[0], Document)

    def test_offset_timestamp_normalized_to_utc(self):
        line = '{"id":"1","timestamp":"2020-03-01T03:00:00-03:00","text":"x"}'
        [doc] = list(parse_documents([line]))
        assert doc.timestamp.hour == 6
        assert doc.timestamp.tzinfo == dt.timezone.utc


class TestPreprocessText:
    def test_mixed_tweet(self):
        got = preprocess_text("Cuarentena total https://t.co/x @user #QuedateEnCasa!")
        assert got == ["cuarentena", "total", "quedate", "en", "casa"]

    def test_empty(self):
        assert preprocess_text("") == []

    def test_hashtag_digit_boundary(self):
        assert preprocess_text("#COVID19") == ["covid", "19"]

    def test_hashtag_underscore(self):
        assert preprocess_text("#quedate_en_casa") == ["quedate", "en", "casa"]

    def test_accents_preserved(self):
        assert preprocess_text("¡Cuánta información!") == ["cuánta", "información"]

    def test_urls_and_mentions_removed(self):
        assert preprocess_text("mira www.ejemplo.com y http://x.yz @Alguien123") == ["mira", "y"]

    def test_plain_alphanumeric_token_kept_whole(self):
        # Letter/digit splitting applies to hashtags only.
        assert preprocess_text("covid19 sigue") == ["covid19", "sigue"]


@given(st.text(max_size=80))
def test_preprocess_idempotent(text):
    tokens = preprocess_text(text)
    assert preprocess_text(" ".join(tokens)) == tokens


@given(st.text(max_size=80))
def test_preprocess_token_charset(text):
    for token in preprocess_text(text):
        assert token, "no empty tokens"
        assert not token.startswith(("@", "#"))
        assert "://" not in token
        assert all(c.isalnum() for c in token)
        assert token == token.lower()


class TestFilterKinds:
    def _doc(self, i, kind):
        return Document(
            id=str(i),
            timestamp=dt.datetime(2020, 3, 1, tzinfo=dt.timezone.utc),
            text="x",
            kind=kind,
        )

    def test_drops_retweets_preserves_order(self):
        docs = [
            self._doc(1, DocumentKind.ORIGINAL),
            self._doc(2, DocumentKind.RETWEET),
            self._doc(3, DocumentKind.REPLY),
        ]
        assert [d.id for d in filter_kinds(docs)] == ["1", "3"]

    def test_all_retweets(self):
        docs = [self._doc(i, DocumentKind.RETWEET) for i in range(3)]
        assert list(filter_kinds(docs)) == []

    def test_empty(self):
        assert list(filter_kinds([])) == []

    @given(st.lists(st.sampled_from(list(DocumentKind)), max_size=30))
    def test_surviving_ids_match(self, kinds):
        docs = [self._doc(i, k) for i, k in enumerate(kinds)]
        survivors = list(filter_kinds(docs))
        assert len(survivors) <= len(docs)
        expected = [d.id for d in docs if d.kind is not DocumentKind.RETWEET]
        assert [d.id for d in survivors] == expected
