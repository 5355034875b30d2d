import pytest
from hypothesis import given, strategies as st

from ein.lexicon import (EMOTION_LABELS, SCHEMA_DIMENSIONS, Lexicon, LexiconParseError,
                         LexiconValidationError, builtin_schemas, get_schema, lexicon_dimension,
                         load_lexicon, lookup)


def write(tmp_path, text, name="lex.tsv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_registry_is_closed_at_17():
    assert len(EMOTION_LABELS) == 17
    assert len(set(EMOTION_LABELS)) == 17


def test_five_schemas_in_fixed_order(schemas):
    assert [s.name for s in schemas] == ["EmoSenticNet", "EmoLex", "SentiSense", "LIWC", "Empath"]


def test_schema_dimensions(schemas):
    assert {s.name: s.dimension for s in schemas} == dict(SCHEMA_DIMENSIONS)
    assert get_schema("EmoLex").dimension == 8
    assert sum(s.dimension for s in schemas) == 38


def test_every_schema_emotion_is_registered(schemas):
    for s in schemas:
        assert set(s.emotions) <= set(EMOTION_LABELS)


def test_liwc_native_names_map_to_pos_neg():
    liwc = get_schema("LIWC")
    assert liwc.resolve("positive emotion") == "pos_emo"
    assert liwc.resolve("Negative Emotion") == "neg_emo"


def test_load_multi_label_word(tmp_path, emolex):
    p = write(tmp_path, "#schema: EmoLex\nhappy\tjoy\nhappy\ttrust\n")
    lex = load_lexicon(p, emolex)
    assert lookup(lex, "happy") == {"joy", "trust"}


def test_emotion_outside_schema_is_named(tmp_path):
    p = write(tmp_path, "#schema: LIWC\nhappy\tdespair\n")
    with pytest.raises(LexiconValidationError) as err:
        load_lexicon(p, get_schema("LIWC"))
    assert err.value.emotion == "despair"
    assert "despair" in str(err.value)


def test_empty_file_gives_empty_lexicon(tmp_path, emolex):
    lex = load_lexicon(write(tmp_path, ""), emolex)
    assert len(lex) == 0
    assert lexicon_dimension(lex) == 8


def test_malformed_line_reports_line_number(tmp_path, emolex):
    p = write(tmp_path, "#schema: EmoLex\n# note\nhappy joy\n")
    with pytest.raises(LexiconParseError) as err:
        load_lexicon(p, emolex)
    assert err.value.line_no == 3


def test_header_required_and_must_match(tmp_path, emolex):
    with pytest.raises(LexiconParseError):
        load_lexicon(write(tmp_path, "happy\tjoy\n"), emolex)
    with pytest.raises(LexiconParseError):
        load_lexicon(write(tmp_path, "#schema: LIWC\nhappy\tanger\n"), emolex)


def test_multi_word_entry_rejected(tmp_path, emolex):
    with pytest.raises(LexiconParseError, match="multi-word"):
        load_lexicon(write(tmp_path, "#schema: EmoLex\nfeel good\tjoy\n"), emolex)


def test_duplicate_lines_are_idempotent(tmp_path, emolex):
    once = load_lexicon(write(tmp_path, "#schema: EmoLex\nwin\tjoy\n", "a.tsv"), emolex)
    twice = load_lexicon(write(tmp_path, "#schema: EmoLex\nwin\tjoy\nwin\tjoy\n", "b.tsv"), emolex)
    assert once == twice


def test_lookup_case_folding_and_missing(tmp_path, emolex):
    lex = load_lexicon(write(tmp_path, "#schema: EmoLex\nwar\tfear\nwin\tjoy\nHappy\tjoy\n"), emolex)
    assert lookup(lex, "war") == {"fear"}
    assert lookup(lex, "Happy") == lookup(lex, "happy") == {"joy"}
    assert lookup(lex, "zzzunknown") == frozenset()


def test_dimension_ignores_entry_count():
    senti = get_schema("SentiSense")
    words = [f"w{i}" for i in range(10)]
    lex = Lexicon.from_pairs(senti, [(w, "hope") for w in words])
    assert len(lex) == 10
    assert lexicon_dimension(lex) == 14


def test_builtin_lexicons_sum_to_38(lexicons):
    assert sum(lexicon_dimension(l) for l in lexicons) == 38


def test_alternative_mapping_table(tmp_path):
    table = tmp_path / "schemas.json"
    table.write_text('{"order": ["LIWC"], "schemas": {"LIWC": {"sad": "sadness", "mad": "anger",'
                     ' "good": "pos_emo", "bad": "neg_emo"}}}', encoding="utf-8")
    (s,) = builtin_schemas(table)
    assert s.resolve("mad") == "anger"


def test_mapping_table_with_unknown_label_rejected(tmp_path):
    table = tmp_path / "schemas.json"
    table.write_text('{"order": ["X"], "schemas": {"X": {"a": "zest"}}}', encoding="utf-8")
    with pytest.raises(LexiconValidationError):
        builtin_schemas(table)


_word = st.text(alphabet="abcdefghij", min_size=1, max_size=6)


@given(st.sampled_from([s.name for s in builtin_schemas()]), st.data())
def test_schema_closure_and_idempotent_load(tmp_path_factory, name, data):
    schema = get_schema(name)
    pairs = data.draw(st.lists(st.tuples(_word, st.sampled_from(schema.emotions)), max_size=20))
    d = tmp_path_factory.mktemp("lex")
    body = f"#schema: {name}\n" + "".join(f"{w}\t{e}\n" for w, e in pairs)
    p = d / "l.tsv"
    p.write_text(body, encoding="utf-8")
    a, b = load_lexicon(p, schema), load_lexicon(p, schema)
    assert a == b
    for w, _ in pairs:
        assert lookup(a, w) <= set(schema.emotions)
    assert lexicon_dimension(a) == schema.dimension
