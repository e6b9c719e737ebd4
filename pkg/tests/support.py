"""Deterministic random generators shared by the test modules.

Everything takes an explicit random.Random so tests stay reproducible;
the acceptance suite pins its own seeds.
"""

from __future__ import annotations

import random
import string

from annoflow.conllu import (
    CANONICAL_COLUMNS,
    ColumnSchema,
    Document,
    Sentence,
    Token,
)

CUSTOM_COLUMN_POOL = (
    "RELATE:NE", "RELATE:GEONAMES", "RELATE:CHUNK", "RELATE:PHON",
    "RELATE:BIONER", "X:A", "X:B", "X:LONGNAME",
)

# No "=", TAB or newline: generated values must not collide with the
# MISC offset items the codec owns.
VALUE_ALPHABET = string.ascii_letters + string.digits + "ăâîșț.,;:-"


def rand_value(rng: random.Random, max_len: int = 8) -> str:
    n = rng.randint(1, max_len)
    return "".join(rng.choice(VALUE_ALPHABET) for _ in range(n))


def rand_schema(rng: random.Random, min_cols: int = 2, max_cols: int = 15) -> ColumnSchema:
    n_cols = rng.randint(min_cols, max_cols)
    pool = list(CANONICAL_COLUMNS[2:]) + list(CUSTOM_COLUMN_POOL)
    rng.shuffle(pool)
    return ColumnSchema(("ID", "FORM", *pool[:n_cols - 2]))


def rand_document(
    rng: random.Random,
    min_cols: int = 2,
    max_cols: int = 15,
    max_sentences: int = 50,
    max_tokens: int = 8,
    with_extras: bool = True,
) -> Document:
    """Random valid Document: random schema, comments, offsets, MWT rows."""
    schema = rand_schema(rng, min_cols, max_cols)
    has_misc = "MISC" in schema
    doc = Document(schema=schema)
    if rng.random() < 0.5:
        doc.doc_id = "doc-" + rand_value(rng, 6)
    for _ in range(rng.randint(0, 3)):
        doc.metadata[rand_value(rng, 5)] = rand_value(rng, 10)
    cursor = 0
    for _ in range(rng.randint(0, max_sentences)):
        sentence = Sentence()
        for _ in range(rng.randint(0, 2)):
            sentence.comments.append("# note " + rand_value(rng, 10))
        n_tokens = rng.randint(0 if sentence.comments else 1, max_tokens)
        use_offsets = has_misc and rng.random() < 0.5
        for i in range(1, n_tokens + 1):
            if with_extras and rng.random() < 0.05:
                span = f"{i}-{i + rng.randint(0, 2)}"
                sentence.tokens.append(
                    Token([span, rand_value(rng)] + ["_"] * (len(schema) - 2)))
            values = [str(i)] + [
                rand_value(rng) if rng.random() < 0.6 else "_"
                for _ in range(len(schema) - 1)
            ]
            token = Token(values)
            if use_offsets:
                token.char_start = cursor
                token.char_end = cursor + len(values[1])
                cursor = token.char_end + 1
            sentence.tokens.append(token)
            if with_extras and rng.random() < 0.04:
                sentence.tokens.append(
                    Token([f"{i}.1", rand_value(rng)] + ["_"] * (len(schema) - 2)))
        if sentence.tokens or sentence.comments:
            doc.sentences.append(sentence)
    return doc


def rand_tokenized_doc(rng: random.Random, max_sentences: int = 3,
                       max_tokens: int = 10) -> Document:
    """Document with ID FORM MISC schema, offsets, and matching raw text."""
    schema = ColumnSchema(("ID", "FORM", "MISC"))
    chunks: list[str] = []
    cursor = 0
    sentences = []
    for _ in range(rng.randint(1, max_sentences)):
        sentence = Sentence()
        for i in range(1, rng.randint(1, max_tokens) + 1):
            form = "".join(rng.choice("abcdefgino") for _ in range(rng.randint(1, 6)))
            gap = rng.randint(0, 2)
            chunks.append(" " * gap + form)
            start = cursor + gap
            cursor = start + len(form)
            sentence.tokens.append(Token([str(i), form, "_"], start, cursor))
        sentences.append(sentence)
    return Document(raw_text="".join(chunks), schema=schema, sentences=sentences)


def rand_spans(rng: random.Random, text_len: int, n_spans: int,
               labels: tuple[str, ...] = ("PER", "LOC", "ORG")):
    from annoflow.spans import StandoffSpan

    spans = []
    for _ in range(n_spans):
        if text_len < 1:
            break
        start = rng.randint(0, text_len - 1)
        end = rng.randint(start + 1, min(text_len, start + 12))
        spans.append(StandoffSpan(start, end, rng.choice(labels)))
    return spans


def rand_disjoint_spans(rng: random.Random, doc: Document, max_spans: int,
                        labels: tuple[str, ...] = ("PER", "LOC")):
    """Token-aligned single-sentence spans with at least one token between them."""
    from annoflow.spans import StandoffSpan

    spans = []
    budget = max_spans
    for sentence in doc.sentences:
        tokens = sentence.tokens
        i = 0
        while budget > 0 and i < len(tokens):
            i = rng.randint(i, len(tokens) - 1)
            j = min(len(tokens) - 1, i + rng.randint(0, 2))
            spans.append(StandoffSpan(tokens[i].char_start, tokens[j].char_end,
                                      rng.choice(labels)))
            budget -= 1
            i = j + 2
    return spans


def rand_iob_sequence(rng: random.Random, labels: tuple[str, ...],
                      length: int) -> list[str]:
    """Random well-formed IOB tag sequence."""
    tags: list[str] = []
    while len(tags) < length:
        if rng.random() < 0.55:
            tags.append("O")
        else:
            label = rng.choice(labels)
            run = min(rng.randint(1, 3), length - len(tags))
            tags.append(f"B-{label}")
            tags.extend(f"I-{label}" for _ in range(run - 1))
    return tags


def rand_io_sequence(rng: random.Random, labels: tuple[str, ...],
                     length: int) -> list[str]:
    """Random IO tag sequence: "O" or bare labels."""
    return [rng.choice(("O",) + labels) for _ in range(length)]
