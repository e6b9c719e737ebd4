"""Data model and codecs for CoNLL-U / CoNLL-U Plus annotated documents.

A Document is a column schema plus sentences of tokens; every token holds
one text value per column, with "_" as the unique empty marker. Files with
a leading "# global.columns = ..." line declare their own column set
(CoNLL-U Plus); plain files use the canonical 10-column layout.

Conventions baked into the codec:
  - document identity is carried as a "# newdoc id = ..." comment;
  - document metadata is carried as "# meta::<key> = <value>" comments;
  - token character offsets are carried inside the MISC column as
    "start_char=<n>|end_char=<m>" items (files stay plain CoNLL-U);
  - output uses LF line endings; CRLF is accepted on input.

All operations are pure: they never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

from .errors import InvalidInputError, ParseError

CANONICAL_COLUMNS = ("ID", "FORM", "LEMMA", "UPOS", "XPOS", "FEATS",
                     "HEAD", "DEPREL", "DEPS", "MISC")

EMPTY = "_"

GLOBAL_COLUMNS_PREFIX = "# global.columns ="
NEWDOC_PREFIX = "# newdoc id ="
META_PREFIX = "# meta::"

# Wire-protocol token keys and the columns they populate. Keys absent from
# a payload map to "_"; extra columns travel under their own column name.
WIRE_KEY_TO_COLUMN = {
    "form": "FORM",
    "lemma": "LEMMA",
    "upos": "UPOS",
    "xpos": "XPOS",
    "feats": "FEATS",
    "head": "HEAD",
    "deprel": "DEPREL",
    "deps": "DEPS",
    "misc": "MISC",
    "ner": "RELATE:NE",
}
COLUMN_TO_WIRE_KEY = {col: key for key, col in WIRE_KEY_TO_COLUMN.items()}


@dataclass(frozen=True)
class ColumnSchema:
    """Ordered, validated column set of a document."""

    columns: tuple[str, ...]

    def __post_init__(self):
        cols = tuple(self.columns)
        object.__setattr__(self, "columns", cols)
        if len(cols) < 2 or cols[0] != "ID" or cols[1] != "FORM":
            raise InvalidInputError(
                f"schema must start with ID and FORM, got {list(cols)!r}")
        if len(set(cols)) != len(cols):
            raise InvalidInputError(f"duplicate column names in {list(cols)!r}")
        for name in cols:
            if name not in CANONICAL_COLUMNS and ":" not in name:
                raise InvalidInputError(
                    f"custom column {name!r} needs a namespace prefix like 'RELATE:'")

    def __len__(self) -> int:
        return len(self.columns)

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    def index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise InvalidInputError(f"column {name!r} not in schema {list(self.columns)!r}") from None


DEFAULT_SCHEMA = ColumnSchema(CANONICAL_COLUMNS)


@dataclass
class Token:
    """One row of the annotation table; values align with the schema."""

    values: list[str]
    char_start: int | None = None
    char_end: int | None = None

    @property
    def id(self) -> str:
        return self.values[0]

    @property
    def form(self) -> str:
        return self.values[1]

    @property
    def is_multiword(self) -> bool:
        """Range row like "3-4"; preserved verbatim, skipped by token-level ops."""
        tid = self.values[0]
        return "-" in tid and not tid.startswith("-")

    @property
    def is_empty_node(self) -> bool:
        """Empty-node row like "5.1"; preserved verbatim, never interpreted."""
        return "." in self.values[0]

    @property
    def is_word(self) -> bool:
        return not self.is_multiword and not self.is_empty_node

    def clone(self) -> Token:
        return Token(list(self.values), self.char_start, self.char_end)


@dataclass
class Sentence:
    """Ordered tokens plus verbatim comment lines (including the '#')."""

    tokens: list[Token] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    def words(self) -> Iterator[Token]:
        """Word tokens only: no multiword ranges, no empty nodes."""
        return (t for t in self.tokens if t.is_word)

    def clone(self) -> Sentence:
        return Sentence([t.clone() for t in self.tokens], list(self.comments))


@dataclass
class Document:
    doc_id: str = ""
    raw_text: str = ""
    metadata: dict[str, str] = field(default_factory=dict)
    schema: ColumnSchema = DEFAULT_SCHEMA
    sentences: list[Sentence] = field(default_factory=list)

    def tokens(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence.tokens

    def words(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence.words()

    def clone(self) -> Document:
        return Document(self.doc_id, self.raw_text, dict(self.metadata),
                        self.schema, [s.clone() for s in self.sentences])

    def validate(self) -> None:
        """Check structural invariants; raises InvalidInputError on violation."""
        width = len(self.schema)
        for sentence in self.sentences:
            if not sentence.tokens and not sentence.comments:
                raise InvalidInputError("sentence with neither tokens nor comments")
            word_no = 0
            for token in sentence.tokens:
                if len(token.values) != width:
                    raise InvalidInputError(
                        f"token {token.values!r} has {len(token.values)} values, "
                        f"schema has {width}")
                if any(v == "" for v in token.values):
                    raise InvalidInputError(
                        f"empty value in token {token.values!r}; use {EMPTY!r}")
                if (token.char_start is None) != (token.char_end is None):
                    raise InvalidInputError(
                        f"token {token.id!r} has only one character offset")
                if token.char_start is not None and not (
                        0 <= token.char_start < token.char_end):
                    raise InvalidInputError(
                        f"token {token.id!r} offsets out of order")
                if token.is_word:
                    word_no += 1
                    if token.id != str(word_no):
                        raise InvalidInputError(
                            f"expected token id {word_no}, got {token.id!r}")


def _strip_misc_offsets(misc: str) -> tuple[str, int | None, int | None]:
    """Pull start_char/end_char items out of a MISC value."""
    if misc == EMPTY:
        return misc, None, None
    start = end = None
    kept = []
    for item in misc.split("|"):
        if item.startswith("start_char="):
            try:
                start = int(item[11:])
                continue
            except ValueError:
                pass
        elif item.startswith("end_char="):
            try:
                end = int(item[9:])
                continue
            except ValueError:
                pass
        kept.append(item)
    if start is None or end is None:
        # Only honour complete pairs; a lone item stays in MISC verbatim.
        return misc, None, None
    return ("|".join(kept) if kept else EMPTY), start, end


def _merge_misc_offsets(misc: str, start: int, end: int) -> str:
    items = [] if misc == EMPTY else misc.split("|")
    items += [f"start_char={start}", f"end_char={end}"]
    return "|".join(items)


def _parse_global_columns(line: str) -> ColumnSchema:
    names = line[len(GLOBAL_COLUMNS_PREFIX):].split()
    if not names:
        raise ParseError("empty global.columns header", line=1)
    try:
        return ColumnSchema(tuple(names))
    except InvalidInputError as exc:
        raise ParseError(f"bad global.columns header: {exc}", line=1) from exc


def parse_document(data: bytes | str,
                   default_schema: ColumnSchema = DEFAULT_SCHEMA) -> Document:
    """Parse CoNLL-U / CoNLL-U Plus bytes into a Document.

    A "# global.columns = ..." first line selects the declared schema,
    otherwise ``default_schema`` applies. Raises ParseError with the
    offending line number on malformed input.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    else:
        text = data
    if text.startswith("﻿"):
        text = text[1:]

    doc = Document(schema=default_schema)
    misc_index: int | None = None
    sentences: list[Sentence] = []
    pending_comments: list[str] = []
    pending_tokens: list[Token] = []

    def flush():
        if pending_tokens or pending_comments:
            sentences.append(Sentence(list(pending_tokens), list(pending_comments)))
            pending_tokens.clear()
            pending_comments.clear()

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if lineno == 1 and line.startswith(GLOBAL_COLUMNS_PREFIX):
            doc.schema = _parse_global_columns(line)
            continue
        if line == "":
            flush()
            continue
        if line.startswith("#"):
            if line.startswith(NEWDOC_PREFIX):
                doc.doc_id = line[len(NEWDOC_PREFIX):].strip()
            elif line.startswith(META_PREFIX):
                body = line[len(META_PREFIX):]
                key, sep, value = body.partition(" = ")
                if not sep:
                    raise ParseError(f"malformed metadata comment {line!r}", lineno)
                doc.metadata[key] = value
            else:
                pending_comments.append(line)
            continue
        fields = line.split("\t")
        if len(fields) != len(doc.schema):
            raise ParseError(
                f"expected {len(doc.schema)} TAB-separated fields, got {len(fields)}",
                lineno)
        values = [v if v != "" else EMPTY for v in fields]
        if misc_index is None:
            misc_index = doc.schema.columns.index("MISC") if "MISC" in doc.schema else -1
        start = end = None
        if misc_index >= 0:
            values[misc_index], start, end = _strip_misc_offsets(values[misc_index])
        pending_tokens.append(Token(values, start, end))
    flush()
    doc.sentences = sentences
    return doc


def serialize_document(doc: Document, with_header: bool | None = None) -> bytes:
    """Serialize to canonical bytes: LF endings, one blank line per sentence.

    ``with_header`` forces or suppresses the global.columns header; the
    default emits it exactly when the schema is not the canonical one.
    parse_document(serialize_document(d)) reconstructs d (raw_text is
    carried outside the codec and stays empty).
    """
    if with_header is None:
        with_header = doc.schema != DEFAULT_SCHEMA
    out: list[str] = []
    if with_header:
        out.append(f"{GLOBAL_COLUMNS_PREFIX} " + " ".join(doc.schema.columns))
    if doc.doc_id:
        out.append(f"{NEWDOC_PREFIX} {doc.doc_id}")
    for key in sorted(doc.metadata):
        out.append(f"{META_PREFIX}{key} = {doc.metadata[key]}")
    misc_index = doc.schema.columns.index("MISC") if "MISC" in doc.schema else -1
    for sentence in doc.sentences:
        out.extend(sentence.comments)
        for token in sentence.tokens:
            values = token.values
            if misc_index >= 0 and token.char_start is not None:
                values = list(values)
                values[misc_index] = _merge_misc_offsets(
                    values[misc_index], token.char_start, token.char_end)
            out.append("\t".join(values))
        out.append("")
    return ("\n".join(out) + "\n").encode("utf-8") if out else b""


def ensure_column(doc: Document, name: str, default: str = EMPTY) -> Document:
    """Return a document that has the named column, appended last if absent.

    Idempotent; existing columns and their order are untouched. Canonical
    CoNLL-U columns cannot be appended out of position.
    """
    if name in doc.schema:
        return doc
    if name in CANONICAL_COLUMNS:
        raise InvalidInputError(
            f"cannot append canonical column {name!r} after custom columns")
    if ":" not in name:
        raise InvalidInputError(
            f"custom column {name!r} needs a namespace prefix like 'RELATE:'")
    schema = ColumnSchema(doc.schema.columns + (name,))
    new_doc = doc.clone()
    new_doc.schema = schema
    for token in new_doc.tokens():
        token.values.append(default)
    return new_doc


def set_column_value(token: Token, schema: ColumnSchema, name: str, value: str) -> None:
    token.values[schema.index(name)] = value


def column_value(token: Token, schema: ColumnSchema, name: str) -> str:
    return token.values[schema.index(name)]


def _sentence_groups(tokens: list[dict[str, Any]]) -> Iterator[list[dict[str, Any]]]:
    """Split a flat wire token array on id==1 sentence starts."""
    group: list[dict[str, Any]] = []
    for tok in tokens:
        if tok.get("id") == 1 and group:
            yield group
            group = []
        group.append(tok)
    if group:
        yield group


def from_worker_payload(payload: dict[str, Any], schema: ColumnSchema) -> Document:
    """Build a Document from a worker wire payload.

    Accepts the response shape {"sentences": [{"tokens": [...]}]} or the
    request shape with a flat "tokens" array (sentence boundaries at
    id == 1). Missing annotation keys map to "_". A payload key whose
    target column is not in the schema raises InvalidInputError naming
    the column.
    """
    if "sentences" in payload:
        groups = [s.get("tokens", []) for s in payload["sentences"]]
    elif "tokens" in payload:
        groups = list(_sentence_groups(payload["tokens"]))
    else:
        raise InvalidInputError("payload has neither 'sentences' nor 'tokens'")

    doc = Document(schema=schema)
    width = len(schema)
    for group in groups:
        sentence = Sentence()
        for i, wire_tok in enumerate(group, start=1):
            values = [EMPTY] * width
            values[0] = str(wire_tok.get("id", i))
            start = end = None
            for key, raw in wire_tok.items():
                if key == "id":
                    continue
                if key == "start_char":
                    start = int(raw)
                    continue
                if key == "end_char":
                    end = int(raw)
                    continue
                column = WIRE_KEY_TO_COLUMN.get(key, key)
                if column not in schema:
                    raise InvalidInputError(
                        f"payload field {column!r} is not in the schema")
                value = str(raw)
                values[schema.index(column)] = value if value != "" else EMPTY
            if (start is None) != (end is None):
                raise InvalidInputError(
                    f"token {values[0]} carries only one character offset")
            sentence.tokens.append(Token(values, start, end))
        doc.sentences.append(sentence)
    return doc


def to_worker_payload(doc: Document, operations: list[str] | None = None) -> dict[str, Any]:
    """Build a worker request payload from a Document.

    Emits word tokens only (multiword ranges and empty nodes are token-level
    no-ops on the wire); every non-"_" column travels under its wire key, or
    under the column name itself for custom columns.
    """
    tokens: list[dict[str, Any]] = []
    for sentence in doc.sentences:
        for i, token in enumerate(sentence.words(), start=1):
            wire_tok: dict[str, Any] = {"id": i}
            for column, value in zip(doc.schema.columns, token.values):
                if column == "ID" or value == EMPTY:
                    continue
                if column == "FORM":
                    wire_tok["form"] = value
                else:
                    wire_tok[COLUMN_TO_WIRE_KEY.get(column, column)] = value
            if token.char_start is not None:
                wire_tok["start_char"] = token.char_start
                wire_tok["end_char"] = token.char_end
            tokens.append(wire_tok)
    return {
        "text": doc.raw_text,
        "operations": list(operations or []),
        "tokens": tokens,
    }
