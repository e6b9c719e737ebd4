"""Standoff spans and the gold-corpus toolchain.

Covers projecting character spans onto tokens as IOB tags, IO to IOB
conversion, gazetteer extraction from tagged corpora, and entity
anonymization. All functions are pure; input documents are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conllu import EMPTY, Document, Sentence, Token, ensure_column
from .errors import InvalidInputError, ParseError

NE_COLUMN = "RELATE:NE"


@dataclass(frozen=True)
class StandoffSpan:
    """Character span over a document's raw text; end is exclusive."""

    start: int
    end: int
    label: str

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise InvalidInputError(f"bad span offsets ({self.start}, {self.end})")
        if not self.label or any(c.isspace() for c in self.label):
            raise InvalidInputError(f"bad span label {self.label!r}")


def parse_ann(data: bytes | str) -> list[StandoffSpan]:
    """Parse a ".ann" standoff file: one "start<TAB>end<TAB>label" per line."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    spans = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError("expected start<TAB>end<TAB>label", lineno)
        try:
            spans.append(StandoffSpan(int(parts[0]), int(parts[1]), parts[2]))
        except (ValueError, InvalidInputError) as exc:
            raise ParseError(str(exc), lineno) from exc
    return spans


def format_ann(spans: list[StandoffSpan]) -> bytes:
    return "".join(f"{s.start}\t{s.end}\t{s.label}\n" for s in spans).encode("utf-8")


def spans_to_iob(doc: Document, spans: list[StandoffSpan],
                 column: str = NE_COLUMN) -> Document:
    """Project standoff spans onto tokens as IOB tags in the named column.

    A token belongs to a span when their character ranges intersect.
    Overlap between spans is resolved longest-first (ties by earliest
    start); a span that would claim an already-claimed token is dropped
    whole. Unclaimed word tokens get "O"; multiword ranges and empty
    nodes keep "_".
    """
    words: list[Token] = []
    for sentence in doc.sentences:
        words.extend(sentence.words())
    for token in words:
        if token.char_start is None:
            raise InvalidInputError(
                f"token {token.id!r} ({token.form!r}) has no character offsets")
    text_len = len(doc.raw_text)
    for span in spans:
        if span.end > text_len:
            raise InvalidInputError(
                f"span ({span.start}, {span.end}) exceeds text length {text_len}")

    tags = ["O"] * len(words)
    claimed: set[int] = set()
    order = sorted(spans, key=lambda s: (-(s.end - s.start), s.start))
    for span in order:
        members = [i for i, tok in enumerate(words)
                   if tok.char_start < span.end and span.start < tok.char_end]
        if not members or any(i in claimed for i in members):
            continue
        claimed.update(members)
        tags[members[0]] = f"B-{span.label}"
        for i in members[1:]:
            tags[i] = f"I-{span.label}"

    out = ensure_column(doc, column, EMPTY)
    if out is doc:
        out = doc.clone()
    col = out.schema.index(column)
    it = iter(tags)
    for sentence in out.sentences:
        for token in sentence.tokens:
            if token.is_word:
                token.values[col] = next(it)
    return out


def io_to_iob(tags: list[str]) -> list[str]:
    """Convert IO tags ("O" or bare labels) to IOB; length is preserved."""
    out = []
    prev = "O"
    for tag in tags:
        if tag == "O":
            out.append("O")
        elif tag == prev:
            out.append(f"I-{tag}")
        else:
            out.append(f"B-{tag}")
        prev = tag
    return out


def _tag_runs(tags: list[str]) -> tuple[list[tuple[str, int, int]], int]:
    """Maximal B-/I- runs as (label, start, end); malformed I- repaired as B-.

    Returns the runs and the number of repairs. Anything that is not a
    B-/I- tag (including "O" and "_") closes the current run.
    """
    runs: list[tuple[str, int, int]] = []
    repaired = 0
    label: str | None = None
    start = 0
    for i, tag in enumerate(tags):
        if tag.startswith("B-"):
            if label is not None:
                runs.append((label, start, i))
            label, start = tag[2:], i
        elif tag.startswith("I-"):
            if label != tag[2:]:
                if label is not None:
                    runs.append((label, start, i))
                label, start = tag[2:], i
                repaired += 1
        else:
            if label is not None:
                runs.append((label, start, i))
            label = None
    if label is not None:
        runs.append((label, start, len(tags)))
    return runs, repaired


@dataclass
class Gazetteer:
    """Sorted, deduplicated (label, surface) entries plus a repair count."""

    entries: list[tuple[str, str]]
    repaired: int = 0

    def to_bytes(self) -> bytes:
        return "".join(f"{label}\t{surface}\n"
                       for label, surface in self.entries).encode("utf-8")


def extract_gazetteer(documents: list[Document], column: str = NE_COLUMN) -> Gazetteer:
    """Collect entity surfaces from an IOB column across documents."""
    seen: set[tuple[str, str]] = set()
    repaired = 0
    for doc in documents:
        col = doc.schema.index(column)
        for sentence in doc.sentences:
            words = list(sentence.words())
            runs, fixes = _tag_runs([t.values[col] for t in words])
            repaired += fixes
            for label, start, end in runs:
                surface = " ".join(t.form for t in words[start:end])
                seen.add((label, surface))
    return Gazetteer(sorted(seen), repaired)


def anonymize_document(doc: Document, column: str = NE_COLUMN,
                       labels: set[str] | frozenset[str] = frozenset()
                       ) -> tuple[Document, dict[str, str]]:
    """Replace entity surface forms with numbered placeholders.

    Every run in the tag column whose label is selected has all its token
    FORMs replaced by "[<LABEL>-<n>]", where n numbers distinct surfaces
    per document and label (the same surface always maps to the same
    placeholder). Columns other than ID, FORM and the tag column are reset
    to "_" on replaced tokens, offsets dropped; a multiword range row
    covering a replaced token is rewritten too, so no original surface
    survives anywhere in FORM. Returns the new document and the
    placeholder -> original surface mapping.
    """
    out = doc.clone()
    if not labels:
        return out, {}
    col = out.schema.index(column)
    keep = {0, 1, col}
    counters: dict[str, int] = {}
    numbering: dict[tuple[str, str], str] = {}
    mapping: dict[str, str] = {}

    def wipe(token: Token, placeholder: str) -> None:
        for i in range(len(token.values)):
            if i not in keep:
                token.values[i] = EMPTY
        token.values[1] = placeholder
        token.char_start = token.char_end = None

    for sentence in out.sentences:
        words = list(sentence.words())
        runs, _ = _tag_runs([t.values[col] for t in words])
        replaced_ids: dict[int, str] = {}
        for label, start, end in runs:
            if label not in labels:
                continue
            surface = " ".join(t.form for t in words[start:end])
            placeholder = numbering.get((label, surface))
            if placeholder is None:
                counters[label] = counters.get(label, 0) + 1
                placeholder = f"[{label}-{counters[label]}]"
                numbering[(label, surface)] = placeholder
                mapping[placeholder] = surface
            for token in words[start:end]:
                replaced_ids[int(token.id)] = placeholder
                wipe(token, placeholder)
        if replaced_ids:
            _rewrite_covering_ranges(sentence, replaced_ids, keep)
    return out, mapping


def _rewrite_covering_ranges(sentence: Sentence, replaced_ids: dict[int, str],
                             keep: set[int]) -> None:
    """Scrub multiword range rows whose span touches a replaced token."""
    for token in sentence.tokens:
        if not token.is_multiword:
            continue
        first, _, last = token.id.partition("-")
        try:
            covered = range(int(first), int(last) + 1)
        except ValueError:
            continue
        hits = [replaced_ids[i] for i in covered if i in replaced_ids]
        if hits:
            for i in range(len(token.values)):
                if i not in keep:
                    token.values[i] = EMPTY
            token.values[1] = hits[0]
