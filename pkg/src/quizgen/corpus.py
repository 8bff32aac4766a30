"""Data model and ingestion for annotated articles and the graded lexicon.

Articles arrive fully annotated (tokens, constituency parses, coreference
chains); nothing here runs a parser or resolver.  All values are immutable
after load and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

POS_CLASSES = ("noun", "verb", "adjective", "adverb", "other")


class CorpusError(Exception):
    """Base class for ingestion failures."""


class UnbalancedParens(CorpusError):
    def __init__(self, position: int):
        super().__init__(f"unbalanced parenthesis at offset {position}")
        self.position = position


class EmptyNode(CorpusError):
    def __init__(self, position: int):
        super().__init__(f"empty node at offset {position}")
        self.position = position


class TrailingInput(CorpusError):
    def __init__(self, position: int):
        super().__init__(f"trailing input after tree at offset {position}")
        self.position = position


class SchemaError(CorpusError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class AlignmentError(CorpusError):
    """Parse leaves do not line up 1:1 with the sentence tokens."""


class DanglingMention(CorpusError):
    """A mention points outside the article's sentences or tokens."""


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    lemma: str
    pos: str


@dataclass(frozen=True)
class ParseNode:
    label: str
    children: tuple["ParseNode", ...]
    token_span: tuple[int, int]  # inclusive

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def preorder(self) -> Iterable["ParseNode"]:
        yield self
        for child in self.children:
            yield from child.preorder()

    def serialize(self) -> str:
        if self.is_leaf:
            return self.label
        inner = " ".join(c.serialize() for c in self.children)
        return f"({self.label} {inner})"


@dataclass(frozen=True)
class Mention:
    sentence_index: int
    token_span: tuple[int, int]  # inclusive
    head_index: int
    kind: str  # pronoun | common | proper
    number: str  # singular | plural | unknown
    gender: str  # male | female | neutral | unknown


@dataclass(frozen=True)
class CorefChain:
    id: str
    mentions: tuple[Mention, ...]


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[Token, ...]
    parse: ParseNode
    # character offset of each token within text, resolved at load time
    token_offsets: tuple[int, ...]

    def surface(self, span: tuple[int, int]) -> str:
        """Original text covered by an inclusive token span."""
        start = self.token_offsets[span[0]]
        end = self.token_offsets[span[1]] + len(self.tokens[span[1]].text)
        return self.text[start:end]


@dataclass(frozen=True)
class AnnotatedArticle:
    id: str
    title: str
    grade: Optional[int]
    sentences: tuple[Sentence, ...]
    chains: tuple[CorefChain, ...]


@dataclass(frozen=True)
class GradedLexicon:
    entries: dict[tuple[str, str], int] = field(default_factory=dict)

    def level(self, word: str, pos_class: str) -> Optional[int]:
        return self.entries.get((word.lower(), pos_class))

    def by_level_and_class(self, level: int, pos_class: str) -> list[str]:
        return sorted(
            w for (w, p), lvl in self.entries.items()
            if lvl == level and p == pos_class
        )


def pos_class_of(tag: str) -> str:
    """Collapse a Penn tag onto the lexicon's coarse POS classes."""
    if tag.startswith("NN"):
        return "noun"
    if tag.startswith("VB"):
        return "verb"
    if tag.startswith("JJ"):
        return "adjective"
    if tag.startswith("RB"):
        return "adverb"
    return "other"


# ---------------------------------------------------------------------------
# Bracketed tree parsing


def parse_bracketed(source: str) -> ParseNode:
    """Parse a single Penn-style bracketing into a ParseNode tree.

    Leaves are assigned token spans left to right starting at 0.
    """
    pos = 0
    n = len(source)
    next_token = 0

    def skip_ws():
        nonlocal pos
        while pos < n and source[pos].isspace():
            pos += 1

    def read_atom() -> str:
        nonlocal pos
        start = pos
        while pos < n and not source[pos].isspace() and source[pos] not in "()":
            pos += 1
        return source[start:pos]

    def read_node() -> ParseNode:
        nonlocal pos, next_token
        skip_ws()
        if pos >= n or source[pos] != "(":
            raise UnbalancedParens(pos)
        open_at = pos
        pos += 1
        skip_ws()
        label = read_atom()
        if not label:
            raise EmptyNode(pos)
        children: list[ParseNode] = []
        while True:
            skip_ws()
            if pos >= n:
                raise UnbalancedParens(open_at)
            if source[pos] == ")":
                pos += 1
                break
            if source[pos] == "(":
                children.append(read_node())
            else:
                word = read_atom()
                children.append(
                    ParseNode(word, (), (next_token, next_token))
                )
                next_token += 1
        if not children:
            raise EmptyNode(open_at)
        span = (children[0].token_span[0], children[-1].token_span[1])
        return ParseNode(label, tuple(children), span)

    root = read_node()
    skip_ws()
    if pos != n:
        raise TrailingInput(pos)
    return root


# ---------------------------------------------------------------------------
# Article bundles


def _require(obj, key, path, typ=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{path}.{key}", "missing field")
    value = obj[key]
    if typ is not None and not isinstance(value, typ):
        raise SchemaError(f"{path}.{key}", f"expected {typ.__name__}")
    return value


def _align_tokens(text: str, tokens: tuple[Token, ...], path: str) -> tuple[int, ...]:
    offsets = []
    cursor = 0
    for tok in tokens:
        at = text.find(tok.text, cursor)
        if at < 0:
            raise AlignmentError(f"{path}: token {tok.index} ({tok.text!r}) not found in sentence text")
        offsets.append(at)
        cursor = at + len(tok.text)
    return tuple(offsets)


def load_article(document: dict | str) -> AnnotatedArticle:
    """Validate and load one article bundle (parsed JSON or a JSON string)."""
    if isinstance(document, str):
        document = json.loads(document)
    art_id = _require(document, "id", "$", str)
    title = _require(document, "title", "$", str)
    grade = document.get("grade")
    if grade is not None and (not isinstance(grade, int) or not 1 <= grade <= 6):
        raise SchemaError("$.grade", "must be an integer in 1..6")

    sentences: list[Sentence] = []
    for si, sent in enumerate(_require(document, "sentences", "$", list)):
        spath = f"$.sentences[{si}]"
        text = _require(sent, "text", spath, str)
        tokens = []
        for ti, tok in enumerate(_require(sent, "tokens", spath, list)):
            tpath = f"{spath}.tokens[{ti}]"
            word = _require(tok, "text", tpath, str)
            if not word:
                raise SchemaError(tpath + ".text", "token text empty")
            tokens.append(Token(
                index=ti,
                text=word,
                lemma=_require(tok, "lemma", tpath, str),
                pos=_require(tok, "pos", tpath, str),
            ))
        parse = parse_bracketed(_require(sent, "parse", spath, str))
        leaves = [nd for nd in parse.preorder() if nd.is_leaf]
        if len(leaves) != len(tokens):
            raise AlignmentError(
                f"{spath}: parse has {len(leaves)} leaves over {len(tokens)} tokens"
            )
        for leaf, tok in zip(leaves, tokens):
            if leaf.label != tok.text:
                raise AlignmentError(
                    f"{spath}: leaf {leaf.label!r} does not match token {tok.index} ({tok.text!r})"
                )
        tokens = tuple(tokens)
        sentences.append(Sentence(
            text=text,
            tokens=tokens,
            parse=parse,
            token_offsets=_align_tokens(text, tokens, spath),
        ))

    chains: list[CorefChain] = []
    for ci, chain in enumerate(document.get("chains", [])):
        cpath = f"$.chains[{ci}]"
        chain_id = _require(chain, "id", cpath, str)
        mentions = []
        for mi, m in enumerate(_require(chain, "mentions", cpath, list)):
            mpath = f"{cpath}.mentions[{mi}]"
            si = _require(m, "sentence", mpath, int)
            if not 0 <= si < len(sentences):
                raise DanglingMention(f"{mpath}: sentence {si} out of range")
            start = _require(m, "start", mpath, int)
            end = _require(m, "end", mpath, int)
            head = _require(m, "head", mpath, int)
            ntok = len(sentences[si].tokens)
            if not (0 <= start <= end < ntok):
                raise DanglingMention(f"{mpath}: span {start}..{end} out of range")
            if not start <= head <= end:
                raise SchemaError(mpath + ".head", "head outside mention span")
            kind = _require(m, "kind", mpath, str)
            if kind not in ("pronoun", "common", "proper"):
                raise SchemaError(mpath + ".kind", f"unknown kind {kind!r}")
            number = m.get("number", "unknown")
            gender = m.get("gender", "unknown")
            if number not in ("singular", "plural", "unknown"):
                raise SchemaError(mpath + ".number", f"unknown number {number!r}")
            if gender not in ("male", "female", "neutral", "unknown"):
                raise SchemaError(mpath + ".gender", f"unknown gender {gender!r}")
            mentions.append(Mention(si, (start, end), head, kind, number, gender))
        if not mentions:
            raise SchemaError(cpath + ".mentions", "chain has no mentions")
        ordered = sorted(mentions, key=lambda m: (m.sentence_index, m.token_span[0]))
        if ordered != mentions:
            raise SchemaError(cpath + ".mentions", "mentions not in document order")
        for prev, cur in zip(mentions, mentions[1:]):
            if (prev.sentence_index == cur.sentence_index
                    and cur.token_span[0] <= prev.token_span[1]):
                raise SchemaError(cpath + ".mentions", "overlapping mention spans")
        chains.append(CorefChain(chain_id, tuple(mentions)))

    return AnnotatedArticle(
        id=art_id,
        title=title,
        grade=grade,
        sentences=tuple(sentences),
        chains=tuple(chains),
    )


def load_article_file(path: str | Path) -> AnnotatedArticle:
    return load_article(json.loads(Path(path).read_text(encoding="utf-8")))


def load_articles_dir(path: str | Path) -> list[AnnotatedArticle]:
    return [load_article_file(p) for p in sorted(Path(path).glob("*.json"))]


# ---------------------------------------------------------------------------
# Graded lexicon


def load_lexicon(path: str | Path) -> GradedLexicon:
    """Read tab-separated ``word<TAB>pos_class<TAB>level`` lines."""
    entries: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise SchemaError(f"{path}:{lineno}", "expected word<TAB>pos<TAB>level")
        word, pos, level = parts
        if pos not in POS_CLASSES:
            raise SchemaError(f"{path}:{lineno}", f"unknown POS class {pos!r}")
        try:
            lvl = int(level)
        except ValueError:
            raise SchemaError(f"{path}:{lineno}", f"bad level {level!r}")
        if not 1 <= lvl <= 6:
            raise SchemaError(f"{path}:{lineno}", "level out of 1..6")
        entries[(word.lower(), pos)] = lvl
    return GradedLexicon(entries)


def lookup_level(lexicon: GradedLexicon, word: str, pos_class: str,
                 lemma: Optional[str] = None) -> Optional[int]:
    """Level for (word, pos); tries the lemma first, then the surface form."""
    if lemma is not None:
        hit = lexicon.level(lemma, pos_class)
        if hit is not None:
            return hit
    return lexicon.level(word, pos_class)


# ---------------------------------------------------------------------------
# Edit distance


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over unicode scalar values."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(
                prev[j] + 1,          # delete
                cur[j - 1] + 1,       # insert
                prev[j - 1] + (ca != cb),  # substitute
            ))
        prev = cur
    return prev[-1]
