"""Shallow text analysis: tokens, chunks and local grammatical relations.

The primary input path is pre-tagged vertical text.  Raw text gets a
closed-class-list + suffix-heuristic fallback tagger; gold results always
come from tagged fixtures.  Chunking and relation finding are deliberately
rule-based and local: errors surface as extraction misses, which the
acceptance fixtures bound.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import ParseError

TAGSET = frozenset({
    "NN", "NNP", "VB", "VBD", "VBN", "DET", "ADJ", "PREP", "PRON",
    "CONJ", "NUM", "ADV", "PUNCT", "OTHER", "BE",
})
VERBAL = frozenset({"BE", "VB", "VBD", "VBN"})
NOMINAL = frozenset({"NN", "NNP"})

# maps corpus tags onto lexicon parts of speech; pronouns are looked up as
# nouns so that `she`/`he` can carry a semantic class
LEXICON_POS = {
    "NN": "noun", "NNP": "noun", "PRON": "noun",
    "VB": "verb", "VBD": "verb", "VBN": "verb",
    "ADJ": "adj",
}


def lexicon_pos(tag: str) -> str | None:
    return LEXICON_POS.get(tag)


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str
    doc_id: str
    sent_idx: int
    tok_idx: int
    char_span: tuple[int, int]


@dataclass
class Document:
    doc_id: str
    sentences: list[list[Token]] = field(default_factory=list)

    def tokens(self):
        for sent in self.sentences:
            yield from sent


@dataclass(frozen=True)
class Chunk:
    kind: str  # NP | VG | PP | O
    start: int  # token index, inclusive
    end: int    # token index, exclusive
    head_idx: int


@dataclass(frozen=True)
class GrRelation:
    verb_idx: int
    relation: str  # subj | dobj | iobj | agent_by | pp:<prep>
    dependent_idx: int
    voice: str  # active | passive


@dataclass
class SentenceAnalysis:
    tokens: list[Token]
    chunks: list[Chunk]
    relations: list[GrRelation]


@dataclass
class DocAnalysis:
    doc: Document
    sentences: list[SentenceAnalysis]


# ------------------------------------------------------------ corpus input

_RAW_TOKEN = re.compile(r"\w+(?:[-']\w+)*|[^\w\s]")
_SENT_END = frozenset({".", "!", "?"})


def read_corpus(text: str, *, raw: bool = False, doc_id: str = "d1",
                path: str = "<string>") -> list[Document]:
    """Read vertical (`surface<TAB>lemma<TAB>POS`) or raw text into documents.

    Vertical mode: `#DOC <id>` opens a document, a blank line ends a
    sentence, other `#` lines are comments.  Raw mode yields one document
    with pos="UNK" and lowercased-surface lemmas; run tag_fallback() to get
    heuristic tags and stemmed lemmas.
    """
    if raw:
        return [_read_raw(text, doc_id)]

    docs: list[Document] = []
    cur_doc: Document | None = None
    cur_sent: list[Token] = []
    offset = 0

    def end_sentence():
        nonlocal cur_sent
        if cur_sent and cur_doc is not None:
            cur_doc.sentences.append(cur_sent)
        cur_sent = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("#DOC"):
            end_sentence()
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected `#DOC <id>`", path=path, line=lineno)
            if any(d.doc_id == parts[1] for d in docs):
                raise ParseError(f"duplicate document id {parts[1]}",
                                 path=path, line=lineno)
            cur_doc = Document(parts[1])
            docs.append(cur_doc)
            offset = 0
            continue
        if line.startswith("#"):
            continue
        if not line.strip():
            end_sentence()
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"expected 3 tab-separated columns, got {len(cols)}",
                             path=path, line=lineno)
        surface, lemma, pos = cols
        if pos not in TAGSET:
            raise ParseError(f"unknown POS tag {pos!r}", path=path, line=lineno)
        if cur_doc is None:
            cur_doc = Document(doc_id)
            docs.append(cur_doc)
        # char spans index a canonical detokenisation: tokens joined by single
        # spaces, sentences by newlines
        start = offset
        offset += len(surface) + 1
        cur_sent.append(Token(surface, lemma, pos, cur_doc.doc_id,
                              len(cur_doc.sentences), len(cur_sent), (start, start + len(surface))))
    end_sentence()
    return docs


def _read_raw(text: str, doc_id: str) -> Document:
    doc = Document(doc_id)
    sent: list[Token] = []
    for m in _RAW_TOKEN.finditer(text):
        surface = m.group(0)
        sent.append(Token(surface, surface.lower(), "UNK", doc_id,
                          len(doc.sentences), len(sent), (m.start(), m.end())))
        if surface in _SENT_END:
            doc.sentences.append(sent)
            sent = []
    if sent:
        doc.sentences.append(sent)
    return doc


# --------------------------------------------------------- fallback tagger

_DET = frozenset("the a an this that these those each every some any no another".split())
_BE = frozenset("am is are was were be been being".split())
_PREP = frozenset(("of in on at by for from with to into onto over under after "
                   "before between during about against through across").split())
_PRON = frozenset(("he she it they we i you him her them us me his hers its their "
                   "our your who whom himself herself itself themselves").split())
_CONJ = frozenset("and or but nor so yet".split())
_ADV = frozenset("not very quickly slowly now then here there also soon never always".split())
_NUM_WORDS = frozenset("one two three four five six seven eight nine ten".split())
_PUNCT_RE = re.compile(r"^[^\w\s]+$")
_NUM_RE = re.compile(r"^\d[\d.,]*$")

# normative raw-mode suffix table; see docs/formats.md
_UNDOUBLE = frozenset("bb dd gg mm nn pp rr tt".split())


def strip_suffix(word: str) -> str:
    """Small -s/-ed/-ing stripping table with undoubling; lowercases first."""
    w = word.lower()
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith("es") and len(w) > 3 and w[-3] in "sxz":
        return w[:-2]
    if w.endswith("s") and len(w) > 3 and not w.endswith("ss") and not w.endswith("us"):
        return w[:-1]
    if w.endswith("ied") and len(w) > 4:
        return w[:-3] + "y"
    for suf in ("ed", "ing"):
        if w.endswith(suf) and len(w) - len(suf) >= 3:
            stem = w[: -len(suf)]
            if stem[-2:] in _UNDOUBLE:
                return stem[:-1]
            if stem.endswith("v") or stem.endswith("u"):
                return stem + "e"
            return stem
    return w


def _guess_tag(surface: str, prev_tag: str | None, sent_initial: bool) -> str:
    low = surface.lower()
    if _PUNCT_RE.match(surface):
        return "PUNCT"
    if _NUM_RE.match(surface) or low in _NUM_WORDS:
        return "NUM"
    if low in _BE:
        return "BE"
    if low in _DET:
        return "DET"
    if low in _PREP:
        return "PREP"
    if low in _PRON:
        return "PRON"
    if low in _CONJ:
        return "CONJ"
    if low in _ADV or (low.endswith("ly") and len(low) > 4):
        return "ADV"
    if surface[0].isupper() and not sent_initial:
        return "NNP"
    if low.endswith("ed") and len(low) > 4:
        return "VBN" if prev_tag == "BE" else "VBD"
    if low.endswith("ing") and len(low) > 5:
        return "VB"
    return "NN"


def tag_fallback(doc: Document) -> Document:
    """Heuristic tags plus suffix-stripped lemmas for a raw-mode document."""
    out = Document(doc.doc_id)
    for sent in doc.sentences:
        tagged: list[Token] = []
        prev_tag: str | None = None
        for i, tok in enumerate(sent):
            tag = _guess_tag(tok.surface, prev_tag, i == 0)
            lemma = tok.surface.lower() if tag in ("NNP", "PRON", "PUNCT") \
                else strip_suffix(tok.surface)
            tagged.append(replace(tok, pos=tag, lemma=lemma))
            prev_tag = tag
        out.sentences.append(tagged)
    return out


# ----------------------------------------------------------------- chunks

def chunk(tokens: list[Token]) -> list[Chunk]:
    """Partition a sentence into NP / VG / PP / O chunks.

    NP  := DET? (ADJ|NUM)* (NN|NNP)+  |  PRON        (head: last noun)
    VG  := maximal verbal run, ADV allowed between verbal elements
                                                     (head: last verb)
    PP  := single PREP token
    O   := maximal run of anything else              (head: last token)
    """
    n = len(tokens)
    chunks: list[Chunk] = []
    i = 0
    while i < n:
        pos = tokens[i].pos
        if pos == "PRON":
            chunks.append(Chunk("NP", i, i + 1, i))
            i += 1
            continue
        if pos in ("DET", "ADJ", "NUM") or pos in NOMINAL:
            j = i + 1 if pos == "DET" else i
            while j < n and tokens[j].pos in ("ADJ", "NUM"):
                j += 1
            k = j
            while k < n and tokens[k].pos in NOMINAL:
                k += 1
            if k > j:
                chunks.append(Chunk("NP", i, k, k - 1))
                i = k
                continue
            chunks.append(Chunk("O", i, i + 1, i))
            i += 1
            continue
        if pos in VERBAL:
            j = i
            last_verb = i
            while j < n:
                if tokens[j].pos in VERBAL:
                    last_verb = j
                    j += 1
                elif tokens[j].pos == "ADV":
                    m = j
                    while m < n and tokens[m].pos == "ADV":
                        m += 1
                    if m < n and tokens[m].pos in VERBAL:
                        j = m
                    else:
                        break
                else:
                    break
            chunks.append(Chunk("VG", i, last_verb + 1, last_verb))
            i = last_verb + 1
            continue
        if pos == "PREP":
            chunks.append(Chunk("PP", i, i + 1, i))
            i += 1
            continue
        chunks.append(Chunk("O", i, i + 1, i))
        i += 1
    return _merge_o(chunks)


def _merge_o(chunks: list[Chunk]) -> list[Chunk]:
    merged: list[Chunk] = []
    for c in chunks:
        if merged and c.kind == "O" and merged[-1].kind == "O" and merged[-1].end == c.start:
            prev = merged.pop()
            merged.append(Chunk("O", prev.start, c.end, c.end - 1))
        else:
            merged.append(c)
    return merged


def is_passive_vg(tokens: list[Token], vg: Chunk) -> bool:
    """be + past participle head: the definition of the passive flag."""
    if tokens[vg.head_idx].pos != "VBN":
        return False
    return any(tokens[i].pos == "BE" for i in range(vg.start, vg.head_idx))


# -------------------------------------------------------------- relations

def grammatical_relations(chunks: list[Chunk], tokens: list[Token]) -> list[GrRelation]:
    """Local subject / object / agent / pp relations around each verb group.

    Active: nearest preceding NP head is subj, nearest following NP head not
    inside a PP is dobj (a second adjacent NP becomes iobj).  Passive: the
    surface subject keeps the subj label with voice=passive and a by-PP
    supplies agent_by.
    """
    rels: list[GrRelation] = []
    for gi, vg in enumerate(chunks):
        if vg.kind != "VG":
            continue
        voice = "passive" if is_passive_vg(tokens, vg) else "active"
        verb = vg.head_idx
        for c in reversed(chunks[:gi]):
            if c.kind == "NP":
                rels.append(GrRelation(verb, "subj", c.head_idx, voice))
                break
        post_nps: list[tuple[int, Chunk]] = []
        k = gi + 1
        while k < len(chunks) and chunks[k].kind != "VG":
            c = chunks[k]
            if c.kind == "PP":
                if k + 1 < len(chunks) and chunks[k + 1].kind == "NP":
                    prep = tokens[c.head_idx].lemma
                    dep = chunks[k + 1].head_idx
                    if voice == "passive" and prep == "by":
                        rels.append(GrRelation(verb, "agent_by", dep, voice))
                    else:
                        rels.append(GrRelation(verb, f"pp:{prep}", dep, voice))
                    k += 2
                    continue
            elif c.kind == "NP":
                post_nps.append((k, c))
            k += 1
        if post_nps:
            rels.append(GrRelation(verb, "dobj", post_nps[0][1].head_idx, voice))
            if len(post_nps) >= 2 and post_nps[1][0] == post_nps[0][0] + 1:
                rels.append(GrRelation(verb, "iobj", post_nps[1][1].head_idx, voice))
    return rels


def analyze(doc: Document) -> DocAnalysis:
    sentences = []
    for sent in doc.sentences:
        ch = chunk(sent)
        rels = grammatical_relations(ch, sent)
        sentences.append(SentenceAnalysis(sent, ch, rels))
    return DocAnalysis(doc, sentences)


def analyze_corpus(docs: list[Document]) -> list[DocAnalysis]:
    return [analyze(d) for d in docs]
