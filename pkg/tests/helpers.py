"""Independent oracles and seeded data generators shared across the tests.

Everything here is deliberately naive: transitive closures by fixpoint,
field merges by walking root-to-leaf, window counts by nested loops.  The
oracles never call the code paths they check.
"""

from __future__ import annotations

import os
import random

from templex import DLInstance, Document, Token

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def fixture_text(name: str) -> str:
    with open(fixture_path(name), encoding="utf-8") as fh:
        return fh.read()
from templex.decisionlist import DecisionRule
from templex.fg_lexicon import (ArgSpec, ConceptNode, RawArg, RawConcept,
                                RawLexicon, StateAssertion)
from templex.ontology import Ontology, SemClass
from templex.wsd import SenseTag


# ------------------------------------------------------------- taxonomies

def random_taxonomy(rng: random.Random, n: int) -> Ontology:
    classes = {}
    for i in range(n):
        cid = f"C{i:03d}"
        parent = f"C{rng.randrange(i):03d}" if i and rng.random() < 0.8 else None
        classes[cid] = SemClass(cid, parent)
    return Ontology(classes, {})


def closure_pairs(onto: Ontology) -> set[tuple[str, str]]:
    """All (ancestor, descendant) pairs by naive fixpoint iteration."""
    pairs = {(c, c) for c in onto.classes}
    pairs |= {(cls.parent, cls.id) for cls in onto.classes.values()
              if cls.parent is not None}
    changed = True
    while changed:
        changed = False
        for (a, b) in list(pairs):
            for (c, d) in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    return pairs


def chain_walk_subsumes(onto: Ontology, ancestor: str, descendant: str) -> bool:
    cur: str | None = descendant
    while cur is not None:
        if cur == ancestor:
            return True
        cur = onto.classes[cur].parent
    return False


# ------------------------------------------------- inheritance hierarchies

_SCHEMAS = ("SUCCESSION", "TRANSFER", "GENERIC")
_CLASSES = ("EMPLOYER", "INDIVIDUAL", "POST", "ORGANISATION", "ARTIFACT")
_ROLES = ("org", "person", "post", "item", "source")
_SLOTS = ("S1", "S2", "S3")
_PREDS = ("employed", "holds_post", "owns")


def _random_args(rng: random.Random) -> list[RawArg]:
    roles = rng.sample(_ROLES, rng.randint(1, 3))
    return [RawArg(role, rng.choice(_CLASSES),
                   rng.choice(_SLOTS) if rng.random() < 0.7 else None,
                   rng.random() < 0.8)
            for role in roles]


def _random_assertions(rng: random.Random, roles: list[str]) -> list[StateAssertion]:
    out = []
    for _ in range(rng.randint(1, 2)):
        k = rng.randint(1, min(2, len(roles)))
        out.append(StateAssertion(rng.choice(_PREDS),
                                  tuple(rng.sample(roles, k)),
                                  rng.random() < 0.5,
                                  rng.choice(("before", "after"))))
    return out


def random_hierarchy(rng: random.Random, n: int,
                     with_realizations: bool = False) -> RawLexicon:
    """A random concept forest whose roots carry complete definitions."""
    raw = RawLexicon()
    for i in range(n):
        cid = f"K{i:03d}"
        is_root = i == 0 or rng.random() < 0.2
        parent = None if is_root else f"K{rng.randrange(i):03d}"
        node = RawConcept(cid, parent)
        if is_root or rng.random() < 0.4:
            node.schema = rng.choice(_SCHEMAS)
        if is_root or rng.random() < 0.4:
            node.args = _random_args(rng)
        if is_root or rng.random() < 0.4:
            roles = [a.role for a in node.args] or list(_ROLES)
            node.assertions = _random_assertions(rng, roles)
        if rng.random() < 0.3:
            node.instigator = rng.choice(_ROLES)
        if rng.random() < 0.3:
            node.discriminators = [(f"fg{rng.randint(1, 3)}",
                                    rng.choice(("word_left", "word_right",
                                                "word_in_window")),
                                    f"w{rng.randrange(20)}")]
        raw.concepts[cid] = node
    if with_realizations:
        _attach_realizations(rng, raw)
    return raw


def _attach_realizations(rng: random.Random, raw: RawLexicon) -> None:
    from templex.fg_lexicon import RawRealization
    grels = ["subj", "dobj", "iobj", "pp:from", "pp:of"]
    for w in range(rng.randint(1, 6)):
        cid = rng.choice(sorted(raw.concepts))
        real = RawRealization(f"verb{w:02d}", "verb", "en", f"fg{w}", cid)
        if rng.random() < 0.4:
            # field overrides; overriding args changes the role inventory
            if rng.random() < 0.5:
                real.overrides.args = _random_args(rng)
            if rng.random() < 0.5:
                real.overrides.assertions = _random_assertions(rng, list(_ROLES))
            if rng.random() < 0.3:
                real.overrides.schema = rng.choice(_SCHEMAS)
        if real.overrides.args is not None:
            roles = [a.role for a in real.overrides.args]
        else:
            roles = [a.role for a in merge_oracle(raw, cid).args]
        for gr in rng.sample(grels, min(len(roles), rng.randint(0, 3))):
            real.complement_map[gr] = rng.choice(roles)
        raw.realizations.append(real)


def merge_oracle(raw: RawLexicon, cid: str) -> ConceptNode:
    """Brute-force root-to-leaf field merge, independent of the resolver."""
    chain = []
    cur: str | None = cid
    while cur is not None:
        chain.append(raw.concepts[cur])
        cur = raw.concepts[cur].parent
    chain.reverse()  # root first
    schema = args = assertions = None
    instigator = None
    discriminators = None
    for node in chain:  # later (more specific) nodes override
        if node.schema is not None:
            schema = node.schema
        if node.args:
            args = node.args
        if node.assertions:
            assertions = node.assertions
        if node.instigator is not None:
            instigator = node.instigator
        if node.discriminators:
            discriminators = node.discriminators
    assert schema is not None
    argspecs = tuple(
        ArgSpec(a.role, a.restriction,
                (schema, a.slot) if a.slot is not None else None, a.required)
        for a in (args or []))
    rules = tuple(DecisionRule(kind, value, sense, 1.0)
                  for sense, kind, value in (discriminators or []))
    return ConceptNode(cid, schema, argspecs, tuple(assertions or []),
                       instigator, rules, raw.concepts[cid].line)


# -------------------------------------------------------- synthetic corpora

def make_doc(doc_id: str, sentences: list[list[tuple[str, str]]]) -> Document:
    """Build a Document from (lemma, pos) sentences; surface = lemma."""
    doc = Document(doc_id)
    offset = 0
    for si, sent in enumerate(sentences):
        toks = []
        for ti, (lemma, pos) in enumerate(sent):
            toks.append(Token(lemma, lemma, pos, doc_id, si, ti,
                              (offset, offset + len(lemma))))
            offset += len(lemma) + 1
        doc.sentences.append(toks)
    return doc


def two_class_data(rng: random.Random, *, shared: int = 8, exclusive: int = 32,
                   n_train: int = 500, n_test: int = 200, ctx: int = 8):
    """Class-conditional unigram corpus for the coarse-classifier analog.

    Returns (train_docs, test_items, ontology_text, bglex_text, scheme_text);
    test_items are (context lemma list, true class) pairs.  The two
    vocabularies share `shared` words out of `exclusive + shared`.
    """
    org_words = [f"orgw{i:02d}" for i in range(exclusive)]
    loc_words = [f"locw{i:02d}" for i in range(exclusive)]
    shared_words = [f"shw{i:02d}" for i in range(shared)]

    def draw(cls: str) -> str:
        pool_exclusive = org_words if cls == "ORGANISATION" else loc_words
        total = exclusive + shared
        if shared and rng.random() < shared / total:
            return rng.choice(shared_words)
        return rng.choice(pool_exclusive)

    def sentence(cls: str) -> list[tuple[str, str]]:
        words = [draw(cls) for _ in range(ctx)]
        pos = rng.randrange(len(words) + 1)
        lemmas = words[:pos] + ["crane"] + words[pos:]
        return [(w, "NN") for w in lemmas]

    train_docs = []
    for i in range(n_train):
        cls = "ORGANISATION" if i % 2 == 0 else "LOCATION"
        train_docs.append(make_doc(f"t{i:04d}", [sentence(cls)]))
    test_items = []
    for i in range(n_test):
        cls = "ORGANISATION" if i % 2 == 0 else "LOCATION"
        sent = sentence(cls)
        test_items.append(([w for w, _ in sent if w != "crane"], cls))

    onto_text = "class ORGANISATION cat noun\nclass LOCATION cat noun\n"
    bg_lines = [f"{w} noun s1 ORGANISATION" for w in org_words]
    bg_lines += [f"{w} noun s1 LOCATION" for w in loc_words]
    bg_lines += ["crane noun s1 ORGANISATION", "crane noun s2 LOCATION"]
    scheme_text = "scheme noun ORGANISATION LOCATION\n"
    return train_docs, test_items, onto_text, "\n".join(bg_lines) + "\n", scheme_text


def ospd_noisy_tags(rng: random.Random, *, n_docs: int = 200, per_doc: int = 25,
                    noise: float = 0.3):
    """One true sense per document, tags flipped with the given noise rate.

    Returns (tags, truth) where truth maps doc id to its true class.
    """
    classes = {"ORGANISATION": "s1", "LOCATION": "s2"}
    tags = {}
    truth = {}
    for d in range(n_docs):
        doc_id = f"n{d:04d}"
        true_cls = rng.choice(sorted(classes))
        truth[doc_id] = true_cls
        for i in range(per_doc):
            cls = true_cls
            if rng.random() < noise:
                cls = next(c for c in classes if c != true_cls)
            tags[(doc_id, 0, i)] = SenseTag(doc_id, 0, i, "bank", "noun",
                                            classes[cls], cls, 0.0, "bayes")
    return tags, truth


def dl_corpus(rng: random.Random, *, n_per_sense: int = 100, n_test: int = 50,
              fillers: int = 20):
    """Deterministic collocation corpus for decision-list bootstrapping.

    Every instance carries exactly two collocates of its sense plus filler
    noise shared between the senses.
    """
    coll = {"A": [f"ca{i}" for i in range(10)],
            "B": [f"cb{i}" for i in range(10)]}
    noise = [f"f{i:02d}" for i in range(fillers)]

    def make(sense: str, doc_id: str) -> DLInstance:
        words = [rng.choice(noise) for _ in range(5)] + rng.sample(coll[sense], 2)
        rng.shuffle(words)
        pos = rng.randrange(len(words) + 1)
        lemmas = tuple(words[:pos] + ["bass"] + words[pos:])
        return DLInstance(lemmas, pos, doc_id)

    train, test = [], []
    for i in range(n_per_sense):
        train.append(make("A", f"da{i:03d}"))
        train.append(make("B", f"db{i:03d}"))
    for i in range(n_test):
        sense = "A" if i % 2 == 0 else "B"
        test.append((make(sense, f"dt{i:03d}"), sense))
    seeds = {"A": ["ca0"], "B": ["cb0"]}
    return train, test, seeds, coll


_KWIC_TAGS = ["NN", "NNP", "VB", "VBD", "DET", "ADJ", "PREP", "PRON", "ADV", "PUNCT"]


def random_kwic_corpus(rng: random.Random, n_tokens: int) -> list[Document]:
    vocab = [(f"w{i:02d}", rng.choice(_KWIC_TAGS)) for i in range(60)]
    docs = []
    total = 0
    d = 0
    while total < n_tokens:
        sents = []
        for _ in range(20):
            sent = [rng.choice(vocab) for _ in range(rng.randint(5, 15))]
            sents.append([(w, t) for (w, t) in sent])
            total += len(sent)
            if total >= n_tokens:
                break
        docs.append(make_doc(f"g{d:04d}", sents))
        d += 1
    return docs


def naive_kwic_count(docs: list[Document], constraints, tags=None) -> int:
    """Independent leftmost non-overlapping scan; constraints are callables."""
    count = 0
    for doc in docs:
        for sent in doc.sentences:
            i = 0
            while i + len(constraints) <= len(sent):
                ok = True
                for k, check in enumerate(constraints):
                    tok = sent[i + k]
                    tag = tags.get((doc.doc_id, tok.sent_idx, tok.tok_idx)) if tags else None
                    if not check(tok, tag):
                        ok = False
                        break
                if ok:
                    count += 1
                    i += len(constraints)
                else:
                    i += 1
    return count
