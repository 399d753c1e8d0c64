"""Both disambiguation routes plus the glue between them.

Background route: a naive-Bayes-style classifier over context windows,
trained without annotation by using coarse-unambiguous lemmas as anchors,
then smoothed with a one-sense-per-discourse majority filter.

Foreground route: no classifier at all.  A foreground sense is selected
when its selection restrictions are satisfied by the tagged argument heads;
disambiguation falls out of finding the one sense that fits.  General verb
senses from the background lexicon take part in the same restriction filter
so the surviving-sense arithmetic is observable per match.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace

from .bg_lexicon import BgLexicon, BgSense
from .decisionlist import (DecisionList, DecisionRule, DLInstance, DLParams,
                           apply_decision_list, instance_features,
                           learn_decision_list)
from .errors import ParseError
from .fg_lexicon import Diagnostic, FgLexicon, Realization
from .ontology import Ontology
from .textpipe import (DocAnalysis, Document, Token, is_passive_vg,
                       lexicon_pos)

UNFILLED = "UNFILLED"
SALIENT = "SALIENT"

TokenKey = tuple[str, int, int]  # (doc_id, sent_idx, tok_idx)


@dataclass
class BayesModel:
    class_priors: dict[str, float] = field(default_factory=dict)
    weights: dict[tuple[str, str], float] = field(default_factory=dict)
    window: int = 10
    alpha: float = 0.1
    vocab: set[str] = field(default_factory=set)


@dataclass(frozen=True)
class SenseTag:
    doc_id: str
    sent_idx: int
    tok_idx: int
    lemma: str
    pos: str  # lexicon pos: noun | verb | adj
    sense_id: str
    coarse_class: str
    score: float
    method: str  # unambiguous | bayes | ospd | foreground | decision_list


@dataclass
class FgMatch:
    doc_id: str
    sent_idx: int
    verb_idx: int
    concept: str
    sense_id: str
    bindings: dict[str, int | str] = field(default_factory=dict)
    passive_implicature: bool = False
    competitors: int = 0  # other foreground senses that also fit
    survivors: int = 1    # all senses (foreground + general) passing the filter
    trigger_lemma: str = ""


# ------------------------------------------------------------ training

def _doc_positions(doc: Document) -> list[Token]:
    return list(doc.tokens())


def _window_lemmas(flat: list[Token], i: int, window: int) -> list[str]:
    lo = max(0, i - window)
    hi = min(len(flat), i + window + 1)
    return [flat[j].lemma for j in range(lo, hi)
            if j != i and flat[j].pos != "PUNCT"]


def train_bayes(docs: list[Document], bg: BgLexicon, window: int = 10,
                alpha: float = 0.1) -> BayesModel:
    """Train from coarse-unambiguous anchor tokens; no annotation needed.

    weight(w, c) compares how often w appears within +/-window of class-c
    anchors against the count expected under the corpus unigram
    distribution, with add-alpha smoothing on both sides.
    """
    if not bg.collapsed:
        raise ValueError("train_bayes requires a collapsed background lexicon")
    classes = bg.coarse_classes()
    anchor_counts: Counter = Counter()
    ctx_counts: Counter = Counter()      # (lemma, class) -> count
    class_ctx_total: Counter = Counter()  # class -> total context tokens
    unigram: Counter = Counter()
    total_tokens = 0
    vocab: set[str] = set()

    for doc in docs:
        flat = _doc_positions(doc)
        for tok in flat:
            if tok.pos != "PUNCT":
                unigram[tok.lemma] += 1
                total_tokens += 1
        for i, tok in enumerate(flat):
            pos = lexicon_pos(tok.pos)
            if pos is None:
                continue
            entries = bg.entries(tok.lemma, pos)
            if len(entries) != 1:
                continue
            cls = entries[0].coarse_class
            anchor_counts[cls] += 1
            for lemma in _window_lemmas(flat, i, window):
                ctx_counts[(lemma, cls)] += 1
                class_ctx_total[cls] += 1
                vocab.add(lemma)

    if not anchor_counts:
        raise ValueError("no training anchors found (corpus/lexicon mismatch)")

    total_anchors = sum(anchor_counts.values())
    priors = {c: (anchor_counts.get(c, 0) + alpha) / (total_anchors + alpha * len(classes))
              for c in classes}
    weights: dict[tuple[str, str], float] = {}
    for w in vocab:
        p_w = unigram[w] / total_tokens if total_tokens else 0.0
        for c in classes:
            expected = class_ctx_total.get(c, 0) * p_w
            observed = ctx_counts.get((w, c), 0)
            weights[(w, c)] = math.log((observed + alpha) / (expected + alpha))
    return BayesModel(priors, weights, window, alpha, vocab)


def classify_bayes(model: BayesModel, context: list[str],
                   candidates: set[str]) -> list[tuple[str, float]]:
    """Score log prior + sum of context weights; full descending ranking.

    Ties break on lexicographic class order.
    """
    if not candidates:
        raise ValueError("no candidate classes")
    scored = []
    for c in sorted(candidates):
        prior = model.class_priors.get(c, 0.0)
        # classes absent from training still rank, just last
        score = math.log(prior) if prior > 0.0 else math.log(1e-12)
        for w in context:
            if w in model.vocab:
                score += model.weights.get((w, c), 0.0)
        scored.append((c, score))
    scored.sort(key=lambda cs: (-cs[1], cs[0]))
    return scored


# ------------------------------------------------------------- tagging

def disambiguate_background(model: BayesModel, docs: list[Document],
                            bg: BgLexicon) -> dict[TokenKey, SenseTag]:
    """One tag per open-class token that the lexicon knows.

    Coarse-unambiguous lemmas are tagged directly; ambiguous ones get the
    classifier's argmax over their own candidate classes; unknown lemmas are
    left untagged.
    """
    tags: dict[TokenKey, SenseTag] = {}
    for doc in docs:
        flat = _doc_positions(doc)
        for i, tok in enumerate(flat):
            pos = lexicon_pos(tok.pos)
            if pos is None:
                continue
            entries = bg.entries(tok.lemma, pos)
            if not entries:
                continue
            key = (doc.doc_id, tok.sent_idx, tok.tok_idx)
            if len(entries) == 1:
                s = entries[0]
                tags[key] = SenseTag(doc.doc_id, tok.sent_idx, tok.tok_idx,
                                     tok.lemma, pos, s.sense_id, s.coarse_class,
                                     0.0, "unambiguous")
                continue
            candidates = {s.coarse_class for s in entries}
            ranking = classify_bayes(model, _window_lemmas(flat, i, model.window),
                                     candidates)
            win_class, win_score = ranking[0]
            sense = next(s for s in entries if s.coarse_class == win_class)
            tags[key] = SenseTag(doc.doc_id, tok.sent_idx, tok.tok_idx,
                                 tok.lemma, pos, sense.sense_id, win_class,
                                 win_score, "bayes")
    return tags


def apply_ospd(tags: dict[TokenKey, SenseTag],
               bg: BgLexicon | None = None) -> dict[TokenKey, SenseTag]:
    """One sense per discourse: per (doc, lemma) strict-majority re-vote.

    Groups with two or more tagged instances where one class holds a strict
    majority are reassigned wholesale; exact ties change nothing.  Idempotent.
    """
    groups: dict[tuple[str, str], list[TokenKey]] = defaultdict(list)
    for key, tag in tags.items():
        groups[(tag.doc_id, tag.lemma)].append(key)

    out = dict(tags)
    for (doc_id, lemma), keys in groups.items():
        if len(keys) < 2:
            continue
        counts = Counter(tags[k].coarse_class for k in keys)
        top = max(counts.values())
        winners = sorted(c for c, n in counts.items() if n == top)
        if len(winners) != 1 or top * 2 <= len(keys):
            continue
        majority = winners[0]
        # a sense id for the majority class, per pos, from the group itself
        sense_by_pos: dict[str, str] = {}
        for k in keys:
            t = tags[k]
            if t.coarse_class == majority:
                sense_by_pos.setdefault(t.pos, t.sense_id)
        for k in keys:
            t = tags[k]
            if t.coarse_class == majority:
                continue
            sense_id = sense_by_pos.get(t.pos)
            if sense_id is None and bg is not None:
                for s in bg.entries(t.lemma, t.pos):
                    if s.coarse_class == majority:
                        sense_id = s.sense_id
                        break
            if sense_id is None:
                continue  # lemma has no sense of that class for this pos
            out[k] = replace(t, sense_id=sense_id, coarse_class=majority,
                             score=0.0, method="ospd")
    return out


# ------------------------------------------------------ foreground match

def _transform_key(relation: str, voice: str) -> str:
    if voice == "passive":
        if relation == "subj":
            return "dobj"
        if relation == "agent_by":
            return "subj"
    return relation


def _fit_realization(real: Realization, fills: dict[str, int], voice: str,
                     passive_lone: bool, head_class, onto: Ontology):
    """Check one foreground sense against the filled roles.

    Returns (fits, bindings, passive_implicature).
    """
    eff = real.effective
    subj_role = real.complement_map.get("subj")
    bindings: dict[str, int | str] = {}
    implicature = False
    for arg in eff.args:
        idx = fills.get(arg.role)
        if idx is not None:
            cls = head_class(idx)
            if cls is None or not onto.compatible(cls, arg.restriction):
                return False, {}, False
            bindings[arg.role] = idx
        elif arg.required:
            if voice == "passive" and (arg.role == subj_role
                                       or (passive_lone and not fills)):
                implicature = True
                bindings[arg.role] = UNFILLED
            else:
                return False, {}, False
        else:
            bindings[arg.role] = UNFILLED
    return True, bindings, implicature


def _bg_sense_survives(sense: BgSense, observed: dict[str, str | None],
                       onto: Ontology) -> bool:
    # an absent or untagged argument never eliminates a general sense;
    # only a present, incompatible one does
    for gr, restriction in (("subj", sense.subj_restriction),
                            ("dobj", sense.obj_restriction)):
        cls = observed.get(gr)
        if restriction is not None and cls is not None:
            if restriction not in onto.classes or not onto.compatible(cls, restriction):
                return False
    return True


def match_foreground(analyses: list[DocAnalysis], fg: FgLexicon,
                     tags: dict[TokenKey, SenseTag], onto: Ontology,
                     bg: BgLexicon | None = None, *, lang: str = "en",
                     passive_lone: bool = True,
                     window: int = 10) -> tuple[list[FgMatch], list[Diagnostic]]:
    """Restriction-driven foreground sense selection for every verb group.

    A sense fits when every filled role is class-compatible with its
    restriction and every required role is filled; under passive voice the
    agent role may stay unfilled (passive_implicature), and with
    passive_lone a bare passive with no filled roles still triggers.
    Exactly one fit emits a match; several fits consult the concept's
    discriminator rules; a remaining tie abstains with a diagnostic.
    """
    matches: list[FgMatch] = []
    diagnostics: list[Diagnostic] = []

    for analysis in analyses:
        doc = analysis.doc
        flat = _doc_positions(doc)
        flat_pos = {(t.sent_idx, t.tok_idx): i for i, t in enumerate(flat)}
        for sa in analysis.sentences:
            tokens = sa.tokens
            if not tokens:
                continue
            sent_idx = tokens[0].sent_idx

            def head_class(tok_idx: int) -> str | None:
                tag = tags.get((doc.doc_id, sent_idx, tok_idx))
                return tag.coarse_class if tag else None

            for vg in sa.chunks:
                if vg.kind != "VG":
                    continue
                verb = tokens[vg.head_idx]
                reals = fg.senses(verb.lemma, "verb", lang)
                if not reals:
                    continue
                voice = "passive" if is_passive_vg(tokens, vg) else "active"
                rels_v = [r for r in sa.relations if r.verb_idx == vg.head_idx]

                observed: dict[str, str | None] = {}
                for rel in rels_v:
                    key = _transform_key(rel.relation, voice)
                    if key in ("subj", "dobj") and key not in observed:
                        observed[key] = head_class(rel.dependent_idx)

                fits: list[tuple[Realization, dict[str, int | str], bool]] = []
                for real in reals:
                    fills: dict[str, int] = {}
                    for rel in rels_v:
                        key = _transform_key(rel.relation, voice)
                        role = real.complement_map.get(key)
                        if role is not None and role not in fills:
                            fills[role] = rel.dependent_idx
                    ok, bindings, implicature = _fit_realization(
                        real, fills, voice, passive_lone, head_class, onto)
                    if ok:
                        fits.append((real, bindings, implicature))

                bg_survivors = 0
                if bg is not None:
                    for sense in bg.entries(verb.lemma, "verb"):
                        if _bg_sense_survives(sense, observed, onto):
                            bg_survivors += 1

                if not fits:
                    continue
                if len(fits) == 1:
                    chosen = fits[0]
                else:
                    chosen = _discriminate(fits, flat, flat_pos,
                                           (sent_idx, vg.head_idx), window)
                    if chosen is None:
                        diagnostics.append(Diagnostic(
                            "warning",
                            f"{doc.doc_id}:{sent_idx}",
                            f"{verb.lemma}: {len(fits)} foreground senses fit "
                            f"and no discriminator decided; abstaining"))
                        continue
                real, bindings, implicature = chosen
                matches.append(FgMatch(
                    doc_id=doc.doc_id, sent_idx=sent_idx, verb_idx=vg.head_idx,
                    concept=real.concept, sense_id=real.sense_id,
                    bindings=bindings, passive_implicature=implicature,
                    competitors=len(fits) - 1,
                    survivors=len(fits) + bg_survivors,
                    trigger_lemma=verb.lemma))
    return matches, diagnostics


def _discriminate(fits, flat, flat_pos, verb_key, window):
    fit_senses = {real.sense_id for real, _, _ in fits}
    rules: list[DecisionRule] = []
    seen = set()
    for real, _, _ in fits:
        for rule in real.effective.discriminators:
            key = (rule.kind, rule.value, rule.sense_id)
            if key not in seen:
                seen.add(key)
                rules.append(rule)
    if not rules:
        return None
    i = flat_pos[verb_key]
    lo = max(0, i - window)
    hi = min(len(flat), i + window + 1)
    inst = DLInstance(tuple(t.lemma for t in flat[lo:hi]), i - lo)
    sense, rule = apply_decision_list(DecisionList(rules, None), inst)
    if rule is None or sense not in fit_senses:
        return None
    for cand in fits:
        if cand[0].sense_id == sense:
            return cand
    return None


def apply_foreground_priority(tags: dict[TokenKey, SenseTag],
                              matches: list[FgMatch]) -> dict[TokenKey, SenseTag]:
    """Replace any background tag on a matched verb with its foreground tag.

    A match that beat competing foreground senses was decided by the
    concept's discriminator rules, and its tag says so.
    """
    out = dict(tags)
    for m in matches:
        key = (m.doc_id, m.sent_idx, m.verb_idx)
        method = "decision_list" if m.competitors > 0 else "foreground"
        out[key] = SenseTag(m.doc_id, m.sent_idx, m.verb_idx, m.trigger_lemma,
                            "verb", m.sense_id, m.concept, 0.0, method)
    return out


def surviving_sense_count(fg: FgLexicon, bg: BgLexicon | None, onto: Ontology,
                          lemma: str, subj_class: str | None = None,
                          obj_class: str | None = None,
                          lang: str = "en") -> tuple[int, list[str]]:
    """Restriction-filter arithmetic for a verb given argument classes.

    Counts how many senses (foreground realizations plus general background
    senses) are compatible with the given subject/object classes; a None
    class constrains nothing.  Returns (total survivors, surviving
    foreground sense ids).
    """
    fg_survivors: list[str] = []
    for real in fg.senses(lemma, "verb", lang):
        eff = real.effective
        ok = True
        for gr, cls in (("subj", subj_class), ("dobj", obj_class)):
            role = real.complement_map.get(gr)
            if role is None or cls is None:
                continue
            arg = eff.arg(role)
            if arg is not None and not onto.compatible(cls, arg.restriction):
                ok = False
                break
        if ok:
            fg_survivors.append(real.sense_id)
    total = len(fg_survivors)
    if bg is not None:
        observed = {"subj": subj_class, "dobj": obj_class}
        for sense in bg.entries(lemma, "verb"):
            if _bg_sense_survives(sense, observed, onto):
                total += 1
    return total, fg_survivors


# ---------------------------------------------------------- persistence

def save_bayes_model(model: BayesModel) -> str:
    """Versioned text dump: sorted keys, 6-decimal weights; bit-stable."""
    lines = ["bayesmodel v1",
             f"window {model.window}",
             f"alpha {model.alpha:.6f}"]
    for c in sorted(model.class_priors):
        lines.append(f"prior {c} {model.class_priors[c]:.6f}")
    for (w, c) in sorted(model.weights):
        lines.append(f"weight {w} {c} {model.weights[(w, c)]:.6f}")
    return "\n".join(lines) + "\n"


def load_bayes_model(text: str, path: str = "<string>") -> BayesModel:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "bayesmodel v1":
        raise ParseError("not a bayesmodel v1 file", path=path, line=1)
    model = BayesModel()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "window" and len(parts) == 2:
            model.window = int(parts[1])
        elif parts[0] == "alpha" and len(parts) == 2:
            model.alpha = float(parts[1])
        elif parts[0] == "prior" and len(parts) == 3:
            model.class_priors[parts[1]] = float(parts[2])
        elif parts[0] == "weight" and len(parts) == 4:
            model.weights[(parts[1], parts[2])] = float(parts[3])
            model.vocab.add(parts[1])
        else:
            raise ParseError(f"bad model line {line!r}", path=path, line=lineno)
    return model


# ------------------------------------------------------- tagged corpus io

def dump_tagged_corpus(docs: list[Document], tags: dict[TokenKey, SenseTag],
                       header: dict | None = None) -> str:
    """Vertical corpus plus a 4th `sense_id/CLASS/method` column (`-` if untagged)."""
    lines: list[str] = []
    if header:
        kv = " ".join(f"{k}={header[k]}" for k in sorted(header))
        lines.append(f"#CONFIG {kv}")
    for doc in docs:
        lines.append(f"#DOC {doc.doc_id}")
        for si, sent in enumerate(doc.sentences):
            if si:
                lines.append("")
            for tok in sent:
                tag = tags.get((doc.doc_id, tok.sent_idx, tok.tok_idx))
                col = f"{tag.sense_id}/{tag.coarse_class}/{tag.method}" if tag else "-"
                lines.append(f"{tok.surface}\t{tok.lemma}\t{tok.pos}\t{col}")
        lines.append("")
    return "\n".join(lines)


def load_tagged_corpus(text: str, path: str = "<string>") \
        -> tuple[list[Document], dict[TokenKey, SenseTag]]:
    docs: list[Document] = []
    tags: dict[TokenKey, SenseTag] = {}
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
        if len(cols) != 4:
            raise ParseError(f"expected 4 tab-separated columns, got {len(cols)}",
                             path=path, line=lineno)
        surface, lemma, pos, tagcol = cols
        if cur_doc is None:
            cur_doc = Document("d1")
            docs.append(cur_doc)
        start = offset
        offset += len(surface) + 1
        tok = Token(surface, lemma, pos, cur_doc.doc_id,
                    len(cur_doc.sentences), len(cur_sent), (start, start + len(surface)))
        cur_sent.append(tok)
        if tagcol != "-":
            bits = tagcol.split("/")
            if len(bits) != 3:
                raise ParseError(f"bad tag column {tagcol!r}", path=path, line=lineno)
            tags[(tok.doc_id, tok.sent_idx, tok.tok_idx)] = SenseTag(
                tok.doc_id, tok.sent_idx, tok.tok_idx, lemma,
                lexicon_pos(pos) or "noun", bits[0], bits[1], 0.0, bits[2])
    end_sentence()
    return docs, tags


__all__ = [
    "BayesModel", "SenseTag", "FgMatch", "TokenKey", "UNFILLED", "SALIENT",
    "train_bayes", "classify_bayes", "disambiguate_background", "apply_ospd",
    "match_foreground", "apply_foreground_priority", "surviving_sense_count",
    "save_bayes_model", "load_bayes_model",
    "dump_tagged_corpus", "load_tagged_corpus",
    "DecisionList", "DecisionRule", "DLInstance", "DLParams",
    "learn_decision_list", "apply_decision_list", "instance_features",
]
