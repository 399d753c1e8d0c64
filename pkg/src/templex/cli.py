"""Single command-line entry point for the extraction engine.

Subcommands: validate, tune, wsd, extract, kwic, patterns.  Every run is a
deterministic function of its input files and flags; the effective semantic
parameters are echoed into each output's provenance.  Exit codes: 0 success,
1 diagnostics with errors, 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

from . import bg_lexicon as bgmod
from . import extract as exmod
from . import fg_lexicon as fgmod
from . import ontology as ontomod
from . import textpipe
from . import tuner as tunemod
from . import workbench
from . import wsd as wsdmod
from .errors import CycleError, LexiconError, ParseError


@dataclass
class RunConfig:
    ontology: str | None = None
    fg_lexicon: str | None = None
    bg_lexicon: str | None = None
    collapse_map: str | None = None
    corpus: str | None = None
    tuned_lexicon: str | None = None
    output: str | None = None
    window: int = 10
    alpha: float = 0.1
    min_occurrences: int = 5
    top_k: int = 10
    ospd: bool = True
    passive_implicature: bool = True
    order: str = "bg-first"  # or fg-first
    jobs: int = 1
    raw: bool = False
    lang: str = "en"

    def validate(self) -> None:
        for name in ("ontology", "fg_lexicon", "bg_lexicon", "collapse_map",
                     "corpus", "tuned_lexicon"):
            path = getattr(self, name)
            if path is not None and not os.path.exists(path):
                raise OSError(f"{name.replace('_', '-')} file not found: {path}")
        if self.window <= 0 or self.alpha <= 0 or self.min_occurrences <= 0 \
                or self.top_k <= 0 or self.jobs <= 0:
            raise ValueError("window, alpha, min-occurrences, top-k and jobs "
                             "must be positive")
        if self.order not in ("bg-first", "fg-first"):
            raise ValueError(f"bad pipeline order {self.order!r}")

    def echo(self) -> dict:
        # parameters that shape the result; deliberately excludes jobs,
        # which must never change any output byte
        return {
            "window": self.window, "alpha": self.alpha,
            "min_occurrences": self.min_occurrences, "top_k": self.top_k,
            "ospd": str(self.ospd).lower(),
            "passive_implicature": str(self.passive_implicature).lower(),
            "order": self.order, "lang": self.lang,
        }


_BOOL_KEYS = {"ospd", "passive_implicature", "raw"}
_INT_KEYS = {"window", "min_occurrences", "top_k", "jobs"}
_FLOAT_KEYS = {"alpha"}


def load_config_file(path: str) -> dict:
    """Line-oriented `key = value`; `#` comments; flags override these."""
    values: dict = {}
    names = {f.name for f in fields(RunConfig)}
    with open(path, encoding="utf-8") as fh:
        for lineno, rawline in enumerate(fh, start=1):
            line = rawline.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected `key = value`", path=path, line=lineno)
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key not in names:
                raise ParseError(f"unknown config key {key!r}", path=path, line=lineno)
            if key in _BOOL_KEYS:
                if value not in ("on", "off", "true", "false"):
                    raise ParseError(f"bad boolean {value!r}", path=path, line=lineno)
                values[key] = value in ("on", "true")
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="templex",
        description="Two-tier-lexicon template extraction and lexicographer tooling.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, needs_corpus: bool = True):
        p.add_argument("--config", help="config file (key = value lines)")
        p.add_argument("--ontology")
        p.add_argument("--fg-lexicon", dest="fg_lexicon")
        p.add_argument("--bg-lexicon", dest="bg_lexicon")
        p.add_argument("--collapse-map", dest="collapse_map")
        p.add_argument("--tuned-lexicon", dest="tuned_lexicon")
        if needs_corpus:
            p.add_argument("--corpus")
            p.add_argument("--raw", action="store_true", default=None,
                           help="corpus is raw text, not vertical format")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--window", type=int)
        p.add_argument("--alpha", type=float)
        p.add_argument("--min-occurrences", dest="min_occurrences", type=int)
        p.add_argument("--top-k", dest="top_k", type=int)
        p.add_argument("--ospd", choices=("on", "off"))
        p.add_argument("--passive-implicature", dest="passive_implicature",
                       choices=("on", "off"))
        p.add_argument("--order", choices=("bg-first", "fg-first"))
        p.add_argument("--jobs", type=int)
        p.add_argument("--lang")

    common(sub.add_parser("validate", help="check ontology and lexicons"),
           needs_corpus=False)
    common(sub.add_parser("tune", help="emit a corpus-tuned background lexicon"))
    common(sub.add_parser("wsd", help="emit a sense-tagged corpus"))
    common(sub.add_parser("extract", help="run the full pipeline to JSON-Lines"))

    k = sub.add_parser("kwic", help="keyword-in-context concordance")
    common(k)
    k.add_argument("--query", required=True)
    k.add_argument("--width", type=int, default=5)
    k.add_argument("--tagged", help="sense-tagged corpus (4-column vertical)")
    k.add_argument("--tsv", action="store_true")

    pr = sub.add_parser("patterns", help="pattern-frequency report for a lemma")
    common(pr)
    pr.add_argument("--target", required=True)
    pr.add_argument("--top", type=int, default=20)
    pr.add_argument("--tagged", help="sense-tagged corpus (4-column vertical)")
    pr.add_argument("--tsv", action="store_true")
    return parser


def _build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, value in load_config_file(args.config).items():
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is None:
            continue
        if f.name in ("ospd", "passive_implicature"):
            setattr(cfg, f.name, val == "on")
        else:
            setattr(cfg, f.name, val)
    cfg.validate()
    return cfg


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write_out(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pmap(fn, items, jobs: int) -> list:
    """Document-parallel map with results in input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n.replace("_", "-") for n in names if getattr(cfg, n) is None]
    if missing:
        raise OSError(f"missing required input(s): {', '.join('--' + m for m in missing)}")


def _load_ontology(cfg: RunConfig) -> ontomod.Ontology:
    return ontomod.load_ontology(_read(cfg.ontology), cfg.ontology)


def _load_corpus(cfg: RunConfig) -> list[textpipe.Document]:
    text = _read(cfg.corpus)
    doc_id = os.path.splitext(os.path.basename(cfg.corpus))[0]
    docs = textpipe.read_corpus(text, raw=cfg.raw, doc_id=doc_id, path=cfg.corpus)
    if cfg.raw:
        docs = [textpipe.tag_fallback(d) for d in docs]
    return docs


def _load_background(cfg: RunConfig, onto: ontomod.Ontology):
    """Collapsed background lexicon, or the tuned view when one is given."""
    if cfg.tuned_lexicon:
        tuned = tunemod.load_tuned_lexicon(_read(cfg.tuned_lexicon), cfg.tuned_lexicon)
        return tunemod.apply_tuning(tuned)
    _require(cfg, "bg_lexicon")
    bg = bgmod.load_bg_lexicon(_read(cfg.bg_lexicon), cfg.bg_lexicon)
    problems = bgmod.validate_bg(bg, onto)
    if problems:
        raise LexiconError("; ".join(problems))
    if cfg.collapse_map:
        cmap = bgmod.load_collapse_map(_read(cfg.collapse_map), cfg.collapse_map)
    else:
        cmap = bgmod.default_collapse_map()
    return bgmod.collapse(bg, cmap, onto)


def _tag_corpus(cfg: RunConfig, docs, bg):
    model = wsdmod.train_bayes(docs, bg, cfg.window, cfg.alpha)
    tag_dicts = _pmap(lambda d: wsdmod.disambiguate_background(model, [d], bg),
                      docs, cfg.jobs)
    tags: dict = {}
    for td in tag_dicts:
        tags.update(td)
    if cfg.ospd:
        tags = wsdmod.apply_ospd(tags, bg)
    return model, tags


def _unambiguous_tags(docs, bg):
    """Tags from coarse-unambiguous lemmas only (the fg-first pipeline order)."""
    tags: dict = {}
    for doc in docs:
        for tok in doc.tokens():
            pos = textpipe.lexicon_pos(tok.pos)
            if pos is None:
                continue
            entries = bg.entries(tok.lemma, pos)
            if len(entries) == 1:
                s = entries[0]
                tags[(doc.doc_id, tok.sent_idx, tok.tok_idx)] = wsdmod.SenseTag(
                    doc.doc_id, tok.sent_idx, tok.tok_idx, tok.lemma, pos,
                    s.sense_id, s.coarse_class, 0.0, "unambiguous")
    return tags


def _match(cfg: RunConfig, analyses, fg, tags, onto, bg):
    results = _pmap(
        lambda a: wsdmod.match_foreground(
            [a], fg, tags, onto, bg, lang=cfg.lang,
            passive_lone=cfg.passive_implicature, window=cfg.window),
        analyses, cfg.jobs)
    matches, diagnostics = [], []
    for m, d in results:
        matches.extend(m)
        diagnostics.extend(d)
    return matches, diagnostics


# ------------------------------------------------------------ subcommands

def _cmd_validate(cfg: RunConfig, args) -> int:
    _require(cfg, "ontology", "fg_lexicon")
    onto = _load_ontology(cfg)
    fg = fgmod.load_fg_lexicon(_read(cfg.fg_lexicon), cfg.fg_lexicon)
    diags = fgmod.validate(fg, onto)
    if cfg.bg_lexicon:
        bg = bgmod.load_bg_lexicon(_read(cfg.bg_lexicon), cfg.bg_lexicon)
        for problem in bgmod.validate_bg(bg, onto):
            diags.append(fgmod.Diagnostic("error", cfg.bg_lexicon, problem))
    out = "".join(f"{d}\n" for d in diags)
    out += f"{len(diags)} diagnostic(s)\n"
    _write_out(cfg, out)
    return 1 if any(d.severity == "error" for d in diags) else 0


def _cmd_tune(cfg: RunConfig, args) -> int:
    _require(cfg, "ontology", "corpus")
    onto = _load_ontology(cfg)
    bg = _load_background(cfg, onto)
    docs = _load_corpus(cfg)
    params = tunemod.TuneParams(cfg.min_occurrences, cfg.window, cfg.alpha, cfg.top_k)
    corpus_id = os.path.basename(cfg.corpus)
    tuned = tunemod.tune(bg, docs, params, corpus_id=corpus_id, use_ospd=cfg.ospd)
    _write_out(cfg, tunemod.save_tuned_lexicon(tuned))
    return 0


def _pipeline(cfg: RunConfig, docs, analyses, fg, onto, bg):
    """Tags and matches under the configured pipeline order.

    bg-first feeds classifier tags into the matcher; fg-first matches on
    coarse-unambiguous tags alone, then classifies the rest.
    """
    if cfg.order == "fg-first":
        matches, diags = _match(cfg, analyses, fg, _unambiguous_tags(docs, bg),
                                onto, bg)
        _, tags = _tag_corpus(cfg, docs, bg)
    else:
        _, tags = _tag_corpus(cfg, docs, bg)
        matches, diags = _match(cfg, analyses, fg, tags, onto, bg)
    return tags, matches, diags


def _cmd_wsd(cfg: RunConfig, args) -> int:
    _require(cfg, "ontology", "corpus")
    onto = _load_ontology(cfg)
    bg = _load_background(cfg, onto)
    docs = _load_corpus(cfg)
    if cfg.fg_lexicon:
        fg = fgmod.load_fg_lexicon(_read(cfg.fg_lexicon), cfg.fg_lexicon)
        analyses = _pmap(textpipe.analyze, docs, cfg.jobs)
        tags, matches, _ = _pipeline(cfg, docs, analyses, fg, onto, bg)
        tags = wsdmod.apply_foreground_priority(tags, matches)
    else:
        _, tags = _tag_corpus(cfg, docs, bg)
    _write_out(cfg, wsdmod.dump_tagged_corpus(docs, tags, cfg.echo()))
    return 0


def _cmd_extract(cfg: RunConfig, args) -> int:
    _require(cfg, "ontology", "fg_lexicon", "corpus")
    onto = _load_ontology(cfg)
    fg = fgmod.load_fg_lexicon(_read(cfg.fg_lexicon), cfg.fg_lexicon)
    diags = fgmod.validate(fg, onto)
    if any(d.severity == "error" for d in diags):
        for d in diags:
            print(d, file=sys.stderr)
        return 1
    bg = _load_background(cfg, onto)
    docs = _load_corpus(cfg)
    analyses = _pmap(textpipe.analyze, docs, cfg.jobs)
    tags, matches, _ = _pipeline(cfg, docs, analyses, fg, onto, bg)
    instances = exmod.fill_templates(matches, tags, analyses, onto, fg, cfg.lang)
    header = json.dumps({"config": cfg.echo()}, ensure_ascii=False)
    _write_out(cfg, header + "\n" + exmod.write_output(instances))
    return 0


def _load_query_corpus(cfg: RunConfig, args):
    if getattr(args, "tagged", None):
        docs, tags = wsdmod.load_tagged_corpus(_read(args.tagged), args.tagged)
        return docs, tags
    _require(cfg, "corpus")
    return _load_corpus(cfg), None


def _cmd_kwic(cfg: RunConfig, args) -> int:
    docs, tags = _load_query_corpus(cfg, args)
    query = workbench.parse_query(args.query)
    lines = workbench.kwic(docs, tags, query, args.width)
    out = f"# kwic query={args.query!r} width={args.width} matches={len(lines)}\n"
    out += workbench.format_kwic(lines, tsv=args.tsv)
    _write_out(cfg, out)
    return 0


def _cmd_patterns(cfg: RunConfig, args) -> int:
    docs, tags = _load_query_corpus(cfg, args)
    analyses = _pmap(textpipe.analyze, docs, cfg.jobs)
    entries = workbench.pattern_report(analyses, tags, args.target,
                                       window=cfg.window, top=args.top)
    out = (f"# patterns target={args.target} top={args.top} "
           f"window={cfg.window}\n")
    out += workbench.format_report(entries, tsv=args.tsv)
    _write_out(cfg, out)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "tune": _cmd_tune,
    "wsd": _cmd_wsd,
    "extract": _cmd_extract,
    "kwic": _cmd_kwic,
    "patterns": _cmd_patterns,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        return _COMMANDS[args.command](cfg, args)
    except (ParseError, CycleError, LexiconError, ValueError, KeyError, OSError) as exc:
        print(f"templex: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
