"""Command-line pipeline: ``lexboot <subcommand> [options]``.

Options may also come from a flat ``key = value`` config file given with
``--config``; command-line flags win.  Keys use the long flag name with
dashes or underscores.  Exit codes: 0 success, 1 usage error, 2 data error,
3 internal error.
"""
from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable

from . import __version__
from .bootstrap import (Thresholds, bootstrap_modified, bootstrap_original, load_lexicon,
                        save_lexicon)
from .corpus import (CorpusFormatError, bundled_seeds, load_abbreviations, load_corpus,
                     load_seed_lexicon, load_wordlist, save_corpus)
from .evaluation import (approx_randomization, correctness, count, mcnemar, micro_prf,
                         write_metrics_report, write_significance_report)
from .labeler import label_corpus, load_predictions, save_predictions
from .learners import LinearSVM, MulticlassSVM
from .multilabel import (B_GRID, P_GRID, PERCENT_GRID, T_GRID, THETA_GRID, Scheme,
                         cross_validate_predictions, grid_product,
                         load_model, save_model, tune, write_tuning_report)
from .patterns import build_index, load_index, load_syntactic_events, save_index
from .synthetic import write_synthetic

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv(value: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in str(value).split(",") if x.strip())


def _floats(value: str) -> tuple[float, ...]:
    return tuple(float(x) for x in _csv(value))


def _ints(value: str) -> tuple[int, ...]:
    return tuple(int(x) for x in _csv(value))


@dataclass(frozen=True)
class Opt:
    name: str
    type: Callable = str
    default: Any = None
    help: str = ""
    path: bool = False
    choices: tuple | None = None
    required: bool = False

    @property
    def dest(self) -> str:
        return self.name.replace("-", "_")


_SCHEME_OPTS = [
    Opt("scheme", str, "ova", "multi-label scheme", choices=("ova", "meta", "prunedsets")),
    Opt("features", _csv, ("unigram", "bigram"), "feature kinds: unigram,bigram,lexicon"),
    Opt("stopwords", str, None, "stopword file, one token per line", path=True),
    Opt("lexicon", str, None, "lexicon TSV for lexicon-entry features", path=True),
    Opt("percent", int, 100, "percentage of n-gram features kept by information gain"),
    Opt("theta", float, 0.0, "One-Versus-All decision threshold"),
    Opt("p", int, 3, "pruned sets: minimum label-set support"),
    Opt("b", int, 2, "pruned sets: minimum subset size"),
    Opt("t", float, 0.5, "pruned sets: vote threshold"),
    Opt("M", int, 10, "pruned sets: ensemble size"),
    Opt("sample-fraction", float, 0.63, "pruned sets: fraction sampled per member"),
    Opt("C", float, 1.0, "SVM regularization constant"),
    Opt("epochs", int, 20, "SGD passes over the training data"),
]

COMMANDS: dict[str, list[Opt]] = {
    "synth": [
        Opt("output", str, None, "raw corpus JSONL to write", path=True, required=True),
        Opt("docs", int, 1000, "number of documents"),
        Opt("categories", int, 3, "number of categories (1-5)"),
        Opt("noise", float, 0.15, "probability of off-category contexts"),
    ],
    "preprocess": [
        Opt("input", str, None, "raw corpus JSONL", path=True, required=True),
        Opt("output", str, None, "tagged corpus JSONL", path=True, required=True),
        Opt("abbrev", str, None, "abbreviation map TSV", path=True),
        Opt("dictionary", str, None, "dictionary word list for case restoration", path=True),
    ],
    "index": [
        Opt("corpus", str, None, "tagged corpus JSONL", path=True, required=True),
        Opt("output", str, None, "index JSONL", path=True, required=True),
        Opt("kinds", _csv, ("phrase",), "pattern kinds: word,phrase,syntactic"),
        Opt("n", int, 2, "context width in tokens"),
        Opt("syntactic", str, None, "syntactic extraction events TSV", path=True),
    ],
    "bootstrap": [
        Opt("index", str, None, "index JSONL", path=True, required=True),
        Opt("output", str, None, "lexicon TSV", path=True, required=True),
        Opt("seeds", str, None, "seed TSV (default: bundled seeds)", path=True),
        Opt("mode", str, "modified", "bootstrapping variant", choices=("original", "modified")),
        Opt("iterations", int, 10, "number of iterations"),
        Opt("min-w", int, 10, "minimum candidate frequency"),
        Opt("max-w", int, 2500, "maximum candidate frequency"),
        Opt("min-p", int, 250, "minimum pattern frequency"),
        Opt("max-p", int, 100, "maximum distinct targets per pattern"),
        Opt("per-category", int, 5, "entries added per category per iteration"),
        Opt("denominator", str, "frequency", "SemProb pattern denominator",
            choices=("frequency", "extractions")),
    ],
    "label": [
        Opt("corpus", str, None, "tagged corpus JSONL", path=True, required=True),
        Opt("output", str, None, "predictions TSV", path=True, required=True),
        Opt("lexicon", str, None, "lexicon TSV (default: seeds)", path=True),
        Opt("seeds", str, None, "seed TSV (default: bundled seeds)", path=True),
    ],
    "train": [
        Opt("corpus", str, None, "labeled training corpus JSONL", path=True, required=True),
        Opt("output", str, None, "model JSON", path=True, required=True),
        *_SCHEME_OPTS,
    ],
    "predict": [
        Opt("model", str, None, "model JSON", path=True, required=True),
        Opt("corpus", str, None, "tagged corpus JSONL", path=True, required=True),
        Opt("output", str, None, "predictions TSV", path=True, required=True),
    ],
    "evaluate": [
        Opt("predictions", str, None, "predictions TSV", path=True, required=True),
        Opt("gold", str, None, "gold corpus JSONL or label TSV", path=True, required=True),
        Opt("output", str, None, "metrics TSV", path=True),
        Opt("categories", _csv, None, "category list (default: all seen)"),
    ],
    "significance": [
        Opt("a", str, None, "predictions TSV of system A", path=True, required=True),
        Opt("b", str, None, "predictions TSV of system B", path=True, required=True),
        Opt("gold", str, None, "gold corpus JSONL or label TSV", path=True, required=True),
        Opt("output", str, None, "significance TSV", path=True),
        Opt("test", str, "both", "which test", choices=("mcnemar", "ar", "both")),
        Opt("shuffles", int, 9999, "approximate randomization shuffles"),
        Opt("categories", _csv, None, "category list (default: all seen)"),
    ],
    "tune": [
        Opt("train", str, None, "labeled training corpus JSONL", path=True, required=True),
        Opt("dev", str, None, "labeled development corpus JSONL", path=True, required=True),
        Opt("output", str, None, "tuning report TSV", path=True, required=True),
        Opt("percents", _ints, PERCENT_GRID, "percent grid"),
        Opt("thetas", _floats, THETA_GRID, "theta grid (ova)"),
        Opt("ps", _ints, P_GRID, "support grid (prunedsets)"),
        Opt("bs", _ints, B_GRID, "subset size grid (prunedsets)"),
        Opt("ts", _floats, T_GRID, "vote threshold grid (prunedsets)"),
        *[o for o in _SCHEME_OPTS if o.name not in ("percent", "theta", "p", "b", "t")],
    ],
    "cv": [
        Opt("base", str, None, "labeled base training corpus JSONL", path=True, required=True),
        Opt("pool", str, None, "labeled evaluation pool JSONL", path=True, required=True),
        Opt("output", str, None, "metrics TSV", path=True, required=True),
        Opt("predictions", str, None, "also write pooled fold predictions", path=True),
        Opt("k", int, 5, "number of folds"),
        *_SCHEME_OPTS,
    ],
}

_GLOBAL = [
    Opt("config", str, None, "config file of key = value lines", path=True),
    Opt("seed", int, 0, "random seed"),
    Opt("threads", int, 1, "worker thread limit (work runs on one thread)"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lexboot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lexboot {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, opts in COMMANDS.items():
        sp = sub.add_parser(name)
        for opt in _GLOBAL + opts:
            sp.add_argument(f"--{opt.name}", dest=opt.dest, type=opt.type, default=None,
                            choices=opt.choices, help=opt.help)
    return parser


def _read_config(path) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    cp.optionxform = str
    stripped = text.lstrip()
    if not stripped.startswith("["):
        text = "[lexboot]\n" + text
    try:
        cp.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise UsageError(f"config file {path}: {exc}") from None
    out: dict[str, str] = {}
    for section in cp.sections():
        for key, value in cp.items(section):
            out[key.replace("-", "_")] = value
    return out


def resolve(command: str, args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, config file and flags (in increasing priority)."""
    opts = _GLOBAL + COMMANDS[command]
    config: dict[str, str] = {}
    if args.config is not None:
        config = _read_config(args.config)
        known = {o.dest for cmd in COMMANDS.values() for o in cmd} | {o.dest for o in _GLOBAL}
        unknown = sorted(set(config) - known)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    values: dict[str, Any] = {}
    for opt in opts:
        flag = getattr(args, opt.dest)
        if flag is not None:
            values[opt.dest] = flag
        elif opt.dest in config and opt.dest != "config":
            raw = config[opt.dest]
            try:
                val = opt.type(raw)
            except (TypeError, ValueError):
                raise UsageError(f"config key {opt.name!r}: invalid value {raw!r}") from None
            if opt.choices and val not in opt.choices:
                raise UsageError(f"config key {opt.name!r}: {raw!r} not in {opt.choices}")
            values[opt.dest] = val
        else:
            values[opt.dest] = opt.default
        if opt.required and values[opt.dest] is None:
            raise UsageError(f"missing required option --{opt.name}")
    if values["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    return values


def config_hash(command: str, values: dict[str, Any]) -> str:
    """Hash of the non-path settings, so relocated runs share a hash."""
    paths = {o.dest for o in _GLOBAL + COMMANDS[command] if o.path}
    settings = {k: v for k, v in values.items() if k not in paths and k != "threads"}
    blob = json.dumps([command, settings], sort_keys=True, default=list)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def header_line(command: str, values: dict[str, Any]) -> str:
    return f"lexboot {__version__} {command} config={config_hash(command, values)}"


# --- helpers ----------------------------------------------------------------------------

def _seeds(path):
    return bundled_seeds() if path is None else load_seed_lexicon(path)


def _gold(path) -> dict[str, frozenset[str]]:
    if str(path).endswith((".jsonl", ".json")):
        docs = load_corpus(path)
        missing = [d.id for d in docs if d.labels is None]
        if missing:
            raise CorpusFormatError(f"document {missing[0]!r} has no 'labels' field", path, 0)
        return {d.id: d.labels for d in docs}
    return load_predictions(path)


def _scheme(v: dict[str, Any]) -> Scheme:
    lexicon = load_lexicon(v["lexicon"]) if v.get("lexicon") else None
    include = tuple(v["features"])
    if lexicon is not None and "lexicon" not in include:
        include += ("lexicon",)
    if "lexicon" in include and lexicon is None:
        raise UsageError("feature kind 'lexicon' needs --lexicon")
    stop = load_wordlist(v["stopwords"]) if v.get("stopwords") else frozenset()
    return Scheme(v["scheme"], LinearSVM(v["C"], v["epochs"], v["seed"]),
                  MulticlassSVM(v["C"], v["epochs"], v["seed"]), frozenset(stop), include,
                  lexicon, None, v["M"], v["sample_fraction"], v["seed"])


def _scheme_params(v: dict[str, Any]) -> dict[str, Any]:
    keys = {"ova": ("percent", "theta"), "meta": ("percent",),
            "prunedsets": ("percent", "p", "b", "t")}[v["scheme"]]
    return {k: v[k] for k in keys}


def _print_prf(counts) -> None:
    p, r, f = micro_prf(counts)
    print(f"P={100 * p:.2f} R={100 * r:.2f} F={100 * f:.2f}")


# --- subcommands ------------------------------------------------------------------------

def cmd_synth(v, head):
    write_synthetic(v["output"], v["docs"], v["categories"], v["seed"], v["noise"])


def cmd_preprocess(v, head):
    abbrev = load_abbreviations(v["abbrev"]) if v["abbrev"] else None
    dictionary = load_wordlist(v["dictionary"]) if v["dictionary"] else None
    docs = load_corpus(v["input"], abbrev, dictionary)
    save_corpus(sorted(docs, key=lambda d: d.id), v["output"], {"header": head})


def cmd_index(v, head):
    docs = load_corpus(v["corpus"])
    events = load_syntactic_events(v["syntactic"]) if v["syntactic"] else None
    index = build_index(docs, v["kinds"], v["n"], events)
    save_index(index, v["output"], {"header": head})


def cmd_bootstrap(v, head):
    index = load_index(v["index"])
    seeds = _seeds(v["seeds"])
    if v["mode"] == "original":
        lex = bootstrap_original(seeds, index, v["iterations"], v["per_category"])
    else:
        th = Thresholds(v["min_w"], v["max_w"], v["min_p"], v["max_p"])
        lex = bootstrap_modified(seeds, index, v["iterations"], th, v["per_category"],
                                 v["denominator"])
    save_lexicon(lex, v["output"], head)


def cmd_label(v, head):
    lexicon: Any = load_lexicon(v["lexicon"]) if v["lexicon"] else _seeds(v["seeds"])
    save_predictions(label_corpus(load_corpus(v["corpus"]), lexicon), v["output"], head)


def cmd_train(v, head):
    scheme = _scheme(v)
    model = scheme.fit(load_corpus(v["corpus"]), _scheme_params(v))
    save_model(model, v["output"], head)


def cmd_predict(v, head):
    model = load_model(v["model"])
    docs = sorted(load_corpus(v["corpus"]), key=lambda d: d.id)
    save_predictions(Scheme().predict(model, docs), v["output"], head)


def cmd_evaluate(v, head):
    preds, gold = load_predictions(v["predictions"]), _gold(v["gold"])
    counts = count(preds, gold, v["categories"])
    if v["output"]:
        write_metrics_report(counts, v["output"], head)
    _print_prf(counts)


def cmd_significance(v, head):
    a, b, gold = load_predictions(v["a"]), load_predictions(v["b"]), _gold(v["gold"])
    cats = v["categories"] or sorted({c for lab in (a, b, gold) for s in lab.values() for c in s})
    count(a, gold, cats), count(b, gold, cats)  # checks document coverage
    rows = []
    if v["test"] in ("mcnemar", "both"):
        stat, p = mcnemar(correctness(a, gold, cats), correctness(b, gold, cats))
        rows.append((v["a"], v["b"], "mcnemar", stat, p))
    if v["test"] in ("ar", "both"):
        p = approx_randomization(a, b, gold, v["shuffles"], v["seed"], cats)
        delta = abs(micro_prf(count(a, gold, cats))[2] - micro_prf(count(b, gold, cats))[2])
        rows.append((v["a"], v["b"], "ar", delta, p))
    if v["output"]:
        write_significance_report(rows, v["output"], head)
    for _, _, test, stat, p in rows:
        print(f"{test}\tstatistic={stat:.4f}\tp={p:.6f}")


def cmd_tune(v, head):
    scheme = _scheme({**v, "percent": 100, "theta": 0.0, "p": 3, "b": 2, "t": 0.5})
    if v["scheme"] == "ova":
        grid = grid_product(percent=v["percents"], theta=v["thetas"])
    elif v["scheme"] == "meta":
        grid = grid_product(percent=v["percents"])
    else:
        grid = grid_product(b=v["bs"], p=v["ps"], percent=v["percents"], t=v["ts"])
    best, rows = tune(grid, load_corpus(v["train"]), load_corpus(v["dev"]), scheme)
    write_tuning_report(rows, v["output"], head)
    print("best\t" + json.dumps(best, sort_keys=True))


def cmd_cv(v, head):
    scheme = _scheme(v)
    base, pool = load_corpus(v["base"]), load_corpus(v["pool"])
    params = _scheme_params(v)
    preds = cross_validate_predictions(base, pool, v["k"], scheme, params, v["seed"])
    if v["predictions"]:
        save_predictions(preds, v["predictions"], head)
    cats = sorted({c for d in base + pool for c in (d.labels or ())})
    counts = count(preds, {d.id: frozenset(d.labels or ()) for d in pool}, cats)
    write_metrics_report(counts, v["output"], head)
    _print_prf(counts)


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        values = resolve(args.command, args)
        HANDLERS[args.command](values, header_line(args.command, values))
    except UsageError as exc:
        print(f"lexboot: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusFormatError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"lexboot: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"lexboot: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
