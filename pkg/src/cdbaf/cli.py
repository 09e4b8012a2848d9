"""Command-line interface.

Exit codes: 0 success (a "no" answer is still a success), 2 unreadable
input, 3 budget exceeded, 4 route or verification mismatch, 5 unknown label.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Mapping

from . import __version__
from .errors import BudgetExceeded, FormatError
from .framework import (
    FactArg,
    NamedArg,
    Setaf,
    argument_names,
    build_framework,
    from_apx,
    preprocess,
    rename,
    strip_self_attacks,
    to_apx,
)
from .model import ConstrainedDatabase, Fact
from .parser import SourceError, parse_document, serialize_instance
from .reductions import (
    parse_dimacs,
    parse_qdimacs,
    profile_from_string,
    qbf_to_instance,
    random_instance,
    sat_to_instance,
)
from .repairs import (
    DEFAULT_MAX_FACTS,
    all_repairs,
    check_equivalence,
    repairs_via_argumentation,
)
from .semantics import DEFAULT_MAX_ARGS, Semantics, extensions

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_MISMATCH = 4
EXIT_LABEL = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


# ---------------------------------------------------------------- loading


class Loaded:
    def __init__(self, cdb: ConstrainedDatabase | None, labels: Mapping[str, Fact], setaf: Setaf | None = None):
        self.cdb = cdb
        self.labels = dict(labels)
        self.setaf = setaf


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None


def load(path: str) -> Loaded:
    text = _read(path)
    suffix = Path(path).suffix.lower()
    try:
        if suffix == ".apx":
            return Loaded(None, {}, from_apx(text))
        if suffix in (".cnf", ".dimacs"):
            r = sat_to_instance(parse_dimacs(text))
            return Loaded(r.cdb, r.labels)
        if suffix in (".qdimacs", ".qcnf"):
            r = qbf_to_instance(parse_qdimacs(text))
            return Loaded(r.cdb, r.labels)
        doc = parse_document(text)
        return Loaded(doc.cdb, doc.labels)
    except SourceError as exc:
        raise CliError(EXIT_PARSE, f"{path}:{exc}") from None
    except (FormatError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None


def _need_db(loaded: Loaded, path: str) -> ConstrainedDatabase:
    if loaded.cdb is None:
        raise CliError(EXIT_PARSE, f"{path}: expected a database instance, not a framework")
    return loaded.cdb


def _namer(labels: Mapping[str, Fact]):
    by_fact: dict[Fact, str] = {}
    for lab, f in sorted(labels.items()):
        by_fact.setdefault(f, lab)
    return lambda f: by_fact.get(f, str(f))


def _fact_list(facts, name) -> list[str]:
    return sorted(name(f) for f in facts)


def _emit(args, payload: dict, pretty: str):
    if args.format == "json":
        out = json.dumps({"command": args.command, "payload": payload}, indent=2, sort_keys=True)
    else:
        out = pretty
    _write(args, out)


def _write(args, out: str):
    if not out.endswith("\n"):
        out += "\n"
    target = getattr(args, "output", None)
    if target:
        Path(target).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


def _set_str(items) -> str:
    return "{" + ", ".join(items) + "}"


# ---------------------------------------------------------------- commands


def cmd_repairs(args) -> int:
    loaded = load(args.file)
    cdb = _need_db(loaded, args.file)
    name = _namer(loaded.labels)
    routes = ["oracle", "argumentation"] if args.route == "both" else [args.route]
    found = {}
    for r in routes:
        if r == "oracle":
            found[r] = all_repairs(cdb, args.max_facts)
        else:
            found[r] = repairs_via_argumentation(cdb, args.max_args, use_preprocess=args.preprocess)
    results = list(found.values())
    agree = all(x.as_set() == results[0].as_set() for x in results)
    reps = results[0]
    lists = [_fact_list(r, name) for r in reps]
    payload = {"route": args.route, "agree": agree}
    if args.exists:
        payload["nonempty_repair"] = any(reps)
        pretty = f"nonempty repair: {'yes' if any(reps) else 'no'} (route {args.route})"
    else:
        payload["repairs"] = lists
        pretty = "\n".join(_set_str(x) for x in lists)
        pretty = f"{len(lists)} repair(s) via {args.route}\n{pretty}"
    if not agree:
        payload["by_route"] = {r: [_fact_list(x, name) for x in found[r]] for r in found}
        pretty += "\nMISMATCH between routes:\n" + "\n".join(
            f"  {r}: " + "; ".join(_set_str(_fact_list(x, name)) for x in found[r]) for r in found
        )
    _emit(args, payload, pretty)
    return EXIT_OK if agree else EXIT_MISMATCH


def _framework_payload(setaf: Setaf, names: Mapping) -> dict:
    return {
        "arguments": [names[a] for a in setaf.sorted_arguments()],
        "attacks": [
            {
                "source": sorted(names[a] for a in att.source),
                "target": names[att.target],
                "origin": list(setaf.origins.get(att, ())),
            }
            for att in setaf.sorted_attacks()
        ],
    }


def cmd_translate(args) -> int:
    loaded = load(args.file)
    removed: list[str] = []
    if loaded.setaf is not None:
        setaf = loaded.setaf
    else:
        setaf = build_framework(loaded.cdb, force_setaf=args.force_setaf)
        if args.preprocess:
            setaf, gone = preprocess(setaf)
            removed = _fact_list(gone, _namer(loaded.labels))
    if args.strip_self_attacks:
        setaf = strip_self_attacks(setaf)
    names = argument_names(setaf, loaded.labels)
    if args.figure:
        from .plotting import draw_framework

        draw_framework(setaf, args.figure, loaded.labels, title=Path(args.file).name)
    if args.format == "json":
        payload = _framework_payload(setaf, names)
        payload["plain"] = setaf.is_plain()
        payload["removed"] = removed
        _emit(args, payload, "")
        return EXIT_OK
    text = to_apx(setaf, loaded.labels)
    if removed:
        text = "% removed by preprocessing: " + ", ".join(removed) + "\n" + text
    if args.format == "pretty":
        lines = [f"{len(setaf.arguments)} arguments, {len(setaf.attacks)} attacks"]
        for att in setaf.sorted_attacks():
            src = sorted(names[a] for a in att.source)
            lhs = src[0] if len(src) == 1 else _set_str(src)
            lines.append(f"  {lhs} -> {names[att.target]}")
        if removed:
            lines.append("removed by preprocessing: " + ", ".join(removed))
        text = "\n".join(lines)
    _write(args, text)
    return EXIT_OK


def _resolve_fact(loaded: Loaded, label: str) -> Fact:
    lab = label[1:] if label.startswith("@") else label
    if lab in loaded.labels:
        return loaded.labels[lab]
    for f in loaded.cdb.facts:
        if str(f) == label:
            return f
    raise CliError(EXIT_LABEL, f"unknown fact label {label!r}")


def cmd_accept(args) -> int:
    loaded = load(args.file)
    task = args.task
    payload: dict = {"label": args.label, "task": task}
    if task in ("SR", "AR"):
        cdb = _need_db(loaded, args.file)
        fact = _resolve_fact(loaded, args.label)
        if args.route == "oracle":
            reps = all_repairs(cdb, args.max_facts)
        else:
            reps = repairs_via_argumentation(cdb, args.max_args)
        pick = any if task == "SR" else all
        answer = pick(fact in r for r in reps)
        payload.update(route=args.route, answer=answer, fact=str(fact))
        pretty = f"{task}({args.label}) = {str(answer).lower()} (route {args.route})"
    else:
        mode, _, sem_name = task.partition("-")
        if mode not in ("cred", "skep"):
            raise CliError(EXIT_PARSE, f"unknown task {task!r}; use SR, AR, cred-<sem> or skep-<sem>")
        try:
            sem = Semantics.parse(sem_name)
        except ValueError:
            raise CliError(EXIT_PARSE, f"unknown semantics {sem_name!r}") from None
        if loaded.setaf is not None:
            setaf = loaded.setaf
            arg = NamedArg(args.label)
            if arg not in setaf.arguments:
                raise CliError(EXIT_LABEL, f"unknown argument {args.label!r}")
        else:
            setaf = build_framework(loaded.cdb)
            arg = FactArg(_resolve_fact(loaded, args.label))
        exts = extensions(setaf, sem, args.max_args)
        pick = any if mode == "cred" else all
        answer = pick(arg in e.arguments for e in exts)
        payload.update(semantics=sem.value, answer=answer, extensions=len(exts))
        pretty = f"{mode}_{sem.value}({args.label}) = {str(answer).lower()}"
    _emit(args, payload, pretty)
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.kind in ("sat", "qbf"):
        if not args.input:
            raise CliError(EXIT_PARSE, f"generate {args.kind} needs an input file")
        text = _read(args.input)
        try:
            if args.kind == "sat":
                r = sat_to_instance(parse_dimacs(text), args.mode)
            else:
                r = qbf_to_instance(parse_qdimacs(text))
        except (FormatError, ValueError) as exc:
            raise CliError(EXIT_PARSE, f"{args.input}: {exc}") from None
        text_out = serialize_instance(r.cdb, r.labels)
        distinguished = _namer(r.labels)(r.distinguished)
    else:
        try:
            profile = profile_from_string(args.profile)
        except ValueError as exc:
            raise CliError(EXIT_PARSE, str(exc)) from None
        cdb = random_instance(args.seed, profile, args.size)
        text_out = serialize_instance(cdb)
        distinguished = None
    if args.output:
        Path(args.output).write_text(text_out, encoding="utf-8")
        if distinguished:
            print(distinguished)
    else:
        sys.stdout.write(text_out)
        if distinguished:
            sys.stderr.write(f"distinguished: {distinguished}\n")
    return EXIT_OK


def _apx_matches(cdb: ConstrainedDatabase, labels, apx_text: str) -> bool:
    built = build_framework(cdb)
    names = argument_names(built, labels)
    expected = rename(built, {a: NamedArg(n) for a, n in names.items()})
    return from_apx(apx_text) == expected


def _verify_row(name: str, cdb: ConstrainedDatabase, labels, args, apx: Path | None) -> dict:
    rep = check_equivalence(cdb, args.max_args, args.max_facts)
    row = {
        "instance": name,
        "family": rep.family,
        "profile": rep.profile,
        "facts": rep.facts,
        "arguments": rep.arguments,
        "repairs": len(rep.repairs),
    }
    for c in rep.checks:
        row[c.name] = c.status
    ok = rep.ok
    if apx is not None:
        try:
            same = _apx_matches(cdb, labels, apx.read_text(encoding="utf-8"))
        except FormatError:
            same = False
        row["apx"] = "ok" if same else "MISMATCH"
        ok = ok and same
    row["ok"] = ok
    return row


def cmd_verify(args) -> int:
    rows = []
    if args.corpus:
        root = Path(args.corpus)
        files = sorted(root.glob("*.cdb")) if root.is_dir() else [root]
        if not files:
            raise CliError(EXIT_PARSE, f"no .cdb files in {root}")
        for path in files:
            loaded = load(str(path))
            apx = path.with_suffix(".apx")
            rows.append(_verify_row(path.name, loaded.cdb, loaded.labels, args, apx if apx.exists() else None))
    profiles = ["fd", "id", "dc", "lav", "fd+id", "dc+lav", "fd+dc", "id+lav", "fd+id+dc+lav"]
    for k in range(args.random):
        seed = args.seed + k
        prof = profiles[k % len(profiles)]
        cdb = random_instance(seed, profile_from_string(prof), size=1 + seed % args.size)
        rows.append(_verify_row(f"random-{seed}-{prof}", cdb, {}, args, None))
    columns = ["instance", "family", "profile", "facts", "arguments", "repairs",
               "naive", "pref", "stab", "unique", "preprocess", "apx", "ok"]
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "verify.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=columns, restval="")
            w.writeheader()
            w.writerows(rows)
        from .plotting import plot_verification

        plot_verification(rows, out / "verify.png")
    failed = [r for r in rows if not r["ok"]]
    payload = {"instances": len(rows), "failed": [r["instance"] for r in failed], "rows": rows}
    lines = []
    for r in rows:
        detail = " ".join(f"{c}={r[c]}" for c in columns[6:-1] if c in r)
        lines.append(f"{'PASS' if r['ok'] else 'FAIL'} {r['instance']} [{r['profile']}] {detail}")
    lines.append(f"{len(rows) - len(failed)}/{len(rows)} passed")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if not failed else EXIT_MISMATCH


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdbaf", description="Subset repairs of inconsistent databases via argumentation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def budgets(sp):
        sp.add_argument("--max-args", type=int, default=DEFAULT_MAX_ARGS, help="largest framework enumerated (default %(default)s)")
        sp.add_argument("--max-facts", type=int, default=DEFAULT_MAX_FACTS, help="largest database enumerated directly (default %(default)s)")

    sp = sub.add_parser("repairs", help="list the subset repairs")
    sp.add_argument("file")
    sp.add_argument("--route", choices=["oracle", "argumentation", "both"], default="argumentation")
    sp.add_argument("--exists", action="store_true", help="only report whether a non-empty repair exists")
    sp.add_argument("--preprocess", action="store_true", help="prune unsupported facts before enumerating")
    sp.add_argument("--format", choices=["pretty", "json"], default="pretty")
    budgets(sp)
    sp.set_defaults(func=cmd_repairs)

    sp = sub.add_parser("translate", help="print the argumentation framework")
    sp.add_argument("file")
    sp.add_argument("--force-setaf", action="store_true")
    sp.add_argument("--preprocess", action="store_true")
    sp.add_argument("--strip-self-attacks", action="store_true")
    sp.add_argument("--format", choices=["apx", "json", "pretty"], default="apx")
    sp.add_argument("-o", "--output")
    sp.add_argument("--figure", help="also draw the framework to this image file")
    sp.set_defaults(func=cmd_translate)

    sp = sub.add_parser("accept", help="decide acceptance of one fact or argument")
    sp.add_argument("file")
    sp.add_argument("label", help="@label, label, or the fact as printed, e.g. T(a,b)")
    sp.add_argument("task", help="SR, AR, or cred-<sem> / skep-<sem> with sem in cf,naive,adm,pref,stab")
    sp.add_argument("--route", choices=["oracle", "argumentation"], default="argumentation")
    sp.add_argument("--format", choices=["pretty", "json"], default="pretty")
    budgets(sp)
    sp.set_defaults(func=cmd_accept)

    sp = sub.add_parser("generate", help="write an instance from a formula or a seed")
    sp.add_argument("kind", choices=["sat", "qbf", "random"])
    sp.add_argument("input", nargs="?", help="DIMACS / QDIMACS file for sat / qbf")
    sp.add_argument("--mode", choices=["SR", "REP"], default="SR")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--profile", default="fd+id+dc+lav")
    sp.add_argument("--size", type=int, default=6)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("verify", help="check repairs against every semantics over a corpus")
    sp.add_argument("corpus", nargs="?", help="directory of .cdb files (sibling .apx files are compared too)")
    sp.add_argument("--random", type=int, default=0, help="also check this many random instances")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--size", type=int, default=7, help="random instances get 1..size facts")
    sp.add_argument("--report-dir", help="write verify.csv and verify.png here")
    sp.add_argument("--format", choices=["pretty", "json"], default="pretty")
    budgets(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify" and not args.corpus and not args.random:
        args.corpus = str(Path(__file__).parent / "corpus")
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except BudgetExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
