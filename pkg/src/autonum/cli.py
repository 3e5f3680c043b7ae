"""Command-line entry point.

Several commands can run in one invocation, separated by a standalone ``;``
argument (quote it in the shell)::

    autonum count r2a n "n=x+y & x<y & T[x]=@0 & T[y]=@0" --minimize ";" \\
            count r2b n "n=x+y & x<y & T[x]=@1 & T[y]=@1" --minimize ";" \\
            compare r2a r2b

Names bound by one command are visible to the later ones.  Nothing persists
between invocations except through ``--save`` / ``--load``.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import automata as fa
from . import linrep as lr
from . import logic, oracles, plotting, reproduce
from . import spectral as sp
from .automata import Dfao, TupleDfa
from .linalg import fmt_rational, parse_rational


class CliError(Exception):
    pass


@dataclass
class Session:
    dfaos: dict[str, Dfao] = field(default_factory=logic.default_env)
    reps: dict[str, lr.LinearRepresentation] = field(default_factory=dict)
    automata: dict[str, TupleDfa] = field(default_factory=dict)
    last_rep: str | None = None

    def rep(self, name: str) -> lr.LinearRepresentation:
        if name not in self.reps:
            raise CliError(f"unknown representation {name!r}")
        return self.reps[name]

    def to_json(self) -> str:
        return json.dumps({
            "format": "autonum-session",
            "version": 1,
            "dfaos": {n: fa.format_dfao(m) for n, m in sorted(self.dfaos.items())},
            "representations": {n: lr.serialize(r) for n, r in sorted(self.reps.items())},
            "automata": {n: json.loads(fa.dfa_to_json(a)) for n, a in sorted(self.automata.items())},
        }, indent=1, sort_keys=True)

    def load(self, path: Path) -> list[str]:
        try:
            text = path.read_text()
        except OSError as e:
            raise CliError(f"cannot read {path}: {e.strerror}") from None
        if path.suffix == ".rep":
            self.reps[path.stem] = lr.deserialize(text)
            self.last_rep = path.stem
            return [f"loaded representation {path.stem} (rank {self.reps[path.stem].rank})"]
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise CliError(f"{path}: not a session file ({e})") from None
        if d.get("format") != "autonum-session":
            raise CliError(f"{path}: not a session file")
        for n, t in d.get("dfaos", {}).items():
            self.dfaos[n] = fa.parse_dfao(t)
        for n, t in d.get("representations", {}).items():
            self.reps[n] = lr.deserialize(t)
        for n, a in d.get("automata", {}).items():
            self.automata[n] = fa.dfa_from_json(json.dumps(a))
        return [f"loaded session {path}: {len(d.get('representations', {}))} representations, "
                f"{len(d.get('automata', {}))} automata"]

    def save(self, path: Path) -> list[str]:
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix == ".rep":
            if self.last_rep is None:
                raise CliError("no representation to save")
            path.write_text(lr.serialize(self.reps[self.last_rep], comment=self.last_rep))
            return [f"saved representation {self.last_rep} to {path}"]
        path.write_text(self.to_json() + "\n")
        return [f"saved session to {path}"]


@dataclass
class Result:
    command: str
    lines: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    ok: bool = True

    def say(self, line: str) -> None:
        self.lines.append(line)


# ---------------------------------------------------------------------------
# commands


def _formula(text: str):
    try:
        return logic.parse_formula(text)
    except logic.FormulaError as e:
        raise CliError(f"formula: {e}") from None


def _compile(sess: Session, text: str) -> TupleDfa:
    try:
        return logic.compile_formula(_formula(text), sess.dfaos)
    except (logic.FormulaError, fa.AutomatonError) as e:
        raise CliError(f"formula: {e}") from None


def cmd_def(sess, args, res):
    path = Path(args.path)
    try:
        m = fa.parse_dfao(path.read_text())
    except FileNotFoundError:
        raise CliError(f"file not found: {path}") from None
    except fa.AutomatonError as e:
        raise CliError(f"{path}: {e}") from None
    old = sess.dfaos.get(args.name)
    if old is not None and old != m and not args.force:
        kind = "built-in" if args.name in logic.BUILTINS else "already defined"
        raise CliError(f"{args.name} is {kind}; use --force to replace it")
    sess.dfaos[args.name] = m
    res.say(f"{args.name}: base {m.base}, {len(m.outputs)} states, outputs {sorted(set(m.outputs))}")
    res.data.update(name=args.name, base=m.base, states=len(m.outputs))


def cmd_eval(sess, args, res):
    if len(args.items) > 2:
        raise CliError("eval takes an optional name and one formula (quote the formula)")
    name, text = (None, args.items[0]) if len(args.items) == 1 else args.items
    a = _compile(sess, text)
    free = ",".join(a.tracks)
    if not a.tracks:
        verdict = "TRUE" if a.initial in a.accepting else "FALSE"
        res.say(verdict)
        res.data.update(verdict=verdict)
    else:
        label = f"{name}: " if name else ""
        res.say(f"{label}{a.live_state_count} states, free variables {free}")
        res.data.update(states=a.live_state_count, free=list(a.tracks))
    if name:
        sess.automata[name] = a
        res.data["name"] = name


def cmd_count(sess, args, res):
    f = _formula(args.formula)
    if args.var not in logic.free_vars(f):
        raise CliError(f"index variable {args.var!r} is not free in the formula")
    a = _compile(sess, args.formula)
    try:
        r = lr.extract(a, args.var, pad="auto" if args.pad is None else args.pad)
    except lr.RepresentationError as e:
        raise CliError(str(e)) from None
    sess.reps[args.name] = r
    sess.last_rep = args.name
    res.data.update(name=args.name, automaton_states=a.live_state_count, rank=r.rank)
    line = f"{args.name}: automaton {a.live_state_count} states, rank {r.rank}"
    if args.pad is not None:
        stable = lr.series_equal(r, lr.extract(a, args.var, pad=args.pad + 1))
        line += f", pad {args.pad} {'stable' if stable else 'NOT stable (count depends on the pad)'}"
        res.data.update(pad=args.pad, pad_stable=stable)
    if args.minimize:
        m = lr.canonical_form(r)
        sess.reps[f"{args.name}-min"] = m
        sess.last_rep = f"{args.name}-min"
        line += f", minimized rank {m.rank} (stored as {args.name}-min)"
        res.data.update(minimized_rank=m.rank)
    res.say(line)


_ORACLE = re.compile(r"^(?:R([123]):([ABCD])|([rs])(\d+))(?:\+(\d+))?$")


def oracle_values(kind: str, n_from: int, n_to: int) -> list[int]:
    """Oracle values for KIND = ``R2:A`` (R_i on a set), ``r5``/``s6`` (j summands), optional ``+shift``."""
    m = _ORACLE.match(kind)
    if not m:
        raise CliError(f"bad oracle {kind!r}; use e.g. R2:A, R3:C+1, r5, s6")
    shift = int(m.group(5) or 0)
    hi = n_to + shift
    if m.group(1):
        table = oracles.brute_R_range(int(m.group(1)), m.group(2), hi)
    else:
        table = oracles.rs_range(int(m.group(4)), m.group(3), hi)
    return [table[n + shift] for n in range(n_from, n_to + 1)]


def cmd_values(sess, args, res):
    r = sess.rep(args.name)
    ns = list(range(args.n_from, args.n_to + 1))
    vals = lr.evaluate_range(r, args.n_from, args.n_to + 1) if ns else []
    want = oracle_values(args.oracle, args.n_from, args.n_to) if args.oracle and ns else None
    rows = []
    for i, n in enumerate(ns):
        if want is None:
            res.say(f"{n} {fmt_rational(vals[i])}")
            rows.append([n, fmt_rational(vals[i])])
        else:
            verdict = "MATCH" if vals[i] == want[i] else "MISMATCH"
            res.ok &= verdict == "MATCH"
            res.say(f"{n} {fmt_rational(vals[i])} {want[i]} {verdict}")
            rows.append([n, fmt_rational(vals[i]), want[i], verdict])
    res.data.update(name=args.name, rows=rows)
    if args.plot:
        path = plotting.plot_values(ns, vals, args.plot, oracle=want, title=args.name)
        res.say(f"wrote {path}")


def cmd_compare(sess, args, res):
    a, b = sess.rep(args.a), sess.rep(args.b)
    if lr.series_equal(a, b):
        res.say("EQUAL")
        res.data.update(verdict="EQUAL")
        return
    n = lr.first_difference(a, b)
    if n is None:
        res.say("DIFFER (no small witness)")
    else:
        res.say(f"DIFFER at n={n}: {fmt_rational(lr.evaluate(a, n))} vs {fmt_rational(lr.evaluate(b, n))}")
    res.data.update(verdict="DIFFER", witness=n)


def _poly_data(p: sp.RationalPolynomial) -> list[str]:
    return [fmt_rational(c) for c in p.coeffs]


def cmd_minpoly(sess, args, res):
    r = sess.rep(args.name)
    if not 0 <= args.digit < r.base:
        raise CliError(f"digit must be in [0, {r.base - 1}]")
    p = sp.min_poly(r.gamma[args.digit])
    roots, rest = sp.rational_roots(p)
    res.say(f"minpoly gamma({args.digit}) of {args.name}: {p}")
    res.say("rational roots: " + ", ".join(f"{fmt_rational(x)} (multiplicity {m})" for x, m in roots))
    if rest.degree > 0:
        res.say(f"factor without rational roots: {rest}")
    res.data.update(name=args.name, digit=args.digit, polynomial=str(p), coefficients=_poly_data(p),
                    roots=[[fmt_rational(x), m] for x, m in roots], irrational_factor=_poly_data(rest))


def _pattern(text: str, k: int) -> sp.DigitPattern:
    try:
        return sp.parse_pattern(text, k)
    except ValueError as e:
        raise CliError(f"pattern: {e}") from None


def cmd_closedform(sess, args, res):
    r = sess.rep(args.name)
    pat = _pattern(args.pattern, r.base)
    form = sp.fit_closed_form(r, pat)
    res.say(f"recurrence: {form.recurrence}")
    for t, v in form.transients:
        res.say(f"t={t}: {fmt_rational(v)}")
    res.say(f"for t >= {form.t0}: {form}")
    res.data.update(name=args.name, pattern=str(pat), recurrence=_poly_data(form.recurrence), t0=form.t0,
                    transients=[[t, fmt_rational(v)] for t, v in form.transients],
                    closed_form=None if form.terms is None else str(form),
                    terms=None if form.terms is None else
                    [[fmt_rational(c), fmt_rational(r_), j] for c, r_, j in form.terms])


def cmd_dominant(sess, args, res):
    a = sess.rep(args.a)
    rep = a if args.b == "-" else lr.minimize_rep(lr.difference(a, sess.rep(args.b)))
    pat = _pattern(args.pattern, a.base)
    root = parse_rational(args.root)
    an = sp.dominant_ratio(rep, pat, root, args.t_max)
    label = args.a if args.b == "-" else f"{args.a} - {args.b}"
    res.say(f"sequence: {label} along {pat}, divided by ({fmt_rational(root)})^t")
    for t, v, r in an.table:
        res.say(f"{t} {fmt_rational(v)} {float(r):.12e}")
    res.say(f"positive from t={an.n0}" if an.n0 is not None else f"not positive at t={args.t_max}")
    res.say(f"ratio {'stabilized' if an.stabilized else 'not stabilized'}: {float(an.estimate):.12e}")
    exact = "unavailable (repeated root)" if an.exact_coefficient is None else fmt_rational(an.exact_coefficient)
    res.say(f"exact coefficient of ({fmt_rational(root)})^t: {exact}")
    res.data.update(table=[[t, fmt_rational(v), fmt_rational(r)] for t, v, r in an.table],
                    n0=an.n0, stabilized=an.stabilized, estimate=fmt_rational(an.estimate),
                    exact_coefficient=None if an.exact_coefficient is None else fmt_rational(an.exact_coefficient))
    if args.expect is not None:
        want = parse_rational(args.expect)
        rel = abs(Fraction(an.estimate) - want) / abs(Fraction(want)) if want else abs(Fraction(an.estimate))
        ok = an.stabilized and rel < Fraction(1, 1000)
        res.ok &= ok
        res.say(f"[{'PASS' if ok else 'FAIL'}] expected {fmt_rational(want)} = {float(want):.6e}, "
                f"relative difference {float(rel):.3g}")
        res.data.update(expected=fmt_rational(want), relative_difference=float(rel), passed=ok)
    if args.plot:
        path = plotting.plot_ratios([t for t, _, _ in an.table], [r for _, _, r in an.table], args.plot,
                                    root=fmt_rational(root),
                                    expected=parse_rational(args.expect) if args.expect else None, title=label)
        res.say(f"wrote {path}")


def cmd_scan(sess, args, res):
    r = sess.rep(args.name)
    try:
        bad = sp.monotonicity_scan(r, args.n_from, args.n_to)
    except ValueError as e:
        raise CliError(str(e)) from None
    res.say(f"{args.name}: {len(bad)} violations of f(n) < f(n+1) on [{args.n_from}, {args.n_to}]")
    if bad:
        res.say("at n = " + " ".join(map(str, bad)))
    res.data.update(name=args.name, violations=bad)


def cmd_reproduce(sess, args, res):
    targets = reproduce.TARGETS if args.target == "all" else (args.target,)
    reports = []
    for t in targets:
        rep = reproduce.run(t, Path(args.out) / t if args.out else None)
        res.lines += rep.lines()
        reports.append(rep.to_dict())
        res.ok &= rep.ok
    res.data.update(reports=reports)


def cmd_export_dot(sess, args, res):
    if args.name in sess.automata:
        obj = sess.automata[args.name]
    elif args.name in sess.dfaos:
        obj = sess.dfaos[args.name]
    else:
        raise CliError(f"unknown automaton {args.name!r}")
    path = Path(args.path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(fa.to_dot(obj, args.name))
    res.say(f"wrote {path}")
    res.data.update(name=args.name, path=str(path))


# ---------------------------------------------------------------------------
# argument parsing


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--load", action="append", default=[], metavar="PATH",
                        help="load a session (.json) or representation (.rep) before the command")
    common.add_argument("--save", metavar="PATH",
                        help="after the command, save the session, or with a .rep suffix the latest representation")
    p = argparse.ArgumentParser(prog="autonum", description="Automatic sequences: decide, count, minimize, analyse.")
    # before the verb; kept apart because subparser defaults would overwrite them
    p.add_argument("--json", dest="g_json", action="store_true", help="machine-readable output")
    p.add_argument("--load", dest="g_load", action="append", default=[], metavar="PATH")
    p.add_argument("--save", dest="g_save", metavar="PATH")
    p.add_argument("--version", action="version", version=f"autonum {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.set_defaults(fn=fn)
        return s

    s = add("def", cmd_def, "bind a DFAO read from a Walnut-format file")
    s.add_argument("name")
    s.add_argument("path")
    s.add_argument("--force", action="store_true", help="replace an existing or built-in binding")
    s = add("eval", cmd_eval, "compile a formula and summarize its automaton")
    s.add_argument("items", nargs="+", metavar="[NAME] FORMULA")
    s = add("count", cmd_count, "linear representation counting solutions per index value")
    s.add_argument("name")
    s.add_argument("var")
    s.add_argument("formula")
    s.add_argument("--minimize", action="store_true", help="also store NAME-min, the canonical minimal form")
    s.add_argument("--pad", type=int, metavar="J", help="fixed leading-zero pad; reports whether it is stable")
    s = add("values", cmd_values, "exact values for n in [FROM, TO]")
    s.add_argument("name")
    s.add_argument("n_from", type=int)
    s.add_argument("n_to", type=int)
    s.add_argument("--oracle", metavar="KIND", help="compare with brute force: R2:A, R3:C+1, r5, s6, ...")
    s.add_argument("--plot", metavar="PATH", help="write a figure of the values")
    s = add("compare", cmd_compare, "decide equality of two series")
    s.add_argument("a")
    s.add_argument("b")
    s = add("minpoly", cmd_minpoly, "minimal polynomial of gamma(DIGIT)")
    s.add_argument("name")
    s.add_argument("digit", type=int)
    s = add("closedform", cmd_closedform, "closed form along a digit pattern such as '1 0^(t-1) 1'")
    s.add_argument("name")
    s.add_argument("pattern")
    s = add("dominant", cmd_dominant, "ratios (A - B)(pattern) / ROOT^t; B may be '-'")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("pattern")
    s.add_argument("root")
    s.add_argument("t_max", type=int)
    s.add_argument("--expect", metavar="Q", help="reference coefficient to compare with")
    s.add_argument("--plot", metavar="PATH", help="write a figure of the ratios")
    s = add("scan-monotone", cmd_scan, "list n in [FROM, TO] with f(n) >= f(n+1)")
    s.add_argument("name")
    s.add_argument("n_from", type=int)
    s.add_argument("n_to", type=int)
    s = add("reproduce", cmd_reproduce, "run a scripted pipeline with pass/fail checkpoints")
    s.add_argument("target", choices=reproduce.TARGETS + ("all",))
    s.add_argument("--out", default="autonum-out", metavar="DIR",
                   help="directory for tables and figures (default autonum-out; '' disables)")
    s = add("export-dot", cmd_export_dot, "write an automaton or DFAO as GraphViz source")
    s.add_argument("name")
    s.add_argument("path")
    return p


def split_commands(argv: list[str]) -> list[list[str]]:
    groups: list[list[str]] = [[]]
    for a in argv:
        if a == ";":
            groups.append([])
        else:
            groups[-1].append(a)
    return [g for g in groups if g]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    groups = split_commands(argv)
    if not groups:
        parser.print_usage(sys.stderr)
        return 2
    parsed = [parser.parse_args(g) for g in groups]
    for a in parsed:
        a.json = a.json or a.g_json
        a.load = a.g_load + a.load
        a.save = a.save or a.g_save
    as_json = any(a.json for a in parsed)
    sess = Session()
    results: list[Result] = []
    status = 0
    for args in parsed:
        res = Result(args.command)
        results.append(res)
        try:
            for path in args.load:
                res.lines += sess.load(Path(path))
            args.fn(sess, args, res)
            if args.save:
                res.lines += sess.save(Path(args.save))
        except (CliError, lr.RepresentationError, fa.AutomatonError, sp.ClosedFormError) as e:
            res.ok = False
            res.data["error"] = str(e)
            if not as_json:
                for line in res.lines:
                    print(line)
                print(f"error: {e}", file=sys.stderr)
            status = 2
            break
        if not res.ok:
            status = max(status, 1)
        if not as_json:
            for line in res.lines:
                print(line)
    if as_json:
        print(json.dumps({
            "version": __version__,
            "commands": [{"command": r.command, "ok": r.ok, "lines": r.lines, **r.data} for r in results],
            "exit_code": status,
        }, indent=1))
    return status


if __name__ == "__main__":
    sys.exit(main())
