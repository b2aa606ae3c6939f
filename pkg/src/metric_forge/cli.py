"""Command-line front end.

Exit codes: 0 success, 1 input or parse error, 2 no matched metric (cycle
witness written), 3 verification failure, 4 oracle scale exceeded.

Examples::

    metric-forge synthesize --bac p=1/10,q=1/5,m=3 --delta 1/4 --out metric.json
    metric-forge verify --channel data/counterexample3.json --metric metric.json
    metric-forge oracle strong-exists --channel data/counterexample3.json
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .channel import (
    ChannelMatrix,
    ProductChannelSpec,
    channel_from_json,
    cyclic_sum,
    expand_product,
    format_value,
    make_channel,
    product_spec_from_json,
    score_from_channel,
    three_word_counterexample,
)
from .compare import ComparisonPolicy
from .errors import MetricForgeError, OracleScaleExceeded
from .kernels import BACKEND
from .metric import MatchedMetric, band_metric, parse_delta, semimetric_from_extension, triangle_violations
from .order import build_graph, find_violation_cycle, linear_extension, premise_bruteforce
from .verify import strong_exists_bruteforce, verify_compatibility, verify_matched

EXIT_OK, EXIT_INPUT, EXIT_NO_METRIC, EXIT_VERIFY, EXIT_SCALE = 0, 1, 2, 3, 4


class InputError(MetricForgeError):
    pass


def parse_inline(kind: str, text: str) -> ProductChannelSpec:
    """``"p=1/10,q=1/5,m=3"`` -> product spec of the given kind."""
    fields = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"expected key=value in {text!r}")
        fields[key.strip().lower()] = value.strip()
    if "m" not in fields or "p" not in fields:
        raise InputError(f"--{kind.lower()} needs at least p and m")
    return ProductChannelSpec(make_channel(kind, fields["p"], fields.get("q")), int(fields["m"]))


def write_atomic(path: Path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, out: Optional[str]):
    if out:
        write_atomic(Path(out), text)
    else:
        sys.stdout.write(text)


def _json_lines(obj, indent: int) -> str:
    pad = " " * indent
    if isinstance(obj, dict) and obj:
        items = [f'{pad}  {json.dumps(k)}: {_json_lines(v, indent + 2).lstrip()}' for k, v in obj.items()]
        return pad + "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list) and any(isinstance(v, (list, dict)) for v in obj):
        items = [_json_lines(v, indent + 2) for v in obj]
        return pad + "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return pad + json.dumps(obj)


def dump_json(obj) -> str:
    """JSON with one line per innermost list, so matrices read row by row."""
    return _json_lines(obj, 0) + "\n"


def load_input(args):
    """Resolve the channel from ``--channel`` or an inline parametric spec.

    Returns ``(channel, product_spec_or_None)``.
    """
    cap = args.max_space
    spec = None
    if args.bac or args.bsc or args.z:
        kind, text = next((k, v) for k, v in (("BAC", args.bac), ("BSC", args.bsc), ("Z", args.z)) if v)
        spec = parse_inline(kind, text)
        ch = expand_product(spec, cap)
    elif args.channel:
        try:
            with open(args.channel, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read channel {args.channel}: {exc}") from exc
        if isinstance(obj, dict) and "kind" in obj:
            spec = product_spec_from_json(obj)
            ch = expand_product(spec, cap)
        else:
            ch = channel_from_json(obj, cap)
    else:
        raise InputError("give --channel PATH or one of --bac/--bsc/--z")
    if args.mode == "float" and ch.is_exact:
        ch = ChannelMatrix(ch.space, tuple(tuple(float(v) for v in r) for r in ch.entries), ch.stochastic_axis)
    return ch, spec


def policy(args) -> ComparisonPolicy:
    return ComparisonPolicy.floating(args.epsilon) if args.mode == "float" else ComparisonPolicy.exact()


def _delta(args):
    delta = parse_delta(args.delta)
    return float(delta) if args.mode == "float" else delta


def render_metric_text(d: MatchedMetric) -> str:
    labels = d.space.all_labels()
    cells = [[str(format_value(v)) for v in row] for row in d.values.tolist()]
    width = max(len(c) for c in labels + [c for r in cells for c in r])
    lines = [" " * width + " " + " ".join(l.rjust(width) for l in labels)]
    for lab, row in zip(labels, cells):
        lines.append(lab.rjust(width) + " " + " ".join(c.rjust(width) for c in row))
    return "\n".join(lines) + "\n"


def cmd_synthesize(args) -> int:
    ch, _ = load_input(args)
    delta = _delta(args)
    gr = build_graph(score_from_channel(ch), policy(args))
    info = sys.stdout if args.out else sys.stderr
    print(
        f"space size: {ch.size}  pairs: {gr.n_nodes}  edges: {gr.n_edges}  "
        f"tie groups: {len(gr.tie_groups)}  delta: {format_value(delta)}",
        file=info,
    )
    witness = find_violation_cycle(gr)
    if witness is not None:
        emit(dump_json({"witness": witness.to_json()}), args.out)
        print(f"no matched metric: preference cycle of length {len(witness.pair_cycle)}", file=info)
        return EXIT_NO_METRIC
    d = band_metric(semimetric_from_extension(linear_extension(gr)), delta)
    if args.format == "csv":
        emit(d.to_csv(), args.out)
    elif args.format == "text":
        emit(render_metric_text(d), args.out)
    else:
        emit(dump_json(d.to_json()), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    ch, _ = load_input(args)
    try:
        with open(args.metric, encoding="utf-8") as fh:
            d = MatchedMetric.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read metric {args.metric}: {exc}") from exc
    cmp = policy(args)
    violations = verify_compatibility(score_from_channel(ch), d, cmp)
    report = verify_matched(ch, d, cmp)
    if args.format == "json":
        doc = report.to_json()
        doc["compatibility_violations"] = [v.describe(ch.space) for v in violations]
        emit(dump_json(doc), args.out)
    else:
        lines = [report.render_table()]
        lines.append(f"compatibility violations: {len(violations)}")
        lines.extend("  " + v.describe(ch.space) for v in violations[:20])
        if report.overall.value == "weak-matched":
            lines.append("note: weakly matched only (argmin_d is a strict subset of argmax_P somewhere)")
        emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.is_weak and not violations else EXIT_VERIFY


def cmd_analyze(args) -> int:
    ch, spec = load_input(args)
    gr = build_graph(score_from_channel(ch), policy(args))
    witness = find_violation_cycle(gr)
    lines = [
        f"space size: {ch.size}",
        f"stochastic axis: {ch.stochastic_axis.value}",
        f"pairs (nodes): {gr.n_nodes}",
        f"strict edges: {gr.n_edges}",
        f"tie groups: {len(gr.tie_groups)}",
        f"acyclic: {witness is None}",
    ]
    if witness is not None:
        lines.append(f"shortest cycle length: {len(witness.pair_cycle)}")
        lines.extend("  " + s for s in witness.violated_inequalities)
    if spec is not None:
        rng = random.Random(args.seed)
        worst, exact_ok, checks = 0.0, True, 0
        for _ in range(args.samples):
            seq = [rng.randrange(spec.size) for _ in range(rng.randint(2, 8))]
            for j in range(spec.length):
                try:
                    s = cyclic_sum(spec, seq, j, exact=False)
                except MetricForgeError:
                    continue
                worst = max(worst, abs(s))
                if spec.symbol.is_exact:
                    exact_ok &= cyclic_sum(spec, seq, j).is_zero()
                checks += 1
        lines.append(f"cyclic sum checks: {checks}  max |s_j| (float): {worst:.3e}  exact zero: {exact_ok}")
    emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    ch, _ = load_input(args)
    cmp = policy(args)
    if args.oracle == "premise":
        w = premise_bruteforce(score_from_channel(ch), args.max_len, cmp, allow_large=args.allow_large)
        if args.format == "json":
            emit(dump_json({"witness": w.to_json() if w else None}), args.out)
        elif w is None:
            emit("premise holds: no violating sequence\n", args.out)
        else:
            emit("premise violated: " + " ; ".join(w.violated_inequalities) + "\n", args.out)
        return EXIT_OK
    exists, wo = strong_exists_bruteforce(ch, _delta(args), cmp, allow_large=args.allow_large)
    if args.format == "json":
        tiers = [[p.labels(ch.space) for p in b] for b in wo.blocks] if wo else None
        emit(dump_json({"exists": exists, "tiers": tiers}), args.out)
    else:
        text = f"exists: {str(exists).lower()}\n"
        if wo:
            text += "tiers: " + " < ".join(
                "{" + ", ".join("".join(p.labels(ch.space)) for p in b) + "}" for b in wo.blocks
            ) + "\n"
        emit(text, args.out)
    return EXIT_OK


def selftest_lines(max_m: int = 4):
    """Yield ``(name, ok)`` for the 3-word counterexample and small product channels."""
    ch = three_word_counterexample()
    d = band_metric(semimetric_from_extension(linear_extension(build_graph(score_from_channel(ch)))))
    a, b, c = 0, 1, 2
    yield "3-word: d(a,c) < d(b,c) < d(a,b)", d.values[a, c] < d.values[b, c] < d.values[a, b]
    yield "3-word: weak-matched, not strong", verify_matched(ch, d).overall.value == "weak-matched"
    yield "3-word: no strong matched metric exists", strong_exists_bruteforce(ch)[0] is False
    third = Fraction(1, 3)
    kinds = [("BAC", Fraction(1, 10), Fraction(1, 5)), ("BAC", Fraction(3, 10), Fraction(1, 20)),
             ("BSC", Fraction(1, 4), Fraction(1, 4)), ("Z", Fraction(0), third)]
    for kind, p, q in kinds:
        for m in range(1, max_m + 1):
            spec = ProductChannelSpec(make_channel(kind, p, q), m)
            pch = expand_product(spec)
            gr = build_graph(score_from_channel(pch))
            ok = find_violation_cycle(gr) is None
            if ok:
                pd = band_metric(semimetric_from_extension(linear_extension(gr)))
                ok = (
                    not verify_compatibility(score_from_channel(pch), pd)
                    and verify_matched(pch, pd).is_weak
                    and not triangle_violations(pd.values)
                )
            yield f"{kind}({p},{q}) m={m}: synthesized and verified", ok


def cmd_selftest(args) -> int:
    failed = 0
    for name, ok in selftest_lines(args.max_m):
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
        failed += not ok
    print(f"kernel backend: {BACKEND}; {'all passed' if not failed else f'{failed} failed'}")
    return EXIT_OK if not failed else EXIT_VERIFY


def _add_input(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--channel", help="channel JSON (explicit matrix or product spec)")
    src.add_argument("--bac", metavar="p=..,q=..,m=..", help="binary asymmetric product channel")
    src.add_argument("--bsc", metavar="p=..,m=..", help="binary symmetric product channel")
    src.add_argument("--z", metavar="p=..,q=..,m=..", help="Z product channel (one of p, q is 0)")
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--epsilon", type=float, default=1e-12, help="float-mode equality tolerance")
    p.add_argument("--delta", default="1/4", help="band half-width in (0, 1/3)")
    p.add_argument("--tie-break", choices=("lexicographic",), default="lexicographic")
    p.add_argument("--max-space", type=int, default=None,
                   help="cap on 2^m (default 4096 or $METRIC_FORGE_MAX_SPACE)")
    p.add_argument("--out", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metric-forge", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="build a matched metric or a cycle witness")
    _add_input(p)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="check a metric against a channel")
    _add_input(p)
    p.add_argument("--metric", required=True, help="metric JSON written by synthesize")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="graph statistics and cyclic-sum spot checks")
    _add_input(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", help="brute-force oracles for small spaces")
    p.add_argument("oracle", choices=("premise", "strong-exists"))
    _add_input(p)
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--allow-large", action="store_true", help="lift the oracle scale guard")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("selftest", help="run the built-in end-to-end checks")
    p.add_argument("--max-m", type=int, default=4)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleScaleExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except (MetricForgeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
