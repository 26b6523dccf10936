"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure (v0 is not a
projector, non-integer trace).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings

import numpy as np

from .corrections import compute_constants, null_space_leakage
from .distribution import CorrectedDistribution, chi2_cdf, chi2_pdf_factor
from .errors import ModelError, NonMonotoneWarning
from .models import MultinomialSpec, load_model, model_to_dict, multinomial_model
from .montecarlo import compare, quantile_grid
from .spectral import split_idempotent

CSV_HELP = """\
CSV columns:
  constants          k,a,b,c,d,n
  eval               u,baseline_cdf,corrected_cdf,corrected_pdf,baseline_pdf
  quantile           alpha,baseline_quantile,corrected_quantile
  mc                 u,empirical,baseline,corrected
CSV numbers carry 12 significant digits; JSON carries full precision.
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ModelError(f"--{name}: expected comma-separated numbers, got {text!r}") from None


def _add_model_source(sub, allow_file=True):
    group = sub.add_mutually_exclusive_group(required=True)
    if allow_file:
        group.add_argument("--model", help="model JSON file")
    group.add_argument("--probs", help="multinomial cell probabilities, comma-separated")
    sub.add_argument("--n", type=int, help="sample size (with --probs)")


def _add_format(sub):
    sub.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="chi2corr",
        description="1/n-corrected chi-squared distribution of T = X^T X.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub = subs.add_parser("constants", help="print k, a, b, c, d for a model")
    _add_model_source(sub)
    _add_format(sub)

    sub = subs.add_parser("eval", help="tabulate baseline and corrected CDF/PDF")
    _add_model_source(sub)
    grid = sub.add_mutually_exclusive_group()
    grid.add_argument("--u", help="comma-separated evaluation points")
    grid.add_argument("--grid", help="START,STOP,NUM evenly spaced points")
    sub.add_argument("--clamp", action="store_true", help="clip CDF values to [0, 1]")
    _add_format(sub)

    sub = subs.add_parser("quantile", help="corrected quantiles of T")
    _add_model_source(sub)
    sub.add_argument("--alpha", required=True, help="comma-separated probabilities")
    _add_format(sub)

    sub = subs.add_parser("mc", help="Monte Carlo comparison on Pearson's statistic")
    _add_model_source(sub, allow_file=False)
    sub.add_argument("--replicates", type=int, default=1_000_000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1)
    _add_format(sub)

    sub = subs.add_parser("multinomial-model", help="write the multinomial model JSON")
    sub.add_argument("--probs", required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--out", help="output path (default: stdout)")
    return parser


def _spec(args) -> MultinomialSpec:
    if args.n is None:
        raise ModelError("--n is required with --probs")
    return MultinomialSpec(tuple(_floats(args.probs, "probs")), args.n)


def _model(args):
    if getattr(args, "model", None):
        return load_model(args.model)
    return multinomial_model(_spec(args))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _constants_doc(model):
    split = split_idempotent(model.v0)
    cs = compute_constants(model, split)
    return cs, {
        "k": cs.k, "a": cs.a, "b": cs.b, "c": cs.c, "d": cs.d, "n": cs.n,
        "diagnostics": {
            "idempotency_residual": split.idempotency_residual,
            "eigen_residual": split.eigen_residual,
            "null_space_leakage": null_space_leakage(model, split),
        },
    }


def cmd_constants(args) -> str:
    cs, doc = _constants_doc(_model(args))
    if args.format == "csv":
        return _csv(["k", "a", "b", "c", "d", "n"], [[cs.k, cs.a, cs.b, cs.c, cs.d, cs.n]])
    return _json(doc)


def cmd_eval(args) -> str:
    cs, doc = _constants_doc(_model(args))
    dist = CorrectedDistribution(cs)
    if args.u:
        u = np.array(_floats(args.u, "u"))
    elif args.grid:
        vals = _floats(args.grid, "grid")
        if len(vals) != 3 or vals[2] < 1 or vals[2] != int(vals[2]):
            raise ModelError("--grid: expected START,STOP,NUM with integer NUM >= 1")
        u = np.linspace(vals[0], vals[1], int(vals[2]))
    else:
        u = cs.d + quantile_grid(cs.k)
    base = np.atleast_1d(chi2_cdf(u, cs.k))
    base_pdf = np.atleast_1d(chi2_pdf_factor(u, cs.k))
    corr = np.atleast_1d(dist.cdf(u, clamp=args.clamp))
    pdf = np.atleast_1d(dist.pdf(u))
    if args.clamp:
        base = np.clip(base, 0.0, 1.0)
    rows = [[float(x) for x in r] for r in zip(u, base, corr, pdf, base_pdf)]
    header = ["u", "baseline_cdf", "corrected_cdf", "corrected_pdf", "baseline_pdf"]
    if args.format == "csv":
        return _csv(header, rows)
    doc["rows"] = [dict(zip(header, r)) for r in rows]
    return _json(doc)


def cmd_quantile(args) -> str:
    cs, doc = _constants_doc(_model(args))
    dist = CorrectedDistribution(cs)
    alphas = _floats(args.alpha, "alpha")
    if not all(0.0 < a < 1.0 for a in alphas):
        raise ModelError("--alpha: every probability must lie in (0, 1)")
    rows, notes = [], []
    for alpha in alphas:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NonMonotoneWarning)
            q = dist.quantile(alpha)
        for w in caught:
            if issubclass(w.category, NonMonotoneWarning):
                notes.append(f"alpha={alpha}: {w.message}")
                print(f"warning: {w.message}", file=sys.stderr)
        rows.append([alpha, float(quantile_grid(cs.k, [alpha])[0]), q])
    header = ["alpha", "baseline_quantile", "corrected_quantile"]
    if args.format == "csv":
        return _csv(header, rows)
    doc["rows"] = [dict(zip(header, r)) for r in rows]
    doc["warnings"] = notes
    return _json(doc)


def cmd_mc(args) -> str:
    if args.replicates < 1:
        raise ModelError("--replicates must be at least 1")
    result = compare(_spec(args), args.replicates, args.seed, workers=args.workers)
    if args.format == "csv":
        return result.to_csv()
    return result.to_json() + "\n"


def cmd_multinomial_model(args) -> str:
    doc = _json(model_to_dict(multinomial_model(_spec(args))))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(doc)
        return ""
    return doc


COMMANDS = {
    "constants": cmd_constants,
    "eval": cmd_eval,
    "quantile": cmd_quantile,
    "mc": cmd_mc,
    "multinomial-model": cmd_multinomial_model,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = COMMANDS[args.command](args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
