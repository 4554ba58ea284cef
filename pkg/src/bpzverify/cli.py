"""Command-line front end.

Exit status: 0 when every check passes, 1 on a mathematical finding (nonzero
lambda, oracle residual above tolerance), 2 on an operational error (bad
arguments or config, quadrature that does not converge).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from importlib import resources
from pathlib import Path

from . import __version__
from .bsa import bsa_operator, compositions, verify_bpz
from .evalconfig import PointConfig, evaluate_lincomb
from .oracle_coulomb import ConfigError, CoulombConfig, default_config, verify_coulomb_bpz
from .oracle_jet import verify_integrand_bpz
from .ratfunc import ChiMode
from .termalg import LinComb, Q0
from .virasoro import RuleParams, apply_word

EXIT_OK, EXIT_FINDING, EXIT_ERROR = 0, 1, 2

_CHI_CHOICES = ("gamma/2", "2/gamma", "both")


class UsageError(Exception):
    """Invalid run specification (exit status 2)."""


def _modes(chi: str | None, default=("gamma/2", "2/gamma")) -> list[ChiMode]:
    if chi is None:
        return [ChiMode(m) for m in default]
    if chi == "both":
        return [ChiMode.GAMMA_HALF, ChiMode.TWO_OVER_GAMMA]
    return [ChiMode(chi)]


def _need(value, name: str, lo: int):
    if value is None:
        raise UsageError(f"--{name} is required")
    if value < lo:
        raise UsageError(f"--{name} must be >= {lo}, got {value}")
    return value


def resolve_config(path: str) -> Path:
    """A config path as given, or a bare name shipped with the package."""
    p = Path(path)
    if p.exists():
        return p
    shipped = resources.files("bpzverify") / "data" / p.name
    if shipped.is_file():
        return Path(str(shipped))
    raise UsageError(f"config not found: {path}")


def _emit(args, payload: dict | str) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _split_meta(report: dict, meta: dict, key: str) -> dict:
    m = report.pop("meta", None)
    if m is not None:
        meta[key] = m
    return report


# subcommands -------------------------------------------------------------

def cmd_verify(args) -> int:
    r = _need(args.r, "r", 2)
    modes = _modes(args.chi)
    reports, meta = [], {}
    csv_parts = []
    for mode in modes:
        rep = verify_bpz(r, mode)
        csv_parts.append(rep.to_csv())
        reports.append(_split_meta(rep.to_json(), meta, mode.value))
    ok = all(rep["all_zero"] for rep in reports)
    if args.format == "csv":
        header = csv_parts[0].split("\n", 1)[0] + "\n"
        _emit(args, header + "".join(part.split("\n", 1)[1] for part in csv_parts))
    else:
        _emit(args, {"command": "verify", "r": r, "all_zero": ok, "reports": reports, "meta": meta})
    return EXIT_OK if ok else EXIT_FINDING


def _word_table(r: int, mode: ChiMode) -> list[dict]:
    params = RuleParams(r, mode)
    start = LinComb.single(Q0)
    rows = []
    for comp, coeff in bsa_operator(r, mode).entries:
        img = apply_word(comp, start, params)
        rows.append({"word": list(comp), "coefficient": coeff.to_string(), "expansion": img.to_json()})
    return rows


def _join(xs) -> str:
    return " ".join(map(str, xs))


def cmd_table(args) -> int:
    r = _need(args.r, "r", 2)
    modes = _modes(args.chi)
    out, ok = [], True
    for mode in modes:
        rep = verify_bpz(r, mode)
        ok &= rep.all_zero
        out.append({
            "chi_mode": mode.value,
            "words": _word_table(r, mode),
            "lambda": rep.to_json()["lambda"],
        })
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "chi_mode", "word", "coefficient", "p", "q", "value"])
        for block in out:
            for word in block["words"]:
                for row in word["expansion"]:
                    w.writerow([r, block["chi_mode"], _join(word["word"]), word["coefficient"],
                                _join(row["p"]), _join(row["q"]), row["lambda"]])
            for row in block["lambda"]:
                w.writerow([r, block["chi_mode"], "D_r", "1", _join(row["p"]), _join(row["q"]),
                            row["value"]])
        _emit(args, buf.getvalue())
    else:
        _emit(args, {"command": "table", "r": r, "all_zero": ok, "tables": out})
    return EXIT_OK if ok else EXIT_FINDING


def cmd_oracle_jet(args) -> int:
    r = _need(args.r, "r", 1)
    n = args.n if args.n is not None else r
    if n < r:
        raise UsageError(f"--n must be >= r ({r}), got {n}")
    trials = _need(args.trials, "trials", 1)
    reports = [verify_integrand_bpz(r, m, n, trials, args.seed) for m in _modes(args.chi)]
    ok = all(rep["all_zero"] for rep in reports)
    _emit(args, {"command": "oracle-jet", "all_zero": ok, "reports": reports})
    return EXIT_OK if ok else EXIT_FINDING


def _coulomb_configs(args) -> list[CoulombConfig]:
    overrides = {"r": args.r, "N": args.n, "l": args.l, "tol": args.tol}
    if args.config:
        base = json.loads(resolve_config(args.config).read_text())
        if not isinstance(base, dict):
            raise ConfigError("config must be a JSON object")
        if args.n is not None and args.n != base.get("N"):
            raise UsageError("--n cannot change N of a config file (points and weights are per insertion)")
        modes = _modes(args.chi, default=(base.get("mode", "gamma/2"),))
        return [CoulombConfig.from_json(base, **{**overrides, "mode": m.value}) for m in modes]
    r = _need(args.r, "r", 1)
    extra = {"tol": args.tol} if args.tol is not None else {}
    l = args.l if args.l is not None else 1
    return [default_config(r, m, N=args.n, l=l, **extra) for m in _modes(args.chi)]


def cmd_oracle_coulomb(args) -> int:
    cfgs = _coulomb_configs(args)
    reports = [verify_coulomb_bpz(c) for c in cfgs]
    statuses = [rep["status"] for rep in reports]
    if "inconclusive" in statuses:
        status, code = "inconclusive", EXIT_ERROR
    elif "fail" in statuses:
        status, code = "fail", EXIT_FINDING
    else:
        status, code = "pass", EXIT_OK
    _emit(args, {"command": "oracle-coulomb", "status": status, "reports": reports})
    return code


def cmd_render(args) -> int:
    if not args.config:
        raise UsageError("render needs --config (point configuration JSON)")
    r = _need(args.r, "r", 2)
    data = json.loads(resolve_config(args.config).read_text())
    points = PointConfig.from_json(data["points"] if "points" in data else data)
    gamma0 = data.get("gamma0", 0.5)
    default_q = data.get("q_default")
    supplied = {tuple(sorted(row["q"], reverse=True)): complex(*row["value"]) if isinstance(row["value"], list)
                else complex(row["value"]) for row in data.get("q_values", [])}
    out, ok = [], True
    tol = args.tol if args.tol is not None else 1e-9
    for mode in _modes(args.chi):
        words, total, scale = [], 0j, 0.0
        params = RuleParams(r, mode)
        for comp, coeff in bsa_operator(r, mode).entries:
            img = apply_word(comp, LinComb.single(Q0), params)
            qv = dict(supplied)
            for k in img.keys():
                if k.q not in qv:
                    if default_q is None:
                        raise UsageError(f"no value for Q{list(k.q)}; add it to q_values or set q_default")
                    qv[k.q] = complex(default_q)
            val = evaluate_lincomb(points, img, qv, gamma0) * complex(coeff.evaluate(gamma0))
            total += val
            scale = max(scale, abs(val))
            words.append({"word": list(comp), "value": [val.real, val.imag]})
        rep = verify_bpz(r, mode)
        lam = evaluate_lincomb(points, rep.table, {k.q: 1 for k in rep.table.keys()}, gamma0)
        passed = abs(total) <= tol * max(scale, 1.0) and rep.all_zero
        ok &= passed
        out.append({
            "chi_mode": mode.value,
            "words": words,
            "total": [total.real, total.imag],
            "lambda_rendered": [lam.real, lam.imag],
            "pass": passed,
        })
    _emit(args, {"command": "render", "r": r, "gamma0": gamma0, "points": points.to_json(),
                 "results": out, "pass": ok})
    return EXIT_OK if ok else EXIT_FINDING


def cmd_bench(args) -> int:
    top = _need(args.r if args.r is not None else 6, "r", 2)
    rows, meta, ok = [], {}, True
    for r in range(2, top + 1):
        for mode in _modes(args.chi):
            t0 = time.perf_counter()
            rep = verify_bpz(r, mode)
            meta[f"{r}:{mode.value}"] = {"seconds": round(time.perf_counter() - t0, 4)}
            ok &= rep.all_zero
            rows.append({"r": r, "chi_mode": mode.value, "n_compositions": len(compositions(r)),
                         "all_zero": rep.all_zero, **rep.stats})
    _emit(args, {"command": "bench", "all_zero": ok, "runs": rows, "meta": meta})
    return EXIT_OK if ok else EXIT_FINDING


COMMANDS = {
    "verify": cmd_verify,
    "table": cmd_table,
    "oracle-jet": cmd_oracle_jet,
    "oracle-coulomb": cmd_oracle_coulomb,
    "render": cmd_render,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpzverify", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--r", type=int)
        p.add_argument("--chi", choices=_CHI_CHOICES)
        p.add_argument("--n", type=int, help="number of insertions N")
        p.add_argument("--l", type=int, help="number of screening variables")
        p.add_argument("--trials", type=int, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float)
        p.add_argument("--config")
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    if args.format == "csv" and args.command not in ("verify", "table"):
        print("error: --format csv is only available for verify and table", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, ValueError, KeyError, OSError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
