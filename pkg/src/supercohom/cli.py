"""Command-line front end.

Rationals cross the interface as ``p/q`` strings only.  Every JSON document
carries a ``command`` field and validates against ``schema.json``.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .cohomology import dim_h1, is_cocycle, is_trivial
from .families import (
    CLASSICAL_FAMILIES, FormulaInconsistent, InapplicableParameters, cd_identity,
    classical_cocycle, classical_family_basis, classify, super_family_basis,
    super_family_members,
)
from .superfield import Q, contact_bracket, fmt_q, format_superfunction, parse_superfunction

EXIT_OK, EXIT_INTERNAL, EXIT_INAPPLICABLE, EXIT_UNSTABLE = 0, 1, 2, 3

TSV_COLUMNS = ("lambda", "nu", "mu", "mode", "class", "dim", "parity", "stabilized")


@dataclass
class RunConfig:
    command: str
    lam: str | None = None
    nu: str | None = None
    mu: str | None = None
    order: int | None = None
    xdeg: int | None = None
    max_order: int | None = None
    mode: str = "super"
    fmt: str = "json"
    strict: bool = False
    jobs: int = 1
    delta_range: str = "0..8"
    s_max: int = 4
    t_max: int = 4
    family: str | None = None
    k: int | None = None
    s: int | None = None
    t: int | None = None
    left: str | None = None
    right: str | None = None

    def triple(self) -> tuple[Fraction, Fraction, Fraction]:
        if self.lam is None or self.nu is None or self.mu is None:
            raise InapplicableParameters("--lambda, --nu and --mu are required")
        return _rational(self.lam), _rational(self.nu), _rational(self.mu)


def _rational(text: str) -> Fraction:
    try:
        return Q(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InapplicableParameters(f"not a rational: {text!r}") from exc


def parse_range(text: str) -> list[int]:
    """``a..b`` or ``a..b:step`` (inclusive, integers)."""
    body, _, step = text.partition(":")
    lo, sep, hi = body.partition("..")
    try:
        a, b, n = int(lo), int(hi), int(step or 1)
    except ValueError:
        sep = ""
    if not sep:
        raise InapplicableParameters(f"range must look like a..b or a..b:step, got {text!r}")
    if b < a or n < 1:
        raise InapplicableParameters(f"empty range {text!r}")
    return list(range(a, b + 1, n))


def sweep_triples(cfg: RunConfig) -> list[tuple[Fraction, Fraction, Fraction]]:
    """(lambda, nu) on the half-integer grid times the requested weight gaps,
    sorted lexicographically."""
    out = []
    for s in range(cfg.s_max + 1):
        for t in range(cfg.t_max + 1):
            lam, nu = Fraction(-s, 2), Fraction(-t, 2)
            for twice in parse_range(cfg.delta_range):
                out.append((lam, nu, lam + nu + Fraction(twice, 2)))
    return sorted(set(out))


# ---------------------------------------------------------------- output

def _emit(cfg: RunConfig, record: dict, out=None) -> None:
    out = out or sys.stdout
    if cfg.fmt == "json":
        out.write(json.dumps(record, separators=(",", ":")) + "\n")
    elif cfg.fmt == "tsv":
        out.write("\t".join(str(record.get(c, "")) for c in TSV_COLUMNS) + "\n")
    else:
        out.write(_pretty(record) + "\n")
    out.flush()


def _pretty(record: dict) -> str:
    cmd = record["command"]
    if cmd == "classify":
        extra = "".join(f" {k}={record[k]}" for k in ("k", "s", "t") if k in record)
        return f"{record['class']}{extra}"
    if cmd in ("dim", "table"):
        flag = "" if record["stabilized"] else "  [not stabilized]"
        return (f"({record['lambda']}, {record['nu']}, {record['mu']})  {record['mode']}  "
                f"dim {record['dim']}  {record['parity']}{flag}")
    if cmd == "bracket":
        return record["result"]
    if cmd == "verify":
        return "\n".join(f"{c['status']}  {c['check']}" + (f"  ({c['detail']})" if c.get("detail") else "")
                         for c in record["checks"])
    return json.dumps(record, indent=2)


# ---------------------------------------------------------------- commands

def _dim_record(cfg: RunConfig, lam, nu, mu, command: str) -> dict:
    res = dim_h1(lam, nu, mu, mode=cfg.mode, order=cfg.order, xdeg=cfg.xdeg,
                 max_order=cfg.max_order, want_basis=False)
    rec = {"command": command}
    rec.update(res.to_json(with_basis=False))
    del rec["basis"]
    cls = classify(lam, nu, mu)
    rec["class"] = cls.classical_tag if cfg.mode == "classical" else cls.tag
    return rec


def cmd_classify(cfg: RunConfig) -> int:
    rec = {"command": "classify"}
    rec.update(classify(*cfg.triple()).to_json())
    _emit(cfg, rec)
    return EXIT_OK


def cmd_dim(cfg: RunConfig) -> int:
    rec = _dim_record(cfg, *cfg.triple(), "dim")
    _emit(cfg, rec)
    return EXIT_UNSTABLE if cfg.strict and not rec["stabilized"] else EXIT_OK


def _table_row(args) -> dict:
    cfg, triple = args
    return _dim_record(cfg, *triple, "table")


def cmd_table(cfg: RunConfig) -> int:
    triples = sweep_triples(cfg)
    if cfg.fmt == "tsv":
        sys.stdout.write("\t".join(TSV_COLUMNS) + "\n")
    work = [(cfg, t) for t in triples]
    unstable = False
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            # map yields in submission order, so rows come out canonically sorted
            rows = pool.map(_table_row, work, chunksize=1)
            for rec in rows:
                unstable |= not rec["stabilized"]
                _emit(cfg, rec)
    else:
        for item in work:
            rec = _table_row(item)
            unstable |= not rec["stabilized"]
            _emit(cfg, rec)
    return EXIT_UNSTABLE if cfg.strict and unstable else EXIT_OK


def cmd_basis(cfg: RunConfig) -> int:
    lam, nu, mu = cfg.triple()
    rec = {"command": "basis", "lambda": fmt_q(lam), "nu": fmt_q(nu), "mu": fmt_q(mu),
           "mode": cfg.mode, "discrepancies": []}
    opts = {"order": cfg.order, "xdeg": cfg.xdeg}
    if cfg.mode == "super":
        report = super_family_basis(lam, nu, mu, **opts)
        rec.update(dim=report.engine_dim, source=report.source,
                   discrepancies=list(report.discrepancies),
                   basis=[c.to_json() for c in report.basis])
    elif cfg.mode == "classical":
        fams = classical_family_basis(lam, nu, mu)
        engine = dim_h1(lam, nu, mu, mode="classical", **opts)
        if len(fams) == engine.dim:
            rec.update(dim=engine.dim, source="closed-form",
                       families=[name for name, _ in fams],
                       basis=[c.to_json() for _, c in fams])
        else:
            rec.update(dim=engine.dim, source="engine",
                       basis=[c.to_json() for c in engine.basis])
            rec["discrepancies"].append(
                f"closed forms give {len(fams)} cocycles, engine finds {engine.dim}")
    else:
        engine = dim_h1(lam, nu, mu, mode=cfg.mode, **opts)
        rec.update(dim=engine.dim, source="engine",
                   basis=[c.to_json() for c in engine.basis])
    _emit(cfg, rec)
    return EXIT_OK


def _check(name: str, ok: bool, detail: str = "") -> dict:
    out = {"check": name, "status": "PASS" if ok else "FAIL"}
    if detail:
        out["detail"] = detail
    return out


def _family_triple(cfg: RunConfig) -> tuple[Fraction, Fraction, Fraction]:
    """Weights from --lambda/--nu/--mu, or from --k/--s/--t on the resonant grid."""
    lam = _rational(cfg.lam) if cfg.lam is not None else (
        Fraction(-cfg.s, 2) if cfg.s is not None else Fraction(0))
    nu = _rational(cfg.nu) if cfg.nu is not None else (
        Fraction(-cfg.t, 2) if cfg.t is not None else Fraction(0))
    if cfg.mu is not None:
        mu = _rational(cfg.mu)
    elif cfg.k is not None:
        mu = lam + nu + cfg.k + 1
    else:
        raise InapplicableParameters("give --mu or --k")
    return lam, nu, mu


def _classical_checks(family: str, lam, nu, mu) -> list[dict]:
    c = classical_cocycle(family, lam, nu, mu, check=False)
    closed = is_cocycle(c)
    checks = [_check(f"{family}: delta1 = 0", closed)]
    if closed:
        checks.append(_check(f"{family}: nontrivial", not is_trivial(c, check=False).trivial))
    return checks


def cmd_verify(cfg: RunConfig) -> int:
    fam = cfg.family
    checks: list[dict] = []
    if fam == "c+d":
        if cfg.k is None or cfg.s is None:
            raise InapplicableParameters("c+d needs --k and --s")
        got, expected = cd_identity(cfg.k, cfg.s)
        checks.append(_check(f"c + d = h'(fg)^({cfg.k + 1})", got == expected))
        lam, nu = Fraction(-cfg.s, 2), Fraction(-(cfg.k - cfg.s), 2)
        mu = lam + nu + cfg.k + 1
        for part in ("c", "d"):
            checks += _classical_checks(part, lam, nu, mu)
    elif fam in CLASSICAL_FAMILIES:
        lam, nu, mu = _family_triple(cfg)
        checks += _classical_checks(fam, lam, nu, mu)
    elif fam == "super":
        lam, nu, mu = cfg.triple()
        members = super_family_members(lam, nu, mu)
        if not members:
            raise InapplicableParameters("no closed-form super family applies here")
        for m in members:
            checks.append(_check(m.name, m.ok, m.note))
    else:
        raise InapplicableParameters(f"unknown family {fam!r}")
    rec = {"command": "verify", "family": fam, "lambda": fmt_q(lam), "nu": fmt_q(nu),
           "mu": fmt_q(mu), "checks": checks,
           "passed": all(c["status"] == "PASS" for c in checks)}
    _emit(cfg, rec)
    return EXIT_OK if rec["passed"] else EXIT_INTERNAL


def cmd_bracket(cfg: RunConfig) -> int:
    try:
        F, G = parse_superfunction(cfg.left), parse_superfunction(cfg.right)
    except ValueError as exc:
        raise InapplicableParameters(str(exc)) from exc
    rec = {"command": "bracket", "left": format_superfunction(F),
           "right": format_superfunction(G),
           "result": format_superfunction(contact_bracket(F, G))}
    if cfg.fmt == "json":
        _emit(cfg, rec)
    else:
        sys.stdout.write(rec["result"] + "\n")
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify, "dim": cmd_dim, "table": cmd_table,
    "basis": cmd_basis, "verify": cmd_verify, "bracket": cmd_bracket,
}


# ---------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam")
    common.add_argument("--nu")
    common.add_argument("--mu")
    common.add_argument("--order", type=int)
    common.add_argument("--xdeg", type=int)
    common.add_argument("--max-order", type=int,
                        help="ceiling for the stabilization search (default: adaptive)")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--classical", action="store_const", dest="mode", const="classical")
    mode.add_argument("--relative", action="store_const", dest="mode", const="relative")
    common.add_argument("--strict", action="store_true")
    common.add_argument("--format", dest="fmt", choices=("json", "tsv", "pretty"), default="json")

    p = argparse.ArgumentParser(prog="supercohom", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="resonance class of a triple")
    sub.add_parser("dim", parents=[common], help="dimension of H^1")
    t = sub.add_parser("table", parents=[common], help="sweep over a grid of triples")
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--delta-range", default="0..8",
                   help="values of 2(mu - lambda - nu), as a..b or a..b:step")
    t.add_argument("--s-max", type=int, default=4)
    t.add_argument("--t-max", type=int, default=4)
    sub.add_parser("basis", parents=[common], help="explicit cocycles spanning H^1")
    v = sub.add_parser("verify", parents=[common], help="build and check a cocycle family")
    v.add_argument("--family", required=True,
                   help="a1, a2, a4, b, c, d, c+d or super")
    v.add_argument("--k", type=int)
    v.add_argument("--s", type=int)
    v.add_argument("--t", type=int)
    b = sub.add_parser("bracket", parents=[common], help="contact bracket of two superfunctions")
    b.add_argument("left")
    b.add_argument("right")
    return p


VALUE_FLAGS = ("--lambda", "--nu", "--mu")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--lambda -1/2`` into ``--lambda=-1/2`` so argparse does not
    mistake the value for an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def parse_config(argv=None) -> RunConfig:
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = vars(build_parser().parse_args(_glue_negative_values(argv)))
    ns["mode"] = ns.get("mode") or "super"
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in ns.items() if k in fields})


def main(argv=None) -> int:
    cfg = parse_config(argv)
    try:
        return COMMANDS[cfg.command](cfg)
    except (InapplicableParameters, FormulaInconsistent) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except Exception as exc:  # noqa: BLE001 - report and map to the internal-error code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("schema.json").read_text())


if __name__ == "__main__":
    sys.exit(main())
