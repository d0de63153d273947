"""Config ingestion, run orchestration and report emission."""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime as _dt
import hashlib
import io
import itertools
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from ._kernel import apply_thread_setting
from .fixtures import builtin_suite, log_concave_body_family, make_body, make_density, make_function, make_set
from .grid import Grid
from .harness import (
    DEFAULT_LAMBDA_GRID,
    CheckParams,
    CheckReport,
    Fixture,
    TheoremId,
    check_inequality,
    estimate_gz_constant,
)

CSV_HEADER = ("theorem_id", "p", "t", "lambda", "s", "lhs", "rhs", "margin", "tolerance", "pass", "notes")
FORMATS = ("csv", "structured")
MIN_RESOLUTION = 16

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2

_FUNCTION_KINDS = {"interval", "box", "ball", "polygon", "gaussian_profile", "triangular_profile",
                   "exponential_profile", "min_triangular_profile", "tabulated_profile"}
_SET_KINDS = {"interval", "box", "ball", "polygon"}
_PATH_KEYS = ("path",)


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class ReportRow:
    theorem_id: str
    p: float
    t: float
    lam: float
    s: float
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool
    notes: str
    applicable: bool = True

    @classmethod
    def from_check(cls, r: CheckReport) -> "ReportRow":
        parts = [f"fixture={r.fixture}"]
        if r.notes:
            parts.append(r.notes)
        parts.extend(f"violation: {v}" for v in r.hypothesis_violations)
        return cls(r.theorem.value, r.p, r.t, r.lam, r.s, r.lhs, r.rhs, r.margin, r.tolerance,
                   r.passed, "; ".join(parts), r.applicable)

    def as_dict(self) -> dict:
        d = asdict(self)
        return {"theorem_id": d["theorem_id"], "p": d["p"], "t": d["t"], "lambda": d["lam"],
                "s": d["s"], "lhs": d["lhs"], "rhs": d["rhs"], "margin": d["margin"],
                "tolerance": d["tolerance"], "pass": d["passed"], "notes": d["notes"],
                "applicable": d["applicable"]}

    @classmethod
    def from_dict(cls, d: dict) -> "ReportRow":
        return cls(d["theorem_id"], d["p"], d["t"], d["lambda"], d["s"], d["lhs"], d["rhs"],
                   d["margin"], d["tolerance"], d["pass"], d["notes"], d.get("applicable", True))


@dataclass(frozen=True)
class ObjectSpec:
    kind: str
    params: dict


@dataclass(frozen=True)
class RunConfig:
    problem: tuple
    dim: int
    density: ObjectSpec
    objects: dict
    grid_lo: tuple
    grid_hi: tuple
    resolution: int
    lambda_grid: int
    p_grid: tuple
    t_grid: tuple
    s_grid: tuple
    tolerance_scale: float = 1.0
    output_path: Optional[str] = None
    output_format: str = "csv"
    digest: str = ""
    name: str = "config"

    def grid(self) -> Grid:
        return Grid.box(list(self.grid_lo), list(self.grid_hi), self.resolution)

    def base_params(self) -> CheckParams:
        return CheckParams(1.0, 0.5, lambda_grid=self.lambda_grid, tolerance_scale=self.tolerance_scale)

    def fixture(self) -> Fixture:
        G = self.grid()
        built = {}
        for key, spec in self.objects.items():
            if key in ("f", "g"):
                built[key] = make_function(spec.kind, G, **spec.params)
            elif key in ("A", "B"):
                built[key] = make_set(spec.kind, G, **spec.params)
            else:
                built[key] = make_body(spec.kind, self.dim, **spec.params)
        mu = make_density(self.density.kind, self.dim, **self.density.params)
        return Fixture(self.name, mu, **built)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _float_list(text: str, what: str) -> tuple:
    vals = []
    for tok in text.replace(",", " ").split():
        try:
            vals.append(float(tok))
        except ValueError:
            raise ConfigError(f"{what}: cannot parse {tok!r} as a number") from None
    if not vals:
        raise ConfigError(f"{what}: grid is empty")
    return tuple(vals)


def _int(sec, key: str, default: int) -> int:
    try:
        return sec.getint(key, fallback=default)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer") from None


def _object_spec(cp: configparser.ConfigParser, name: str, base: Path) -> ObjectSpec:
    sec = cp[name]
    if "kind" not in sec:
        raise ConfigError(f"section [{name}] lacks a kind")
    params = {k: v for k, v in sec.items() if k != "kind"}
    for k in _PATH_KEYS:
        if k in params:
            path = Path(params[k])
            if not path.is_absolute():
                path = base / path
            if not path.exists():
                raise ConfigError(f"[{name}] {k}: file {path} does not exist")
            params[k] = str(path)
    if "normalize" in params:
        params["normalize"] = sec.getboolean("normalize")
    return ObjectSpec(sec["kind"].strip().lower(), params)


def parse_config(text: str, base: Path = Path("."), name: str = "config",
                 overrides: Optional[dict] = None) -> RunConfig:
    """Parse INI text into a RunConfig. Overrides come from command-line flags."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    if "run" not in cp:
        raise ConfigError("missing [run] section")
    run = cp["run"]
    raw = run.get("problem", "").strip()
    if not raw:
        raise ConfigError("[run] problem is required")
    if raw.lower() == "all":
        problem = tuple(TheoremId)
    else:
        try:
            problem = tuple(TheoremId.parse(tok) for tok in raw.replace(",", " ").split())
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    dim = _int(run, "dimension", 1)
    if dim not in (1, 2, 3):
        raise ConfigError("dimension must be 1, 2 or 3")

    density = _object_spec(cp, "density", base) if "density" in cp else ObjectSpec("lebesgue", {})
    objects = {}
    for key in ("f", "g", "A", "B", "K", "L"):
        if key in cp:
            spec = _object_spec(cp, key, base)
            if key in ("f", "g") and spec.kind not in _FUNCTION_KINDS:
                raise ConfigError(f"[{key}] unknown function kind {spec.kind!r}")
            if key in ("A", "B") and spec.kind not in _SET_KINDS:
                raise ConfigError(f"[{key}] unknown set kind {spec.kind!r}")
            objects[key] = spec

    gsec = cp["grid"] if "grid" in cp else {}
    lo = _float_list(gsec.get("lo", "-2"), "grid lo")
    hi = _float_list(gsec.get("hi", "2"), "grid hi")
    lo = lo * dim if len(lo) == 1 else lo
    hi = hi * dim if len(hi) == 1 else hi
    if len(lo) != dim or len(hi) != dim or any(a >= b for a, b in zip(lo, hi)):
        raise ConfigError("grid box does not match the dimension or is empty")
    res = overrides.get("resolution", _int(gsec, "resolution", 64) if gsec else 64)
    lam = overrides.get("lambda_grid", _int(gsec, "lambda", DEFAULT_LAMBDA_GRID) if gsec else DEFAULT_LAMBDA_GRID)
    if res < MIN_RESOLUTION:
        raise ConfigError(f"resolution must be >= {MIN_RESOLUTION}")
    if lam < 2:
        raise ConfigError("lambda count must be >= 2")

    ssec = cp["sweep"] if "sweep" in cp else {}
    p_grid = _float_list(ssec.get("p", "1"), "p grid")
    t_grid = _float_list(ssec.get("t", "0.5"), "t grid")
    s_grid = _float_list(ssec.get("s", "1"), "s grid")
    if any(p < 1 for p in p_grid):
        raise ConfigError("p grid values must be >= 1")
    if any(not 0 <= t <= 1 for t in t_grid):
        raise ConfigError("t grid values must lie in [0, 1]")
    if any(s < 0 for s in s_grid):
        raise ConfigError("s grid values must be >= 0")

    osec = cp["output"] if "output" in cp else {}
    out_path = overrides.get("out", osec.get("path") if osec else None)
    fmt = overrides.get("format", osec.get("format", "csv") if osec else "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"unknown output format {fmt!r}")
    tol = float(overrides.get("tolerance_scale", 1.0))
    if tol <= 0:
        raise ConfigError("tolerance scale must be positive")

    canon = io.StringIO()
    for sec in sorted(cp.sections()):
        canon.write(f"[{sec}]\n")
        for k in sorted(cp[sec]):
            canon.write(f"{k}={cp[sec][k].strip()}\n")
    canon.write(json.dumps({k: overrides[k] for k in sorted(overrides)}, sort_keys=True))
    digest = hashlib.sha256(canon.getvalue().encode()).hexdigest()

    return RunConfig(problem, dim, density, objects, tuple(lo), tuple(hi), int(res), int(lam),
                     p_grid, t_grid, s_grid, tol, out_path, fmt, digest, name)


def load_config(path, overrides: Optional[dict] = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, path.parent, path.stem, overrides)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return "%.12g" % x


def format_csv(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.theorem_id, _fmt(r.p), _fmt(r.t), _fmt(r.lam), _fmt(r.s), _fmt(r.lhs),
                    _fmt(r.rhs), _fmt(r.margin), _fmt(r.tolerance), "true" if r.passed else "false",
                    r.notes])
    return buf.getvalue()


def format_structured(rows: Sequence[ReportRow], meta: dict) -> str:
    doc = {"meta": meta, "rows": [r.as_dict() for r in rows]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_structured(text: str) -> tuple[dict, list[ReportRow]]:
    doc = json.loads(text)
    return doc["meta"], [ReportRow.from_dict(d) for d in doc["rows"]]


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def emit_report(rows: Sequence[ReportRow], fmt: str = "csv", path=None, *, allow_empty: bool = False,
                digest: str = "", started: Optional[str] = None) -> str:
    """Serialize rows; write to ``path`` when given. Returns the serialized text."""
    if not rows and not allow_empty:
        raise ValueError("no rows to emit")
    if fmt == "csv":
        text = format_csv(rows)
    elif fmt == "structured":
        meta = {"version": __version__, "config_digest": digest,
                "timestamps": {"started": started or _now(), "finished": _now()}}
        text = format_structured(rows, meta)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    status: int
    rows: list
    messages: list = field(default_factory=list)
    text: str = ""
    out: Optional[str] = None


def _status(rows: Sequence[ReportRow], messages: list) -> int:
    failures = [r for r in rows if r.applicable and not r.passed]
    for r in failures:
        messages.append(f"FAIL {r.theorem_id} p={_fmt(r.p)} t={_fmt(r.t)} s={_fmt(r.s)} "
                        f"margin={_fmt(r.margin)} tol={_fmt(r.tolerance)} ({r.notes})")
    if failures:
        messages.append(f"{len(failures)} applicable check(s) failed")
        return EXIT_FAIL
    if rows and not any(r.applicable for r in rows):
        messages.append("warning: every check was inapplicable under its hypotheses")
    return EXIT_OK


def _run_checks(cfg: RunConfig, single: bool) -> list[ReportRow]:
    if single and (len(cfg.p_grid), len(cfg.t_grid), len(cfg.s_grid)) != (1, 1, 1):
        raise ConfigError("check takes a single (p, t, s); use sweep for grids")
    fx = cfg.fixture()
    base = cfg.base_params()
    rows = []
    for th in cfg.problem:
        for p, t, s in itertools.product(cfg.p_grid, cfg.t_grid, cfg.s_grid):
            rep = check_inequality(th, fx, replace(base, p=p, t=t, s=s))
            rows.append(ReportRow.from_check(rep))
    return rows


def _run_gz(cfg: RunConfig, messages: list) -> list[ReportRow]:
    if "K" in cfg.objects and "L" in cfg.objects:
        family = [cfg.fixture()]
    else:
        family = log_concave_body_family()
    est = estimate_gz_constant(family, cfg.p_grid, cfg.t_grid)
    base = cfg.base_params()
    rows = []
    for fx in family:
        for p, t in itertools.product(cfg.p_grid, cfg.t_grid):
            rep = check_inequality(TheoremId.GZ_LOGCONCAVE_C, fx, replace(base, p=p, t=t))
            rows.append(ReportRow.from_check(rep))
    w = est.witness
    wtxt = f"{w[0]} p={_fmt(w[1])} t={_fmt(w[2])}" if w else "none"
    messages.append(f"C_est={_fmt(est.C)} instances={est.instances} witness={wtxt}")
    messages.extend(f"skipped: {s}" for s in est.skipped)
    return rows


def _run_selftest(resolution: int, tolerance_scale: float, messages: list) -> tuple[list, int]:
    rows, mismatches = [], 0
    for case in builtin_suite(resolution):
        base = CheckParams(1.0, 0.5, lambda_grid=case.lambda_grid, tolerance_scale=tolerance_scale)
        for p, t, s in itertools.product(case.p_grid, case.t_grid, case.s_grid):
            rep = check_inequality(case.theorem, case.fixture, replace(base, p=p, t=t, s=s))
            row = ReportRow.from_check(rep)
            rows.append(row)
            if row.applicable != case.expect_applicable:
                mismatches += 1
                messages.append(f"MISMATCH {row.theorem_id}: applicability {row.applicable}, "
                                f"expected {case.expect_applicable} ({row.notes})")
    return rows, mismatches


def run_config(command: str, path=None, overrides: Optional[dict] = None) -> RunResult:
    """Execute a subcommand. Never raises on bad input; the status carries the outcome."""
    overrides = dict(overrides or {})
    messages: list = []
    started = _now()
    try:
        if command == "selftest":
            res = overrides.get("resolution") or 64
            if res < MIN_RESOLUTION:
                raise ConfigError(f"resolution must be >= {MIN_RESOLUTION}")
            rows, mismatches = _run_selftest(res, overrides.get("tolerance_scale") or 1.0, messages)
            status = _status(rows, messages)
            if mismatches:
                status = EXIT_FAIL
            fmt, out = overrides.get("format") or "csv", overrides.get("out")
            digest = hashlib.sha256(json.dumps(
                {k: overrides[k] for k in sorted(overrides) if overrides[k] is not None}).encode()).hexdigest()
        else:
            if path is None:
                raise ConfigError(f"{command} needs a config path")
            cfg = load_config(path, overrides)
            if command == "check":
                rows = _run_checks(cfg, single=True)
            elif command == "sweep":
                rows = _run_checks(cfg, single=False)
            elif command == "gz-constant":
                rows = _run_gz(cfg, messages)
            else:
                raise ConfigError(f"unknown command {command!r}")
            status = _status(rows, messages)
            fmt, out, digest = cfg.output_format, cfg.output_path, cfg.digest
    except (ConfigError, ValueError, FileNotFoundError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        return RunResult(EXIT_PARSE, [], [f"error: {msg}"])
    try:
        text = emit_report(rows, fmt, out, allow_empty=True, digest=digest, started=started)
    except OSError as exc:
        return RunResult(EXIT_PARSE, rows, messages + [f"error: {exc}"])
    return RunResult(status, rows, messages, text, out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--resolution", type=int, help="grid cells per axis (>= 16)")
    common.add_argument("--lambda", dest="lambda_grid", type=int, help="lambda grid count")
    common.add_argument("--out", help="report path (stdout when omitted)")
    common.add_argument("--format", choices=FORMATS, help="report format")
    common.add_argument("--tolerance-scale", dest="tolerance_scale", type=float,
                        help="multiplier on the check tolerance")
    ap = argparse.ArgumentParser(prog="lpbm", description="Numerical checks of Lp Brunn-Minkowski inequalities.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("check", "evaluate one (p, t, s) point"),
                        ("sweep", "evaluate the full p, t, s grid"),
                        ("gz-constant", "estimate the log-concave constant")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("config")
    sub.add_parser("selftest", parents=[common], help="run the built-in fixture suite")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    apply_thread_setting()
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    overrides = {"resolution": args.resolution, "lambda_grid": args.lambda_grid, "out": args.out,
                 "format": args.format, "tolerance_scale": args.tolerance_scale}
    result = run_config(args.command, getattr(args, "config", None), overrides)
    for m in result.messages:
        print(m, file=sys.stderr)
    if result.text and result.out is None:
        sys.stdout.write(result.text)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
