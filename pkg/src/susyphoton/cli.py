"""Command-line front end: parameter sweeps, verification and figure data.

Every CSV starts with one ``#``-prefixed JSON line carrying the tool
version and the fully resolved configuration, followed by a header row.
Floats are written with 17 significant digits so identical runs produce
identical bytes.  Exit codes: 0 success, 1 numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from . import __version__, dynamics, phase_space, scalar_mcs, susy_states, verification
from .fock_core import DEFAULT_POLICY, TruncationPolicy
from .scalar_mcs import McsSpec
from .susy_states import SusySpec

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "m": 1,
    "j": 0,
    "z": None,
    "z_grid": None,
    "k2": None,
    "k2_range": None,
    "a": "1",
    "c": "1",
    "omega": 1.0,
    "trunc": None,
    "out": None,
    "format": None,
    "kind": "scalar",
    "grid": "-8:8:257,-8:8:257",
    "find_root": False,
    "root_range": "-5:5",
}


class UsageError(ValueError):
    pass


class NumericFailure(RuntimeError):
    pass


# -- parsing helpers ---------------------------------------------------------


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"cannot read {text!r} as a complex number") from None


def parse_range(text: str, with_count: bool = True) -> tuple[float, float, int] | tuple[float, float]:
    parts = str(text).split(":")
    try:
        if with_count:
            if len(parts) != 3:
                raise ValueError
            return float(parts[0]), float(parts[1]), int(parts[2])
        if len(parts) != 2:
            raise ValueError
        return float(parts[0]), float(parts[1])
    except ValueError:
        shape = "start:stop:count" if with_count else "start:stop"
        raise UsageError(f"range {text!r} must look like {shape}") from None


def z_values(cfg: dict) -> list[complex]:
    """Points from ``--z`` (explicit list) or ``--z-grid`` (``a:b:n`` or ``a:b:n,c:d:k``)."""
    if cfg["z"] is not None and cfg["z_grid"] is not None:
        raise UsageError("give either --z or --z-grid, not both")
    if cfg["z"] is not None:
        vals = cfg["z"] if isinstance(cfg["z"], list) else [cfg["z"]]
        return [parse_complex(v) for v in vals]
    if cfg["z_grid"] is None:
        return [1.0 + 0j]
    axes = str(cfg["z_grid"]).split(",")
    if len(axes) > 2:
        raise UsageError("--z-grid takes at most two comma-separated ranges")
    re_lo, re_hi, re_n = parse_range(axes[0])
    res = np.linspace(re_lo, re_hi, re_n) if re_n > 0 else np.array([])
    if len(axes) == 1:
        return [complex(r) for r in res]
    im_lo, im_hi, im_n = parse_range(axes[1])
    ims = np.linspace(im_lo, im_hi, im_n) if im_n > 0 else np.array([])
    return [complex(r, i) for r in res for i in ims]


def k2_values(cfg: dict) -> list[float]:
    if cfg["k2"] is not None and cfg["k2_range"] is not None:
        raise UsageError("give either --k2 or --k2-range, not both")
    if cfg["k2"] is not None:
        vals = cfg["k2"] if isinstance(cfg["k2"], list) else [cfg["k2"]]
        return [float(v) for v in vals]
    if cfg["k2_range"] is not None:
        lo, hi, n = parse_range(cfg["k2_range"])
        return [float(v) for v in np.linspace(lo, hi, n)] if n > 0 else []
    return [0.0]


def grid_spec(cfg: dict) -> phase_space.GridSpec:
    axes = str(cfg["grid"]).split(",")
    if len(axes) != 2:
        raise UsageError("--grid must look like qmin:qmax:nq,pmin:pmax:np")
    q0, q1, nq = parse_range(axes[0])
    p0, p1, npts = parse_range(axes[1])
    try:
        return phase_space.GridSpec(q0, q1, p0, p1, nq, npts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def policy(cfg: dict) -> TruncationPolicy:
    if cfg["trunc"] is None:
        return DEFAULT_POLICY
    if int(cfg["trunc"]) < 1:
        raise UsageError("--trunc must be a positive integer")
    return TruncationPolicy(override=int(cfg["trunc"]))


def validate(cfg: dict) -> None:
    m, j = cfg["m"], cfg["j"]
    if int(m) != m or m < 1:
        raise UsageError(f"--m must be a positive integer, got {m}")
    if int(j) != j or not 0 <= j < m:
        raise UsageError(f"--j must satisfy 0 <= j < m (got j={j}, m={m})")
    if not cfg["omega"] > 0:
        raise UsageError("--omega must be positive")
    if cfg["kind"] not in ("scalar", "susy"):
        raise UsageError("--kind must be scalar or susy")
    if cfg["format"] not in (None, "csv", "json"):
        raise UsageError("--format must be csv or json")
    cfg["a_value"] = parse_complex(cfg["a"])
    cfg["c_value"] = parse_complex(cfg["c"])
    if cfg["a_value"] == 0 and cfg["c_value"] == 0:
        raise UsageError("--a and --c cannot both be zero")


# -- output ----------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def _jsonable(cfg: dict) -> dict:
    out = {}
    for key, val in sorted(cfg.items()):
        if key in ("a_value", "c_value", "config", "command"):
            continue
        out[key] = val
    return out


def meta(cfg: dict, command: str) -> dict:
    return {"tool": "susyphoton", "version": __version__, "command": command, "config": _jsonable(cfg)}


def write_csv(stream, header: list[str], rows, info: dict) -> None:
    stream.write("# " + json.dumps(info, sort_keys=True) + "\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


def _float(v):
    if isinstance(v, (bool, str)):
        return v
    f = float(v)
    return f if math.isfinite(f) else str(f)


def write_json(stream, doc: dict) -> None:
    stream.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def emit(cfg: dict, text: str, suffix: str = "") -> None:
    path = cfg["out"]
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    p = Path(path)
    if suffix:
        p = p.with_name(f"{p.stem}{suffix}{p.suffix}")
    p.write_text(text, newline="\n")


def _parallel_map(fn, items):
    n = phase_space.thread_count()
    if n <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def _table(cfg, command, header, rows, suffix=""):
    buf = io.StringIO()
    if cfg["format"] == "json":
        doc = {"meta": meta(cfg, command), "columns": header,
               "rows": [[_float(v) if not isinstance(v, str) else v for v in r] for r in rows]}
        write_json(buf, doc)
    else:
        write_csv(buf, header, rows, meta(cfg, command))
    emit(cfg, buf.getvalue(), suffix)


# -- commands --------------------------------------------------------------


def _susy(cfg, z, k2) -> SusySpec:
    return SusySpec(cfg["m"], cfg["j"], z, k2, cfg["a_value"], cfg["c_value"])


def cmd_hur(cfg: dict) -> int:
    zs = z_values(cfg)
    header = ["re_z", "im_z", "sigma_q", "sigma_p", "product"]
    if cfg["kind"] == "scalar":
        def row(z):
            spec = McsSpec(cfg["m"], cfg["j"], z)
            q1, q2 = scalar_mcs.s_moments(spec, 0)
            p1, p2 = scalar_mcs.s_moments(spec, 1)
            sq, sp = math.sqrt(max(q2 - q1 * q1, 0)), math.sqrt(max(p2 - p1 * p1, 0))
            return [z.real, z.imag, sq, sp, sq * sp]

        _table(cfg, "hur", header, _parallel_map(row, zs))
        return EXIT_OK
    ks = k2_values(cfg)
    for k2 in ks:
        def row(z, k2=k2):
            spec = _susy(cfg, z, k2)
            sq = math.sqrt(max(susy_states.s_variance_susy(spec, 0), 0))
            sp = math.sqrt(max(susy_states.s_variance_susy(spec, 1), 0))
            return [z.real, z.imag, sq, sp, sq * sp]

        suffix = f".k2_{fmt(k2)}" if len(ks) > 1 else ""
        _table(dict(cfg, k2=k2), "hur", header, _parallel_map(row, zs), suffix)
    return EXIT_OK


def cmd_mandel(cfg: dict) -> int:
    if cfg["kind"] == "scalar":
        if cfg["find_root"]:
            raise UsageError("--find-root applies to --kind susy (k2 sweeps)")

        def row(z):
            try:
                q = scalar_mcs.mandel_q(McsSpec(cfg["m"], cfg["j"], z))
            except ValueError:
                q = float("nan")
            return [abs(z), q]

        _table(cfg, "mandel", ["abs_z", "Q"], _parallel_map(row, z_values(cfg)))
        return EXIT_OK
    zs = z_values(cfg)
    if len(zs) != 1 or zs[0].imag != 0:
        raise UsageError("the SUSY Q sweep runs over k2 at one real --z")
    z = zs[0]
    if cfg["find_root"]:
        lo, hi = parse_range(cfg["root_range"], with_count=False)
        roots = susy_states.mandel_k2_roots(cfg["m"], cfg["j"], z, cfg["a_value"], cfg["c_value"], lo, hi)
        if not roots:
            raise NumericFailure(f"no Poissonian crossing in range [{lo:g}, {hi:g}]")
        _table(cfg, "mandel", ["root_k2"], [[r] for r in roots])
        return EXIT_OK

    def krow(k2):
        return [k2, susy_states.mandel_q_susy(_susy(cfg, z, k2))]

    _table(cfg, "mandel", ["k2", "Q"], _parallel_map(krow, k2_values(cfg)))
    return EXIT_OK


def cmd_wigner(cfg: dict) -> int:
    zs = z_values(cfg)
    if len(zs) != 1:
        raise UsageError("wigner takes exactly one --z")
    z = zs[0]
    gs = grid_spec(cfg)
    try:
        if cfg["kind"] == "scalar":
            g = phase_space.wigner_scalar_mcs(McsSpec(cfg["m"], cfg["j"], z), gs, policy=policy(cfg))
        else:
            ks = k2_values(cfg)
            if len(ks) != 1:
                raise UsageError("wigner takes exactly one --k2")
            g = phase_space.wigner_susy(_susy(cfg, z, ks[0]), gs, policy=policy(cfg))
    except ValueError as exc:
        if "enlarge" in str(exc):
            raise NumericFailure(f"{exc} (for example --grid=-10:10:321,-10:10:321)") from None
        raise
    low, neg_volume = phase_space.negativity(g)
    info = meta(cfg, "wigner")
    info.update(normalization_residual=g.normalization_residual, min_value=low, negative_volume=neg_volume)
    buf = io.StringIO()
    if cfg["format"] == "csv":
        rows = ([q, p, g.values[i, k]] for i, q in enumerate(g.q_axis) for k, p in enumerate(g.p_axis))
        write_csv(buf, ["q", "p", "W"], rows, info)
    else:
        doc = {"meta": info, "axes": {"q": g.q_axis.tolist(), "p": g.p_axis.tolist()},
               "grid": g.values.reshape(-1).tolist()}
        write_json(buf, doc)
    emit(cfg, buf.getvalue())
    return EXIT_OK


def cmd_phase(cfg: dict) -> int:
    zs, ks = z_values(cfg), k2_values(cfg)
    points = [(z, k2) for z in zs for k2 in ks] if cfg["kind"] == "susy" else [(z, None) for z in zs]

    def row(pt):
        z, k2 = pt
        try:
            if k2 is None:
                rep = dynamics.loop_check(scalar_mcs.build_mcs(McsSpec(cfg["m"], cfg["j"], z), policy(cfg)).vector,
                                          cfg["m"], cfg["j"], cfg["omega"], dynamics.SCALAR)
            else:
                s = susy_states.build_supercoherent(_susy(cfg, z, k2), policy(cfg))
                rep = dynamics.loop_check(s, cfg["m"], cfg["j"], cfg["omega"], dynamics.SUSY)
            return [z.real, z.imag, 0.0 if k2 is None else k2, rep.total_phase, rep.geometric_phase,
                    rep.fidelity, "ok"]
        except (ArithmeticError, ValueError) as exc:
            nan = float("nan")
            return [z.real, z.imag, 0.0 if k2 is None else k2, nan, nan, nan, str(exc).replace(",", ";")]

    _table(cfg, "phase", ["re_z", "im_z", "k2", "phi", "beta", "fidelity", "status"], _parallel_map(row, points))
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    report = verification.run(cfg["level"])
    buf = io.StringIO()
    doc = report.as_dict()
    doc["version"] = __version__
    write_json(buf, doc)
    emit(cfg, buf.getvalue())
    return EXIT_OK if report.ok else EXIT_NUMERIC


def cmd_decompose(cfg: dict) -> int:
    zs = z_values(cfg)
    if len(zs) != 1:
        raise UsageError("decompose takes exactly one --z")
    try:
        comps = scalar_mcs.scs_decomposition(McsSpec(cfg["m"], cfg["j"], zs[0]))
    except ValueError as exc:
        raise NumericFailure(str(exc)) from None
    rows = [[n, c.label.real, c.label.imag, c.weight.real, c.weight.imag] for n, c in enumerate(comps)]
    _table(cfg, "decompose", ["n", "re_label", "im_label", "re_weight", "im_weight"], rows)
    return EXIT_OK


COMMANDS = {
    "hur": cmd_hur,
    "mandel": cmd_mandel,
    "wigner": cmd_wigner,
    "phase": cmd_phase,
    "verify": cmd_verify,
    "decompose": cmd_decompose,
}


# -- argument handling -----------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # ranges and complex labels such as -2:2:9 or -1+2j are values, not options
        self._negative_number_matcher = re.compile(r"^-\.?\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--m", type=int, help="multiphoton order (default 1)")
    common.add_argument("--j", type=int, help="subspace index, 0 <= j < m (default 0)")
    common.add_argument("--z", nargs="+", help="one or more complex labels, e.g. 1.5 or 1+2j")
    common.add_argument("--z-grid", dest="z_grid", help="a:b:n (real line) or a:b:n,c:d:k (re x im)")
    common.add_argument("--k2", nargs="+", type=float, help="one or more k2 values")
    common.add_argument("--k2-range", dest="k2_range", help="k2 sweep as a:b:n")
    common.add_argument("--a", help="amplitude a_j (complex, default 1)")
    common.add_argument("--c", help="amplitude c_mj (complex, default 1)")
    common.add_argument("--omega", type=float, help="oscillator frequency (default 1)")
    common.add_argument("--trunc", type=int, help="fixed Fock truncation N")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--config", help="TOML file with defaults for any flag")
    common.add_argument("--kind", choices=("scalar", "susy"), help="scalar MCS or SUSY spinor (default scalar)")

    parser = _Parser(prog="susyphoton", description="Multiphoton coherent and supercoherent state numerics.")
    parser.add_argument("--version", action="version", version=f"susyphoton {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("hur", parents=[common], help="uncertainty products over z")
    mp = sub.add_parser("mandel", parents=[common], help="Mandel Q over |z| (scalar) or k2 (SUSY)")
    mp.add_argument("--find-root", dest="find_root", action="store_true", default=argparse.SUPPRESS,
                    help="bisect Q(k2) = 0")
    mp.add_argument("--root-range", dest="root_range", help="k2 bracket a:b (default -5:5)")
    wp = sub.add_parser("wigner", parents=[common], help="Wigner function on a grid")
    wp.add_argument("--grid", help="qmin:qmax:nq,pmin:pmax:np (default -8:8:257,-8:8:257)")
    sub.add_parser("phase", parents=[common], help="loop phase and geometric phase")
    vp = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    vp.add_argument("level", nargs="?", choices=("quick", "full"), default="quick")
    sub.add_parser("decompose", parents=[common], help="coherent-state circle decomposition")
    return parser


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad TOML in {path}: {exc}") from None
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args: argparse.Namespace) -> dict:
    """Built-in defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    given = vars(args)
    if given.get("config"):
        file_cfg = load_config(given["config"])
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(file_cfg)
    cfg.update({k: v for k, v in given.items() if k != "config" and v is not None})
    if cfg["format"] is None:
        cfg["format"] = "json" if args.command in ("wigner", "verify") else "csv"
    validate(cfg)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"susyphoton: usage error: {exc}\n")
        return EXIT_USAGE
    except (NumericFailure, ArithmeticError, ValueError) as exc:
        sys.stderr.write(f"susyphoton: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
