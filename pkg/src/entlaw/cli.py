"""Command-line interface: ``entlaw {dh,rains,secondlaw,trend,verify,gen-state}``.

Exit codes: 0 ok, 1 acceptance failure, 2 unreadable or invalid input,
3 shape mismatch, 4 solver failure, 5 second-law violation.

State files are JSON::

    {"schema_version": "1", "dimA": 2, "dimB": 2,
     "entries": [[row, col, re, im], ...]}

listing the lower triangle (``row >= col``) of a Hermitian matrix; missing
entries are zero. :func:`write_state` is canonical (sorted entries, nonzero
only, shortest round-trip floats), so ``write(read(f))`` reproduces a
canonical file byte for byte. Report values are printed with 12 significant
digits; infinities print as ``"+inf"``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Dict, List, Sequence

import numpy as np

from . import __version__
from .errors import DimensionError, DomainError, EntlawError, InvalidStateError, NumericalFailure, NotHermitianError
from .hyptest import dh_lp_oracle, dh_neyman_pearson, dh_sdp
from .linalg import HermitianOperator
from .rains import rains
from .secondlaw import build_protocols, library_specs, run_protocols, tensor_power_trend
from .states import isotropic_state, max_entangled, maximally_mixed, product_state, random_density

__all__ = ["main", "read_state", "write_state", "StateFileError", "SCHEMA_VERSION"]

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SHAPE, EXIT_SOLVER, EXIT_VIOLATION = 0, 1, 2, 3, 4, 5
TRACE_TOL = 1e-8


class StateFileError(EntlawError, ValueError):
    """Malformed state file; ``line``/``column`` locate JSON syntax errors."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


# ----------------------------------------------------------------------------
# State files


def parse_state(text: str, name: str = "<state>", require_state: bool = True) -> HermitianOperator:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{name}:{exc.lineno}:{exc.colno}: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise StateFileError(f"{name}: top level must be an object")
    for key in ("schema_version", "dimA", "dimB", "entries"):
        if key not in doc:
            raise StateFileError(f"{name}: missing key {key!r}")
    if str(doc["schema_version"]) != SCHEMA_VERSION:
        raise StateFileError(f"{name}: unsupported schema_version {doc['schema_version']!r}")
    da, db = doc["dimA"], doc["dimB"]
    if not (isinstance(da, int) and isinstance(db, int) and da >= 1 and db >= 1):
        raise StateFileError(f"{name}: dimA and dimB must be positive integers")
    n = da * db
    m = np.zeros((n, n), dtype=complex)
    seen = set()
    for k, ent in enumerate(doc["entries"]):
        if not (isinstance(ent, list) and len(ent) == 4):
            raise StateFileError(f"{name}: entry {k} must be [row, col, re, im]")
        r, c, re, im = ent
        if not (isinstance(r, int) and isinstance(c, int)):
            raise StateFileError(f"{name}: entry {k} has non-integer indices")
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in (re, im)):
            raise StateFileError(f"{name}: entry {k} has non-finite or non-numeric values")
        if not (0 <= c <= r < n):
            raise DimensionError(f"{name}: entry {k} index ({r}, {c}) outside the lower triangle of {n}x{n}")
        if (r, c) in seen:
            raise StateFileError(f"{name}: duplicate entry ({r}, {c})")
        if r == c and im != 0:
            raise StateFileError(f"{name}: diagonal entry ({r}, {r}) must be real")
        seen.add((r, c))
        m[r, c] = complex(re, im)
        m[c, r] = complex(re, -im)
    op = HermitianOperator(m, (da, db))
    if require_state:
        from .linalg import min_eigenvalue

        if abs(op.trace() - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"{name}: trace {op.trace():.12g} is not 1")
        if min_eigenvalue(op) < -1e-10:
            raise InvalidStateError(f"{name}: not positive semidefinite")
    return op


def read_state(path: str, require_state: bool = True) -> HermitianOperator:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None
    return parse_state(text, path, require_state)


def dump_state(op: HermitianOperator) -> str:
    da, db = op.dims if op.dims is not None else (op.dim, 1)
    m = op.data
    entries = []
    for r in range(op.dim):
        for c in range(r + 1):
            z = m[r, c]
            re, im = float(z.real), float(z.imag) if r != c else 0.0
            if re != 0.0 or im != 0.0:
                entries.append(f"[{r}, {c}, {re!r}, {im!r}]")
    body = ",\n    ".join(entries)
    return (
        "{\n"
        f'  "schema_version": "{SCHEMA_VERSION}",\n'
        f'  "dimA": {da},\n'
        f'  "dimB": {db},\n'
        f'  "entries": [\n    {body}\n  ]\n'
        "}\n"
    )


def write_state(op: HermitianOperator, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dump_state(op))


# ----------------------------------------------------------------------------
# Report formatting


def fmt(v):
    """12 significant digits; ``+inf``/``-inf``/``nan`` as strings."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return float(f"{v:.12g}")
    return v


def _cell(v) -> str:
    v = fmt(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def render(rows: List[Dict], fmt_name: str, extra: Dict = None) -> str:
    if fmt_name == "json":
        doc = [{k: fmt(v) for k, v in r.items()} for r in rows]
        payload = doc[0] if len(doc) == 1 and extra is None else {"rows": doc, **{k: fmt(v) for k, v in (extra or {}).items()}}
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        keys = list(rows[0].keys())
        w.writerow(keys)
        for r in rows:
            w.writerow([_cell(r[k]) for k in keys])
    return buf.getvalue()


def _emit(text: str, out: str = None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# Commands


def cmd_dh(args) -> int:
    omega = read_state(args.state)
    tau = read_state(args.sigma, require_state=False)
    if omega.dim != tau.dim:
        raise DimensionError(f"state has dimension {omega.dim}, sigma has {tau.dim}")
    res = dh_neyman_pearson(omega, tau, args.eps)
    row = {
        "value_bits": res.value_bits,
        "threshold_mu": res.threshold_mu,
        "boundary_weight": res.boundary_weight,
        "achieved_type1": res.achieved_type1,
        "type2": res.type2,
        "sdp_delta": math.nan,
        "lp_delta": math.nan,
    }
    finite = math.isfinite(res.value_bits)
    if finite and 0.0 < args.eps < 1.0:
        row["sdp_delta"] = dh_sdp(omega, tau, args.eps, tol=args.tol / 100.0) - res.value_bits
    both_diag = all(np.count_nonzero(x.data - np.diag(np.diag(x.data))) == 0 for x in (omega, tau))
    if finite and both_diag:
        row["lp_delta"] = dh_lp_oracle(np.diag(omega.data).real, np.diag(tau.data).real, args.eps) - res.value_bits
    _emit(render([row], args.format), args.out)
    return EXIT_OK


def cmd_rains(args) -> int:
    rho = read_state(args.state)
    if args.method == "reduced" and rho.dims[0] != rho.dims[1]:
        raise DimensionError("the reduced method needs dimA == dimB")
    res = rains(rho, args.eps, args.method, tol=args.tol / 100.0)
    row = {
        "value_bits": res.value_bits,
        "method": res.method,
        "certified_gap": res.certified_gap,
        "eps": res.eps,
        "status": res.status,
        "witness_bits": res.witness_bits,
        "pt_trace_norm": res.optimizer_sigma.pt_trace_norm,
        "psd_margin": res.optimizer_sigma.psd_margin,
    }
    _emit(render([row], args.format), args.out)
    return EXIT_OK


def _load_specs(path: str) -> List[Dict]:
    if path == "library":
        return library_specs()
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}", exc.lineno, exc.colno) from None
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None
    specs = doc if isinstance(doc, list) else [doc]
    if not all(isinstance(s, dict) and "d_in" in s for s in specs):
        raise StateFileError(f"{path}: each protocol spec must be an object with 'd_in'")
    return specs


def cmd_secondlaw(args) -> int:
    specs = _load_specs(args.spec)
    try:
        protos = [p for s in specs for p in build_protocols(s)]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DimensionError):
            raise
        raise StateFileError(f"{args.spec}: bad protocol spec ({exc})") from None
    rows = []
    violations = vacuous = 0
    for rep in run_protocols(protos, args.mode):
        violations += rep.status == "violated"
        vacuous += rep.status == "vacuous"
        rows.append({
            "label": rep.label,
            "mode": rep.budget.mode,
            "d_in": rep.d_in,
            "d_out": rep.d_out,
            "eps1": rep.measured_eps1,
            "eps2": rep.measured_eps2,
            "eps_combined": rep.budget.eps_combined,
            "correction_bits": rep.correction_bits,
            "lhs_bits": rep.lhs_bits,
            "rhs_bits": rep.rhs_bits,
            "composed_distance": rep.composed_distance,
            "status": rep.status,
        })
    _emit(render(rows, args.format, {"violations": violations, "vacuous": vacuous}), args.out)
    sys.stderr.write(f"violations: {violations}\n")
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_trend(args) -> int:
    rows = [
        {"n": n, "value_bits": v, "per_copy_bits": pc, "sdp_bits": s}
        for n, v, pc, s in tensor_power_trend(args.d, args.fidelity, args.eps, args.n)
    ]
    _emit(render(rows, args.format), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import RunConfig, format_result, run_all

    cfg = RunConfig(tolerance=args.tol, seed=args.seed)
    results = run_all(cfg, only=args.only, progress=lambda r: print(format_result(r), flush=True))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {failed}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_gen_state(args) -> int:
    d = args.d
    if args.kind == "max_entangled":
        op = max_entangled(d)
    elif args.kind == "isotropic":
        op = isotropic_state(d, args.fidelity)
    elif args.kind == "maximally_mixed":
        op = maximally_mixed(d)
    elif args.kind == "product":
        e0 = np.zeros(d)
        e0[0] = 1.0
        op = product_state(e0, e0)
    else:
        op = random_density(d * d, rank=args.rank, seed=args.seed, dims=(d, d))
    _emit(dump_state(op), args.out)
    return EXIT_OK


# ----------------------------------------------------------------------------


def _eps(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"eps must lie in [0, 1], got {v}")
    return v


def _tol(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1e-2:
        raise argparse.ArgumentTypeError(f"tolerance must lie in (0, 1e-2], got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entlaw", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"entlaw {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, eps=True):
        if eps:
            p.add_argument("--eps", type=_eps, required=True, help="type-I error / smoothing in [0, 1]")
        p.add_argument("--tol", type=_tol, default=1e-8, help="certificate tolerance (default 1e-8)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    p = sub.add_parser("dh", help="hypothesis testing relative entropy D_H^eps(state || sigma)")
    p.add_argument("state")
    p.add_argument("sigma")
    common(p)
    p.set_defaults(func=cmd_dh)

    p = sub.add_parser("rains", help="eps-Rains relative entropy of a bipartite state")
    p.add_argument("state")
    p.add_argument("--method", choices=("auto", "reduced", "sdp"), default="auto")
    common(p)
    p.set_defaults(func=cmd_rains)

    p = sub.add_parser("secondlaw", help="simulate dilute-then-distill cycles from a protocol spec")
    p.add_argument("spec", help="JSON protocol spec (object or list), or 'library' for the built-in grid")
    p.add_argument("--mode", choices=("fidelity", "trace"), default="fidelity")
    common(p, eps=False)
    p.set_defaults(func=cmd_secondlaw)

    p = sub.add_parser("trend", help="R_H^eps of n-fold tensor powers of an isotropic state (finite n only)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--fidelity", type=float, default=0.9)
    p.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    common(p)
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("verify", help="run the acceptance battery")
    p.add_argument("--tol", type=_tol, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", type=int, nargs="+", metavar="N", help="run only these check numbers")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen-state", help="write a state file")
    p.add_argument("kind", choices=("max_entangled", "isotropic", "maximally_mixed", "product", "random"))
    p.add_argument("--d", type=int, default=2, help="local dimension")
    p.add_argument("--fidelity", type=float, default=0.9, help="Tr[Phi rho] for isotropic states")
    p.add_argument("--rank", type=int, default=None, help="rank for random states")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_gen_state)
    return ap


def main(argv: Sequence[str] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionError as exc:
        print(f"shape error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (InvalidStateError, NotHermitianError, DomainError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericalFailure as exc:
        print(f"solver failure: {exc} (residual {exc.residual!r})", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
