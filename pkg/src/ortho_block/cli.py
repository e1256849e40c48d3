"""``ortho-block`` command line front end.

Exit status: 0 on success, 1 when a residual exceeds its tolerance, 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import OrthoBlockError, SchemaError, VerificationFailure
from .hbasis import HBasis, decompose, reconstruct
from .jacobi import (BlockJacobi, block_partition, build_banded, system_from_json)
from .krein import krein_report
from .matpoly import (MatrixPolynomial, lower_triangularize, scalars_to_matrices,
                      verify_three_term)
from .jacobi import _mat_from_json, _mat_json
from .measures import Measure, MatrixMeasure, orthonormality_residual
from .polycore import Polynomial
from .sobolev import (SobolevSpec, extract_recurrence, minimal_h,
                      orthonormal_family)

DEFAULT_SEED = 42
DEFAULT_TOL = 1e-8
SUBCOMMANDS = ("decompose", "reconstruct", "block-jacobi", "matrixify", "normalize",
               "sobolev", "verify", "krein", "demo")
DEMOS = ("sobolev-legendre", "bavinck-difference", "krein-accumulation")


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    out: str = None
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    fmt: str = "json"

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise SchemaError(f"unknown subcommand {self.subcommand!r}")
        if not self.tol > 0:
            raise SchemaError("tolerance overrides must be positive")


def _fmt(x):
    return format(float(x), ".17g")


def _dump_json(doc):
    return json.dumps(doc) + "\n"


def _dump_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def _need(cfg, key):
    val = cfg.inputs.get(key)
    if val is None:
        raise SchemaError(f"--{key.replace('_', '-')} is required for {cfg.subcommand}")
    return val


def _poly(doc):
    try:
        return Polynomial.from_json(doc)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad polynomial: {exc}") from exc


# subcommands: each returns the output text

def _decompose(cfg):
    basis = HBasis(_poly(_load(_need(cfg, "h"))))
    parts = decompose(_poly(_load(_need(cfg, "p"))), basis)
    return _dump_json({"h": basis.h.to_json(), "parts": [q.to_json() for q in parts]})


def _reconstruct(cfg):
    doc = _load(_need(cfg, "parts"))
    h = _poly(cfg.inputs.get("h") and _load(cfg.inputs["h"]) or doc["h"])
    parts = [_poly(q) for q in doc["parts"]]
    return _dump_json(reconstruct(parts, HBasis(h)).to_json())


def _block_jacobi(cfg):
    sys_ = system_from_json(_load(_need(cfg, "sys")))
    J = build_banded(sys_, int(_need(cfg, "size")))
    if cfg.inputs.get("banded"):
        rows = [(n, m, z.real, z.imag) for n, m, z in J.entries()]
        return _dump_csv(["row", "col", "re", "im"], rows)
    return _dump_json(block_partition(J).to_json())


def _matrixify(cfg):
    sys_ = system_from_json(_load(_need(cfg, "sys")))
    count = int(_need(cfg, "count"))
    p = sys_.polynomials(count * sys_.N)
    P = scalars_to_matrices(p, HBasis(sys_.h))
    return _dump_json({"N": sys_.N, "h": sys_.h.to_json(), "P": [q.to_json() for q in P]})


def _normalize(cfg):
    doc = _load(_need(cfg, "blocks"))
    A = [_mat_from_json(a) for a in doc["A"]]
    B = [_mat_from_json(b) for b in doc["B"]]
    U0 = _mat_from_json(doc["U0"]) if "U0" in doc else None
    Q0 = _mat_from_json(doc["Q0"]) if "Q0" in doc else None
    D, E, U = lower_triangularize(A, B, U0=U0, Q0=Q0)
    return _dump_json({"N": len(B[0]), "D": [_mat_json(d) for d in D],
                       "E": [_mat_json(e) for e in E], "U": [_mat_json(u) for u in U]})


def _sobolev(cfg):
    try:
        spec = SobolevSpec.from_json(_load(_need(cfg, "spec")))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad Sobolev spec: {exc}") from exc
    count = int(_need(cfg, "count"))
    h = minimal_h(spec)
    fam = orthonormal_family(spec, count)
    p = fam.polynomials()
    table = None
    if cfg.inputs.get("extract_recurrence"):
        rs = extract_recurrence(spec, fam, h)
        table = [(n, 0, float(rs.c0[n]), 0.0) for n in range(len(rs.c0))]
        table += [(n, k, rs.c[n, k - 1].real, rs.c[n, k - 1].imag)
                  for n in range(len(rs.c)) for k in range(1, rs.N + 1) if n >= k]
        table.sort()
        if cfg.fmt == "csv":
            return _dump_csv(["n", "k", "re", "im"], table)
    doc = {"N": h.degree, "h": h.to_json(), "L": _mat_json(spec.L()),
           "polynomials": [q.to_json() for q in p],
           "P": [q.to_json() for q in scalars_to_matrices(p, HBasis(h))]}
    if table is not None:
        doc["recurrence"] = [[n, k, re, im] for n, k, re, im in table]
    return _dump_json(doc)


def _verify(cfg):
    fam = _load(_need(cfg, "family"))
    try:
        N = int(fam["N"])
        P = [MatrixPolynomial.from_json(q, N) for q in fam["P"]]
        h = _poly(_load(cfg.inputs["h"]) if cfg.inputs.get("h") else fam["h"])
        L = _mat_from_json(_load(cfg.inputs["L"]) if cfg.inputs.get("L") else fam["L"])
        mu = Measure.from_json(_load(_need(cfg, "measure")))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad verify input: {exc}") from exc
    res = orthonormality_residual(P, MatrixMeasure(mu, N, L), HBasis(h))
    text = f"max_orthonormality_residual {_fmt(res)}\n"
    if res > cfg.tol:
        raise VerificationFailure(text.strip() + f" exceeds tolerance {_fmt(cfg.tol)}", res)
    return text


def _krein_text(mu, h, sizes, eps):
    reports = [krein_report(mu, h, s, eps) for s in sizes]
    main = _dump_csv(["size", "near_fraction", "decay_head", "decay_tail"],
                     [(r.size, r.near_fraction, r.decay_head, r.decay_tail) for r in reports])
    eig = _dump_csv(["size", "index", "eigenvalue"],
                    [(r.size, i, float(v)) for r in reports for i, v in enumerate(r.eigenvalues)])
    return main + "\n" + eig, reports


def _krein(cfg):
    mu = Measure.from_json(_load(_need(cfg, "measure")))
    h = _poly(_load(_need(cfg, "h")))
    sizes = [int(s) for s in str(cfg.inputs.get("sizes") or "25,50,100").split(",")]
    text, _ = _krein_text(mu, h, sizes, float(cfg.inputs.get("epsilon") or 0.1))
    return text


def _demo(cfg):
    from . import demos
    name = _need(cfg, "name")
    if name not in DEMOS:
        raise SchemaError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    return demos.run(name, cfg)


HANDLERS = {
    "decompose": _decompose, "reconstruct": _reconstruct, "block-jacobi": _block_jacobi,
    "matrixify": _matrixify, "normalize": _normalize, "sobolev": _sobolev,
    "verify": _verify, "krein": _krein, "demo": _demo,
}


def _emit(cfg, text):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _thread_limit():
    cap = os.environ.get("ORTHO_BLOCK_THREADS")
    if not cap:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=int(cap))


def run(cfg):
    """Execute one subcommand and return the process exit status."""
    try:
        with _thread_limit():
            text = HANDLERS[cfg.subcommand](cfg)
    except VerificationFailure as exc:
        _emit(cfg, str(exc) + "\n")
        return 1
    except (SchemaError, KeyError, ValueError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OrthoBlockError as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    _emit(cfg, text)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="ortho-block", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("decompose", parents=[common], help="split p into h-basis components")
    p.add_argument("--h", required=True)
    p.add_argument("--p", required=True)

    p = sub.add_parser("reconstruct", parents=[common], help="inverse of decompose")
    p.add_argument("--parts", required=True, help="output of decompose")
    p.add_argument("--h")

    p = sub.add_parser("block-jacobi", parents=[common], help="E_n, D_n of a recurrence")
    p.add_argument("--sys", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--banded", action="store_true", help="dump the banded matrix as CSV")

    p = sub.add_parser("matrixify", parents=[common], help="matrix polynomials of a recurrence")
    p.add_argument("--sys", required=True)
    p.add_argument("--count", type=int, required=True)

    p = sub.add_parser("normalize", parents=[common], help="lower-triangularize A_n, B_n")
    p.add_argument("--blocks", required=True)

    p = sub.add_parser("sobolev", parents=[common], help="orthonormal Sobolev family")
    p.add_argument("--spec", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--extract-recurrence", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="matrix orthonormality residual")
    p.add_argument("--family", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--h")
    p.add_argument("--L")

    p = sub.add_parser("krein", parents=[common], help="spectral accumulation diagnostics")
    p.add_argument("--measure", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--sizes", default="25,50,100")
    p.add_argument("--epsilon", type=float, default=0.1)

    p = sub.add_parser("demo", parents=[common], help="canonical end-to-end scenarios")
    p.add_argument("name", choices=DEMOS)
    return parser


def main(argv=None):
    args = vars(build_parser().parse_args(argv))
    common = {k: args.pop(k) for k in ("subcommand", "out", "tol", "seed", "fmt")}
    try:
        cfg = RunConfig(inputs=args, **common)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
