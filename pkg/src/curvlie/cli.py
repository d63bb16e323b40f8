"""Command-line front end.

Exit codes: 0 clean, 1 a mathematical witness or violation was found,
2 bad input (unreadable file, invalid algebra, domain error, ...).

Vectors and matrices are plain row-major JSON arrays in the algebra's
working basis, which is the input basis whenever the algebra's metric is
the identity.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional

import numpy as np

from . import so4 as so4_mod
from .algebra import LieAlgebra, build_from_structure_constants, is_abelian, make_subalgebra
from .curvature import Witness, puttmann_curvature
from .errors import CurvlieError
from .infinitesimal import check_inf_nonneg
from .numerics import check_symmetric, random_unit_vectors, require_positive_definite
from .paths import default_grid, kappa_curve, path_from_metric, path_from_psi
from .rescale import coefficient_relations, kappa_rescaled, verify_curve_relation
from .scaling import bracket_ratio_sup, factor_to_t, max_stretch_check

EXIT_CLEAN, EXIT_WITNESS, EXIT_INPUT = 0, 1, 2
SEED_ENV = "CURVLIE_SEED"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    budget: int = 10000
    tol: float = 1e-9
    t_grid: Optional[tuple] = None  # (start, stop, count); None = default grid

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.t_grid is not None and int(self.t_grid[2]) < 1:
            raise ValueError("grid count must be positive")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        seed = args.seed
        if seed is None:
            seed = int(os.environ.get(SEED_ENV, cls.seed))
        cfg = cls(seed=seed, budget=args.budget, tol=args.tol)
        grid = getattr(args, "grid", None)
        if grid is not None:
            cfg = replace(cfg, t_grid=(float(grid[0]), float(grid[1]), int(grid[2])))
        return cfg


class InputError(Exception):
    pass


# --- serialisation ----------------------------------------------------------


def fmt_float(x: float) -> str:
    return format(float(x) + 0.0, ".17g")  # + 0.0 folds -0 into 0


def _to_json(obj) -> str:
    # deterministic output: 17 significant digits, non-finite as null
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _to_json(obj.tolist())
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def emit(obj, stream=None) -> None:
    (stream or sys.stdout).write(_to_json(obj) + "\n")


# --- input ------------------------------------------------------------------


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def bundled_path(name: str) -> str:
    return str(resources.files("curvlie") / "data" / name)


def load_algebra(path) -> LieAlgebra:
    doc = _read_json(path)
    if not isinstance(doc, dict) or "dim" not in doc or "structure" not in doc:
        raise InputError(f"{path}: expected an object with 'dim' and 'structure'")
    try:
        return build_from_structure_constants(
            int(doc["dim"]),
            doc["structure"],
            metric=doc.get("metric", "identity"),
            factors=doc.get("factors"),
            names=doc.get("names"),
        )
    except (TypeError, IndexError) as exc:
        raise InputError(f"{path}: malformed structure table: {exc}") from exc


def load_matrix(path, dim: int) -> np.ndarray:
    M = np.asarray(_read_json(path), dtype=float)
    if M.shape != (dim, dim):
        raise InputError(f"{path}: expected a {dim}x{dim} matrix, got shape {M.shape}")
    return M


def parse_vector(text: str, algebra: LieAlgebra) -> np.ndarray:
    """A JSON array of coordinates or a basis-vector name."""
    if algebra.names and text in algebra.names:
        return algebra.vector(text)
    try:
        v = np.asarray(json.loads(text), dtype=float)
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise InputError(f"cannot parse vector {text!r}") from exc
    if v.shape != (algebra.dim,):
        raise InputError(f"vector {text!r} must have length {algebra.dim}")
    return v


# --- commands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    algebra = load_algebra(args.algebra)
    emit({"valid": True, "dim": algebra.dim, "factors": algebra.factors})
    return EXIT_CLEAN


def cmd_path(args) -> int:
    cfg = RunConfig.from_args(args)
    algebra = load_algebra(args.algebra)
    if args.from_metric:
        path = path_from_metric(load_matrix(args.from_metric, algebra.dim))
    else:
        path = path_from_psi(load_matrix(args.psi, algebra.dim))
    X, Y = (parse_vector(v, algebra) for v in args.plane)
    if cfg.t_grid is None:
        ts = default_grid(path)
    else:
        ts = np.linspace(*cfg.t_grid[:2], cfg.t_grid[2])
    rows = kappa_curve(algebra, path, X, Y, ts)
    lines = ["t,kappa_closed,kappa_direct,abs_diff"]
    lines += [",".join(fmt_float(x) for x in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    bad = [r for r in rows if r[3] > cfg.tol * max(1.0, abs(r[2]))]
    if bad:
        sys.stderr.write(f"closed form and direct evaluation disagree at t={bad[0][0]!r}\n")
        return EXIT_WITNESS
    return EXIT_CLEAN


def cmd_infnn(args) -> int:
    cfg = RunConfig.from_args(args)
    algebra = load_algebra(args.algebra)
    psi = check_symmetric(load_matrix(args.psi, algebra.dim))
    verdict = check_inf_nonneg(algebra, psi, tol=cfg.tol, budget=cfg.budget, seed=cfg.seed)
    emit(verdict.to_json())
    return EXIT_WITNESS if verdict.refuted else EXIT_CLEAN


def cmd_scale(args) -> int:
    cfg = RunConfig.from_args(args)
    algebra = load_algebra(args.algebra)
    sub = make_subalgebra(algebra, [parse_vector(v, algebra) for v in args.sub])
    if not args.factor > 0:
        raise InputError("--factor must be positive")
    t = factor_to_t(args.factor)
    report = {"factor": args.factor, "t": t, "abelian": is_abelian(algebra, sub)}
    if report["abelian"]:
        res = max_stretch_check(algebra, sub, t)
        report["stretch"] = res.to_json()
        found = not res.preserves
    else:
        res = bracket_ratio_sup(algebra, sub, budget=cfg.budget, seed=cfg.seed)
        report["bracket_ratio"] = res.to_json()
        found = not res.bounded
    emit(report)
    return EXIT_WITNESS if found else EXIT_CLEAN


def cmd_so4_classify(args) -> int:
    cfg = RunConfig.from_args(args)
    algebra = load_algebra(args.algebra) if args.algebra else None
    dim = 6 if algebra is None else algebra.dim
    phi = require_positive_definite(load_matrix(args.metric, dim), name="metric")
    report = so4_mod.classify(phi, tol=cfg.tol, seed=cfg.seed, algebra=algebra)
    status = EXIT_CLEAN
    torus = report["torus_form"]
    if torus is not None and not torus["bound"]:
        # the identity plane is a concrete negative-curvature witness
        form, _ = so4_mod.detect_torus_form(phi, cfg.tol, algebra)
        w = np.linalg.eigh(form.bound_matrix() - form.tau_block)[1][:, 0]
        A1, A2, A3, B1, B2, B3 = form.basis.T
        X, Y = w[0] * A1 + w[1] * B2, A2 + B3
        k = puttmann_curvature(so4_mod._so4(algebra), phi, X, Y)
        report["witness"] = Witness(X, Y, k).to_json()
        status = EXIT_WITNESS
    emit(report)
    return status


def cmd_rescale_check(args) -> int:
    cfg = RunConfig.from_args(args)
    algebra = load_algebra(args.algebra)
    psi = check_symmetric(load_matrix(args.psi, algebra.dim))
    lam = args.lam
    if args.plane:
        planes = [tuple(parse_vector(v, algebra) for v in args.plane)]
    else:
        rng = np.random.default_rng(cfg.seed)
        planes = [tuple(random_unit_vectors(rng, 2, algebra.dim)) for _ in range(args.samples)]
    count = cfg.t_grid[2] if cfg.t_grid else 50
    ts = np.linspace(0.0, 1.0, count)
    curve, coeff, scale = 0.0, 0.0, 1.0
    for X, Y in planes:
        curve = max(curve, verify_curve_relation(algebra, psi, lam, X, Y, ts))
        coeff = max(coeff, coefficient_relations(algebra, psi, lam, X, Y).max())
        scale = max(scale, max(abs(kappa_rescaled(algebra, psi, lam, X, Y, t)) for t in ts))
    report = {
        "lambda": lam,
        "planes": len(planes),
        "max_curve_residual": curve,
        "max_coefficient_residual": coeff,
        "seed": cfg.seed,
    }
    emit(report)
    return EXIT_WITNESS if curve > cfg.tol * scale or coeff > cfg.tol * scale else EXIT_CLEAN


# --- parser -----------------------------------------------------------------


def _common(p):
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default 42, or ${SEED_ENV})")
    p.add_argument("--budget", type=int, default=RunConfig.budget)
    p.add_argument("--tol", type=float, default=RunConfig.tol)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvlie", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a JSON algebra document")
    p.add_argument("algebra")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("path", help="tabulate kappa along an inverse-linear path")
    p.add_argument("algebra")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--psi")
    src.add_argument("--from-metric", dest="from_metric")
    p.add_argument("--plane", nargs=2, required=True, metavar=("X", "Y"))
    p.add_argument("--grid", nargs=3, type=float, metavar=("START", "STOP", "COUNT"))
    p.add_argument("--out")
    _common(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("infnn", help="search for infinitesimal negativity")
    p.add_argument("algebra")
    p.add_argument("psi")
    _common(p)
    p.set_defaults(func=cmd_infnn)

    p = sub.add_parser("scale", help="scale a subalgebra and test the curvature bound")
    p.add_argument("algebra")
    p.add_argument("--sub", nargs="+", required=True, help="names or JSON vectors spanning h")
    p.add_argument("--factor", type=float, required=True)
    _common(p)
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("so4", help="so(4) normal forms")
    so4_sub = p.add_subparsers(dest="action", required=True)
    c = so4_sub.add_parser("classify")
    c.add_argument("metric")
    c.add_argument("--algebra", default=None)
    _common(c)
    c.set_defaults(func=cmd_so4_classify)

    p = sub.add_parser("rescale-check", help="check the rescaling relations")
    p.add_argument("algebra")
    p.add_argument("psi")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--plane", nargs=2, metavar=("X", "Y"))
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--grid", nargs=3, type=float, metavar=("START", "STOP", "COUNT"))
    _common(p)
    p.set_defaults(func=cmd_rescale_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, CurvlieError, ValueError, np.linalg.LinAlgError) as exc:
        triple = getattr(exc, "triple", None)
        where = f" (triple {triple})" if triple is not None and str(triple) not in str(exc) else ""
        sys.stderr.write(f"error: {exc}{where}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
