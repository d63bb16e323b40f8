"""Survey random torus forms on so(4).

Each seeded form is put in a random factor-preserving frame, then
classified. The report compares the quadratic-form bound with the outcome of
the negative-curvature search, and with the infinitesimal test applied to
psi = I - phi^-1.
"""

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from curvlie import assert_nonneg, build_so4, check_inf_nonneg
from curvlie.numerics import random_orthogonal
from curvlie.so4 import classify, torus_form_metric


@dataclass(frozen=True)
class Config:
    samples: int = 40
    budget: int = 3000
    seed: int = 7
    out: Path = Path("results/so4_torus_survey.json")


def _rotation(rng):
    R = np.zeros((6, 6))
    for s in (slice(0, 3), slice(3, 6)):
        Q = random_orthogonal(rng, 3)
        R[s, s] = Q * np.sign(np.linalg.det(Q))
    return R


def run(cfg: Config):
    so4 = build_so4()
    rng = np.random.default_rng(cfg.seed)
    records = []
    for i in range(cfg.samples):
        c, d = rng.uniform(0.5, 2.0, 2)
        a1, a2 = rng.uniform(0.3, 2.5, 2)
        a3 = rng.uniform(-0.8, 0.8) * np.sqrt(a1 * a2)
        R = _rotation(rng)
        phi = R @ torus_form_metric(c, d, [[a1, a3], [a3, a2]]) @ R.T
        report = classify(phi, seed=cfg.seed)
        torus = report["torus_form"]
        search = assert_nonneg(so4, phi, budget=cfg.budget, seed=cfg.seed + i)
        inf = check_inf_nonneg(so4, np.eye(6) - np.linalg.inv(phi), budget=cfg.budget, seed=cfg.seed + i)
        records.append({
            "c": c,
            "d": d,
            "tau": [[a1, a3], [a3, a2]],
            "detected": torus is not None,
            "bound": None if torus is None else torus["bound"],
            "min_curvature": search.min_value,
            "search": search.kind,
            "infinitesimal": inf.kind,
            "plane_found": report["invariant_plane"] is not None,
        })
    return records


def summarise(records):
    bound = [r for r in records if r["bound"]]
    broken = [r for r in records if r["bound"] is False]
    return {
        "samples": len(records),
        "detected": sum(r["detected"] for r in records),
        "within_bound": len(bound),
        "within_bound_refuted": sum(r["search"] == "Refuted" for r in bound),
        "outside_bound": len(broken),
        "outside_bound_refuted": sum(r["search"] == "Refuted" for r in broken),
        "infinitesimal_refuted_within_bound": sum(r["infinitesimal"] == "Refuted" for r in bound),
        "invariant_plane_found": sum(r["plane_found"] for r in records),
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--budget", type=int, default=Config.budget)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--out", type=Path, default=Config.out)
    cfg = Config(**vars(p.parse_args()))
    records = run(cfg)
    summary = summarise(records)
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    doc = {"config": {k: str(v) for k, v in asdict(cfg).items()}, "summary": summary, "records": records}
    cfg.out.write_text(json.dumps(doc, indent=1))
    for k, v in summary.items():
        print(f"{k:36s} {v}")


if __name__ == "__main__":
    main()
