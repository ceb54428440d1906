"""``gdslab`` command line: run one experiment config and write a CSV/JSON table."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import acceptance, bohr, models, moments, zeros
from .config import TASKS, ConfigError, ExperimentConfig, load
from .series import TermSequence, evaluate

SCHEMA = "# gds-lab schema v1 task={task}"
OUT_DIR_ENV = "GDSLAB_OUT_DIR"


def _list(v):
    if v is None:
        return []
    return list(v) if isinstance(v, (list, tuple)) else [v]


def build_model(spec: dict):
    """Model from a ``[model]`` section; returns a TermSequence or a BohrModel."""
    kind = spec.get("kind")
    g = spec.get
    if kind == "integers":
        return models.integers(int(g("jmax", models.DEFAULT_JMAX)))
    if kind == "power_law":
        return models.power_law(float(g("alpha", g("beta", 0.0))), int(g("jmax", models.DEFAULT_JMAX)))
    if kind == "zeta_derivative":
        return models.zeta_derivative(int(g("k", 1)), int(g("jmax", models.DEFAULT_JMAX)))
    if kind == "sum_two_squares":
        return models.sum_two_squares(float(g("xmax", 10**6)))
    if kind == "alternating_beta":
        return models.alternating_beta(float(g("beta", 0.5)), int(g("jmax", models.DEFAULT_JMAX)))
    if kind == "eta_modulated":
        return models.eta_modulated(float(g("beta", 0.0)), int(g("jmax", 2**20)))
    if kind == "clustered":
        return models.clustered_sequence(int(g("L", 2)), float(g("delta", 1.0)), int(g("kmax", 10**5)))
    if kind == "bohr":
        return bohr.bohr_build(float(g("beta", 0.5)), [float(x) for x in _list(g("tau_seed", [1e4]))])
    if kind == "random_discretize":
        mass = g("mass", "linear")
        jmax = int(g("jmax", 10**4))
        seed = int(g("seed", 0))
        if mass == "linear":
            return models.random_discretize(models.linear_mass, jmax, seed, float(jmax + 1))
        if mass == "bohr":
            bm = bohr.bohr_build(float(g("beta", 0.5)), [float(x) for x in _list(g("tau_seed", [50.0]))])
            M = lambda x: bohr.bohr_Ac(bm, x)
            hi = 2.0 * (jmax + 2) + 2.0 * bm.blocks[-1].B
            return models.random_discretize(M, jmax, seed, hi, beta=bm.beta, name="random_discretize(bohr)")
        raise ConfigError(f"[model] mass: unknown mass model {mass!r}")
    raise ConfigError(f"[model] kind: unknown model kind {kind!r}")


def _pmap(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _need_seq(model):
    if not isinstance(model, TermSequence):
        raise ConfigError("[model] kind: this task needs a term-sequence model")
    return model


def task_eval(cfg, model, threads):
    p = cfg.params
    seq = _need_seq(model)
    sigma = float(p.get("sigma", 2.0))
    ts = [float(t) for t in _list(p.get("t", 0.0))]
    tol = float(p.get("tol", 1e-10))
    N = p.get("N")

    def one(t):
        r = evaluate(seq, complex(sigma, t), tol=tol, N=N)
        return {"sigma": sigma, "t": t, "re": r.value.real, "im": r.value.imag, "abs": abs(r.value),
                "err_bound": r.err_bound, "N_cut": r.N_cut, "X_max": r.X_max, "method": r.method}
    return _pmap(one, ts, threads)


def task_moment(cfg, model, threads):
    p = cfg.params
    sigma = float(p.get("sigma", 0.75))
    method = p.get("method", "quadrature")
    Ts = [float(t) for t in _list(p.get("T", 1000.0))]
    seq = _need_seq(model)

    def one(T):
        if method == "quadrature":
            T0 = float(p.get("T0", 1.0 if sigma == 1.0 else 0.0))
            r = moments.mean_square_quadrature(seq, sigma, T0, T, tol=float(p.get("tol", 1e-9)))
            return {"sigma": sigma, "T": T, "value": r.value / (T - T0), "method": r.method,
                    "err": r.err_est / (T - T0)}
        N = float(p.get("N", 100.0))
        if method == "exact-sinc":
            r = moments.polynomial_mean_square_exact(seq, N, sigma, T)
        elif method == "fejer":
            r = moments.fejer_mean_square(seq, N, sigma, T)
        elif method == "limit-series":
            r = moments.limit_series(seq, sigma, tol=float(p.get("tol", 1e-6)))
        else:
            raise ConfigError(f"[task] method: unknown method {method!r}")
        return {"sigma": sigma, "T": T, "value": r.value, "method": r.method, "err": r.err_est}
    return _pmap(one, Ts, threads)


def _scan(cfg, model):
    p = cfg.params
    sigma = float(p.get("sigma", 0.75))
    Ts = [float(t) for t in _list(p.get("T_list", [250.0, 500.0, 1000.0, 2000.0]))]
    T0 = float(p.get("T0", 1.0 if sigma == 1.0 else 0.0))
    return sigma, moments.moment_scan(_need_seq(model), sigma, Ts, T0=T0, tol=float(p.get("tol", 1e-9)))


def task_moment_scan(cfg, model, threads):
    _, rows = _scan(cfg, model)
    return [{"T": r.T_or_N, "value": r.value, "method": r.method, "err": r.err_est} for r in rows]


def task_growth(cfg, model, threads):
    sigma, rows = _scan(cfg, model)
    beta = model.beta
    slope, intercept, resid = moments.growth_fit([(r.T_or_N, r.value) for r in rows])
    target = (1 + beta - 2 * sigma) / (1 - beta)
    return [{"T": r.T_or_N, "value": r.value, "err": r.err_est, "slope": slope,
             "intercept": intercept, "residual": resid, "target_slope": target} for r in rows]


def task_mv_check(cfg, model, threads):
    p = cfg.params
    T = float(p.get("T", 100.0))
    if "lambdas" in p:
        lams = [np.asarray(_list(p["lambdas"]), dtype=float)]
        cs = [np.asarray(_list(p.get("coeffs", [1.0] * len(lams[0]))), dtype=float)]
    else:
        rng = np.random.default_rng(int(p.get("seed", 0)))
        lams, cs = [], []
        for _ in range(int(p.get("instances", 10))):
            J = int(rng.integers(1, int(p.get("J", 20)) + 1))
            while True:
                lam = np.sort(rng.uniform(0.0, float(p.get("spread", 10.0)), size=J))
                if J == 1 or np.min(np.diff(lam)) >= float(p.get("min_gap", 1e-3)):
                    break
            lams.append(lam)
            cs.append(rng.normal(size=J))

    def one(i):
        r = moments.mv_check(lams[i], cs[i], T)
        return {"instance": i, "J": len(lams[i]), "T": T, "lhs": r.lhs, "diagonal": r.diagonal,
                "bound": r.bound, "delta_min": r.delta_min, "err": r.err_est, "holds": r.holds}
    return _pmap(one, range(len(lams)), threads)


def task_zeros(cfg, model, threads):
    p = cfg.params
    seq = _need_seq(model)
    sigma = float(p.get("sigma", 0.75))
    Ts = [float(t) for t in _list(p.get("T_list", [10.0, 20.0, 30.0, 40.0, 50.0]))]
    s1 = p.get("sigma1")
    s1 = float(s1) if s1 is not None else zeros.auto_sigma1(seq)
    s1 = max(s1, sigma + 0.5)

    def one(T):
        r = zeros.count_zeros(seq, zeros.Rectangle(sigma, s1, T), step_tol=float(p.get("step_tol", 1e-3)))
        return {"sigma": sigma, "sigma1": s1, "T": r.rect.T, "count": r.count, "winding_raw": r.winding_raw,
                "pole_adjusted": r.pole_adjusted, "min_modulus": r.min_boundary_modulus}
    return _pmap(one, Ts, threads)


def task_bohr_probe(cfg, model, threads):
    if not isinstance(model, bohr.BohrModel):
        raise ConfigError("[model] kind: bohr-probe needs kind = bohr")
    sigmas = [float(s) for s in _list(cfg.params.get("sigma", 0.6))]
    rows = []
    inv = model.invariants()
    for k, b in enumerate(model.blocks, 1):
        for sg in sigmas:
            v = abs(bohr.bohr_fc(model, complex(sg, b.tau)))
            pred = bohr.bohr_peak_prediction(b.tau, sg, model.beta)
            rows.append({"block": k, "tau": b.tau, "A": b.A, "B": b.B, "sigma": sg, "abs_fc": v,
                         "prediction": pred, "ratio": v / pred, "lattice_err": inv["lattice"],
                         "closing_err": inv["closing"]})
    return rows


def task_verify(cfg, model, threads):
    ids = [int(i) for i in _list(cfg.params.get("criteria"))] or None
    out = []
    for c in acceptance.run(ids):
        print(c.line(), file=sys.stderr)
        out.append({"id": c.id, "name": c.name, "passed": c.passed, "measured": c.measured,
                    "target": c.target, "seconds": round(c.seconds, 1)})
    return out


RUNNERS = {
    "eval": task_eval, "moment": task_moment, "moment-scan": task_moment_scan, "growth": task_growth,
    "mv-check": task_mv_check, "zeros": task_zeros, "bohr-probe": task_bohr_probe, "verify": task_verify,
}


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def render(task: str, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        def clean(v):
            if isinstance(v, (np.floating, float)):
                v = float(v)
                return v if math.isfinite(v) else str(v)
            if isinstance(v, np.integer):
                return int(v)
            if isinstance(v, np.bool_):
                return bool(v)
            return v
        return json.dumps([{k: clean(v) for k, v in r.items()} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    buf.write(SCHEMA.format(task=task) + "\n")
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        cols = list(rows[0].keys())
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def run(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    model = build_model(cfg.model) if cfg.model.get("kind") else None
    return RUNNERS[cfg.task](cfg, model, threads)


def _resolve_out(path: str | None) -> str | None:
    if path is None:
        return None
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="gdslab", description="general Dirichlet series experiments")
    ap.add_argument("task", choices=TASKS)
    ap.add_argument("--config", help="INI config with [model], [task], [output] sections")
    ap.add_argument("--out", help="output file (default: [output] path, else stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, help="overrides [model] seed")
    args = ap.parse_args(argv)
    try:
        cfg = load(args.config) if args.config else ExperimentConfig(task=args.task)
        if cfg.task != args.task:
            cfg.task = args.task
        if args.seed is not None:
            cfg.model["seed"] = args.seed
        if args.format:
            cfg.output_format = args.format
        cfg.validate()
        rows = run(cfg, max(1, args.threads))
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        print(f"gdslab: error: {exc}", file=sys.stderr)
        return 2
    text = render(cfg.task, rows, cfg.output_format)
    out = _resolve_out(args.out or cfg.output_path)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.task == "verify" and not all(r["passed"] for r in rows):
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
