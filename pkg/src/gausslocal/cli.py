"""Command-line entry point: configuration, experiment batteries, reports.

Subcommands: ``measure`` (geometry and measure checks), ``weights``
(weight-class constants), ``op`` (operator evaluations to CSV),
``verify`` (inequality reports and norm experiments), ``report``
(JSON bundle to CSV).  A run is declared by one JSON config (strictly
validated, unknown keys rejected) plus a few flag overrides; the same
config and seed reproduce byte-identical reports apart from the
timestamp field.

Exit codes: 0 success, 1 inequality failure, 2 config error,
3 numerical error (NaN/overflow in a record).
"""

from __future__ import annotations

import argparse
import copy
import csv
import dataclasses
import datetime
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import ConfigError, GaussLocalError, NoEpsilonFound, NumericalFailure
from .fixtures import build_function, build_kernel, build_weight, standard_function_battery
from .geometry import (
    GaussianSpace,
    check_halo,
    doubling_band,
    doubling_ratio,
    gaussian_ball_measure,
    halo_bounds,
    radial_profile,
    sample_point_in_ball,
    unit_ball_volume,
)
from .gridfn import GridFunction
from .operators import (
    ShiftVector,
    fractional_integral_gaussian,
    fractional_integral_radial,
    fractional_maximal,
    local_maximal,
    multilinear_maximal,
)
from .verify import (
    InequalityReport,
    NormExperiment,
    check_multilinear_maximal_domination,
    check_rough_integral_interpolation,
    check_shift_family_holder,
    check_testing_condition,
    rough_norm_experiment,
    sample_sites,
    shift_family_norm_experiment,
    strong_type_experiment,
    weak_type_experiment,
)
from .weights import (
    FractionalParams,
    WeightVector,
    apa_constant,
    apqa_constant,
    ball_sampler,
    epsilon_finder,
    five_condition_ratio,
    reverse_holder_check,
    theorem_crosscheck,
)

DEFAULT_CONFIG: dict = {
    "space": {"d": 1, "a": 1.0, "L": 4.0, "n": 128},
    "seed": 1234,
    "samples": {"balls": 150, "sites": 120, "halo_pairs": 2000},
    "scales": [1.0, 2.0, 5.0],
    "functions": [
        {"name": "bump", "params": {"center": [0.0], "width": 0.5}},
        {"name": "indicator", "params": {"center": [0.4], "radius": 0.3}},
    ],
    "weights": [
        {"label": "mild_up", "alpha": 0.4, "delta": 0.01},
        {"label": "mild_down", "alpha": -0.3, "delta": 0.01},
    ],
    "kernels": [{"name": "unit", "s": 2.0}],
    "fractional": {"beta": 0.25, "p": 3.0, "s": 2.0},
    "caps": {"crosscheck": 100.0, "epsilon_factor": 10.0},
    "tolerances": {"pointwise": 1e-6, "domination": 1e-8},
}

_CSV_COLUMNS = [
    "record_kind", "name", "theorem_id", "sites", "lhs", "rhs",
    "value", "constant", "tol", "passed", "skipped", "config_hash",
]


# ---------------------------------------------------------------------------
# configuration


def _check_keys(payload: dict, allowed: dict, path: str) -> None:
    for key, val in payload.items():
        if key not in allowed:
            raise ConfigError(f"unknown config key {path}{key!r}")
        ref = allowed[key]
        if isinstance(ref, dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {path}{key!r} must be an object")
            _check_keys(val, ref, f"{path}{key}.")


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


class RunConfig:
    """Validated run configuration with a stable content hash."""

    def __init__(self, data: dict):
        _check_keys(data, DEFAULT_CONFIG, "")
        merged = _merge(DEFAULT_CONFIG, data)
        sp = merged["space"]
        if sp["d"] not in (1, 2):
            raise ConfigError("space.d must be 1 or 2")
        if not (sp["a"] > 0 and sp["L"] > 0 and sp["n"] >= 8):
            raise ConfigError("space parameters must satisfy a > 0, L > 0, n >= 8")
        for fx in merged["functions"]:
            if set(fx) - {"name", "params"}:
                raise ConfigError(f"bad function fixture declaration: {fx}")
        for wd in merged["weights"]:
            if set(wd) - {"label", "alpha", "delta", "level"}:
                raise ConfigError(f"bad weight fixture declaration: {wd}")
        for kd in merged["kernels"]:
            if set(kd) - {"name", "s"}:
                raise ConfigError(f"bad kernel declaration: {kd}")
        self.data = merged

    @classmethod
    def from_file(cls, path: str | Path | None, overrides: dict | None = None) -> "RunConfig":
        data: dict = {}
        if path is not None:
            try:
                data = json.loads(Path(path).read_text())
            except FileNotFoundError as exc:
                raise ConfigError(f"config file not found: {path}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise ConfigError("config file must hold a JSON object")
        cfg = cls(data)
        for key, val in (overrides or {}).items():
            if val is None:
                continue
            if key == "seed":
                cfg.data["seed"] = int(val)
            elif key == "n":
                cfg.data["space"]["n"] = int(val)
            elif key == "d":
                cfg.data["space"]["d"] = int(val)
        cls(cfg.data)  # re-validate after overrides
        return cfg

    @property
    def space(self) -> GaussianSpace:
        sp = self.data["space"]
        return GaussianSpace(d=int(sp["d"]), a=float(sp["a"]), L=float(sp["L"]), n=int(sp["n"]))

    @property
    def seed(self) -> int:
        return int(self.data["seed"])

    def hash(self) -> str:
        blob = json.dumps(self.data, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def functions(self, space: GaussianSpace) -> dict:
        out = {}
        for i, decl in enumerate(self.data["functions"]):
            params = decl.get("params", {})
            out[f"{decl['name']}_{i}"] = build_function(space, decl["name"], **params)
        return out

    def weights_battery(self, space: GaussianSpace) -> dict:
        out = {}
        for decl in self.data["weights"]:
            out[decl["label"]] = build_weight(space, decl["label"], alpha=decl.get("alpha"),
                                              delta=decl.get("delta", 0.01),
                                              level=decl.get("level", 1.0))
        return out

    def kernels(self, d: int) -> dict:
        return {decl["name"]: build_kernel(d, decl["name"], s=decl.get("s", 2.0))
                for decl in self.data["kernels"]}


# ---------------------------------------------------------------------------
# record plumbing


def _record_from_report(rep: InequalityReport, config_hash: str) -> dict:
    rec = dataclasses.asdict(rep)
    rec["record_kind"] = "inequality"
    rec["config_hash"] = config_hash
    return rec


def _record_from_experiment(exp: NormExperiment, config_hash: str) -> dict:
    rec = dataclasses.asdict(exp)
    rec["record_kind"] = "experiment"
    rec["config_hash"] = config_hash
    return rec


def _scan_for_nan(obj) -> bool:
    if isinstance(obj, float):
        return math.isnan(obj)
    if isinstance(obj, dict):
        return any(_scan_for_nan(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return any(_scan_for_nan(v) for v in obj)
    return False


def _to_native(obj):
    if isinstance(obj, dict):
        return {k: _to_native(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_native(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def build_bundle(cfg: RunConfig, records: list) -> dict:
    records = _to_native(records)
    return {
        "meta": {
            "config_hash": cfg.hash(),
            "config": cfg.data,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "versions": {"gausslocal": __version__, "numpy": np.__version__,
                         "scipy": scipy.__version__},
        },
        "records": records,
    }


def write_bundle(bundle: dict, out_dir: Path, stem: str, fmt: str) -> list:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(json.dumps(bundle, sort_keys=True, indent=2) + "\n")
    paths.append(json_path)
    if fmt == "csv":
        csv_path = out_dir / f"{stem}.csv"
        _write_records_csv(bundle["records"], csv_path)
        paths.append(csv_path)
    return paths


def _write_records_csv(records: list, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for rec in records:
            if rec["record_kind"] == "inequality":
                row = ["inequality", rec["name"], "", rec["sites_checked"], "", "",
                       repr(rec["max_ratio"]), repr(rec["constant_used"]), repr(rec["tol"]),
                       rec["passed"], False, rec["config_hash"]]
            else:
                val = rec["ratio"]
                row = ["experiment", "", rec["theorem_id"], "",
                       repr(rec["lhs_norm"]), repr(rec["rhs_norm"]),
                       "" if val is None else repr(val), "", "", "",
                       rec["skipped"], rec["config_hash"]]
            writer.writerow(row)


# ---------------------------------------------------------------------------
# subcommand batteries


def run_measure(cfg: RunConfig) -> list:
    space = cfg.space
    records = []
    chash = cfg.hash()
    seed = cfg.seed
    pairs = int(cfg.data["samples"]["halo_pairs"])
    # pointwise reports carry a 100-site floor
    n_balls = max(100, int(cfg.data["samples"]["balls"]))
    rng = np.random.default_rng(seed)

    def geom_r_min(k: float) -> float:
        # geometry checks need no grid nodes inside the ball, so tiny
        # admissibility parameters stay samplable
        return min(1.5 * space.cell_size, 0.1 * k * space.a)

    for k in [float(v) for v in cfg.data["scales"]]:
        lo, hi = halo_bounds(space, k)
        balls = ball_sampler(space, k=k, count=max(8, pairs // 16), seed=seed + int(10 * k),
                             r_min=geom_r_min(k))
        worst = 0.0
        checked = 0
        while checked < pairs:
            ball = balls[checked % len(balls)]
            x = sample_point_in_ball(ball, rng)
            v = check_halo(space, ball, x)
            worst = max(worst, v / hi, lo / v)
            checked += 1
        records.append(_record_from_report(InequalityReport(
            name=f"halo-band-k{k:g}", sites_checked=checked, max_ratio=worst,
            constant_used=1.0, constant_provenance="algebraic halo band", tol=0.0,
            passed=worst <= 1.0, details={"k": k, "lo": lo, "hi": hi}), chash))

    lo, hi = halo_bounds(space, 1.0)
    v_d = unit_ball_volume(space.d)
    balls = ball_sampler(space, k=1.0, count=n_balls, seed=seed + 1, r_min=geom_r_min(1.0))
    worst = 0.0
    for ball in balls:
        flat = (math.pi ** (-space.d / 2.0) * math.exp(-ball.center_norm**2)
                * v_d * ball.radius**space.d)
        ratio = gaussian_ball_measure(space, ball) / flat
        worst = max(worst, ratio / hi, lo / ratio)
    records.append(_record_from_report(InequalityReport(
        name="measure-equivalence", sites_checked=len(balls), max_ratio=worst,
        constant_used=1.0, constant_provenance="halo band applied to gamma(B)/flat volume",
        tol=0.0, passed=worst <= 1.0), chash))

    dbl_lo, dbl_hi = doubling_band(space)
    balls2 = ball_sampler(space, k=1.0, count=n_balls, seed=seed + 2, fit_scale=2.0,
                          r_min=geom_r_min(1.0))
    worst = 0.0
    all_above_one = True
    for ball in balls2:
        ratio = doubling_ratio(space, ball)
        all_above_one = all_above_one and ratio > dbl_lo
        worst = max(worst, ratio / dbl_hi)
    records.append(_record_from_report(InequalityReport(
        name="doubling-band", sites_checked=len(balls2), max_ratio=worst,
        constant_used=dbl_hi, constant_provenance="derived doubling band", tol=0.0,
        passed=all_above_one and worst <= 1.0), chash))

    anchors = sample_sites(space, 4, seed + 3, margin=0.5)
    worst_rel = 0.0
    nodes_checked = 0
    tol = 1e-7 if space.d == 1 else 1e-6
    for x in anchors:
        prof = radial_profile(space, x, k=1.0)
        for t, v in zip(prof.radii, prof.values):
            ball = space.admissible_ball(x, float(t) * (1.0 - 1e-12), scale=1.0)
            direct = gaussian_ball_measure(space, ball)
            worst_rel = max(worst_rel, abs(v - direct) / direct)
            nodes_checked += 1
    records.append(_record_from_report(InequalityReport(
        name="radial-profile-consistency", sites_checked=nodes_checked, max_ratio=worst_rel / tol,
        constant_used=tol, constant_provenance="node-wise relative tolerance", tol=0.0,
        passed=worst_rel <= tol, details={"max_rel_err": worst_rel}), chash))
    return records


def run_weights(cfg: RunConfig) -> list:
    space = cfg.space
    chash = cfg.hash()
    seed = cfg.seed
    n_balls = int(cfg.data["samples"]["balls"])
    battery = cfg.weights_battery(space)
    frac = cfg.data["fractional"]
    beta, p_frac, s = float(frac["beta"]), float(frac["p"]), float(frac["s"])
    records = []
    balls = ball_sampler(space, k=1.0, count=n_balls, seed=seed + 11)
    balls5 = ball_sampler(space, k=1.0, count=max(16, n_balls // 4), seed=seed + 12,
                          fit_scale=5.0)

    def exp_record(theorem_id, fixtures, value, extra=None, skipped=False):
        return _record_from_experiment(NormExperiment(
            theorem_id=theorem_id, fixtures=fixtures,
            lhs_norm=0.0 if skipped else value, rhs_norm=1.0,
            ratio=None if skipped else value, skipped=skipped,
            metadata={"balls": n_balls, "seed": seed, **(extra or {})}), chash)

    for label, w in battery.items():
        for p in (1.0, 1.5, 2.0):
            records.append(exp_record("weight-constant-apa", {"label": label, "p": p},
                                      apa_constant(w, p, balls)))
        q = 1.0 / (1.0 / p_frac - beta)
        records.append(exp_record("weight-constant-apqa", {"label": label, "p": p_frac, "q": q},
                                  apqa_constant(w, p_frac, q, balls)))
        records.append(exp_record("weight-five-condition", {"label": label},
                                  five_condition_ratio(w, balls5)))
        records.append(exp_record("weight-reverse-holder", {"label": label, "p_j": 2.0, "r": 1.1},
                                  reverse_holder_check(w, 2.0, 1.1, balls)))
        try:
            params = epsilon_finder(FractionalParams(beta=beta, p=p_frac, s=s), w, balls,
                                    cap_factor=float(cfg.data["caps"]["epsilon_factor"]))
            records.append(exp_record("epsilon-existence", {"label": label},
                                      params.epsilon,
                                      extra={"q_eps": params.q_eps,
                                             "q_eps_tilde": params.q_eps_tilde}))
        except NoEpsilonFound as exc:
            records.append(exp_record("epsilon-existence", {"label": label, "error": str(exc)},
                                      0.0, skipped=True))

    labels = sorted(battery)
    pair = [battery[labels[0]], battery[labels[-1] if len(labels) > 1 else labels[0]]]
    wv = WeightVector(pair, (2.0, 2.0))
    cross = theorem_crosscheck(wv, balls, cap=float(cfg.data["caps"]["crosscheck"]))
    records.append(exp_record(
        "weight-class-crosscheck", {"labels": labels[:2], "flags": cross.flags},
        cross.multilinear_constant, extra={"linear": cross.linear_constants}))
    return records


def run_verify(cfg: RunConfig) -> list:
    space = cfg.space
    chash = cfg.hash()
    seed = cfg.seed
    n_sites = max(int(cfg.data["samples"]["sites"]), 120)
    n_balls = int(cfg.data["samples"]["balls"])
    fns = cfg.functions(space)
    fs = list(fns.values())[:2]
    if len(fs) == 1:
        fs = [fs[0], fs[0]]
    battery = cfg.weights_battery(space)
    wlist = list(battery.values())
    if len(wlist) == 1:
        wlist = [wlist[0], wlist[0]]
    wv = WeightVector(wlist[:2], (2.0, 2.0))
    nu = wv.composite()
    tol_point = float(cfg.data["tolerances"]["pointwise"])
    tol_dom = float(cfg.data["tolerances"]["domination"])
    frac = cfg.data["fractional"]
    beta, s = float(frac["beta"]), float(frac["s"])
    kernel = cfg.kernels(space.d)[cfg.data["kernels"][0]["name"]]
    records = []
    balls = ball_sampler(space, k=1.0, count=max(n_balls, 100), seed=seed + 21)

    records.append(_record_from_report(check_testing_condition(
        space, fs, wv, nu, balls, tol=tol_point), chash))
    records.append(_record_from_report(check_multilinear_maximal_domination(
        space, fs, wv, nu, n_sites=n_sites, seed=seed + 22, tol=tol_dom), chash))
    records.append(_record_from_report(check_shift_family_holder(
        space, fs, ShiftVector((1.0, 2.0)), beta, (2.0 * s, 2.0 * s), s,
        n_sites=n_sites, seed=seed + 23, tol=tol_point), chash))

    stock = standard_function_battery(space)
    calibration = {k: stock[k] for k in ("constant", "indicator_origin", "bump")}
    holdout = {k: stock[k] for k in ("indicator_offset", "two_plateau")}
    records.append(_record_from_report(check_rough_integral_interpolation(
        space, kernel, beta=0.5, beta1=0.25, beta2=0.75,
        calibration_fs=calibration, holdout_fs=holdout,
        n_sites=n_sites, seed=seed + 24), chash))

    records.append(_record_from_experiment(weak_type_experiment(
        space, fs, wv, nu, metadata={"battery": "config"}), chash))
    records.append(_record_from_experiment(strong_type_experiment(
        space, fs, wv, metadata={"battery": "config"}), chash))
    records.append(_record_from_experiment(shift_family_norm_experiment(
        space, fs, ShiftVector((1.0, 2.0)), beta, (2.0 * s, 2.0 * s), s, wlist[:2],
        balls=balls, metadata={"battery": "config"}), chash))
    w0 = wlist[0]
    p_rough = 2.0
    q_rough = 1.0 / (1.0 / p_rough - beta)
    records.append(_record_from_experiment(rough_norm_experiment(
        space, fs[0], kernel, beta, p_rough, q_rough, w0, s_prime=1.0,
        balls=balls, metadata={"battery": "config"}), chash))
    return records


_OPERATORS = {
    "local_maximal": lambda f, x, prm: local_maximal(f, x, prm.get("k", 1.0)),
    "fractional_maximal": lambda f, x, prm: fractional_maximal(
        f, x, prm.get("beta", 0.5), prm.get("k", 1.0)),
    "fractional_integral_gaussian": lambda f, x, prm: fractional_integral_gaussian(
        f, x, prm.get("beta", 0.5), prm.get("k", 1.0)),
    "fractional_integral_radial": lambda f, x, prm: fractional_integral_radial(
        f, x, prm.get("beta", 0.5), prm.get("k", 1.0)),
}


def run_op(cfg: RunConfig, operator: str, out_path: Path, n_sites: int | None = None) -> None:
    if operator not in _OPERATORS:
        raise ConfigError(f"unknown operator {operator!r}; have {sorted(_OPERATORS)}")
    space = cfg.space
    fns = cfg.functions(space)
    name, f = next(iter(fns.items()))
    prm = dict(cfg.data["fractional"])
    params_hash = hashlib.sha256(
        json.dumps({"operator": operator, "fixture": name, **prm}, sort_keys=True).encode()
    ).hexdigest()[:12]
    sites = sample_sites(space, n_sites or int(cfg.data["samples"]["sites"]), cfg.seed)
    fn = _OPERATORS[operator]
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        coords = [f"x{i}" for i in range(space.d)]
        writer.writerow([*coords, "value", "operator", "params_hash"])
        for x in sites:
            val = fn(f, x, prm)
            writer.writerow([*(repr(float(v)) for v in x), repr(float(val)),
                             operator, params_hash])


def run_report(bundle_path: Path, out_path: Path) -> None:
    try:
        bundle = json.loads(bundle_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read bundle {bundle_path}: {exc}") from exc
    if "records" not in bundle:
        raise ConfigError("bundle has no records")
    _write_records_csv(bundle["records"], out_path)


# ---------------------------------------------------------------------------
# entry point


def _summarize(records: list) -> tuple[int, str]:
    failures = 0
    lines = []
    for rec in records:
        if rec["record_kind"] == "inequality":
            status = "PASS" if rec["passed"] else "FAIL"
            if not rec["passed"]:
                failures += 1
            lines.append(f"[{status}] {rec['name']}: max_ratio={rec['max_ratio']:.6g} "
                         f"(tol={rec['tol']:g}, sites={rec['sites_checked']})")
        else:
            if rec["skipped"]:
                lines.append(f"[SKIP] {rec['theorem_id']}: degenerate fixture")
            else:
                lines.append(f"[OK]   {rec['theorem_id']}: ratio={rec['ratio']:.6g}")
    return failures, "\n".join(lines)


def main(argv: list | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gausslocal",
                                     description="Gaussian-measure local operator experiments")
    parser.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--out", type=Path, default=Path("reports"), help="output directory")
    parser.add_argument("--n-grid", type=int, default=None, help="override grid cells per axis")
    parser.add_argument("--dim", type=int, choices=(1, 2), default=None, help="override dimension")
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="also emit CSV next to the JSON bundle")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("measure", help="halo, measure-equivalence and doubling checks")
    sub.add_parser("weights", help="weight-class constants and epsilon scans")
    sub.add_parser("verify", help="inequality reports and norm experiments")
    op_cmd = sub.add_parser("op", help="evaluate one operator over sampled sites")
    op_cmd.add_argument("--operator", required=True)
    op_cmd.add_argument("--sites", type=int, default=None)
    rep_cmd = sub.add_parser("report", help="convert a JSON bundle to CSV")
    rep_cmd.add_argument("bundle", type=Path)

    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config,
                                  {"seed": args.seed, "n": args.n_grid, "d": args.dim})
        if args.command == "report":
            out = args.out / f"{args.bundle.stem}.csv"
            args.out.mkdir(parents=True, exist_ok=True)
            run_report(args.bundle, out)
            print(f"wrote {out}")
            return 0
        if args.command == "op":
            out = args.out / f"op_{args.operator}.csv"
            run_op(cfg, args.operator, out, args.sites)
            print(f"wrote {out}")
            return 0
        runner = {"measure": run_measure, "weights": run_weights, "verify": run_verify}
        records = runner[args.command](cfg)
        if _scan_for_nan(records):
            raise NumericalFailure("NaN detected in a report record")
        bundle = build_bundle(cfg, records)
        paths = write_bundle(bundle, args.out, args.command, args.format)
        failures, summary = _summarize(records)
        print(summary)
        for p in paths:
            print(f"wrote {p}")
        return 1 if failures else 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except GaussLocalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
