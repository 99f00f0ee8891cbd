"""Command-line front end: single-point witnesses, scans, shot experiments and m₀.

Options may come from a JSON config file (``--config``) and from flags;
flags win.  Every output record carries the tool version, the merged
configuration, the seed, the Fock cutoffs and the tolerance settings.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import __version__
from .errors import AliasingError, ConfigError, CutoffError, SpecError, UnsupportedError
from .fock import DEFAULT_GUARD_ORDER, DEFAULT_TAIL_BOUND, NORM_TOL, WEIGHT_TOL, quadrature_covariance
from .fourier import ALIAS_TOL
from .sampling import (RNG_ALGORITHM, MinorExperiment, coverage_experiment, fig6a_point, fig6b_point,
                       m0_chebyshev, m0_hoeffding, m0_hoeffding_range, mean_coverage)
from .states import NOON, TMSV, Cat, CoherentProduct, HermiteGaussian, PMTransform, build, covariance_matrix
from .witness import (MinorSpec, WitnessResult, analytic_minor, assemble, family_moments,
                      minor_d_lossy, mgvt, optimal_reference, reference_for_target,
                      second_moment_criterion, state_moments, lossy_from_moments)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
DEFAULT_MAX_POINTS = 20000

FAMILIES = {"tmsv": ("lambda", "disp_alpha", "disp_beta"),
            "cat": ("alpha", "beta", "theta", "dephasing"),
            "noon": ("N", "alpha", "beta", "dephasing"),
            "coherent": ("gamma", "delta"),
            "hg": ("sigma_plus", "sigma_minus", "phi", "xi", "squeeze_axis")}
REFERENCE_AXES = ("ref_gamma", "ref_delta", "ref_product", "ref_equal")
CRITERIA = ("d", "dprime", "d_lossy", "mgvt", "second_moment")


def _complex(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    return complex(value)


def _plain(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _axis(text) -> dict:
    if isinstance(text, dict):
        return text
    try:
        name, start, stop, num = str(text).split(":")
        return {"name": name, "start": float(start), "stop": float(stop), "num": int(num)}
    except ValueError:
        raise ConfigError(f"axis {text!r} must look like name:start:stop:num") from None


def _criteria(value) -> list:
    items = value if isinstance(value, list) else [v for v in str(value).split(",") if v]
    bad = [c for c in items if c not in CRITERIA]
    if bad:
        raise ConfigError(f"unknown criteria {bad}; choose from {list(CRITERIA)}")
    return list(items)


# key -> (converter, default); None default means "unset"
SCHEMA = {
    "family": (str, None), "lambda": (float, None), "disp_alpha": (_complex, 0j), "disp_beta": (_complex, 0j),
    "alpha": (_complex, None), "beta": (_complex, None), "theta": (float, math.pi), "dephasing": (float, 0.0),
    "N": (int, None), "gamma": (_complex, None), "delta": (_complex, None),
    "sigma_plus": (float, None), "sigma_minus": (float, None), "phi": (float, 0.0), "xi": (float, 1.0),
    "squeeze_axis": (str, "r"),
    "spec": (str, None), "reference": (str, "replica"), "ref_gamma": (_complex, None), "ref_delta": (_complex, None),
    "method": (str, "numeric"), "eta1": (float, None), "eta2": (float, None),
    "x": (_axis, None), "y": (_axis, None), "criteria": (_criteria, None), "max_points": (int, DEFAULT_MAX_POINTS),
    "shots": (int, None), "trials": (int, 1), "seed": (int, 0), "epsilon": (float, None),
    "confidence_delta": (float, 0.1), "bound": (str, "chebyshev"), "variance": (float, None),
    "value_range": (list, None), "preset": (str, None), "k_sigma": (float, 1.0), "oversample": (int, 1),
    "output": (str, None), "format": (str, None), "threads": (int, 1),
    "tail_bound": (float, DEFAULT_TAIL_BOUND), "guard_order": (int, DEFAULT_GUARD_ORDER),
}
COMMAND_KEYS = {
    "witness": {"family", *sum(FAMILIES.values(), ()), "spec", "reference", "ref_gamma", "ref_delta", "method",
                "eta1", "eta2", "output", "format", "seed", "tail_bound", "guard_order"},
    "scan": {"family", *sum(FAMILIES.values(), ()), "spec", "reference", "ref_gamma", "ref_delta", "method",
             "eta1", "eta2", "x", "y", "criteria", "max_points", "output", "format", "threads", "seed",
             "tail_bound", "guard_order"},
    "shots": {"family", *sum(FAMILIES.values(), ()), "spec", "reference", "ref_gamma", "ref_delta", "shots",
              "trials", "seed", "epsilon", "confidence_delta", "bound", "oversample", "output", "format",
              "threads", "tail_bound", "guard_order"},
    "m0": {"bound", "N", "epsilon", "confidence_delta", "variance", "value_range", "family",
           *sum(FAMILIES.values(), ()), "spec", "reference", "ref_gamma", "ref_delta", "preset", "k_sigma",
           "output", "format", "seed", "tail_bound", "guard_order"},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated, merged settings for one CLI invocation."""

    command: str
    values: dict = field(default_factory=dict)

    @classmethod
    def from_sources(cls, command: str, file_values: dict, cli_values: dict) -> "RunConfig":
        allowed = COMMAND_KEYS[command]
        merged = {}
        for source in (file_values, cli_values):
            for key, raw in source.items():
                if key not in allowed:
                    raise ConfigError(f"unknown key {key!r} for command {command!r}")
                conv, _ = SCHEMA[key]
                try:
                    merged[key] = conv(raw) if raw is not None else None
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None
        for key in allowed:
            merged.setdefault(key, SCHEMA[key][1])
        cfg = cls(command, merged)
        cfg.validate()
        return cfg

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        value = self.values.get(key)
        return default if value is None else value

    def validate(self) -> None:
        v = self.values
        fam = v.get("family")
        if fam is not None and fam not in FAMILIES:
            raise ConfigError(f"unknown family {fam!r}; choose from {sorted(FAMILIES)}")
        if self.command in ("witness", "scan", "shots") and fam is None:
            raise ConfigError("--family is required")
        if self.command in ("witness", "scan", "shots") and v.get("spec") is None:
            raise ConfigError("--spec is required (m,n,p,q)")
        if v.get("spec") is not None:
            MinorSpec.parse(v["spec"])
        ref = v.get("reference")
        if ref is not None and ref not in ("replica", "optimal", "coherent"):
            raise ConfigError("--reference must be replica, optimal or coherent")
        if v.get("method") not in (None, "numeric", "analytic", "fourier"):
            raise ConfigError("--method must be numeric, analytic or fourier")
        if v.get("format") not in (None, "json", "csv"):
            raise ConfigError("--format must be json or csv")
        if v.get("bound") not in (None, "chebyshev", "hoeffding"):
            raise ConfigError("--bound must be chebyshev or hoeffding")
        for key in ("eta1", "eta2", "dephasing"):
            if v.get(key) is not None and not 0.0 <= v[key] <= 1.0:
                raise ConfigError(f"{key} must lie in [0, 1]")
        if v.get("threads") is not None and v["threads"] < 1:
            raise ConfigError("--threads must be ≥ 1")
        if self.command == "scan" and v.get("x") is None:
            raise ConfigError("scan needs at least --x name:start:stop:num")
        for ax in ("x", "y"):
            if v.get(ax) is not None:
                name = v[ax]["name"]
                if fam is not None and name not in FAMILIES[fam] + REFERENCE_AXES + ("eta",):
                    raise ConfigError(f"axis {name!r} is not a parameter of family {fam!r}")
                if v[ax]["num"] < 1:
                    raise ConfigError("axis needs at least one point")
        if self.command == "shots":
            if v.get("shots") is None and v.get("epsilon") is None:
                raise ConfigError("shots needs --shots or --epsilon (to size the run by m0)")
            if v.get("trials", 1) < 1:
                raise ConfigError("--trials must be ≥ 1")

    def echo(self) -> dict:
        out = {}
        for key, value in sorted(self.values.items()):
            # the destination does not affect results; leaving it out keeps reruns byte-identical
            if value is None or key == "output":
                continue
            out[key] = _plain(value) if isinstance(value, complex) else value
        return out


# ----------------------------------------------------------------------------
# family / reference construction


def make_family(values: dict):
    fam = values["family"]
    need = lambda k: _require(values, k, fam)  # noqa: E731
    if fam == "tmsv":
        return TMSV(need("lambda"), (values.get("disp_alpha") or 0j, values.get("disp_beta") or 0j))
    if fam == "cat":
        alpha = need("alpha")
        beta = values.get("beta")
        return Cat(alpha, alpha if beta is None else beta, values.get("theta", math.pi),
                   values.get("dephasing") or 0.0)
    if fam == "noon":
        beta = values.get("beta")
        alpha = need("alpha")
        if beta is None:
            # balanced amplitudes typed to a few digits, e.g. 0.7071
            beta = math.sqrt(max(0.0, 1.0 - abs(alpha) ** 2))
            alpha = alpha / math.sqrt(abs(alpha) ** 2 + beta**2) if abs(alpha) <= 1 else alpha
        return NOON(need("N"), alpha, beta, values.get("dephasing") or 0.0)
    if fam == "coherent":
        return CoherentProduct(need("gamma"), need("delta"))
    if fam == "hg":
        tr = PMTransform(values.get("phi") or 0.0, values.get("xi") or 1.0, values.get("squeeze_axis") or "r")
        return HermiteGaussian(need("sigma_plus"), need("sigma_minus"), tr)
    raise ConfigError(f"unknown family {fam!r}")


def _require(values: dict, key: str, fam: str):
    if values.get(key) is None:
        raise ConfigError(f"family {fam!r} needs --{key.replace('_', '-')}")
    return values[key]


def _reference(values: dict) -> tuple | None:
    """Explicit coherent reference from ``ref_*`` keys, or None."""
    if values.get("ref_product") is not None:
        x = values["ref_product"].real
        r = math.sqrt(abs(x))
        return (complex(r), complex(math.copysign(r, x)))
    if values.get("ref_equal") is not None:
        return (values["ref_equal"], values["ref_equal"])
    g, d = values.get("ref_gamma"), values.get("ref_delta")
    if g is None and d is None:
        return None
    if g is None or d is None:
        raise ConfigError("a coherent reference needs both --ref-gamma and --ref-delta")
    return (g, d)


def _tolerances(values: dict) -> dict:
    return {"tail_bound": values.get("tail_bound", DEFAULT_TAIL_BOUND),
            "guard_order": values.get("guard_order", DEFAULT_GUARD_ORDER),
            "norm_tol": NORM_TOL, "weight_tol": WEIGHT_TOL, "alias_tol": ALIAS_TOL}


def evaluate_point(values: dict) -> dict:
    """All requested quantities at one parameter point."""
    family = make_family(values)
    spec = MinorSpec.parse(values["spec"])
    method = values.get("method") or "numeric"
    mode = values.get("reference") or "replica"
    explicit_ref = _reference(values)
    if explicit_ref is not None and mode == "replica":
        mode = "coherent"
    if mode == "coherent" and explicit_ref is None:
        raise ConfigError("--reference coherent needs --ref-gamma and --ref-delta")
    kw = {"tail_bound": values.get("tail_bound", DEFAULT_TAIL_BOUND),
          "guard_order": values.get("guard_order", DEFAULT_GUARD_ORDER)}
    criteria = values.get("criteria") or (["d_lossy"] if values.get("eta1") is not None else ["dprime"])
    out = {"cutoff": None}

    state = None
    if method == "analytic":
        mom = family_moments(family, spec)
    else:
        state = build(family, **kw)
        out["cutoff"] = state.cutoff
        mom = state_moments(state, spec)

    if mode == "optimal":
        ref_choice = reference_for_target(mom.X, spec)
        ref = (ref_choice.gamma, ref_choice.delta)
        out["reference_metadata"] = ref_choice.metadata
    elif mode == "coherent":
        ref = explicit_ref
    else:
        ref = None
    if ref is not None:
        out["reference"] = [_plain(ref[0]), _plain(ref[1])]

    results = {}
    if "d" in criteria or "dprime" in criteria:
        results["d"] = assemble(mom, mom, "analytic" if method == "analytic" else "fock-numeric")
    if "dprime" in criteria:
        if ref is None:
            results["dprime"] = results["d"]
        elif method == "fourier":
            ref_state = build(CoherentProduct(*ref), **kw)
            exp = MinorExperiment.prepare(state, ref_state, spec)
            results["dprime"] = exp.exact()
            out["cutoff"] = [state.cutoff, ref_state.cutoff]
        else:
            ref_mom = family_moments(CoherentProduct(*ref), spec)
            results["dprime"] = assemble(mom, ref_mom, "analytic" if method == "analytic" else "fock-numeric")
    if "d_lossy" in criteria:
        eta1 = values.get("eta1")
        eta2 = values.get("eta2", eta1)
        if eta1 is None:
            eta1 = eta2 = values.get("eta", 1.0)
        results["d_lossy"] = lossy_from_moments(mom, spec, eta1, eta2 if eta2 is not None else eta1,
                                                "analytic" if method == "analytic" else "fock-numeric")
    if "mgvt" in criteria or "second_moment" in criteria:
        if isinstance(family, HermiteGaussian) and method == "analytic":
            cov = covariance_matrix(family)
        else:
            if state is None:
                state = build(family, **kw)
            _, cov = quadrature_covariance(state)
        if "mgvt" in criteria:
            vals = [mgvt(cov, b) for b in ("+", "-")]
            out["mgvt"] = float(min(vals))
            out["mgvt_witnessed"] = bool(min(vals) < 1.0)
        if "second_moment" in criteria:
            vals = [second_moment_criterion(cov, b) for b in ("+", "-")]
            out["second_moment"] = float(min(vals))
            out["second_moment_witnessed"] = bool(min(vals) < 0.0)
    for name, res in results.items():
        if name == "d" and "d" not in criteria:
            continue
        out[name] = float(res.value)
        out[f"{name}_witnessed"] = bool(res.witnessed)
        out[f"{name}_result"] = res
    return out


# ----------------------------------------------------------------------------
# commands


def _record(cfg: RunConfig, payload: dict, cutoff) -> dict:
    return {"tool": "cvwitness", "version": __version__, "command": cfg.command, "config": cfg.echo(),
            "seed": cfg.get("seed", 0), "cutoff": cutoff, "tolerances": _tolerances(cfg.values),
            "rng_algorithm": RNG_ALGORITHM, **payload}


def cmd_witness(cfg: RunConfig) -> dict:
    values = dict(cfg.values)
    eta1 = values.get("eta1")
    if eta1 is not None or values.get("eta2") is not None:
        values["criteria"] = ["d_lossy"]
        values["eta1"] = eta1 if eta1 is not None else 1.0
        values["eta2"] = values.get("eta2") if values.get("eta2") is not None else values["eta1"]
    else:
        values["criteria"] = ["dprime"] if (values.get("reference") != "replica" or _reference(values)) else ["d"]
    point = evaluate_point(values)
    key = values["criteria"][0]
    res: WitnessResult = point[f"{key}_result"]
    payload = {"result": res.to_dict(), "kind": key}
    if "reference" in point:
        payload["reference"] = point["reference"]
        payload["reference_metadata"] = point.get("reference_metadata")
    return _record(cfg, payload, point["cutoff"])


def _axis_values(axis: dict) -> np.ndarray:
    if axis["num"] == 1:
        return np.array([axis["start"]])
    return np.linspace(axis["start"], axis["stop"], axis["num"])


def cmd_scan(cfg: RunConfig) -> tuple[list, dict]:
    axes = [cfg["x"]] + ([cfg["y"]] if cfg.get("y") is not None else [])
    grids = [_axis_values(a) for a in axes]
    total = int(np.prod([len(g) for g in grids]))
    if total > cfg.get("max_points", DEFAULT_MAX_POINTS):
        raise ConfigError(f"scan has {total} points, above --max-points {cfg.get('max_points')}")
    criteria = cfg.get("criteria") or ["dprime"]
    names = [a["name"] for a in axes]

    def one(point):
        values = dict(cfg.values)
        values["criteria"] = criteria
        for name, x in zip(names, point):
            values[name] = int(round(x)) if name == "N" else (float(x) if name in ("lambda", "theta", "dephasing",
                                                                                   "sigma_plus", "sigma_minus",
                                                                                   "phi", "xi", "eta") else complex(x))
        if "eta" in names:
            values["eta1"] = values["eta2"] = values["eta"]
        res = evaluate_point(values)
        row = {name: float(x) for name, x in zip(names, point)}
        row["cutoff"] = res.get("cutoff")
        for c in criteria:
            row[c] = res[c]
            row[f"{c}_witnessed"] = res[f"{c}_witnessed"]
        return row

    points = list(product(*grids))
    threads = cfg.get("threads", 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, points))
    else:
        rows = [one(p) for p in points]
    meta = _record(cfg, {"columns": list(rows[0].keys()), "points": total}, sorted({str(r["cutoff"]) for r in rows}))
    return rows, meta


def cmd_shots(cfg: RunConfig) -> dict:
    values = dict(cfg.values)
    family = make_family(values)
    spec = MinorSpec.parse(values["spec"])
    kw = {"tail_bound": cfg.get("tail_bound"), "guard_order": cfg.get("guard_order")}
    state = build(family, **kw)
    mode = cfg.get("reference", "replica")
    explicit = _reference(values)
    if mode == "optimal":
        ref_state = optimal_reference(state, spec).state(**kw)
    elif mode == "coherent" or explicit is not None:
        if explicit is None:
            raise ConfigError("--reference coherent needs --ref-gamma and --ref-delta")
        ref_state = build(CoherentProduct(*explicit), **kw)
    else:
        ref_state = state
    exp = MinorExperiment.prepare(state, ref_state, spec, cfg.get("oversample", 1))
    exact = exp.exact().value
    delta = cfg.get("confidence_delta", 0.1)
    eps = cfg.get("epsilon")
    seed = cfg.get("seed", 0)
    trials = cfg.get("trials", 1)
    payload = {"exact": exact, "grid": list(exp.shape), "configurations": exp.metadata["configurations"]}
    if cfg.get("bound") == "hoeffding":
        if eps is None:
            raise ConfigError("a Hoeffding run needs --epsilon")
        if not isinstance(family, NOON):
            raise ConfigError("the Hoeffding budget is defined for NOON inputs (bounded outcomes)")
        N = int(family.N)
        m0 = m0_hoeffding(N, eps, delta)
        per_point = cfg.get("shots") or max(1, math.ceil(m0 / (exp.shape[0] * exp.shape[1])))
        cover = [mean_coverage(p, exp.o_table, per_point, trials, eps, seed + 7919 * i)
                 for i, p in enumerate(pmf for row in exp.grid for pmf in row)]
        payload.update(bound="hoeffding", m0=m0, shots_per_point=per_point,
                       coverage_per_point=[c.coverage for c in cover],
                       coverage=min(c.coverage for c in cover), target_coverage=1 - delta)
        return _record(cfg, payload, [state.cutoff, ref_state.cutoff])
    var = exp.single_shot_variance()["total"]
    shots = cfg.get("shots") or m0_chebyshev(var, eps, delta)
    cov = coverage_experiment(exp, shots, trials, eps if eps is not None else float("inf"), seed,
                              cfg.get("threads", 1))
    payload.update(bound="chebyshev", variance=var, shots_per_configuration=shots,
                   total_shots_per_trial=shots * exp.metadata["configurations"],
                   trials=[float(v) for v in cov.estimates], quantiles=cov.quantiles(),
                   mean=float(np.mean(cov.estimates)))
    if eps is not None:
        payload.update(epsilon=eps, coverage=cov.coverage, target_coverage=1 - delta)
    return _record(cfg, payload, [state.cutoff, ref_state.cutoff])


def cmd_m0(cfg: RunConfig) -> dict:
    delta = cfg.get("confidence_delta", 0.1)
    preset = cfg.get("preset")
    if preset == "fig6a":
        alpha = cfg.get("alpha")
        if alpha is None:
            raise ConfigError("preset fig6a needs --alpha")
        return _record(cfg, {"preset": preset, **_jsonable(fig6a_point(float(abs(alpha)), delta))}, None)
    if preset == "fig6b":
        if cfg.get("N") is None:
            raise ConfigError("preset fig6b needs --N")
        return _record(cfg, {"preset": preset, **fig6b_point(cfg["N"], cfg.get("k_sigma", 1.0), delta)}, None)
    if preset is not None:
        raise ConfigError("--preset must be fig6a or fig6b")
    eps = cfg.get("epsilon")
    if eps is None:
        raise ConfigError("m0 needs --epsilon")
    if cfg.get("bound") == "hoeffding":
        if cfg.get("value_range") is not None:
            m0 = m0_hoeffding_range(tuple(cfg["value_range"]), eps, delta)
        else:
            if cfg.get("N") is None:
                raise ConfigError("a Hoeffding bound needs --N or --value-range")
            m0 = m0_hoeffding(cfg["N"], eps, delta)
        return _record(cfg, {"bound": "hoeffding", "m0": m0}, None)
    var = cfg.get("variance")
    cutoff = None
    if var is None:
        if cfg.get("family") is None or cfg.get("spec") is None:
            raise ConfigError("a Chebyshev bound needs --variance or a --family and --spec")
        values = dict(cfg.values)
        state = build(make_family(values))
        ref = _reference(values)
        other = state if ref is None else build(CoherentProduct(*ref))
        var = MinorExperiment.prepare(state, other, cfg["spec"]).single_shot_variance()["total"]
        cutoff = [state.cutoff, other.cutoff]
    return _record(cfg, {"bound": "chebyshev", "variance": var, "m0": m0_chebyshev(var, eps, delta)}, cutoff)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return _plain(obj)
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, WitnessResult):
        return obj.to_dict()
    return obj


def dumps(record) -> str:
    return json.dumps(_jsonable(record), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), quoting=csv.QUOTE_MINIMAL)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (list, tuple)):
        return json.dumps(v)
    return v


# ----------------------------------------------------------------------------
# argument parsing


def _add_family_args(p):
    g = p.add_argument_group("state family")
    g.add_argument("--family", choices=sorted(FAMILIES))
    g.add_argument("--lambda", dest="lambda", help="TMSV squeezing λ in (-1, 1)")
    g.add_argument("--disp-alpha", help="TMSV displacement of mode a (complex)")
    g.add_argument("--disp-beta", help="TMSV displacement of mode b (complex)")
    g.add_argument("--alpha", help="cat amplitude α or NOON amplitude α (complex)")
    g.add_argument("--beta", help="cat amplitude β or NOON amplitude β (complex)")
    g.add_argument("--theta", help="cat relative phase θ (default π)")
    g.add_argument("--N", dest="N", help="NOON excitation number")
    g.add_argument("--gamma", help="coherent-product amplitude γ")
    g.add_argument("--delta", help="coherent-product amplitude δ")
    g.add_argument("--sigma-plus", help="Hermite–Gaussian width σ₊")
    g.add_argument("--sigma-minus", help="Hermite–Gaussian width σ₋")
    g.add_argument("--phi", help="rotation of the (r₊, s₋) plane")
    g.add_argument("--xi", help="squeezing factor ξ ≥ 1 of the ± variables")
    g.add_argument("--squeeze-axis", choices=["r", "s"], help="which ± variable ξ stretches")
    g.add_argument("--dephasing", help="dephasing p in [0, 1] (NOON, cat)")


def _add_minor_args(p):
    g = p.add_argument_group("minor")
    g.add_argument("--spec", help="minor indices m,n,p,q")
    g.add_argument("--reference", choices=["replica", "optimal", "coherent"])
    g.add_argument("--ref-gamma", help="reference amplitude γ")
    g.add_argument("--ref-delta", help="reference amplitude δ")


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--output", help="output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--seed", help="RNG seed (default 0)")
    p.add_argument("--tail-bound", help="Fock truncation tail bound")
    p.add_argument("--guard-order", help="moment order guarded by the truncation rule")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvwitness", description=__doc__.splitlines()[0],
                                     argument_default=argparse.SUPPRESS)
    parser.add_argument("--version", action="version", version=f"cvwitness {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    w = sub.add_parser("witness", help="evaluate one minor", argument_default=argparse.SUPPRESS)
    _add_family_args(w)
    _add_minor_args(w)
    w.add_argument("--method", choices=["numeric", "analytic", "fourier"])
    w.add_argument("--eta1", help="loss parameter of the photon-number setup")
    w.add_argument("--eta2", help="loss parameter of the interferometric setup")
    _add_common(w)

    s = sub.add_parser("scan", help="parameter scan to CSV/JSON", argument_default=argparse.SUPPRESS)
    _add_family_args(s)
    _add_minor_args(s)
    s.add_argument("--method", choices=["numeric", "analytic", "fourier"])
    s.add_argument("--eta1")
    s.add_argument("--eta2")
    s.add_argument("--x", help="first axis name:start:stop:num")
    s.add_argument("--y", help="second axis name:start:stop:num")
    s.add_argument("--criteria", help=f"comma list from {','.join(CRITERIA)}")
    s.add_argument("--max-points", help="refuse grids larger than this")
    s.add_argument("--threads", help="worker threads")
    _add_common(s)

    sh = sub.add_parser("shots", help="finite-shot estimates and coverage", argument_default=argparse.SUPPRESS)
    _add_family_args(sh)
    _add_minor_args(sh)
    sh.add_argument("--shots", help="shots per configuration (default: m0 from --epsilon)")
    sh.add_argument("--trials")
    sh.add_argument("--epsilon")
    sh.add_argument("--confidence-delta", help="failure probability δ (default 0.1)")
    sh.add_argument("--bound", choices=["chebyshev", "hoeffding"])
    sh.add_argument("--oversample")
    sh.add_argument("--threads")
    _add_common(sh)

    m = sub.add_parser("m0", help="critical number of measurements", argument_default=argparse.SUPPRESS)
    m.add_argument("--bound", choices=["chebyshev", "hoeffding"])
    m.add_argument("--N", dest="N")
    m.add_argument("--epsilon")
    m.add_argument("--confidence-delta", help="failure probability δ (default 0.1)")
    m.add_argument("--variance")
    m.add_argument("--value-range", nargs=2, type=float)
    m.add_argument("--preset", choices=["fig6a", "fig6b"])
    m.add_argument("--k-sigma", help="accuracy in units of σ for preset fig6b")
    m.add_argument("--family", choices=sorted(FAMILIES))
    m.add_argument("--alpha")
    m.add_argument("--beta")
    m.add_argument("--theta")
    m.add_argument("--lambda", dest="lambda")
    m.add_argument("--gamma")
    m.add_argument("--delta")
    m.add_argument("--sigma-plus")
    m.add_argument("--sigma-minus")
    _add_minor_args(m)
    _add_common(m)
    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    data.pop("command", None)
    return data


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    try:
        file_values = _load_config(args.pop("config", None))
        cfg = RunConfig.from_sources(command, file_values, args)
        fmt = cfg.get("format")
        out = cfg.get("output")
        if command == "scan":
            rows, meta = cmd_scan(cfg)
            if fmt == "json":
                _emit(dumps({**meta, "rows": rows}), out)
            else:
                _emit(rows_to_csv(rows), out)
                if out is not None:
                    _emit(dumps(meta), out + ".meta.json")
        else:
            record = {"witness": cmd_witness, "shots": cmd_shots, "m0": cmd_m0}[command](cfg)
            if fmt == "csv":
                flat = {k: v for k, v in _jsonable(record).items() if not isinstance(v, (dict, list))}
                _emit(rows_to_csv([flat]), out)
            else:
                _emit(dumps(record), out)
    except (ConfigError, SpecError) as exc:
        print(f"cvwitness: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CutoffError, AliasingError, UnsupportedError, OverflowError, ValueError) as exc:
        print(f"cvwitness: numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
