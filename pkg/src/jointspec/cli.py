"""Command-line front end: load instances, run analyses, emit reports.

Exit status contract: 0 all requested checks pass, 1 a check failed,
2 input/config parse error, 3 numerical refusal (blow-up, non-normal
leading matrix, failed hypotheses) with a diagnostic report.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .branches import check_regularity, local_branches
from .coxeter import CoxeterMatrix, CoxeterRep, build_representation, rigidity_check
from .errors import DimensionMismatchError, JointSpecError, NotNormalError, ProjectionBlowupError
from .fixtures import blowup_demo_pair
from .pencil import MatrixTuple, normality_report, sample_spectrum_curve
from .projections import limit_projection, projection_ladder, projection_norm_profile
from .relations import HypothesisNotMet, verify_pair
from .serialize import SCHEMA_VERSION, json_to_matrix, pair_to_complex

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_REFUSED = 3


@dataclass
class RunConfig:
    command: str
    input: str = None
    out: str = None
    tol: float = 1e-5
    t_max: float = 1e-2
    samples: int = 8
    seed: int = 0
    epsilon: float = 0.15
    quad_cap: int = 2**14

    def validate(self):
        if self.tol <= 0:
            raise ValueError("--tol must be positive")
        if self.samples < 5:
            raise ValueError("--samples must be at least 5")
        if self.t_max <= 0:
            raise ValueError("--t-max must be positive")
        if self.epsilon <= 0:
            raise ValueError("--epsilon must be positive")
        if self.quad_cap < 16:
            raise ValueError("--quad-cap must be at least 16")


def _clean(obj):
    """Make a report JSON-safe: non-finite floats become None."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _emit(report, config: RunConfig):
    text = json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _provenance(config: RunConfig):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "config": {
            "input": config.input,
            "tol": config.tol,
            "t_max": config.t_max,
            "samples": config.samples,
            "seed": config.seed,
            "epsilon": config.epsilon,
            "quad_cap": config.quad_cap,
        },
    }


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _tuple_from(obj):
    if "tuple" in obj:
        obj = obj["tuple"]
    return MatrixTuple.from_json(obj)


def _cmd_analyze(config: RunConfig):
    obj = _load_json(config.input)
    tup = _tuple_from(obj)
    if "lambda" not in obj:
        raise KeyError("analyze input needs a 'lambda' field")
    lam = pair_to_complex(obj["lambda"])
    if "direction" in obj:
        xhat = np.array([pair_to_complex(v) for v in obj["direction"]])
    else:
        xhat = np.zeros(tup.n - 1)
        xhat[0] = 1.0

    report = _provenance(config)
    norm = normality_report(tup.matrices[0])
    report["normality"] = {
        "commutator_norm": norm.commutator_norm,
        "is_normal": norm.is_normal,
        "is_diagonalizable": norm.is_diagonalizable,
    }
    branches = local_branches(tup, lam, xhat, t_max=config.t_max, samples=config.samples)
    reg = check_regularity(tup, lam, xhat, t_max=config.t_max, samples=config.samples)
    report["branches"] = [b.to_json() for b in branches]
    report["regularity"] = reg.to_json()
    report["projections"] = []
    refusal = None
    for b in branches:
        ladder = projection_ladder(tup, b, quad_cap=config.quad_cap)
        profile = projection_norm_profile(tup, b, ladder=ladder)
        entry = {"j": b.index, "norm_profile": profile.to_json(),
                 "ladder": [cp.to_json() for cp in ladder]}
        try:
            lp = limit_projection(tup, b, ladder=ladder)
            entry["limit"] = lp.to_json()
        except ProjectionBlowupError as exc:
            entry["limit"] = None
            entry["blowup_exponent"] = exc.exponent
            refusal = str(exc)
        report["projections"].append(entry)
    if refusal is not None:
        report["refusal"] = refusal
        _emit(report, config)
        return EXIT_REFUSED
    _emit(report, config)
    return EXIT_OK


def _cmd_verify(config: RunConfig):
    obj = _load_json(config.input)
    tup = _tuple_from(obj)
    report = _provenance(config)
    try:
        reports = verify_pair(
            tup, tol=config.tol, t_max=config.t_max, samples=config.samples,
            quad_cap=config.quad_cap,
        )
    except (NotNormalError, HypothesisNotMet, ProjectionBlowupError) as exc:
        report["refusal"] = str(exc)
        _emit(report, config)
        return EXIT_REFUSED
    report["instance"] = tup.to_json()
    report["tolerances"] = {"relation": config.tol}
    report["reports"] = [r.to_json() for r in reports]
    passed = all(r.passed for r in reports)
    report["passed"] = passed
    _emit(report, config)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _cmd_coxeter_check(config: RunConfig):
    obj = _load_json(config.input)
    tup = _tuple_from(obj)
    cm = CoxeterMatrix.from_json(obj["coxeter_matrix"])
    rep_spec = obj["rep"]
    if "matrices" in rep_spec:
        rep = CoxeterRep(cm=cm, generators=tuple(json_to_matrix(m) for m in rep_spec["matrices"]))
    else:
        rep = build_representation(cm, rep_spec["assignment"], seed=rep_spec.get("seed"))
    rig = rigidity_check(
        tup, rep, epsilon=config.epsilon, seed=config.seed,
    )
    report = _provenance(config)
    report["rigidity"] = rig.to_json()
    _emit(report, config)
    restriction_ok = rig.restriction is not None and (
        all(v <= config.tol for v in rig.restriction.unitary_residuals)
        and all(v <= config.tol for v in rig.restriction.selfadjoint_residuals)
        and all(v <= config.tol for v in rig.restriction.relation_residuals.values())
        and rig.restriction.spectra_match
        and rig.restriction.exponents_ok
    )
    ok = rig.applicable and rig.dim_L == rep.dim and restriction_ok
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_plot(config: RunConfig):
    obj = _load_json(config.input)
    tup = _tuple_from(obj)
    window = obj.get("window", [[-2.0, 2.0], [-2.0, 2.0]])
    grid = obj.get("grid", [41, 41])
    points = sample_spectrum_curve(tup, window=(tuple(window[0]), tuple(window[1])),
                                   grid=tuple(grid))
    if config.out and config.out.endswith(".svg"):
        _write_svg(config.out, points, window)
    else:
        _write_csv(config.out, points)
    return EXIT_OK


def _write_csv(path, points):
    lines = ["x1_re,x1_im,x2_re,x2_im"]
    for p in points:
        x1, x2 = (complex(v) for v in p.coords)
        lines.append(f"{x1.real!r},{x1.imag!r},{x2.real!r},{x2.imag!r}")
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_svg(path, points, window, size=600):
    (x1lo, x1hi), (x2lo, x2hi) = window
    sx = size / (x1hi - x1lo)
    sy = size / (x2hi - x2lo)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for p in points:
        x1, x2 = p.coords
        cx = (x1.real - x1lo) * sx
        cy = size - (x2.real - x2lo) * sy
        parts.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="2" fill="black"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def _cmd_demo_blowup(config: RunConfig):
    tup = blowup_demo_pair()
    samples = max(config.samples, 10)
    branches = local_branches(tup, 1.0, [1.0], t_max=0.1, samples=samples)
    report = _provenance(config)
    report["ladder"] = {"t_max": 0.1, "samples": samples}
    report["profiles"] = []
    exponents = []
    for b in branches:
        profile = projection_norm_profile(tup, b, quad_cap=config.quad_cap)
        report["profiles"].append({"j": b.index, **profile.to_json()})
        exponents.append(profile.exponent)
    report["refusal"] = (
        f"component projections blow up as t -> 0 (fitted exponents "
        f"{[round(e, 3) for e in exponents]}); the leading matrix is not normal"
    )
    _emit(report, config)
    return EXIT_REFUSED


_COMMANDS = {
    "analyze": _cmd_analyze,
    "verify": _cmd_verify,
    "coxeter-check": _cmd_coxeter_check,
    "plot": _cmd_plot,
    "demo-blowup": _cmd_demo_blowup,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="jointspec",
        description="Determinantal hypersurface analyses for matrix tuples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", help="input JSON path")
        p.add_argument("--out", help="output path (JSON, CSV or SVG)")
        p.add_argument("--tol", type=float, default=1e-5)
        p.add_argument("--t-max", dest="t_max", type=float, default=1e-2)
        p.add_argument("--samples", type=int, default=8)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--epsilon", type=float, default=0.15)
        p.add_argument("--quad-cap", dest="quad_cap", type=int, default=2**14)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig(
        command=args.command, input=args.input, out=args.out, tol=args.tol,
        t_max=args.t_max, samples=args.samples, seed=args.seed,
        epsilon=args.epsilon, quad_cap=args.quad_cap,
    )
    try:
        config.validate()
        if config.command != "demo-blowup" and not config.input:
            raise ValueError(f"{config.command} requires --input")
        return _COMMANDS[config.command](config)
    except (ValueError, KeyError, OSError, json.JSONDecodeError, DimensionMismatchError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (NotNormalError, ProjectionBlowupError, HypothesisNotMet) as exc:
        sys.stderr.write(f"refused: {exc}\n")
        return EXIT_REFUSED
    except JointSpecError as exc:
        sys.stderr.write(f"refused: {exc}\n")
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
