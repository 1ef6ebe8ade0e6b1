"""Command-line entry points: 0/1-IP counting and manifest-driven experiments.

`polyprg count` estimates the number of solutions of a 0/1 integer program
A01 x <= b01 by transforming it to the +-1 cube, enumerating the generator's
seed space (all seeds or a deterministic counter prefix), and scaling the
satisfying fraction by 2^n.  The exact count is attached whenever n is
within the enumeration cap.

`polyprg run-manifest` validates a JSON manifest of experiments, dispatches
each to the lab, writes one JSON and one CSV report per experiment, and
exits 0 iff every asserted bound held (bound checks whose hypotheses fail
are skipped with a note and do not fail the run).

All numbers are printed with 17 significant digits so reports round-trip
exactly; identical inputs and parameters produce bit-identical output.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import lab
from .generators import GeneratorParams, derive_params, seed_length
from .mollifier import MollifierSpec
from .polytope import Polytope, standardize, zero_one_transform

SCHEMA_VERSION_INSTANCE = "polyprg.instance/1"
SCHEMA_VERSION_MANIFEST = "polyprg.manifest/1"
SCHEMA_VERSION_COUNT = "polyprg.count_result/1"


def _load_schema(name: str) -> dict:
    ref = importlib.resources.files("polyprg") / "schemas" / name
    return json.loads(ref.read_text())


def _format_float(x: float) -> float:
    # json.dumps already emits shortest round-trip floats; keep as float.
    return x


def _json_dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


class CliError(Exception):
    pass


def _validate(doc, schema_name: str, where: str):
    schema = _load_schema(schema_name)
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            path = "$" + "".join(
                f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path
            )
            lines.append(f"  {where}: {path}: {err.message}")
        raise CliError("schema validation failed:\n" + "\n".join(lines))


def _load_instance(doc: dict, where: str) -> tuple[Polytope, str]:
    _validate(doc, "instance.schema.json", where)
    A = np.asarray(doc["A"], dtype=np.float64)
    b = np.asarray(doc["b"], dtype=np.float64)
    if A.ndim != 2 or any(len(row) != A.shape[1] for row in doc["A"]):
        raise CliError(f"{where}: A must be rectangular")
    if A.shape[0] != b.shape[0]:
        raise CliError(f"{where}: A has {A.shape[0]} rows but b has {b.shape[0]}")
    domain = doc["domain"]
    if domain == "zero_one":
        return zero_one_transform(A, b), domain
    return Polytope(A, b), domain


def _parse_mode(text: str) -> tuple[str, int | None]:
    text = text.replace("-", "_")
    if text == "all_seeds":
        return "all_seeds", None
    if text == "exact":
        return "exact", None
    if text.startswith("strided:"):
        count = int(text.split(":", 1)[1])
        if count < 1:
            raise CliError("strided sample count must be >= 1")
        return "strided", count
    raise CliError(f"unknown mode {text!r} (use all-seeds, strided:N, or exact)")


def _params_for(
    p: Polytope, args, params_doc: dict | None
) -> GeneratorParams:
    if params_doc is not None:
        return GeneratorParams.from_json(json.dumps(params_doc))
    params = derive_params(p.n, max(p.m, 2), args.delta, args.eps)
    total, _ = seed_length(params)
    print(
        f"notice: no --params given; derived theory-mode parameters need "
        f"{total} seed bits (L={params.L}, k={params.k}). Desk-scale "
        f"all-seeds enumeration requires <= {lab.SEED_ENUM_CAP_BITS} bits; "
        f"supply small lab-mode parameters via --params for exhaustive runs.",
        file=sys.stderr,
    )
    return params


def _count_result(
    p: Polytope,
    domain: str,
    mode: str,
    sample_count: int | None,
    params: GeneratorParams | None,
    delta: float | None,
    enum_cap: int,
    standardized: bool,
    p_gen: Polytope | None = None,
) -> dict:
    # p is the instance being counted; p_gen (default p) is what the
    # generator is evaluated on (the standardized approximation, if any)
    n = p.n
    exact_count = None
    exact_fraction = None
    if n <= enum_cap:
        exact_count = lab.exact_orthant_count(p)
        exact_fraction = exact_count / float(1 << n)

    seeds_used = None
    seed_bits = None
    if mode == "exact":
        if exact_count is None:
            raise CliError(
                f"exact mode needs n <= enum cap ({enum_cap}); n = {n}"
            )
        est_fraction = exact_fraction
    else:
        try:
            gen = lab.generator_orthant_prob(
                p_gen if p_gen is not None else p, params, mode, sample_count
            )
        except lab.SeedBudgetError as exc:
            raise CliError(
                f"{exc} (try --mode strided:N or smaller --params)"
            ) from exc
        est_fraction = gen.probability
        seeds_used = gen.seeds_used
        seed_bits = gen.seed_bits

    return {
        "schema": SCHEMA_VERSION_COUNT,
        "n": n,
        "m": p.m,
        "mode": mode if sample_count is None else f"strided:{sample_count}",
        "delta": delta,
        "estimated_fraction": _format_float(est_fraction),
        "estimated_count": _format_float(est_fraction * float(1 << n)),
        "exact_count": exact_count,
        "exact_fraction": exact_fraction,
        "seeds_used": seeds_used,
        "seed_bits": seed_bits,
        "standardized": standardized,
        "trivial_regime": params.trivial_regime if params is not None else None,
        "enum_cap": enum_cap,
        "params": json.loads(params.to_json()) if params is not None else None,
    }


COUNT_CSV_HEADER = (
    "n,m,mode,estimated_fraction,estimated_count,exact_count,exact_fraction,"
    "seeds_used,seed_bits"
)


def _count_csv_row(doc: dict) -> str:
    def fmt(x):
        if x is None:
            return ""
        if isinstance(x, float):
            return format(x, ".17g")
        return str(x)

    return ",".join(
        fmt(doc[k])
        for k in (
            "n",
            "m",
            "mode",
            "estimated_fraction",
            "estimated_count",
            "exact_count",
            "exact_fraction",
            "seeds_used",
            "seed_bits",
        )
    )


def cmd_count(args) -> int:
    doc = json.loads(Path(args.instance).read_text())
    p, domain = _load_instance(doc, args.instance)
    if domain != "zero_one":
        raise CliError("count expects a zero_one-domain instance (a 0/1 IP)")
    mode, sample_count = _parse_mode(args.mode)

    params = None
    if mode != "exact":
        params_doc = (
            json.loads(Path(args.params).read_text()) if args.params else None
        )
        params = _params_for(p, args, params_doc)

    standardized = False
    p_gen = None
    if args.standardize and params is not None:
        sp = standardize(p, params.k, params.tau)
        p_gen = sp.poly
        standardized = not sp.trivial_regime

    result = _count_result(
        p, domain, mode, sample_count, params, args.delta, args.enum_cap,
        standardized, p_gen,
    )
    text = _json_dumps(result)
    print(text)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "count_result.json").write_text(text + "\n")
        (outdir / "count_result.csv").write_text(
            COUNT_CSV_HEADER + "\n" + _count_csv_row(result) + "\n"
        )
    return 0


# ---------------------------------------------------------------------------
# Manifest runner
# ---------------------------------------------------------------------------


def _exp_params(exp: dict) -> GeneratorParams:
    if "params" not in exp:
        raise CliError(f"experiment {exp['id']}: needs a params object")
    return GeneratorParams.from_json(json.dumps(exp["params"]))


def _run_experiment(exp: dict) -> tuple[dict, str, str, bool]:
    """Returns (json_doc, csv_header, csv_rows, ok)."""
    kind = exp["kind"]
    eid = exp["id"]

    def get_instance() -> Polytope:
        if "instance" not in exp:
            raise CliError(f"experiment {eid}: needs an instance")
        p, _ = _load_instance(exp["instance"], f"experiment {eid}")
        return p

    if kind == "discrepancy":
        p = get_instance()
        mode, count = _parse_mode(exp.get("mode", "all_seeds"))
        report = lab.discrepancy(p, _exp_params(exp), mode, count, description=eid)
        ok = True
        return report.to_json_dict(), lab.LabReport.CSV_HEADER, report.to_csv_row(), ok

    if kind == "lo_boundary":
        p = get_instance()
        report = lab.lo_boundary_fraction(p, exp.get("width", 2.0), description=eid)
        ok = report.bound_satisfied is not False if exp.get("assert_bound") else True
        return report.to_json_dict(), lab.LabReport.CSV_HEADER, report.to_csv_row(), ok

    if kind == "lo_lowerbound":
        result = lab.lo_lowerbound_search(
            exp["n"], exp["m"], exp.get("trials", 100), exp.get("rng_seed", 0)
        )
        ok = result.ratio >= exp["min_ratio"] if "min_ratio" in exp else True
        doc = result.to_json_dict()
        doc["min_ratio"] = exp.get("min_ratio")
        doc["ok"] = ok
        header = "n,m,trials,level_k,best_fraction,ratio,best_trial"
        row = ",".join(
            [
                str(exp["n"]),
                str(exp["m"]),
                str(result.trials),
                str(result.level_k),
                format(result.best_fraction, ".17g"),
                format(result.ratio, ".17g"),
                str(result.best_trial),
            ]
        )
        return doc, header, row, ok

    if kind == "cap_edge_census":
        p = get_instance()
        censuses = lab.cap_edge_census(p)
        ok = all(c.change_identity_holds and c.directed_bound_holds for c in censuses)
        doc = {"caps": [c.to_json_dict() for c in censuses], "ok": ok}
        header = (
            "cap_index,bc,ec,ce,cap_points,directed_fraction,directed_bound,"
            "change_identity_holds,directed_bound_holds"
        )
        rows = "\n".join(
            ",".join(
                [
                    str(c.cap_index),
                    str(c.bc),
                    str(c.ec),
                    str(c.ce),
                    str(c.cap_points),
                    format(c.directed_fraction, ".17g"),
                    format(c.directed_bound, ".17g"),
                    str(c.change_identity_holds),
                    str(c.directed_bound_holds),
                ]
            )
            for c in censuses
        )
        return doc, header, rows, ok

    if kind == "average_sensitivity":
        p = get_instance()
        report = lab.average_sensitivity(p, description=eid)
        ok = report.bound_satisfied is not False if exp.get("assert_bound") else True
        return report.to_json_dict(), lab.LabReport.CSV_HEADER, report.to_csv_row(), ok

    if kind == "mollifier_discrepancy":
        p = get_instance()
        spec = MollifierSpec(p.b, exp["lambda"])
        report = lab.mollifier_discrepancy(p, _exp_params(exp), spec, description=eid)
        return report.to_json_dict(), lab.LabReport.CSV_HEADER, report.to_csv_row(), True

    if kind == "soft_to_hard":
        p = get_instance()
        result = lab.soft_to_hard_check(
            p,
            _exp_params(exp),
            exp["lambda"],
            exp.get("delta", 0.1),
            exp.get("c_beta", 1.0),
        )
        ok = result.holds if exp.get("assert_bound", True) else True
        summary = lab.LabReport(
            experiment="soft_to_hard",
            description=eid,
            exact_probability=result.exact_probability,
            generator_probability=result.generator_probability,
            bound_value=result.rhs,
            seed_space_size=result.seed_space_size,
        )
        return result.to_json_dict(), lab.LabReport.CSV_HEADER, summary.to_csv_row(), ok

    if kind == "semi_thin":
        p = get_instance()
        report = lab.semi_thin_check(p, exp.get("width", 2.0), description=eid)
        ok = report.bound_satisfied is not False if exp.get("assert_bound") else True
        return report.to_json_dict(), lab.LabReport.CSV_HEADER, report.to_csv_row(), ok

    if kind == "count":
        if "instance" not in exp:
            raise CliError(f"experiment {eid}: needs an instance")
        doc = exp["instance"]
        p, domain = _load_instance(doc, f"experiment {eid}")
        if domain != "zero_one":
            raise CliError(f"experiment {eid}: count expects a zero_one instance")
        mode, sample_count = _parse_mode(exp.get("mode", "all_seeds"))
        params = _exp_params(exp) if mode != "exact" else None
        result = _count_result(
            p, domain, mode, sample_count, params, exp.get("delta"), lab.CUBE_ENUM_CAP, False
        )
        return result, COUNT_CSV_HEADER, _count_csv_row(result), True

    raise CliError(f"unknown experiment kind {kind!r}")


def cmd_draw(args) -> int:
    params = GeneratorParams.from_json(Path(args.params).read_text())
    from .algebra import SeedStream
    from .generators import mz_generate, our_generate, seed_length

    mode = args.generator
    total, layout = seed_length(params, mode=mode)
    seed = SeedStream.from_hex(args.seed, nbits=total)
    if mode == "mz":
        u = mz_generate(params, seed)
    else:
        u = our_generate(params, seed)
    print(
        _json_dumps(
            {
                "generator": mode,
                "seed_bits": total,
                "segments": [[s.name, s.nbits] for s in layout.segments],
                "output": [int(x) for x in u],
            }
        )
    )
    return 0


def cmd_run_manifest(args) -> int:
    doc = json.loads(Path(args.manifest).read_text())
    _validate(doc, "manifest.schema.json", args.manifest)
    ids = [exp["id"] for exp in doc["experiments"]]
    if len(set(ids)) != len(ids):
        raise CliError("experiment ids must be unique")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    all_ok = True
    for exp in doc["experiments"]:
        t0 = time.perf_counter()
        json_doc, header, rows, ok = _run_experiment(exp)
        elapsed = time.perf_counter() - t0
        json_doc = {"id": exp["id"], "kind": exp["kind"], **json_doc}
        (outdir / f"{exp['id']}.json").write_text(_json_dumps(json_doc) + "\n")
        (outdir / f"{exp['id']}.csv").write_text(header + "\n" + rows + "\n")
        status = "ok" if ok else "BOUND FAILED"
        print(f"{exp['id']}: {exp['kind']} [{status}] ({elapsed:.2f}s)")
        all_ok = all_ok and ok
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyprg",
        description="Deterministic approximate counting and enumeration experiments "
        "for intersections of halfspaces over the Boolean cube.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("count", help="approximately count 0/1-IP solutions")
    pc.add_argument("--instance", required=True, help="instance JSON path")
    pc.add_argument("--delta", type=float, default=0.1, help="accuracy target (default 0.1)")
    pc.add_argument("--eps", type=float, default=0.5, help="epsilon constant (default 0.5)")
    pc.add_argument(
        "--mode",
        default="all-seeds",
        help="all-seeds (default), strided:N, or exact",
    )
    pc.add_argument("--params", help="lab-mode generator params JSON path")
    pc.add_argument(
        "--standardize",
        action="store_true",
        help="apply the standardization transform before counting",
    )
    pc.add_argument("--out", help="directory for result files")
    pc.add_argument(
        "--enum-cap",
        type=int,
        default=lab.CUBE_ENUM_CAP,
        help=f"exact-enumeration cap on n (default {lab.CUBE_ENUM_CAP})",
    )
    pc.set_defaults(func=cmd_count)

    pd = sub.add_parser("draw", help="evaluate the generator on a hex seed")
    pd.add_argument("--params", required=True, help="generator params JSON path")
    pd.add_argument(
        "--seed",
        required=True,
        help="seed as a hex string; the first hex digit's MSB is consumed first",
    )
    pd.add_argument(
        "--generator",
        choices=("full", "mz"),
        default="full",
        help="full extended generator (default) or the base bucketed one",
    )
    pd.set_defaults(func=cmd_draw)

    pm = sub.add_parser("run-manifest", help="run a manifest of experiments")
    pm.add_argument("manifest", help="manifest JSON path")
    pm.add_argument("--out", required=True, help="output directory")
    pm.set_defaults(func=cmd_run_manifest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (lab.EnumerationCapError, lab.SeedBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
