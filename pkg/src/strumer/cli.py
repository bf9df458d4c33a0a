"""Command-line client for the estimation service.

Every subcommand builds a request and sends it to the HTTP service; by
default the requests run against an in-process instance of the app (no server
needed), while ``--server URL`` targets a running one. Exit codes: 0 on
success, 1 on validation errors, 2 on numerical failures.
"""

import argparse
import csv
import io
import json
import sys

import httpx

__all__ = ["main"]


def _client(server):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app())


def _fail(message, code):
    print(f"error: {message}", file=sys.stderr)
    return code


def _request(client, method, path, payload=None):
    """Send one request; returns (json, exit_code) with exit_code 0 on success."""
    try:
        resp = client.post(path, json=payload) if method == "post" else client.get(path)
    except httpx.HTTPError as exc:
        return None, _fail(f"request failed: {exc}", 2)
    if resp.status_code < 400:
        return resp.json(), 0
    try:
        body = resp.json()
        detail = body.get("detail", resp.text)
        kind = body.get("kind", "validation" if resp.status_code in (400, 422) else "numerical")
    except Exception:
        detail, kind = resp.text, "numerical"
    return None, _fail(detail, 1 if kind == "validation" else 2)


def _write_out(text, out):
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _csv_text(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _solve_options(args):
    opts = {
        "method": args.method,
        "reduce": args.reduce,
        "seed": args.seed,
        "eps_abs": args.eps_abs,
        "eps_rel": args.eps_rel,
        "max_iters": args.max_iters,
    }
    if args.order is not None:
        opts["order"] = args.order
    if args.g is not None:
        opts["g"] = args.g
    if args.p is not None:
        opts["p"] = args.p
    return opts


def _add_solver_flags(sub):
    sub.add_argument("--method", default="strumer",
                     choices=["strumer", "strumer-dr", "toeplitz-baseline"])
    sub.add_argument("--order", type=int, default=None, help="model order K")
    sub.add_argument("--g", default=None, help="objective tag override")
    sub.add_argument("--p", type=float, default=None, help="objective exponent override")
    sub.add_argument("--reduce", default="off", choices=["off", "auto", "on"])
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--eps-abs", type=float, default=1e-4)
    sub.add_argument("--eps-rel", type=float, default=1e-5)
    sub.add_argument("--max-iters", type=int, default=3000)


def build_parser():
    parser = argparse.ArgumentParser(prog="strumer", description=__doc__)
    parser.add_argument("--server", default=None, help="service URL (default: in-process)")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("generate", help="draw a scenario and write its JSON document")
    gen.add_argument("--freqs", type=_float_list, default=None,
                     help="comma-separated frequencies in cycles/sample")
    gen.add_argument("--doa", type=_float_list, default=None,
                     help="comma-separated angles in degrees (half-wavelength array)")
    gen.add_argument("--n", type=int, default=45, help="samples per channel")
    gen.add_argument("--channels", type=int, default=3)
    gen.add_argument("--snr", type=float, default=10.0, help="SNR in dB")
    gen.add_argument("--noise", default="gaussian", choices=["gaussian", "gmm", "row_gmm"])
    gen.add_argument("--c2", type=float, default=0.1, help="outlier probability")
    gen.add_argument("--outlier-ratio", type=float, default=100.0,
                     help="outlier-to-nominal variance ratio")
    gen.add_argument("--mask", default="complete", choices=["complete", "element", "row"])
    gen.add_argument("--fraction", type=float, default=None, help="element-mask fraction")
    gen.add_argument("--rows-kept", type=int, default=None, help="row-mask kept rows")
    gen.add_argument("--g", default="fro2")
    gen.add_argument("--p", type=float, default=2.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)

    sol = subs.add_parser("solve", help="estimate frequencies/amplitudes from a scenario")
    sol.add_argument("scenario", help="scenario JSON path")
    _add_solver_flags(sol)
    sol.add_argument("--out", default=None)

    exp = subs.add_parser("experiment", help="run a Monte Carlo experiment")
    exp.add_argument("--preset", default=None, help="built-in experiment name (exp1..exp9)")
    exp.add_argument("--spec", default=None, help="custom experiment spec JSON path")
    exp.add_argument("--list", action="store_true", help="list available presets")
    exp.add_argument("--trials", type=int, default=None)
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--threads", type=int, default=1)
    exp.add_argument("--format", default="csv", choices=["csv", "json"])
    exp.add_argument("--out", default=None)

    crb = subs.add_parser("crb", help="print per-frequency root-CRB for a scenario")
    crb.add_argument("scenario")
    crb.add_argument("--sigma2", type=float, default=None)
    crb.add_argument("--degrees", action="store_true", help="report in degrees")
    crb.add_argument("--out", default=None)

    mos = subs.add_parser("mos", help="model-order selection score table")
    mos.add_argument("scenario")
    mos.add_argument("--k-max", type=int, default=5)
    mos.add_argument("--criterion", default="bic", choices=["aic", "bic"])
    mos.add_argument("--seed", type=int, default=0)
    mos.add_argument("--out", default=None)

    trc = subs.add_parser("trace", help="per-iteration residual trace as CSV")
    trc.add_argument("scenario")
    _add_solver_flags(trc)
    trc.add_argument("--out", default=None)

    srv = subs.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_generate(client, args):
    if (args.freqs is None) == (args.doa is None):
        return _fail("give exactly one of --freqs or --doa", 1)
    payload = {
        "frequencies": args.freqs,
        "doa_degrees": args.doa,
        "n_samples": args.n,
        "n_channels": args.channels,
        "snr_db": args.snr,
        "noise_kind": args.noise,
        "c2": args.c2,
        "outlier_ratio": args.outlier_ratio,
        "mask": {"kind": args.mask, "fraction": args.fraction, "rows_kept": args.rows_kept},
        "g": args.g,
        "p": args.p,
        "seed": args.seed,
    }
    doc, code = _request(client, "post", "/scenario/generate", payload)
    if code:
        return code
    _write_out(json.dumps(doc), args.out)
    return 0


def _cmd_solve(client, args):
    scenario = _load_json(args.scenario)
    doc, code = _request(
        client, "post", "/solve", {"scenario": scenario, "options": _solve_options(args)}
    )
    if code:
        return code
    _write_out(json.dumps(doc, indent=2), args.out)
    return 0


def _cmd_experiment(client, args):
    if args.list:
        doc, code = _request(client, "get", "/presets")
        if code:
            return code
        for info in doc["presets"]:
            print(f"{info['name']:8s} trials={info['trials']:<4d} {info['description']}")
        return 0
    if (args.preset is None) == (args.spec is None):
        return _fail("give exactly one of --preset or --spec", 1)
    payload = {
        "preset": args.preset,
        "spec": _load_json(args.spec) if args.spec else None,
        "trials": args.trials,
        "seed": args.seed,
        "threads": args.threads,
    }
    doc, code = _request(client, "post", "/experiment", payload)
    if code:
        return code
    if args.format == "json":
        _write_out(json.dumps(doc, indent=2), args.out)
    else:
        _write_out(_csv_text(doc["columns"], doc["rows"]), args.out)
    return 0


def _cmd_crb(client, args):
    scenario = _load_json(args.scenario)
    payload = {"scenario": scenario, "sigma2": args.sigma2, "in_degrees": args.degrees}
    doc, code = _request(client, "post", "/crb", payload)
    if code:
        return code
    freqs = scenario.get("truth", {}).get("frequencies", [])
    rows = [[f"{f:.6g}", f"{r:.8e}"] for f, r in zip(freqs, doc["root_crb"])]
    rows.append(["root-mean", f"{doc['root_mean_crb']:.8e}"])
    _write_out(_csv_text(["frequency", f"root_crb_{doc['units']}"], rows), args.out)
    return 0


def _cmd_mos(client, args):
    scenario = _load_json(args.scenario)
    payload = {
        "scenario": scenario,
        "k_max": args.k_max,
        "criterion": args.criterion,
        "options": {"seed": args.seed},
    }
    doc, code = _request(client, "post", "/model-order", payload)
    if code:
        return code
    rows = [
        [s["k"], f"{s['score']:.6e}", f"{s['neg2_loglik']:.6e}", f"{s['penalty']:.6e}",
         f"{s['sigma2_hat']:.6e}", int(s["k"] == doc["k_star"])]
        for s in doc["scores"]
    ]
    _write_out(
        _csv_text(["k", "score", "neg2_loglik", "penalty", "sigma2_hat", "selected"], rows),
        args.out,
    )
    return 0


def _cmd_trace(client, args):
    scenario = _load_json(args.scenario)
    doc, code = _request(
        client, "post", "/trace", {"scenario": scenario, "options": _solve_options(args)}
    )
    if code:
        return code
    _write_out(_csv_text(doc["columns"], doc["rows"]), args.out)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("strumer.service.app:app", host=args.host, port=args.port)
        return 0
    handlers = {
        "generate": _cmd_generate,
        "solve": _cmd_solve,
        "experiment": _cmd_experiment,
        "crb": _cmd_crb,
        "mos": _cmd_mos,
        "trace": _cmd_trace,
    }
    try:
        client = _client(args.server)
    except Exception as exc:
        return _fail(f"could not reach the service: {exc}", 2)
    try:
        return handlers[args.command](client, args)
    except FileNotFoundError as exc:
        return _fail(str(exc), 1)
    except json.JSONDecodeError as exc:
        return _fail(f"malformed JSON input: {exc}", 1)
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
