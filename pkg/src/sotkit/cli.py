"""Command-line front end: a thin client of the solver service.

By default the CLI instantiates the FastAPI app in-process and talks to
it over an ASGI transport, so no server or network is needed and results
are byte-identical across runs; pass --server URL to target a running
instance instead. Exit codes: 0 success, 2 certified infeasible, 3 input
error. SOT_MODE overrides --mode.

Examples:
    sot solve instance.json
    sot wasserstein instance.json --p 2
    sot markov --variances 64,16,4,2,1
    sot selftest
"""

import argparse
import json
import os
import sys

from .errors import InputError
from .io import dumps
from .rational import parse_rational

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _client(server):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=300.0)
    # in-process ASGI client: same service code paths, no network required
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app, raise_server_exceptions=False)


def _post(args, path, body):
    with _client(args.server) as client:
        response = client.post(path, json=body)
    return response


def _emit(args, payload) -> int:
    text = dumps(payload)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if payload.get("status") == "infeasible" or payload.get("feasible") is False:
        return EXIT_INFEASIBLE
    return EXIT_OK


def _fail(response) -> int:
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    print(f"error: {detail}", file=sys.stderr)
    if response.status_code in (400, 422):
        return EXIT_INPUT
    return EXIT_FAILURE


def _instance_command(args, path, extra=None) -> int:
    body = {"instance": _load_json(args.instance), "mode": args.mode}
    if extra:
        body.update(extra)
    response = _post(args, path, body)
    if response.status_code != 200:
        return _fail(response)
    return _emit(args, response.json())


def cmd_solve(args):
    return _instance_command(args, "/solve")


def cmd_feasible(args):
    return _instance_command(args, "/feasible")


def cmd_dual(args):
    return _instance_command(args, "/dual")


def cmd_equilibrium(args):
    production = _load_json(args.production)
    return _instance_command(args, "/equilibrium", {"production": production})


def cmd_decompose(args):
    return _instance_command(args, "/decompose")


def cmd_wasserstein(args):
    return _instance_command(args, "/wasserstein", {"p": args.p})


def cmd_parity(args):
    return _instance_command(args, "/parity")


def cmd_bounds(args):
    extra = {"grid": args.grid} if args.grid else None
    return _instance_command(args, "/bounds", extra)


def cmd_monge(args):
    extra = {"nodes": args.nodes} if args.nodes else None
    return _instance_command(args, "/monge", extra)


def cmd_refugee(args):
    body = _load_json(args.instance)
    body["mode"] = args.mode
    if args.nodes:
        body["nodes"] = args.nodes
    response = _post(args, "/refugee", body)
    if response.status_code != 200:
        return _fail(response)
    return _emit(args, response.json())


def cmd_markov(args):
    try:
        variances = [str(parse_rational(v)) for v in args.variances.split(",")]
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    body = {"variances": variances, "mode": args.mode}
    response = _post(args, "/markov", body)
    if response.status_code != 200:
        return _fail(response)
    return _emit(args, response.json())


def cmd_selftest(args):
    with _client(args.server) as client:
        response = client.get("/selftest")
    if response.status_code != 200:
        return _fail(response)
    payload = response.json()
    width = max(len(r["name"]) for r in payload["results"])
    for r in payload["results"]:
        mark = "PASS" if r["passed"] else "FAIL"
        print(f"{mark}  {r['name']:<{width}}  {r['detail']}")
    return EXIT_OK if payload["passed"] else EXIT_FAILURE


def cmd_dev_vertex_enum(args):
    return _instance_command(args, "/dev/vertex-enumerate")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sot",
        description="Exact simultaneous optimal transport: solve, certify, decompose.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service (default: run in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, with_instance=True, **extra_args):
        p = sub.add_parser(name)
        if with_instance:
            p.add_argument("instance", help="instance JSON file")
        p.add_argument(
            "--mode",
            choices=["exact", "float"],
            default=os.environ.get("SOT_MODE", "exact"),
            help="exact rationals or float rendering (env SOT_MODE overrides)",
        )
        p.add_argument("--out", default=None, help="write result JSON to a file")
        p.set_defaults(handler=handler)
        return p

    add("solve", cmd_solve)
    add("feasible", cmd_feasible)
    add("dual", cmd_dual)
    p = add("equilibrium", cmd_equilibrium)
    p.add_argument("--production", required=True, help="production matrix JSON file")
    add("decompose", cmd_decompose)
    p = add("wasserstein", cmd_wasserstein)
    p.add_argument("--p", default="2", help="order of the distance (integer >= 1)")
    add("parity", cmd_parity)
    p = add("bounds", cmd_bounds)
    p.add_argument("--grid", type=int, default=None, help="simplex grid denominator")
    p = add("monge", cmd_monge)
    p.add_argument("--nodes", type=int, default=None, help="search node budget")
    p = add("refugee", cmd_refugee)
    p.add_argument("--nodes", type=int, default=None, help="search node budget")
    p = add("markov", cmd_markov, with_instance=False)
    p.add_argument(
        "--variances", required=True, help="comma-separated positive rationals"
    )
    p = sub.add_parser("selftest")
    p.set_defaults(handler=cmd_selftest)
    dev = sub.add_parser("dev")
    dev_sub = dev.add_subparsers(dest="dev_command", required=True)
    p = dev_sub.add_parser("vertex-enumerate")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_dev_vertex_enum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if os.environ.get("SOT_MODE") and hasattr(args, "mode"):
        args.mode = os.environ["SOT_MODE"]
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
