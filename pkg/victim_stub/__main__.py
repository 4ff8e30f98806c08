import argparse
import sys

from .model import DEFAULT_WEIGHTS_PATH, HeuristicModel
from .server import serve_http, serve_stdio


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="victim_stub",
        description="Deterministic heuristic victim over stdio or HTTP.")
    parser.add_argument("--weights", default=str(DEFAULT_WEIGHTS_PATH),
                        help="path to the weight sidecar JSON")
    sub = parser.add_subparsers(dest="mode", required=True)
    sub.add_parser("stdio", help="serve JSON lines on stdin/stdout")
    http_cmd = sub.add_parser("http", help="serve POST /predict")
    http_cmd.add_argument("--host", default="127.0.0.1")
    http_cmd.add_argument("--port", type=int, default=8793)
    args = parser.parse_args(argv)

    model = HeuristicModel.from_file(args.weights)
    if args.mode == "stdio":
        serve_stdio(model)
        return 0
    server = serve_http(model, args.host, args.port)
    print(f"listening on http://{args.host}:{server.server_address[1]}",
          file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
