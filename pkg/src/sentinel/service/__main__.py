"""Run the service: python -m sentinel.service [--host H] [--port P]."""

import argparse

import uvicorn

from .app import create_app


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="sentinel-service", description="Serve the analysis API over HTTP."
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    uvicorn.run(create_app(), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
