#!/usr/bin/env python3
"""
Script to start the interference detection xApp (stream listener + control API).
"""

import argparse
import logging
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import load_settings
from src.errors import BindError, JamsenseError
from src.xapp.server import serve


def main():
    """Start the detection service."""
    parser = argparse.ArgumentParser(description="Run the detection xApp")
    parser.add_argument("--stream", default=None, help="Stream listen address host:port")
    parser.add_argument("--control", default=None, help="Control listen address host:port")
    parser.add_argument("--registry", type=Path, default=None, help="Model registry directory")
    parser.add_argument("--store", type=Path, default=None, help="Store directory for the prediction log")
    args = parser.parse_args()

    settings = load_settings()
    service = settings.service.model_copy()
    if args.stream:
        host, port = args.stream.rsplit(":", 1)
        service = service.model_copy(update={"stream_host": host, "stream_port": int(port)})
    if args.control:
        host, port = args.control.rsplit(":", 1)
        service = service.model_copy(update={"control_host": host, "control_port": int(port)})
    if args.registry:
        service = service.model_copy(update={"registry_dir": args.registry})
    updates = {"service": service}
    if args.store:
        updates["store"] = settings.store.model_copy(update={"root": args.store})
    settings = settings.model_copy(update=updates)

    logging.basicConfig(level=settings.log_level.upper())

    print("Starting jamsense detection xApp...")
    print("=" * 60)
    print(f"Stream (newline-delimited KPI samples): {service.stream_host}:{service.stream_port}")
    print(f"Control API: {service.control_url}")
    print("\nEndpoints:")
    print("  - GET  /health           - Health check")
    print("  - GET  /a1/status        - Stream counters and active model")
    print("  - POST /a1/model-update  - Swap to a registered model version")
    print("=" * 60)
    print("\nPress Ctrl+C to stop the server\n")

    if not service.registry_dir.exists():
        print("⚠ Warning: model registry not found!")
        print("  The xApp will buffer samples until the training manager publishes a model.\n")

    try:
        serve(settings)
    except BindError as e:
        print(f"Error: {e}")
        sys.exit(1)
    except JamsenseError as e:
        print(f"Error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
