"""Command-line entry points.

    prrx simulate --pulses 512 --out run1 [--config cfg.json] [--scene s.json]
    prrx serve [--config cfg.json] [--scene s.json] [--addr host:port]
    prrx replay run1/recording.prrx [--out replay1]
    prrx bench [--iterations N]

Environment: PRRX_SEED overrides the scene noise seed, PRRX_ADDR the
serve address (host:port).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .batch import replay_recording, run_batch
from .bench import BudgetExceeded, bench_xcorr, format_report
from .config import ConfigError, SystemConfig, load_config
from .scene import ChannelSpec, Scene, SceneError, TargetSpec, load_scene


def default_scene() -> Scene:
    # bench-scale demo: one static reflector at 30 m, noise-free
    return Scene(targets=[TargetSpec(range0_m=30.0)], channel=ChannelSpec())


def _resolve_scene(args, config: SystemConfig, env) -> Scene:
    path = getattr(args, "scene", None) or config.scene_path
    scene = load_scene(path) if path else default_scene()
    seed = env.get("PRRX_SEED")
    if seed is not None:
        ch = scene.channel
        scene = Scene(scene.targets, ChannelSpec(ch.snr_db, int(seed), ch.rx1_noise_db))
    return scene


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prrx", description="pulse-radar displacement monitor")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="offline batch run writing recording + CSV artifacts")
    sim.add_argument("--config", help="system config JSON")
    sim.add_argument("--scene", help="scene JSON (default: config scene_path or demo target)")
    sim.add_argument("--pulses", type=int, required=True, help="number of PRIs to simulate")
    sim.add_argument("--out", required=True, help="output directory")

    srv = sub.add_parser("serve", help="live WebSocket service for the console")
    srv.add_argument("--config", help="system config JSON")
    srv.add_argument("--scene", help="scene JSON (default: config scene_path or demo target)")
    srv.add_argument("--addr", help="host:port (overrides config and PRRX_ADDR)")

    rep = sub.add_parser("replay", help="re-run analysis over a recorded capture")
    rep.add_argument("recording", help="recording.prrx path")
    rep.add_argument("--out", default="replay_out", help="output directory")

    ben = sub.add_parser("bench", help="time the integer compressor against the PRI budget")
    ben.add_argument("--iterations", type=int, default=100)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    env = os.environ
    try:
        if args.command == "simulate":
            config = load_config(args.config, env)
            scene = _resolve_scene(args, config, env)
            summary = run_batch(config, scene, args.pulses, args.out)
            print(json.dumps(summary, indent=2))
        elif args.command == "serve":
            config = load_config(args.config, env)
            if args.addr:
                host, _, port = args.addr.rpartition(":")
                if not host or not port.isdigit():
                    raise ConfigError(f"--addr must be host:port, got {args.addr!r}")
                config = dataclasses.replace(config, host=host, port=int(port))
            scene = _resolve_scene(args, config, env)
            print(f"serving ws://{config.host}:{config.port}/ws at {config.prf_hz:g} Hz PRF")
            from .server import run_serve

            run_serve(config, scene)
        elif args.command == "replay":
            summary = replay_recording(args.recording, args.out)
            print(json.dumps(summary, indent=2))
        elif args.command == "bench":
            report = bench_xcorr(iterations=args.iterations)
            print(format_report(report))
    except (ConfigError, SceneError, BudgetExceeded, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
