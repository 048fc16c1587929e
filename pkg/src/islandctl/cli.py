"""Command-line interface.

Commands: ``partition`` (solve and write a scheme), ``validate`` (re-check a
scheme file), ``distances`` (electrical distance matrix), ``monitor``
(file-driven acquisition loop with an external solve trigger), ``report``
(pretty-print a scheme file).

Exit codes: 0 success, 1 input/usage error, 2 constraint-infeasible,
3 numerical failure. ``ISLANDCTL_LOG`` sets log verbosity.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import gridio
from .errors import IslandctlError, InputError, UsageError
from .impedance import build_ybus, build_zbus, distance_matrix, electrical_distance
from .islanding import (
    SolveConfig,
    _island_components,
    _needs_zbus,
    check_limits,
    solve_islanding,
    validate_coherence,
    validate_vsc,
)
from .model import Network, Snapshot
from .weights import ConstraintSet, Edge, WeightedGraph, build_weighted_graph

log = logging.getLogger("islandctl")


@dataclass
class CliConfig:
    """Resolved invocation: one command plus its paths and knobs."""

    command: str
    network: Path | None = None
    snapshot: Path | None = None
    constraints: Path | None = None
    scheme: Path | None = None
    out: Path | None = None
    watch_dir: Path | None = None
    k: int | None = None
    seed: int = 0
    big_m_factor: float = 1e4
    restarts: int = 20
    interval: float = 300.0
    max_polls: int = 0
    row_normalize: bool = True
    timings: bool = True
    pairs: tuple[str, ...] = field(default_factory=tuple)


def _read(path: Path, what: str) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc}") from exc


def _load_network(cfg: CliConfig) -> Network:
    if cfg.network is None:
        raise UsageError("a --network file is required")
    return gridio.parse_network(_read(cfg.network, "network"))


def _load_constraints(cfg: CliConfig, network: Network) -> ConstraintSet:
    if cfg.constraints is None:
        return ConstraintSet(big_m_factor=cfg.big_m_factor)
    cs = gridio.parse_constraints(_read(cfg.constraints, "constraints"), network)
    return ConstraintSet(
        coherent_groups=cs.coherent_groups,
        vsc_pairs=cs.vsc_pairs,
        big_m_factor=cfg.big_m_factor,
    )


def _print_scheme(scheme, elapsed_s: float) -> None:
    click.echo(f"islands (k={scheme.k}):")
    for i, island in enumerate(scheme.islands):
        click.echo(f"  island {i}: {', '.join(str(b) for b in sorted(island))}")
    click.echo("cut lines:")
    if not scheme.cut_lines:
        click.echo("  (none)")
    for cl in scheme.cut_lines:
        tag = "  [dc]" if cl.dc else ""
        click.echo(
            f"  L_{cl.from_bus}-{cl.to_bus} circuit {cl.circuit}  w={cl.weight:.4f}{tag}"
        )
    click.echo(f"cut weight sum: {scheme.cut_weight_sum:.4f}")
    click.echo(f"composite disruption: {scheme.composite_disruption:.4f}")
    click.echo("per-island balance:")
    for i, s in enumerate(scheme.per_island):
        gen_note = "" if s.has_generator else "  [no generator]"
        click.echo(
            f"  island {i}: generation {s.generation_p:.4f}  load {s.load_p:.4f}  "
            f"imbalance {s.imbalance_p:+.4f}{gen_note}"
        )
    click.echo(f"solve time: {elapsed_s:.4f} s")


def cmd_partition(cfg: CliConfig) -> int:
    if cfg.k is None:
        raise UsageError("partition requires -k")
    if cfg.k < 2:
        raise UsageError(f"k must be >= 2, got {cfg.k}")
    if cfg.snapshot is None:
        raise UsageError("partition requires a --snapshot file")
    network = _load_network(cfg)
    snapshot = gridio.parse_snapshot(_read(cfg.snapshot, "snapshot"), network)
    constraints = _load_constraints(cfg, network)
    config = SolveConfig(seed=cfg.seed, restarts=cfg.restarts, row_normalize=cfg.row_normalize)

    start = time.perf_counter()
    scheme, report = solve_islanding(network, snapshot, constraints, cfg.k, config)
    elapsed = time.perf_counter() - start

    _print_scheme(scheme, elapsed)
    if cfg.out is not None:
        timings = round(elapsed * 1000.0, 3) if cfg.timings else None
        cfg.out.write_text(gridio.serialize_scheme(scheme, report, timings_ms=timings))
        click.echo(f"scheme written to {cfg.out}")
    return 0


def cmd_validate(cfg: CliConfig) -> int:
    if cfg.scheme is None:
        raise UsageError("validate requires a --scheme file")
    network = _load_network(cfg)
    doc = gridio.parse_scheme(_read(cfg.scheme, "scheme"))
    constraints = _load_constraints(cfg, network)

    all_buses = {b.id for b in network.buses}
    covered = set().union(*doc.islands) if doc.islands else set()
    if covered != all_buses:
        missing = sorted(all_buses - covered)
        extra = sorted(covered - all_buses)
        raise InputError(
            f"scheme does not partition the network buses (missing {missing}, unknown {extra})"
        )

    snapshot = None
    if cfg.snapshot is not None:
        snapshot = gridio.parse_snapshot(_read(cfg.snapshot, "snapshot"), network)
        zbus = (
            build_zbus(build_ybus(network), network.bus_index)
            if _needs_zbus(network, snapshot)
            else None
        )
        graph = build_weighted_graph(network, snapshot, zbus)
    else:
        # weights are irrelevant for membership/connectivity checks
        edges = {
            pair: Edge(weight=1.0, branches=branches)
            for pair, branches in network.branches_by_pair().items()
        }
        graph = WeightedGraph(
            index=network.bus_index,
            edges=edges,
            pristine={p: 1.0 for p in edges},
            generator_buses=network.generator_buses,
            vsc_pairs=network.vsc_pairs,
        )

    coh = validate_coherence(doc.islands, constraints, graph)
    vsc = validate_vsc(doc.islands, constraints)
    disconnected = tuple(
        i for i, island in enumerate(doc.islands)
        if len(_island_components(graph, island)) > 1
    )
    limits = check_limits(network, snapshot) if snapshot is not None else None

    ok = not coh and not vsc and not disconnected and (limits is None or not limits.violations)
    click.echo(f"coherence: {'ok' if not coh else 'violations ' + str([list(p) for p in coh])}")
    click.echo(f"vsc separation: {'ok' if not vsc else 'violations ' + str([list(p) for p in vsc])}")
    click.echo(
        f"island connectivity: {'ok' if not disconnected else 'disconnected islands ' + str(list(disconnected))}"
    )
    if limits is None:
        click.echo("limits: unchecked (no snapshot given)")
    else:
        click.echo(f"limits: {len(limits.violations)} violation(s), {len(limits.unchecked)} unchecked")
        for v in limits.violations:
            click.echo(f"  {v.describe()}")
    return 0 if ok else 2


def cmd_distances(cfg: CliConfig) -> int:
    pairs: list[tuple[int, int]] = []
    for raw in cfg.pairs:
        try:
            a, b = (int(part) for part in raw.split(","))
        except ValueError:
            raise UsageError(f"--pair expects 'i,j' with integer bus ids, got {raw!r}") from None
        pairs.append((a, b))
    network = _load_network(cfg)
    zbus = build_zbus(build_ybus(network), network.bus_index)
    lines: list[str] = []
    if pairs:
        for i, j in pairs:
            d = electrical_distance(zbus, i, j)
            lines.append(f"{i} {j} {d:.4e}")
    else:
        dm = distance_matrix(zbus)
        ids = zbus.index.ids
        lines.append("bus " + " ".join(str(b) for b in ids))
        for r, bus in enumerate(ids):
            lines.append(str(bus) + " " + " ".join(f"{dm[r, c]:.4e}" for c in range(len(ids))))
    text = "\n".join(lines) + "\n"
    if cfg.out is not None:
        cfg.out.write_text(text)
        click.echo(f"distances written to {cfg.out}")
    else:
        click.echo(text, nl=False)
    return 0


def cmd_monitor(cfg: CliConfig) -> int:
    """Poll a directory for ``*.snapshot.json`` (refresh the operating point) and
    ``*.trigger.json`` (constraints payload; fires a solve on the latest snapshot)."""
    if cfg.watch_dir is None or not cfg.watch_dir.is_dir():
        raise UsageError(f"--watch-dir must be an existing directory, got {cfg.watch_dir}")
    network = _load_network(cfg)
    out = cfg.out if cfg.out is not None else cfg.watch_dir

    seen_snapshots: set[str] = set()
    processed_triggers: set[str] = set()
    current: Snapshot | None = None
    polls = 0
    log.info("monitoring %s every %.1f s", cfg.watch_dir, cfg.interval)
    while True:
        snaps = sorted(cfg.watch_dir.glob("*.snapshot.json"))
        fresh = [p for p in snaps if p.name not in seen_snapshots]
        if fresh:
            fresh.sort(key=lambda p: (p.stat().st_mtime, p.name))
            for p in fresh:
                seen_snapshots.add(p.name)
            newest = fresh[-1]
            try:
                candidate = gridio.parse_snapshot(newest.read_text(), network)
                graph = build_weighted_graph(
                    network,
                    candidate,
                    build_zbus(build_ybus(network), network.bus_index)
                    if any(
                        pair not in candidate.weight_overrides
                        for pair in network.branches_by_pair()
                    )
                    else None,
                )
                current = candidate
                log.info("snapshot %s accepted (%d weighted edges)", newest.name, len(graph.edges))
            except IslandctlError as exc:
                log.warning("skipping malformed snapshot %s: %s", newest.name, exc)

        for trig in sorted(cfg.watch_dir.glob("*.trigger.json")):
            if trig.name in processed_triggers:
                continue
            processed_triggers.add(trig.name)
            if current is None:
                log.error("trigger %s ignored: no snapshot received yet", trig.name)
                continue
            try:
                text = trig.read_text()
                constraints = gridio.parse_constraints(text, network)
                constraints = ConstraintSet(
                    coherent_groups=constraints.coherent_groups,
                    vsc_pairs=constraints.vsc_pairs,
                    big_m_factor=cfg.big_m_factor,
                )
                raw = json.loads(text)
                k = raw.get("k") or cfg.k or constraints.group_count
                config = SolveConfig(seed=cfg.seed, restarts=cfg.restarts,
                                     row_normalize=cfg.row_normalize)
                start = time.perf_counter()
                scheme, report = solve_islanding(network, current, constraints, k, config)
                elapsed = time.perf_counter() - start
                target = out / f"{trig.name.removesuffix('.trigger.json')}.scheme.json" \
                    if out.is_dir() else out
                timings = round(elapsed * 1000.0, 3) if cfg.timings else None
                target.write_text(gridio.serialize_scheme(scheme, report, timings_ms=timings))
                log.info("trigger %s solved in %.4f s -> %s", trig.name, elapsed, target)
                click.echo(f"scheme written to {target}")
            except IslandctlError as exc:
                log.error("trigger %s failed: %s", trig.name, exc)

        polls += 1
        if cfg.max_polls and polls >= cfg.max_polls:
            return 0
        time.sleep(cfg.interval)


def cmd_report(cfg: CliConfig) -> int:
    if cfg.scheme is None:
        raise UsageError("report requires a --scheme file")
    doc = gridio.parse_scheme(_read(cfg.scheme, "scheme"))
    click.echo(f"scheme: {cfg.scheme} (k={doc.k})")
    for i, island in enumerate(doc.islands):
        click.echo(f"  island {i} ({len(island)} buses): {', '.join(map(str, sorted(island)))}")
    if doc.cut_lines:
        click.echo("cut lines:")
        for cl in doc.cut_lines:
            tag = "  [dc]" if cl.get("dc") else ""
            click.echo(f"  L_{cl.get('from')}-{cl.get('to')} circuit {cl.get('circuit', 1)}"
                       f"  w={cl.get('w', 0.0):.4f}{tag}")
    if doc.cut_weight_sum is not None:
        click.echo(f"cut weight sum: {doc.cut_weight_sum:.4f}")
    validation = doc.raw.get("validation")
    if validation:
        flags = ", ".join(
            f"{name}={'ok' if validation.get(name, True) else 'VIOLATED'}"
            for name in ("coherence_ok", "vsc_ok", "connectivity_ok")
        )
        click.echo(f"validation: {flags}")
    return 0


_PATH = click.Path(path_type=Path)


def _common(fn):
    fn = click.option("--seed", type=int, default=0, show_default=True)(fn)
    fn = click.option("--big-m-factor", type=float, default=1e4, show_default=True)(fn)
    fn = click.option("--restarts", type=int, default=20, show_default=True)(fn)
    fn = click.option("--row-normalize/--no-row-normalize", default=True, show_default=True)(fn)
    return fn


@click.group()
def cli():
    """Controlled islanding of AC/DC grids via constrained spectral partitioning."""


@cli.command("partition")
@click.option("--network", type=_PATH, required=True)
@click.option("--snapshot", type=_PATH, required=True)
@click.option("--constraints", type=_PATH)
@click.option("-k", "k", type=int, required=True)
@click.option("--out", type=_PATH)
@click.option("--timings/--no-timings", default=True, show_default=True,
              help="Record wall-clock timing in the scheme file.")
@_common
def _partition(network, snapshot, constraints, k, out, timings, seed, big_m_factor,
               restarts, row_normalize):
    """Solve the islanding problem and optionally write a scheme file."""
    sys.exit(run(CliConfig(
        command="partition", network=network, snapshot=snapshot, constraints=constraints,
        k=k, out=out, timings=timings, seed=seed, big_m_factor=big_m_factor,
        restarts=restarts, row_normalize=row_normalize,
    )))


@cli.command("validate")
@click.option("--network", type=_PATH, required=True)
@click.option("--scheme", type=_PATH, required=True)
@click.option("--constraints", type=_PATH)
@click.option("--snapshot", type=_PATH)
@click.option("--big-m-factor", type=float, default=1e4, show_default=True)
def _validate(network, scheme, constraints, snapshot, big_m_factor):
    """Validate a scheme file against a network and constraints."""
    sys.exit(run(CliConfig(
        command="validate", network=network, scheme=scheme, constraints=constraints,
        snapshot=snapshot, big_m_factor=big_m_factor,
    )))


@cli.command("distances")
@click.option("--network", type=_PATH, required=True)
@click.option("--out", type=_PATH)
@click.option("--pair", "pairs", multiple=True,
              help="Bus pair 'i,j'; repeatable. Without pairs, the full matrix is written.")
def _distances(network, out, pairs):
    """Write electrical distances (full matrix or requested pairs)."""
    sys.exit(run(CliConfig(command="distances", network=network, out=out, pairs=tuple(pairs))))


@cli.command("monitor")
@click.option("--network", type=_PATH, required=True)
@click.option("--watch-dir", type=_PATH, required=True)
@click.option("--out", type=_PATH, help="Scheme output file or directory (default: watch dir).")
@click.option("--interval", type=float, default=300.0, show_default=True,
              help="Poll interval in seconds.")
@click.option("--max-polls", type=int, default=0, show_default=True,
              help="Stop after this many polls (0 = run until interrupted).")
@click.option("-k", "k", type=int)
@click.option("--timings/--no-timings", default=True, show_default=True)
@_common
def _monitor(network, watch_dir, out, interval, max_polls, k, timings, seed,
             big_m_factor, restarts, row_normalize):
    """Watch a directory for snapshots and solve on trigger files."""
    sys.exit(run(CliConfig(
        command="monitor", network=network, watch_dir=watch_dir, out=out, interval=interval,
        max_polls=max_polls, k=k, timings=timings, seed=seed, big_m_factor=big_m_factor,
        restarts=restarts, row_normalize=row_normalize,
    )))


@cli.command("report")
@click.option("--scheme", type=_PATH, required=True)
@click.option("--network", type=_PATH)
def _report(scheme, network):
    """Pretty-print a scheme file."""
    sys.exit(run(CliConfig(command="report", scheme=scheme, network=network)))


_COMMANDS = {
    "partition": cmd_partition,
    "validate": cmd_validate,
    "distances": cmd_distances,
    "monitor": cmd_monitor,
    "report": cmd_report,
}


def run(cfg: CliConfig) -> int:
    """Execute a resolved CliConfig, mapping errors to the exit-code contract."""
    try:
        return _COMMANDS[cfg.command](cfg)
    except IslandctlError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


def main(argv: list[str] | None = None) -> int:
    """Console entry point."""
    level = os.environ.get("ISLANDCTL_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except SystemExit as exc:  # raised by the command callbacks with the mapped code
        code = exc.code
        return int(code) if code is not None else 0
    except KeyboardInterrupt:
        return 130
    return 0


if __name__ == "__main__":
    sys.exit(main())
