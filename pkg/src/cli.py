#!/usr/bin/env python3
"""
Command Line Interface for the program-cost toolkit
Provides commands for bounds, representation checks, light cones, circuit programming,
measure-and-operate simulation, property suites and CSV sweeps
"""

import click
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import suites, sweeps
from .core.config import reload_settings
from .core.errors import InvalidParams, NumericFailure, QProgError
from .core.models import Envelope, RunManifest, Unit
from .programming import bounds, lightcone, processor
from .programming.models import DesignRow, GateCostConstants, TradeoffConstants
from .quantum import circuit as circuits
from .quantum import matrixcore, mosim, representation
from .quantum.models import Axis, Geometry, ProbeConfig, UnitaryEnsemble

# Configure logging
logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
logger = logging.getLogger(__name__)

COST_UNITS = {"value_bits": Unit.BITS}


class QProgGroup(click.Group):
    """Maps toolkit errors to exit codes: validation 1, numeric failure 2"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except QProgError as e:
            click.echo(f"❌ {e}", err=True)
            ctx.exit(e.exit_code)


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=str)


def emit(
    ctx: click.Context,
    result: Dict[str, Any],
    units: Dict[str, Unit],
    notes: Optional[List[str]] = None,
    seed: Optional[int] = None,
    as_json: bool = True,
    outputs: Optional[Dict[str, str]] = None,
) -> None:
    """Print one result envelope to stdout and the run manifest to stderr"""
    command = ctx.command_path.split(" ", 1)[-1]
    envelope = Envelope(command=command, result=result, units=units, notes=notes or [])
    text = _dumps(envelope.model_dump(mode="json"))
    if as_json:
        click.echo(text)
    else:
        summary = ", ".join(
            f"{key}={result[key]:.6g} {unit.value}" if isinstance(result.get(key), float) else f"{key}={result.get(key)} {unit.value}"
            for key, unit in units.items()
        )
        click.echo(f"{command}: {summary}")
    write_manifest(ctx, seed=seed, outputs={"stdout": text, **(outputs or {})})


def write_manifest(ctx: click.Context, seed: Optional[int] = None, outputs: Optional[Dict[str, str]] = None) -> RunManifest:
    root = ctx.find_root()
    state = root.obj or {}
    manifest = RunManifest(
        command=ctx.command_path.split(" ", 1)[-1],
        arguments={key: _jsonable(value) for key, value in ctx.params.items()},
        seed=seed,
        tool_version=__version__,
        wall_time_s=round(time.perf_counter() - state.get("start", time.perf_counter()), 6),
    )
    for name, payload in (outputs or {}).items():
        manifest.add_digest(name, payload)
    text = manifest.model_dump_json(indent=2)
    click.echo(text, err=True)
    if state.get("manifest"):
        Path(state["manifest"]).write_text(text)
    return manifest


def require_seed(seed: Optional[int], what: str) -> int:
    if seed is None:
        raise InvalidParams(f"{what} is stochastic; pass --seed")
    if seed < 0 or seed >= 2 ** 64:
        raise InvalidParams(f"--seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def write_frame(ctx: click.Context, frame, csv_path: str, seed: Optional[int] = None) -> None:
    path = sweeps.write_csv(frame, csv_path)
    click.echo(f"✅ Wrote {len(frame)} rows to {path}", err=True)
    write_manifest(ctx, seed=seed, outputs={"csv": frame.to_csv(index=False)})


json_option = click.option('--json/--text', 'as_json', default=True, help='JSON envelope (default) or a one-line summary')
seed_option = click.option('--seed', type=int, default=None, help='Unsigned 64-bit seed (required for stochastic runs)')


@click.group(cls=QProgGroup)
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.option('--config', '-c', default='.env', help='Configuration file path')
@click.option('--manifest', type=click.Path(dir_okay=False), default=None, help='Also write the run manifest here')
@click.version_option(__version__, prog_name='qprog')
@click.pass_context
def cli(ctx, verbose, config, manifest):
    """Program-cost toolkit for brickwork quantum circuits"""
    ctx.ensure_object(dict)
    ctx.obj.update({"start": time.perf_counter(), "manifest": manifest})

    # Load environment variables
    if os.path.exists(config):
        settings = reload_settings(config)
    else:
        logger.debug(f"Configuration file {config} not found, using environment")
        settings = reload_settings()
    logging.getLogger().setLevel(logging.DEBUG if verbose else settings.log_level)


@cli.group('bounds')
def bounds_group():
    """Program-cost bounds, design depths and the MO cost model"""
    pass


@bounds_group.command('upper')
@click.option('--n-qubits', type=int, required=True)
@click.option('--k', type=int, default=2, show_default=True)
@click.option('--ell', type=int, required=True, help='Number of gates')
@click.option('--eps', type=float, required=True)
@click.option('--depth', type=int, default=None)
@json_option
@click.pass_context
def bounds_upper(ctx, n_qubits, k, ell, eps, depth, as_json):
    """Covering-number upper bound on the program cost"""
    report = bounds.program_cost_upper(n_qubits, k, ell, eps, depth)
    emit(ctx, report.model_dump(mode="json"), COST_UNITS, report.validity_notes, as_json=as_json)


@bounds_group.command('lower')
@click.option('--n-qubits', type=int, required=True)
@click.option('--eps', type=float, required=True)
@click.option('--varpi', type=float, default=None, help='Omit to maximize over varpi')
@click.option('--kappa', type=float, required=True)
@json_option
@click.pass_context
def bounds_lower(ctx, n_qubits, eps, varpi, kappa, as_json):
    """Lower bound on the program cost of a brickwork processor"""
    if varpi is None:
        varpi, report = bounds.optimize_lower(n_qubits, eps, kappa)
    else:
        report = bounds.program_cost_lower(n_qubits, eps, varpi, kappa)
    result = report.model_dump(mode="json")
    result["varpi"] = varpi
    emit(ctx, result, COST_UNITS, report.validity_notes, as_json=as_json)


@bounds_group.command('sweep')
@click.option('--kind', type=click.Choice(['upper', 'lower']), required=True)
@click.option('--n-qubits', type=int, multiple=True, required=True, help='Repeat for each N')
@click.option('--k', type=int, default=2, show_default=True)
@click.option('--depth', type=int, default=4, show_default=True)
@click.option('--eps', type=float, required=True)
@click.option('--kappa', type=float, default=0.5, show_default=True)
@click.option('--varpi', type=float, default=None)
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), required=True)
@click.pass_context
def bounds_sweep(ctx, kind, n_qubits, k, depth, eps, kappa, varpi, csv_path):
    """Upper or lower bound over a list of qubit counts, written as CSV"""
    if kind == "upper":
        frame = sweeps.run_sweep("upper", num_qubits_values=n_qubits, k=k, depth=depth, eps=eps)
    else:
        frame = sweeps.run_sweep("lower", num_qubits_values=n_qubits, eps=eps, kappa=kappa, varpi=varpi)
    write_frame(ctx, frame, csv_path)


@bounds_group.command('design-depth')
@click.option('--row', type=click.Choice([r.value for r in DesignRow]), required=True)
@click.option('--n-qubits', type=int, required=True)
@click.option('--t', type=int, required=True)
@click.option('--rho', type=float, required=True)
@click.option('--xi', type=float, default=None)
@click.option('--lattice-dim', type=float, default=None)
@click.option('--poly-exponent', type=float, default=None)
@json_option
@click.pass_context
def bounds_design_depth(ctx, row, n_qubits, t, rho, xi, lattice_dim, poly_exponent, as_json):
    """Circuit depth of an approximate unitary t-design"""
    extra = {key: value for key, value in
             (("xi", xi), ("lattice_dim", lattice_dim), ("poly_exponent", poly_exponent)) if value is not None}
    result = bounds.design_depth_bound(row, n_qubits, t, rho, **extra)
    emit(ctx, result.model_dump(mode="json"), {"depth": Unit.GATES}, as_json=as_json)


@bounds_group.command('mo-cost')
@click.option('--n-qubits', type=int, required=True)
@click.option('--eps', type=float, required=True)
@click.option('--schur-exponent', type=float, default=3.0, show_default=True)
@json_option
@click.pass_context
def bounds_mo_cost(ctx, n_qubits, eps, schur_exponent, as_json):
    """Copy count, gate complexity and error budget of the measure-and-operate processor"""
    estimate = bounds.mo_processor_estimate(n_qubits, eps, GateCostConstants(schur_exponent=schur_exponent))
    result = estimate.model_dump(mode="json")
    result["total_gates"] = estimate.gate_cost.total
    result["epsilon_mo"] = estimate.budget.epsilon_mo
    emit(ctx, result, {"copies": Unit.COUNT, "total_gates": Unit.GATES, "epsilon_mo": Unit.DIAMOND},
         estimate.gate_cost.notes, as_json=as_json)


@cli.group('repr')
def repr_group():
    """Schur-Weyl dimension counts"""
    pass


@repr_group.command('dn')
@click.option('--n', type=int, required=True)
@click.option('--d', type=int, required=True)
@json_option
@click.pass_context
def repr_dn(ctx, n, d, as_json):
    """d_n = C(n + d^2 - 1, d^2 - 1) and its log2"""
    dn = representation.program_dimension_dn(n, d)
    emit(ctx, {"n": n, "d": d, "d_n": dn, "log2_d_n": float(np.log2(float(dn)))},
         {"d_n": Unit.COUNT, "log2_d_n": Unit.BITS}, as_json=as_json)


@repr_group.command('check-cauchy')
@click.option('--d-max', type=int, default=4, show_default=True)
@click.option('--n-max', type=int, default=8, show_default=True)
@json_option
@click.pass_context
def repr_check_cauchy(ctx, d_max, n_max, as_json):
    """Check sum over shapes of dim(W)^2 = d_n exactly"""
    result = representation.check_cauchy_identity(d_max, n_max)
    emit(ctx, result, {"checked": Unit.COUNT, "failures": Unit.COUNT}, as_json=as_json)
    if result["failures"]:
        raise NumericFailure(f"{result['failures']} Schur-Weyl dimension identities failed")


@cli.group('circuit')
def circuit_group():
    """Brickwork circuit files"""
    pass


@circuit_group.command('random')
@click.option('--n-qubits', type=int, required=True)
@click.option('--depth', type=int, required=True)
@click.option('--k', type=int, default=2, show_default=True)
@click.option('--geometry', type=click.Choice([g.value for g in Geometry]), default=Geometry.LINE.value, show_default=True)
@click.option('--gate-kind', type=click.Choice(['haar', 'pauli']), default='haar', show_default=True)
@click.option('--axis', type=click.Choice([a.value for a in Axis]), default=Axis.Z.value, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@seed_option
@click.pass_context
def circuit_random(ctx, n_qubits, depth, k, geometry, gate_kind, axis, out, seed):
    """Write a seeded random brickwork circuit as JSON"""
    seed = require_seed(seed, "circuit random")
    c = circuits.random_brickwork(n_qubits, depth, k, geometry, seed, gate_kind, axis)
    circuits.write_circuit(c, out)
    click.echo(f"✅ Wrote circuit with {c.num_gates} gates to {out}", err=True)
    write_manifest(ctx, seed=seed, outputs={"circuit": circuits.serialize_circuit(c)})


@cli.group('lightcone')
def lightcone_group():
    """Light-cone decomposition and program-cost trade-offs"""
    pass


@lightcone_group.command('decompose')
@click.option('--circuit', 'circuit_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--w', 'window', type=int, required=True)
@click.option('--out', type=click.Path(dir_okay=False), default=None)
@click.option('--check/--no-check', default=True, help='Replay the cones and compare unitaries')
@json_option
@click.pass_context
def lightcone_decompose(ctx, circuit_path, window, out, check, as_json):
    """Split a circuit into forward and backward light cones"""
    c = circuits.read_circuit(circuit_path)
    dec = lightcone.decompose(c, window)
    text = _dumps(dec.model_dump(mode="json"))
    outputs = {}
    if out:
        Path(out).write_text(text)
        outputs["decomposition"] = text
        click.echo(f"✅ Wrote {len(dec.cones)} cones to {out}", err=True)
    result: Dict[str, Any] = {"cones": len(dec.cones), "h": dec.h, "window": window,
                              "max_width": max((cone.width for cone in dec.cones), default=0)}
    if check:
        verdict = lightcone.verify_decomposition(c, dec, check_unitary=c.num_qubits <= 10)
        result.update(verdict.model_dump(mode="json"))
        if not verdict.passed:
            raise NumericFailure(f"decomposition replay failed: {verdict.model_dump()}")
    emit(ctx, result, {"cones": Unit.COUNT, "max_width": Unit.COUNT, "unitary_gap": Unit.DIAMOND},
         as_json=as_json, outputs=outputs)


@lightcone_group.command('tradeoff')
@click.option('--mode', type=click.Choice(['generic', 'structured']), required=True)
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), default=None, help='Write the sweep instead')
@click.option('--n-qubits', type=int, default=None)
@click.option('--depth', type=int, default=None)
@click.option('--w', 'window', type=int, default=None)
@click.option('--eps', type=float, default=0.1, show_default=True)
@click.option('--c', 'c_const', type=float, default=1.0, show_default=True)
@click.option('--circuit', 'circuit_path', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Pauli-rotation circuit for the structured mode')
@json_option
@click.pass_context
def lightcone_tradeoff(ctx, mode, csv_path, n_qubits, depth, window, eps, c_const, circuit_path, as_json):
    """Compare primitive and light-cone-reduced program costs"""
    if csv_path:
        frame = sweeps.run_sweep(mode, eps=eps, c=c_const) if mode == "generic" else sweeps.run_sweep(mode, eps=eps)
        write_frame(ctx, frame, csv_path)
        return
    if mode == "generic":
        if None in (n_qubits, depth, window):
            raise InvalidParams("generic trade-off needs --n-qubits, --depth and --w (or --csv)")
        report = lightcone.generic_tradeoff(n_qubits, depth, window, eps, TradeoffConstants(c=c_const))
    else:
        if circuit_path is None or window is None:
            raise InvalidParams("structured trade-off needs --circuit and --w (or --csv)")
        c = circuits.read_circuit(circuit_path)
        dec = lightcone.decompose(c, window)
        stats = lightcone.cone_statistics(c, dec)
        report = lightcone.structured_tradeoff(stats, c.num_gates, c.k, c.num_qubits, eps)
    emit(ctx, report.model_dump(mode="json"),
         {"primitive_bits": Unit.BITS, "reduced_bits": Unit.BITS, "ratio": Unit.RATIO}, as_json=as_json)


@cli.command('program')
@click.option('--circuit', 'circuit_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--eps', type=float, required=True)
@click.option('--report', type=click.Path(dir_okay=False), default=None, help='Write the full programming report')
@click.option('--verify/--no-verify', default=True, help='Dense check of the achieved error')
@json_option
@click.pass_context
def program(ctx, circuit_path, eps, report, verify, as_json):
    """Program every gate of a k=1 circuit against a grid net"""
    c = circuits.read_circuit(circuit_path)
    programmed = processor.program_circuit(c, eps, verify=verify)
    outputs = {}
    if report:
        text = _dumps(programmed.model_dump(mode="json"))
        Path(report).write_text(text)
        outputs["report"] = text
        click.echo(f"✅ Wrote programming report to {report}", err=True)
    result = {
        "total_cost_bits": programmed.total_cost_bits,
        "achieved_error": programmed.achieved_error,
        "gap_sum": programmed.gap_sum,
        "per_gate_eps": programmed.per_gate_eps,
        "net_size": programmed.net_size,
        "location_bits": programmed.location_bits,
        "gaps": [r.gap for r in programmed.program.records],
    }
    emit(ctx, result, {"total_cost_bits": Unit.BITS, "achieved_error": Unit.DIAMOND, "gap_sum": Unit.DIAMOND,
                       "per_gate_eps": Unit.DIAMOND, "gaps": Unit.DIAMOND, "net_size": Unit.COUNT,
                       "location_bits": Unit.BITS}, programmed.notes, as_json=as_json, outputs=outputs)


@cli.group('mosim')
def mosim_group():
    """Measure-and-operate channel simulation"""
    pass


def _target(target_seed: Optional[int]) -> np.ndarray:
    return np.eye(2, dtype=complex) if target_seed is None else matrixcore.haar_unitary(2, target_seed)


mo_options = [
    click.option('--n', type=int, default=1, show_default=True, help='Copies of the program unitary'),
    click.option('--samples', type=int, default=100_000, show_default=True),
    click.option('--ensemble', type=click.Choice([e.value for e in UnitaryEnsemble]), default='haar', show_default=True),
    click.option('--target-seed', type=int, default=None, help='Haar target unitary (identity when omitted)'),
    seed_option,
]


def with_mo_options(func):
    for option in reversed(mo_options):
        func = option(func)
    return func


def _mo_seed(ensemble: str, seed: Optional[int]) -> Optional[int]:
    return require_seed(seed, "haar sampling") if ensemble == UnitaryEnsemble.HAAR.value else seed


@mosim_group.command('estimate-p')
@with_mo_options
@json_option
@click.pass_context
def mosim_estimate_p(ctx, n, samples, ensemble, target_seed, seed, as_json):
    """Depolarizing coefficient of the simulated channel"""
    seed = _mo_seed(ensemble, seed)
    estimate = mosim.estimate_p(_target(target_seed), ProbeConfig(n=n), samples, UnitaryEnsemble(ensemble), seed)
    emit(ctx, estimate.model_dump(mode="json", exclude_none=True),
         {"p_hat": Unit.PROBABILITY, "stderr": Unit.PROBABILITY, "samples": Unit.COUNT}, seed=seed, as_json=as_json)


@mosim_group.command('simulate')
@with_mo_options
@json_option
@click.pass_context
def mosim_simulate(ctx, n, samples, ensemble, target_seed, seed, as_json):
    """Choi matrix of the simulated channel and its depolarizing-model fit"""
    seed = _mo_seed(ensemble, seed)
    estimate = mosim.simulate_mo_channel(_target(target_seed), ProbeConfig(n=n), samples, UnitaryEnsemble(ensemble), seed)
    emit(ctx, estimate.model_dump(mode="json"),
         {"p_hat": Unit.PROBABILITY, "stderr": Unit.PROBABILITY, "p_exact_channel": Unit.PROBABILITY,
          "fit_residual": Unit.DIAMOND, "samples": Unit.COUNT}, seed=seed, as_json=as_json)


@mosim_group.command('zeta-check')
@click.option('--n', type=int, default=1, show_default=True)
@click.option('--zeta', type=float, required=True)
@click.option('--perturbation', type=float, default=1.0, show_default=True)
@click.option('--samples', type=int, default=100_000, show_default=True)
@seed_option
@json_option
@click.pass_context
def mosim_zeta_check(ctx, n, zeta, perturbation, samples, seed, as_json):
    """Channel deviation under a perturbed reference state"""
    seed = require_seed(seed, "zeta-check")
    check = mosim.zeta_perturbation_check(ProbeConfig(n=n), zeta, samples, seed, perturbation)
    emit(ctx, check.model_dump(mode="json"), {"deviation": Unit.DIAMOND, "bound": Unit.DIAMOND}, seed=seed,
         as_json=as_json)
    if not check.holds:
        raise NumericFailure(f"deviation {check.deviation:.4e} exceeds bound {check.bound:.4e}")


@cli.command('verify')
@click.option('--suite', type=click.Choice(list(suites.SUITES) + ['all']), default='all', show_default=True)
@click.option('--quick', is_flag=True, help='Smaller instance counts')
@click.option('--seed', type=int, default=0, show_default=True)
@click.pass_context
def verify(ctx, suite, quick, seed):
    """Run property suites and print check counts"""
    click.echo(f"🔄 Running {suite} suite(s)...", err=True)
    results = suites.run_suite(suite, quick=quick, seed=seed)
    payload = {"suites": [r.model_dump(mode="json") for r in results]}
    emit(ctx, payload, {"checked": Unit.COUNT, "failures": Unit.COUNT, "seconds": Unit.SECONDS}, seed=seed)
    failed = [check.name for r in results for check in r.checks if not check.passed]
    if failed:
        raise NumericFailure(f"failed checks: {', '.join(failed)}")
    click.echo("✅ All checks passed", err=True)


@cli.command('sweep')
@click.argument('kind', type=click.Choice(['tightness', 'generic', 'structured', 'epsilon']))
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), required=True)
@click.option('--min-exp', type=int, default=None, help='Smallest log2 N (tightness, generic)')
@click.option('--max-exp', type=int, default=None, help='Largest log2 N (tightness, generic)')
@click.option('--kappa', type=float, default=0.5, show_default=True)
@click.option('--eps', type=float, default=None)
@click.option('--n-qubits', type=int, default=64, show_default=True, help='N for the epsilon sweep')
@click.option('--k', type=int, default=2, show_default=True)
@click.option('--ell', type=int, default=128, show_default=True)
@click.pass_context
def sweep(ctx, kind, csv_path, min_exp, max_exp, kappa, eps, n_qubits, k, ell):
    """Parameter sweeps written as CSV"""
    if kind in ("tightness", "generic"):
        lo = min_exp if min_exp is not None else (6 if kind == "tightness" else 4)
        hi = max_exp if max_exp is not None else 20
        if lo > hi:
            raise InvalidParams(f"--min-exp {lo} exceeds --max-exp {hi}")
        params: Dict[str, Any] = {"exponents": tuple(range(lo, hi + 1))}
        if kind == "tightness":
            params["kappa"] = kappa
        elif eps is not None:
            params["eps"] = eps
    elif kind == "structured":
        params = {} if eps is None else {"eps": eps}
    else:
        params = {"num_qubits": n_qubits, "k": k, "num_gates": ell, "kappa": kappa}
    write_frame(ctx, sweeps.run_sweep(kind, **params), csv_path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point returning 0 on success, 1 on validation errors, 2 on numeric failures"""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="qprog", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        if getattr(e, "ctx", None) is not None:
            click.echo(e.ctx.get_help(), err=True)
        e.show()
        return 1
    except click.exceptions.Abort:
        click.echo("❌ Aborted", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == '__main__':
    sys.exit(main())
