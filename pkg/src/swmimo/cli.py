"""Command-line front end: NMSE sweeps, complexity tables, invariant checks.

All numeric output is CSV with one header row; floats are serialized with
``repr`` (shortest round-trip), so identical flags and seed produce
byte-identical files.  Files are written to a temporary sibling and
atomically renamed, never left partial.

Exit codes: 0 success, 1 validation failure, 2 bad arguments, 3 I/O
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile

import numpy as np

from . import complexity as cx
from .circulant import eigenvalues_via_dft, is_power_of_two, reconstruct_dense
from .estimators import ESTIMATOR_METHODS, NoiseModel, known_ccm_gain, lmmse_swp_known
from .geometry import UcaConfig, approximation_error, build_ccm, build_channel
from .simulate import (
    CHANNEL_MODES,
    GAUSSIAN_PRIOR,
    ExperimentConfig,
    analytic_mmse,
    noise_variance_for_snr,
    run_sweep,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3

NMSE_COLUMNS = ("method", "snr_db", "nmse_mean", "nmse_stderr", "trials", "n", "t", "seed")
COMPLEXITY_COLUMNS = ("method", "n", "t", "additions", "multiplications", "mads", "log10_mads")
DUMP_COLUMNS = ("row", "col", "re", "im")


def _fmt(value) -> str:
    """Serialize one CSV cell; floats get shortest round-trip form."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_csv(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(cell) for cell in row])
    return buffer.getvalue()


def _emit(text: str, out_path: str) -> None:
    """Write to stdout for '-', else atomically (temp file + rename)."""
    if out_path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".swmimo-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, out_path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def _positive_float(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _csv_floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}: {err}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return values


def _csv_ints(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}: {err}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _scene_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--freq-ghz", type=_positive_float, default=100.0,
                        help="carrier frequency in GHz (default 100)")
    parser.add_argument("--rt", type=_positive_float, default=0.5,
                        help="transmit array radius in meters (default 0.5)")
    parser.add_argument("--rr", type=_positive_float, default=0.5,
                        help="receive array radius in meters (default 0.5)")
    parser.add_argument("--d", type=_positive_float, default=100.0,
                        help="link distance in meters (default 100)")


def _scene(args, n: int) -> UcaConfig:
    return UcaConfig(
        n_antennas=n,
        radius_tx=args.rt,
        radius_rx=args.rr,
        link_distance=args.d,
        carrier_freq=args.freq_ghz * 1e9,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swmimo",
        description="Channel estimation experiments for spherical-wave UCA MIMO links",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("nmse-sweep", help="Monte-Carlo NMSE versus SNR, CSV output")
    sweep.add_argument("--n", type=int, default=64, help="antenna count (default 64)")
    _scene_arguments(sweep)
    sweep.add_argument("--t", type=int, default=10, help="observation slots per trial (default 10)")
    sweep.add_argument("--snr", type=_csv_floats, default=(-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0),
                       help="comma-separated SNR points in dB")
    sweep.add_argument("--trials", type=int, default=2000, help="Monte-Carlo trials per point")
    sweep.add_argument("--seed", type=int, default=0, help="RNG seed (unsigned 64-bit)")
    sweep.add_argument("--methods", default=",".join(ESTIMATOR_METHODS),
                       help="comma-separated estimator subset (default all)")
    sweep.add_argument("--channel-mode", choices=CHANNEL_MODES, default=GAUSSIAN_PRIOR)
    sweep.add_argument("--pilot-len", type=int, default=None,
                       help="pilot sequence length L >= N (default N)")
    sweep.add_argument("--workers", type=int, default=1,
                       help="worker threads for trials; output is identical for any count")
    sweep.add_argument("--out", default="-", help="output CSV path, or - for stdout")

    comp = sub.add_parser("complexity", help="operation-count table, CSV output")
    comp.add_argument("--n", type=_csv_ints, default=(256,),
                      help="comma-separated antenna counts")
    comp.add_argument("--t", type=int, default=10, help="observation slots (default 10)")
    comp.add_argument("--methods", default=",".join(cx.COMPLEXITY_METHODS),
                      help="comma-separated method subset (default all)")
    comp.add_argument("--out", default="-", help="output CSV path, or - for stdout")

    val = sub.add_parser("validate", help="run the structural invariant suite")
    val.add_argument("--n", type=int, default=8, help="antenna count (default 8)")
    _scene_arguments(val)
    val.add_argument("--seed", type=int, default=0, help="RNG seed for the random checks")

    dump = sub.add_parser("channel-dump",
                          help="write the LoS channel matrix and covariance first row")
    dump.add_argument("--n", type=int, default=64, help="antenna count (default 64)")
    _scene_arguments(dump)
    dump.add_argument("--out", default="-", help="output CSV path, or - for stdout")

    return parser


def _cmd_nmse_sweep(args, parser) -> int:
    methods = tuple(m for m in args.methods.split(",") if m)
    if args.n < 2:
        parser.error(f"--n must be at least 2, got {args.n}")
    if args.t < 1:
        parser.error(f"--t must be at least 1, got {args.t}")
    if args.trials < 1:
        parser.error(f"--trials must be at least 1, got {args.trials}")
    if args.seed < 0 or args.seed >= 2**64:
        parser.error(f"--seed must fit in unsigned 64 bits, got {args.seed}")
    if args.workers < 1:
        parser.error(f"--workers must be at least 1, got {args.workers}")
    for method in methods:
        if method not in ESTIMATOR_METHODS:
            parser.error(f"unknown method {method!r}; choose from {', '.join(ESTIMATOR_METHODS)}")
    if not methods:
        parser.error("--methods must select at least one estimator")
    if args.pilot_len is not None and args.pilot_len < args.n:
        parser.error(f"--pilot-len must be at least N={args.n}, got {args.pilot_len}")
    try:
        cfg = ExperimentConfig(
            scene=_scene(args, args.n),
            t_slots=args.t,
            snr_points_db=args.snr,
            trials=args.trials,
            seed=args.seed,
            channel_mode=args.channel_mode,
            methods=methods,
            pilot_length=args.pilot_len,
        )
    except ValueError as err:
        parser.error(str(err))
    curve = run_sweep(cfg, workers=args.workers)
    rows = [
        (p.method, p.snr_db, p.nmse_mean, p.nmse_stderr, p.trials, args.n, args.t, args.seed)
        for p in curve.points
    ]
    _emit(_render_csv(NMSE_COLUMNS, rows), args.out)
    return EXIT_OK


def _cmd_complexity(args, parser) -> int:
    methods = tuple(m for m in args.methods.split(",") if m)
    for method in methods:
        if method not in cx.COMPLEXITY_METHODS:
            parser.error(f"unknown method {method!r}; choose from {', '.join(cx.COMPLEXITY_METHODS)}")
    if not methods:
        parser.error("--methods must select at least one method")
    if args.t < 1:
        parser.error(f"--t must be at least 1, got {args.t}")
    for n in args.n:
        if n < 2:
            parser.error(f"--n entries must be at least 2, got {n}")
        if any(m in (cx.SWP_KNOWN, cx.SWP_UNKNOWN) for m in methods) and not is_power_of_two(n):
            parser.error(f"spectral methods need power-of-two N, got {n}")
    rows = []
    for method in methods:
        for n in args.n:
            p = cx.profile(method, n, args.t)
            rows.append((p.method, p.n, p.t, p.additions, p.multiplications,
                         p.mads, math.log10(p.mads)))
    _emit(_render_csv(COMPLEXITY_COLUMNS, rows), args.out)
    return EXIT_OK


def _cmd_channel_dump(args, parser) -> int:
    if args.n < 2:
        parser.error(f"--n must be at least 2, got {args.n}")
    scene = _scene(args, args.n)
    channel = build_channel(scene).entries
    first_row = build_ccm(scene).first_row
    rows = []
    for i in range(args.n):
        for j in range(args.n):
            rows.append((i, j, float(channel[i, j].real), float(channel[i, j].imag)))
    # Covariance first row rides along with the sentinel row index -1.
    for j in range(args.n):
        rows.append((-1, j, float(first_row[j].real), float(first_row[j].imag)))
    _emit(_render_csv(DUMP_COLUMNS, rows), args.out)
    return EXIT_OK


def _validation_checks(scene: UcaConfig, seed: int):
    """Yield (name, passed, detail) for the structural invariant suite."""
    rng = np.random.default_rng(seed)
    n = scene.n_antennas

    ccm = build_ccm(scene)
    dense = ccm.to_dense()
    herm = float(np.max(np.abs(dense - dense.conj().T)))
    scale = float(np.max(np.abs(dense)))
    yield ("ccm-hermitian", herm <= 1e-10 * scale, f"max |R - R^H| = {herm:.3e}")

    shifted = np.roll(np.roll(dense, 1, axis=0), 1, axis=1)
    cyc = float(np.max(np.abs(dense - shifted)))
    yield ("ccm-circulant", cyc <= 1e-10 * scale, f"max cyclic-shift deviation = {cyc:.3e}")

    spectrum = eigenvalues_via_dft(ccm).eigenvalues
    dense_eigs = np.linalg.eigvalsh(dense)
    gap = float(np.max(np.abs(np.sort(spectrum) - dense_eigs)))
    top = float(np.max(np.abs(dense_eigs)))
    yield ("eigs-match-dense", gap <= 1e-9 * top, f"max eigenvalue gap = {gap:.3e}")

    rebuilt = reconstruct_dense(eigenvalues_via_dft(ccm))
    rt = float(np.linalg.norm(rebuilt - dense) / np.linalg.norm(dense))
    yield ("round-trip", rt <= 1e-10, f"relative reconstruction error = {rt:.3e}")

    los = build_channel(scene).entries
    gram = los.conj().T @ los
    det = float(np.linalg.norm(gram - dense) / np.linalg.norm(dense))
    yield ("los-gram-identity", det <= 1e-10, f"relative ||H^H H - R|| = {det:.3e}")

    bound = (scene.radius_tx + scene.radius_rx) ** 4 / (8.0 * scene.link_distance**3)
    err = approximation_error(scene)
    yield ("distance-taylor-bound", err <= bound, f"max error {err:.3e} vs bound {bound:.3e}")

    if is_power_of_two(n):
        worst = 0.0
        for snr_db in (0.0, 10.0, 20.0):
            noise = NoiseModel(noise_variance_for_snr(ccm, GAUSSIAN_PRIOR, snr_db))
            gain = known_ccm_gain(dense, noise)
            for _ in range(3):
                y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                direct = y @ gain
                spectral = lmmse_swp_known(y, ccm, noise)
                worst = max(worst, float(np.linalg.norm(spectral.estimate - direct)
                                         / np.linalg.norm(direct)))
                gains = spectral.filter_spectrum.eigenvalues
                if float(np.min(gains)) < 0.0 or float(np.max(gains)) > 1.0:
                    yield ("filter-contraction", False,
                           f"gain outside [0, 1]: [{gains.min():.3e}, {gains.max():.3e}]")
                    break
        yield ("spectral-equals-direct", worst <= 1e-10,
               f"max relative deviation = {worst:.3e}")
        noise = NoiseModel(noise_variance_for_snr(ccm, GAUSSIAN_PRIOR, 0.0))
        mmse = analytic_mmse(ccm, noise)
        yield ("analytic-mmse-range", 0.0 < mmse < 1.0, f"expected NMSE at 0 dB = {mmse:.4f}")
    else:
        yield ("spectral-equals-direct", True, "skipped: N not a power of two")

    known = cx.ratio(cx.profile(cx.DIRECT_KNOWN, 256), cx.profile(cx.SWP_KNOWN, 256))
    yield ("complexity-known-ratio", abs(known - 7561.9) <= 0.1, f"N=256 ratio = {known:.1f}")
    unknown = cx.ratio(cx.profile(cx.DIRECT_UNKNOWN, 256, 10), cx.profile(cx.SWP_UNKNOWN, 256, 10))
    yield ("complexity-unknown-ratio", abs(unknown - 292.9) <= 0.5,
           f"N=256, T=10 ratio = {unknown:.1f}")


def _cmd_validate(args, parser) -> int:
    if args.n < 2:
        parser.error(f"--n must be at least 2, got {args.n}")
    scene = _scene(args, args.n)
    failures = 0
    for name, passed, detail in _validation_checks(scene, args.seed):
        status = "PASS" if passed else "FAIL"
        print(f"{status} {name}: {detail}")
        if not passed:
            failures += 1
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "nmse-sweep": _cmd_nmse_sweep,
        "complexity": _cmd_complexity,
        "validate": _cmd_validate,
        "channel-dump": _cmd_channel_dump,
    }
    try:
        return handlers[args.command](args, parser)
    except OSError as err:
        print(f"swmimo: I/O failure: {err}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
