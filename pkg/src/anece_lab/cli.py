"""Command-line surface: scenario files, formula reports, verification,
sweeps, pilot generation, and scheme comparison.

Scenario files are strict JSON with a versioned schema; unknown keys are
rejected with their key path.  All randomness flows from the single
scenario seed through purpose-named substreams, so outputs are
byte-reproducible.  Exit codes: 0 success, 1 verification failure,
2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace

from .capacity import ckey0_curve, cij_curve, cond_entropy_curve, phase1_curve
from .dofcalc import (
    DofScenario,
    dof_cij,
    dof_gap,
    dof_leakage,
    dof_modified_two_user,
    dof_pairwise,
    dof_phase1,
    dof_phase2_lower,
    dof_phase2_lower_plus,
    dof_phase2_upper,
    dof_total,
    dof_two_user_original,
)
from .model import (
    CheckResult,
    DofReport,
    NetworkConfig,
    SnrGrid,
    TwoUserModifiedConfig,
    validate_config,
    validate_modified_config,
)
from .pilots import build_pairwise_matrix, build_pilots, build_square_pilots, validate_pilots, write_matrix_text
from .numkernel import numerical_rank, sample_cn, substream
from .verify import (
    default_grid,
    eig_growth_suite,
    compare_schemes,
    identity_suite,
    rank_oracle_suite,
    verify_slope,
)

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

MIN_TRUSTED_MC_SAMPLES = 100

SCHEMES = ("all_user", "pairwise", "modified_two_user")


class ScenarioError(Exception):
    """Configuration or usage problem; maps to exit code 2."""


@dataclass(frozen=True)
class Scenario:
    scheme: str
    network: NetworkConfig | TwoUserModifiedConfig
    snr_grid: SnrGrid
    mc_samples: int
    seed: int


# --------------------------------------------------------------------------
# scenario parsing
# --------------------------------------------------------------------------

_TOP_KEYS = {"schema_version", "scheme", "network", "snr_grid", "mc_samples", "seed"}
_NETWORK_KEYS = {
    "all_user": {"m", "antennas", "n_eve", "k1", "k2"},
    "pairwise": {"m", "antennas", "n_eve", "k1", "k2"},
    "modified_two_user": {"n1", "n2", "k_total", "n_eve"},
}


def _violation_field(text: str) -> str:
    for prefix, field in (
        ("K_1", "k1"),
        ("K_2", "k2"),
        ("K <", "k_total"),
        ("N_E", "n_eve"),
        ("M <", "antennas"),
        ("antenna", "antennas"),
        ("N_1", "n1"),
        ("eve_noise_var", "eve_noise_var"),
    ):
        if text.startswith(prefix):
            return field
    return ""


def _reject_unknown(mapping: dict, allowed: set, path: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ScenarioError(f'unknown key "{path}{key}"')


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ScenarioError(f'missing key "{path}{key}"')
    return mapping[key]


def parse_scenario(path: str) -> Scenario:
    """Strictly parse and validate a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError("scenario file must hold a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "")
    version = _require(raw, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    scheme = _require(raw, "scheme", "")
    if scheme not in SCHEMES:
        raise ScenarioError(f"scheme: expected one of {SCHEMES}, got {scheme!r}")
    network = _require(raw, "network", "")
    if not isinstance(network, dict):
        raise ScenarioError("network: must be an object")
    _reject_unknown(network, _NETWORK_KEYS[scheme], "network.")

    if scheme == "modified_two_user":
        cfg = TwoUserModifiedConfig(
            n1=int(_require(network, "n1", "network.")),
            n2=int(_require(network, "n2", "network.")),
            k_total=int(_require(network, "k_total", "network.")),
            n_eve=int(_require(network, "n_eve", "network.")),
        )
        problems = validate_modified_config(cfg)
    else:
        antennas = _require(network, "antennas", "network.")
        if not isinstance(antennas, list) or not antennas:
            raise ScenarioError("network.antennas: must be a non-empty list")
        antennas = tuple(int(n) for n in antennas)
        if "m" in network and int(network["m"]) != len(antennas):
            raise ScenarioError("network.m: does not match the antennas list length")
        n_eve = int(_require(network, "n_eve", "network."))
        k2 = int(network.get("k2", 1))
        if scheme == "pairwise":
            k1 = int(network.get("k1", max(antennas)))
            cfg = NetworkConfig(antennas, n_eve, k1=k1, k2=k2)
            problems = []
            if len(antennas) < 3:
                problems.append("M < 3 (pair-wise scheme needs at least 3 users)")
            if any(n < 1 for n in antennas):
                problems.append("antenna counts must be >= 1")
            if k1 < max(antennas):
                problems.append(f"K_1 < max antenna count (need >= {max(antennas)})")
            if n_eve < 0:
                problems.append("N_E < 0")
            if k2 < 0:
                problems.append("K_2 < 0")
        else:
            k1 = network.get("k1")
            cfg = NetworkConfig(antennas, n_eve, k1=None if k1 is None else int(k1), k2=k2)
            problems = validate_config(cfg)
    if problems:
        details = "; ".join(f"network.{_violation_field(p)}: {p}" for p in problems)
        raise ScenarioError(details)

    grid_points = raw.get("snr_grid", list(default_grid().points))
    try:
        grid = SnrGrid(tuple(float(p) for p in grid_points))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"snr_grid: {exc}") from exc
    mc_samples = int(raw.get("mc_samples", 2000))
    if mc_samples < 1:
        raise ScenarioError("mc_samples: must be >= 1")
    seed = int(raw.get("seed", 0))
    return Scenario(scheme, cfg, grid, mc_samples, seed)


# --------------------------------------------------------------------------
# formula reports
# --------------------------------------------------------------------------


def formula_report(sc: Scenario) -> DofReport:
    """All applicable formula values, keyed by stable identifiers.

    All-user pair values are reported for the user pair (1, 2);
    dof_phase2_lower_plus is the clamped better ordering, which is what
    dof_total adds on top of the pilot phase.
    """
    if sc.scheme == "modified_two_user":
        c = sc.network
        md = dof_modified_two_user(c)
        entries = {
            "dof_phase1": dof_phase1(c.n1, c.n2),
            "dof_phase2": md.upper,
            "dof_phase2_lower_12": md.lower_12,
            "dof_phase2_lower_21": md.lower_21,
            "dof_total": dof_total("modified_two_user", c),
            "dof_original_phase2": dof_two_user_original(c.n1, c.n2, c.n_eve, c.k_total - c.n2),
            "dof_gain_over_original": md.lower_12
            - dof_two_user_original(c.n1, c.n2, c.n_eve, c.k_total - c.n2),
        }
        return DofReport(entries)

    cfg = sc.network
    if sc.scheme == "pairwise":
        n_i, n_j = cfg.antennas[0], cfg.antennas[1]
        pair = dof_pairwise(n_i, n_j, cfg.n_eve, cfg.k2)
        entries = {
            "dof_phase1": dof_phase1(n_i, n_j),
            "dof_phase2_lower": pair.lower,
            "dof_phase2_upper": pair.upper,
            "dof_gap": pair.gap,
            "dof_total": dof_total("pairwise", (n_i, n_j, cfg.n_eve, cfg.k2)),
        }
        return DofReport(entries)

    s = DofScenario(cfg, 0, 1)
    entries = {
        "dof_phase1": dof_phase1(s.n_i, s.n_j),
        "dof_cij": dof_cij(s),
        "dof_leakage": dof_leakage(s),
        "dof_phase2_lower": dof_phase2_lower(s),
        "dof_phase2_lower_plus": max(dof_phase2_lower_plus(s), dof_phase2_lower_plus(s.swapped())),
        "dof_phase2_upper": dof_phase2_upper(s),
        "dof_gap": dof_gap(s),
        "dof_total": dof_total("all_user", s),
    }
    if cfg.m == 2:
        n1, n2 = sorted(cfg.antennas)
        entries["dof_two_user_original"] = dof_two_user_original(n1, n2, cfg.n_eve, cfg.k2)
    return DofReport(entries)


# --------------------------------------------------------------------------
# CSV helpers
# --------------------------------------------------------------------------


def fmt_number(x) -> str:
    """Fixed 12-significant-digit decimal; round-trips through float()."""
    return format(float(x), ".12g")


def _write_lines(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def checks_to_csv(rows: list[CheckResult]) -> list[str]:
    lines = ["name,measured,target,tolerance,passed"]
    for r in rows:
        lines.append(
            f"{r.name},{fmt_number(r.measured)},{fmt_number(r.target)},"
            f"{fmt_number(r.tolerance)},{str(r.passed).lower()}"
        )
    return lines


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_formula(sc: Scenario) -> int:
    print(json.dumps(formula_report(sc).entries))
    return EXIT_OK


def _verify_rows(sc: Scenario) -> list[CheckResult]:
    rows: list[CheckResult] = []
    grid = sc.snr_grid

    entropy_curve = cond_entropy_curve(2, 3, 4, grid, sc.mc_samples, sc.seed)
    rows.append(verify_slope("slope:cond-entropy[2x3x4]", entropy_curve, 2 * 4))
    rows.append(verify_slope("negctrl:slope:cond-entropy-wrong-target", entropy_curve, 2 * 4 + 3))

    if sc.scheme == "modified_two_user":
        c = sc.network
        curve = ckey0_curve(c, grid, sc.mc_samples, sc.seed)
        target = c.n1 * (c.k_total - c.n1) + c.n1 * (c.k_total - c.n2)
        rows.append(verify_slope("slope:modified-ckey0", curve, target))
        md = dof_modified_two_user(c)
        rows.append(CheckResult("negctrl:identity:tampered-modified", float(md.upper + 1),
                                float(md.lower_12), 0.0))
        rank_cfg = NetworkConfig((c.n1, c.n2), c.n_eve, k2=max(c.k_total - c.n2, 1))
        ps = build_pilots(rank_cfg, sc.seed)
        rows += eig_growth_suite(rank_cfg, ps)
        rows += rank_oracle_suite(rank_cfg, sc.seed)
    elif sc.scheme == "pairwise":
        cfg = sc.network
        pair = dof_pairwise(cfg.antennas[0], cfg.antennas[1], cfg.n_eve, cfg.k2)
        rows.append(CheckResult("negctrl:identity:tampered-pairwise-gap",
                                float(pair.upper - pair.lower + 1), float(pair.gap), 0.0))
        rows += rank_oracle_suite(cfg, sc.seed)
    else:
        cfg = sc.network
        s = DofScenario(cfg, 0, 1)
        ps = build_pilots(cfg, sc.seed)
        p1_curve = phase1_curve(cfg, ps, 0, 1, grid)
        rows.append(verify_slope("slope:phase1[1-2]", p1_curve, dof_phase1(s.n_i, s.n_j)))
        rows.append(verify_slope("negctrl:slope:phase1-wrong-target", p1_curve,
                                 dof_phase1(s.n_i, s.n_j) + 3))
        if cfg.k2 >= 1:
            c_curve = cij_curve(cfg, 0, 1, grid, sc.mc_samples, sc.seed)
            rows.append(verify_slope("slope:cij[1-2]", c_curve, dof_cij(s)))
        rows.append(CheckResult("negctrl:identity:tampered-gap",
                                float(dof_phase2_upper(s) - dof_phase2_lower(s) + 1),
                                float(dof_gap(s)), 0.0))
        rows += eig_growth_suite(cfg, ps)
        rows += rank_oracle_suite(cfg, sc.seed)

    rows += identity_suite()
    return sorted(rows, key=lambda r: r.name)


def cmd_verify(sc: Scenario, out_path: str | None, allow_low_samples: bool,
               inject_wrong_target: bool) -> int:
    if sc.mc_samples < MIN_TRUSTED_MC_SAMPLES and not allow_low_samples:
        raise ScenarioError(
            f"mc_samples={sc.mc_samples} is below {MIN_TRUSTED_MC_SAMPLES}; slope rows "
            "would be unreliable (pass --allow-low-samples to proceed anyway)"
        )
    rows = _verify_rows(sc)
    if inject_wrong_target:
        for idx, row in enumerate(rows):
            if not row.name.startswith("negctrl:"):
                rows[idx] = CheckResult(row.name, row.measured, row.target + 1.0, row.tolerance)
                break
    _write_lines(checks_to_csv(rows), out_path)
    real_ok = all(r.passed for r in rows if not r.name.startswith("negctrl:"))
    controls_ok = all(not r.passed for r in rows if r.name.startswith("negctrl:"))
    return EXIT_OK if real_ok and controls_ok else EXIT_CHECK_FAILED


def _sweep_scenario(sc: Scenario, axis: str, value: int) -> Scenario:
    if axis == "n_eve":
        if sc.scheme == "modified_two_user":
            return replace(sc, network=replace(sc.network, n_eve=value))
        cfg = sc.network
        return replace(sc, network=NetworkConfig(cfg.antennas, value, k1=cfg.k1, k2=cfg.k2))
    if axis == "k2":
        if sc.scheme == "modified_two_user":
            if value < sc.network.n2:
                raise ScenarioError(f"k_total={value} below N_2={sc.network.n2}")
            return replace(sc, network=replace(sc.network, k_total=value))
        cfg = sc.network
        if value < 0:
            raise ScenarioError("k2 must be non-negative")
        return replace(sc, network=NetworkConfig(cfg.antennas, cfg.n_eve, k1=cfg.k1, k2=value))
    if axis == "m":
        if sc.scheme != "all_user":
            raise ScenarioError("the m axis applies only to the all_user scheme")
        cfg = sc.network
        if len(set(cfg.antennas)) != 1:
            raise ScenarioError("the m axis needs a symmetric antenna layout")
        if value < 2:
            raise ScenarioError("m must be >= 2")
        return replace(sc, network=NetworkConfig((cfg.antennas[0],) * value, cfg.n_eve, k2=cfg.k2))
    raise ScenarioError(f"unknown sweep axis {axis!r}")


def cmd_sweep(sc: Scenario, axis: str, span: tuple[int, int], out_path: str) -> int:
    lo, hi = span
    if hi < lo:
        raise ScenarioError("sweep range must be low:high with high >= low")
    reports = []
    for value in range(lo, hi + 1):
        swept = _sweep_scenario(sc, axis, value)
        reports.append((value, formula_report(swept).entries))
    keys: list[str] = []
    for _, entries in reports:
        keys.extend(k for k in entries if k not in keys)
    lines = ["axis,value," + ",".join(keys)]
    for value, entries in reports:
        cells = ",".join("" if k not in entries else str(entries[k]) for k in keys)
        lines.append(f"{axis},{value},{cells}")
    _write_lines(lines, out_path)
    return EXIT_OK


def _suffixed(path: str, suffix: str) -> str:
    stem, dot, ext = path.rpartition(".")
    if dot and "/" not in ext:
        return f"{stem}{suffix}.{ext}"
    return f"{path}{suffix}"


def cmd_pilots(sc: Scenario, out_path: str) -> int:
    if sc.scheme == "modified_two_user":
        pp = build_square_pilots(sc.network, sc.seed)
        for tag, mat, n in (("_p1", pp.p1, sc.network.n1), ("_p2", pp.p2, sc.network.n2)):
            target = _suffixed(out_path, tag)
            write_matrix_text(target, mat)
            rank = numerical_rank(mat)
            print(f"wrote {target}: rank(P{tag[-1]})={rank} {'OK' if rank == n else 'BAD'}")
        return EXIT_OK
    if sc.scheme == "pairwise":
        cfg = sc.network
        rng = substream(sc.seed, "pilots-pairwise")
        blocks = [sample_cn(rng, (n, cfg.k1)) for n in cfg.antennas]
        pair = build_pairwise_matrix(cfg, blocks)
        write_matrix_text(out_path, pair.matrix)
        rank = numerical_rank(pair.matrix)
        print(f"wrote {out_path}: rank(P_pair)={rank} {'OK' if rank == cfg.n_total else 'BAD'}")
        return EXIT_OK
    cfg = sc.network
    ps = build_pilots(cfg, sc.seed)
    write_matrix_text(out_path, ps.stacked)
    rank = numerical_rank(ps.stacked)
    want = cfg.n_total - cfg.n_min
    print(f"wrote {out_path}: rank(P)={rank} {'OK' if rank == want else 'BAD'}")
    for i, block in enumerate(ps.blocks):
        block_rank = numerical_rank(block)
        status = "OK" if block_rank == cfg.antennas[i] else "BAD"
        print(f"  rank(P_{i + 1})={block_rank} {status}")
    problems = validate_pilots(ps, cfg)
    if problems:
        print("rank audit problems: " + "; ".join(problems))
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_compare(sc: Scenario, out_path: str | None) -> int:
    if sc.scheme == "modified_two_user":
        c = sc.network
        cfg = NetworkConfig((c.n1, c.n2), c.n_eve, k2=c.k_total - c.n2)
        k2 = c.k_total - c.n2
    elif sc.scheme == "pairwise":
        cfg = sc.network
        p0 = cfg.m * (cfg.m - 1) // 2
        cfg = NetworkConfig(cfg.antennas, cfg.n_eve, k2=cfg.k2 * p0)
        k2 = cfg.k2
    else:
        cfg = sc.network
        k2 = cfg.k2
    try:
        table = compare_schemes(cfg, k2)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    lines = ["scheme,phase1_dof,phase2_dof,total_dof,phase1_slots,phase2_slots"]
    for row in table.rows:
        lines.append(
            f"{row.scheme},{row.phase1_dof},{row.phase2_dof},{row.total_dof},"
            f"{row.phase1_slots},{row.phase2_slots}"
        )
    _write_lines(lines, out_path)
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _parse_span(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition(":")
        return int(lo), int(hi)
    except ValueError as exc:
        raise ScenarioError(f"range must look like low:high, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anece-lab",
        description="DoF formula evaluation and empirical verification for ANECE schemes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_out: bool = True) -> None:
        p.add_argument("--scenario", required=True, help="path to a JSON scenario file")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--mc-samples", type=int, default=None,
                       help="override the scenario Monte Carlo sample count")
        if with_out:
            p.add_argument("--out", default=None, help="output file (default: stdout)")

    common(sub.add_parser("formula", help="print all formula values as JSON"), with_out=False)

    p_verify = sub.add_parser("verify", help="run the verification suite, emit CSV")
    common(p_verify)
    p_verify.add_argument("--allow-low-samples", action="store_true",
                          help="run slope checks even with an unreliable sample count")
    p_verify.add_argument("--inject-wrong-target", action="store_true", help=argparse.SUPPRESS)

    p_sweep = sub.add_parser("sweep", help="sweep one axis, emit one CSV row per value")
    common(p_sweep, with_out=False)
    p_sweep.add_argument("--axis", required=True, choices=("n_eve", "k2", "m"),
                         help="axis to sweep (k2 sweeps k_total for the modified scheme)")
    p_sweep.add_argument("--range", required=True, dest="span",
                         help="inclusive integer range low:high")
    p_sweep.add_argument("--out", required=True, help="output CSV file")

    p_pilots = sub.add_parser("pilots", help="generate pilot matrices and audit their ranks")
    common(p_pilots, with_out=False)
    p_pilots.add_argument("--out", required=True, help="output matrix file")

    common(sub.add_parser("compare", help="compare schemes at an equal slot budget"))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        sc = parse_scenario(args.scenario)
        if args.seed is not None:
            sc = replace(sc, seed=args.seed)
        if args.mc_samples is not None:
            if args.mc_samples < 1:
                raise ScenarioError("mc_samples: must be >= 1")
            sc = replace(sc, mc_samples=args.mc_samples)
        if args.command == "formula":
            return cmd_formula(sc)
        if args.command == "verify":
            return cmd_verify(sc, args.out, args.allow_low_samples, args.inject_wrong_target)
        if args.command == "sweep":
            return cmd_sweep(sc, args.axis, _parse_span(args.span), args.out)
        if args.command == "pilots":
            return cmd_pilots(sc, args.out)
        return cmd_compare(sc, args.out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
