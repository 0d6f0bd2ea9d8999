"""Command line front end: certification pipelines, coefficient tables,
name-separation diagnostics, the adversarial search, and character-sum
self-checks, all emitting versioned machine-readable reports.

Exit codes: 0 success/certified, 1 inconclusive, 2 falsification or
internal-consistency failure, 64 usage error.  Reports are deterministic
for a fixed configuration and seed apart from the timestamp field.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction

from .charsums import (
    autocorrelation,
    autocorrelation_closed_form,
    flatness_report,
    fourier_of_density_factor,
    gauss_sum,
    gauss_sum_all,
)
from .cocycle import CocycleContext, build_context
from .diagnostics import at_ball_bound, name_separation, write_histogram_csv
from .errors import BudgetError, CacheError, ConfigError, InternalConsistencyError
from .odometer import (
    EXPERIMENTAL,
    THEOREM_GRADE,
    GroupConfig,
    GroupElement,
    element,
    enumerate_level_group,
    is_prime,
    make_group_config,
    theorem_primes,
)
from .reporting import (
    SCHEMA,
    config_digest,
    render_report,
    timestamp,
    write_atomic,
)
from .spectral import (
    density_certificate,
    sbh_adversarial_search,
    sbh_verdict,
    spectral_coefficient_from_density,
    spectral_coefficients_cached,
)

EXIT_OK = 0
EXIT_INCONCLUSIVE = 1
EXIT_FALSIFIED = 2
EXIT_USAGE = 64


class UsageError(Exception):
    """Bad invocation or configuration; maps to exit code 64."""


@dataclass
class RunConfig:
    """Resolved run parameters: dataclass defaults, then config file
    entries, then command-line flags, later layers winning."""

    primes: tuple[int, ...] | None = None
    theorem: int | None = None
    level: int | None = None
    k_max: int = 4
    seed: int = 0
    budget: int = 500_000
    restarts: int = 32
    epsilon: Fraction | None = None
    split_level: int | None = None
    assume_tail_rule: bool = False
    tolerance_numeric: float = 1e-12
    tolerance_transcendental: float = 1e-9
    cache_dir: str | None = None
    format: str = "json"
    out: str | None = None
    histogram_out: str | None = None
    pmax: int = 200


def _parse_primes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"bad primes list {text!r}: {exc}") from None


def _parse_epsilon(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad epsilon {text!r}: {exc}") from None


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"bad boolean {text!r}")


_FIELD_PARSERS = {
    "primes": _parse_primes,
    "theorem": int,
    "level": int,
    "k_max": int,
    "seed": int,
    "budget": int,
    "restarts": int,
    "epsilon": _parse_epsilon,
    "split_level": int,
    "assume_tail_rule": _parse_bool,
    "tolerance_numeric": float,
    "tolerance_transcendental": float,
    "cache_dir": str,
    "format": str,
    "out": str,
    "histogram_out": str,
    "pmax": int,
}


def load_config_file(path: str) -> dict[str, object]:
    """Flat 'key = value' lines; # starts a comment; keys match the
    command-line flags."""
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    out: dict[str, object] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _FIELD_PARSERS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _FIELD_PARSERS[key](value.strip())
        except (ValueError, TypeError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


def build_run_config(args: argparse.Namespace) -> RunConfig:
    rc = RunConfig()
    if getattr(args, "config", None):
        rc = replace(rc, **load_config_file(args.config))
    overrides = {}
    for field in fields(RunConfig):
        value = getattr(args, field.name, None)
        if value is not None:
            overrides[field.name] = value
    rc = replace(rc, **overrides)
    if rc.level is not None and rc.level < 1:
        raise UsageError("level must be at least 1")
    if rc.k_max < 1:
        raise UsageError("k_max must be at least 1")
    if rc.tolerance_numeric <= 0 or rc.tolerance_transcendental <= 0:
        raise UsageError("tolerances must be positive")
    if rc.budget < 1:
        raise UsageError("budget must be positive")
    if rc.restarts < 0:
        raise UsageError("restarts must be nonnegative")
    if rc.format not in ("json", "csv"):
        raise UsageError(f"unknown format {rc.format!r}")
    return rc


def resolve_group_config(rc: RunConfig) -> GroupConfig:
    if rc.primes is not None and rc.theorem is not None:
        raise UsageError("give either --primes or --theorem, not both")
    if rc.theorem is not None:
        if rc.theorem < 1:
            raise UsageError("--theorem count must be at least 1")
        primes, mode = theorem_primes(rc.theorem), THEOREM_GRADE
    elif rc.primes is not None:
        primes, mode = rc.primes, EXPERIMENTAL
    else:
        raise UsageError("one of --primes or --theorem is required")
    try:
        return make_group_config(primes, mode)
    except ConfigError as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


def _config_echo(rc: RunConfig, cfg: GroupConfig | None) -> dict:
    return {
        "primes": list(cfg.primes) if cfg else None,
        "mode": cfg.mode if cfg else None,
        "level": rc.level,
        "k_max": rc.k_max,
        "seed": rc.seed,
        "budget": rc.budget,
        "restarts": rc.restarts,
        "epsilon": rc.epsilon,
        "split_level": rc.split_level,
        "assume_tail_rule": rc.assume_tail_rule,
        "tolerance_numeric": rc.tolerance_numeric,
        "tolerance_transcendental": rc.tolerance_transcendental,
        "cache_dir": rc.cache_dir,
        "format": rc.format,
        "pmax": rc.pmax,
    }


def _envelope(command: str, rc: RunConfig, cfg: GroupConfig | None, results: dict) -> dict:
    echo = _config_echo(rc, cfg)
    return {
        "schema": SCHEMA,
        "command": command,
        "config": echo,
        "config_digest": config_digest(echo),
        "timestamp": timestamp(),
        "results": results,
    }


def _vector(g: GroupElement, cfg: GroupConfig) -> list[int]:
    return list(g.vector(cfg.level))


def cmd_certify(rc: RunConfig, args: argparse.Namespace) -> tuple[dict, int]:
    """Flatness scan per prime, density certificate, final verdict."""
    cfg = resolve_group_config(rc)
    ctx = build_context(cfg, rc.cache_dir)
    flatness = []
    for p in cfg.primes:
        rep = flatness_report(p)
        flatness.append(
            {
                "prime": p,
                "min_modulus": rep.min_modulus,
                "max_modulus": rep.max_modulus,
                "window_low": 1.0 - 1.0 / math.sqrt(p),
                "window_high": 1.0 + 1.0 / math.sqrt(p),
                "delta_sign": rep.delta_sign,
                "op": "flatness_report",
            }
        )
    cert = density_certificate(
        ctx, split_level=rc.split_level, assume_tail_rule=rc.assume_tail_rule
    )
    verdict = sbh_verdict(
        ctx, split_level=rc.split_level, assume_tail_rule=rc.assume_tail_rule
    )
    results = {
        "flatness": flatness,
        "certificate": {
            "split_level": cert.split_level,
            "finite_sup": cert.finite_sup,
            "finite_window": cert.finite_window,
            "tail_bound": cert.tail_bound,
            "total_bound": cert.total_bound,
            "status": cert.status,
            "sbh_certified": cert.sbh_certified,
            "op": "density_certificate",
        },
        "verdict": {
            "verdict": verdict.verdict,
            "reasons": list(verdict.reasons),
            "assumptions": list(verdict.assumptions),
            "cited": list(verdict.cited),
            "op": "sbh_verdict",
        },
    }
    code = EXIT_OK if cert.sbh_certified else EXIT_INCONCLUSIVE
    return _envelope("certify", rc, cfg, results), code


def _parse_elements(specs: list[str], cfg: GroupConfig) -> list[GroupElement]:
    if not specs:
        specs = [f"level:{cfg.level}"]
    if len(specs) == 1 and specs[0].startswith("level:"):
        try:
            n = int(specs[0].split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad element spec {specs[0]!r}") from None
        if not 0 <= n <= cfg.level:
            raise UsageError(f"level {n} outside 0..{cfg.level}")
        return list(enumerate_level_group(n, cfg))
    out = []
    for spec in specs:
        try:
            residues = [int(part) for part in spec.split(",")]
        except ValueError:
            raise UsageError(f"bad element spec {spec!r}") from None
        if len(residues) > cfg.level:
            raise UsageError(
                f"element {spec!r} has {len(residues)} coordinates, "
                f"configuration has {cfg.level}"
            )
        try:
            out.append(element(residues, cfg))
        except ConfigError as exc:
            raise UsageError(f"bad element {spec!r}: {exc}") from None
    return out


def cmd_coeffs(rc: RunConfig, args: argparse.Namespace) -> tuple[dict, int]:
    """Exact and density-route coefficient table with the max discrepancy;
    disagreement beyond tolerance is an internal-consistency failure."""
    cfg = resolve_group_config(rc)
    ctx = build_context(cfg, rc.cache_dir)
    elements = _parse_elements(list(getattr(args, "elements", []) or []), cfg)
    exact = spectral_coefficients_cached(elements, ctx, rc.cache_dir)
    rows = []
    max_discrepancy = 0.0
    for coeff in exact:
        numeric = spectral_coefficient_from_density(coeff.element, ctx)
        discrepancy = abs(float(coeff.value) - numeric)
        max_discrepancy = max(max_discrepancy, discrepancy)
        rows.append(
            {
                "element": _vector(coeff.element, cfg),
                "rational": coeff.value,
                "numeric": numeric,
                "discrepancy": discrepancy,
            }
        )
    agree = max_discrepancy <= rc.tolerance_numeric
    results = {
        "rows": rows,
        "count": len(rows),
        "max_discrepancy": max_discrepancy,
        "tolerance_numeric": rc.tolerance_numeric,
        "routes_agree": agree,
        "op": "spectral_coefficient vs spectral_coefficient_from_density",
    }
    return _envelope("coeffs", rc, cfg, results), EXIT_OK if agree else EXIT_FALSIFIED


def cmd_names(rc: RunConfig, args: argparse.Namespace) -> tuple[dict, int]:
    """Name separation scan at the requested stage plus the ball bound."""
    cfg = resolve_group_config(rc)
    ctx = build_context(cfg, rc.cache_dir)
    n = rc.level if rc.level is not None else cfg.level
    if n > cfg.level:
        raise UsageError(f"level {n} exceeds the {cfg.level} configured primes")
    sep = name_separation(n, ctx)
    epsilon = rc.epsilon if rc.epsilon is not None else sep.delta_min / 4
    bound = at_ball_bound(n, epsilon, ctx, separation=sep)
    if bound == Fraction(1, 2):
        interpretation = (
            f"ball bound 1/2: no radius-{epsilon} ball around any word captures "
            "more than one name class, while an averaging approximation would "
            f"need nearly full mass in one ball (achieved mass stays <= 1/2 of the scaled budget)"
        )
    else:
        interpretation = (
            f"epsilon {epsilon} is not below delta_min/2 = {sep.delta_min / 2}; "
            "only the trivial bound applies"
        )
    results = {
        "level": n,
        "name_count": sep.name_count,
        "pair_count": sep.pair_count,
        "delta_min": sep.delta_min,
        "histogram": [
            {"distance": dist, "count": cnt} for dist, cnt in sep.histogram
        ],
        "epsilon_used": epsilon,
        "ball_bound": bound,
        "interpretation": interpretation,
        "op": "name_separation / at_ball_bound",
    }
    if rc.histogram_out:
        write_histogram_csv(sep, rc.histogram_out)
        results["histogram_file"] = rc.histogram_out
    return _envelope("names", rc, cfg, results), EXIT_OK


def cmd_sbh_search(rc: RunConfig, args: argparse.Namespace) -> tuple[dict, int]:
    """Adversarial quadratic-form search, best probe per subset size."""
    cfg = resolve_group_config(rc)
    ctx = build_context(cfg, rc.cache_dir)
    n = rc.level if rc.level is not None else 1
    if n > cfg.level:
        raise UsageError(f"level {n} exceeds the {cfg.level} configured primes")
    group_order = math.prod(cfg.primes[:n])
    k_cap = min(rc.k_max, group_order)
    per_k = []
    falsified = False
    best_entry = None
    for k in range(1, k_cap + 1):
        result = sbh_adversarial_search(
            n, k, ctx, budget=rc.budget, seed=rc.seed, restarts=rc.restarts
        )
        probe = result.probe
        entry = {
            "k": k,
            "value": probe.value,
            "value_float": float(probe.value),
            "theta": [_vector(g, cfg) for g in probe.theta],
            "signs": list(probe.signs),
            "mode": result.mode,
            "evaluations": result.evaluations,
            "falsification": probe.value >= 2,
            "op": "sbh_adversarial_search",
        }
        if probe.value >= 2:
            falsified = True
        if best_entry is None or probe.value > best_entry["value"]:
            best_entry = entry
        per_k.append(entry)
    results = {
        "level": n,
        "k_max_requested": rc.k_max,
        "k_max_effective": k_cap,
        "per_k": per_k,
        "best": best_entry,
        "falsification": falsified,
        "note": "search lower-bounds the density sup; it can never certify on its own",
    }
    return _envelope("sbh-search", rc, cfg, results), (
        EXIT_FALSIFIED if falsified else EXIT_OK
    )


def cmd_gauss_check(rc: RunConfig, args: argparse.Namespace) -> tuple[dict, int]:
    """Character-sum invariants over all odd primes up to pmax: Gauss sum
    formula vs direct summation, parity class, flatness window, and the
    two autocorrelation routes."""
    if rc.pmax < 3:
        raise UsageError("pmax must be at least 3")
    if rc.pmax > 2000:
        raise UsageError("pmax above 2000 is not supported (the sweep is quadratic per prime)")
    primes = [p for p in range(3, rc.pmax + 1) if is_prime(p)]
    max_gauss_err = 0.0
    max_parity_err = 0.0
    max_density_err = 0.0
    closed_form_ok = True
    worst_prime = None
    for p in primes:
        brute = gauss_sum_all(p)
        for x in range(1, p):
            err = abs(brute[x] - gauss_sum(p, x))
            if err > max_gauss_err:
                max_gauss_err = err
                worst_prime = p
            parity = abs(brute[x].imag) if p % 4 == 1 else abs(brute[x].real)
            max_parity_err = max(max_parity_err, parity)
        flatness_report(p)  # raises on a window violation
        for j in range(p):
            if autocorrelation(p, j) != autocorrelation_closed_form(p, j):
                closed_form_ok = False
            max_density_err = max(
                max_density_err,
                abs(float(autocorrelation(p, j)) - fourier_of_density_factor(p, j)),
            )
    ok = (
        max_gauss_err <= rc.tolerance_transcendental
        and max_parity_err <= rc.tolerance_transcendental
        and max_density_err <= rc.tolerance_numeric
        and closed_form_ok
    )
    results = {
        "pmax": rc.pmax,
        "primes_checked": len(primes),
        "max_gauss_error": max_gauss_err,
        "worst_prime": worst_prime,
        "max_parity_error": max_parity_err,
        "max_density_route_error": max_density_err,
        "closed_form_matches": closed_form_ok,
        "flatness_ok": True,
        "tolerance_transcendental": rc.tolerance_transcendental,
        "tolerance_numeric": rc.tolerance_numeric,
        "all_ok": ok,
        "op": "gauss_sum_all vs gauss_sum / flatness_report / autocorrelation routes",
    }
    return _envelope("gauss-check", rc, None, results), (
        EXIT_OK if ok else EXIT_FALSIFIED
    )


_COMMANDS = {
    "certify": cmd_certify,
    "coeffs": cmd_coeffs,
    "names": cmd_names,
    "sbh-search": cmd_sbh_search,
    "gauss-check": cmd_gauss_check,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D401 - argparse hook
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--primes", type=_parse_primes, help="comma-separated odd primes")
    common.add_argument("--theorem", type=int, help="use the first N growth-floor primes")
    common.add_argument("--level", type=int, help="stage / truncation level for the command")
    common.add_argument("--k-max", dest="k_max", type=int, help="largest probe size")
    common.add_argument("--seed", type=int, help="search seed")
    common.add_argument("--budget", type=int, help="probe budget for searches")
    common.add_argument("--restarts", type=int, help="local-search restarts")
    common.add_argument("--cache-dir", dest="cache_dir", help="directory for sign-table and coefficient caches")
    common.add_argument("--format", choices=("json", "csv"), help="report format")
    common.add_argument("--epsilon", type=_parse_epsilon, help="ball radius (rational, e.g. 1/20)")
    common.add_argument("--split-level", dest="split_level", type=int, help="certificate split point")
    common.add_argument(
        "--assume-tail-rule",
        dest="assume_tail_rule",
        action="store_true",
        default=None,
        help="assert the growth floor for coordinates past the split",
    )
    common.add_argument("--tolerance-numeric", dest="tolerance_numeric", type=float)
    common.add_argument("--tolerance-transcendental", dest="tolerance_transcendental", type=float)
    common.add_argument("--out", help="also write the report to this path")
    common.add_argument("--histogram-out", dest="histogram_out", help="write the distance histogram CSV here")
    common.add_argument("--pmax", type=int, help="prime range bound for gauss-check")

    parser = _Parser(prog="morsespec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("certify", parents=[common], help="flatness + density certificate + verdict")
    coeffs = sub.add_parser("coeffs", parents=[common], help="two-route coefficient table")
    coeffs.add_argument(
        "elements",
        nargs="*",
        help="elements as comma-separated residues, or a single 'level:n'",
    )
    sub.add_parser("names", parents=[common], help="name separation and ball bound")
    sub.add_parser("sbh-search", parents=[common], help="adversarial quadratic-form search")
    sub.add_parser("gauss-check", parents=[common], help="character-sum invariant sweep")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        rc = build_run_config(args)
        report, code = _COMMANDS[args.command](rc, args)
        text = render_report(report, rc.format)
        sys.stdout.write(text)
        if rc.out:
            write_atomic(rc.out, text)
        return code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CacheError, InternalConsistencyError) as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED


if __name__ == "__main__":
    sys.exit(main())
