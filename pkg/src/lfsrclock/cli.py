"""``lfsrclock`` command-line front end.

Exit codes: 0 ok, 2 bound violation, 3 resource refusal, 4 bad arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, charsums, chi, clock, entanglement, gf2n, lfsr
from .errors import ResourceError, set_max_bytes
from .lfsr import LfsrSpec, PauliLabel
from .runio import RunManifest, stdout_json, write_csv, write_dict_rows, write_json

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_VIOLATION, EXIT_RESOURCE, EXIT_ARGS = 0, 2, 3, 4
DEFAULT_SEED = 1234
GLOBAL_KEYS = ("threads", "seed", "out_dir", "max_bytes")


class ArgumentError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_ARGS)


# ---------- argument helpers


def int_list(text: str) -> list[int]:
    try:
        return [int(x, 0) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def float_list(text: str) -> list[float]:
    try:
        return [parse_angle(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def parse_angle(text: str) -> float:
    """Float, or a multiple of ``pi`` such as ``pi``, ``-pi/2`` or ``0.5pi``."""
    t = str(text).strip().lower().replace(" ", "")
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    coef = num.replace("*", "").replace("pi", "")
    coef = {"": 1.0, "-": -1.0, "+": 1.0}.get(coef, None) if coef in ("", "-", "+") else float(coef)
    return coef * math.pi / (float(den) if den else 1.0)


def spec_from(args) -> LfsrSpec:
    if getattr(args, "taps", None):
        return LfsrSpec.from_taps(args.n, args.taps)
    return LfsrSpec.default(args.n)


def maximal_spec(args) -> LfsrSpec:
    return lfsr.require_maximal(spec_from(args))


def circuit_from(args, flux: float) -> clock.Circuit:
    if getattr(args, "circuit", None):
        text = args.circuit
        if text.endswith(".json"):
            data = json.loads(Path(text).read_text())
            data["chi"] = flux
            return clock.Circuit.from_json(data)
        if text.startswith("haar:") and text.count(":") == 1:
            text = f"{text}:{args.seed}"
        return clock.parse_circuit(text, flux)
    return clock.Circuit.from_lfsr(spec_from(args), flux)


def out_path(args, default_name: str) -> Path:
    if getattr(args, "out", None):
        p = Path(args.out)
        return p if p.is_absolute() or p.parent != Path(".") else Path(args.out_dir) / p
    return Path(args.out_dir) / default_name


def pmap(fn, items, threads: int):
    """Ordered map; results come back in input order whatever the pool size."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def tap_str(spec: LfsrSpec) -> str:
    return ",".join(map(str, spec.tap_list))


# ---------- field


def cmd_field_polys(args, man):
    polys = gf2n.find_primitive_polys(args.n, args.fixed_low)
    path = out_path(args, f"primitive_n{args.n}.csv")
    rows = [(p.degree, f"{p.coeff_mask:#x}", " ".join(map(str, p.taps))) for p in polys]
    man.record(write_csv(path, ("degree", "mask_hex", "taps"), rows))
    stdout_json({"n": args.n, "count": len(polys), "expected": gf2n.primitive_count(args.n) if not args.fixed_low else None})
    return EXIT_OK


def cmd_field_check(args, man):
    spec = spec_from(args)
    order = gf2n.x_order(spec.poly)
    stdout_json({"n": spec.n, "taps": list(spec.tap_list), "poly": str(spec.poly), "x_order": order,
                 "primitive": order == spec.order})
    return EXIT_OK if order == spec.order else EXIT_VIOLATION


def cmd_field_dlog(args, man):
    spec = spec_from(args)
    tab = gf2n.build_dlog_table(spec.poly)
    path = out_path(args, f"dlog_n{spec.n}.csv")
    man.record(write_csv(path, ("j", "element_hex"), ((j, f"{int(e):#x}") for j, e in enumerate(tab.forward))))
    stdout_json({"n": spec.n, "order": tab.order, "out": str(path)})
    return EXIT_OK


# ---------- lfsr


def cmd_lfsr_orbit(args, man):
    spec = spec_from(args)
    orb = lfsr.orbit(spec, args.start)
    path = out_path(args, f"orbit_n{spec.n}.csv")
    man.record(write_csv(path, ("j", "state_hex"), ((j, f"{int(z):#x}") for j, z in enumerate(orb))))
    maximal = len(orb) == spec.order
    stdout_json({"n": spec.n, "taps": list(spec.tap_list), "period": len(orb), "maximal": maximal, "out": str(path)})
    return EXIT_OK if maximal or not args.require_maximal else EXIT_VIOLATION


def cmd_lfsr_gates(args, man):
    spec = spec_from(args)
    gates = lfsr.staircase_gates(spec)
    if args.emit == "json":
        stdout_json([{"site": g.site, "cnot": g.cnot} for g in gates])
    else:
        w = sys.stdout
        w.write("site,cnot,kind\n")
        for g in gates:
            w.write(f"{g.site},{int(g.cnot)},{g.kind}\n")
    return EXIT_OK


def cmd_lfsr_table(args, man):
    rows = []
    for n, taps in sorted(lfsr.PUBLISHED_TAPS.items()):
        printed = LfsrSpec.from_taps(n, taps)
        used = LfsrSpec.published(n)
        rows.append((n, " ".join(map(str, taps)), lfsr.is_maximal(printed), " ".join(map(str, used.tap_list)),
                     lfsr.is_maximal(used)))
    path = out_path(args, "published_taps.csv")
    man.record(write_csv(path, ("n", "printed_taps", "printed_maximal", "used_taps", "used_maximal"), rows))
    stdout_json({"rows": len(rows), "corrections": {str(k): list(v) for k, v in lfsr.PUBLISHED_TAP_CORRECTIONS.items()}})
    return EXIT_OK


# ---------- chi


def cmd_mu_spectrum(args, man):
    """``chi mu-spectrum``: samples, histogram and summary for one ``q``."""
    spec = maximal_spec(args)
    n = spec.n
    limit = {"offdiagonal": 14, "diagonal": 16}[args.mode]
    if n > limit:
        raise ResourceError(f"{args.mode} sweep at n={n} (cap n={limit})", 0, 0)
    path = out_path(args, f"mu_n{n}_q{args.q}_{args.mode}.csv")
    rows_total = (1 + (1 << n)) * (spec.order - 1 if args.mode == "offdiagonal" else 1)
    write_samples = args.samples == "all" or (args.samples == "auto" and rows_total <= args.sample_cap)
    fh = None
    if write_samples:
        path.parent.mkdir(parents=True, exist_ok=True)
        fh = path.open("w", newline="")
        fh.write("rep_index,u_mask_hex,v_mask_hex,qprime,abs_mu\n")

    def sink(block):
        idx, us, vs, qps, mu = block
        mag = np.abs(mu)
        for r in range(mag.shape[0]):
            head = f"{int(idx[r])},{int(us[r]):#x},{int(vs[r]):#x},"
            fh.write("".join(f"{head}{int(qp)},{m:.12e}\n" for qp, m in zip(qps, mag[r])))

    try:
        sp = chi.mu_spectrum(spec, args.q, args.mode, args.method, sink=sink if fh else None)
    finally:
        if fh:
            fh.close()
    if write_samples:
        man.record(path)
    edges, dens = sp.density()
    hist_path = path.with_name(path.stem + "_hist.csv")
    man.record(write_csv(hist_path, ("bin_lo", "bin_hi", "density"), zip(edges[:-1], edges[1:], dens)))
    summary = sp.summary()
    summary.update({"taps": list(spec.tap_list), "method": args.method, "samples_written": write_samples,
                    "ks_note": "KS threshold is an empirical regression guard, not a proven bound",
                    "one_minus_max": 1 - sp.max_abs, "two_pow_1_minus_n": 2.0 ** (1 - n)})
    sum_path = path.with_name(path.stem + "_summary.json")
    man.record(write_json(sum_path, summary))
    stdout_json(summary)
    return EXIT_VIOLATION if sp.violations else EXIT_OK


def cmd_chi_element(args, man):
    spec = maximal_spec(args)
    label = PauliLabel(args.u, args.v)
    val = chi.pauli_matrix_element(spec, args.q, args.qp, label)
    bound = chi.element_bound(spec.n)
    stdout_json({"element": [val.real, val.imag], "abs": abs(val), "bound": bound, "mu": abs(val) / bound})
    return EXIT_OK if abs(val) <= bound * (1 + 1e-12) else EXIT_VIOLATION


def cmd_chi_bound(args, man):
    spec = maximal_spec(args)
    qs = list(range(1, spec.order))
    chunks = [qs[i::max(args.threads, 1)] for i in range(max(args.threads, 1))]
    parts = pmap(lambda c: chi.max_element_all_q(spec, args.method, c), chunks, args.threads)
    best = max(p[0] for p in parts)
    over = sum(p[1] for p in parts)
    res = {"n": spec.n, "taps": list(spec.tap_list), "max_element": best, "bound": chi.element_bound(spec.n),
           "max_mu": best / chi.element_bound(spec.n), "violations": over}
    man.record(write_json(out_path(args, f"element_bound_n{spec.n}.json"), res))
    stdout_json(res)
    return EXIT_VIOLATION if over else EXIT_OK


# ---------- charsum


def cmd_charsum_gauss(args, man):
    spec = maximal_spec(args)
    g = charsums.gauss_sums(spec, args.v)
    scale = 2 ** (spec.n / 2)
    path = out_path(args, f"gauss_n{spec.n}.csv")
    man.record(write_csv(path, ("r", "abs_over_2_pow_half_n"), ((r, abs(g[r]) / scale) for r in range(1, spec.order))))
    dev = float(np.max(np.abs(np.abs(g[1:]) / scale - 1)))
    res = {"n": spec.n, "max_dev": dev, "out": str(path)}
    if args.r is not None:
        val = charsums.gauss_sum(spec, args.r, args.v)
        res.update({"r": args.r, "G": [val.real, val.imag], "abs_over_2_pow_half_n": abs(val) / scale})
    stdout_json(res)
    return EXIT_OK if dev <= 1e-10 else EXIT_VIOLATION


def cmd_charsum_jacobi(args, man):
    spec = maximal_spec(args)
    order = spec.order
    g = charsums.gauss_sums(spec)
    js = charsums.jacobi_sums(spec, args.r2)
    rows = []
    for r1 in range(1, order):
        if (r1 + args.r2) % order == 0:
            continue
        rows.append((r1, abs(js[r1]), abs(js[r1] - g[r1] * g[args.r2] / g[(r1 + args.r2) % order])))
    path = out_path(args, f"jacobi_n{spec.n}_r2_{args.r2}.csv")
    man.record(write_csv(path, ("r1", "abs_J", "identity_residual"), rows))
    worst = max(r[2] for r in rows)
    stdout_json({"n": spec.n, "r2": args.r2, "max_identity_residual": worst, "out": str(path)})
    return EXIT_OK if worst <= 1e-10 else EXIT_VIOLATION


def cmd_charsum_mixed(args, man):
    spec = maximal_spec(args)
    val = charsums.mixed_sum(spec, args.q, args.qp, args.u, args.v)
    c = charsums.weil_constant(args.q, args.qp).C
    ratio = abs(val) / 2 ** (spec.n / 2)
    stdout_json({"sum": [val.real, val.imag], "abs_over_2_pow_half_n": ratio, "weil_C": c})
    return EXIT_OK if ratio <= c + 1e-9 else EXIT_VIOLATION


# ---------- clock


def cmd_clock_spectrum(args, man):
    circ = circuit_from(args, args.flux)
    n, M = circ.n, args.hands
    h = clock.build_periodic_single(circ) if M == 1 else clock.build_many_hand(circ, M)
    dense = np.linalg.eigvalsh(h)
    phases = [f.phase for f in clock.floquet_states(circ)]
    analytic = clock.analytic_single_spectrum(phases, n) if M == 1 else clock.analytic_many_spectrum(phases, n, M)
    diff = np.abs(dense - analytic)
    path = out_path(args, f"spectrum_n{n}_M{M}.csv")
    man.record(write_csv(path, ("index", "dense", "analytic", "abs_diff"), zip(range(dense.size), dense, analytic, diff)))
    stdout_json({"circuit": circ.label, "n": n, "M": M, "chi": circ.chi, "dim": int(dense.size),
                 "max_abs_diff": float(diff.max()), "out": str(path)})
    return EXIT_OK if diff.max() <= 1e-8 else EXIT_VIOLATION


SCAN_COLUMNS = ("n", "taps", "M", "chi", "state", "sector", "energy", "scar", "interval_start", "ell", "wrap",
                "renyi2", "vn", "slater_renyi2", "min_spin_renyi2", "bound_rhs", "volume_law_applies", "pass")


def cmd_clock_scan(args, man):
    rows, flagged, failures = [], [], 0
    for flux in args.flux:
        circ = circuit_from(args, flux)
        levels = entanglement.ranked_labels(circ, args.hands)
        for rank, (energy, labels) in enumerate(levels[: 1 + args.excited]):
            scar = any(f.label.startswith("scar") for f, _ in labels)
            if rank == 0 and scar:
                flagged.append(flux)
                sys.stderr.write(f"chi={flux:.6g}: " + entanglement.scar_diagnostic(labels, flux, args.hands)[1] + "\n")
            f, combo = labels[0]
            for r in entanglement.chain_rows(circ, f, combo, args.max_ell):
                ok = r["pass"] or scar
                failures += not ok
                rows.append((circ.n, circ.label, args.hands, flux, "ground" if rank == 0 else f"excited{rank}",
                             r["sector"], energy, scar, r["start"], r["ell"], r["wrap"], r["renyi2"], r["vn"],
                             r["slater_renyi2"], r["min_spin_renyi2"], r["chain_rhs"], r["volume_law_applies"], ok))
    path = out_path(args, "clock_scan.csv")
    man.record(write_csv(path, SCAN_COLUMNS, rows))
    stdout_json({"rows": len(rows), "scar_flux_flagged": flagged, "failures": failures, "out": str(path),
                 "volume_window_empty": entanglement.window_empty(rows[0][0]) if rows else None})
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_clock_gap(args, man):
    rows = []
    for n in args.n_list:
        spec = LfsrSpec.default(n)
        flux = math.pi / (2 * spec.order) if args.flux is None else args.flux
        rep = clock.spectral_gap(clock.Circuit.from_lfsr(spec, flux))
        rows.append((n, tap_str(spec), flux, rep.measured, rep.predicted, rep.measured * n * n, rep.ground_degeneracy))
    path = out_path(args, "gap_scaling.csv")
    man.record(write_csv(path, ("n", "taps", "chi", "gap", "predicted", "gap_times_n2", "ground_degeneracy"), rows))
    ns = [r[0] for r in rows]
    res = {"out": str(path), "ln4": math.log(4)}
    if len(rows) >= 2:
        res["exponent_raw"] = clock.fit_exponent(ns, [r[3] for r in rows])
        res["exponent_gap_times_n2"] = clock.fit_exponent(ns, [r[5] for r in rows])
    stdout_json(res)
    return EXIT_OK


def cmd_clock_flux_count(args, man):
    circ = circuit_from(args, 0.0)
    pts = clock.zero_energy_fluxes(circ)
    path = out_path(args, f"flux_scan_n{circ.n}.csv")
    man.record(write_csv(path, ("chi", "multiplicity", "ground"), ((p.chi, p.multiplicity, p.ground) for p in pts)))
    zero = [p for p in pts if abs(p.ground) < 1e-10]
    res = {"n": circ.n, "distinct_flux_values": len(zero), "count_with_multiplicity": sum(p.multiplicity for p in zero),
           "expected": 1 << circ.n, "out": str(path)}
    stdout_json(res)
    return EXIT_OK if res["count_with_multiplicity"] == res["expected"] else EXIT_VIOLATION


# ---------- entropy


def cmd_entropy_chi(args, man):
    spec = maximal_spec(args)
    n = spec.n
    if args.q:
        qs = args.q
    else:
        rng = np.random.Generator(np.random.Philox(args.seed))
        qs = sorted(int(x) for x in rng.choice(np.arange(1, spec.order), size=min(args.q_samples, spec.order - 1), replace=False))

    def one(q):
        out = []
        for ell in range(1, args.max_ell + 1):
            s2, vn = chi.chi_entropy(spec, q, list(range(ell)))
            bound = 2.0 ** (4 + 2 * ell - n)
            out.append((n, q, ell, s2, vn, ell * math.log(2) - vn, bound, ell * math.log(2) - vn <= bound))
        return out

    rows = [r for part in pmap(one, qs, args.threads) for r in part]
    path = out_path(args, f"chi_entropy_n{n}.csv")
    man.record(write_csv(path, ("n", "q", "ell", "renyi2", "vn", "deficit", "bound", "pass"), rows))
    bad = sum(not r[-1] for r in rows)
    stdout_json({"n": n, "samples": len(qs), "violations": bad, "out": str(path)})
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_entropy_ground(args, man):
    spec = maximal_spec(args)
    rep = entanglement.ground_state_report(spec, args.hands, args.flux, args.max_ell)
    cols = ("n", "taps", "M", "chi", "interval_start", "ell", "wrap", "renyi2", "vn", "bound_rhs", "pass")
    rows = [(spec.n, tap_str(spec), args.hands, args.flux, r["start"], r["ell"], r["wrap"], r["renyi2"], r["vn"],
             r["chain_rhs"], r["pass"]) for r in rep.rows]
    path = out_path(args, f"ground_n{spec.n}_M{args.hands}.csv")
    man.record(write_csv(path, cols, rows))
    detail = path.with_name(path.stem + "_terms.csv")
    man.record(write_dict_rows(detail, rep.rows))
    summary = {k: v for k, v in rep.to_json().items() if k != "rows"}
    summary["out"] = str(path)
    stdout_json(summary)
    if rep.scar:
        sys.stderr.write(rep.diagnostic + "\n")
        return EXIT_OK
    return EXIT_OK if all(r["pass"] for r in rep.rows) else EXIT_VIOLATION


def cmd_entropy_manyhand(args, man):
    circ = circuit_from(args, args.flux)
    n = circ.n
    rows = []
    fs = clock.floquet_states(circ)
    ks = clock.momenta(n)
    picks = fs[:: max(1, len(fs) // args.states)][: args.states]
    for f in picks:
        kl = list(ks[: args.hands])
        for iv in entanglement.LadderInterval.all(n):
            if iv.ell == 0:
                continue
            rep = entanglement.verify_manyhand_bound(circ, f, kl, iv)
            rows.append((n, circ.label, args.hands, circ.chi, f.label, iv.start, iv.ell, iv.wraps, rep.renyi2,
                         rep.von_neumann, rep.slater_renyi2 + rep.min_spin_renyi2, rep.holds))
    path = out_path(args, f"manyhand_bound_n{n}_M{args.hands}.csv")
    cols = ("n", "taps", "M", "chi", "sector", "interval_start", "ell", "wrap", "renyi2", "vn", "bound_rhs", "pass")
    man.record(write_csv(path, cols, rows))
    bad = sum(not r[-1] for r in rows)
    stdout_json({"rows": len(rows), "violations": bad, "out": str(path)})
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_entropy_variance(args, man):
    import itertools

    n = args.n
    rows = []
    for M in range(1, n):
        worst = math.inf
        for combo in itertools.combinations(range(n), M):
            kl = 2 * np.pi * np.array(combo) / n
            for ell in range(1, n // 2 + 1):
                worst = min(worst, entanglement.number_variance(kl, ell, n) - ell**2 / (2 * n * n))
        rows.append((n, M, worst, worst >= -1e-12))
    path = out_path(args, f"number_variance_n{n}.csv")
    man.record(write_csv(path, ("n", "M", "min_variance_minus_bound", "pass"), rows))
    bad = sum(not r[-1] for r in rows)
    stdout_json({"n": n, "violations": bad, "out": str(path)})
    return EXIT_VIOLATION if bad else EXIT_OK


# ---------- verify


def cmd_verify_all(args, man):
    from .verify import run_verify_all

    summary = run_verify_all(args.n, args.seed, Path(args.out_dir), args.taps)
    for p in summary["outputs"]:
        man.record(Path(p))
    man.extra["failures"] = len(summary["failures"])
    write_json(Path(args.out_dir) / "verify_summary.json", summary)
    stdout_json(summary)
    return EXIT_VIOLATION if summary["failures"] else EXIT_OK


# ---------- parser


def _spec_args(p, n_required=True, n_default=None):
    p.add_argument("--n", type=int, required=n_required and n_default is None, default=n_default)
    p.add_argument("--taps", type=int_list, default=None, help="comma-separated tap indices (default: built-in table)")


def build_parser() -> tuple[Parser, dict]:
    parser = Parser(prog="lfsrclock", description="LFSR chi states, character sums and clock Hamiltonians.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--max-bytes", type=int, default=None)
    parser.add_argument("--config", default=None, help="TOML file with defaults (see README)")
    top = parser.add_subparsers(dest="command", required=True, parser_class=Parser)
    leaves: dict = {}

    def group(name, help_text):
        g = top.add_parser(name, help=help_text)
        return g.add_subparsers(dest="action", required=True, parser_class=Parser)

    def leaf(sub, cmd, name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--out", default=None)
        leaves[(cmd, name)] = p
        return p

    g = group("field", "GF(2^n) arithmetic")
    p = leaf(g, "field", "polys", cmd_field_polys, "list primitive polynomials")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fixed-low", type=int_list, default=None)
    p = leaf(g, "field", "check", cmd_field_check, "check primitivity of taps")
    _spec_args(p)
    p = leaf(g, "field", "dlog", cmd_field_dlog, "write the discrete-log table")
    _spec_args(p)

    g = group("lfsr", "LFSR dynamics and gates")
    p = leaf(g, "lfsr", "orbit", cmd_lfsr_orbit, "orbit from the default seed")
    _spec_args(p)
    p.add_argument("--start", type=lambda s: int(s, 0), default=None)
    p.add_argument("--require-maximal", action="store_true")
    p = leaf(g, "lfsr", "gates", cmd_lfsr_gates, "staircase gate list")
    _spec_args(p)
    p.add_argument("--emit", choices=("json", "csv"), default="json")
    leaf(g, "lfsr", "table", cmd_lfsr_table, "built-in LFSR table with maximality")

    g = group("chi", "chi states and Pauli matrix elements")
    p = leaf(g, "chi", "mu-spectrum", cmd_mu_spectrum, "|mu| samples, histogram and KS summary")
    _spec_args(p)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--mode", choices=("offdiagonal", "diagonal"), default="offdiagonal")
    p.add_argument("--method", choices=("chirp", "numpy"), default="chirp")
    p.add_argument("--samples", choices=("auto", "all", "none"), default="auto")
    p.add_argument("--sample-cap", type=int, default=1 << 22)
    p = leaf(g, "chi", "element", cmd_chi_element, "one matrix element")
    _spec_args(p)
    for name in ("--q", "--qp"):
        p.add_argument(name, type=int, required=True)
    for name in ("--u", "--v"):
        p.add_argument(name, type=lambda s: int(s, 0), required=True)
    p = leaf(g, "chi", "bound", cmd_chi_bound, "exhaustive max element over all q")
    _spec_args(p)
    p.add_argument("--method", choices=("chirp", "numpy"), default="numpy")

    g = group("charsum", "Gauss, Jacobi and mixed character sums")
    p = leaf(g, "charsum", "gauss", cmd_charsum_gauss, "Gauss sums")
    _spec_args(p)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--v", type=lambda s: int(s, 0), default=None)
    p = leaf(g, "charsum", "jacobi", cmd_charsum_jacobi, "Jacobi sums and the Gauss identity")
    _spec_args(p)
    p.add_argument("--r2", type=int, default=1)
    p = leaf(g, "charsum", "mixed", cmd_charsum_mixed, "mixed character sum")
    _spec_args(p)
    for name in ("--q", "--qp"):
        p.add_argument(name, type=int, required=True)
    for name in ("--u", "--v"):
        p.add_argument(name, type=lambda s: int(s, 0), required=True)

    g = group("clock", "clock Hamiltonians")
    p = leaf(g, "clock", "spectrum", cmd_clock_spectrum, "dense versus analytic spectrum")
    _spec_args(p, n_required=False)
    p.add_argument("--circuit", default=None, help="lfsr:N:TAPS, haar:N[:SEED], identity:N or a JSON file")
    p.add_argument("--hands", type=int, default=1)
    p.add_argument("--flux", type=parse_angle, default=0.0)
    p = leaf(g, "clock", "scan", cmd_clock_scan, "entropy versus interval for ground and excited states")
    _spec_args(p, n_required=False)
    p.add_argument("--circuit", default=None)
    p.add_argument("--hands", type=int, default=1)
    p.add_argument("--flux", type=float_list, default=[math.pi])
    p.add_argument("--excited", type=int, default=1)
    p.add_argument("--max-ell", type=int, default=None)
    p = leaf(g, "clock", "gap", cmd_clock_gap, "spectral gap scaling")
    p.add_argument("--n-list", type=int_list, default=[4, 6, 8])
    p.add_argument("--flux", type=parse_angle, default=None, help="default pi/(2(2^n-1))")
    p = leaf(g, "clock", "flux-count", cmd_clock_flux_count, "count zero-energy flux values")
    _spec_args(p, n_required=False)
    p.add_argument("--circuit", default=None)

    g = group("entropy", "entanglement checks")
    p = leaf(g, "entropy", "chi", cmd_entropy_chi, "chi-state entropy deficit")
    _spec_args(p)
    p.add_argument("--q", type=int_list, default=None)
    p.add_argument("--q-samples", type=int, default=50)
    p.add_argument("--max-ell", type=int, default=4)
    p = leaf(g, "entropy", "ground", cmd_entropy_ground, "ground-state entropy chain")
    _spec_args(p)
    p.add_argument("--hands", type=int, default=2)
    p.add_argument("--flux", type=parse_angle, default=math.pi)
    p.add_argument("--max-ell", type=int, default=None)
    p = leaf(g, "entropy", "manyhand", cmd_entropy_manyhand, "many-hand Renyi-2 bound on all intervals")
    _spec_args(p, n_required=False)
    p.add_argument("--circuit", default=None)
    p.add_argument("--hands", type=int, default=2)
    p.add_argument("--flux", type=parse_angle, default=0.37)
    p.add_argument("--states", type=int, default=3)
    p = leaf(g, "entropy", "variance", cmd_entropy_variance, "number-variance lower bound sweep")
    p.add_argument("--n", type=int, required=True)

    g = group("verify", "invariant suites")
    p = leaf(g, "verify", "all", cmd_verify_all, "full desk-scale suite")
    _spec_args(p, n_default=6)
    return parser, leaves


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def apply_config(parser: Parser, leaves: dict, config: dict):
    """Top-level keys set global flags; ``[cmd]`` and ``[cmd.action]`` tables set command defaults."""
    glob = {k.replace("-", "_"): v for k, v in config.items() if not isinstance(v, dict)}
    unknown = set(glob) - set(GLOBAL_KEYS)
    if unknown:
        raise ArgumentError(f"unknown config keys: {sorted(unknown)}")
    parser.set_defaults(**glob)
    for (cmd, action), p in leaves.items():
        table = config.get(cmd, {})
        vals = {k.replace("-", "_"): v for k, v in table.items() if not isinstance(v, dict)}
        vals.update({k.replace("-", "_"): v for k, v in table.get(action, {}).items()})
        if vals:
            actions = {a.dest: a for a in p._actions}
            types = {k: a.type for k, a in actions.items()}
            bad = set(vals) - set(types)
            if bad:
                raise ArgumentError(f"unknown keys for '{cmd} {action}': {sorted(bad)}")
            for key, val in vals.items():
                # strings go through the option's own parser, e.g. "1,2" or "pi/2"
                if isinstance(val, str) and types[key] is not None:
                    try:
                        vals[key] = types[key](val)
                    except (ValueError, argparse.ArgumentTypeError) as exc:
                        raise ArgumentError(f"bad value for '{cmd} {action}' {key}: {exc}") from exc
            p.set_defaults(**vals)
            for key in vals:
                # a value from the config satisfies a required option
                actions[key].required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, leaves = build_parser()
    pre_parser = argparse.ArgumentParser(add_help=False)
    pre_parser.add_argument("--config", default=None)
    try:
        pre, _ = pre_parser.parse_known_args(argv)
        apply_config(parser, leaves, load_config(pre.config))
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ArgumentError, tomllib.TOMLDecodeError) as exc:
        sys.stderr.write(f"lfsrclock: config error: {exc}\n")
        return EXIT_ARGS
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    set_max_bytes(args.max_bytes)
    settings = {k: v for k, v in vars(args).items() if k not in ("func", "out_dir", "threads")}
    man = RunManifest.start(["lfsrclock", *argv], settings, args.seed)
    try:
        code = args.func(args, man)
    except ResourceError as exc:
        sys.stderr.write(json.dumps(exc.to_json()) + "\n")
        return EXIT_RESOURCE
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"lfsrclock: {exc}\n")
        return EXIT_ARGS
    if man.outputs:
        man.extra["exit_code"] = code
        man.finish(Path(args.out_dir), f"manifest_{args.command}_{args.action}.json")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
