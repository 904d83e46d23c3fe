"""Command-line front end.

Subcommands read a channel file (or a bundled channel name), run one
computation and write a CSV or JSON table. Every row carries a hash of the
configuration that produced it. Quantities are computed in nats; ``--bits``
rescales them at output time only.

Exit codes: 1 malformed input, 2 resource limit, 3 invariant violation,
4 numerical failure.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import numpy as np

from . import capacities, divergences, exponents, oneshot
from .channels import (DEFAULT_MAX_DIM, CQChannel, QuantumChannelChoi, channel_from_dict,
                       channel_to_dict, joint_state, load_channel, tensor_with_ideal_bit)
from .errors import (InvariantViolation, MalformedInputError, NumericalFailure,
                     ResourceLimitError)

COMMANDS = ("divergence", "capacity", "exponent-curve", "oneshot", "sandwich", "verify")
BUNDLED = {"noiseless-binary": "noiseless_binary.json", "bsc-0.1": "bsc_0.1.json"}
EXIT_CODES = {MalformedInputError: 1, ResourceLimitError: 2, InvariantViolation: 3,
              NumericalFailure: 4}
LN2 = math.log(2.0)

# columns holding information quantities (rescaled by --bits)
NAT_COLUMNS = {"umegaki", "petz", "sandwiched", "C_alpha", "r", "E", "rate_nats",
               "sdp_exponent", "ach_exponent_alpha_opt", "eans_formula", "eta"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise MalformedInputError(message)


def _float_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise MalformedInputError(f"bad number list {text!r}") from exc
    if not vals:
        raise MalformedInputError("empty list")
    return vals


def build_parser():
    parser = _Parser(prog="nscq", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--channel", required=True,
                        help="channel JSON file or bundled name (" + ", ".join(BUNDLED) + ")")
    parser.add_argument("--alpha", type=_float_list, help="comma-separated Renyi orders")
    parser.add_argument("--rates", type=_float_list, help="comma-separated rates in nats")
    parser.add_argument("--n", type=int, default=3, help="largest blocklength (sandwich)")
    parser.add_argument("--M", type=_float_list, help="comma-separated message counts")
    parser.add_argument("--eta", type=float, default=0.05, help="saddle-point rate offset")
    parser.add_argument("--tol", type=float, default=1e-5, help="tolerance of checks")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--bits", action="store_true", help="report quantities in bits")
    parser.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM,
                        help="cap on |X|^n d^n for tensor powers")
    parser.add_argument("--plot", help="write two-column gnuplot data to this file")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    return parser


def resolve_channel(spec):
    """Load a channel from a path or a bundled name."""
    if spec in BUNDLED:
        with resources.files("nscq.data").joinpath(BUNDLED[spec]).open() as fh:
            return channel_from_dict(json.load(fh))
    if not os.path.exists(spec):
        raise MalformedInputError(f"channel file {spec} not found")
    return load_channel(spec)


def config_hash(args, channel):
    """Short SHA-256 of the channel contents and every result-affecting option."""
    cfg = {k: getattr(args, k) for k in ("command", "alpha", "rates", "n", "M", "eta", "tol",
                                         "seed", "bits", "max_dim")}
    cfg["channel"] = channel_to_dict(channel)
    blob = json.dumps(cfg, sort_keys=True, default=float).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _check_args(args):
    if args.tol <= 0:
        raise MalformedInputError("--tol must be positive")
    if args.n < 1:
        raise MalformedInputError("--n must be at least 1")
    if args.eta < 0:
        raise MalformedInputError("--eta must be non-negative")
    if args.max_dim < 1 or args.workers < 1:
        raise MalformedInputError("--max-dim and --workers must be positive")
    for a in args.alpha or []:
        if args.command == "divergence":
            if not 0 < a < math.inf:
                raise MalformedInputError(f"divergence order {a} must be positive")
        elif not 0 <= a <= 1:
            raise MalformedInputError(f"alpha {a} outside [0, 1]")
    for r in args.rates or []:
        if r < 0:
            raise MalformedInputError(f"negative rate {r}")
    for m in args.M or []:
        if m < 1:
            raise MalformedInputError(f"message count {m} below 1")


def _require_cq(channel, command):
    if not isinstance(channel, CQChannel):
        raise MalformedInputError(f"{command} needs a cq or classical channel")


def _pmap(fn, items, workers):
    """Ordered map, in a process pool when it pays off."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def _dist(p):
    return ";".join(repr(round(float(v), 12)) for v in p)


# Worker functions live at module level so that they can be pickled.

def _capacity_row(job):
    channel, alpha, seed = job
    if alpha == 0:
        res = capacities.c0_capacity(channel)
        return {"alpha": alpha, "C_alpha": res.value, "argmax_p": _dist(res.argmax_p)}
    if alpha == 1:
        res = capacities.holevo_capacity(channel)
    else:
        res = capacities.renyi_capacity(channel, alpha, seed=seed)
    return {"alpha": alpha, "C_alpha": res.value, "argmax_p": _dist(res.argmax_p)}


def _curve_row(job):
    channel, r = job
    pt = exponents.eans_exponent(channel, r)
    return {"r": r, "E": pt.E, "alpha_star": pt.alpha_star, "p_star": _dist(pt.p_star)}


def _oneshot_rows(job):
    channel, m, max_dim = job
    rows = []
    if isinstance(channel, QuantumChannelChoi):
        sp = oneshot.eps_mc_quantum(m, channel)
        rec = oneshot.coding_record(channel.name, m, "eps_mc_quantum", sp.value, sp.p)
        return [rec]
    for kind in ("ns", "mc"):
        sol = oneshot.solve_coding_program(m, channel, kind)
        witness = np.concatenate([sol.p.astype(complex), np.ravel(sol.povm)])
        rows.append(oneshot.coding_record(channel.name, m, f"eps_{kind}", sol.eps, witness))
    sol = oneshot.solve_coding_program(2 * m, tensor_with_ideal_bit(channel), "ns")
    rows.append(oneshot.coding_record(channel.name, m, "eps_ns_activated", sol.eps,
                                      np.concatenate([sol.p.astype(complex),
                                                      np.ravel(sol.povm)])))
    return rows


def _sandwich_rows(job):
    channel, r, n, eta, max_dim = job
    rows = exponents.exponent_sandwich(channel, r, n, eta=eta, max_dim=max_dim)
    return [{"n": row.n, "rate_nats": row.rate_nats, "sdp_exponent": row.sdp_exponent,
             "ach_exponent_alpha_opt": row.ach_exponent_alpha_opt,
             "eans_formula": row.eans_formula, "eta": row.eta, "notes": row.notes,
             "sdp_value": row.sdp_value, "achievability_bound": row.achievability_bound,
             "spb_lower": row.spb_lower} for row in rows]


def cmd_divergence(channel, args):
    _require_cq(channel, "divergence")
    alphas = args.alpha or [0.5]
    rows = []
    k = channel.num_inputs
    for x in range(k):
        for y in range(k):
            if x == y:
                continue
            rho, sigma = channel.outputs[x], channel.outputs[y]
            rel = divergences.umegaki(rho, sigma)
            for a in alphas:
                if a <= 0:
                    raise MalformedInputError("divergence orders must be positive")
                rows.append({"x": x, "y": y, "alpha": a, "umegaki": rel,
                             "petz": divergences.petz(rho, sigma, a),
                             "sandwiched": (divergences.sandwiched(rho, sigma, a)
                                            if a >= 0.5 else math.nan)})
    return rows, None


def cmd_capacity(channel, args):
    _require_cq(channel, "capacity")
    alphas = args.alpha or [round(0.1 * i, 1) for i in range(1, 11)]
    rows = _pmap(_capacity_row, [(channel, a, args.seed) for a in alphas], args.workers)
    return rows, [("C_alpha", [(r["alpha"], r["C_alpha"]) for r in rows], False)]


def default_rates(channel, count=20):
    """``count`` equally spaced rates strictly inside ``(0, C)``."""
    c = capacities.holevo_capacity(channel).value
    return [float(v) for v in np.linspace(0.0, c, count + 2)[1:-1]]


def cmd_exponent_curve(channel, args):
    _require_cq(channel, "exponent-curve")
    rates = args.rates or default_rates(channel)
    rows = _pmap(_curve_row, [(channel, r) for r in rates], args.workers)
    vals = [r["E"] for r in rows]
    order = np.argsort(rates, kind="stable")
    sorted_vals = [vals[i] for i in order]
    for a, b in zip(sorted_vals, sorted_vals[1:]):
        if b > a + args.tol * max(1.0, abs(a)) and math.isfinite(a):
            raise InvariantViolation("exponent curve is not nonincreasing")
    return rows, [("E", [(r["r"], r["E"]) for r in rows], True)]


def cmd_oneshot(channel, args):
    ms = args.M or [2.0]
    if isinstance(channel, CQChannel):
        # the activated program has 2|X| inputs on 2d outputs
        size = 4 * channel.num_inputs * channel.dim
    else:
        size = channel.dim_in * channel.dim_out
    if size > args.max_dim:
        raise ResourceLimitError(f"problem size {size} exceeds --max-dim {args.max_dim}")
    groups = _pmap(_oneshot_rows, [(channel, m, args.max_dim) for m in ms], args.workers)
    return [row for g in groups for row in g], None


def cmd_sandwich(channel, args):
    _require_cq(channel, "sandwich")
    rates = args.rates or [0.5 * capacities.holevo_capacity(channel).value]
    jobs = [(channel, r, args.n, args.eta, args.max_dim) for r in rates]
    rows = [row for g in _pmap(_sandwich_rows, jobs, args.workers) for row in g]
    if all(row["notes"] == "skipped" for row in rows):
        raise ResourceLimitError("every sandwich row exceeds --max-dim")
    return rows, [("sdp_exponent", [(r["n"], r["sdp_exponent"]) for r in rows], False)]


def _verify_cq(channel, tol):
    """Invariant checks on a CQ channel: ``(name, deviation)`` pairs, zero is ideal."""
    checks = []
    m = 2.0
    ns = oneshot.solve_coding_program(m, channel, "ns")
    mc = oneshot.solve_coding_program(m, channel, "mc")
    checks.append(("ns_strong_duality",
                   abs(ns.eps - oneshot.eps_ns_dual_hermitian(m, channel).value)))
    checks.append(("mc_strong_duality", abs(mc.eps - oneshot.eps_mc_dual(m, channel).value)))
    checks.append(("activation_identity", oneshot.activation_identity_check(m, channel)[2]))
    checks.append(("mc_below_ns", max(0.0, mc.eps - ns.eps)))
    if channel.is_classical():
        checks.append(("classical_collapse", abs(ns.eps - mc.eps)))
    c0 = capacities.c0_capacity(channel).value
    ch_ = capacities.renyi_capacity(channel, 0.5).value
    c1 = capacities.holevo_capacity(channel).value
    checks.append(("capacity_order", max(0.0, c0 - ch_, ch_ - c1)))
    k = channel.num_inputs
    p = np.full(k, 1.0 / k)
    it = divergences.renyi_mutual_info(joint_state(p, channel), np.diag(p), (k, channel.dim),
                                       0.5)[0]
    checks.append(("sibson_identity", abs(it - capacities.sibson_objective(p, channel, 0.5))))
    rho, sigma = channel.outputs[0], channel.outputs[-1]
    pair = exponents.nussbaum_szkola(rho, sigma)
    lhs = float(np.sum(pair.p ** 0.5 * pair.q ** 0.5))
    checks.append(("nussbaum_szkola_identity",
                   abs(lhs - divergences.petz_quasi(rho, sigma, 0.5))))
    rates = [v for v in np.linspace(0.0, c1, 7)[1:-1] if v > c0 + 1e-9]
    vals = [exponents.eans_exponent(channel, r).E for r in rates]
    checks.append(("exponent_monotone",
                   max([0.0] + [b - a for a, b in zip(vals, vals[1:])])))
    r = 0.5 * c1
    if r > 0:
        row = exponents.exponent_sandwich(channel, r, 1)[0]
        checks.append(("sandwich_lower", max(0.0, row.spb_lower - row.sdp_value)))
        checks.append(("sandwich_upper", max(0.0, row.sdp_value - row.achievability_bound)))
    return checks


def _verify_choi(channel, tol):
    cq_like = oneshot.eps_mc_quantum(2.0, channel)
    gap = abs(oneshot.saddle_value_quantum(cq_like.p, cq_like.B, 2.0, channel) - cq_like.value)
    return [("quantum_saddle_value", gap)]


def cmd_verify(channel, args):
    if isinstance(channel, QuantumChannelChoi):
        checks = _verify_choi(channel, args.tol)
    else:
        checks = _verify_cq(channel, args.tol)
    rows = [{"check": name, "deviation": dev, "tol": args.tol,
             "status": "PASS" if dev <= args.tol else "FAIL"} for name, dev in checks]
    return rows, None


HANDLERS = {"divergence": cmd_divergence, "capacity": cmd_capacity,
            "exponent-curve": cmd_exponent_curve, "oneshot": cmd_oneshot,
            "sandwich": cmd_sandwich, "verify": cmd_verify}


def _scale(rows, bits):
    if not bits:
        return rows
    out = []
    for row in rows:
        new = {}
        for key, val in row.items():
            if key in NAT_COLUMNS and isinstance(val, float):
                val = val / LN2
            new[key.replace("_nats", "_bits")] = val
        out.append(new)
    return out


def _text(val):
    if isinstance(val, float):
        if math.isnan(val):
            return "nan"
        if math.isinf(val):
            return "inf" if val > 0 else "-inf"
        return repr(val)
    return str(val)


def _json_value(val):
    if isinstance(val, (float, np.floating)):
        val = float(val)
        return val if math.isfinite(val) else _text(val)
    if isinstance(val, np.integer):
        return int(val)
    return val


def render(rows, fmt, chash):
    """Serialize rows (each gets a ``config_hash`` column) to CSV or JSON text."""
    rows = [{**{k: (float(v) if isinstance(v, np.floating) else v) for k, v in r.items()},
             "config_hash": chash} for r in rows]
    if fmt == "json":
        return json.dumps([{k: _json_value(v) for k, v in r.items()} for r in rows],
                          indent=1) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _text(v) for k, v in r.items()})
    return buf.getvalue()


def render_plot(series, bits):
    """Gnuplot data: one ``# name`` block per series, non-finite points become gaps.

    Each series is ``(name, points, x_in_nats)``; ``y`` is always in nats.
    """
    lines = []
    for name, pts, x_nats in series:
        lines.append(f"# {name}")
        for x, y in pts:
            if bits:
                y = y / LN2
                x = x / LN2 if x_nats else x
            if not math.isfinite(y):
                lines.append("")
                continue
            lines.append(f"{_text(float(x))} {_text(float(y))}")
        lines.append("")
        lines.append("")
    return "\n".join(lines)


def run(argv=None):
    """Parse arguments, run the command and write the table.

    Returns:
        Process exit status.
    """
    args = build_parser().parse_args(argv)
    _check_args(args)
    channel = resolve_channel(args.channel)
    rows, series = HANDLERS[args.command](channel, args)
    text = render(_scale(rows, args.bits), args.format, config_hash(args, channel))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.plot and series:
        with open(args.plot, "w") as fh:
            fh.write(render_plot(series, args.bits))
    if args.command == "verify" and any(r["status"] == "FAIL" for r in rows):
        raise InvariantViolation("verify: " + ", ".join(r["check"] for r in rows
                                                        if r["status"] == "FAIL"))
    return 0


def main(argv=None):
    try:
        return run(argv)
    except tuple(EXIT_CODES) as exc:
        print(f"nscq: {exc}", file=sys.stderr)
        for cls, code in EXIT_CODES.items():
            if isinstance(exc, cls):
                return code
    return 4


if __name__ == "__main__":
    sys.exit(main())
