"""Command-line interface.

Subcommands:

- tabulate: run one voting rule on one election file, print the round log.
- audit: run violation searches on one election file, emit JSON-lines.
- batch: audit a directory of election files with a worker pool, resumable,
  producing deterministic CSV reports.
- gen: write a worst-case construction as a canonical BLT plus a manifest.
- psc: print solid coalitions, quota constraints, compatible committees,
  and optionally the constrained scoring winner or a Hare-quota audit.

Exit codes: 0 success, 2 input problems (unreadable or malformed files, bad
parameters), 3 computation refusals (non-convergence, enumeration guards,
oracle budgets).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .criteria import (
    CRITERIA,
    SearchParams,
    check_ilvb,
    check_iwvb,
    check_iwvb_star,
    record_to_json,
    search_ilvb,
    search_iwvb,
    search_party_swaps,
)
from .errors import ComputationError, InputError
from .formats import load_election, serialize_blt
from .methods import (
    METHOD_TAGS,
    ScoringVector,
    droop_quota,
    result_to_json,
    tabulate,
)
from .profiles import Election, selection_ballots, selection_from_rankings
from .psc import (
    audit_hare_psc,
    constraint_to_json,
    enumerate_psc_committees,
    psc_constraints,
    qpsc_scoring_rule,
    solid_coalitions,
)
from .rationals import decimal_string, parse_rational, rational
from .worstcase import FAMILIES, GeneratorSpec, generate

AUDIT_METHODS = ("scottish", "meek", "ear", "cc-om", "cc-pm")
_CRITERION_FLAGS = {"ilvb": "ILVB", "iwvb": "IWVB", "iwvb-star": "IWVB_STAR"}
_REPORT_COLUMNS = ("scottish", "meek", "ear", "cc_om", "cc_pm")


def _parse_list(text: str, allowed: tuple[str, ...], label: str) -> list[str]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise InputError(f"empty {label} list")
    for item in items:
        if item not in allowed:
            raise InputError(
                f"unknown {label} {item!r}; expected one of {', '.join(allowed)}"
            )
    return items


def _parse_sv(text: str) -> ScoringVector:
    try:
        parts = tuple(parse_rational(p) for p in text.split(","))
    except ValueError as exc:
        raise InputError(f"cannot parse scoring vector {text!r}: {exc}") from exc
    return ScoringVector(parts)


def _election_id(path: Path) -> str:
    return path.stem


# ---------------------------------------------------------------- tabulate


def _render_rounds(election: Election, result) -> str:
    profile = election.profile
    names = {c.id: c.name for c in profile.candidates}
    winners, log = result
    lines = []
    title = election.title or "(untitled)"
    lines.append(f"{title}: {profile.m} candidates, {election.k} seats, "
                 f"{profile.total_ballots} ballots, method {log.method}")
    if log.quota is not None:
        lines.append(f"quota {decimal_string(log.quota)}")
    for rnd in log.rounds:
        header = f"round {rnd.number}"
        if rnd.threshold is not None:
            header += f" (rank threshold {rnd.threshold})"
        lines.append(header)
        for cid in sorted(rnd.totals):
            marks = [
                ev.kind for ev in rnd.events if ev.candidate == cid
            ]
            suffix = f"  [{', '.join(marks)}]" if marks else ""
            lines.append(
                f"  {names[cid]:<24}{decimal_string(rnd.totals[cid]):>14}{suffix}"
            )
    for note in log.notes:
        lines.append(f"note: {note}")
    winner_names = ", ".join(names[c] for c in sorted(winners.members))
    lines.append(f"winners: {winner_names}")
    if winners.tie_flag:
        lines.append("tie-break influenced the winner set (tie_flag set)")
    return "\n".join(lines)


def cmd_tabulate(args) -> int:
    election = load_election(args.path)
    sv = _parse_sv(args.sv) if args.sv else None
    result = tabulate(election, args.method, sv=sv)
    if args.json:
        print(json.dumps(result_to_json(election, result), indent=2))
    else:
        print(_render_rounds(election, result))
    return 0


# ------------------------------------------------------------------- audit


def _audit_one(election: Election, methods, criteria, params, party_swaps):
    """All violation records for one election, in a deterministic order."""
    records = []
    tied_methods = []
    for method in methods:
        base = tabulate(election, method)
        if base.winners.tie_flag:
            tied_methods.append(method)
        for criterion in criteria:
            if criterion == "ILVB":
                found = search_ilvb(election, method, params)
            else:
                found = search_iwvb(
                    election, method, params, star_mode=criterion == "IWVB_STAR"
                )
            records.extend(found)
            if party_swaps:
                records.extend(
                    search_party_swaps(election, method, params, criterion)
                )
    return records, tied_methods


def cmd_audit(args) -> int:
    election = load_election(args.path)
    methods = _parse_list(args.method, METHOD_TAGS, "method")
    criteria = [
        _CRITERION_FLAGS[c]
        for c in _parse_list(args.criteria, tuple(_CRITERION_FLAGS), "criterion")
    ]
    params = SearchParams(sigma_l=args.sigma_l, sigma_w=args.sigma_w)
    records, tied = _audit_one(
        election, methods, criteria, params, args.party_swaps
    )
    election_id = _election_id(Path(args.path))
    lines = [
        json.dumps(record_to_json(rec, election.profile, election_id))
        for rec in records
    ]
    if args.out:
        Path(args.out).write_text("".join(line + "\n" for line in lines))
    else:
        for line in lines:
            print(line)
    counts: dict[tuple[str, str], int] = {}
    for rec in records:
        counts[(rec.criterion, rec.method)] = counts.get(
            (rec.criterion, rec.method), 0
        ) + 1
    for (criterion, method), n in sorted(counts.items()):
        print(f"{criterion} {method}: {n}", file=sys.stderr)
    print(f"total records: {len(records)}", file=sys.stderr)
    for method in tied:
        print(f"note: base tabulation tied under {method}", file=sys.stderr)
    return 0


# ------------------------------------------------------------------- batch

_CONFIG_KEYS = (
    "methods",
    "criteria",
    "sigma_l",
    "sigma_w",
    "party_swaps",
    "workers",
    "q_mode",
)


def _parse_config(path: str) -> dict:
    cfg = {
        "methods": list(AUDIT_METHODS),
        "criteria": list(CRITERIA),
        "sigma_l": 10,
        "sigma_w": 3,
        "party_swaps": False,
        "workers": None,
        "q_mode": "droop",
    }
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise InputError(
                f"{path}:{line_no}: unknown key {key!r}; "
                f"expected one of {', '.join(_CONFIG_KEYS)}"
            )
        if key == "methods":
            cfg[key] = _parse_list(value, METHOD_TAGS, "method")
        elif key == "criteria":
            cfg[key] = [
                _CRITERION_FLAGS[c]
                for c in _parse_list(value, tuple(_CRITERION_FLAGS), "criterion")
            ]
        elif key in ("sigma_l", "sigma_w", "workers"):
            try:
                cfg[key] = int(value)
            except ValueError as exc:
                raise InputError(f"{path}:{line_no}: {key} must be an integer") from exc
        elif key == "party_swaps":
            if value not in ("true", "false"):
                raise InputError(f"{path}:{line_no}: party_swaps must be true or false")
            cfg[key] = value == "true"
        elif key == "q_mode":
            if value not in ("droop", "hare"):
                raise InputError(f"{path}:{line_no}: q_mode must be droop or hare")
            cfg[key] = value
    return cfg


def _batch_worker(task):
    """Audit one election file; returns plain data for cross-process transport."""
    path_str, cfg = task
    path = Path(path_str)
    out = {"election_id": _election_id(path), "records": [], "tied": [], "error": None}
    try:
        election = load_election(path)
        params = SearchParams(sigma_l=cfg["sigma_l"], sigma_w=cfg["sigma_w"])
        records, tied = _audit_one(
            election, cfg["methods"], cfg["criteria"], params, cfg["party_swaps"]
        )
        out["records"] = [
            record_to_json(rec, election.profile, out["election_id"])
            for rec in records
        ]
        out["tied"] = tied
    except (InputError, OSError, ComputationError) as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def _spot_check(record: dict, path: Path) -> bool:
    """Re-verify one JSON record from scratch through the public checks."""
    election = load_election(path)
    selection = selection_from_rankings(
        election.profile,
        [(tuple(entry["ranking"]), entry["count"]) for entry in record["removed"]],
    )
    check = {
        "ILVB": check_ilvb,
        "IWVB": check_iwvb,
        "IWVB_STAR": check_iwvb_star,
    }[record["criterion"]]
    fresh = check(election, record["method"], selection)
    return (
        fresh is not None
        and sorted(fresh.original_winners.members) == record["winners_before"]
        and sorted(fresh.modified_winners.members) == record["winners_after"]
    )


def cmd_batch(args) -> int:
    corpus = Path(args.dir)
    if not corpus.is_dir():
        raise InputError(f"not a directory: {corpus}")
    cfg = _parse_config(args.config) if args.config else _parse_config_default()
    out_dir = Path(args.out) if args.out else corpus / "audit_out"
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "records.jsonl"
    done_path = out_dir / "done.txt"
    errors_path = out_dir / "errors.txt"
    tied_path = out_dir / "tied.txt"

    files = sorted(
        [p for p in corpus.iterdir() if p.suffix in (".blt", ".csv")],
        key=lambda p: p.stem,
    )
    by_id: dict[str, Path] = {}
    dup_errors = []
    for p in files:
        if p.stem in by_id:
            dup_errors.append(f"{p}: duplicate election id {p.stem!r}")
        else:
            by_id[p.stem] = p

    done: set[str] = set()
    if args.resume and done_path.exists():
        done = set(done_path.read_text().split())
    else:
        for p in (records_path, done_path, errors_path, tied_path):
            if p.exists():
                p.unlink()

    pending = [p for eid, p in sorted(by_id.items()) if eid not in done]
    workers = args.workers or cfg["workers"] or int(
        os.environ.get("RCV_AUDIT_WORKERS", "1")
    )
    tasks = [(str(p), cfg) for p in pending]
    with records_path.open("a") as rec_f, done_path.open("a") as done_f, \
            errors_path.open("a") as err_f, tied_path.open("a") as tied_f:
        for line in dup_errors:
            err_f.write(line + "\n")
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(_batch_worker, tasks)
                for result in results:
                    _absorb_batch_result(result, rec_f, done_f, err_f, tied_f)
        else:
            for task in tasks:
                _absorb_batch_result(_batch_worker(task), rec_f, done_f, err_f, tied_f)

    all_records = []
    if records_path.exists():
        for line in records_path.read_text().splitlines():
            if line.strip():
                all_records.append(json.loads(line))
    _write_batch_reports(out_dir, all_records)

    checked = failures = 0
    for i, record in enumerate(sorted(
        all_records, key=lambda r: (r["election_id"], r["method"], r["criterion"])
    )):
        if i % 100 == 0 and record["election_id"] in by_id:
            checked += 1
            if not _spot_check(record, by_id[record["election_id"]]):
                failures += 1
                print(f"spot-check FAILED: {record}", file=sys.stderr)
    print(
        f"audited {len(pending)} elections ({len(done)} skipped as done); "
        f"{len(all_records)} records; spot-checked {checked}, "
        f"{failures} failures",
        file=sys.stderr,
    )
    return 0


def _parse_config_default() -> dict:
    return {
        "methods": list(AUDIT_METHODS),
        "criteria": list(CRITERIA),
        "sigma_l": 10,
        "sigma_w": 3,
        "party_swaps": False,
        "workers": None,
        "q_mode": "droop",
    }


def _absorb_batch_result(result, rec_f, done_f, err_f, tied_f):
    eid = result["election_id"]
    if result["error"]:
        err_f.write(f"{eid}: {result['error']}\n")
    for record in result["records"]:
        rec_f.write(json.dumps(record) + "\n")
    for method in result["tied"]:
        tied_f.write(f"{eid} {method}\n")
    done_f.write(eid + "\n")
    for f in (rec_f, done_f, err_f, tied_f):
        f.flush()


def _write_batch_reports(out_dir: Path, records: list[dict]):
    rows: dict[tuple[str, str, str], dict] = {}
    grid_elections: dict[tuple[str, str], set[str]] = {}
    for record in records:
        key = (record["election_id"], record["method"], record["criterion"])
        row = rows.setdefault(
            key, {"violations": 0, "party_swaps": 0}
        )
        row["violations"] += 1
        if record["party_swap"]:
            row["party_swaps"] += 1
        grid_elections.setdefault(
            (record["criterion"], record["method"]), set()
        ).add(record["election_id"])

    with (out_dir / "rows.csv").open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["election_id", "method", "criterion", "violations", "party_swaps"]
        )
        for (eid, method, criterion), row in sorted(rows.items()):
            writer.writerow(
                [eid, method, criterion, row["violations"], row["party_swaps"]]
            )

    with (out_dir / "report.csv").open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["criterion", *_REPORT_COLUMNS])
        for criterion in CRITERIA:
            cells = [
                len(grid_elections.get((criterion, col.replace("_", "-")), ()))
                for col in _REPORT_COLUMNS
            ]
            writer.writerow([criterion, *cells])


# --------------------------------------------------------------------- gen


def cmd_gen(args) -> int:
    family = args.family.upper().replace("-", "_")
    if family not in FAMILIES:
        raise InputError(
            f"unknown family {args.family!r}; expected one of "
            f"{', '.join(f.lower() for f in FAMILIES)}"
        )
    spec = GeneratorSpec(family, args.k, a=args.a, b=args.b, c=args.c)
    case = generate(spec)
    out = Path(args.out) if args.out else Path(f"{family.lower()}_k{args.k}.blt")
    out.write_text(serialize_blt(case.election))
    manifest = {
        "family": family,
        "k": args.k,
        "options": {
            key: value for key, value in case.options.items() if key != "sv"
        },
        "removal": [
            {"ranking": list(ranking), "count": count}
            for ranking, count in selection_ballots(
                case.election.profile, case.removal
            )
        ],
        "winners_before": sorted(case.winners_before),
        "winners_after": sorted(case.winners_after),
        "methods": list(case.methods),
    }
    if "sv" in case.options:
        manifest["options"]["sv"] = [str(x) for x in case.options["sv"].s]
    manifest_path = out.with_suffix(".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {out} and {manifest_path}")
    return 0


# --------------------------------------------------------------------- psc


def cmd_psc(args) -> int:
    election = load_election(args.path)
    v = election.profile.total_ballots
    if args.q_mode == "droop":
        q = rational(droop_quota(v, election.k))
    else:
        q = rational(v, election.k)
    print(f"quota ({args.q_mode}): {decimal_string(q)}")
    names = {c.id: c.name for c in election.profile.candidates}
    coalitions = solid_coalitions(election.profile)
    print(f"solid coalitions: {len(coalitions)}")
    for coalition in coalitions:
        members = ", ".join(names[c] for c in sorted(coalition.supported_set))
        print(f"  {{{members}}}: {coalition.size}")
    cset = psc_constraints(election.profile, election.k, q)
    print(f"binding constraints: {len(cset.constraints)}")
    for constraint in cset.constraints:
        members = ", ".join(names[c] for c in sorted(constraint.supported_set))
        print(f"  {{{members}}} (size {constraint.size}) requires {constraint.required}")
    committees = enumerate_psc_committees(election, q)
    print(f"compatible committees: {len(committees)}")
    if args.sv:
        sv = _parse_sv(args.sv)
        winners = qpsc_scoring_rule(election, q, sv)
        winner_names = ", ".join(names[c] for c in sorted(winners.members))
        tie = " (tie)" if winners.tie_flag else ""
        print(f"scoring winner: {winner_names}{tie}")
    if args.audit:
        result = tabulate(election, args.audit)
        bad = audit_hare_psc(election, result.winners)
        print(f"{len(bad)} violated constraints at the Hare quota "
              f"for {args.audit} winners")
        for constraint in bad:
            print(f"  {json.dumps(constraint_to_json(constraint))}")
    return 0


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocaudit",
        description="Multiwinner ranked-ballot tabulation and "
        "ballot-removal fairness audits, in exact arithmetic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tabulate", help="run one voting rule on one election file")
    p.add_argument("path")
    p.add_argument(
        "--method", "-m", default="scottish", choices=METHOD_TAGS,
        help="voting rule (default scottish)",
    )
    p.add_argument("--sv", help="positional scoring vector, e.g. '1,0.5,0.25'")
    p.add_argument("--json", action="store_true", help="emit the full round log as JSON")
    p.set_defaults(func=cmd_tabulate)

    p = sub.add_parser("audit", help="search one election for removal violations")
    p.add_argument("path")
    p.add_argument(
        "--method", "-m", default=",".join(AUDIT_METHODS),
        help="comma-separated methods (default all five)",
    )
    p.add_argument(
        "--criteria", default="ilvb,iwvb,iwvb-star",
        help="comma-separated criteria (default all three)",
    )
    p.add_argument("--sigma-l", type=int, default=10, dest="sigma_l")
    p.add_argument("--sigma-w", type=int, default=3, dest="sigma_w")
    p.add_argument("--party-swaps", action="store_true", dest="party_swaps")
    p.add_argument("--out", help="write JSON-lines here instead of stdout")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("batch", help="audit a directory of election files")
    p.add_argument("dir")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", help="output directory (default DIR/audit_out)")
    p.add_argument("--workers", type=int, help="worker processes "
                   "(default config, then RCV_AUDIT_WORKERS, then 1)")
    p.add_argument("--resume", action="store_true",
                   help="skip elections already in done.txt")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("gen", help="write a worst-case construction as BLT")
    p.add_argument("family", help="one of " + ", ".join(f.lower() for f in FAMILIES))
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--out", help="output BLT path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("psc", help="proportionality analysis of one election file")
    p.add_argument("path")
    p.add_argument("--q-mode", choices=("droop", "hare"), default="droop",
                   dest="q_mode")
    p.add_argument("--sv", help="scoring vector for the constrained scoring rule")
    p.add_argument("--audit", choices=METHOD_TAGS,
                   help="tabulate with this method and audit at the Hare quota")
    p.set_defaults(func=cmd_psc)

    for sp in sub.choices.values():
        sp.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
