"""Ballot-removal fairness checks and the heuristic searches that hunt for them.

Three criteria, each phrased as "removing this bloc of ballots must not do X":

- ILVB: ballots ranking only losers are removed; the winner set must not
  change at all.
- IWVB: ballots ranking only a proper subset of the winners are removed; no
  winner outside that subset may lose their seat.
- IWVB_STAR: same removals as IWVB, but a violation is only declared when
  every candidate the removed ballots ranked keeps a seat and the committee
  still changed.

check_* functions are the definitions verbatim: tabulate before and after,
apply the predicate, return a ViolationRecord or None. The search functions
are heuristics that build removal pools per target candidate, probe graded
fractions of each pool, and keep only records that re-verify through the
public check. oracle_ilvb exhaustively enumerates loser-only removals for
small instances and is the ground truth the heuristics are tested against.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from itertools import product
from typing import Callable, Iterable, Union

from .errors import OracleBudgetError, PreconditionError
from .methods import METHOD_TAGS, TabulationResult, WinnerSet, tabulate
from .profiles import (
    BallotSelection,
    Election,
    PreferenceProfile,
    ballots_ranking_only,
    fraction_of,
    remove_ballots,
    selection_ranked_union,
)

CRITERIA = ("ILVB", "IWVB", "IWVB_STAR")

DEFAULT_SIGMA_L = 10
DEFAULT_SIGMA_W = 3
DEFAULT_ORACLE_BUDGET = 200_000

# A tabulation method: either a tag understood by methods.tabulate, or a
# callable taking an Election and returning a TabulationResult. Callables may
# carry a `method_tag` attribute to name themselves in records.
MethodLike = Union[str, Callable[[Election], TabulationResult]]


@dataclass(frozen=True)
class SearchParams:
    """Granularity knobs for the heuristic searches.

    sigma_l and sigma_w set how many graded fractions of each removal pool
    are probed (the last fraction is always the whole pool). Tie-flagged
    tabulations make winner sets ambiguous, so results touching them are
    dropped unless discard_tied_results is cleared for diagnostics.
    """

    sigma_l: int = DEFAULT_SIGMA_L
    sigma_w: int = DEFAULT_SIGMA_W
    discard_tied_results: bool = True

    def __post_init__(self):
        if self.sigma_l < 1 or self.sigma_w < 1:
            raise PreconditionError(
                f"fraction counts must be >= 1, got sigma_l={self.sigma_l}, "
                f"sigma_w={self.sigma_w}"
            )


@dataclass(frozen=True)
class ViolationRecord:
    criterion: str
    method: str
    removed: BallotSelection
    original_winners: WinnerSet
    modified_winners: WinnerSet
    target_loser: int | None = None
    displaced_winner: int | None = None
    party_swap: bool = False

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise PreconditionError(
                f"unknown criterion {self.criterion!r}; expected one of {CRITERIA}"
            )
        if not self.removed:
            raise PreconditionError("a violation record needs a non-empty removal")


def _method_tag(method: MethodLike) -> str:
    if isinstance(method, str):
        if method not in METHOD_TAGS:
            raise PreconditionError(
                f"unknown method tag {method!r}; expected one of {METHOD_TAGS}"
            )
        return method
    return getattr(method, "method_tag", getattr(method, "__name__", "custom"))


def _run(method: MethodLike, election: Election) -> TabulationResult:
    if isinstance(method, str):
        return tabulate(election, method)
    return method(election)


def _without(election: Election, selection: BallotSelection) -> Election:
    return Election(
        remove_ballots(election.profile, selection), election.k, election.title
    )


def check_ilvb(
    election: Election, method: MethodLike, selection: BallotSelection
) -> ViolationRecord | None:
    """Apply the ILVB definition to one removal. None means no violation.

    The selection must rank only candidates that lose the original election;
    anything else is a precondition error, not a non-violation. Removing
    every ballot in the profile is rejected by the removal itself.
    """
    tag = _method_tag(method)
    if not selection:
        return None
    before = _run(method, election)
    winners = before.winners.members
    ranked = selection_ranked_union(election.profile, selection)
    offenders = ranked & winners
    if offenders:
        raise PreconditionError(
            f"ILVB removals must rank only losers; selection ranks winner(s) "
            f"{sorted(offenders)}"
        )
    after = _run(method, _without(election, selection))
    if after.winners.members == winners:
        return None
    return ViolationRecord(
        "ILVB", tag, selection, before.winners, after.winners
    )


def _iwvb_precheck(
    election: Election, selection: BallotSelection, winners: frozenset[int]
) -> frozenset[int]:
    ranked = selection_ranked_union(election.profile, selection)
    if not ranked <= winners or ranked == winners:
        raise PreconditionError(
            "IWVB removals must rank only a proper subset of the winners; "
            f"selection ranks {sorted(ranked)} against winners {sorted(winners)}"
        )
    return ranked


def check_iwvb(
    election: Election, method: MethodLike, selection: BallotSelection
) -> ViolationRecord | None:
    """Apply the IWVB definition to one removal. None means no violation.

    The selection's ranked union must be a proper subset of the original
    winners. A violation is any winner outside that union losing their seat.
    """
    tag = _method_tag(method)
    if not selection:
        return None
    before = _run(method, election)
    winners = before.winners.members
    ranked = _iwvb_precheck(election, selection, winners)
    after = _run(method, _without(election, selection))
    displaced = (winners - ranked) - after.winners.members
    if not displaced:
        return None
    return ViolationRecord(
        "IWVB",
        tag,
        selection,
        before.winners,
        after.winners,
        displaced_winner=min(displaced),
    )


def check_iwvb_star(
    election: Election, method: MethodLike, selection: BallotSelection
) -> ViolationRecord | None:
    """Apply the IWVB_STAR definition to one removal. None means no violation.

    Preconditions are as for check_iwvb. A violation requires that every
    candidate the removed ballots ranked keeps a seat, yet the committee
    still changed.
    """
    tag = _method_tag(method)
    if not selection:
        return None
    before = _run(method, election)
    winners = before.winners.members
    ranked = _iwvb_precheck(election, selection, winners)
    after = _run(method, _without(election, selection))
    if not ranked <= after.winners.members:
        return None
    if after.winners.members == winners:
        return None
    displaced = winners - after.winners.members
    return ViolationRecord(
        "IWVB_STAR",
        tag,
        selection,
        before.winners,
        after.winners,
        displaced_winner=min(displaced) if displaced else None,
    )


_CHECKS = {"ILVB": check_ilvb, "IWVB": check_iwvb, "IWVB_STAR": check_iwvb_star}


class _Prober:
    """Shared plumbing for one search run over one election.

    Caches the original tabulation and every probed modified tabulation by
    selection, so overlapping pools across targets do not repeat work.
    """

    def __init__(self, election: Election, method: MethodLike, params: SearchParams):
        self.election = election
        self.method = method
        self.tag = _method_tag(method)
        self.params = params
        self.before = _run(method, election)
        self.winners = self.before.winners.members
        self.losers = frozenset(range(election.profile.m)) - self.winners
        self._after: dict[BallotSelection, TabulationResult] = {}
        # key: (criterion, tag, removed) -> record, insertion-ordered
        self.found: dict[tuple, ViolationRecord] = {}

    def run_after(self, selection: BallotSelection) -> TabulationResult:
        cached = self._after.get(selection)
        if cached is None:
            cached = _run(self.method, _without(self.election, selection))
            self._after[selection] = cached
        return cached

    def usable(self, selection: BallotSelection) -> bool:
        return bool(selection) and selection.total < self.election.profile.total_ballots

    def keep(self, record: ViolationRecord):
        if self.params.discard_tied_results and (
            record.original_winners.tie_flag or record.modified_winners.tie_flag
        ):
            return
        key = (record.criterion, record.method, record.removed)
        self.found.setdefault(key, record)

    def verified_records(self) -> list[ViolationRecord]:
        """Re-run every found selection through its public check before returning."""
        out = []
        for record in self.found.values():
            fresh = _CHECKS[record.criterion](self.election, self.method, record.removed)
            if fresh is not None:
                out.append(
                    replace(
                        fresh,
                        target_loser=record.target_loser,
                        displaced_winner=record.displaced_winner,
                        party_swap=record.party_swap,
                    )
                )
        return out


def _graded_fractions(
    pool: BallotSelection, sigma: int
) -> Iterable[BallotSelection]:
    seen = set()
    for i in range(1, sigma + 1):
        part = fraction_of(pool, i, sigma)
        if part and part not in seen:
            seen.add(part)
            yield part


def search_ilvb(
    election: Election, method: MethodLike, params: SearchParams | None = None
) -> list[ViolationRecord]:
    """Probe loser-only removal pools for winner-set changes.

    For each loser B, the pool is every ballot ranking only losers other
    than B (so removals can starve B's rivals of transfers without touching
    B's own column), probed at sigma_l graded fractions.
    """
    params = params or SearchParams()
    prober = _Prober(election, method, params)
    for target in sorted(prober.losers):
        allowed = prober.losers - {target}
        if not allowed:
            continue
        pool = ballots_ranking_only(election.profile, allowed)
        for selection in _graded_fractions(pool, params.sigma_l):
            if not prober.usable(selection):
                continue
            after = prober.run_after(selection)
            if after.winners.members == prober.winners:
                continue
            prober.keep(
                ViolationRecord(
                    "ILVB",
                    prober.tag,
                    selection,
                    prober.before.winners,
                    after.winners,
                    target_loser=target,
                )
            )
    return prober.verified_records()


def _transfer_order(
    profile: PreferenceProfile, committee: Iterable[int], a: int, b: int
) -> list[int]:
    """Order committee members by how strongly their removal pools favor A over B.

    For each C the score counts ballots that rank C above both A and B and
    rank A above B, minus those ranking B above A. Unranked candidates sit
    below all ranked ones; ties break toward the lower candidate id.
    """
    scores: dict[int, int] = {c: 0 for c in committee}
    for bt in profile.ballots:
        pos = {cid: r for r, cid in enumerate(bt.ranking)}
        pa = pos.get(a)
        pb = pos.get(b)
        if pa is None and pb is None:
            continue
        if pa is None:
            cmp = -1  # only B ranked: B above A
            bar = pb
        elif pb is None:
            cmp = 1  # only A ranked: A above B
            bar = pa
        else:
            cmp = 1 if pa < pb else -1
            bar = min(pa, pb)
        for c in scores:
            pc = pos.get(c)
            if pc is not None and pc < bar:
                scores[c] += cmp * bt.multiplicity
    return sorted(scores, key=lambda c: (-scores[c], c))


def search_iwvb(
    election: Election,
    method: MethodLike,
    params: SearchParams | None = None,
    star_mode: bool = False,
) -> list[ViolationRecord]:
    """Probe winner-subset removal pools for displaced winners.

    For each pair of a winner A to displace and a loser B to promote, the
    other winners are ordered by how much their supporters' ballots favor A
    over B; pools are ballots ranking only a growing prefix of that order,
    probed at sigma_w graded fractions. star_mode applies the stricter
    IWVB_STAR predicate instead.
    """
    params = params or SearchParams()
    prober = _Prober(election, method, params)
    criterion = "IWVB_STAR" if star_mode else "IWVB"
    k = election.k
    if k < 2:
        return []
    for a in sorted(prober.winners):
        rest = sorted(prober.winners - {a})
        for b in sorted(prober.losers):
            order = _transfer_order(election.profile, rest, a, b)
            for depth in range(1, len(order) + 1):
                prefix = frozenset(order[:depth])
                pool = ballots_ranking_only(election.profile, prefix)
                for selection in _graded_fractions(pool, params.sigma_w):
                    if not prober.usable(selection):
                        continue
                    ranked = selection_ranked_union(election.profile, selection)
                    after = prober.run_after(selection)
                    w_after = after.winners.members
                    if star_mode:
                        hit = ranked <= w_after and w_after != prober.winners
                    else:
                        hit = bool((prober.winners - ranked) - w_after)
                    if not hit:
                        continue
                    displaced = (prober.winners - ranked) - w_after
                    prober.keep(
                        ViolationRecord(
                            criterion,
                            prober.tag,
                            selection,
                            prober.before.winners,
                            after.winners,
                            target_loser=b,
                            displaced_winner=(
                                a if a in displaced else min(displaced, default=None)
                            ),
                        )
                    )
    return prober.verified_records()


def _party_seats(election: Election, members: frozenset[int]) -> Counter:
    party = {c.id: c.party for c in election.profile.candidates}
    return Counter(party[m] for m in members)


def search_party_swaps(
    election: Election,
    method: MethodLike,
    params: SearchParams | None = None,
    criterion: str = "ILVB",
) -> list[ViolationRecord]:
    """Search for removals that move exactly one seat between two parties.

    Runs the chosen criterion's search shape for each (winner A, loser B)
    pair with A's and B's parties differing, but restricts every removal
    pool to ballots that rank nobody from either party. A record is kept
    only when A actually loses the seat, B gains one, and the two parties'
    seat counts move by exactly one in opposite directions. Candidates
    without a party are pooled under the shared independent tag.
    """
    if criterion not in CRITERIA:
        raise PreconditionError(
            f"unknown criterion {criterion!r}; expected one of {CRITERIA}"
        )
    params = params or SearchParams()
    prober = _Prober(election, method, params)
    profile = election.profile
    party = {c.id: c.party for c in profile.candidates}
    seats_before = _party_seats(election, prober.winners)
    star = criterion == "IWVB_STAR"

    for a in sorted(prober.winners):
        for b in sorted(prober.losers):
            if party[a] == party[b]:
                continue
            blocked = {
                cid for cid, p in party.items() if p in (party[a], party[b])
            }
            if criterion == "ILVB":
                pools = [(prober.losers - {b}) - blocked]
            else:
                rest = sorted(prober.winners - {a})
                order = [c for c in _transfer_order(profile, rest, a, b)]
                pools = [
                    frozenset(order[:depth]) - blocked
                    for depth in range(1, len(order) + 1)
                ]
            sigma = params.sigma_l if criterion == "ILVB" else params.sigma_w
            for allowed in pools:
                if not allowed:
                    continue
                pool = ballots_ranking_only(profile, allowed)
                for selection in _graded_fractions(pool, sigma):
                    if not prober.usable(selection):
                        continue
                    ranked = selection_ranked_union(profile, selection)
                    after = prober.run_after(selection)
                    w_after = after.winners.members
                    if criterion == "ILVB":
                        hit = w_after != prober.winners
                    elif star:
                        hit = ranked <= w_after and w_after != prober.winners
                    else:
                        hit = bool((prober.winners - ranked) - w_after)
                    if not hit:
                        continue
                    if a in w_after or b not in w_after:
                        continue
                    seats_after = _party_seats(election, w_after)
                    if (
                        seats_before[party[a]] - seats_after[party[a]] != 1
                        or seats_after[party[b]] - seats_before[party[b]] != 1
                    ):
                        continue
                    prober.keep(
                        ViolationRecord(
                            criterion,
                            prober.tag,
                            selection,
                            prober.before.winners,
                            after.winners,
                            target_loser=b,
                            displaced_winner=a,
                            party_swap=True,
                        )
                    )
    return prober.verified_records()


def oracle_ilvb(
    election: Election,
    method: MethodLike,
    max_budget: int = DEFAULT_ORACLE_BUDGET,
) -> list[ViolationRecord]:
    """Exhaustively test every loser-only removal. Ground truth, small inputs only.

    The search space is the product over loser-only ballot types of
    (multiplicity + 1) removal counts; if that exceeds max_budget the call
    refuses up front rather than running partially.
    """
    prober = _Prober(election, method, SearchParams(discard_tied_results=False))
    profile = election.profile
    loser_types = [
        (idx, bt.multiplicity)
        for idx, bt in enumerate(profile.ballots)
        if bt.ranked_set <= prober.losers
    ]
    budget = 1
    for _, mult in loser_types:
        budget *= mult + 1
        if budget > max_budget:
            raise OracleBudgetError(
                f"oracle space is {budget}+ removal vectors over "
                f"{len(loser_types)} loser-only ballot types, over the "
                f"budget of {max_budget}"
            )
    for counts in product(*(range(mult + 1) for _, mult in loser_types)):
        entries = tuple(
            (idx, c) for (idx, _), c in zip(loser_types, counts) if c > 0
        )
        if not entries:
            continue
        selection = BallotSelection(entries)
        if not prober.usable(selection):
            continue
        after = prober.run_after(selection)
        if after.winners.members == prober.winners:
            continue
        prober.keep(
            ViolationRecord(
                "ILVB", prober.tag, selection, prober.before.winners, after.winners
            )
        )
    return prober.verified_records()


def record_to_json(
    record: ViolationRecord, profile: PreferenceProfile, election_id: str = ""
) -> dict:
    """Flatten a record to the JSON-lines shape used by audit logs."""
    return {
        "election_id": election_id,
        "criterion": record.criterion,
        "method": record.method,
        "removed": [
            {"ranking": list(profile.ballots[idx].ranking), "count": count}
            for idx, count in record.removed.entries
        ],
        "winners_before": sorted(record.original_winners.members),
        "winners_after": sorted(record.modified_winners.members),
        "party_swap": record.party_swap,
    }
