"""The five multiwinner voting rules, in exact rational arithmetic.

Every tabulation returns a TabulationResult: a WinnerSet plus a RoundLog
holding per-round exact vote totals and the events that produced them.

Tie handling: every invocation of the deterministic tie-break rule (lowest
candidate id / lexicographically smallest committee) is recorded as a
TieEvent in the log. WinnerSet.tie_flag is raised only when some recorded
tie actually separated candidates into different final fates (one elected,
another not). A tie whose participants all won, or all lost, is bookkeeping
order and does not taint the outcome; it stays visible in the log either way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import (
    EnumerationGuardError,
    MeekNonConvergenceError,
    PreconditionError,
)
from .profiles import Election, PreferenceProfile
from .rationals import ONE, ZERO, decimal_string, rational

HOPEFUL = "hopeful"
ELECTED = "elected"
ELIMINATED = "eliminated"

METHOD_TAGS = ("scottish", "meek", "ear", "cc-om", "cc-pm", "positional")

MAX_ENUM_CANDIDATES = 20

MEEK_KEEP_DENOMINATOR = 10**18
DEFAULT_MEEK_MAX_ITERATIONS = 1000


@dataclass(frozen=True)
class WinnerSet:
    members: frozenset[int]
    tie_flag: bool = False


@dataclass(frozen=True)
class TieEvent:
    round: int
    kind: str  # "elimination" | "surplus_order" | "election" | "committee"
    tied: tuple[int, ...]
    chosen: tuple[int, ...]


@dataclass(frozen=True)
class RoundEvent:
    kind: str  # "elected" | "eliminated" | "surplus"
    candidate: int


@dataclass
class Round:
    number: int
    totals: dict[int, object]
    quota: object | None
    exhausted: object
    events: list[RoundEvent] = field(default_factory=list)
    threshold: int | None = None  # EAR rank threshold in force
    keep_factors: dict[int, object] | None = None  # Meek snapshot


@dataclass
class RoundLog:
    method: str
    quota: object | None  # initial quota (Meek/EAR refine per round)
    rounds: list[Round]
    tie_events: list[TieEvent]
    notes: tuple[str, ...] = ()


class TabulationResult(NamedTuple):
    winners: WinnerSet
    log: RoundLog


def _fate_tie_flag(tie_events: Iterable[TieEvent], winners: frozenset[int]) -> bool:
    """True when any tie-break separated candidates into different final fates."""
    for event in tie_events:
        fates = {c in winners for c in event.tied}
        if len(fates) > 1:
            return True
    return False


def droop_quota(total_ballots: int, k: int) -> int:
    """The integer quota floor(V/(k+1)) + 1."""
    return total_ballots // (k + 1) + 1


def exact_droop_quota(total_ballots: int, k: int):
    """The exact quota V/(k+1)."""
    return rational(total_ballots, k + 1)


def hare_quota(total_ballots: int, k: int):
    """The exact quota V/k."""
    return rational(total_ballots, k)


# ---------------------------------------------------------------------------
# Scottish STV


def scottish_stv(election: Election) -> TabulationResult:
    """Fractional-transfer STV with a fixed integer quota.

    One transfer action per round: distribute the largest pending surplus at
    value surplus/total per ballot, or eliminate the lowest hopeful at current
    values. Candidates at or above quota are elected at the top of each round
    and receive no further transfers; a distributed winner retains exactly the
    quota. Rounds snapshot totals before that round's action, matching the
    published votes-by-round layout.
    """
    profile = election.profile
    k = election.k
    quota = droop_quota(profile.total_ballots, k)

    ids = [c.id for c in profile.candidates]
    status = {cid: HOPEFUL for cid in ids}
    # parcels: (ranking, position of holder in ranking, ballot count, per-ballot value)
    piles: dict[int, list[tuple[tuple[int, ...], int, int, object]]] = {
        cid: [] for cid in ids
    }
    totals = {cid: ZERO for cid in ids}
    for bt in profile.ballots:
        first = bt.ranking[0]
        piles[first].append((bt.ranking, 0, bt.multiplicity, ONE))
        totals[first] += bt.multiplicity

    exhausted = ZERO
    elected: list[int] = []
    pending_surplus: list[int] = []
    rounds: list[Round] = []
    tie_events: list[TieEvent] = []

    def next_usable(ranking: tuple[int, ...], pos: int) -> int | None:
        for idx in range(pos + 1, len(ranking)):
            if status[ranking[idx]] == HOPEFUL:
                return idx
        return None

    def move_pile(cid: int, ratio) -> None:
        nonlocal exhausted
        for ranking, pos, count, value in piles[cid]:
            portion = value * ratio
            if portion == 0:
                continue
            idx = next_usable(ranking, pos)
            if idx is None:
                exhausted += count * portion
            else:
                target = ranking[idx]
                piles[target].append((ranking, idx, count, portion))
                totals[target] += count * portion
        piles[cid] = []

    number = 0
    while True:
        number += 1
        rnd = Round(number, dict(totals), quota, exhausted)
        rounds.append(rnd)

        open_seats = k - len(elected)
        crossers = sorted(
            (c for c in ids if status[c] == HOPEFUL and totals[c] >= quota),
            key=lambda c: (-totals[c], c),
        )
        if len(crossers) > open_seats:
            cutoff_value = totals[crossers[open_seats - 1]]
            if totals[crossers[open_seats]] == cutoff_value:
                tied = tuple(c for c in crossers if totals[c] == cutoff_value)
                chosen = tuple(c for c in crossers[:open_seats] if totals[c] == cutoff_value)
                tie_events.append(TieEvent(number, "election", tied, chosen))
            crossers = crossers[:open_seats]
        for c in crossers:
            status[c] = ELECTED
            elected.append(c)
            pending_surplus.append(c)
            rnd.events.append(RoundEvent("elected", c))
        if len(elected) == k:
            break

        hopefuls = [c for c in ids if status[c] == HOPEFUL]
        if len(hopefuls) == k - len(elected):
            for c in sorted(hopefuls):
                status[c] = ELECTED
                elected.append(c)
                rnd.events.append(RoundEvent("elected", c))
            break

        if pending_surplus:
            pending_surplus.sort(key=lambda c: (-(totals[c] - quota), c))
            top_surplus = totals[pending_surplus[0]] - quota
            tied = [c for c in pending_surplus if totals[c] - quota == top_surplus]
            if len(tied) > 1:
                tie_events.append(
                    TieEvent(number, "surplus_order", tuple(tied), (tied[0],))
                )
            c = pending_surplus.pop(0)
            surplus = totals[c] - quota
            if surplus > 0:
                move_pile(c, surplus / totals[c])
                totals[c] = rational(quota)
            rnd.events.append(RoundEvent("surplus", c))
        else:
            low_value = min(totals[c] for c in hopefuls)
            tied = sorted(c for c in hopefuls if totals[c] == low_value)
            if len(tied) > 1:
                tie_events.append(
                    TieEvent(number, "elimination", tuple(tied), (tied[0],))
                )
            c = tied[0]
            status[c] = ELIMINATED
            move_pile(c, ONE)
            totals[c] = ZERO
            rnd.events.append(RoundEvent("eliminated", c))

    members = frozenset(elected)
    winners = WinnerSet(members, _fate_tie_flag(tie_events, members))
    return TabulationResult(winners, RoundLog("scottish", quota, rounds, tie_events))


# ---------------------------------------------------------------------------
# Meek STV


def meek_stv(
    election: Election,
    tolerance=None,
    max_iterations: int = DEFAULT_MEEK_MAX_ITERATIONS,
) -> TabulationResult:
    """Keep-factor STV with a dynamic quota.

    Each ballot's weight flows down its ranking; candidate c retains keep[c]
    of whatever reaches them. The quota (V - exhausted)/(k+1) is recomputed
    every iteration; elected candidates' keep factors are rescaled by
    quota/votes until every elected total sits within tolerance of quota.
    Keep factors are quantized to denominator 1e18 per update so rational
    sizes stay bounded; the quantization error is far below the default
    tolerance of 1e-9. When no progress is possible the lowest hopeful is
    excluded. Fails loudly if max_iterations passes without convergence.
    """
    profile = election.profile
    k = election.k
    if tolerance is None:
        tolerance = rational(1, 10**9)
    total = profile.total_ballots

    ids = [c.id for c in profile.candidates]
    status = {cid: HOPEFUL for cid in ids}
    keep = {cid: ONE for cid in ids}
    ballots = [(bt.ranking, bt.multiplicity) for bt in profile.ballots]

    def quantize(x):
        return rational(
            x.numerator * MEEK_KEEP_DENOMINATOR // x.denominator,
            MEEK_KEEP_DENOMINATOR,
        )

    def distribute() -> tuple[dict[int, object], object]:
        totals = {cid: ZERO for cid in ids}
        exhausted = ZERO
        for ranking, mult in ballots:
            w = rational(mult)
            for cid in ranking:
                kf = keep[cid]
                if kf == 0:
                    continue
                take = w * kf
                totals[cid] += take
                w -= take
                if w == 0:
                    break
            exhausted += w
        return totals, exhausted

    elected: list[int] = []
    rounds: list[Round] = []
    tie_events: list[TieEvent] = []
    iteration = 0
    initial_quota = exact_droop_quota(total, k)

    while len(elected) < k:
        hopefuls = [c for c in ids if status[c] == HOPEFUL]
        open_seats = k - len(elected)
        if len(hopefuls) == open_seats:
            totals, exhausted = distribute()
            quota = (rational(total) - exhausted) / rational(k + 1)
            rnd = Round(
                len(rounds) + 1,
                totals,
                quota,
                exhausted,
                keep_factors=dict(keep),
            )
            for c in sorted(hopefuls):
                status[c] = ELECTED
                elected.append(c)
                rnd.events.append(RoundEvent("elected", c))
            rounds.append(rnd)
            break

        # Converge keep factors, electing crossers as they appear.
        while True:
            iteration += 1
            if iteration > max_iterations:
                raise MeekNonConvergenceError(max_iterations)
            totals, exhausted = distribute()
            quota = (rational(total) - exhausted) / rational(k + 1)
            rnd = Round(
                len(rounds) + 1,
                totals,
                quota,
                exhausted,
                keep_factors=dict(keep),
            )
            rounds.append(rnd)

            open_seats = k - len(elected)
            crossers = sorted(
                (c for c in ids if status[c] == HOPEFUL and totals[c] >= quota),
                key=lambda c: (-totals[c], c),
            )
            if len(crossers) > open_seats:
                cutoff_value = totals[crossers[open_seats - 1]]
                if totals[crossers[open_seats]] == cutoff_value:
                    tied = tuple(c for c in crossers if totals[c] == cutoff_value)
                    chosen = tuple(
                        c for c in crossers[:open_seats] if totals[c] == cutoff_value
                    )
                    tie_events.append(TieEvent(rnd.number, "election", tied, chosen))
                crossers = crossers[:open_seats]
            for c in crossers:
                status[c] = ELECTED
                elected.append(c)
                rnd.events.append(RoundEvent("elected", c))
            if len(elected) == k:
                break

            converged = not crossers and all(
                abs(totals[c] - quota) <= tolerance for c in elected
            )
            if converged:
                hopefuls = [c for c in ids if status[c] == HOPEFUL]
                low_value = min(totals[c] for c in hopefuls)
                tied = sorted(c for c in hopefuls if totals[c] == low_value)
                if len(tied) > 1:
                    tie_events.append(
                        TieEvent(rnd.number, "elimination", tuple(tied), (tied[0],))
                    )
                out = tied[0]
                status[out] = ELIMINATED
                keep[out] = ZERO
                rnd.events.append(RoundEvent("eliminated", out))
                break

            for c in elected:
                if totals[c] > 0:
                    scaled = quantize(keep[c] * quota / totals[c])
                    keep[c] = scaled if scaled < ONE else ONE

    members = frozenset(elected)
    winners = WinnerSet(members, _fate_tie_flag(tie_events, members))
    return TabulationResult(
        winners, RoundLog("meek", initial_quota, rounds, tie_events)
    )


# ---------------------------------------------------------------------------
# Expanding Approvals Rule


def ear(election: Election) -> TabulationResult:
    """Expanding approvals with the exact quota V/(k+1).

    A rank threshold j starts at 1. A candidate's support is the total weight
    of ballots ranking them at position <= j. While seats remain: elect the
    unelected candidate with the largest support at or above quota, rescaling
    supporting ballots by (support - quota)/support; if nobody qualifies,
    j grows. Should j pass the longest possible ranking with seats still
    open, the remaining seats go to the candidates with greatest support in
    turn, each election zeroing its supporters' weights.
    """
    profile = election.profile
    k = election.k
    m = profile.m
    quota = exact_droop_quota(profile.total_ballots, k)

    ids = [c.id for c in profile.candidates]
    rankings = [bt.ranking for bt in profile.ballots]
    weights = [rational(bt.multiplicity) for bt in profile.ballots]
    elected: list[int] = []
    rounds: list[Round] = []
    tie_events: list[TieEvent] = []
    notes: list[str] = []

    def supports(threshold: int | None) -> dict[int, object]:
        out = {cid: ZERO for cid in ids}
        for t, ranking in enumerate(rankings):
            w = weights[t]
            if w == 0:
                continue
            depth = len(ranking) if threshold is None else min(threshold, len(ranking))
            for cid in ranking[:depth]:
                out[cid] += w
        return out

    j = 1
    while len(elected) < k:
        if j <= m:
            support = supports(j)
            eligible = [
                c for c in ids if c not in elected and support[c] >= quota
            ]
            if not eligible:
                j += 1
                continue
            best_value = max(support[c] for c in eligible)
            tied = sorted(c for c in eligible if support[c] == best_value)
            if len(tied) > 1:
                tie_events.append(
                    TieEvent(len(rounds) + 1, "election", tuple(tied), (tied[0],))
                )
            chosen = tied[0]
            factor = (best_value - quota) / best_value
            for t, ranking in enumerate(rankings):
                if chosen in ranking[:j]:
                    weights[t] *= factor
            rnd = Round(
                len(rounds) + 1,
                support,
                quota,
                ZERO,
                events=[RoundEvent("elected", chosen)],
                threshold=j,
            )
            rounds.append(rnd)
            elected.append(chosen)
        else:
            if not notes:
                notes.append(
                    "rank thresholds exhausted; remaining seats filled by "
                    "greatest support with supporter weights zeroed"
                )
            support = supports(None)
            contenders = [c for c in ids if c not in elected]
            best_value = max(support[c] for c in contenders)
            tied = sorted(c for c in contenders if support[c] == best_value)
            if len(tied) > 1:
                tie_events.append(
                    TieEvent(len(rounds) + 1, "election", tuple(tied), (tied[0],))
                )
            chosen = tied[0]
            for t, ranking in enumerate(rankings):
                if chosen in ranking:
                    weights[t] = ZERO
            rnd = Round(
                len(rounds) + 1,
                support,
                quota,
                ZERO,
                events=[RoundEvent("elected", chosen)],
                threshold=j,
            )
            rounds.append(rnd)
            elected.append(chosen)

    members = frozenset(elected)
    winners = WinnerSet(members, _fate_tie_flag(tie_events, members))
    return TabulationResult(
        winners, RoundLog("ear", quota, rounds, tie_events, tuple(notes))
    )


# ---------------------------------------------------------------------------
# Chamberlin-Courant


def cc_score(profile: PreferenceProfile, committee: Iterable[int], model: str) -> int:
    """A committee's total representation score.

    Each ballot contributes m - r points, where r is the rank of its
    highest-ranked committee member. A ballot ranking t candidates, none in
    the committee, contributes m - t - 1 under the optimistic model ("om")
    and 0 under the pessimistic model ("pm").
    """
    if model not in ("om", "pm"):
        raise ValueError(f"model must be 'om' or 'pm', got {model!r}")
    members = frozenset(committee)
    if not members:
        raise ValueError("committee must be non-empty")
    m = profile.m
    score = 0
    for bt in profile.ballots:
        rank = None
        for pos, cid in enumerate(bt.ranking):
            if cid in members:
                rank = pos + 1
                break
        if rank is not None:
            score += bt.multiplicity * (m - rank)
        elif model == "om":
            score += bt.multiplicity * (m - len(bt.ranking) - 1)
    return score


def cc(
    election: Election, model: str
) -> tuple[WinnerSet, dict[tuple[int, ...], int]]:
    """Exact Chamberlin-Courant: argmax of cc_score over all size-k committees.

    Ties go to the lexicographically smallest id tuple, with the tie flag set.
    Refuses profiles with more than MAX_ENUM_CANDIDATES candidates.
    """
    profile = election.profile
    m = profile.m
    if m > MAX_ENUM_CANDIDATES:
        raise EnumerationGuardError(
            f"committee enumeration needs m <= {MAX_ENUM_CANDIDATES} candidates, got {m}"
        )
    table: dict[tuple[int, ...], int] = {}
    best: tuple[int, ...] | None = None
    best_score = 0
    tie = False
    for committee in itertools.combinations(range(m), election.k):
        score = cc_score(profile, committee, model)
        table[committee] = score
        if best is None or score > best_score:
            best, best_score, tie = committee, score, False
        elif score == best_score:
            tie = True
    assert best is not None
    return WinnerSet(frozenset(best), tie), table


# ---------------------------------------------------------------------------
# Positional committee scoring


@dataclass(frozen=True)
class ScoringVector:
    """Non-increasing positional scores s1 >= s2 >= ... >= 0 with s1 > 0.

    Positions beyond the vector's length score zero, so a short vector is
    shorthand for one padded with zeros; unranked candidates always score
    zero from a ballot (pessimistic processing).
    """

    s: tuple

    def __post_init__(self):
        values = tuple(self.s)
        object.__setattr__(self, "s", values)
        if not values:
            raise PreconditionError("scoring vector must be non-empty")
        if values[0] <= 0:
            raise PreconditionError("first score must be positive")
        for a, b in zip(values, values[1:]):
            if b > a:
                raise PreconditionError("scores must be non-increasing")
        if values[-1] < 0:
            raise PreconditionError("scores must be non-negative")


def borda_vector(m: int) -> ScoringVector:
    """(m-1, m-2, ..., 0)."""
    return ScoringVector(tuple(rational(m - i) for i in range(1, m + 1)))


def plurality_vector(m: int) -> ScoringVector:
    """(1, 0, ..., 0)."""
    return ScoringVector((ONE,) + (ZERO,) * (m - 1))


def positional_scores(
    profile: PreferenceProfile, sv: ScoringVector
) -> dict[int, object]:
    scores = {c.id: ZERO for c in profile.candidates}
    depth = len(sv.s)
    for bt in profile.ballots:
        for pos, cid in enumerate(bt.ranking[:depth]):
            scores[cid] += bt.multiplicity * sv.s[pos]
    return scores


def positional_committee(election: Election, sv: ScoringVector) -> WinnerSet:
    """The k candidates with the highest positional scores.

    Ordered by (score desc, id asc); the tie flag is set when the seat
    boundary splits candidates with equal scores.
    """
    profile = election.profile
    k = election.k
    scores = positional_scores(profile, sv)
    order = sorted(scores, key=lambda c: (-scores[c], c))
    tie = scores[order[k - 1]] == scores[order[k]]
    return WinnerSet(frozenset(order[:k]), tie)


# ---------------------------------------------------------------------------
# Dispatcher and JSON rendering


def tabulate(
    election: Election,
    method: str,
    *,
    sv: ScoringVector | None = None,
    tolerance=None,
    max_iterations: int = DEFAULT_MEEK_MAX_ITERATIONS,
) -> TabulationResult:
    """Run one of the five rules by tag; see METHOD_TAGS."""
    if method == "scottish":
        return scottish_stv(election)
    if method == "meek":
        return meek_stv(election, tolerance=tolerance, max_iterations=max_iterations)
    if method == "ear":
        return ear(election)
    if method in ("cc-om", "cc-pm"):
        winners, _ = cc(election, method[-2:])
        rnd = Round(1, {}, None, ZERO)
        rnd.events = [RoundEvent("elected", c) for c in sorted(winners.members)]
        return TabulationResult(winners, RoundLog(method, None, [rnd], []))
    if method == "positional":
        if sv is None:
            sv = borda_vector(election.profile.m)
        winners = positional_committee(election, sv)
        scores = positional_scores(election.profile, sv)
        rnd = Round(1, scores, None, ZERO)
        rnd.events = [RoundEvent("elected", c) for c in sorted(winners.members)]
        return TabulationResult(winners, RoundLog("positional", None, [rnd], []))
    raise PreconditionError(
        f"unknown method {method!r}; expected one of {METHOD_TAGS}"
    )


def result_to_json(election: Election, result: TabulationResult) -> dict:
    """A JSON-ready document: winners, quota trace, and per-round decimals.

    Exact values render as decimal strings truncated toward zero at five
    places.
    """
    profile = election.profile
    winners, log = result
    doc: dict = {
        "method": log.method,
        "title": election.title,
        "seats": election.k,
        "total_ballots": profile.total_ballots,
        "candidates": [
            {"id": c.id, "name": c.name, "party": c.party}
            for c in profile.candidates
        ],
        "winners": sorted(winners.members),
        "winner_names": [
            profile.candidates[c].name for c in sorted(winners.members)
        ],
        "tie_flag": winners.tie_flag,
        "quota": None if log.quota is None else decimal_string(log.quota),
        "rounds": [],
        "tie_events": [
            {
                "round": e.round,
                "kind": e.kind,
                "tied": list(e.tied),
                "chosen": list(e.chosen),
            }
            for e in log.tie_events
        ],
    }
    if log.notes:
        doc["notes"] = list(log.notes)
    for rnd in log.rounds:
        entry: dict = {
            "number": rnd.number,
            "quota": None if rnd.quota is None else decimal_string(rnd.quota),
            "exhausted": decimal_string(rnd.exhausted),
            "totals": {
                str(cid): decimal_string(value) for cid, value in rnd.totals.items()
            },
            "events": [
                {"kind": e.kind, "candidate": e.candidate} for e in rnd.events
            ],
        }
        if rnd.threshold is not None:
            entry["threshold"] = rnd.threshold
        if rnd.keep_factors is not None:
            entry["keep_factors"] = {
                str(cid): decimal_string(value, 9)
                for cid, value in rnd.keep_factors.items()
            }
        doc["rounds"].append(entry)
    return doc
