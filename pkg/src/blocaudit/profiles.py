"""Ballot data model and the ballot-removal algebra.

Candidate ids are dense indices 0..m-1. Rankings are tuples of ids ordered
from most to least preferred; a length-1 ranking is a bullet vote. All types
are immutable, so profiles can be shared freely across worker processes.

A profile stores its ballot types in canonical order (sorted by ranking) with
duplicate rankings merged. BallotSelection indices always refer to that
canonical order of a specific source profile.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError

INDEPENDENT_PARTY = "IND"


@dataclass(frozen=True)
class Candidate:
    id: int
    name: str
    party: str = INDEPENDENT_PARTY

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"candidate id must be non-negative, got {self.id}")
        if not self.name:
            raise ValueError("candidate name must be non-empty")
        if not self.party:
            raise ValueError(f"candidate {self.name!r} has an empty party tag")


@dataclass(frozen=True)
class BallotType:
    ranking: tuple[int, ...]
    multiplicity: int

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(self.ranking))
        if not self.ranking:
            raise ValueError("a ballot must rank at least one candidate")
        if len(set(self.ranking)) != len(self.ranking):
            raise ValueError(f"ranking {self.ranking} repeats a candidate")
        if self.multiplicity < 1:
            raise ValueError(
                f"multiplicity must be positive, got {self.multiplicity}"
            )

    @property
    def is_bullet(self) -> bool:
        return len(self.ranking) == 1

    @property
    def ranked_set(self) -> frozenset[int]:
        return frozenset(self.ranking)


@dataclass(frozen=True)
class PreferenceProfile:
    candidates: tuple[Candidate, ...]
    ballots: tuple[BallotType, ...]

    def __post_init__(self):
        candidates = tuple(self.candidates)
        ballots = tuple(sorted(self.ballots, key=lambda bt: bt.ranking))
        object.__setattr__(self, "candidates", candidates)
        object.__setattr__(self, "ballots", ballots)
        if not candidates:
            raise ValueError("a profile needs at least one candidate")
        for expected, cand in enumerate(candidates):
            if cand.id != expected:
                raise ValueError(
                    f"candidate ids must be dense 0..m-1; position {expected} "
                    f"holds id {cand.id}"
                )
        if not ballots:
            raise ValueError("a profile needs at least one ballot")
        m = len(candidates)
        for prev, bt in zip(ballots, ballots[1:]):
            if prev.ranking == bt.ranking:
                raise ValueError(f"duplicate ballot type {bt.ranking}")
        for bt in ballots:
            for cid in bt.ranking:
                if not 0 <= cid < m:
                    raise ValueError(
                        f"ranking {bt.ranking} references unknown candidate {cid}"
                    )

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def total_ballots(self) -> int:
        return sum(bt.multiplicity for bt in self.ballots)

    @classmethod
    def from_ballots(
        cls,
        candidates: Iterable[Candidate],
        rankings_with_counts: Iterable[tuple[Sequence[int], int]],
    ) -> "PreferenceProfile":
        """Build a profile, merging duplicate rankings by summing counts."""
        merged: dict[tuple[int, ...], int] = {}
        for ranking, count in rankings_with_counts:
            key = tuple(ranking)
            merged[key] = merged.get(key, 0) + count
        ballots = tuple(BallotType(r, c) for r, c in merged.items())
        return cls(tuple(candidates), ballots)


@dataclass(frozen=True)
class Election:
    profile: PreferenceProfile
    k: int
    title: str = ""

    def __post_init__(self):
        if not 1 <= self.k < self.profile.m:
            raise ValueError(
                f"seats must satisfy 1 <= k < m, got k={self.k}, m={self.profile.m}"
            )


@dataclass(frozen=True)
class BallotSelection:
    """A multiset of ballots drawn from a profile: (type index, count) pairs.

    Entries are kept sorted by index with zero counts dropped, so equal
    selections compare equal regardless of construction order.
    """

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        cleaned = []
        seen = set()
        for index, count in self.entries:
            if count < 0:
                raise ValueError(f"negative count {count} for ballot type {index}")
            if index < 0:
                raise ValueError(f"negative ballot type index {index}")
            if index in seen:
                raise ValueError(f"ballot type {index} appears twice in selection")
            seen.add(index)
            if count > 0:
                cleaned.append((index, count))
        object.__setattr__(self, "entries", tuple(sorted(cleaned)))

    @property
    def total(self) -> int:
        return sum(count for _, count in self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)


def _validate_selection(profile: PreferenceProfile, selection: BallotSelection):
    n = len(profile.ballots)
    for index, count in selection.entries:
        if index >= n:
            raise InputError(
                f"selection references ballot type {index}, profile has {n}"
            )
        if count > profile.ballots[index].multiplicity:
            raise InputError(
                f"selection takes {count} ballots of type {index}, "
                f"only {profile.ballots[index].multiplicity} exist"
            )


def ballots_ranking_only(
    profile: PreferenceProfile, allowed: Iterable[int]
) -> BallotSelection:
    """All ballot types, at full multiplicity, ranking only candidates in `allowed`."""
    allowed_set = frozenset(allowed)
    if not allowed_set:
        raise ValueError("allowed candidate set must be non-empty")
    entries = [
        (i, bt.multiplicity)
        for i, bt in enumerate(profile.ballots)
        if bt.ranked_set <= allowed_set
    ]
    return BallotSelection(tuple(entries))


def bullet_votes(profile: PreferenceProfile, candidate_id: int) -> BallotSelection:
    """The single-candidate ballot type for `candidate_id` (empty if none)."""
    entries = [
        (i, bt.multiplicity)
        for i, bt in enumerate(profile.ballots)
        if bt.ranking == (candidate_id,)
    ]
    return BallotSelection(tuple(entries))


def fraction_of(selection: BallotSelection, i: int, sigma: int) -> BallotSelection:
    """The i/sigma sub-selection, floor(total*i/sigma) ballots in all.

    Ballots are apportioned across types proportionally to their counts by
    largest remainder; remainder ties go to the lower ballot-type index.
    """
    if sigma < 1 or not 1 <= i <= sigma:
        raise ValueError(f"need 1 <= i <= sigma, got i={i}, sigma={sigma}")
    total = selection.total
    target = total * i // sigma
    if target == 0:
        return BallotSelection(())
    if target == total:
        return selection
    shares = [
        (index, count * target // total, count * target % total)
        for index, count in selection.entries
    ]
    leftover = target - sum(base for _, base, _ in shares)
    by_remainder = sorted(
        range(len(shares)), key=lambda j: (-shares[j][2], shares[j][0])
    )
    bumped = set(by_remainder[:leftover])
    entries = tuple(
        (index, base + (1 if j in bumped else 0))
        for j, (index, base, _) in enumerate(shares)
    )
    return BallotSelection(entries)


def remove_ballots(
    profile: PreferenceProfile, selection: BallotSelection
) -> PreferenceProfile:
    """The profile with the selected ballots taken out.

    Ballot types that reach zero are dropped; the candidate roster is kept
    unchanged even if a candidate ends with no remaining support.
    """
    _validate_selection(profile, selection)
    counts = dict(selection.entries)
    remaining = []
    for i, bt in enumerate(profile.ballots):
        left = bt.multiplicity - counts.get(i, 0)
        if left > 0:
            remaining.append(BallotType(bt.ranking, left))
    if not remaining:
        raise InputError("removing this selection would empty the profile")
    return PreferenceProfile(profile.candidates, tuple(remaining))


def selection_ranked_union(
    profile: PreferenceProfile, selection: BallotSelection
) -> frozenset[int]:
    """Every candidate ranked by at least one selected ballot."""
    _validate_selection(profile, selection)
    out: set[int] = set()
    for index, _ in selection.entries:
        out.update(profile.ballots[index].ranking)
    return frozenset(out)


def selection_ballots(
    profile: PreferenceProfile, selection: BallotSelection
) -> list[tuple[tuple[int, ...], int]]:
    """The selection as explicit (ranking, count) pairs."""
    _validate_selection(profile, selection)
    return [
        (profile.ballots[index].ranking, count)
        for index, count in selection.entries
    ]


def selection_from_rankings(
    profile: PreferenceProfile, items: Iterable[tuple[Sequence[int], int]]
) -> BallotSelection:
    """Build a selection from (ranking, count) pairs against this profile."""
    by_ranking = {bt.ranking: i for i, bt in enumerate(profile.ballots)}
    entries = []
    for ranking, count in items:
        key = tuple(ranking)
        if key not in by_ranking:
            raise InputError(f"profile has no ballot type with ranking {key}")
        entries.append((by_ranking[key], count))
    selection = BallotSelection(tuple(entries))
    _validate_selection(profile, selection)
    return selection


def make_election(
    names: Sequence[str],
    ballots: Iterable[tuple[Sequence[int], int]],
    k: int,
    parties: Sequence[str] | None = None,
    title: str = "",
) -> Election:
    """Convenience constructor: candidate names in id order plus (ranking, count) pairs."""
    if parties is None:
        parties = [INDEPENDENT_PARTY] * len(names)
    candidates = tuple(
        Candidate(i, name, party) for i, (name, party) in enumerate(zip(names, parties))
    )
    profile = PreferenceProfile.from_ballots(candidates, ballots)
    return Election(profile, k, title)
