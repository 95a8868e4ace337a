"""mRNA secondary-structure QUBO construction.

The decision variable is a quartet: two consecutive base pairs (i, j) and
(i+1, j-1). Selected quartets earn their stacking free energy, consecutive
quartets sharing a base pair earn an extra reward r, and incompatible
quartets (sharing a base with different partners, or crossing) pay a large
penalty t that makes every infeasible assignment worse than any feasible one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    EmptyInput,
    IllegalCharacter,
    InfeasibleInput,
    LengthMismatch,
    MissingEnergyEntry,
    NonPositivePenalty,
)

ALPHABET = frozenset("AUCG")

WC_PAIRS = frozenset({"AU", "UA", "CG", "GC"})
WOBBLE_PAIRS = frozenset({"GU", "UG"})

DEFAULT_MIN_HAIRPIN = 3
DEFAULT_ALLOW_GU = True


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sequence:
    """A normalized RNA sequence (uppercase, alphabet {A, U, C, G})."""

    bases: str
    id: str

    def __len__(self) -> int:
        return len(self.bases)

    def __getitem__(self, pos: int) -> str:
        """Base at 1-based position."""
        return self.bases[pos - 1]


def parse_sequence(text: str, id: str = "seq") -> Sequence:
    """Normalize raw sequence text: case-fold, map T to U, strip whitespace.

    Raises EmptyInput on blank input and IllegalCharacter (with the 1-based
    position) on anything outside {A, U, C, G, T}.
    """
    stripped = "".join(text.split())
    if not stripped:
        raise EmptyInput("sequence text is empty")
    bases = []
    for pos, ch in enumerate(stripped.upper(), start=1):
        if ch == "T":
            ch = "U"
        if ch not in ALPHABET:
            raise IllegalCharacter(pos, ch)
        bases.append(ch)
    return Sequence(bases="".join(bases), id=id)


def parse_sequence_text(text: str, default_id: str = "seq") -> Sequence:
    """Parse plain or FASTA-like text (lines starting '>' set the id).

    The first record is returned when the text holds several.
    """
    seq_id = default_id
    body_lines: list[str] = []
    for line in text.splitlines():
        if line.startswith(">"):
            if body_lines:
                break  # keep only the first record
            seq_id = line[1:].strip() or seq_id
        else:
            body_lines.append(line)
    return parse_sequence("".join(body_lines), id=seq_id)


def load_sequence(path: str | Path) -> Sequence:
    """Read a sequence from a plain-text or FASTA-like file."""
    return parse_sequence_text(Path(path).read_text(), default_id=Path(path).stem)


def benchmark_sequence(name: str) -> Sequence:
    """Load one of the bundled benchmark sequences (e.g. ``seq_50``)."""
    ref = resources.files("pcefold.data.sequences").joinpath(f"{name}.txt")
    return parse_sequence_text(ref.read_text(), default_id=name)


BENCHMARK_NAMES = (
    "seq_50", "seq_80", "seq_120", "seq_152", "seq_195", "seq_240",
    "seq_694", "seq_715", "seq_745",
)


# ---------------------------------------------------------------------------
# Quartets and relations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Quartet:
    """Two consecutive base pairs (i, j) and (i+1, j-1), 1-based positions."""

    i: int
    j: int
    index: int
    stack_type: str  # outer pair then inner pair, e.g. "GCAU"

    @property
    def pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.i, self.j), (self.i + 1, self.j - 1)

    @property
    def outer_pair_type(self) -> str:
        return self.stack_type[:2]


def _valid_pairs(allow_gu: bool) -> frozenset[str]:
    return WC_PAIRS | WOBBLE_PAIRS if allow_gu else WC_PAIRS


def enumerate_quartets(
    seq: Sequence,
    min_hairpin: int = DEFAULT_MIN_HAIRPIN,
    allow_gu: bool = DEFAULT_ALLOW_GU,
) -> list[Quartet]:
    """All quartets of ``seq`` whose outer and inner pairs are both valid
    and whose inner pair encloses at least ``min_hairpin`` unpaired bases.

    Indices are assigned densely in lexicographic (i, j) order, so the
    numbering is stable for a given sequence and settings.
    """
    if min_hairpin < 0:
        raise ValueError("min_hairpin must be >= 0")
    valid = _valid_pairs(allow_gu)
    bases = seq.bases
    L = len(bases)
    quartets: list[Quartet] = []
    for i in range(1, L + 1):
        # inner loop needs (j-1)-(i+1)-1 >= min_hairpin
        for j in range(i + 3 + min_hairpin, L + 1):
            outer = bases[i - 1] + bases[j - 1]
            inner = bases[i] + bases[j - 2]
            if outer in valid and inner in valid:
                quartets.append(
                    Quartet(i=i, j=j, index=len(quartets), stack_type=outer + inner)
                )
    return quartets


@dataclass
class RelationSets:
    """Pairwise relations between quartet variables.

    conflicts: unordered index pairs that cannot both be selected.
    stackings: unordered index pairs forming a longer helix (shared pair).
    ua_terminal: indices of quartets whose outer pair is UA or AU.
    """

    conflicts: set[tuple[int, int]] = field(default_factory=set)
    stackings: set[tuple[int, int]] = field(default_factory=set)
    ua_terminal: set[int] = field(default_factory=set)


def _pairs_incompatible(pa: tuple[int, int], pb: tuple[int, int]) -> bool:
    """True when two distinct base pairs share a base or cross."""
    if pa == pb:
        return False
    a1, a2 = pa
    b1, b2 = pb
    if a1 in (b1, b2) or a2 in (b1, b2):
        return True
    return (a1 < b1 < a2 < b2) or (b1 < a1 < b2 < a2)


def quartets_conflict(qa: Quartet, qb: Quartet) -> bool:
    return any(_pairs_incompatible(pa, pb) for pa in qa.pairs for pb in qb.pairs)


def quartets_stacked(qa: Quartet, qb: Quartet) -> bool:
    """True when one quartet extends the other by one pair (shared pair)."""
    return (qb.i == qa.i + 1 and qb.j == qa.j - 1) or (
        qa.i == qb.i + 1 and qa.j == qb.j - 1
    )


def build_relations(quartets: list[Quartet]) -> RelationSets:
    rel = RelationSets()
    for a, qa in enumerate(quartets):
        if qa.outer_pair_type in ("UA", "AU"):
            rel.ua_terminal.add(a)
        for b in range(a + 1, len(quartets)):
            qb = quartets[b]
            if quartets_stacked(qa, qb):
                rel.stackings.add((a, b))
            elif quartets_conflict(qa, qb):
                rel.conflicts.add((a, b))
    return rel


# ---------------------------------------------------------------------------
# Stacking energy table
# ---------------------------------------------------------------------------

def load_energy_table(path: str | Path | None = None) -> dict[str, float]:
    """Stacked-pair free energies keyed by outer+inner pair type.

    Defaults to the bundled nearest-neighbor table. The table is
    configuration: any mapping from 4-character pair types to reals works.
    """
    if path is None:
        ref = resources.files("pcefold.data").joinpath("stacking_energies.json")
        raw = json.loads(ref.read_text())
    else:
        raw = json.loads(Path(path).read_text())
    return {k: float(v) for k, v in raw.items() if not k.startswith("_")}


# ---------------------------------------------------------------------------
# QUBO assembly
# ---------------------------------------------------------------------------

@dataclass
class QuboInstance:
    """Symmetric QUBO matrix plus the relation sets it was built from."""

    m: int
    Q: np.ndarray
    relations: RelationSets
    coeffs: dict[str, float]
    quartets: list[Quartet]
    sequence_id: str
    length: int

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        if self.Q.shape != (self.m, self.m):
            raise LengthMismatch(f"Q must be {self.m}x{self.m}")
        # cached conflict arrays for fast feasibility checks
        conf = sorted(self.relations.conflicts)
        self._conf_a = np.array([a for a, _ in conf], dtype=np.intp)
        self._conf_b = np.array([b for _, b in conf], dtype=np.intp)

    def conflict_neighbors(self) -> list[np.ndarray]:
        """Adjacency lists of the conflict graph (index -> conflicting ids)."""
        adj: list[list[int]] = [[] for _ in range(self.m)]
        for a, b in self.relations.conflicts:
            adj[a].append(b)
            adj[b].append(a)
        return [np.array(sorted(nbrs), dtype=np.intp) for nbrs in adj]


def default_stacking_reward(energies: np.ndarray) -> float:
    return -0.5 * float(np.mean(np.abs(energies))) if len(energies) else 0.0


def dominant_penalty(energies: np.ndarray, r: float, n_stackings: int) -> float:
    """Penalty weight large enough that one violation outweighs every
    possible reward: sum of |e_q| plus |r| per stacking, plus one."""
    return float(np.sum(np.abs(energies))) + abs(r) * n_stackings + 1.0


def assemble_qubo(
    quartets: list[Quartet],
    relations: RelationSets,
    energy_table: dict[str, float],
    r: float | None = None,
    p: float = 0.0,
    t: float | None = None,
    sequence_id: str = "",
    length: int = 0,
) -> QuboInstance:
    """Assemble the symmetric QUBO matrix.

    Diagonal entries carry the quartet energies (plus the uniform linear
    shift p*|QUA| when the UA-end term is enabled); each unordered related
    pair (a, b) splits its weight evenly across Q[a][b] and Q[b][a] so that
    x^T Q x reproduces the intended pair contribution exactly once.
    """
    m = len(quartets)
    energies = np.empty(m)
    for q in quartets:
        if q.stack_type not in energy_table:
            raise MissingEnergyEntry(q.stack_type)
        energies[q.index] = energy_table[q.stack_type]

    if r is None:
        r = default_stacking_reward(energies)
    if r > 0:
        raise ValueError("stacking reward r must be <= 0")
    if p < 0:
        raise NonPositivePenalty("UA-end weight p must be >= 0")
    if t is None:
        t = dominant_penalty(energies, r, len(relations.stackings))
    if t <= 0:
        raise NonPositivePenalty("crossing penalty t must be > 0")

    Q = np.zeros((m, m))
    np.fill_diagonal(Q, energies)
    n_ua = len(relations.ua_terminal)
    if p != 0.0 and n_ua:
        Q[np.diag_indices(m)] += p * n_ua
        for a in range(m):
            for b in relations.ua_terminal:
                if a != b:
                    Q[a, b] -= p / 2
                    Q[b, a] -= p / 2
    for a, b in relations.stackings:
        Q[a, b] += r / 2
        Q[b, a] += r / 2
    for a, b in relations.conflicts:
        Q[a, b] += t / 2
        Q[b, a] += t / 2

    return QuboInstance(
        m=m,
        Q=Q,
        relations=relations,
        coeffs={"r": float(r), "p": float(p), "t": float(t)},
        quartets=quartets,
        sequence_id=sequence_id,
        length=length,
    )


def build_instance(
    seq: Sequence,
    min_hairpin: int = DEFAULT_MIN_HAIRPIN,
    allow_gu: bool = DEFAULT_ALLOW_GU,
    energy_table: dict[str, float] | None = None,
    r: float | None = None,
    p: float = 0.0,
    t: float | None = None,
) -> QuboInstance:
    """Full pipeline from sequence to QuboInstance."""
    if energy_table is None:
        energy_table = load_energy_table()
    quartets = enumerate_quartets(seq, min_hairpin=min_hairpin, allow_gu=allow_gu)
    relations = build_relations(quartets)
    return assemble_qubo(
        quartets, relations, energy_table, r=r, p=p, t=t,
        sequence_id=seq.id, length=len(seq),
    )


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _check_bits(inst: QuboInstance, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (inst.m,):
        raise LengthMismatch(f"expected {inst.m} bits, got shape {x.shape}")
    return x.astype(float)


def qubo_energy(inst: QuboInstance, x) -> float:
    """x^T Q x under the symmetric convention: a set pair (a, b) contributes
    Q[a][b] + Q[b][a]."""
    xf = _check_bits(inst, x)
    return float(xf @ inst.Q @ xf)


def marginal_gains(inst: QuboInstance, x) -> np.ndarray:
    """Energy change of switching each currently-unset bit on:
    delta_i = Q_ii + 2 * sum_{j set} Q_ij. Entries at set bits are not
    meaningful."""
    xf = _check_bits(inst, x)
    return np.diag(inst.Q) + 2.0 * (inst.Q @ xf)


def is_feasible(inst: QuboInstance, x) -> bool:
    """True iff no conflicting pair has both bits set."""
    xb = np.asarray(x)
    if xb.shape != (inst.m,):
        raise LengthMismatch(f"expected {inst.m} bits, got shape {xb.shape}")
    if len(inst._conf_a) == 0:
        return True
    xb = xb.astype(bool)
    return not bool(np.any(xb[inst._conf_a] & xb[inst._conf_b]))


def selected_pairs(inst: QuboInstance, x) -> set[tuple[int, int]]:
    """Base pairs implied by the selected quartets (shared pairs once)."""
    pairs: set[tuple[int, int]] = set()
    for q in inst.quartets:
        if x[q.index]:
            pairs.update(q.pairs)
    return pairs


def to_dot_bracket(inst: QuboInstance, x) -> str:
    """Dot-bracket rendering of a feasible assignment."""
    if not is_feasible(inst, x):
        raise InfeasibleInput("assignment violates conflict constraints")
    chars = ["."] * inst.length
    for i, j in selected_pairs(inst, x):
        chars[i - 1] = "("
        chars[j - 1] = ")"
    return "".join(chars)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def instance_to_dict(inst: QuboInstance) -> dict:
    iu, ju = np.triu_indices(inst.m)
    mask = inst.Q[iu, ju] != 0.0
    entries = [
        [int(a), int(b), float(v)]
        for a, b, v in zip(iu[mask], ju[mask], inst.Q[iu, ju][mask])
    ]
    return {
        "sequence_id": inst.sequence_id,
        "length": inst.length,
        "m": inst.m,
        "entries": entries,
        "relations": {
            "conflicts": sorted(map(list, inst.relations.conflicts)),
            "stackings": sorted(map(list, inst.relations.stackings)),
            "ua_terminal": sorted(inst.relations.ua_terminal),
        },
        "coeffs": inst.coeffs,
        "quartets": [[q.i, q.j, q.stack_type] for q in inst.quartets],
    }


def instance_from_dict(d: dict) -> QuboInstance:
    m = d["m"]
    Q = np.zeros((m, m))
    for a, b, v in d["entries"]:
        Q[a, b] = v
        if a != b:
            Q[b, a] = v
    rel = RelationSets(
        conflicts={(a, b) for a, b in d["relations"]["conflicts"]},
        stackings={(a, b) for a, b in d["relations"]["stackings"]},
        ua_terminal=set(d["relations"]["ua_terminal"]),
    )
    quartets = [
        Quartet(i=i, j=j, index=k, stack_type=st)
        for k, (i, j, st) in enumerate(d["quartets"])
    ]
    return QuboInstance(
        m=m,
        Q=Q,
        relations=rel,
        coeffs={k: float(v) for k, v in d["coeffs"].items()},
        quartets=quartets,
        sequence_id=d["sequence_id"],
        length=d["length"],
    )


def save_instance(inst: QuboInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst)))


def load_instance(path: str | Path) -> QuboInstance:
    return instance_from_dict(json.loads(Path(path).read_text()))
