"""Installability decisions via a boolean-satisfiability encoding.

Each package becomes one variable.  A dependency alternative of p with
members q1..qk becomes the clause (-p | q1 | ... | qk); a conflict pair
(a, b) becomes (-a | -b); a query adds one positive unit assumption per
requested package.  Every base clause contains a negative literal, so the
empty installation always satisfies the base formula; a query is
satisfiable iff the requested packages are co-installable.

The embedded solver is a conflict-driven clause-learning search with
counter-based clause state and occurrence lists.  Decisions are demand
driven: the only clauses that can block extending the current partial
assignment with "everything else stays uninstalled" are clauses whose
unassigned literals are all positive, so those are queued and decided
on directly, and the search can stop as soon as none remain.  Learned
clauses record which clauses they were resolved from, which yields an
unsatisfiable core (and from it an explanation) without a separate
proof pass.  Everything iterates in fixed orders, so verdicts,
witnesses, and explanations are reproducible run to run.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .expand import (
    DepClause,
    PackageId,
    Repository,
    conflict_pair,
    package_sort_key,
)
from .model import check_health

#: Explanations touching at most this many packages get greedily shrunk.
_SHRINK_LIMIT = 40

#: Hard cap for the exhaustive checker.
_BRUTE_FORCE_LIMIT = 24


@dataclass(frozen=True)
class DependencyEdge:
    """Clause origin: one dependency alternative of one package."""

    package: PackageId
    clause: DepClause


@dataclass(frozen=True)
class ConflictEdge:
    """Clause origin: one conflict pair."""

    pair: tuple[PackageId, PackageId]


@dataclass(frozen=True)
class QueryAssumption:
    """Clause origin: a package required true by the current query."""

    package: PackageId


ClauseOrigin = DependencyEdge | ConflictEdge | QueryAssumption


@dataclass(frozen=True)
class ClauseSet:
    """Immutable CNF encoding of a repository.

    Variable i+1 corresponds to packages[i]; clause k carries origins[k].
    """

    packages: tuple[PackageId, ...]
    clauses: tuple[tuple[int, ...], ...]
    origins: tuple[ClauseOrigin, ...]

    @cached_property
    def index(self) -> dict[PackageId, int]:
        return {pid: i + 1 for i, pid in enumerate(self.packages)}

    def var_of(self, pid: PackageId) -> int:
        return self.index[pid]

    def package_of(self, var: int) -> PackageId:
        return self.packages[var - 1]

    def with_assumptions(self, pids: list[PackageId]) -> "ClauseSet":
        """Extend with one positive unit clause per queried package."""
        extra = tuple((self.var_of(p),) for p in pids)
        marks = tuple(QueryAssumption(p) for p in pids)
        return ClauseSet(self.packages, self.clauses + extra, self.origins + marks)

    def to_dimacs(self) -> str:
        """DIMACS CNF text with a comment map from variables to packages."""
        lines = [f"c {i + 1} {p.name} {p.version}" for i, p in enumerate(self.packages)]
        lines.append(f"p cnf {len(self.packages)} {len(self.clauses)}")
        for clause in self.clauses:
            lines.append(" ".join(str(l) for l in clause) + " 0")
        return "\n".join(lines) + "\n"


def encode(repo: Repository) -> ClauseSet:
    """Translate a repository into its clause set (without any query)."""
    index = {pid: i + 1 for i, pid in enumerate(repo.packages)}
    clauses: list[tuple[int, ...]] = []
    origins: list[ClauseOrigin] = []
    for pid in repo.packages:
        for clause in repo.deps.get(pid, ()):
            lits = [-index[pid]] + sorted(index[m] for m in clause.members)
            clauses.append(tuple(lits))
            origins.append(DependencyEdge(pid, clause))
    for a, b in sorted(repo.conflicts, key=lambda pair: (index[pair[0]], index[pair[1]])):
        clauses.append((-index[a], -index[b]))
        origins.append(ConflictEdge((a, b)))
    return ClauseSet(repo.packages, tuple(clauses), tuple(origins))


class _Core:
    """Unsatisfiability evidence: base clauses used plus assumptions used.

    `failed_var` is the assumption variable found impossible to hold.
    """

    __slots__ = ("clause_ids", "assumption_vars", "failed_var")

    def __init__(self, clause_ids: set[int], assumption_vars: set[int], failed_var: int):
        self.clause_ids = clause_ids
        self.assumption_vars = assumption_vars
        self.failed_var = failed_var


class _Engine:
    """Reusable CDCL search over one clause set.

    Assumptions are installed as the first decision levels, so learned
    clauses are implied by the base formula alone.  Learned clauses that
    assert a fact at level 0 are therefore kept between queries; all
    other learned clauses are discarded when the query ends.
    """

    def __init__(self, clause_set: ClauseSet):
        self.nvars = len(clause_set.packages)
        self.clauses: list[tuple[int, ...] | None] = [
            tuple(dict.fromkeys(c)) for c in clause_set.clauses
        ]
        self.base_count = len(self.clauses)
        self.value = [0] * (self.nvars + 1)
        self.reason: list[int | None] = [None] * (self.nvars + 1)
        self.level = [0] * (self.nvars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        # clause ids containing +var / -var, indexed by var
        self.occ_pos: list[list[int]] = [[] for _ in range(self.nvars + 1)]
        self.occ_neg: list[list[int]] = [[] for _ in range(self.nvars + 1)]
        self.n_true = [0] * self.base_count
        self.n_false = [0] * self.base_count
        self.pending: deque[int] = deque()
        self.demand: deque[int] = deque()
        self.in_demand = [False] * self.base_count
        # learned-clause derivations, flattened to base clause ids and the
        # level-0 variables resolved away (their reason chains complete a core)
        self.flat_bases: dict[int, frozenset[int]] = {}
        self.flat_zeros: dict[int, frozenset[int]] = {}

        for ci, clause in enumerate(self.clauses):
            for lit in clause:
                if lit > 0:
                    self.occ_pos[lit].append(ci)
                else:
                    self.occ_neg[-lit].append(ci)

        # propagate base facts (packages with an unsatisfiable alternative
        # and everything that follows); this prefix is permanent
        conflict = None
        for ci, clause in enumerate(self.clauses):
            if len(clause) == 1 and self.value[abs(clause[0])] == 0:
                conflict = self._assign(clause[0], ci) or conflict
        conflict = self._propagate() or conflict
        if conflict is not None:
            raise RuntimeError("base clause set is unsatisfiable; encoding bug")
        self.base_trail_len = len(self.trail)
        self._drain_demand()

    def never_installable_vars(self) -> list[int]:
        """Variables fixed false by the base formula alone."""
        return [-l for l in self.trail[: self.base_trail_len] if l < 0]

    # -- assignment and propagation ------------------------------------

    def _assign(self, lit: int, reason: int | None) -> int | None:
        """Make `lit` true; returns a conflicting clause id, if any."""
        if lit > 0:
            var = lit
            sat_occ = self.occ_pos[var]
            fal_occ = self.occ_neg[var]
            self.value[var] = 1
        else:
            var = -lit
            sat_occ = self.occ_neg[var]
            fal_occ = self.occ_pos[var]
            self.value[var] = -1
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        conflict = None
        n_true = self.n_true
        n_false = self.n_false
        clauses = self.clauses
        for ci in sat_occ:
            n_true[ci] += 1
        pending = self.pending
        demand = self.demand
        in_demand = self.in_demand
        for ci in fal_occ:
            n_false[ci] += 1
            if n_true[ci] == 0:
                rem = len(clauses[ci]) - n_false[ci]
                if rem == 0:
                    if conflict is None:
                        conflict = ci
                elif rem == 1:
                    pending.append(ci)
                elif not in_demand[ci]:
                    in_demand[ci] = True
                    demand.append(ci)
        return conflict

    def _propagate(self) -> int | None:
        value = self.value
        pending = self.pending
        n_true = self.n_true
        n_false = self.n_false
        clauses = self.clauses
        while pending:
            ci = pending.popleft()
            if n_true[ci] > 0:
                continue
            clause = clauses[ci]
            rem = len(clause) - n_false[ci]
            if rem == 0:
                return ci
            if rem != 1:
                continue
            unit = 0
            for l in clause:
                if value[l if l > 0 else -l] == 0:
                    unit = l
                    break
            conflict = self._assign(unit, ci)
            if conflict is not None:
                return conflict
        return None

    def _push_demand(self, ci: int) -> None:
        if not self.in_demand[ci]:
            self.in_demand[ci] = True
            self.demand.append(ci)

    def _drain_demand(self) -> None:
        while self.demand:
            self.in_demand[self.demand.popleft()] = False

    def _next_demand_lit(self) -> int | None:
        """First positive literal of the first clause blocking completion.

        A clause blocks extending the assignment with all-false only if it
        has no true literal and no unassigned negative literal.
        """
        value = self.value
        while self.demand:
            ci = self.demand.popleft()
            self.in_demand[ci] = False
            clause = self.clauses[ci]
            if clause is None or self.n_true[ci] > 0:
                continue
            unassigned = [l for l in clause if value[abs(l)] == 0]
            if not unassigned or any(l < 0 for l in unassigned):
                continue
            return unassigned[0]
        return None

    def _backtrack(self, target: int, teardown: bool = False) -> None:
        """Unassign everything above `target`.

        During search the clauses losing their last true literal must be
        re-queued as completion blockers; on end-of-query teardown that
        bookkeeping is skipped (level 0 has no blockers).
        """
        value = self.value
        reason = self.reason
        n_true = self.n_true
        n_false = self.n_false
        occ_pos = self.occ_pos
        occ_neg = self.occ_neg
        while len(self.trail_lim) > target:
            mark = self.trail_lim.pop()
            for lit in reversed(self.trail[mark:]):
                if lit > 0:
                    var = lit
                    sat_occ = occ_pos[var]
                    fal_occ = occ_neg[var]
                else:
                    var = -lit
                    sat_occ = occ_neg[var]
                    fal_occ = occ_pos[var]
                value[var] = 0
                reason[var] = None
                if teardown:
                    for ci in sat_occ:
                        n_true[ci] -= 1
                else:
                    for ci in sat_occ:
                        n_true[ci] -= 1
                        if n_true[ci] == 0:
                            self._push_demand(ci)
                for ci in fal_occ:
                    n_false[ci] -= 1
            del self.trail[mark:]
        self.pending.clear()

    # -- learning --------------------------------------------------------

    def _analyze(self, confl: int) -> tuple[list[int], int, set[int], set[int]]:
        """First-UIP conflict analysis.

        Returns the learned clause (asserting literal first), the backjump
        level, the flattened base-clause ids of its derivation, and the
        level-0 variables resolved away during it.
        """
        learned: list[int] = [0]
        seen = set()
        bases: set[int] = set()
        zeros: set[int] = set()
        counter = 0
        current = len(self.trail_lim)
        idx = len(self.trail) - 1
        p: int | None = None
        reason_clause = self.clauses[confl]
        self._absorb_derivation(confl, bases, zeros)

        while True:
            for q in reason_clause:
                if p is not None and q == p:
                    continue
                v = abs(q)
                if v in seen:
                    continue
                seen.add(v)
                lv = self.level[v]
                if lv == 0:
                    zeros.add(v)
                elif lv == current:
                    counter += 1
                else:
                    learned.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                learned[0] = -p
                break
            r = self.reason[abs(p)]
            self._absorb_derivation(r, bases, zeros)
            reason_clause = self.clauses[r]

        backjump = 0
        for q in learned[1:]:
            lv = self.level[abs(q)]
            if lv > backjump:
                backjump = lv
        return learned, backjump, bases, zeros

    def _absorb_derivation(self, ci: int, bases: set[int], zeros: set[int]) -> None:
        if ci in self.flat_bases:
            bases |= self.flat_bases[ci]
            zeros |= self.flat_zeros[ci]
        else:
            bases.add(ci)

    def _add_learned(self, lits: list[int], bases: set[int], zeros: set[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(tuple(lits))
        self.n_true.append(sum(1 for l in lits if self.value[abs(l)] == (1 if l > 0 else -1)))
        self.n_false.append(sum(1 for l in lits if self.value[abs(l)] == (-1 if l > 0 else 1)))
        self.in_demand.append(False)
        for lit in lits:
            if lit > 0:
                self.occ_pos[lit].append(ci)
            else:
                self.occ_neg[-lit].append(ci)
        self.flat_bases[ci] = frozenset(bases)
        self.flat_zeros[ci] = frozenset(zeros)
        return ci

    def _cleanup(self, keep_from_level0: bool) -> None:
        """Retract per-query state; keep learned clauses asserted at level 0."""
        self._backtrack(0, teardown=True)
        self._drain_demand()
        for ci in range(self.base_count, len(self.clauses)):
            clause = self.clauses[ci]
            if clause is None:
                continue
            retained = keep_from_level0 and any(
                self.reason[abs(l)] == ci and self.level[abs(l)] == 0 for l in clause
            )
            if retained:
                continue
            for lit in clause:
                if lit > 0:
                    self.occ_pos[lit].remove(ci)
                else:
                    self.occ_neg[-lit].remove(ci)
            self.clauses[ci] = None
            del self.flat_bases[ci], self.flat_zeros[ci]

    # -- the search ------------------------------------------------------

    def solve(self, assumptions: list[int]) -> tuple[bool, frozenset[int] | _Core]:
        """Decide the base formula under positive unit assumptions.

        Returns (True, true variable set) or (False, core).  The engine is
        left clean for the next query.
        """
        try:
            while True:
                conflict = self._propagate()
                if conflict is not None:
                    if not self.trail_lim:
                        raise RuntimeError("conflict at level 0; encoding bug")
                    lits, backjump, bases, zeros = self._analyze(conflict)
                    self._backtrack(backjump)
                    ci = self._add_learned(lits, bases, zeros)
                    conflict = self._assign(lits[0], ci)
                    if conflict is not None and not self.trail_lim:
                        raise RuntimeError("conflict at level 0; encoding bug")
                    if conflict is not None:
                        self.pending.clear()
                        self.pending.append(conflict)
                    continue
                depth = len(self.trail_lim)
                if depth < len(assumptions):
                    lit = assumptions[depth]
                    state = self.value[abs(lit)]
                    if state == -1:
                        return False, self._final_core(abs(lit))
                    self.trail_lim.append(len(self.trail))
                    if state == 0:
                        conflict = self._assign(lit, None)
                        if conflict is not None:
                            self.pending.append(conflict)
                    continue
                lit = self._next_demand_lit()
                if lit is None:
                    model = frozenset(l for l in self.trail if l > 0)
                    if __debug__ and self.nvars <= 2000:
                        self._verify_model()
                    return True, model
                self.trail_lim.append(len(self.trail))
                conflict = self._assign(lit, None)
                if conflict is not None:
                    self.pending.append(conflict)
        finally:
            self._cleanup(keep_from_level0=True)

    def _verify_model(self) -> None:
        # A literal holds under "unassigned means false" if it is a true
        # positive or a non-true negative.
        for clause in self.clauses:
            if clause is None:
                continue
            sat = any(
                self.value[l] == 1 if l > 0 else self.value[-l] != 1 for l in clause
            )
            assert sat, "partial model does not extend with all-false"

    def _final_core(self, failed_var: int) -> _Core:
        """Walk implication ancestors of a falsified assumption variable."""
        clause_ids: set[int] = set()
        assumption_vars: set[int] = set()
        stack = [failed_var]
        visited = set()
        while stack:
            v = stack.pop()
            if v in visited:
                continue
            visited.add(v)
            r = self.reason[v]
            if r is None:
                assumption_vars.add(v)
                continue
            if r in self.flat_bases:
                clause_ids |= self.flat_bases[r]
                stack.extend(self.flat_zeros[r])
            else:
                clause_ids.add(r)
            for lit in self.clauses[r]:
                if abs(lit) != v:
                    stack.append(abs(lit))
        return _Core(clause_ids, assumption_vars, failed_var)


# -- results and explanations ---------------------------------------------


@dataclass(frozen=True)
class ExplanationChain:
    """One rendered path of dependency steps ending in a dead end.

    With no terminating conflict, the last step's alternative is
    unsatisfiable within the explanation ("{NOT AVAILABLE}" when it has
    no members at all).
    """

    steps: tuple[DependencyEdge, ...]
    conflict: tuple[PackageId, PackageId] | None = None

    def packages(self) -> list[PackageId]:
        return [step.package for step in self.steps]

    def render_lines(self) -> list[str]:
        lines = [
            f"{step.package.render()} depends on "
            f"{step.clause.label} {step.clause.render_members()}"
            for step in self.steps
        ]
        if self.conflict is not None:
            a, b = self.conflict
            lines.append(f"{a.render()} conflicts with {b.render()}")
        return lines


@dataclass(frozen=True)
class Explanation:
    """A self-contained proof of non-installability.

    The listed dependency and conflict edges alone (all real edges of the
    repository) make the queried packages impossible to install; `chains`
    is the same evidence arranged for reading.
    """

    queried: tuple[PackageId, ...]
    dep_edges: tuple[DependencyEdge, ...]
    conflict_edges: tuple[tuple[PackageId, PackageId], ...]
    chains: tuple[ExplanationChain, ...]

    def mentioned_packages(self) -> frozenset[PackageId]:
        pids = set(self.queried)
        for edge in self.dep_edges:
            pids.add(edge.package)
            pids |= edge.clause.members
        for a, b in self.conflict_edges:
            pids.update((a, b))
        return frozenset(pids)

    def induced_repository(self) -> Repository:
        """The sub-repository containing only this explanation's edges."""
        packages = tuple(sorted(self.mentioned_packages(), key=package_sort_key))
        deps: dict[PackageId, list[DepClause]] = {pid: [] for pid in packages}
        for edge in self.dep_edges:
            if edge.clause not in deps[edge.package]:
                deps[edge.package].append(edge.clause)
        conflicts = {conflict_pair(a, b) for a, b in self.conflict_edges}
        byname: dict[str, list[PackageId]] = {}
        for pid in packages:
            byname.setdefault(pid.name, []).append(pid)
        for versions in byname.values():
            for a, b in combinations(versions, 2):
                conflicts.add(conflict_pair(a, b))
        return Repository(
            packages=packages,
            deps={pid: tuple(clauses) for pid, clauses in deps.items()},
            conflicts=frozenset(conflicts),
        )

    def render_lines(self) -> list[str]:
        lines = []
        for chain in self.chains:
            lines.extend(chain.render_lines())
        return lines


@dataclass(frozen=True)
class CheckResult:
    """Verdict of an (co-)installability query."""

    installable: bool
    witness: frozenset[PackageId] | None = None
    explanation: Explanation | None = None


def _render_chains(
    queried: tuple[PackageId, ...],
    dep_edges: tuple[DependencyEdge, ...],
    conflict_edges: tuple[tuple[PackageId, PackageId], ...],
) -> tuple[ExplanationChain, ...]:
    """Arrange proof edges into readable chains.

    Depth-first from each queried package; every package's outgoing edges
    are expanded once, so shared sub-reasons are not repeated.
    """
    outgoing: dict[PackageId, list[DependencyEdge]] = {}
    for edge in dep_edges:
        outgoing.setdefault(edge.package, []).append(edge)
    in_conflict: dict[PackageId, tuple[PackageId, PackageId]] = {}
    for pair in conflict_edges:
        for pid in pair:
            in_conflict.setdefault(pid, pair)

    chains: list[ExplanationChain] = []
    expanded: set[PackageId] = set()

    def walk(pid: PackageId, path: list[DependencyEdge]) -> None:
        edges = outgoing.get(pid, ())
        if pid in expanded or not edges:
            if path or pid in in_conflict:
                chains.append(ExplanationChain(tuple(path), in_conflict.get(pid)))
            return
        expanded.add(pid)
        for edge in edges:
            new_path = path + [edge]
            if not edge.clause.members:
                chains.append(ExplanationChain(tuple(new_path)))
                continue
            for member in edge.clause.sorted_members():
                walk(member, new_path)

    for pid in queried:
        walk(pid, [])
    return tuple(chains)


def _is_coinstallable_raw(repo: Repository, pids: list[PackageId]) -> bool:
    """Plain SAT verdict without explanation extraction (used for shrinking)."""
    cs = encode(repo)
    engine = _Engine(cs)
    sat, _ = engine.solve(sorted(cs.var_of(p) for p in pids))
    return sat


def _shrink_edges(
    queried: tuple[PackageId, ...],
    dep_edges: list[DependencyEdge],
    conflict_edges: list[tuple[PackageId, PackageId]],
) -> tuple[list[DependencyEdge], list[tuple[PackageId, PackageId]]]:
    """Greedily drop edges while the induced sub-repository stays unsatisfiable."""

    def still_unsat(
        deps: list[DependencyEdge], confls: list[tuple[PackageId, PackageId]]
    ) -> bool:
        trial = Explanation(queried, tuple(deps), tuple(confls), ())
        induced = trial.induced_repository()
        return not _is_coinstallable_raw(induced, list(queried))

    for edge in list(dep_edges):
        candidate = [e for e in dep_edges if e is not edge]
        if still_unsat(candidate, conflict_edges):
            dep_edges = candidate
    for pair in list(conflict_edges):
        candidate_pairs = [p for p in conflict_edges if p is not pair]
        if still_unsat(dep_edges, candidate_pairs):
            conflict_edges = candidate_pairs
    return dep_edges, conflict_edges


class RepositoryChecker:
    """Shared encoding plus a reusable solver for many queries on one repository."""

    def __init__(self, repo: Repository):
        self.repo = repo
        self.clause_set = encode(repo)
        self._engine = _Engine(self.clause_set)

    def query(self, pids: list[PackageId], explain: bool = True) -> CheckResult:
        queried = tuple(sorted(set(pids), key=package_sort_key))
        if not queried:
            raise ValueError("query set must be non-empty")
        missing = [p for p in queried if p not in self.repo]
        if missing:
            raise ValueError(f"package not in repository: {missing[0].render()}")

        assumptions = sorted(self.clause_set.var_of(p) for p in queried)
        sat, payload = self._engine.solve(assumptions)
        if sat:
            witness = frozenset(self.clause_set.package_of(v) for v in payload)
            if __debug__ and len(self.repo.packages) <= 2000:
                assert check_health(witness, self.repo).healthy
                assert set(queried) <= witness
            return CheckResult(True, witness=witness)
        if not explain:
            return CheckResult(False)
        return CheckResult(False, explanation=self._explain(queried, payload))

    def _probe(
        self, pids: list[PackageId]
    ) -> tuple[frozenset[PackageId] | None, PackageId | None]:
        """Bare group query: (witness, None) or (None, failed package)."""
        assumptions = sorted(self.clause_set.var_of(p) for p in pids)
        sat, payload = self._engine.solve(assumptions)
        if sat:
            return frozenset(self.clause_set.package_of(v) for v in payload), None
        return None, self.clause_set.package_of(payload.failed_var)

    def _explain(self, queried: tuple[PackageId, ...], core: _Core) -> Explanation:
        dep_edges: list[DependencyEdge] = []
        conflict_edges: list[tuple[PackageId, PackageId]] = []
        for ci in sorted(core.clause_ids):
            origin = self.clause_set.origins[ci]
            if isinstance(origin, DependencyEdge):
                dep_edges.append(origin)
            elif isinstance(origin, ConflictEdge):
                conflict_edges.append(origin.pair)

        mentioned = set(queried)
        for edge in dep_edges:
            mentioned.add(edge.package)
            mentioned |= edge.clause.members
        if len(mentioned) <= _SHRINK_LIMIT:
            dep_edges, conflict_edges = _shrink_edges(queried, dep_edges, conflict_edges)

        chains = _render_chains(queried, tuple(dep_edges), tuple(conflict_edges))
        return Explanation(
            queried=queried,
            dep_edges=tuple(dep_edges),
            conflict_edges=tuple(conflict_edges),
            chains=chains,
        )


def check_installable(repo: Repository, pkg: PackageId) -> CheckResult:
    """Decide whether one package is installable within the repository."""
    if pkg not in repo:
        raise ValueError(f"package not in repository: {pkg.render()}")
    return RepositoryChecker(repo).query([pkg])


def check_coinstallable(repo: Repository, pkgs: frozenset[PackageId]) -> CheckResult:
    """Decide whether all of `pkgs` fit into one healthy installation."""
    pkgs = frozenset(pkgs)
    if not pkgs:
        raise ValueError("query set must be non-empty")
    return RepositoryChecker(repo).query(sorted(pkgs, key=package_sort_key))


_BATCH_SIZE = 192


def check_all(repo: Repository) -> dict[PackageId, CheckResult]:
    """Per-package verdicts with the encoding built once and shared.

    Packages are probed in groups: one satisfiable group query proves the
    whole group (and everything else in its witness) installable in a
    single propagation pass over the shared closure.  An unsatisfiable
    group is bisected, so breakage is isolated in logarithmically many
    solves and only true failures pay for explanation extraction.  The
    verdicts equal fresh per-package checks; grouping is purely a
    performance device.
    """
    checker = RepositoryChecker(repo)
    results: dict[PackageId, CheckResult] = {}

    # packages the base formula already fixes as impossible
    doomed = {
        checker.clause_set.package_of(v)
        for v in checker._engine.never_installable_vars()
    }
    for pid in sorted(doomed, key=package_sort_key):
        results[pid] = checker.query([pid])

    def record(witness: frozenset[PackageId]) -> None:
        shared = CheckResult(True, witness=witness)
        for member in witness:
            if member not in results:
                results[member] = shared

    def settle(group: list[PackageId]) -> None:
        while True:
            group = [pid for pid in group if pid not in results]
            if not group:
                return
            if len(group) == 1:
                result = checker.query(group)
                if result.installable:
                    record(result.witness)
                else:
                    results[group[0]] = result
                return
            witness, failed = checker._probe(group)
            if witness is not None:
                record(witness)
                return
            # usually `failed` is broken on its own: settle it alone, then
            # retry the rest; if it is fine alone the group members are
            # mutually incompatible, so bisect
            single = checker.query([failed])
            if single.installable:
                record(single.witness)
                mid = len(group) // 2
                settle(group[:mid])
                group = group[mid:]
            else:
                results[failed] = single
                group = [pid for pid in group if pid != failed]

    pending = [pid for pid in repo.packages if pid not in results]
    index = 0
    while index < len(pending):
        batch: list[PackageId] = []
        names: set[str] = set()
        while index < len(pending) and len(batch) < _BATCH_SIZE:
            pid = pending[index]
            if pid in results:
                index += 1
                continue
            if pid.name in names:
                break  # same-name versions always conflict; keep them apart
            names.add(pid.name)
            batch.append(pid)
            index += 1
        if batch:
            settle(batch)

    return {pid: results[pid] for pid in repo.packages}


def brute_force_check(repo: Repository, pkgs: frozenset[PackageId]) -> bool:
    """Exhaustive reference check of co-installability.

    Literally enumerates every installation containing `pkgs` and tests
    abundance and peace; deliberately shares nothing with the encoding or
    the search above.  Refuses repositories with more than 24 packages.
    """
    pkgs = frozenset(pkgs)
    n = len(repo.packages)
    if n > _BRUTE_FORCE_LIMIT:
        raise ValueError(f"repository too large for brute force ({n} > {_BRUTE_FORCE_LIMIT})")
    missing = pkgs - repo.package_set
    if missing:
        raise ValueError("query package not in repository")

    index = {pid: i for i, pid in enumerate(repo.packages)}
    alt_masks: list[list[int]] = []
    conflict_masks = [0] * n
    for pid in repo.packages:
        masks = []
        for clause in repo.deps.get(pid, ()):
            mask = 0
            for member in clause.members:
                mask |= 1 << index[member]
            masks.append(mask)
        alt_masks.append(masks)
    for a, b in repo.conflicts:
        conflict_masks[index[a]] |= 1 << index[b]
        conflict_masks[index[b]] |= 1 << index[a]

    query_mask = 0
    for pid in pkgs:
        query_mask |= 1 << index[pid]
    free = [i for i in range(n) if not (query_mask >> i) & 1]

    for bits in range(1 << len(free)):
        installed = query_mask
        for j, i in enumerate(free):
            if (bits >> j) & 1:
                installed |= 1 << i
        ok = True
        rest = installed
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            if conflict_masks[i] & installed:
                ok = False
                break
            for mask in alt_masks[i]:
                if not mask & installed:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False
