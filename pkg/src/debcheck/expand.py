"""Expansion of version constraints and virtual packages, and the formal
repository model built from the expanded form.

Expansion rewrites every relation into exact-version references relative
to the set of available packages, in two passes:

1. `expand_version_constraints` replaces each constrained reference by
   the disjunction of the available versions that satisfy it.  References
   to names that exist only via Provides are left untouched for pass 2;
   a constrained reference never matches a purely virtual name.
2. `expand_virtual_packages` synthesizes one package per provided name,
   depending on the disjunction of its providers, rewires bare references
   accordingly, and turns conflicts against a virtual name into conflicts
   against each provider except the conflicting package itself.

Both passes are whole-repository: adding or removing one package can
change the expansion of unrelated stanzas, so callers always re-run the
pipeline from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, cmp_to_key
from itertools import combinations
from typing import Iterable, Mapping

from .stanza import (
    Alternative,
    ConstrainedRef,
    DependencyExpression,
    PackageStanza,
)
from .version import satisfies, version_cmp

#: Version string given to synthesized virtual packages.
VIRTUAL_VERSION = "virtual"


@dataclass(frozen=True, order=False)
class PackageId:
    """A package is identified by its (name, version) pair."""

    name: str
    version: str

    def render(self) -> str:
        return f"{self.name} (= {self.version})"

    def __str__(self) -> str:
        return self.render()


def _id_cmp(a: PackageId, b: PackageId) -> int:
    """Deterministic package order: name ascending, version descending."""
    if a.name != b.name:
        return -1 if a.name < b.name else 1
    return -version_cmp(a.version, b.version)


#: sort() key for the canonical package order used everywhere downstream.
package_sort_key = cmp_to_key(_id_cmp)


def conflict_pair(a: PackageId, b: PackageId) -> tuple[PackageId, PackageId]:
    """Canonical unordered representation of a conflict edge."""
    if _id_cmp(a, b) > 0:
        a, b = b, a
    return (a, b)


@dataclass(frozen=True)
class DepClause:
    """One dependency alternative resolved to concrete packages.

    `members` is the set of packages any one of which satisfies the
    alternative; empty means unsatisfiable.  `label` keeps the original
    field text for reports and does not affect equality.
    """

    members: frozenset[PackageId]
    label: str = field(default="", compare=False)

    def sorted_members(self) -> list[PackageId]:
        return sorted(self.members, key=package_sort_key)

    def render_members(self) -> str:
        if not self.members:
            return "{NOT AVAILABLE}"
        return "{" + " ".join(p.render() for p in self.sorted_members()) + "}"


class RepositoryError(ValueError):
    """Corrupt input detected while building a repository."""


@dataclass(frozen=True)
class Repository:
    """The formal model: packages, dependency function, conflict relation.

    `conflicts` stores one canonical tuple per unordered pair; it is
    symmetric by construction and never contains a self-pair.  Every two
    distinct versions of one name are in conflict implicitly.  `virtuals`
    tracks packages synthesized for provided names.
    """

    packages: tuple[PackageId, ...]
    deps: Mapping[PackageId, tuple[DepClause, ...]]
    conflicts: frozenset[tuple[PackageId, PackageId]]
    virtuals: frozenset[PackageId] = frozenset()

    @cached_property
    def package_set(self) -> frozenset[PackageId]:
        return frozenset(self.packages)

    @cached_property
    def versions_by_name(self) -> dict[str, list[PackageId]]:
        byname: dict[str, list[PackageId]] = {}
        for pid in self.packages:
            byname.setdefault(pid.name, []).append(pid)
        return byname

    @cached_property
    def conflict_neighbours(self) -> dict[PackageId, frozenset[PackageId]]:
        adj: dict[PackageId, set[PackageId]] = {p: set() for p in self.packages}
        for a, b in self.conflicts:
            adj[a].add(b)
            adj[b].add(a)
        return {p: frozenset(s) for p, s in adj.items()}

    def __contains__(self, pid: PackageId) -> bool:
        return pid in self.package_set

    def in_conflict(self, a: PackageId, b: PackageId) -> bool:
        return a != b and conflict_pair(a, b) in self.conflicts

    def symmetric_conflicts(self) -> frozenset[tuple[PackageId, PackageId]]:
        """Both orientations of every conflict pair."""
        return frozenset(
            pair for a, b in self.conflicts for pair in ((a, b), (b, a))
        )


def _available_versions(stanzas: Iterable[PackageStanza]) -> dict[str, list[str]]:
    """Real versions per name, deduplicated, newest first."""
    versions: dict[str, list[str]] = {}
    for s in stanzas:
        versions.setdefault(s.name, [])
        if s.version not in versions[s.name]:
            versions[s.name].append(s.version)
    key = cmp_to_key(version_cmp)
    for name in versions:
        versions[name].sort(key=key, reverse=True)
    return versions


def _expand_ref(
    ref: ConstrainedRef,
    available: dict[str, list[str]],
    provided: frozenset[str],
) -> list[ConstrainedRef]:
    """Expand one reference against the available versions.

    Constrained references match real versions only.  A bare reference to
    a provided name keeps its bare form so the virtual pass can resolve
    it; a bare reference to a wholly absent name expands to nothing.
    """
    versions = available.get(ref.name, [])
    if ref.constrained:
        return [
            ConstrainedRef(ref.name, "=", v)
            for v in versions
            if satisfies(v, ref.relation, ref.version)
        ]
    expanded = [ConstrainedRef(ref.name, "=", v) for v in versions]
    if ref.name in provided:
        expanded.append(ConstrainedRef(ref.name))
    return expanded


def _dedupe(refs: Iterable[ConstrainedRef]) -> tuple[ConstrainedRef, ...]:
    seen = set()
    out = []
    for ref in refs:
        if ref not in seen:
            seen.add(ref)
            out.append(ref)
    return tuple(out)


def expand_version_constraints(stanzas: list[PackageStanza]) -> list[PackageStanza]:
    """Rewrite all constrained references into exact-version disjunctions.

    Alternatives whose references match nothing become empty (the package
    is then unsatisfiable; that is data, not an error).  Each alternative
    remembers its original text as its label.
    """
    stanzas = list(stanzas)
    available = _available_versions(stanzas)
    provided = frozenset(name for s in stanzas for name in s.provides)

    out = []
    for s in stanzas:
        conjuncts = []
        for alt in s.depends.conjuncts:
            refs = _dedupe(
                r for ref in alt.refs for r in _expand_ref(ref, available, provided)
            )
            conjuncts.append(Alternative(refs, origin=alt.label()))
        conflicts = _dedupe(
            r for ref in s.conflicts for r in _expand_ref(ref, available, provided)
        )
        out.append(
            PackageStanza(
                name=s.name,
                version=s.version,
                depends=DependencyExpression(tuple(conjuncts)),
                conflicts=conflicts,
                provides=s.provides,
                replaces=s.replaces,
                architecture=s.architecture,
                is_virtual=s.is_virtual,
            )
        )
    return out


def expand_virtual_packages(stanzas: list[PackageStanza]) -> list[PackageStanza]:
    """Synthesize provided names as packages and drop Provides fields.

    For each name provided by at least one package a stanza is appended
    whose single dependency alternative lists all providers (plus any
    real versions of that name).  Conflicts against a provided name become
    conflicts against each provider except the conflicting package itself.
    """
    stanzas = list(stanzas)
    providers: dict[str, list[PackageId]] = {}
    for s in stanzas:
        for name in s.provides:
            providers.setdefault(name, []).append(PackageId(s.name, s.version))

    real_ids = {PackageId(s.name, s.version) for s in stanzas}
    available = _available_versions(stanzas)

    synthetic_version: dict[str, str] = {}
    for name in providers:
        version = VIRTUAL_VERSION
        bump = 0
        while PackageId(name, version) in real_ids:
            bump += 1
            version = f"{VIRTUAL_VERSION}{bump}"
        synthetic_version[name] = version

    def rewrite_dep(ref: ConstrainedRef) -> list[ConstrainedRef]:
        if ref.constrained or ref.name not in providers:
            return [ref]
        return [ConstrainedRef(ref.name, "=", synthetic_version[ref.name])]

    def rewrite_conflict(owner: PackageId, ref: ConstrainedRef) -> list[ConstrainedRef]:
        if ref.constrained or ref.name not in providers:
            return [ref]
        kept = [
            ConstrainedRef(p.name, "=", p.version)
            for p in providers[ref.name]
            if p != owner
        ]
        # Real versions of the name were already expanded in pass 1; they
        # only need adding when this pass runs on unexpanded input.
        for v in available.get(ref.name, []):
            kept.append(ConstrainedRef(ref.name, "=", v))
        return kept

    out = []
    for s in stanzas:
        owner = PackageId(s.name, s.version)
        conjuncts = tuple(
            Alternative(
                _dedupe(r for ref in alt.refs for r in rewrite_dep(ref)),
                origin=alt.label(),
            )
            for alt in s.depends.conjuncts
        )
        conflicts = _dedupe(
            r for ref in s.conflicts for r in rewrite_conflict(owner, ref)
        )
        out.append(
            PackageStanza(
                name=s.name,
                version=s.version,
                depends=DependencyExpression(conjuncts),
                conflicts=conflicts,
                provides=(),
                replaces=s.replaces,
                architecture=s.architecture,
                is_virtual=s.is_virtual,
            )
        )

    for name in sorted(providers):
        members = _dedupe(
            [ConstrainedRef(p.name, "=", p.version) for p in providers[name]]
            + [ConstrainedRef(name, "=", v) for v in available.get(name, [])]
        )
        origin = " | ".join(dict.fromkeys(r.name for r in members))
        out.append(
            PackageStanza(
                name=name,
                version=synthetic_version[name],
                depends=DependencyExpression((Alternative(members, origin=origin),)),
                is_virtual=True,
            )
        )
    return out


def expand(stanzas: list[PackageStanza]) -> list[PackageStanza]:
    """Full expansion pipeline: version constraints, then virtual packages."""
    return expand_virtual_packages(expand_version_constraints(stanzas))


def build_repository(stanzas: list[PackageStanza]) -> Repository:
    """Build the formal repository from fully expanded stanzas.

    Exact references to absent packages are dropped (possibly leaving an
    alternative empty).  Declared conflicts are symmetrized, self-pairs
    removed, and every distinct-version pair of one name is added.
    """
    ids = [PackageId(s.name, s.version) for s in stanzas]
    seen: set[PackageId] = set()
    for pid in ids:
        if pid in seen:
            raise RepositoryError(f"duplicate package after expansion: {pid.render()}")
        seen.add(pid)

    order = sorted(ids, key=package_sort_key)
    present = frozenset(ids)
    byname: dict[str, list[PackageId]] = {}
    for pid in order:
        byname.setdefault(pid.name, []).append(pid)

    def resolve(ref: ConstrainedRef) -> list[PackageId]:
        if ref.constrained:
            pid = PackageId(ref.name, ref.version)
            return [pid] if pid in present else []
        return byname.get(ref.name, [])

    deps: dict[PackageId, tuple[DepClause, ...]] = {}
    conflicts: set[tuple[PackageId, PackageId]] = set()
    virtuals: set[PackageId] = set()

    for s in stanzas:
        owner = PackageId(s.name, s.version)
        clauses = []
        for alt in s.depends.conjuncts:
            members = frozenset(p for ref in alt.refs for p in resolve(ref))
            clauses.append(DepClause(members, label=alt.label()))
        deps[owner] = tuple(clauses)
        for ref in s.conflicts:
            for other in resolve(ref):
                if other != owner:
                    conflicts.add(conflict_pair(owner, other))
        if s.is_virtual:
            virtuals.add(owner)

    for versions in byname.values():
        for a, b in combinations(versions, 2):
            conflicts.add(conflict_pair(a, b))

    return Repository(
        packages=tuple(order),
        deps=deps,
        conflicts=frozenset(conflicts),
        virtuals=frozenset(virtuals),
    )


def repository_from_stanzas(stanzas: list[PackageStanza]) -> Repository:
    """Expand raw stanzas and build the repository in one call."""
    return build_repository(expand(stanzas))


def render_stanzas(stanzas: list[PackageStanza]) -> str:
    """Debug dump of stanzas back to Packages-file text."""
    blocks = []
    for s in stanzas:
        lines = [f"Package: {s.name}", f"Version: {s.version}"]
        if s.architecture:
            lines.append(f"Architecture: {s.architecture}")
        if s.depends.conjuncts:
            lines.append(f"Depends: {s.depends.render()}")
        if s.conflicts:
            lines.append("Conflicts: " + ", ".join(r.render() for r in s.conflicts))
        if s.provides:
            lines.append("Provides: " + ", ".join(s.provides))
        if s.replaces:
            lines.append("Replaces: " + ", ".join(s.replaces))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")
