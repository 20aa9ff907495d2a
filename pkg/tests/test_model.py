import random
from itertools import combinations

import pytest

from debcheck.expand import DepClause, PackageId, Repository, build_repository, expand
from debcheck.model import check_health, generate_rn, is_trimmed
from debcheck.solver import brute_force_check
from debcheck.stanza import parse_packages

from conftest import random_repository, reference_health


def pid(name, version="1"):
    return PackageId(name, version)


@pytest.fixture
def worked_repo(constraint_sample):
    return build_repository(expand(parse_packages(constraint_sample).stanzas))


class TestCheckHealth:
    def test_empty_installation_is_healthy(self, worked_repo):
        report = check_health(frozenset(), worked_repo)
        assert report.healthy
        assert report.abundance_violations == ()
        assert report.peace_violations == ()

    def test_worked_healthy_installation(self, worked_repo):
        inst = frozenset({pid("a", "1"), pid("b", "2"), pid("d", "2")})
        assert check_health(inst, worked_repo).healthy

    def test_conflicting_pair_reported(self, worked_repo):
        report = check_health(frozenset({pid("b", "2"), pid("c", "3")}), worked_repo)
        assert not report.healthy
        assert report.peace_violations == ((pid("b", "2"), pid("c", "3")),)

    def test_unmet_dependency_reported_with_alternative(self, worked_repo):
        report = check_health(frozenset({pid("a", "1"), pid("b", "2")}), worked_repo)
        assert not report.healthy
        assert len(report.abundance_violations) == 1
        violator, clause = report.abundance_violations[0]
        assert violator == pid("a", "1")
        assert clause.members == frozenset({pid("c", "3"), pid("d", "2"), pid("d", "3")})

    def test_all_violations_enumerated(self):
        repo = Repository(
            packages=(pid("x"), pid("y"), pid("z")),
            deps={
                pid("x"): (DepClause(frozenset(), "nothing"),),
                pid("y"): (DepClause(frozenset(), "nothing"),),
                pid("z"): (),
            },
            conflicts=frozenset({(pid("x"), pid("y")), (pid("x"), pid("z"))}),
        )
        report = check_health(frozenset(repo.packages), repo)
        assert len(report.abundance_violations) == 2
        assert len(report.peace_violations) == 2

    def test_foreign_member_rejected(self, worked_repo):
        with pytest.raises(ValueError):
            check_health(frozenset({pid("nope")}), worked_repo)

    def test_matches_literal_definition_on_random_repositories(self):
        rng = random.Random(7)
        for _ in range(150):
            repo = random_repository(rng, max_packages=8)
            members = frozenset(
                p for p in repo.packages if rng.random() < 0.5
            )
            assert check_health(members, repo).healthy == reference_health(members, repo)

    def test_removal_never_creates_peace_violation(self):
        rng = random.Random(8)
        for _ in range(80):
            repo = random_repository(rng, max_packages=8)
            members = set(p for p in repo.packages if rng.random() < 0.6)
            if not members:
                continue
            before = check_health(frozenset(members), repo)
            members.discard(rng.choice(sorted(members, key=str)))
            after = check_health(frozenset(members), repo)
            assert set(after.peace_violations) <= set(before.peace_violations)


class TestIsTrimmed:
    def test_worked_repo_is_trimmed(self, worked_repo):
        assert is_trimmed(worked_repo) == (True, [])

    def test_unsatisfiable_dependency_breaks_trimmedness(self):
        repo = Repository(
            packages=(pid("p"),),
            deps={pid("p"): (DepClause(frozenset(), "gone"),)},
            conflicts=frozenset(),
        )
        assert is_trimmed(repo) == (False, [pid("p")])

    def test_every_package_installable_despite_group_conflict(self):
        ok, broken = is_trimmed(generate_rn(3))
        assert ok and broken == []

    def test_virtuals_excluded_by_default(self, virtual_sample):
        stanzas = parse_packages(virtual_sample).stanzas
        repo = build_repository(
            expand(stanzas + parse_packages("Package: z\nVersion: 1\nDepends: gone\n").stanzas)
        )
        ok, broken = is_trimmed(repo)
        assert not ok
        assert broken == [pid("z")]
        ok_with, broken_with = is_trimmed(repo, include_virtuals=True)
        assert broken == broken_with  # the synthetic packages are installable here


class TestGenerateRn:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            generate_rn(0)

    def test_degenerate_single(self):
        repo = generate_rn(1)
        assert set(repo.packages) == {pid("a1"), pid("b1")}
        assert repo.deps[pid("a1")] == (DepClause(frozenset(), ""),)
        assert not brute_force_check(repo, frozenset({pid("a1")}))

    def test_structure(self):
        repo = generate_rn(3)
        assert len(repo.packages) == 6
        assert repo.deps[pid("a2")][0].members == frozenset({pid("b1"), pid("b3")})
        assert repo.deps[pid("b2")] == ()
        assert len(repo.conflicts) == 3

    def test_proper_subsets_coinstallable_full_set_not(self):
        for n in range(2, 7):
            repo = generate_rn(n)
            a = [pid(f"a{i}") for i in range(1, n + 1)]
            full = frozenset(a)
            assert not brute_force_check(repo, full)
            for size in range(1, n):
                for subset in combinations(a, size):
                    assert brute_force_check(repo, frozenset(subset))
