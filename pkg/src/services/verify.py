"""
Verify Module
This module runs the batch verification suites: bijection round trips on exhaustive
labelled instances, brute-force counts against series coefficients, recurrence against
closed form, and the structural identities.

Every suite is split into independent checks; with more than one job the checks run in
a process pool.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from src.conf.config import settings
from src.services.asymptotics import asymptotic_constants, cpq_identity_check
from src.services.bijections import (
    Correspondence,
    LabelledHypermap,
    LabelledMap,
    constellation_to_descending_mobile,
    constellation_to_regular,
    encode_pointed,
    hypermap_to_mobile,
    mobile_to_hypermap,
    phi,
    phi_minus,
    psi,
    psi_minus,
)
from src.services.errors import CapacityError, CartoError
from src.services.labels import completion, local_extrema, opp
from src.services.maps import (
    Hypermap,
    constellation_check,
    directed_distances,
    hypermap_code,
    map_code,
    map_to_hypermap,
)
from src.services.oracle import (
    cumulative_count,
    enumerate_family,
    enumerate_labelled,
    pointed_rooted_profile,
    triple_count,
    tutte_count,
)
from src.services.series import Series1
from src.services.twopoint import (
    FAMILIES,
    admissible_triples,
    alternative_v_check,
    bipartite_continued_fraction,
    characteristic_check,
    check_identities,
    closed_form,
    compare_provenances,
    continued_fraction_check,
    verify_ansatz,
)


logger = logging.getLogger(__name__)

SUITES = ("roundtrip", "oracle", "closedform", "identities")
I_MAX = 8
WEIGHTS = (Fraction(1, 2), Fraction(2), Fraction(3))


@dataclass
class CheckResult:
    """
    Outcome of one check.

    Attributes:
        name (str): Check name, suffixed by its parameters.
        cases (int): Instances or coefficients examined.
        failures (list[dict]): JSON-ready witnesses of the failed instances.
    """

    name: str
    cases: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"name": self.name, "cases": self.cases, "ok": self.ok, "failures": self.failures}


@dataclass
class SuiteReport:
    suite: str
    results: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.ok]

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "ok": self.ok,
            "checks": [r.to_json() for r in self.results],
        }


# round trips


def _close_after_open(n: int) -> CheckResult:
    result = CheckResult(f"close-after-open:{n}")
    for lm in enumerate_labelled(n, "suitable"):
        result.cases += 1
        opened, _ = phi(lm.map, lm.labels)
        closed, _ = psi(opened.hypermap, opened.labels)
        if map_code(closed.map, closed.labels) != map_code(lm.map, lm.labels):
            result.failures.append(lm.map.to_json(labels=list(lm.labels)))
    return result


def _open_after_close(n: int) -> CheckResult:
    result = CheckResult(f"open-after-close:{n}")
    for lh in enumerate_labelled(n, "well-labelled"):
        result.cases += 1
        closed, _ = psi(lh.hypermap, lh.labels)
        opened, _ = phi(closed.map, closed.labels)
        if hypermap_code(opened.hypermap, opened.labels) != hypermap_code(lh.hypermap, lh.labels):
            result.failures.append(lh.hypermap.to_json(labels=list(lh.labels)))
    return result


def _mirror(n: int) -> CheckResult:
    result = CheckResult(f"mirror:{n}")
    for lm in enumerate_labelled(n, "suitable"):
        result.cases += 1
        mirrored, mirror_corr = phi_minus(lm.map, lm.labels)
        plain, plain_corr = phi(lm.map, opp(lm.labels))
        closed, _ = psi_minus(mirrored.hypermap, mirrored.labels)
        if (
            mirrored.hypermap != plain.hypermap
            or mirrored.labels != opp(plain.labels)
            or mirror_corr.vertices != plain_corr.vertices
            or mirror_corr.light_faces != plain_corr.light_faces
            or mirror_corr.darts != plain_corr.darts
            or map_code(closed.map, closed.labels) != map_code(lm.map, lm.labels)
        ):
            result.failures.append(lm.map.to_json(labels=list(lm.labels)))
    return result


def _mobile_round_trip(n: int) -> CheckResult:
    result = CheckResult(f"mobile:{n}")
    for c in enumerate_family("GeneralMap", n).classes:
        m = c.structure()
        for v in range(m.n_vertices):
            result.cases += 1
            h = map_to_hypermap(m)
            pointed = h.map.origin(2 * m.vertices[v][0])
            decoded = mobile_to_hypermap(hypermap_to_mobile(h, pointed, root=0))
            expected = hypermap_code(h, pointed=pointed, root=0)
            if hypermap_code(decoded.hypermap, pointed=decoded.pointed, root=decoded.root) != expected:
                result.failures.append(m.to_json(pointed=v))
    return result


def _opening_mismatches(
    lm: LabelledMap, opened: LabelledHypermap, corr: Correspondence, mirror: bool
) -> list[str]:
    b, labels = lm.map, lm.labels
    h = opened.hypermap
    m = h.map
    mins, maxs = local_extrema(b, labels)
    erased, step = (maxs, 1) if mirror else (mins, -1)
    extreme = max if mirror else min
    failed = []
    if set(corr.light_faces) != set(h.light_faces) or set(corr.light_faces.values()) != erased:
        failed.append("light-faces")
    elif any(
        labels[u] != extreme(opened.labels[m.origin(d)] for d in m.faces[f]) + step
        for f, u in corr.light_faces.items()
    ):
        failed.append("light-face-labels")
    if set(corr.vertices.values()) != set(range(b.n_vertices)) - erased or any(
        opened.labels[v] != labels[u] for v, u in corr.vertices.items()
    ):
        failed.append("vertices")
    for v, u in corr.vertices.items():
        out = sum(1 for d in m.vertices[v] if h.is_canonical(d))
        along = sum(1 for d in b.vertices[u] if labels[b.target(d)] == labels[u] + step)
        if out != along:
            failed.append("degrees")
            break
    side = "upper" if mirror else "lower"
    if any(completion(match.dark_type, side) != match.face_type for match in corr.dark_faces.values()):
        failed.append("dark-types")
    return failed


def _mobile_mismatches(h: Hypermap, pointed: int) -> list[str]:
    encoding = encode_pointed(h, pointed)
    m = h.map
    s = encoding.star.map
    dist = directed_distances(h, pointed)
    failed = []
    if set(encoding.vertices) != set(range(m.n_vertices)) - {pointed} or any(
        encoding.labels[w] != dist[v] for v, w in encoding.vertices.items()
    ):
        failed.append("vertices")
    if set(encoding.light_faces) != set(h.light_faces) or any(
        encoding.labels[w] != max(dist[m.origin(d)] for d in m.faces[f]) + 1
        for f, w in encoding.light_faces.items()
    ):
        failed.append("light-faces")
    whites = [*encoding.vertices.values(), *encoding.light_faces.values()]
    if sorted(whites) != sorted(encoding.star.white_vertices):
        failed.append("whites")
    if sorted(encoding.dark_faces.values()) != sorted(encoding.star.black) or any(
        s.degree(black) != m.face_degree(f) for f, black in encoding.dark_faces.items()
    ):
        failed.append("dark-faces")
    return failed


def _parameters(n: int) -> CheckResult:
    result = CheckResult(f"parameters:{n}")
    for lm in enumerate_labelled(n, "suitable"):
        for opening, mirror in ((phi, False), (phi_minus, True)):
            result.cases += 1
            opened, corr = opening(lm.map, lm.labels)
            failed = _opening_mismatches(lm, opened, corr, mirror)
            if failed:
                result.failures.append(lm.map.to_json(labels=list(lm.labels), mirror=mirror, failed=failed))
    for c in enumerate_family("GeneralHypermap", n).classes:
        h = c.structure()
        for v in range(h.map.n_vertices):
            result.cases += 1
            failed = _mobile_mismatches(h, v)
            if failed:
                result.failures.append(h.to_json(pointed_vertex=v + 1, failed=failed))
    return result


def _constellations(darks: int) -> CheckResult:
    result = CheckResult(f"constellation:{darks}")
    p = 3
    for c in enumerate_family("ThreeConstellation", darks).classes:
        h = c.structure()
        for v in range(h.map.n_vertices):
            result.cases += 1
            dist = directed_distances(h, v)
            mobile = constellation_to_descending_mobile(h, v)
            regular, corr = constellation_to_regular(h, v)
            e = regular.hypermap
            failed = []
            if any(len(ring) != p for ring in mobile.stars):
                failed.append("black-degrees")
            if (
                not e.is_p_hypermap(p + 1)
                or any(e.map.face_degree(f) != p + 1 for f in e.light_faces)
                or not constellation_check(e, p + 1).ok
            ):
                failed.append("regular-degrees")
            if any(regular.labels[corr.vertices[x]] != dist[x] for x in range(h.map.n_vertices)):
                failed.append("distances")
            if failed:
                result.failures.append(h.to_json(pointed_vertex=v + 1, failed=failed))
    return result


# oracle against series


def _map_profiles(family: str, n: int) -> CheckResult:
    result = CheckResult(f"profile:{family}:{n}")
    report = pointed_rooted_profile(n, family)
    table = closed_form(family, n + 1, order=n)
    observable = "calR" if family == "GeneralHypermap" else "R"
    for i in range(1, n + 2):
        result.cases += 1
        found, expected = cumulative_count(report, i), table.series(observable, i).coefficient(n)
        if found != expected:
            result.failures.append({"family": family, "n": n, "i": i, "observable": observable,
                                    "enumerated": found, "series": str(expected)})
    if family == "GeneralMap":
        for i in range(n + 1):
            result.cases += 1
            found, expected = cumulative_count(report, i, diagonal=True), table.series("S2", i).coefficient(n)
            if found != expected:
                result.failures.append({"family": family, "n": n, "i": i, "observable": "S2",
                                        "enumerated": found, "series": str(expected)})
        result.cases += 1
        if enumerate_family(family, n).total != tutte_count(n):
            result.failures.append({"family": family, "n": n, "observable": "rooted"})
        if report.pointed_total != table.series("T").coefficient(n):
            result.failures.append({"family": family, "n": n, "observable": "T",
                                    "enumerated": report.pointed_total})
    return result


def _face_profiles(family: str, n: int) -> CheckResult:
    result = CheckResult(f"face-profile:{family}:{n}")
    report = pointed_rooted_profile(n, family, kind="face")
    table = closed_form(family, n + 2, order=n)
    for triple in admissible_triples(family, n + 3):
        result.cases += 1
        found, expected = triple_count(report, triple), table.triple(triple).coefficient(n)
        if found != expected:
            result.failures.append({"family": family, "n": n, "triple": list(triple),
                                    "enumerated": found, "series": str(expected)})
    return result


# recurrence against closed form


def _full_order(family: str) -> int:
    fam = FAMILIES[family]
    return 20 if fam.grid_step == 2 or fam.two_parameter else 30


def _provenances(family: str, order: int, z: Fraction | None) -> CheckResult:
    label = family if z is None else f"{family}@{z}"
    result = CheckResult(f"closedform:{label}", cases=1)
    mismatches = compare_provenances(family, I_MAX, order, z)
    if mismatches:
        result.failures.append({"family": family, "order": order, "z": None if z is None else str(z),
                                "mismatches": mismatches})
    return result


# identities


def _identities(family: str, order: int) -> CheckResult:
    results = check_identities(closed_form(family, I_MAX, order))
    failed = sorted(name for name, ok in results.items() if not ok)
    result = CheckResult(f"identities:{family}", cases=len(results))
    if failed:
        result.failures.append({"family": family, "order": order, "identities": failed})
    return result


def _ansatz(family: str, order: int) -> CheckResult:
    report = verify_ansatz(family, I_MAX, order)
    result = CheckResult(f"ansatz:{family}", cases=len(report.residuals))
    if not report.ok:
        result.failures.append(report.to_json())
    alpha = closed_form(family, 1, order).series("alpha").at_z(1)
    result.cases += 1
    if alpha != Series1.constant(1, order):
        result.failures.append({"family": family, "order": order, "identity": "alpha(t,1)=1"})
    return result


def _continued_fractions(order: int) -> CheckResult:
    result = CheckResult("continued-fraction")
    cases = [("GeneralMap", None)] + [("GeneralMap2Par", z) for z in WEIGHTS]
    for family, z in cases:
        result.cases += 1
        if not continued_fraction_check(family, order, z):
            result.failures.append({"family": family, "order": order, "z": None if z is None else str(z)})
    result.cases += 1
    if not bipartite_continued_fraction(order).agrees_with(closed_form("BipartiteMap", 1, order).series("R")):
        result.failures.append({"family": "BipartiteMap", "order": order})
    return result


def _characteristic(order: int) -> CheckResult:
    result = CheckResult("characteristic")
    for family in ("GeneralMap", "BipartiteMap"):
        result.cases += 1
        if not characteristic_check(family, order):
            result.failures.append({"family": family, "order": order})
    result.cases += 1
    if not alternative_v_check(I_MAX, order):
        result.failures.append({"family": "ThreeConstellation", "order": order, "identity": "v"})
    return result


def _asymptotics() -> CheckResult:
    result = CheckResult("asymptotics")
    expected = [
        ("GeneralMap", 1, "e_up", Fraction(28, 9)),
        ("GeneralMap", 0, "e_level", Fraction(8, 9)),
        ("GeneralMap", 1, "v", Fraction(21, 8)),
        ("BipartiteMap", 1, "e_up", Fraction(3)),
    ]
    for family, i, name, value in expected:
        result.cases += 1
        found = getattr(asymptotic_constants(family, i), name)
        if found != value:
            result.failures.append({"family": family, "i": i, "constant": name,
                                    "found": str(found), "expected": str(value)})
    return result


def _cpq() -> CheckResult:
    result = CheckResult("cpq")
    for p in range(2, 6):
        for t in (Fraction(1, 100), Fraction(1, 200)):
            result.cases += 1
            report = cpq_identity_check(p, t)
            if not report.ok:
                result.failures.append(report.to_json())
    return result


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "close-after-open": _close_after_open,
    "open-after-close": _open_after_close,
    "mirror": _mirror,
    "mobile": _mobile_round_trip,
    "parameters": _parameters,
    "constellation": _constellations,
    "profile": _map_profiles,
    "face-profile": _face_profiles,
    "closedform": _provenances,
    "identities": _identities,
    "ansatz": _ansatz,
    "continued-fraction": _continued_fractions,
    "characteristic": _characteristic,
    "asymptotics": _asymptotics,
    "cpq": _cpq,
}


def plan(suite: str, max_edges: int = 3, order: int | None = None) -> list[tuple[str, tuple]]:
    """
    Split a suite into independent checks.

    Args:
        suite (str): One of ``roundtrip``, ``oracle``, ``closedform``, ``identities`` or ``all``.
        max_edges (int): Largest size of the exhaustive suites.
        order (int | None): Truncation order of the series suites; each family's full order when absent.

    Returns:
        list[tuple[str, tuple]]: Check names with their arguments.
    """
    if suite == "all":
        return [task for name in SUITES for task in plan(name, max_edges, order)]
    if suite not in SUITES:
        raise CapacityError(f"unknown suite {suite!r}")
    if max_edges < 1 or max_edges > settings.MAX_MAP_EDGES:
        raise CapacityError(f"--max-edges must lie in 1..{settings.MAX_MAP_EDGES}, got {max_edges}")
    if order is not None and not 1 <= order <= settings.MAX_SERIES_ORDER:
        raise CapacityError(f"--order must lie in 1..{settings.MAX_SERIES_ORDER}, got {order}")
    sizes = range(1, max_edges + 1)
    if suite == "roundtrip":
        names = ("close-after-open", "open-after-close", "mirror", "parameters", "mobile")
        darks = range(1, min(max_edges, settings.MAX_HYPERMAP_DARKS) + 1)
        return [(name, (n,)) for n in sizes for name in names] + [("constellation", (k,)) for k in darks]
    if suite == "oracle":
        darks = range(1, min(max_edges, settings.MAX_HYPERMAP_DARKS) + 1)
        return (
            [("profile", (family, n)) for family in ("GeneralMap", "BipartiteMap", "GeneralHypermap") for n in sizes]
            + [("face-profile", (family, n)) for family in ("ThreeHypermap", "ThreeConstellation") for n in darks]
        )
    if suite == "closedform":
        tasks = [("closedform", (family, order or _full_order(family), None)) for family in FAMILIES]
        tasks += [("closedform", ("GeneralMap2Par", order or _full_order("GeneralMap2Par"), z)) for z in WEIGHTS]
        return tasks
    tasks = [
        ("identities", (family, order or _full_order(family)))
        for family, fam in FAMILIES.items()
        if not fam.two_parameter
    ]
    tasks += [("ansatz", (family, order or _full_order(family))) for family, fam in FAMILIES.items() if fam.two_parameter]
    tasks += [
        ("continued-fraction", (order or 30,)),
        ("characteristic", (order or 30,)),
        ("asymptotics", ()),
        ("cpq", ()),
    ]
    return tasks


def _run(task: tuple[str, tuple]) -> CheckResult:
    name, args = task
    try:
        result = CHECKS[name](*args)
    except CapacityError:
        raise
    except CartoError as err:
        result = CheckResult(name, 1, [{"check": name, "args": [str(a) for a in args], "error": str(err)}])
    if not result.ok:
        logger.warning("check %s failed on %d instances", result.name, len(result.failures))
    else:
        logger.debug("check %s passed on %d cases", result.name, result.cases)
    return result


def run_suite(suite: str, max_edges: int = 3, order: int | None = None, jobs: int | None = None) -> SuiteReport:
    """
    Run a verification suite.

    Args:
        suite (str): Suite name, or ``all``.
        max_edges (int): Largest size of the exhaustive suites.
        order (int | None): Truncation order of the series suites.
        jobs (int | None): Worker processes, ``settings.JOBS`` by default.

    Returns:
        SuiteReport: One result per check, in plan order.
    """
    tasks = plan(suite, max_edges, order)
    jobs = jobs or settings.JOBS
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run, tasks))
    else:
        results = [_run(task) for task in tasks]
    report = SuiteReport(suite, results)
    logger.info(
        "suite %s: %d checks, %d failed", suite, len(results), len(report.failures())
    )
    return report
