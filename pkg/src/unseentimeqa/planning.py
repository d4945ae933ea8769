"""Scenario synthesis and plan interchange text.

A scenario bundles a world, an initial state, delivery goals, and a valid
plan moving every package to its goal.  Worlds are sampled from a size
hint; plans come from a deterministic three-phase router:

1. *feeders* — trucks carry each package to its origin-city airport (or all
   the way, for same-city deliveries);
2. *air tour* — one airplane hops between airports, dropping off and
   picking up every package that must change city;
3. *last mile* — trucks distribute landed packages, batching packages that
   share the same airport-to-destination leg.

Generation retries with fresh world samples until the plan length falls in
``PLAN_LENGTH_RANGE``; scenarios are therefore a pure function of their seed.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import domain
from .domain import GroundEvent, World, WorldState
from .errors import PlanningError, PlanTextError
from .seeds import rng_for

PLAN_LENGTH_RANGE = (25, 33)


@dataclass(frozen=True)
class SizeHint:
    """Inclusive sampling ranges for world inventory sizes."""

    cities: tuple[int, int] = (2, 3)
    locations_per_city: tuple[int, int] = (2, 3)
    trucks: tuple[int, int] = (1, 3)
    airplanes: tuple[int, int] = (1, 2)
    packages: tuple[int, int] = (4, 6)


DEFAULT_SIZE_HINT = SizeHint()


@dataclass(frozen=True, eq=True)
class Scenario:
    """A fully planned delivery problem."""

    scenario_id: int
    world: World
    init: WorldState
    goals: dict[str, str]
    plan: tuple[GroundEvent, ...]

    @property
    def n_events(self) -> int:
        return len(self.plan)


def _numeric_sort(ids) -> list[str]:
    return sorted(ids, key=lambda s: (len(s), s))


def _sample_world(rng, hint: SizeHint) -> tuple[World, WorldState, dict[str, str]]:
    n_cities = rng.randint(*hint.cities)
    cities = tuple(f"c{k}" for k in range(n_cities))
    locations: list[str] = []
    city_of: dict[str, str] = {}
    airports: set[str] = set()
    for k in range(n_cities):
        n_loc = rng.randint(*hint.locations_per_city)
        for j in range(n_loc):
            loc = f"l{k}_{j}"
            locations.append(loc)
            city_of[loc] = cities[k]
        airports.add(f"l{k}_0")  # every city gets one airport

    trucks = tuple(f"t{i}" for i in range(rng.randint(*hint.trucks)))
    airplanes = tuple(f"a{i}" for i in range(rng.randint(*hint.airplanes)))
    packages = tuple(f"p{i}" for i in range(rng.randint(*hint.packages)))

    world = World(
        cities=cities,
        locations=tuple(locations),
        city_of=city_of,
        airports=frozenset(airports),
        trucks=trucks,
        airplanes=airplanes,
        packages=packages,
    )

    position: dict[str, str] = {}
    # Spread the first trucks over distinct cities, then place the rest freely.
    city_order = list(cities)
    rng.shuffle(city_order)
    for i, t in enumerate(trucks):
        city = city_order[i % len(city_order)]
        position[t] = rng.choice(world.locations_in(city))
    for a in airplanes:
        position[a] = rng.choice(sorted(airports))
    goals: dict[str, str] = {}
    for p in packages:
        origin = rng.choice(locations)
        dest = rng.choice([l for l in locations if l != origin])
        position[p] = origin
        goals[p] = dest
    return world, WorldState(position), goals


class _Router:
    """Stateful plan builder; turns goals into a valid event sequence."""

    def __init__(self, world: World, init: WorldState):
        self.world = world
        self.pos = dict(init.position)
        self.events: list[GroundEvent] = []

    def _truck_for(self, city: str, prefer_at: str | None = None) -> str | None:
        candidates = [t for t in _numeric_sort(self.world.trucks)
                      if self.world.city_of[self.pos[t]] == city]
        if not candidates:
            return None
        if prefer_at:
            for t in candidates:
                if self.pos[t] == prefer_at:
                    return t
        return candidates[0]

    def _drive(self, truck: str, dest: str) -> None:
        origin = self.pos[truck]
        if origin == dest:
            return
        self.events.append(GroundEvent(domain.DRIVE_TRUCK, truck,
                                       origin=origin, dest=dest))
        self.pos[truck] = dest

    def _fly(self, plane: str, dest: str) -> None:
        origin = self.pos[plane]
        self.events.append(GroundEvent(domain.FLY_AIRPLANE, plane,
                                       origin=origin, dest=dest))
        self.pos[plane] = dest

    def _load(self, package: str, vehicle: str) -> None:
        loc = self.pos[vehicle]
        kind = (domain.LOAD_TRUCK if vehicle in self.world.trucks
                else domain.LOAD_AIRPLANE)
        self.events.append(GroundEvent(kind, vehicle, package=package,
                                       location=loc))
        self.pos[package] = vehicle

    def _unload(self, package: str, vehicle: str) -> None:
        loc = self.pos[vehicle]
        kind = (domain.UNLOAD_TRUCK if vehicle in self.world.trucks
                else domain.UNLOAD_AIRPLANE)
        self.events.append(GroundEvent(kind, vehicle, package=package,
                                       location=loc))
        self.pos[package] = loc

    def truck_leg(self, package: str, dest: str) -> bool:
        """Carry one package by truck to ``dest`` inside its current city."""
        origin = self.pos[package]
        city = self.world.city_of[origin]
        truck = self._truck_for(city, prefer_at=origin)
        if truck is None:
            return False
        self._drive(truck, origin)
        self._load(package, truck)
        self._drive(truck, dest)
        self._unload(package, truck)
        return True

    def air_tour(self, plane: str, demands: list[tuple[str, str, str]]) -> bool:
        """Fly ``plane`` between airports until every (package, from, to)
        demand is delivered to its destination airport."""
        waiting: dict[str, list[tuple[str, str]]] = {}
        for p, ap_from, ap_to in demands:
            waiting.setdefault(ap_from, []).append((p, ap_to))
        for stack in waiting.values():
            stack.sort(key=lambda pd: (len(pd[0]), pd[0]))
        aboard: list[tuple[str, str]] = []

        for _ in range(8 * len(demands) + 8):  # generous loop bound
            here = self.pos[plane]
            for p, dest in [pd for pd in aboard if pd[1] == here]:
                self._unload(p, plane)
                aboard.remove((p, dest))
            for p, dest in waiting.pop(here, []):
                self._load(p, plane)
                aboard.append((p, dest))
            if aboard:
                self._fly(plane, aboard[0][1])
            elif waiting:
                target = min(waiting,
                             key=lambda ap: (len(waiting[ap][0][0]),
                                             waiting[ap][0][0]))
                self._fly(plane, target)
            else:
                return True
        return False

    def batched_last_mile(self, legs: list[tuple[str, str, str]]) -> bool:
        """Distribute landed packages; ``legs`` holds (package, from, to).
        Packages sharing a (from, to) pair ride the same truck together."""
        groups: dict[tuple[str, str], list[str]] = {}
        for p, ap, dest in legs:
            groups.setdefault((ap, dest), []).append(p)
        for (ap, dest), packs in groups.items():
            city = self.world.city_of[dest]
            truck = self._truck_for(city, prefer_at=ap)
            if truck is None:
                return False
            self._drive(truck, ap)
            for p in packs:
                self._load(p, truck)
            self._drive(truck, dest)
            for p in packs:
                self._unload(p, truck)
        return True


def plan_deliveries(world: World, init: WorldState,
                    goals: dict[str, str]) -> list[GroundEvent] | None:
    """Compute a valid plan for ``goals``, or None when routing fails
    (no truck in a needed city, no airplane for a cross-city demand)."""
    router = _Router(world, init)
    flight_demands: list[tuple[str, str, str]] = []
    last_mile: list[tuple[str, str, str]] = []

    for p in world.packages:
        origin, dest = init.position[p], goals[p]
        if origin == dest:
            continue
        if world.same_city(origin, dest):
            if not router.truck_leg(p, dest):
                return None
            continue
        ap_from = world.airport_of(world.city_of[origin])
        ap_to = world.airport_of(world.city_of[dest])
        if ap_from is None or ap_to is None or not world.airplanes:
            return None
        if origin != ap_from and not router.truck_leg(p, ap_from):
            return None
        flight_demands.append((p, ap_from, ap_to))
        if dest != ap_to:
            last_mile.append((p, ap_to, dest))

    if flight_demands:
        plane = _numeric_sort(world.airplanes)[0]
        if not router.air_tour(plane, flight_demands):
            return None
    if last_mile and not router.batched_last_mile(last_mile):
        return None
    return router.events


def generate_scenario(seed: int, hint: SizeHint = DEFAULT_SIZE_HINT,
                      max_attempts: int = 100) -> Scenario:
    """Deterministically build a scenario whose plan length falls in
    ``PLAN_LENGTH_RANGE``; raises :class:`PlanningError` on exhaustion."""
    if hint.packages[0] < 1:
        raise PlanningError("size hint allows zero packages")
    lo, hi = PLAN_LENGTH_RANGE
    for attempt in range(max_attempts):
        rng = rng_for("scenario", seed, attempt)
        world, init, goals = _sample_world(rng, hint)
        plan = plan_deliveries(world, init, goals)
        if plan is None or not lo <= len(plan) <= hi:
            continue
        report = domain.validate_plan(world, init, plan)
        if not report.ok:  # the router must never emit an invalid plan
            raise PlanningError(
                f"router produced an invalid plan at step {report.failed_index}: "
                f"{report.reason}"
            )
        for p, dest in goals.items():
            if report.final_state.position[p] != dest:
                raise PlanningError(f"plan leaves {p} short of its goal {dest}")
        return Scenario(seed, world, init, goals, tuple(plan))
    raise PlanningError(
        f"no plan of length {lo}..{hi} found for seed {seed} "
        f"in {max_attempts} attempts"
    )


# --- plan interchange text --------------------------------------------------

_EVENT_ARITY = {
    domain.LOAD_TRUCK: 3, domain.UNLOAD_TRUCK: 3, domain.DRIVE_TRUCK: 3,
    domain.LOAD_AIRPLANE: 3, domain.UNLOAD_AIRPLANE: 3, domain.FLY_AIRPLANE: 3,
}


def write_plan_text(scenario: Scenario) -> str:
    """Serialize a scenario to line-oriented interchange text.

    The layout is: ``scenario`` header, ``city``/``location``/``airport``
    declarations, vehicle and package declarations, ``at`` initial positions,
    ``goal`` lines, then one line per plan event.
    """
    w = scenario.world
    lines = [f"scenario {scenario.scenario_id}"]
    lines += [f"city {c}" for c in w.cities]
    lines += [f"location {l} {w.city_of[l]}" for l in w.locations]
    lines += [f"airport {l}" for l in w.locations if l in w.airports]
    lines += [f"truck {t}" for t in w.trucks]
    lines += [f"airplane {a}" for a in w.airplanes]
    lines += [f"package {p}" for p in w.packages]
    lines += [f"at {e} {scenario.init.position[e]}" for e in w.movables]
    lines += [f"goal {p} {scenario.goals[p]}" for p in w.packages]
    for ev in scenario.plan:
        if domain.is_transfer(ev.kind):
            lines.append(f"{ev.kind} {ev.package} {ev.vehicle} {ev.location}")
        else:
            lines.append(f"{ev.kind} {ev.vehicle} {ev.origin} {ev.dest}")
    return "\n".join(lines) + "\n"


def parse_plan_text(text: str) -> Scenario:
    """Parse interchange text back into a scenario.

    Raises :class:`PlanTextError` with a line number for syntax problems and
    for semantically invalid content (unknown ids, inapplicable plans).
    """
    scenario_id = 0
    cities: list[str] = []
    locations: list[str] = []
    city_of: dict[str, str] = {}
    airports: set[str] = set()
    trucks: list[str] = []
    airplanes: list[str] = []
    packages: list[str] = []
    at: dict[str, str] = {}
    goals: dict[str, str] = {}
    events: list[GroundEvent] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head, args = tokens[0], tokens[1:]
        try:
            if head == "scenario" and len(args) == 1:
                scenario_id = int(args[0])
            elif head == "city" and len(args) == 1:
                cities.append(args[0])
            elif head == "location" and len(args) == 2:
                locations.append(args[0])
                if args[1] not in cities:
                    raise PlanTextError(f"unknown city {args[1]!r}", line_no)
                city_of[args[0]] = args[1]
            elif head == "airport" and len(args) == 1:
                if args[0] not in city_of:
                    raise PlanTextError(f"unknown location {args[0]!r}", line_no)
                airports.add(args[0])
            elif head == "truck" and len(args) == 1:
                trucks.append(args[0])
            elif head == "airplane" and len(args) == 1:
                airplanes.append(args[0])
            elif head == "package" and len(args) == 1:
                packages.append(args[0])
            elif head == "at" and len(args) == 2:
                at[args[0]] = args[1]
            elif head == "goal" and len(args) == 2:
                goals[args[0]] = args[1]
            elif head in _EVENT_ARITY and len(args) == _EVENT_ARITY[head]:
                if domain.is_transfer(head):
                    events.append(GroundEvent(head, args[1], package=args[0],
                                              location=args[2]))
                else:
                    events.append(GroundEvent(head, args[0], origin=args[1],
                                              dest=args[2]))
            else:
                raise PlanTextError(f"unrecognized line {line!r}", line_no)
        except PlanTextError:
            raise
        except (ValueError, domain.MalformedEventError) as exc:
            raise PlanTextError(str(exc), line_no) from exc

    world = World(tuple(cities), tuple(locations), city_of,
                  frozenset(airports), tuple(trucks), tuple(airplanes),
                  tuple(packages))
    problems = domain.validate_world(world)
    if problems:
        raise PlanTextError("invalid world: " + "; ".join(problems))
    init = WorldState(dict(at))
    problems = domain.validate_state(world, init)
    if problems:
        raise PlanTextError("invalid initial state: " + "; ".join(problems))
    for p in goals:
        if p not in packages:
            raise PlanTextError(f"goal for unknown package {p!r}")
    report = domain.validate_plan(world, init, events)
    if not report.ok:
        raise PlanTextError(
            f"plan fails at event {report.failed_index}: {report.reason}"
        )
    return Scenario(scenario_id, world, init, goals, tuple(events))


__all__ = [
    "SizeHint", "DEFAULT_SIZE_HINT", "Scenario", "PLAN_LENGTH_RANGE",
    "plan_deliveries", "generate_scenario", "write_plan_text",
    "parse_plan_text",
]
