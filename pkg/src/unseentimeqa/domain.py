"""Logistics transport domain: worlds, states, ground events.

The domain models package delivery across cities.  Trucks drive between
locations of one city; airplanes fly between airports of different cities;
packages ride inside vehicles.  Entity ids follow a fixed naming scheme:

* city ``cK``
* location ``lK_J`` (location ``J`` of city ``K``; ``lK_0`` is typically
  the city's airport)
* truck ``tK``, airplane ``aK``, package ``pK``

Six ground event kinds exist.  :func:`apply_event` advances a state by one
event; :func:`validate_plan` folds a whole event sequence and reports the
first failure instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MalformedEventError, PreconditionError

# Event kinds (the same spellings are used in plan interchange text).
LOAD_TRUCK = "load-truck"
UNLOAD_TRUCK = "unload-truck"
DRIVE_TRUCK = "drive-truck"
LOAD_AIRPLANE = "load-airplane"
UNLOAD_AIRPLANE = "unload-airplane"
FLY_AIRPLANE = "fly-airplane"

EVENT_KINDS = (
    LOAD_TRUCK,
    UNLOAD_TRUCK,
    DRIVE_TRUCK,
    LOAD_AIRPLANE,
    UNLOAD_AIRPLANE,
    FLY_AIRPLANE,
)

_LOADS = {LOAD_TRUCK, LOAD_AIRPLANE}
_UNLOADS = {UNLOAD_TRUCK, UNLOAD_AIRPLANE}
_MOVES = {DRIVE_TRUCK, FLY_AIRPLANE}


def is_load(kind: str) -> bool:
    return kind in _LOADS


def is_unload(kind: str) -> bool:
    return kind in _UNLOADS


def is_transfer(kind: str) -> bool:
    """True for load and unload events (package transfer at a location)."""
    return kind in _LOADS or kind in _UNLOADS


def is_movement(kind: str) -> bool:
    return kind in _MOVES


def vehicle_kind(kind: str) -> str:
    """``"truck"`` or ``"airplane"`` for any event kind."""
    return "truck" if kind in (LOAD_TRUCK, UNLOAD_TRUCK, DRIVE_TRUCK) else "airplane"


@dataclass(frozen=True)
class GroundEvent:
    """One untimed plan step.

    Transfers carry ``package`` and ``location``; movements carry ``origin``
    and ``dest``.  ``vehicle`` is always present.  Field presence is checked
    at construction so a malformed event fails as early as possible.
    """

    kind: str
    vehicle: str
    package: str | None = None
    location: str | None = None
    origin: str | None = None
    dest: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise MalformedEventError(f"unknown event kind {self.kind!r}")
        if not self.vehicle:
            raise MalformedEventError(f"{self.kind} event without a vehicle")
        if is_transfer(self.kind):
            if not self.package or not self.location:
                raise MalformedEventError(
                    f"{self.kind} event needs a package and a location, got "
                    f"package={self.package!r} location={self.location!r}"
                )
            if self.origin or self.dest:
                raise MalformedEventError(
                    f"{self.kind} event must not carry route fields"
                )
        else:
            if not self.origin or not self.dest:
                raise MalformedEventError(
                    f"{self.kind} event needs origin and dest, got "
                    f"origin={self.origin!r} dest={self.dest!r}"
                )
            if self.package or self.location:
                raise MalformedEventError(
                    f"{self.kind} event must not carry transfer fields"
                )

    def involves(self, entity: str) -> bool:
        """True if the entity id appears in any role of this event."""
        return entity in (self.vehicle, self.package, self.location,
                          self.origin, self.dest)


@dataclass(frozen=True)
class World:
    """Static scenario geography and inventory.

    ``city_of`` maps every location to its city; ``airports`` is the subset
    of locations that airplanes may use.  Tuples preserve creation order so
    that rendering and interchange round-trips are stable.
    """

    cities: tuple[str, ...]
    locations: tuple[str, ...]
    city_of: dict[str, str]
    airports: frozenset[str]
    trucks: tuple[str, ...]
    airplanes: tuple[str, ...]
    packages: tuple[str, ...]

    @property
    def vehicles(self) -> tuple[str, ...]:
        return self.trucks + self.airplanes

    @property
    def movables(self) -> tuple[str, ...]:
        """Entities that have a position: vehicles and packages."""
        return self.trucks + self.airplanes + self.packages

    def locations_in(self, city: str) -> tuple[str, ...]:
        return tuple(l for l in self.locations if self.city_of[l] == city)

    def airport_of(self, city: str) -> str | None:
        for l in self.locations:
            if self.city_of[l] == city and l in self.airports:
                return l
        return None

    def same_city(self, a: str, b: str) -> bool:
        return self.city_of[a] == self.city_of[b]


@dataclass
class WorldState:
    """Dynamic positions of all movable entities.

    ``position[x]`` is a location id for a vehicle or a grounded package,
    and a vehicle id for a package riding inside that vehicle.
    """

    position: dict[str, str] = field(default_factory=dict)

    def copy(self) -> "WorldState":
        return WorldState(dict(self.position))

    def carrier_of(self, package: str, world: World) -> str | None:
        """The vehicle holding ``package``, or None if it is on the ground."""
        pos = self.position[package]
        return pos if pos in world.vehicles else None

    def ground_location(self, entity: str, world: World) -> str | None:
        """The location of an entity, or None for a package inside a vehicle."""
        pos = self.position[entity]
        return pos if pos in world.city_of else None


def validate_world(world: World) -> list[str]:
    """Structural checks on a world; returns a list of problems (empty = ok)."""
    problems: list[str] = []
    seen: set[str] = set()
    for group, ids in (("city", world.cities), ("location", world.locations),
                       ("truck", world.trucks), ("airplane", world.airplanes),
                       ("package", world.packages)):
        for i in ids:
            if not i:
                problems.append(f"empty {group} id")
            elif i in seen:
                problems.append(f"duplicate id {i!r}")
            seen.add(i)
    for loc in world.locations:
        city = world.city_of.get(loc)
        if city is None:
            problems.append(f"location {loc} has no city")
        elif city not in world.cities:
            problems.append(f"location {loc} is in unknown city {city}")
    for loc in world.city_of:
        if loc not in world.locations:
            problems.append(f"city map mentions unknown location {loc}")
    for ap in world.airports:
        if ap not in world.locations:
            problems.append(f"airport {ap} is not a location")
    for city in world.cities:
        if not any(world.city_of.get(l) == city for l in world.locations):
            problems.append(f"city {city} has no locations")
    if world.airplanes and not world.airports:
        problems.append("airplanes exist but no airports do")
    return problems


def validate_state(world: World, state: WorldState) -> list[str]:
    """Checks a state against a world; returns a list of problems."""
    problems: list[str] = []
    for entity in world.movables:
        if entity not in state.position:
            problems.append(f"{entity} has no position")
    for entity, pos in state.position.items():
        if entity not in world.movables:
            problems.append(f"unknown entity {entity} has a position")
            continue
        if entity in world.packages:
            if pos not in world.city_of and pos not in world.vehicles:
                problems.append(f"package {entity} at unknown position {pos}")
        else:
            if pos not in world.city_of:
                problems.append(f"vehicle {entity} at non-location {pos}")
            elif entity in world.airplanes and pos not in world.airports:
                problems.append(f"airplane {entity} parked outside an airport ({pos})")
    return problems


def _check_structure(world: World, ev: GroundEvent) -> None:
    """Raise MalformedEventError for problems independent of state."""
    kind = ev.kind
    want_truck = vehicle_kind(kind) == "truck"
    fleet = world.trucks if want_truck else world.airplanes
    if ev.vehicle not in fleet:
        raise MalformedEventError(
            f"{kind}: {ev.vehicle!r} is not a known {vehicle_kind(kind)}"
        )
    if is_transfer(kind):
        if ev.package not in world.packages:
            raise MalformedEventError(f"{kind}: unknown package {ev.package!r}")
        if ev.location not in world.city_of:
            raise MalformedEventError(f"{kind}: unknown location {ev.location!r}")
    else:
        for loc in (ev.origin, ev.dest):
            if loc not in world.city_of:
                raise MalformedEventError(f"{kind}: unknown location {loc!r}")
        if ev.origin == ev.dest:
            raise MalformedEventError(f"{kind}: origin equals dest ({ev.origin})")
        if kind == DRIVE_TRUCK and not world.same_city(ev.origin, ev.dest):
            raise MalformedEventError(
                f"drive-truck route {ev.origin}->{ev.dest} crosses cities"
            )
        if kind == FLY_AIRPLANE:
            if world.same_city(ev.origin, ev.dest):
                raise MalformedEventError(
                    f"fly-airplane route {ev.origin}->{ev.dest} stays in one city"
                )
            for loc in (ev.origin, ev.dest):
                if loc not in world.airports:
                    raise MalformedEventError(
                        f"fly-airplane uses non-airport {loc}"
                    )


def event_applicable(world: World, state: WorldState,
                     ev: GroundEvent) -> tuple[bool, str | None]:
    """Check whether ``ev`` can apply to ``state``.

    Structural problems raise :class:`MalformedEventError`; a well-formed
    event that merely fails its preconditions returns ``(False, reason)``.
    """
    _check_structure(world, ev)
    pos = state.position
    kind = ev.kind
    if is_load(kind):
        if pos[ev.package] != ev.location:
            return False, (f"package {ev.package} is at {pos[ev.package]}, "
                           f"not at {ev.location}")
        if pos[ev.vehicle] != ev.location:
            return False, (f"{vehicle_kind(kind)} {ev.vehicle} is at "
                           f"{pos[ev.vehicle]}, not at {ev.location}")
    elif is_unload(kind):
        if pos[ev.package] != ev.vehicle:
            return False, (f"package {ev.package} is not inside {ev.vehicle} "
                           f"(it is at {pos[ev.package]})")
        if pos[ev.vehicle] != ev.location:
            return False, (f"{vehicle_kind(kind)} {ev.vehicle} is at "
                           f"{pos[ev.vehicle]}, not at {ev.location}")
    else:
        if pos[ev.vehicle] != ev.origin:
            return False, (f"{vehicle_kind(kind)} {ev.vehicle} is at "
                           f"{pos[ev.vehicle]}, not at {ev.origin}")
    return True, None


def apply_event(world: World, state: WorldState, ev: GroundEvent) -> WorldState:
    """Apply one event, returning a new state (the input is not mutated)."""
    ok, reason = event_applicable(world, state, ev)
    if not ok:
        raise PreconditionError(f"{ev.kind} {describe_event(ev)}: {reason}")
    nxt = state.copy()
    if is_load(ev.kind):
        nxt.position[ev.package] = ev.vehicle
    elif is_unload(ev.kind):
        nxt.position[ev.package] = ev.location
    else:
        nxt.position[ev.vehicle] = ev.dest
    return nxt


def describe_event(ev: GroundEvent) -> str:
    """Compact one-line description, e.g. ``load-truck p0 t1 @ l1_1``."""
    if is_transfer(ev.kind):
        return f"{ev.kind} {ev.package} {ev.vehicle} @ {ev.location}"
    return f"{ev.kind} {ev.vehicle} {ev.origin}->{ev.dest}"


@dataclass(frozen=True)
class PlanReport:
    """Result of folding a plan over a state.

    ``failed_index`` is the 1-based position of the first inapplicable or
    malformed event (None when the whole plan applies); ``final_state`` is
    the state reached after the last successful event.
    """

    ok: bool
    failed_index: int | None
    reason: str | None
    final_state: WorldState


def validate_plan(world: World, init: WorldState,
                  plan: tuple[GroundEvent, ...] | list[GroundEvent]) -> PlanReport:
    """Fold ``plan`` from ``init``; report rather than raise."""
    state = init.copy()
    for i, ev in enumerate(plan, start=1):
        try:
            state = apply_event(world, state, ev)
        except (MalformedEventError, PreconditionError) as exc:
            return PlanReport(False, i, str(exc), state)
    return PlanReport(True, None, None, state)


def carried_packages(plan: tuple[GroundEvent, ...] | list[GroundEvent]
                     ) -> list[frozenset[str]]:
    """For each plan position i (0-based), the set of packages inside the
    moving vehicle during ``plan[i]`` (empty for transfers).

    Derived purely from plan order, so it is valid for any schedule whose
    dependency structure respects each package's own event chain.
    """
    aboard: dict[str, set[str]] = {}
    out: list[frozenset[str]] = []
    for ev in plan:
        if is_load(ev.kind):
            aboard.setdefault(ev.vehicle, set()).add(ev.package)
            out.append(frozenset())
        elif is_unload(ev.kind):
            aboard.setdefault(ev.vehicle, set()).discard(ev.package)
            out.append(frozenset())
        else:
            out.append(frozenset(aboard.get(ev.vehicle, ())))
    return out


__all__ = [
    "LOAD_TRUCK", "UNLOAD_TRUCK", "DRIVE_TRUCK",
    "LOAD_AIRPLANE", "UNLOAD_AIRPLANE", "FLY_AIRPLANE", "EVENT_KINDS",
    "GroundEvent", "World", "WorldState", "PlanReport",
    "is_load", "is_unload", "is_transfer", "is_movement", "vehicle_kind",
    "validate_world", "validate_state", "event_applicable", "apply_event",
    "validate_plan", "describe_event", "carried_packages",
]
