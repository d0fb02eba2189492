import { describe, expect, it } from "vitest";

import { searchDestinations } from "../src/search";

const POIS = [
  { id: "entrance", name: "Entrance" },
  { id: "meeting_room", name: "Meeting Room" },
  { id: "toilet", name: "Toilet" },
  { id: "cafeteria", name: "Cafeteria" },
  { id: "elevator_lobby", name: "Elevator Lobby" },
];

describe("destination search ordering", () => {
  it("empty query lists recents first, then the rest alphabetically", () => {
    const got = searchDestinations(POIS, "", ["toilet"]);
    expect(got.map((p) => p.id)).toEqual([
      "toilet",
      "cafeteria",
      "elevator_lobby",
      "entrance",
      "meeting_room",
    ]);
  });

  it("most recent comes first", () => {
    const got = searchDestinations(POIS, "", ["cafeteria", "toilet"]);
    expect(got.slice(0, 2).map((p) => p.id)).toEqual(["cafeteria", "toilet"]);
  });

  it("query filters by case-insensitive substring", () => {
    expect(searchDestinations(POIS, "eleva").map((p) => p.id)).toEqual([
      "elevator_lobby",
    ]);
    expect(searchDestinations(POIS, "ELEVA").map((p) => p.id)).toEqual([
      "elevator_lobby",
    ]);
  });

  it("no match gives an empty list", () => {
    expect(searchDestinations(POIS, "spaceport")).toEqual([]);
  });

  it("query results ignore recents and stay alphabetical", () => {
    const got = searchDestinations(POIS, "e", ["toilet"]);
    const names = got.map((p) => p.name.toLowerCase());
    expect(names).toEqual([...names].sort());
    expect(got.some((p) => p.id === "toilet")).toBe(true);
  });

  it("unknown recents are skipped", () => {
    const got = searchDestinations(POIS, "", ["ghost", "cafeteria"]);
    expect(got[0].id).toBe("cafeteria");
    expect(got).toHaveLength(POIS.length);
  });
});
