import { describe, expect, it } from "vitest";

import { backoffDelayMs } from "../src/client.js";
import { DEFAULT_PLACEMENT, MemoryStore, PlacementStore } from "../src/placement.js";

describe("panel placement", () => {
  it("defaults to upper center", () => {
    const store = new PlacementStore(new MemoryStore(), "s1");
    expect(store.load()).toEqual(DEFAULT_PLACEMENT);
  });

  it("persists across reconnects within one browser session", () => {
    const storage = new MemoryStore();
    const before = new PlacementStore(storage, "s1");
    before.save({ x: 0.25, y: 0.8, docked: true });
    // a reconnect creates a fresh store over the same session storage
    const after = new PlacementStore(storage, "s1");
    expect(after.load()).toEqual({ x: 0.25, y: 0.8, docked: true });
  });

  it("is keyed per session", () => {
    const storage = new MemoryStore();
    new PlacementStore(storage, "a").save({ x: 0.1, y: 0.1, docked: false });
    expect(new PlacementStore(storage, "b").load()).toEqual(DEFAULT_PLACEMENT);
  });

  it("clamps coordinates into the viewport", () => {
    const storage = new MemoryStore();
    const store = new PlacementStore(storage, "s1");
    store.save({ x: 1.7, y: -0.4, docked: false });
    expect(store.load()).toEqual({ x: 1, y: 0, docked: false });
  });

  it("survives corrupted storage", () => {
    const storage = new MemoryStore();
    storage.setItem("swingmeter.panel.s1", "{nope");
    expect(new PlacementStore(storage, "s1").load()).toEqual(DEFAULT_PLACEMENT);
  });
});

describe("reconnect backoff", () => {
  it("doubles from 500 ms and caps at 5 s", () => {
    expect([0, 1, 2, 3, 4, 10].map(backoffDelayMs)).toEqual([500, 1000, 2000, 4000, 5000, 5000]);
  });
});
