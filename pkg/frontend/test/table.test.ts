import { describe, expect, it } from "vitest";

import type { SwingMessage } from "../src/protocol.js";
import { SessionTable, TABLE_CAP } from "../src/table.js";

function swing(n: number): SwingMessage {
  return {
    kind: "swing",
    session_id: "s",
    start_ms: n * 1000,
    end_ms: n * 1000 + 300,
    peak_omega_dps: n * 10,
    peak_speed_mph: n * 1.5,
    peak_power_pct: n,
  };
}

describe("session table", () => {
  it("starts empty", () => {
    expect(new SessionTable().isEmpty).toBe(true);
  });

  it("keeps newest first", () => {
    const table = new SessionTable();
    table.push(swing(1));
    table.push(swing(2));
    expect(table.rows[0].startMs).toBe(2000);
    expect(table.rows[1].startMs).toBe(1000);
  });

  it("caps at 50 rows dropping the oldest", () => {
    const table = new SessionTable();
    for (let n = 1; n <= 60; n += 1) table.push(swing(n));
    expect(table.rows).toHaveLength(TABLE_CAP);
    expect(table.rows[0].startMs).toBe(60000);
    expect(table.rows[TABLE_CAP - 1].startMs).toBe(11000);
  });

  it("carries wire values verbatim", () => {
    const table = new SessionTable();
    const message = swing(7);
    message.peak_speed_mph = 12.20956431;
    table.push(message);
    expect(table.rows[0].speedMph).toBe(12.20956431);
    expect(table.rows[0].powerPct).toBe(7);
  });
});
