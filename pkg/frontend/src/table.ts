/** Rolling table of recent swings, newest first, capped at 50 rows.
 * Row values are the wire message values verbatim. */

import type { SwingMessage } from "./protocol.js";

export const TABLE_CAP = 50;

export interface SwingRow {
  startMs: number;
  endMs: number;
  speedMph: number;
  powerPct: number;
}

export class SessionTable {
  readonly rows: SwingRow[] = [];

  push(swing: SwingMessage): void {
    this.rows.unshift({
      startMs: swing.start_ms,
      endMs: swing.end_ms,
      speedMph: swing.peak_speed_mph,
      powerPct: swing.peak_power_pct,
    });
    if (this.rows.length > TABLE_CAP) {
      this.rows.length = TABLE_CAP; // oldest rows fall off the end
    }
  }

  get isEmpty(): boolean {
    return this.rows.length === 0;
  }
}
