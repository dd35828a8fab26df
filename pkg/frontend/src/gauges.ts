/** Gauge view models. The client never recomputes metrics: gauges render
 * server values verbatim; only the display scale is local state. */

export type GaugeMetric = "speed_mph" | "power_pct";

const STALE_AFTER_MS = 5000;

export class GaugeView {
  readonly metric: GaugeMetric;
  currentValue = 0;
  maxSeen: number;
  stale = false;
  lastUpdateMs: number | null = null;

  constructor(metric: GaugeMetric) {
    this.metric = metric;
    // power renders on a fixed 0..100 scale; speed auto-scales upward
    this.maxSeen = metric === "power_pct" ? 100 : 0;
  }

  update(value: number, nowMs: number): void {
    if (this.metric === "power_pct") {
      this.currentValue = Math.max(0, Math.min(100, value));
      this.maxSeen = 100;
    } else {
      this.currentValue = value;
      this.maxSeen = Math.max(this.maxSeen, value); // never rescales down
    }
    this.lastUpdateMs = nowMs;
    this.stale = false;
  }

  /** Needle position in [0, 1] of the gauge's current scale. */
  fraction(): number {
    if (this.maxSeen <= 0) return 0;
    return Math.max(0, Math.min(1, this.currentValue / this.maxSeen));
  }

  /** Refresh the staleness flag; true when no update arrived for 5 s. */
  checkStale(nowMs: number): boolean {
    this.stale = this.lastUpdateMs !== null && nowMs - this.lastUpdateMs > STALE_AFTER_MS;
    return this.stale;
  }
}
