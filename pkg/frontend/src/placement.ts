/** Floating-panel placement, persisted so it survives reconnects within a
 * browser session. Coordinates are normalized viewport fractions. */

export interface PanelPlacement {
  x: number; // [0, 1]
  y: number; // [0, 1]
  docked: boolean;
}

/** The subset of the Storage API the store needs (sessionStorage in the
 * browser, any map-backed stand-in elsewhere). */
export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

// players favour a spot slightly above the court, still in view
export const DEFAULT_PLACEMENT: PanelPlacement = { x: 0.5, y: 0.12, docked: false };

const clamp01 = (v: number) => Math.max(0, Math.min(1, v));

export class PlacementStore {
  private readonly key: string;

  constructor(private readonly storage: KeyValueStore, sessionId: string) {
    this.key = `swingmeter.panel.${sessionId}`;
  }

  load(): PanelPlacement {
    const raw = this.storage.getItem(this.key);
    if (raw === null) return { ...DEFAULT_PLACEMENT };
    try {
      const parsed = JSON.parse(raw) as Partial<PanelPlacement>;
      return {
        x: clamp01(typeof parsed.x === "number" ? parsed.x : DEFAULT_PLACEMENT.x),
        y: clamp01(typeof parsed.y === "number" ? parsed.y : DEFAULT_PLACEMENT.y),
        docked: parsed.docked === true,
      };
    } catch {
      return { ...DEFAULT_PLACEMENT };
    }
  }

  save(placement: PanelPlacement): void {
    const clamped: PanelPlacement = {
      x: clamp01(placement.x),
      y: clamp01(placement.y),
      docked: placement.docked,
    };
    this.storage.setItem(this.key, JSON.stringify(clamped));
  }
}

export class MemoryStore implements KeyValueStore {
  private readonly map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
}
