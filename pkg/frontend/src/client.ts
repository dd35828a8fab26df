/** Viewer client: subscribes to a session and feeds the gauge/table models.
 *
 * The client renders server values only; it never recomputes metrics. On
 * connection loss it flips to a visible disconnected state and retries with
 * capped exponential backoff.
 */

import { GaugeView } from "./gauges.js";
import { parseServerMessage, viewerHello, type SessionState, type SwingMessage } from "./protocol.js";
import { SessionTable } from "./table.js";

/** Minimal WebSocket shape shared by browsers and the ws package.
 * Handler parameters are typed loosely so both implementations assign. */
export interface WebSocketLike {
  onopen: ((event: any) => void) | null;
  onmessage: ((event: any) => void) | null;
  onclose: ((event: any) => void) | null;
  onerror: ((event: any) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => WebSocketLike;

export interface DashboardOptions {
  serverUrl: string;
  sessionId: string;
  createSocket: SocketFactory;
  now?: () => number;
  /** Called after every state change; drive rendering from here. */
  onChange?: (client: DashboardClient) => void;
  retry?: boolean;
}

export const BACKOFF_BASE_MS = 500;
export const BACKOFF_CAP_MS = 5000;

export function backoffDelayMs(attempt: number): number {
  return Math.min(BACKOFF_CAP_MS, BACKOFF_BASE_MS * 2 ** attempt);
}

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export class DashboardClient {
  readonly speedGauge = new GaugeView("speed_mph");
  readonly powerGauge = new GaugeView("power_pct");
  readonly table = new SessionTable();

  status: ConnectionStatus = "connecting";
  sessionState: SessionState | null = null;
  droppedMessages = 0;
  lastError: string | null = null;
  swingCount = 0;
  /** now() timestamp of the last model update, for latency measurements. */
  lastApplyMs: number | null = null;

  private socket: WebSocketLike | null = null;
  private attempts = 0;
  private closed = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private staleTimer: ReturnType<typeof setInterval> | null = null;
  private readonly now: () => number;

  constructor(private readonly options: DashboardOptions) {
    this.now = options.now ?? (() => Date.now());
  }

  connect(): void {
    this.closed = false;
    this.open();
    if (this.staleTimer === null) {
      this.staleTimer = setInterval(() => this.refreshStaleness(), 1000);
    }
  }

  private open(): void {
    this.status = "connecting";
    this.notify();
    const socket = this.options.createSocket(this.options.serverUrl);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.status = "connected";
      socket.send(JSON.stringify(viewerHello(this.options.sessionId)) + "\n");
      this.notify();
    };
    socket.onmessage = (event) => this.handleLine(String(event.data));
    socket.onclose = () => this.handleDown();
    socket.onerror = () => {
      // onclose follows in both the browser and ws implementations
    };
  }

  private handleDown(): void {
    if (this.closed) return;
    this.status = "disconnected";
    this.notify();
    if (this.options.retry === false) return;
    const delay = backoffDelayMs(this.attempts);
    this.attempts += 1;
    this.retryTimer = setTimeout(() => this.open(), delay);
  }

  private handleLine(line: string): void {
    const message = parseServerMessage(line);
    if (message === null) return;
    if (message.kind === "swing") {
      this.applySwing(message);
    } else if (message.kind === "session_state") {
      this.sessionState = message.state;
      this.droppedMessages = message.dropped;
    } else {
      this.lastError = `${message.code}: ${message.detail}`;
    }
    this.notify();
  }

  private applySwing(swing: SwingMessage): void {
    const now = this.now();
    this.speedGauge.update(swing.peak_speed_mph, now);
    this.powerGauge.update(swing.peak_power_pct, now);
    this.table.push(swing);
    this.swingCount += 1;
    this.lastApplyMs = now;
  }

  private refreshStaleness(): void {
    const now = this.now();
    const wasStale = this.speedGauge.stale;
    this.speedGauge.checkStale(now);
    this.powerGauge.checkStale(now);
    if (this.speedGauge.stale !== wasStale) this.notify();
  }

  private notify(): void {
    this.options.onChange?.(this);
  }

  close(): void {
    this.closed = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    if (this.staleTimer !== null) clearInterval(this.staleTimer);
    this.retryTimer = null;
    this.staleTimer = null;
    this.socket?.close();
  }
}
