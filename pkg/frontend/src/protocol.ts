/** Wire message types mirrored from the telemetry server (docs/PROTOCOL.md). */

export type SessionState = "calibrating" | "live" | "ended";

export interface HelloMessage {
  kind: "hello";
  session_id: string;
  role: "device" | "viewer";
}

export interface SwingMessage {
  kind: "swing";
  session_id: string;
  start_ms: number;
  end_ms: number;
  peak_omega_dps: number;
  peak_speed_mph: number;
  peak_power_pct: number;
}

export interface SessionStateMessage {
  kind: "session_state";
  session_id: string;
  state: SessionState;
  dropped: number;
}

export interface ErrorMessage {
  kind: "error";
  session_id: string;
  code: string;
  detail: string;
}

export type ServerMessage = SwingMessage | SessionStateMessage | ErrorMessage;

export function viewerHello(sessionId: string): HelloMessage {
  return { kind: "hello", session_id: sessionId, role: "viewer" };
}

/** Parse one wire line; returns null for messages this client does not handle. */
export function parseServerMessage(line: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  if (msg.kind === "swing" || msg.kind === "session_state" || msg.kind === "error") {
    return msg as unknown as ServerMessage;
  }
  return null;
}
