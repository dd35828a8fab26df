/** Browser entry point. Configure with ?server=ws://host:port&session=id */

import { DashboardClient } from "./client.js";
import { createPanel } from "./dom.js";
import { PlacementStore } from "./placement.js";

const params = new URLSearchParams(window.location.search);
const serverUrl = params.get("server") ?? "ws://127.0.0.1:7351";
const sessionId = params.get("session") ?? "default";

const placementStore = new PlacementStore(window.sessionStorage, sessionId);

const client = new DashboardClient({
  serverUrl,
  sessionId,
  createSocket: (url) => new WebSocket(url),
  onChange: () => panel.render(),
});

const panel = createPanel(document.body, client, placementStore);
client.connect();
panel.render();
